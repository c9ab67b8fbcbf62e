//! Labeled-basis sparse complex state vectors.
//!
//! A [`SparseState`] is a map from composite basis labels to complex
//! amplitudes. Every position of a composite label belongs to one subsystem
//! of the state's layout, and the layout is kept in canonical order
//! (shutters first by index, then photons by index), so two states over the
//! same subsystems always agree on label ordering. A missing key means an
//! amplitude of exactly zero.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes with smaller magnitude are dropped after every arithmetic pass.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Post-selection probabilities below this are treated as impossible.
pub const POST_SELECTION_THRESHOLD: f64 = 1e-14;

/// Identifies one subsystem of a joint state.
///
/// The derived ordering is the canonical one: all shutters precede all
/// photons, each group sorted by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubsystemId {
    Shutter(u16),
    Photon(u16),
}

impl SubsystemId {
    pub fn is_photon(self) -> bool {
        matches!(self, SubsystemId::Photon(_))
    }

    pub fn index(self) -> u16 {
        match self {
            SubsystemId::Shutter(i) | SubsystemId::Photon(i) => i,
        }
    }
}

impl fmt::Display for SubsystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsystemId::Shutter(i) => write!(f, "s{i}"),
            SubsystemId::Photon(i) => write!(f, "p{i}"),
        }
    }
}

/// Basis label of a single subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Shutter localized at `slot`; slots `1..=N` are the slits and `N + 1`
    /// is the parking location away from the screen.
    ShutterAt(u16),
    /// Two-level shutter leaving its slit open.
    ShutterOpen,
    /// Two-level shutter closing its slit.
    ShutterClosed,
    /// Photon heading toward `slit`.
    PhotonIn(u16),
    /// Photon reflected back from `slit` by the shutter stage `stage`.
    PhotonRef { slit: u16, stage: u16 },
}

impl Mode {
    /// Whether this mode may appear on the given subsystem.
    pub fn fits(self, subsystem: SubsystemId) -> bool {
        match subsystem {
            SubsystemId::Shutter(_) => matches!(
                self,
                Mode::ShutterAt(_) | Mode::ShutterOpen | Mode::ShutterClosed
            ),
            SubsystemId::Photon(_) => matches!(self, Mode::PhotonIn(_) | Mode::PhotonRef { .. }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::ShutterAt(i) => write!(f, "at{i}"),
            Mode::ShutterOpen => write!(f, "op"),
            Mode::ShutterClosed => write!(f, "cl"),
            Mode::PhotonIn(i) => write!(f, "in{i}"),
            Mode::PhotonRef { slit, stage } => write!(f, "ref{slit}@{stage}"),
        }
    }
}

/// Composite basis label, one [`Mode`] per subsystem of the owning layout.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(Vec<Mode>);

impl Label {
    pub fn new(modes: Vec<Mode>) -> Self {
        Label(modes)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.0
    }

    pub(crate) fn modes_mut(&mut self) -> &mut [Mode] {
        &mut self.0
    }

    /// Render against a layout, e.g. `(s1=at3,p1=ref1@1)`.
    pub fn render(&self, layout: &[SubsystemId]) -> String {
        let parts: Vec<String> = layout
            .iter()
            .zip(&self.0)
            .map(|(id, mode)| format!("{id}={mode}"))
            .collect();
        format!("({})", parts.join(","))
    }
}

impl From<Vec<Mode>> for Label {
    fn from(modes: Vec<Mode>) -> Self {
        Label(modes)
    }
}

/// Sparse complex state over an ordered list of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    layout: Vec<SubsystemId>,
    amplitudes: BTreeMap<Label, Complex64>,
}

fn check_layout(layout: &[SubsystemId]) -> Result<()> {
    if layout.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::config(format!(
            "subsystem layout {} is not strictly increasing in canonical order",
            render_layout(layout)
        )));
    }
    Ok(())
}

pub(crate) fn render_layout(layout: &[SubsystemId]) -> String {
    let ids: Vec<String> = layout.iter().map(ToString::to_string).collect();
    format!("[{}]", ids.join(","))
}

fn prune(amplitudes: &mut BTreeMap<Label, Complex64>) {
    amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
}

impl SparseState {
    /// Build a state from `(modes, amplitude)` terms. Repeated labels are
    /// summed. The result is not normalized.
    pub fn from_terms<I>(layout: Vec<SubsystemId>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Mode>, Complex64)>,
    {
        check_layout(&layout)?;
        let mut amplitudes = BTreeMap::new();
        for (modes, amp) in terms {
            if modes.len() != layout.len() {
                return Err(Error::config(format!(
                    "label of arity {} does not match layout {}",
                    modes.len(),
                    render_layout(&layout)
                )));
            }
            if let Some((id, mode)) = layout.iter().zip(&modes).find(|(id, m)| !m.fits(**id)) {
                return Err(Error::config(format!(
                    "mode {mode} cannot appear on subsystem {id}"
                )));
            }
            *amplitudes
                .entry(Label(modes))
                .or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        prune(&mut amplitudes);
        Ok(SparseState { layout, amplitudes })
    }

    /// A single basis ket with unit amplitude.
    pub fn basis(layout: Vec<SubsystemId>, modes: Vec<Mode>) -> Result<Self> {
        Self::from_terms(layout, [(modes, Complex64::new(1.0, 0.0))])
    }

    /// The one-dimensional state over no subsystems, with amplitude one.
    pub fn scalar(value: Complex64) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Label(Vec::new()), value);
        prune(&mut amplitudes);
        SparseState {
            layout: Vec::new(),
            amplitudes,
        }
    }

    pub fn zero(layout: Vec<SubsystemId>) -> Result<Self> {
        check_layout(&layout)?;
        Ok(SparseState {
            layout,
            amplitudes: BTreeMap::new(),
        })
    }

    pub fn layout(&self) -> &[SubsystemId] {
        &self.layout
    }

    pub fn position(&self, subsystem: SubsystemId) -> Option<usize> {
        self.layout.binary_search(&subsystem).ok()
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn support_len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, modes: &[Mode]) -> Complex64 {
        // BTreeMap lookups need an owned key type; labels are short.
        self.amplitudes
            .get(&Label(modes.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self, tolerance: f64) -> bool {
        (self.norm_sqr() - 1.0).abs() <= tolerance
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < PRUNE_THRESHOLD {
            return Err(Error::config("cannot normalize the zero vector"));
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    fn same_layout(&self, other: &SparseState) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch {
                left: render_layout(&self.layout),
                right: render_layout(&other.layout),
            });
        }
        Ok(())
    }

    /// Tensor product over disjoint subsystem sets. The result layout is the
    /// canonical merge of both layouts.
    pub fn tensor(&self, other: &SparseState) -> Result<Self> {
        if let Some(id) = self.layout.iter().find(|id| other.layout.contains(id)) {
            return Err(Error::config(format!(
                "cannot tensor states sharing subsystem {id}"
            )));
        }
        let mut layout: Vec<SubsystemId> =
            self.layout.iter().chain(&other.layout).copied().collect();
        layout.sort();
        // (from_self, index into the source label) for each merged position
        let sources: Vec<(bool, usize)> = layout
            .iter()
            .map(|id| match self.position(*id) {
                Some(p) => (true, p),
                None => (
                    false,
                    other.position(*id).expect("id from one of the layouts"),
                ),
            })
            .collect();

        let mut amplitudes = BTreeMap::new();
        for (la, aa) in &self.amplitudes {
            for (lb, ab) in &other.amplitudes {
                let modes = sources
                    .iter()
                    .map(|&(from_self, p)| if from_self { la.0[p] } else { lb.0[p] })
                    .collect();
                amplitudes.insert(Label(modes), aa * ab);
            }
        }
        prune(&mut amplitudes);
        Ok(SparseState { layout, amplitudes })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &SparseState) -> Result<Complex64> {
        self.same_layout(other)?;
        let (small, large, conj_small) = if self.support_len() <= other.support_len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (label, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(label) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &SparseState) -> Result<Self> {
        self.same_layout(other)?;
        let mut amplitudes = self.amplitudes.clone();
        for (label, a) in &other.amplitudes {
            *amplitudes
                .entry(label.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        prune(&mut amplitudes);
        Ok(SparseState {
            layout: self.layout.clone(),
            amplitudes,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut amplitudes: BTreeMap<Label, Complex64> = self
            .amplitudes
            .iter()
            .map(|(l, a)| (l.clone(), a * factor))
            .collect();
        prune(&mut amplitudes);
        SparseState {
            layout: self.layout.clone(),
            amplitudes,
        }
    }

    /// Apply `f` to every label. `f` must be a bijection on the labels of
    /// this state; colliding images are summed.
    pub(crate) fn relabel<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&mut Label),
    {
        let mut amplitudes = BTreeMap::new();
        for (label, a) in &self.amplitudes {
            let mut image = label.clone();
            f(&mut image);
            *amplitudes.entry(image).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        prune(&mut amplitudes);
        SparseState {
            layout: self.layout.clone(),
            amplitudes,
        }
    }

    /// Partial inner product `⟨onto|self⟩` over the subsystems of `onto`,
    /// without renormalization. The result lives on the remaining subsystems.
    pub fn contract(&self, onto: &SparseState) -> Result<Self> {
        let positions: Vec<usize> = onto
            .layout
            .iter()
            .map(|id| self.position(*id).ok_or(Error::MissingSubsystem(*id)))
            .collect::<Result<_>>()?;
        let rest: Vec<usize> = (0..self.layout.len())
            .filter(|p| !positions.contains(p))
            .collect();
        let layout = rest.iter().map(|&p| self.layout[p]).collect();

        let mut amplitudes = BTreeMap::new();
        let mut probe = Label(Vec::with_capacity(positions.len()));
        for (label, a) in &self.amplitudes {
            probe.0.clear();
            probe.0.extend(positions.iter().map(|&p| label.0[p]));
            if let Some(b) = onto.amplitudes.get(&probe) {
                let key = Label(rest.iter().map(|&p| label.0[p]).collect());
                *amplitudes.entry(key).or_insert(Complex64::new(0.0, 0.0)) += b.conj() * a;
            }
        }
        prune(&mut amplitudes);
        Ok(SparseState { layout, amplitudes })
    }

    /// Post-select the subsystems of `onto` in that (normalized) state.
    ///
    /// Returns the success probability and the renormalized state of the
    /// remaining subsystems. Fails with [`Error::PostSelectionImpossible`]
    /// when the probability is below [`POST_SELECTION_THRESHOLD`].
    pub fn project_onto(&self, onto: &SparseState) -> Result<(f64, SparseState)> {
        if !onto.is_normalized(1e-10) {
            return Err(Error::config(format!(
                "post-selected state must be normalized (norm² = {})",
                onto.norm_sqr()
            )));
        }
        let remainder = self.contract(onto)?;
        let probability = remainder.norm_sqr();
        if probability < POST_SELECTION_THRESHOLD {
            return Err(Error::PostSelectionImpossible {
                probability,
                stage: None,
            });
        }
        let conditional = remainder.scale(Complex64::new(1.0 / probability.sqrt(), 0.0));
        Ok((probability, conditional))
    }

    /// Post-select a single named subsystem.
    pub fn project_subsystem(
        &self,
        subsystem: SubsystemId,
        onto: &SparseState,
    ) -> Result<(f64, SparseState)> {
        if onto.layout != [subsystem] {
            return Err(Error::LayoutMismatch {
                left: render_layout(&[subsystem]),
                right: render_layout(&onto.layout),
            });
        }
        self.project_onto(onto)
    }

    /// Canonical text rendering: one `<label> <re> <im>` line per stored
    /// amplitude, 17 significant digits.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for (label, a) in &self.amplitudes {
            out.push_str(&format!(
                "{} {:.16e} {:.16e}\n",
                label.render(&self.layout),
                a.re,
                a.im
            ));
        }
        out
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// `|⟨a|b⟩|²`, the phase-insensitive comparison used for conditional states.
pub fn fidelity(a: &SparseState, b: &SparseState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
