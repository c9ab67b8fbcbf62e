//! State builders for shutters and photons, and the controlled-reflection
//! interaction between them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Mode, SparseState, SubsystemId};

/// Tolerance on `Σ|α_i|²` for photon amplitudes given without the
/// normalize flag.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    /// Pre-selection, `+√(N−m)` on the parking slot.
    Pre,
    /// Post-selection, `−√(N−m)` on the parking slot.
    Post,
}

impl Selection {
    fn sign(self) -> f64 {
        match self {
            Selection::Pre => 1.0,
            Selection::Post => -1.0,
        }
    }
}

/// One member of the shutter state family
/// `(Σ_{i≤N} |i⟩ ± √(N−m) |N+1⟩) / √(2N−m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShutterSpec {
    slits: u16,
    peel: u16,
    selection: Selection,
}

impl ShutterSpec {
    pub fn new(slits: u16, peel: u16, selection: Selection) -> Result<Self> {
        if slits < 2 {
            return Err(Error::config(format!("N must be at least 2 (got {slits})")));
        }
        if peel < 1 || peel > slits {
            return Err(Error::config(format!(
                "peel index m must satisfy 1 <= m <= N (got m={peel}, N={slits})"
            )));
        }
        Ok(ShutterSpec {
            slits,
            peel,
            selection,
        })
    }

    pub fn slits(&self) -> u16 {
        self.slits
    }

    pub fn peel(&self) -> u16 {
        self.peel
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn with_selection(self, selection: Selection) -> Self {
        ShutterSpec { selection, ..self }
    }

    /// Slot index of the location away from every slit.
    pub fn parking_slot(&self) -> u16 {
        self.slits + 1
    }
}

/// Build the shutter state for `spec` on the given shutter subsystem.
pub fn build_shutter_state(spec: ShutterSpec, shutter: SubsystemId) -> Result<SparseState> {
    if shutter.is_photon() {
        return Err(Error::config(format!(
            "{shutter} is not a shutter subsystem"
        )));
    }
    let n = f64::from(spec.slits);
    let m = f64::from(spec.peel);
    let norm = (2.0 * n - m).sqrt();
    let slit_amp = Complex64::new(1.0 / norm, 0.0);
    let park_amp = Complex64::new(spec.selection.sign() * (n - m).sqrt() / norm, 0.0);

    let mut terms: Vec<(Vec<Mode>, Complex64)> = (1..=spec.slits)
        .map(|i| (vec![Mode::ShutterAt(i)], slit_amp))
        .collect();
    // m = N leaves the parking slot empty; from_terms prunes the exact zero.
    terms.push((vec![Mode::ShutterAt(spec.parking_slot())], park_amp));
    SparseState::from_terms(vec![shutter], terms)
}

/// Single-photon slit amplitudes `α_1..α_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonAmplitudes(Vec<Complex64>);

impl PhotonAmplitudes {
    /// Accept amplitudes whose squared norm is within
    /// [`INPUT_NORM_TOLERANCE`] of one.
    pub fn new(alphas: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = alphas.iter().map(|a| a.norm_sqr()).sum();
        if alphas.is_empty() {
            return Err(Error::config("photon amplitudes must not be empty"));
        }
        if (norm_sqr - 1.0).abs() > INPUT_NORM_TOLERANCE {
            return Err(Error::config(format!(
                "photon amplitudes have squared norm {norm_sqr}, expected 1 \
                 (pass --normalize to rescale)"
            )));
        }
        Ok(PhotonAmplitudes(alphas))
    }

    /// Rescale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(alphas: Vec<Complex64>) -> Result<Self> {
        let norm = alphas.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if alphas.is_empty() || norm == 0.0 {
            return Err(Error::config("photon amplitudes must not all be zero"));
        }
        Ok(PhotonAmplitudes(
            alphas.into_iter().map(|a| a / norm).collect(),
        ))
    }

    pub fn uniform(slits: u16) -> Self {
        let a = Complex64::new(1.0 / f64::from(slits).sqrt(), 0.0);
        PhotonAmplitudes(vec![a; usize::from(slits)])
    }

    pub fn slits(&self) -> u16 {
        self.0.len() as u16
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

/// `Σ α_i |in_i⟩` on one photon subsystem.
pub fn build_photon_state(alphas: &PhotonAmplitudes, photon: u16) -> Result<SparseState> {
    SparseState::from_terms(
        vec![SubsystemId::Photon(photon)],
        alphas
            .as_slice()
            .iter()
            .zip(1u16..)
            .map(|(a, i)| (vec![Mode::PhotonIn(i)], *a)),
    )
}

/// `Σ α_i Π_k |in_i⟩_k`: `photons` photons always sharing a slit.
pub fn build_correlated_photons(alphas: &PhotonAmplitudes, photons: u16) -> Result<SparseState> {
    if photons == 0 {
        return Err(Error::config("photon count K must be at least 1"));
    }
    let layout = (1..=photons).map(SubsystemId::Photon).collect();
    SparseState::from_terms(
        layout,
        alphas
            .as_slice()
            .iter()
            .zip(1u16..)
            .map(|(a, i)| (vec![Mode::PhotonIn(i); usize::from(photons)], *a)),
    )
}

/// `(|in_j⟩₁|in_k⟩₂ + |in_k⟩₁|in_j⟩₂)/√2` for distinct slits `j`, `k`.
pub fn build_symmetric_pair(j: u16, k: u16, slits: u16) -> Result<SparseState> {
    if j == k {
        return Err(Error::config(
            "slit pair must be distinct; use correlated photons for a shared slit",
        ));
    }
    for s in [j, k] {
        if s < 1 || s > slits {
            return Err(Error::config(format!("slit {s} outside 1..={slits}")));
        }
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    SparseState::from_terms(
        vec![SubsystemId::Photon(1), SubsystemId::Photon(2)],
        [
            (vec![Mode::PhotonIn(j), Mode::PhotonIn(k)], h),
            (vec![Mode::PhotonIn(k), Mode::PhotonIn(j)], h),
        ],
    )
}

/// Product of independent single-photon states, photon `k` in `states[k-1]`.
pub fn build_product_photons(states: &[PhotonAmplitudes]) -> Result<SparseState> {
    let mut joint = SparseState::scalar(Complex64::new(1.0, 0.0));
    for (alphas, k) in states.iter().zip(1u16..) {
        joint = joint.tensor(&build_photon_state(alphas, k)?)?;
    }
    Ok(joint)
}

/// Joint state of `N` two-level shutters, shutter `i` guarding slit `i`:
/// `(Σ_i |op⟩_i Π_{j≠i} |cl⟩_j ± √(N−1) Π_j |cl⟩_j) / √(2N−1)`.
pub fn build_dual_state(slits: u16, selection: Selection) -> Result<SparseState> {
    if slits < 2 {
        return Err(Error::config(format!("N must be at least 2 (got {slits})")));
    }
    let n = f64::from(slits);
    let norm = (2.0 * n - 1.0).sqrt();
    let layout: Vec<SubsystemId> = (1..=slits).map(SubsystemId::Shutter).collect();
    let one_open = (1..=slits).map(|open| {
        let modes = (1..=slits)
            .map(|j| {
                if j == open {
                    Mode::ShutterOpen
                } else {
                    Mode::ShutterClosed
                }
            })
            .collect();
        (modes, Complex64::new(1.0 / norm, 0.0))
    });
    let all_closed = (
        vec![Mode::ShutterClosed; usize::from(slits)],
        Complex64::new(selection.sign() * (n - 1.0).sqrt() / norm, 0.0),
    );
    SparseState::from_terms(layout, one_open.chain(std::iter::once(all_closed)))
}

/// Slit closed by a shutter subsystem in the given mode, if any.
fn closed_slit(shutter: SubsystemId, mode: Mode) -> Option<u16> {
    match mode {
        Mode::ShutterAt(slot) => Some(slot),
        Mode::ShutterClosed => Some(shutter.index()),
        _ => None,
    }
}

/// Apply the controlled reflection of one screen stage.
///
/// For every composite label, the set of slits closed by the listed
/// shutters is collected (a localized shutter closes the slit it sits in,
/// a two-level shutter in `cl` closes its own slit); every listed photon in
/// `in_i` with slit `i` closed becomes `ref_i@stage`, and vice versa. Photons
/// reflected at other stages are untouched. The map permutes basis labels,
/// so the norm is preserved exactly.
///
/// Fails if any listed photon already carries a reflection from `stage`.
pub fn apply_reflection_interaction(
    state: &SparseState,
    shutters: &[SubsystemId],
    photons: &[SubsystemId],
    stage: u16,
) -> Result<SparseState> {
    let photon_positions = positions(state, photons)?;
    let reused = state.iter().any(|(label, _)| {
        photon_positions
            .iter()
            .any(|&p| matches!(label.modes()[p], Mode::PhotonRef { stage: s, .. } if s == stage))
    });
    if reused {
        return Err(Error::config(format!(
            "stage {stage} has already acted on these photons"
        )));
    }
    apply_reflection_unchecked(state, shutters, photons, stage)
}

/// [`apply_reflection_interaction`] without the stage-reuse guard. Applying
/// it twice with the same stage is the identity.
pub fn apply_reflection_unchecked(
    state: &SparseState,
    shutters: &[SubsystemId],
    photons: &[SubsystemId],
    stage: u16,
) -> Result<SparseState> {
    if stage == 0 {
        return Err(Error::config("stage indices start at 1"));
    }
    if let Some(id) = shutters.iter().find(|id| id.is_photon()) {
        return Err(Error::config(format!("{id} is not a shutter subsystem")));
    }
    if let Some(id) = photons.iter().find(|id| !id.is_photon()) {
        return Err(Error::config(format!("{id} is not a photon subsystem")));
    }
    let shutter_positions = positions(state, shutters)?;
    let photon_positions = positions(state, photons)?;

    let mut closed: Vec<u16> = Vec::with_capacity(shutters.len());
    Ok(state.relabel(|label| {
        closed.clear();
        closed.extend(
            shutters
                .iter()
                .zip(&shutter_positions)
                .filter_map(|(id, &p)| closed_slit(*id, label.modes()[p])),
        );
        let modes = label.modes_mut();
        for &p in &photon_positions {
            modes[p] = match modes[p] {
                Mode::PhotonIn(slit) if closed.contains(&slit) => Mode::PhotonRef { slit, stage },
                Mode::PhotonRef { slit, stage: s } if s == stage && closed.contains(&slit) => {
                    Mode::PhotonIn(slit)
                }
                other => other,
            };
        }
    }))
}

fn positions(state: &SparseState, ids: &[SubsystemId]) -> Result<Vec<usize>> {
    ids.iter()
        .map(|id| state.position(*id).ok_or(Error::MissingSubsystem(*id)))
        .collect()
}

/// Shutters placed one behind another; the first stage the photons meet
/// carries the largest peel index and the last stage is always `m = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadeLayout {
    slits: u16,
    photons: u16,
    stages: Vec<ShutterSpec>,
}

impl CascadeLayout {
    pub fn slits(&self) -> u16 {
        self.slits
    }

    pub fn photons(&self) -> u16 {
        self.photons
    }

    /// Pre-selection specs in photon-encounter order; stage `s` (1-based)
    /// has `m = K − s + 1`.
    pub fn stages(&self) -> &[ShutterSpec] {
        &self.stages
    }
}

pub fn build_cascade(slits: u16, photons: u16) -> Result<CascadeLayout> {
    if photons == 0 {
        return Err(Error::config("photon count K must be at least 1"));
    }
    if photons > slits {
        return Err(Error::config(format!(
            "K must not exceed N (got K={photons}, N={slits})"
        )));
    }
    let stages = (1..=photons)
        .rev()
        .map(|m| ShutterSpec::new(slits, m, Selection::Pre))
        .collect::<Result<_>>()?;
    Ok(CascadeLayout {
        slits,
        photons,
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const S1: SubsystemId = SubsystemId::Shutter(1);
    const P1: SubsystemId = SubsystemId::Photon(1);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-15
    }

    #[test]
    fn shutter_state_n2_pre() {
        let s = build_shutter_state(ShutterSpec::new(2, 1, Selection::Pre).unwrap(), S1).unwrap();
        let a = c(1.0 / 3f64.sqrt(), 0.0);
        for slot in 1..=3 {
            assert!(close(s.amplitude(&[Mode::ShutterAt(slot)]), a));
        }
        assert_eq!(s.support_len(), 3);
    }

    #[test]
    fn shutter_state_n3_post() {
        let s = build_shutter_state(ShutterSpec::new(3, 1, Selection::Post).unwrap(), S1).unwrap();
        let r5 = 5f64.sqrt();
        for slot in 1..=3 {
            assert!(close(
                s.amplitude(&[Mode::ShutterAt(slot)]),
                c(1.0 / r5, 0.0)
            ));
        }
        assert!(close(
            s.amplitude(&[Mode::ShutterAt(4)]),
            c(-(2f64.sqrt()) / r5, 0.0)
        ));
    }

    #[test]
    fn degenerate_peel_has_no_parking_key() {
        let s = build_shutter_state(ShutterSpec::new(2, 2, Selection::Pre).unwrap(), S1).unwrap();
        assert_eq!(s.support_len(), 2);
        assert!(s.iter().all(|(l, _)| l.modes()[0] != Mode::ShutterAt(3)));
        assert!(close(
            s.amplitude(&[Mode::ShutterAt(1)]),
            c(std::f64::consts::FRAC_1_SQRT_2, 0.0)
        ));
    }

    #[test]
    fn shutter_spec_rejects_bad_parameters() {
        assert!(ShutterSpec::new(1, 1, Selection::Pre).is_err());
        assert!(ShutterSpec::new(3, 4, Selection::Pre).is_err());
        assert!(ShutterSpec::new(3, 0, Selection::Pre).is_err());
    }

    #[test]
    fn shutter_norms() {
        for n in 2..=10 {
            for m in 1..=n {
                for sel in [Selection::Pre, Selection::Post] {
                    let s = build_shutter_state(ShutterSpec::new(n, m, sel).unwrap(), S1).unwrap();
                    assert!((s.norm_sqr() - 1.0).abs() < 1e-15, "N={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn photon_states() {
        let one = PhotonAmplitudes::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = build_photon_state(&one, 1).unwrap();
        assert_eq!(
            s,
            SparseState::basis(vec![P1], vec![Mode::PhotonIn(1)]).unwrap()
        );

        let u = build_photon_state(&PhotonAmplitudes::uniform(5), 1).unwrap();
        assert!((u.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(u.support_len(), 5);

        let a = PhotonAmplitudes::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        let s = build_photon_state(&a, 1).unwrap();
        assert_eq!(s.amplitude(&[Mode::PhotonIn(2)]), c(0.0, 0.8));
    }

    #[test]
    fn photon_amplitudes_validation() {
        assert!(PhotonAmplitudes::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(PhotonAmplitudes::new(vec![]).is_err());
        let n = PhotonAmplitudes::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((n.as_slice()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(PhotonAmplitudes::normalized(vec![c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn correlated_photons() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = PhotonAmplitudes::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let single = build_correlated_photons(&a, 1).unwrap();
        assert_eq!(single, build_photon_state(&a, 1).unwrap());

        let pair = build_correlated_photons(&a, 2).unwrap();
        assert_eq!(pair.support_len(), 2);
        assert!(close(
            pair.amplitude(&[Mode::PhotonIn(2), Mode::PhotonIn(2)]),
            c(h, 0.0)
        ));
        assert_eq!(
            pair.amplitude(&[Mode::PhotonIn(1), Mode::PhotonIn(2)]),
            c(0.0, 0.0)
        );

        let e1 = PhotonAmplitudes::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = build_correlated_photons(&e1, 2).unwrap();
        assert_eq!(s.support_len(), 1);
        assert!(build_correlated_photons(&e1, 0).is_err());
    }

    #[test]
    fn symmetric_pair() {
        let p = build_symmetric_pair(1, 2, 3).unwrap();
        assert_eq!(p, build_symmetric_pair(2, 1, 3).unwrap());
        let prod = SparseState::basis(
            p.layout().to_vec(),
            vec![Mode::PhotonIn(1), Mode::PhotonIn(2)],
        )
        .unwrap();
        assert!((p.inner(&prod).unwrap().re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(build_symmetric_pair(2, 2, 3).is_err());
        assert!(build_symmetric_pair(1, 4, 3).is_err());
    }

    #[test]
    fn dual_state_weights() {
        let d = build_dual_state(2, Selection::Pre).unwrap();
        let r3 = c(1.0 / 3f64.sqrt(), 0.0);
        use Mode::{ShutterClosed as Cl, ShutterOpen as Op};
        assert!(close(d.amplitude(&[Op, Cl]), r3));
        assert!(close(d.amplitude(&[Cl, Op]), r3));
        assert!(close(d.amplitude(&[Cl, Cl]), r3));
        assert_eq!(d.support_len(), 3);

        for n in 2..=8u16 {
            let d = build_dual_state(n, Selection::Pre).unwrap();
            let all_closed = d.amplitude(&vec![Cl; n as usize]).norm_sqr();
            let nf = f64::from(n);
            assert!((all_closed - (nf - 1.0) / (2.0 * nf - 1.0)).abs() < 1e-15);
            assert!((1.0 - all_closed - nf / (2.0 * nf - 1.0)).abs() < 1e-15);
        }
        let d3 = build_dual_state(3, Selection::Pre).unwrap();
        assert!((d3.amplitude(&[Cl, Cl, Cl]).norm_sqr() - 0.4).abs() < 1e-15);
        assert!(build_dual_state(1, Selection::Pre).is_err());
    }

    fn joint(shutter_slot: u16, photon: Mode) -> SparseState {
        SparseState::basis(vec![S1, P1], vec![Mode::ShutterAt(shutter_slot), photon]).unwrap()
    }

    #[test]
    fn reflection_on_matching_slit() {
        let out =
            apply_reflection_interaction(&joint(1, Mode::PhotonIn(1)), &[S1], &[P1], 1).unwrap();
        assert_eq!(out, joint(1, Mode::PhotonRef { slit: 1, stage: 1 }));
    }

    #[test]
    fn parked_shutter_passes_everything() {
        for j in 1..=3 {
            let s = joint(4, Mode::PhotonIn(j));
            assert_eq!(
                apply_reflection_interaction(&s, &[S1], &[P1], 1).unwrap(),
                s
            );
        }
        let s = joint(2, Mode::PhotonIn(1));
        assert_eq!(
            apply_reflection_interaction(&s, &[S1], &[P1], 1).unwrap(),
            s
        );
    }

    #[test]
    fn stage_reuse_is_rejected_and_unchecked_is_involution() {
        let s = joint(1, Mode::PhotonIn(1));
        let once = apply_reflection_interaction(&s, &[S1], &[P1], 1).unwrap();
        assert!(matches!(
            apply_reflection_interaction(&once, &[S1], &[P1], 1),
            Err(Error::Config(_))
        ));
        assert_eq!(
            apply_reflection_unchecked(&once, &[S1], &[P1], 1).unwrap(),
            s
        );
        // a later stage leaves earlier reflections alone
        assert_eq!(
            apply_reflection_interaction(&once, &[S1], &[P1], 2).unwrap(),
            once
        );
    }

    #[test]
    fn dual_closed_shutter_reflects_its_slit() {
        let layout = vec![SubsystemId::Shutter(1), SubsystemId::Shutter(2), P1];
        let s = SparseState::basis(
            layout.clone(),
            vec![Mode::ShutterOpen, Mode::ShutterClosed, Mode::PhotonIn(2)],
        )
        .unwrap();
        let shutters = [SubsystemId::Shutter(1), SubsystemId::Shutter(2)];
        let out = apply_reflection_interaction(&s, &shutters, &[P1], 1).unwrap();
        assert_eq!(
            out.iter().next().unwrap().0.modes()[2],
            Mode::PhotonRef { slit: 2, stage: 1 }
        );
        let s = SparseState::basis(
            layout,
            vec![Mode::ShutterOpen, Mode::ShutterClosed, Mode::PhotonIn(1)],
        )
        .unwrap();
        assert_eq!(
            apply_reflection_interaction(&s, &shutters, &[P1], 1).unwrap(),
            s
        );
    }

    #[test]
    fn interaction_rejects_wrong_subsystems() {
        let s = joint(1, Mode::PhotonIn(1));
        assert!(apply_reflection_interaction(&s, &[P1], &[P1], 1).is_err());
        assert!(apply_reflection_interaction(&s, &[S1], &[S1], 1).is_err());
        assert!(matches!(
            apply_reflection_interaction(&s, &[S1], &[SubsystemId::Photon(2)], 1),
            Err(Error::MissingSubsystem(_))
        ));
        assert!(apply_reflection_interaction(&s, &[S1], &[P1], 0).is_err());
    }

    #[test]
    fn post_state_orthogonal_to_pass_branches() {
        for n in 2..=8u16 {
            let post =
                build_shutter_state(ShutterSpec::new(n, 1, Selection::Post).unwrap(), S1).unwrap();
            let norm = (2.0 * f64::from(n) - 1.0).sqrt();
            for j in 1..=n {
                let mut terms: Vec<(Vec<Mode>, Complex64)> = (1..=n)
                    .filter(|&i| i != j)
                    .map(|i| (vec![Mode::ShutterAt(i)], c(1.0 / norm, 0.0)))
                    .collect();
                terms.push((
                    vec![Mode::ShutterAt(n + 1)],
                    c((f64::from(n) - 1.0).sqrt() / norm, 0.0),
                ));
                let branch = SparseState::from_terms(vec![S1], terms).unwrap();
                assert!(post.inner(&branch).unwrap().norm() < 1e-12, "N={n} j={j}");
            }
        }
    }

    #[test]
    fn dual_post_orthogonal_to_reflect_branches() {
        // Shutter configurations that reflect a photon at slit j: every
        // one-open configuration with the opening elsewhere, plus all-closed.
        for n in 2..=8u16 {
            let post = build_dual_state(n, Selection::Post).unwrap();
            let pre = build_dual_state(n, Selection::Pre).unwrap();
            for j in 1..=n {
                let terms = pre
                    .iter()
                    .filter(|(l, _)| l.modes()[usize::from(j - 1)] == Mode::ShutterClosed)
                    .map(|(l, a)| (l.modes().to_vec(), *a));
                let branch = SparseState::from_terms(pre.layout().to_vec(), terms).unwrap();
                assert!(post.inner(&branch).unwrap().norm() < 1e-12, "N={n} j={j}");
            }
        }
    }

    #[test]
    fn cascade_layouts() {
        let peels = |n, k| -> Vec<u16> {
            build_cascade(n, k)
                .unwrap()
                .stages()
                .iter()
                .map(|s| s.peel())
                .collect()
        };
        assert_eq!(peels(4, 2), vec![2, 1]);
        assert_eq!(peels(4, 3), vec![3, 2, 1]);
        assert_eq!(peels(2, 1), vec![1]);
        let err = build_cascade(3, 4).unwrap_err();
        assert!(err.to_string().contains("K must not exceed N"));
        assert!(build_cascade(3, 0).is_err());
    }
}
