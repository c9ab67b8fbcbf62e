//! Dense brute-force reference.
//!
//! Shares only the label encoding with the sparse engine: shutter and photon
//! vectors are written out from their closed forms, the interaction is an
//! explicit 0/1 permutation matrix built entry by entry from the control
//! rule, and post-selection is a dense partial inner product.
//!
//! Index encoding is mixed radix over the canonical subsystem order, most
//! significant digit first. Digits per subsystem:
//!
//! * localized shutter over N slits: `ShutterAt(s)` → `s − 1`, radix `N + 1`
//! * two-level shutter: `op` → 0, `cl` → 1, radix 2
//! * photon over N slits and S stages: `in_i` → `i − 1`,
//!   `ref_i@s` → `s·N + i − 1`, radix `N·(S + 1)`

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::analysis::{LeakDetail, ScenarioResult};
use crate::config::{PhotonTerm, ScenarioConfig, ScenarioInput};
use crate::error::{Error, Result};
use crate::state::{Mode, SparseState, SubsystemId};

/// Largest joint dimension the oracle will allocate.
pub const DIMENSION_LIMIT: usize = 1 << 20;

/// Dense probabilities below this count as a failed post-selection.
const ZERO_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DenseSubsystem {
    Localized { slits: u16 },
    TwoLevel,
    Photon { slits: u16, stages: u16 },
}

impl DenseSubsystem {
    pub fn dimension(self) -> usize {
        match self {
            DenseSubsystem::Localized { slits } => usize::from(slits) + 1,
            DenseSubsystem::TwoLevel => 2,
            DenseSubsystem::Photon { slits, stages } => {
                usize::from(slits) * (usize::from(stages) + 1)
            }
        }
    }

    pub fn encode(self, mode: Mode) -> Option<usize> {
        match (self, mode) {
            (DenseSubsystem::Localized { slits }, Mode::ShutterAt(s))
                if s >= 1 && s <= slits + 1 =>
            {
                Some(usize::from(s) - 1)
            }
            (DenseSubsystem::TwoLevel, Mode::ShutterOpen) => Some(0),
            (DenseSubsystem::TwoLevel, Mode::ShutterClosed) => Some(1),
            (DenseSubsystem::Photon { slits, .. }, Mode::PhotonIn(i)) if i >= 1 && i <= slits => {
                Some(usize::from(i) - 1)
            }
            (DenseSubsystem::Photon { slits, stages }, Mode::PhotonRef { slit, stage })
                if slit >= 1 && slit <= slits && stage >= 1 && stage <= stages =>
            {
                Some(usize::from(stage) * usize::from(slits) + usize::from(slit) - 1)
            }
            _ => None,
        }
    }

    pub fn decode(self, digit: usize) -> Mode {
        match self {
            DenseSubsystem::Localized { .. } => Mode::ShutterAt(digit as u16 + 1),
            DenseSubsystem::TwoLevel => {
                if digit == 0 {
                    Mode::ShutterOpen
                } else {
                    Mode::ShutterClosed
                }
            }
            DenseSubsystem::Photon { slits, .. } => {
                let n = usize::from(slits);
                let slit = (digit % n) as u16 + 1;
                match digit / n {
                    0 => Mode::PhotonIn(slit),
                    stage => Mode::PhotonRef {
                        slit,
                        stage: stage as u16,
                    },
                }
            }
        }
    }
}

/// Ordered subsystems with their dense encodings.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseSpace {
    ids: Vec<SubsystemId>,
    kinds: Vec<DenseSubsystem>,
}

impl DenseSpace {
    pub fn new(parts: Vec<(SubsystemId, DenseSubsystem)>) -> Result<Self> {
        let (ids, kinds): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("dense subsystems must be in canonical order"));
        }
        let space = DenseSpace { ids, kinds };
        let dimension = space
            .kinds
            .iter()
            .try_fold(1usize, |acc, k| acc.checked_mul(k.dimension()))
            .unwrap_or(usize::MAX);
        if dimension > DIMENSION_LIMIT {
            return Err(Error::DimensionGuard {
                dimension,
                limit: DIMENSION_LIMIT,
            });
        }
        Ok(space)
    }

    pub fn ids(&self) -> &[SubsystemId] {
        &self.ids
    }

    pub fn dimension(&self) -> usize {
        self.kinds.iter().map(|k| k.dimension()).product()
    }

    pub fn encode(&self, modes: &[Mode]) -> Option<usize> {
        if modes.len() != self.kinds.len() {
            return None;
        }
        let mut index = 0;
        for (kind, mode) in self.kinds.iter().zip(modes) {
            index = index * kind.dimension() + kind.encode(*mode)?;
        }
        Some(index)
    }

    pub fn decode(&self, mut index: usize) -> Vec<Mode> {
        let mut modes = vec![Mode::ShutterOpen; self.kinds.len()];
        for (slot, kind) in self.kinds.iter().enumerate().rev() {
            let d = kind.dimension();
            modes[slot] = kind.decode(index % d);
            index /= d;
        }
        modes
    }

    fn concat(&self, other: &DenseSpace) -> Result<DenseSpace> {
        DenseSpace::new(
            self.ids
                .iter()
                .chain(&other.ids)
                .copied()
                .zip(self.kinds.iter().chain(&other.kinds).copied())
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    space: DenseSpace,
    amplitudes: Vec<Complex64>,
}

impl DenseState {
    pub fn zeros(space: DenseSpace) -> Self {
        let amplitudes = vec![Complex64::new(0.0, 0.0); space.dimension()];
        DenseState { space, amplitudes }
    }

    pub fn space(&self) -> &DenseSpace {
        &self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Place a sparse state into this dense space.
    pub fn from_sparse(space: DenseSpace, state: &SparseState) -> Result<Self> {
        if state.layout() != space.ids() {
            return Err(Error::config("sparse layout does not match dense space"));
        }
        let mut dense = DenseState::zeros(space);
        for (label, a) in state.iter() {
            let i = dense
                .space
                .encode(label.modes())
                .ok_or_else(|| Error::config("label outside the dense space"))?;
            dense.amplitudes[i] = *a;
        }
        Ok(dense)
    }

    /// Nonzero entries as a sparse state. Only the conversion prunes;
    /// probabilities are computed on the dense vector.
    pub fn to_sparse(&self) -> Result<SparseState> {
        SparseState::from_terms(
            self.space.ids.clone(),
            self.amplitudes
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, a)| (self.space.decode(i), *a)),
        )
    }

    /// Kronecker product, `self` as the more significant factor.
    pub fn kron(&self, other: &DenseState) -> Result<DenseState> {
        let space = self.space.concat(&other.space)?;
        let mut amplitudes = Vec::with_capacity(space.dimension());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(DenseState { space, amplitudes })
    }

    pub fn inner(&self, other: &DenseState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// A 0/1 permutation matrix stored by columns: column `j` has its single
/// one in row `image[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMatrix {
    image: Vec<usize>,
}

impl PermutationMatrix {
    pub fn dimension(&self) -> usize {
        self.image.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        u8::from(self.image[col] == row)
    }

    /// Explicit matrix; only sensible for small dimensions.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let d = self.dimension();
        (0..d)
            .map(|r| (0..d).map(|c| self.entry(r, c)).collect())
            .collect()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (col, a) in v.iter().enumerate() {
            out[self.image[col]] += a;
        }
        out
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.image.len()];
        self.image
            .iter()
            .all(|&r| r < seen.len() && !std::mem::replace(&mut seen[r], true))
    }
}

/// Interaction of one stage on `shutters ⊗ photons`, built by decoding every
/// basis index, applying the reflection rule and re-encoding.
pub fn interaction_matrix(
    shutters: &DenseSpace,
    photons: &DenseSpace,
    stage: u16,
) -> Result<PermutationMatrix> {
    let joint = shutters.concat(photons)?;
    let n_shutters = shutters.ids.len();
    let image = (0..joint.dimension())
        .map(|col| {
            let mut modes = joint.decode(col);
            let blocked: Vec<u16> = joint.ids[..n_shutters]
                .iter()
                .zip(&modes[..n_shutters])
                .filter_map(|(id, m)| match m {
                    Mode::ShutterAt(s) => Some(*s),
                    Mode::ShutterClosed => Some(id.index()),
                    _ => None,
                })
                .collect();
            for m in &mut modes[n_shutters..] {
                *m = match *m {
                    Mode::PhotonIn(i) if blocked.contains(&i) => Mode::PhotonRef { slit: i, stage },
                    Mode::PhotonRef { slit, stage: s } if s == stage && blocked.contains(&slit) => {
                        Mode::PhotonIn(slit)
                    }
                    other => other,
                };
            }
            joint
                .encode(&modes)
                .expect("image stays inside the joint space")
        })
        .collect();
    Ok(PermutationMatrix { image })
}

/// `(Σ_{i≤N} |i⟩ ± √(N−m)|N+1⟩)/√(2N−m)` as a dense vector.
pub fn localized_vector(id: SubsystemId, slits: u16, peel: u16, sign: f64) -> Result<DenseState> {
    let space = DenseSpace::new(vec![(id, DenseSubsystem::Localized { slits })])?;
    let n = f64::from(slits);
    let m = f64::from(peel);
    let norm = (2.0 * n - m).sqrt();
    let mut v = DenseState::zeros(space);
    for i in 0..usize::from(slits) {
        v.amplitudes[i] = Complex64::new(1.0 / norm, 0.0);
    }
    v.amplitudes[usize::from(slits)] = Complex64::new(sign * (n - m).sqrt() / norm, 0.0);
    Ok(v)
}

/// Dual shutter register: amplitude `1/√(2N−1)` on each configuration with
/// exactly one open slit, `±√(N−1)/√(2N−1)` on all-closed.
pub fn dual_vector(slits: u16, sign: f64) -> Result<DenseState> {
    let space = DenseSpace::new(
        (1..=slits)
            .map(|i| (SubsystemId::Shutter(i), DenseSubsystem::TwoLevel))
            .collect(),
    )?;
    let n = f64::from(slits);
    let norm = (2.0 * n - 1.0).sqrt();
    let mut v = DenseState::zeros(space);
    for index in 0..v.amplitudes.len() {
        // digit 0 = open, so the number of open shutters is the number of
        // zero bits among the N binary digits
        let open = usize::from(slits) - index.count_ones() as usize;
        v.amplitudes[index] = match open {
            0 => Complex64::new(sign * (n - 1.0).sqrt() / norm, 0.0),
            1 => Complex64::new(1.0 / norm, 0.0),
            _ => Complex64::new(0.0, 0.0),
        };
    }
    Ok(v)
}

fn photon_space(count: usize, slits: u16, stages: u16) -> Result<DenseSpace> {
    DenseSpace::new(
        (1..=count as u16)
            .map(|k| {
                (
                    SubsystemId::Photon(k),
                    DenseSubsystem::Photon { slits, stages },
                )
            })
            .collect(),
    )
}

pub fn photon_vector(terms: &[PhotonTerm], slits: u16, stages: u16) -> Result<DenseState> {
    let count = terms.first().map_or(0, |(s, _)| s.len());
    let mut v = DenseState::zeros(photon_space(count, slits, stages)?);
    for (assignment, a) in terms {
        let modes: Vec<Mode> = assignment.iter().map(|&s| Mode::PhotonIn(s)).collect();
        let i = v
            .space
            .encode(&modes)
            .ok_or_else(|| Error::config("photon term outside the dense space"))?;
        v.amplitudes[i] += a;
    }
    Ok(v)
}

/// Dense pre/post pair for one stage.
#[derive(Clone, Debug)]
pub struct DenseStage {
    pub pre: DenseState,
    pub post: DenseState,
}

/// Results of a dense run.
#[derive(Clone, Debug)]
pub struct DenseOutcome {
    pub success_probability: f64,
    pub per_stage_probabilities: Vec<f64>,
    pub per_stage_undisturbed: Vec<f64>,
    pub undisturbed: f64,
    pub reflected: f64,
    pub mixed: f64,
    pub conditional: DenseState,
}

fn classify(state: &DenseState) -> (f64, f64, f64) {
    let (mut undisturbed, mut reflected, mut mixed) = (0.0, 0.0, 0.0);
    for (i, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let modes = state.space.decode(i);
        let incoming = modes
            .iter()
            .filter(|m| matches!(m, Mode::PhotonIn(_)))
            .count();
        if incoming == modes.len() {
            undisturbed += p;
        } else if incoming == 0 {
            reflected += p;
        } else {
            mixed += p;
        }
    }
    (undisturbed, reflected, mixed)
}

/// `⟨post| ⊗ 1` applied to a joint vector whose leading digits are the
/// shutters.
fn partial_project(joint: &[Complex64], post: &DenseState, rest: DenseSpace) -> DenseState {
    let rest_dim = rest.dimension();
    let mut out = DenseState::zeros(rest);
    for (s, b) in post.amplitudes.iter().enumerate() {
        if b.norm_sqr() == 0.0 {
            continue;
        }
        let block = &joint[s * rest_dim..(s + 1) * rest_dim];
        for (o, a) in out.amplitudes.iter_mut().zip(block) {
            *o += b.conj() * a;
        }
    }
    out
}

/// Run stages sequentially: kron, permute, project, renormalize.
pub fn dense_run(stages: &[DenseStage], photons: DenseState) -> Result<DenseOutcome> {
    let mut state = photons;
    let mut success = 1.0;
    let mut per_stage = Vec::new();
    let mut per_stage_undisturbed = Vec::new();
    for (s, stage) in stages.iter().enumerate() {
        let joint = stage.pre.kron(&state)?;
        let perm = interaction_matrix(&stage.pre.space, &state.space, s as u16 + 1)?;
        let evolved = perm.apply(&joint.amplitudes);
        let mut rest = partial_project(&evolved, &stage.post, state.space.clone());
        let p = rest.norm_sqr();
        if p < ZERO_PROBABILITY {
            return Err(Error::PostSelectionImpossible {
                probability: p,
                stage: Some(s + 1),
            });
        }
        let scale = 1.0 / p.sqrt();
        rest.amplitudes.iter_mut().for_each(|a| *a *= scale);
        success *= p;
        per_stage.push(p);
        per_stage_undisturbed.push(classify(&rest).0);
        state = rest;
    }
    let (undisturbed, reflected, mixed) = classify(&state);
    Ok(DenseOutcome {
        success_probability: success,
        per_stage_probabilities: per_stage,
        per_stage_undisturbed,
        undisturbed,
        reflected,
        mixed,
        conditional: state,
    })
}

fn single_photon_terms(alphas: &[Complex64]) -> Vec<PhotonTerm> {
    alphas
        .iter()
        .zip(1u16..)
        .map(|(a, i)| (vec![i], *a))
        .collect()
}

fn localized_stage(id: u16, slits: u16, peel: u16) -> Result<DenseStage> {
    let sid = SubsystemId::Shutter(id);
    Ok(DenseStage {
        pre: localized_vector(sid, slits, peel, 1.0)?,
        post: localized_vector(sid, slits, peel, -1.0)?,
    })
}

/// Dense stages and incoming photon vector for a scenario.
pub fn dense_setup(input: &ScenarioInput) -> Result<(Vec<DenseStage>, DenseState)> {
    let (stages, terms, slits) = match input {
        ScenarioInput::Single { slits, alphas } => (
            vec![localized_stage(1, *slits, 1)?],
            single_photon_terms(alphas.as_slice()),
            *slits,
        ),
        ScenarioInput::Dual { slits, alphas } => (
            vec![DenseStage {
                pre: dual_vector(*slits, 1.0)?,
                post: dual_vector(*slits, -1.0)?,
            }],
            single_photon_terms(alphas.as_slice()),
            *slits,
        ),
        ScenarioInput::Correlated {
            slits,
            photons,
            alphas,
        } => (
            vec![localized_stage(1, *slits, 1)?],
            alphas
                .as_slice()
                .iter()
                .zip(1u16..)
                .map(|(a, i)| (vec![i; usize::from(*photons)], *a))
                .collect(),
            *slits,
        ),
        ScenarioInput::Leak { slits, pair } => {
            let h = Complex64::new(0.5f64.sqrt(), 0.0);
            (
                vec![localized_stage(1, *slits, 1)?],
                vec![(vec![pair.0, pair.1], h), (vec![pair.1, pair.0], h)],
                *slits,
            )
        }
        ScenarioInput::Cascade {
            slits,
            photons,
            terms,
        } => (
            (1..=*photons)
                .map(|s| localized_stage(s, *slits, photons - s + 1))
                .collect::<Result<_>>()?,
            terms.clone(),
            *slits,
        ),
    };
    let photon = photon_vector(&terms, slits, stages.len() as u16)?;
    Ok((stages, photon))
}

/// Recompute a scenario with the dense oracle.
pub fn dense_pipeline(config: &ScenarioConfig) -> Result<ScenarioResult> {
    dense_result(&config.input()?)
}

pub fn dense_result(input: &ScenarioInput) -> Result<ScenarioResult> {
    let (stages, photons) = dense_setup(input)?;
    let outcome = dense_run(&stages, photons.clone())?;

    let leak = match input {
        ScenarioInput::Leak { .. } => {
            let stage = &stages[0];
            let joint = stage.pre.kron(&photons)?;
            let evolved =
                interaction_matrix(&stage.pre.space, &photons.space, 1)?.apply(&joint.amplitudes);
            // ⟨pair|_photons applied to the evolved state: the shutter
            // residual correlated with both photons passing undisturbed
            let pd = photons.space.dimension();
            let residual: Vec<Complex64> = evolved
                .chunks(pd)
                .map(|block| {
                    photons
                        .amplitudes
                        .iter()
                        .zip(block)
                        .map(|(p, a)| p.conj() * a)
                        .sum()
                })
                .collect();
            let norm = residual.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            let overlap: Complex64 = stage
                .post
                .amplitudes
                .iter()
                .zip(&residual)
                .map(|(b, a)| b.conj() * a / norm)
                .sum();
            Some(LeakDetail {
                residual_overlap: overlap.re,
                conditional_leak_probability: outcome.undisturbed,
                joint_leak_probability: outcome.undisturbed * outcome.success_probability,
            })
        }
        _ => None,
    };

    let photon_count = match input {
        ScenarioInput::Single { .. } | ScenarioInput::Dual { .. } => 1,
        ScenarioInput::Leak { .. } => 2,
        ScenarioInput::Correlated { photons, .. } | ScenarioInput::Cascade { photons, .. } => {
            *photons
        }
    };
    let slits = match input {
        ScenarioInput::Single { slits, .. }
        | ScenarioInput::Dual { slits, .. }
        | ScenarioInput::Correlated { slits, .. }
        | ScenarioInput::Leak { slits, .. }
        | ScenarioInput::Cascade { slits, .. } => *slits,
    };
    Ok(ScenarioResult {
        scenario: input.kind(),
        slits,
        photons: photon_count,
        success_probability: outcome.success_probability,
        transmitted_probability: outcome.undisturbed + outcome.mixed,
        reflected_probability: outcome.reflected,
        mixed_probability: outcome.mixed,
        undisturbed_probability: outcome.undisturbed,
        per_stage_probabilities: outcome.per_stage_probabilities,
        per_stage_undisturbed: outcome.per_stage_undisturbed,
        conditional_photon_state: outcome.conditional.to_sparse()?,
        leak,
        oracle_checked: true,
    })
}

/// Largest absolute difference between two results over every reported
/// probability, plus the conditional-state infidelity.
pub fn max_deviation(a: &ScenarioResult, b: &ScenarioResult) -> Result<f64> {
    let mut diffs = vec![
        a.success_probability - b.success_probability,
        a.transmitted_probability - b.transmitted_probability,
        a.reflected_probability - b.reflected_probability,
        a.mixed_probability - b.mixed_probability,
        a.undisturbed_probability - b.undisturbed_probability,
    ];
    if a.per_stage_probabilities.len() != b.per_stage_probabilities.len() {
        return Err(Error::config("results have different stage counts"));
    }
    diffs.extend(
        a.per_stage_probabilities
            .iter()
            .zip(&b.per_stage_probabilities)
            .map(|(x, y)| x - y),
    );
    diffs.extend(
        a.per_stage_undisturbed
            .iter()
            .zip(&b.per_stage_undisturbed)
            .map(|(x, y)| x - y),
    );
    match (&a.leak, &b.leak) {
        (Some(x), Some(y)) => diffs.extend([
            x.residual_overlap - y.residual_overlap,
            x.conditional_leak_probability - y.conditional_leak_probability,
            x.joint_leak_probability - y.joint_leak_probability,
        ]),
        (None, None) => {}
        _ => return Err(Error::config("only one result carries leak details")),
    }
    diffs.push(
        1.0 - a
            .conditional_photon_state
            .inner(&b.conditional_photon_state)?
            .norm_sqr(),
    );
    Ok(diffs.into_iter().map(f64::abs).fold(0.0, f64::max))
}

/// One row of the branch table.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchRow {
    /// Incoming slit of each photon.
    pub slits: Vec<u16>,
    /// Per photon: reflected (`R`) or passed (`P`).
    pub outcome: String,
    /// Shutter slots producing this outcome.
    pub shutter_slots: Vec<u16>,
    /// `Σ |⟨s|Ψ₁⟩|²` over those slots.
    pub branch_weight: f64,
    /// `Σ ⟨Ψ₂|s⟩⟨s|Ψ₁⟩` over those slots.
    pub overlap: f64,
    /// `overlap / √branch_weight`: the post-selection overlap of the
    /// normalized shutter state on this branch.
    pub normalized_overlap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BranchTable {
    pub slits: u16,
    pub photons: u16,
    pub rows: Vec<BranchRow>,
}

impl BranchTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "slits\toutcome\tshutter_slots\tbranch_weight\toverlap\tnormalized_overlap\n",
        );
        let join = |v: &[u16]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.16e}\t{:.16e}\t{:.16e}",
                join(&r.slits),
                r.outcome,
                join(&r.shutter_slots),
                r.branch_weight,
                r.overlap,
                r.normalized_overlap
            );
        }
        out
    }

    pub fn find(&self, slits: &[u16], outcome: &str) -> Option<&BranchRow> {
        self.rows
            .iter()
            .find(|r| r.slits == slits && r.outcome == outcome)
    }
}

/// Expand the single-shutter interaction branch by branch: for every slit
/// assignment of `photons` photons, group the shutter slots by which photons
/// they reflect and report each group's overlap with the post-selected
/// state.
pub fn enumerate_branch_table(slits: u16, photons: u16) -> Result<BranchTable> {
    if slits < 2 || photons == 0 {
        return Err(Error::config("branch table needs N >= 2 and K >= 1"));
    }
    let pre = localized_vector(SubsystemId::Shutter(1), slits, 1, 1.0)?;
    let post = localized_vector(SubsystemId::Shutter(1), slits, 1, -1.0)?;
    let mut rows = Vec::new();
    for assignment in crate::config::slit_assignments(slits, photons) {
        let mut groups: BTreeMap<Vec<bool>, Vec<u16>> = BTreeMap::new();
        for slot in 1..=slits + 1 {
            let pattern = assignment.iter().map(|&s| s == slot).collect();
            groups.entry(pattern).or_default().push(slot);
        }
        for (pattern, slots) in groups {
            let idx = |s: u16| usize::from(s) - 1;
            let weight: f64 = slots
                .iter()
                .map(|&s| pre.amplitudes[idx(s)].norm_sqr())
                .sum();
            let overlap: Complex64 = slots
                .iter()
                .map(|&s| post.amplitudes[idx(s)].conj() * pre.amplitudes[idx(s)])
                .sum();
            let normalized_overlap = if weight > 0.0 {
                overlap.re / weight.sqrt()
            } else {
                0.0
            };
            rows.push(BranchRow {
                slits: assignment.clone(),
                outcome: pattern.iter().map(|&r| if r { 'R' } else { 'P' }).collect(),
                shutter_slots: slots,
                branch_weight: weight,
                overlap: overlap.re,
                normalized_overlap,
            });
        }
    }
    Ok(BranchTable {
        slits,
        photons,
        rows,
    })
}
