#![allow(dead_code)]

use num_complex::Complex64;
use qshutter::config::{normalize_terms, random_amplitudes, random_multi_photon_terms, PhotonTerm};
use qshutter::model::PhotonAmplitudes;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn alphas<R: Rng>(slits: u16, rng: &mut R) -> PhotonAmplitudes {
    random_amplitudes(slits, rng)
}

/// The kinds of multi-photon input a cascade should stop.
#[derive(Clone, Copy, Debug)]
pub enum InputKind {
    /// Equal-weight symmetrization over distinct random slits.
    Symmetric,
    /// All photons at the same slit, random amplitudes.
    Correlated,
    /// Independent random single-photon states.
    Product,
    /// Random amplitude on every slit assignment.
    Entangled,
}

pub const INPUT_KINDS: [InputKind; 4] = [
    InputKind::Symmetric,
    InputKind::Correlated,
    InputKind::Product,
    InputKind::Entangled,
];

fn permutations(items: &[u16]) -> Vec<Vec<u16>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

pub fn multi_photon_terms<R: Rng>(
    kind: InputKind,
    slits: u16,
    photons: u16,
    rng: &mut R,
) -> Vec<PhotonTerm> {
    match kind {
        InputKind::Symmetric => {
            let mut all: Vec<u16> = (1..=slits).collect();
            all.shuffle(rng);
            let chosen = &all[..usize::from(photons)];
            normalize_terms(
                permutations(chosen)
                    .into_iter()
                    .map(|p| (p, Complex64::new(1.0, 0.0)))
                    .collect(),
            )
        }
        InputKind::Correlated => {
            let a = alphas(slits, rng);
            a.as_slice()
                .iter()
                .zip(1u16..)
                .map(|(a, i)| (vec![i; usize::from(photons)], *a))
                .collect()
        }
        InputKind::Product => {
            let states: Vec<PhotonAmplitudes> = (0..photons).map(|_| alphas(slits, rng)).collect();
            qshutter::config::product_terms(&states)
        }
        InputKind::Entangled => random_multi_photon_terms(slits, photons, rng),
    }
}

/// Random superposition over assignments with all photons in distinct slits.
pub fn distinct_slit_terms<R: Rng>(slits: u16, photons: u16, rng: &mut R) -> Vec<PhotonTerm> {
    let terms = qshutter::config::slit_assignments(slits, photons)
        .into_iter()
        .filter(|a| {
            let mut s = a.clone();
            s.sort();
            s.dedup();
            s.len() == a.len()
        })
        .map(|a| (a, gaussian(rng)))
        .collect();
    normalize_terms(terms)
}
