//! Scenario configuration and its resolution into concrete inputs.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhotonAmplitudes;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Single,
    Dual,
    Correlated,
    Leak,
    Cascade,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Single => "single",
            ScenarioKind::Dual => "dual",
            ScenarioKind::Correlated => "correlated",
            ScenarioKind::Leak => "leak",
            ScenarioKind::Cascade => "cascade",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(ScenarioKind::Single),
            "dual" => Ok(ScenarioKind::Dual),
            "correlated" => Ok(ScenarioKind::Correlated),
            "leak" => Ok(ScenarioKind::Leak),
            "cascade" => Ok(ScenarioKind::Cascade),
            other => Err(Error::config(format!(
                "unknown scenario '{other}' (expected single, dual, correlated, leak or cascade)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

/// Photon amplitudes: drawn from the seeded generator, or given explicitly
/// as `[re, im]` pairs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AlphaRepr", into = "AlphaRepr")]
pub enum AlphaSpec {
    #[default]
    Random,
    Explicit(Vec<[f64; 2]>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum AlphaRepr {
    Word(String),
    Pairs(Vec<[f64; 2]>),
}

impl TryFrom<AlphaRepr> for AlphaSpec {
    type Error = String;

    fn try_from(repr: AlphaRepr) -> std::result::Result<Self, String> {
        match repr {
            AlphaRepr::Word(w) if w == "random" => Ok(AlphaSpec::Random),
            AlphaRepr::Word(w) => Err(format!(
                "alphas must be \"random\" or [re, im] pairs, got \"{w}\""
            )),
            AlphaRepr::Pairs(p) => Ok(AlphaSpec::Explicit(p)),
        }
    }
}

impl From<AlphaSpec> for AlphaRepr {
    fn from(spec: AlphaSpec) -> Self {
        match spec {
            AlphaSpec::Random => AlphaRepr::Word("random".into()),
            AlphaSpec::Explicit(p) => AlphaRepr::Pairs(p),
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = Error;

    /// `random`, or `re,im;re,im;...`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "random" {
            return Ok(AlphaSpec::Random);
        }
        let parse = |x: &str| {
            x.trim().parse::<f64>().map_err(|_| {
                Error::config(format!("invalid amplitude component '{x}' in --alphas"))
            })
        };
        s.split(';')
            .map(|pair| {
                let mut parts = pair.split(',');
                match (parts.next(), parts.next(), parts.next()) {
                    (Some(re), Some(im), None) => Ok([parse(re)?, parse(im)?]),
                    (Some(re), None, None) => Ok([parse(re)?, 0.0]),
                    _ => Err(Error::config(format!(
                        "amplitude '{pair}' must be written as re,im"
                    ))),
                }
            })
            .collect::<Result<_>>()
            .map(AlphaSpec::Explicit)
    }
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// Everything needed to run one scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(rename = "N", alias = "slits")]
    pub slits: u16,
    /// Photon count; defaults depend on the scenario (see [`Self::photon_count`]).
    #[serde(rename = "K", alias = "photons", default)]
    pub photons: Option<u16>,
    #[serde(default)]
    pub alphas: AlphaSpec,
    /// Slits used by the two-photon leak scenario; defaults to `(1, 2)`.
    #[serde(default)]
    pub slit_pair: Option<[u16; 2]>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub normalize_input: bool,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub output_format: OutputFormat,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind, slits: u16) -> Self {
        ScenarioConfig {
            scenario,
            slits,
            photons: None,
            alphas: AlphaSpec::Random,
            slit_pair: None,
            seed: 0,
            normalize_input: false,
            tolerance: DEFAULT_TOLERANCE,
            oracle: false,
            output_format: OutputFormat::Json,
        }
    }

    /// Effective photon count K.
    pub fn photon_count(&self) -> u16 {
        match self.scenario {
            ScenarioKind::Single | ScenarioKind::Dual => 1,
            ScenarioKind::Leak => 2,
            ScenarioKind::Correlated | ScenarioKind::Cascade => self.photons.unwrap_or(1),
        }
    }

    pub fn slit_pair(&self) -> (u16, u16) {
        self.slit_pair.map_or((1, 2), |[j, k]| (j, k))
    }

    /// Check scenario-specific constraints.
    pub fn validate(&self) -> Result<()> {
        let n = self.slits;
        if n < 2 {
            return Err(Error::config(format!("N must be at least 2 (got N={n})")));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::config(format!(
                "tolerance must be a positive number (got {})",
                self.tolerance
            )));
        }
        let k = self.photon_count();
        match (self.scenario, self.photons) {
            (ScenarioKind::Single | ScenarioKind::Dual, Some(p)) if p != 1 => {
                return Err(Error::config(format!(
                    "scenario {} uses exactly one photon (got K={p})",
                    self.scenario
                )))
            }
            (ScenarioKind::Leak, Some(p)) if p != 2 => {
                return Err(Error::config(format!(
                    "scenario leak uses exactly two photons (got K={p})"
                )))
            }
            _ => {}
        }
        if k == 0 {
            return Err(Error::config("K must be at least 1"));
        }
        if self.scenario == ScenarioKind::Cascade && k > n {
            return Err(Error::config(format!(
                "K must not exceed N (got K={k}, N={n})"
            )));
        }
        if self.scenario == ScenarioKind::Leak {
            let (j, kk) = self.slit_pair();
            if j == kk {
                return Err(Error::config(format!(
                    "slit pair must be distinct (got {j},{kk})"
                )));
            }
            if j < 1 || kk < 1 || j > n || kk > n {
                return Err(Error::config(format!(
                    "slit pair {j},{kk} must lie within 1..={n}"
                )));
            }
        }
        if let AlphaSpec::Explicit(pairs) = &self.alphas {
            if pairs.len() != usize::from(n) {
                return Err(Error::config(format!(
                    "expected {n} amplitudes in alphas, got {}",
                    pairs.len()
                )));
            }
        }
        Ok(())
    }

    fn explicit_amplitudes(&self, pairs: &[[f64; 2]]) -> Result<PhotonAmplitudes> {
        let alphas = pairs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        if self.normalize_input {
            PhotonAmplitudes::normalized(alphas)
        } else {
            PhotonAmplitudes::new(alphas)
        }
    }

    /// Resolve the configuration into concrete scenario inputs. Random
    /// amplitudes are drawn from a ChaCha8 generator seeded with `seed`.
    pub fn input(&self) -> Result<ScenarioInput> {
        self.validate()?;
        let n = self.slits;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut alphas = || match &self.alphas {
            AlphaSpec::Random => Ok(random_amplitudes(n, &mut rng)),
            AlphaSpec::Explicit(pairs) => self.explicit_amplitudes(pairs),
        };
        Ok(match self.scenario {
            ScenarioKind::Single => ScenarioInput::Single {
                slits: n,
                alphas: alphas()?,
            },
            ScenarioKind::Dual => ScenarioInput::Dual {
                slits: n,
                alphas: alphas()?,
            },
            ScenarioKind::Correlated => ScenarioInput::Correlated {
                slits: n,
                photons: self.photon_count(),
                alphas: alphas()?,
            },
            ScenarioKind::Leak => ScenarioInput::Leak {
                slits: n,
                pair: self.slit_pair(),
            },
            ScenarioKind::Cascade => {
                let k = self.photon_count();
                let terms = match &self.alphas {
                    AlphaSpec::Random => random_multi_photon_terms(n, k, &mut rng),
                    AlphaSpec::Explicit(pairs) => {
                        let single = self.explicit_amplitudes(pairs)?;
                        product_terms(&vec![single; usize::from(k)])
                    }
                };
                ScenarioInput::Cascade {
                    slits: n,
                    photons: k,
                    terms,
                }
            }
        })
    }
}

/// Incoming photon configuration: slit of each photon plus its amplitude.
pub type PhotonTerm = (Vec<u16>, Complex64);

/// Concrete inputs of a scenario, shared by the sparse pipelines and the
/// dense oracle.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioInput {
    Single {
        slits: u16,
        alphas: PhotonAmplitudes,
    },
    Dual {
        slits: u16,
        alphas: PhotonAmplitudes,
    },
    Correlated {
        slits: u16,
        photons: u16,
        alphas: PhotonAmplitudes,
    },
    Leak {
        slits: u16,
        pair: (u16, u16),
    },
    /// `photons` is the shutter count K; `terms` may describe up to K photons.
    Cascade {
        slits: u16,
        photons: u16,
        terms: Vec<PhotonTerm>,
    },
}

impl ScenarioInput {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            ScenarioInput::Single { .. } => ScenarioKind::Single,
            ScenarioInput::Dual { .. } => ScenarioKind::Dual,
            ScenarioInput::Correlated { .. } => ScenarioKind::Correlated,
            ScenarioInput::Leak { .. } => ScenarioKind::Leak,
            ScenarioInput::Cascade { .. } => ScenarioKind::Cascade,
        }
    }
}

fn gaussian_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// I.i.d. complex Gaussian amplitudes, normalized.
pub fn random_amplitudes<R: Rng>(slits: u16, rng: &mut R) -> PhotonAmplitudes {
    let raw = (0..slits).map(|_| gaussian_complex(rng)).collect();
    PhotonAmplitudes::normalized(raw).expect("gaussian draw is almost surely nonzero")
}

/// Every slit assignment of `photons` photons, in lexicographic order.
pub fn slit_assignments(slits: u16, photons: u16) -> Vec<Vec<u16>> {
    let mut out = vec![Vec::new()];
    for _ in 0..photons {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=slits).map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}

/// A generic (entangled) state of `photons` photons: i.i.d. complex Gaussian
/// amplitude on every slit assignment, normalized.
pub fn random_multi_photon_terms<R: Rng>(slits: u16, photons: u16, rng: &mut R) -> Vec<PhotonTerm> {
    let raw: Vec<PhotonTerm> = slit_assignments(slits, photons)
        .into_iter()
        .map(|a| (a, gaussian_complex(rng)))
        .collect();
    normalize_terms(raw)
}

pub fn normalize_terms(terms: Vec<PhotonTerm>) -> Vec<PhotonTerm> {
    let norm = terms.iter().map(|(_, a)| a.norm_sqr()).sum::<f64>().sqrt();
    terms.into_iter().map(|(s, a)| (s, a / norm)).collect()
}

/// Expansion of a product of single-photon states.
pub fn product_terms(states: &[PhotonAmplitudes]) -> Vec<PhotonTerm> {
    let mut out: Vec<PhotonTerm> = vec![(Vec::new(), Complex64::new(1.0, 0.0))];
    for alphas in states {
        out = out
            .into_iter()
            .flat_map(|(slits, amp)| {
                alphas.as_slice().iter().zip(1u16..).map(move |(a, i)| {
                    let mut s = slits.clone();
                    s.push(i);
                    (s, amp * a)
                })
            })
            .collect();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_alpha_flags() {
        assert_eq!("random".parse::<AlphaSpec>().unwrap(), AlphaSpec::Random);
        assert_eq!(
            "0.5,0;0.5,0;0.5,0;0.5,0".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::Explicit(vec![[0.5, 0.0]; 4])
        );
        assert_eq!(
            "0.6;0,0.8".parse::<AlphaSpec>().unwrap(),
            AlphaSpec::Explicit(vec![[0.6, 0.0], [0.0, 0.8]])
        );
        assert!("0.6,1,2".parse::<AlphaSpec>().is_err());
        assert!("x,1".parse::<AlphaSpec>().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let json = r#"{"scenario":"single","N":2,"alphas":[[0.6,0],[0.8,0]],"seed":7}"#;
        let cfg: ScenarioConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.slits, 2);
        assert_eq!(cfg.tolerance, DEFAULT_TOLERANCE);
        assert_eq!(
            cfg.alphas,
            AlphaSpec::Explicit(vec![[0.6, 0.0], [0.8, 0.0]])
        );
        let back: ScenarioConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);

        let random: ScenarioConfig =
            serde_json::from_str(r#"{"scenario":"leak","slits":3,"alphas":"random"}"#).unwrap();
        assert_eq!(random.alphas, AlphaSpec::Random);
        assert!(serde_json::from_str::<ScenarioConfig>(
            r#"{"scenario":"leak","N":3,"alphas":"x"}"#
        )
        .is_err());
    }

    #[test]
    fn validation_messages() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Cascade, 3);
        cfg.photons = Some(4);
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .contains("K must not exceed N"));

        let mut cfg = ScenarioConfig::new(ScenarioKind::Leak, 3);
        cfg.slit_pair = Some([2, 2]);
        assert!(cfg.validate().is_err());
        cfg.slit_pair = Some([1, 4]);
        assert!(cfg.validate().is_err());

        let mut cfg = ScenarioConfig::new(ScenarioKind::Single, 3);
        cfg.alphas = AlphaSpec::Explicit(vec![[1.0, 0.0]; 2]);
        assert!(cfg
            .validate()
            .unwrap_err()
            .to_string()
            .contains("expected 3 amplitudes"));

        assert!(ScenarioConfig::new(ScenarioKind::Dual, 1)
            .validate()
            .is_err());
    }

    #[test]
    fn unnormalized_input_needs_flag() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Single, 2);
        cfg.alphas = AlphaSpec::Explicit(vec![[1.0, 0.0], [1.0, 0.0]]);
        assert!(cfg.input().is_err());
        cfg.normalize_input = true;
        assert!(cfg.input().is_ok());
    }

    #[test]
    fn random_inputs_are_seeded() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Cascade, 3);
        cfg.photons = Some(2);
        cfg.seed = 11;
        assert_eq!(cfg.input().unwrap(), cfg.input().unwrap());
        let ScenarioInput::Cascade { terms, .. } = cfg.input().unwrap() else {
            panic!("cascade input expected");
        };
        assert_eq!(terms.len(), 9);
        let norm: f64 = terms.iter().map(|(_, a)| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
        cfg.seed = 12;
        assert_ne!(
            cfg.input().unwrap(),
            ScenarioConfig {
                seed: 11,
                ..cfg.clone()
            }
            .input()
            .unwrap()
        );
    }

    #[test]
    fn product_expansion() {
        let a = PhotonAmplitudes::uniform(2);
        let terms = product_terms(&[a.clone(), a]);
        assert_eq!(terms.len(), 4);
        assert_eq!(terms[1].0, vec![1, 2]);
        assert!((terms[1].1.re - 0.5).abs() < 1e-15);
    }
}
