//! Machine-readable reports and the per-scenario claims they check.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{input_photon_state, reflected_image, LeakDetail, ScenarioResult};
use crate::config::{ScenarioConfig, ScenarioInput, ScenarioKind};
use crate::error::Result;
use crate::state::fidelity;

/// Smallest conditional leak probability that counts as a leak.
pub const LEAK_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|observed − expected| <= tolerance`
    Equal,
    /// `observed > expected`
    GreaterThan,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Claim {
    pub fn equal(name: &str, expected: f64, observed: f64, tolerance: f64) -> Self {
        Claim {
            name: name.to_string(),
            expected,
            observed,
            relation: Relation::Equal,
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    pub fn greater_than(name: &str, bound: f64, observed: f64) -> Self {
        Claim {
            name: name.to_string(),
            expected: bound,
            observed,
            relation: Relation::GreaterThan,
            pass: observed > bound,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateEntry {
    pub label: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub scenario: ScenarioKind,
    #[serde(rename = "N")]
    pub slits: u16,
    #[serde(rename = "K")]
    pub photons: u16,
    pub seed: u64,
    pub success_probability: f64,
    pub transmitted_probability: f64,
    pub reflected_probability: f64,
    pub mixed_probability: f64,
    pub undisturbed_probability: f64,
    pub per_stage_probabilities: Vec<f64>,
    pub conditional_state: Vec<StateEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leak: Option<LeakDetail>,
    pub oracle_checked: bool,
    pub oracle_max_deviation: Option<f64>,
    pub claims: Vec<Claim>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering of the same fields as the JSON report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} N={} K={} seed={}",
            self.scenario, self.slits, self.photons, self.seed
        );
        let _ = writeln!(
            out,
            "success_probability      {:.16e}",
            self.success_probability
        );
        let _ = writeln!(
            out,
            "transmitted_probability  {:.16e}",
            self.transmitted_probability
        );
        let _ = writeln!(
            out,
            "reflected_probability    {:.16e}",
            self.reflected_probability
        );
        let _ = writeln!(
            out,
            "mixed_probability        {:.16e}",
            self.mixed_probability
        );
        let _ = writeln!(
            out,
            "undisturbed_probability  {:.16e}",
            self.undisturbed_probability
        );
        let stages: Vec<String> = self
            .per_stage_probabilities
            .iter()
            .map(|p| format!("{p:.16e}"))
            .collect();
        let _ = writeln!(out, "per_stage_probabilities  {}", stages.join(" "));
        if let Some(leak) = &self.leak {
            let _ = writeln!(
                out,
                "leak_residual_overlap    {:.16e}",
                leak.residual_overlap
            );
            let _ = writeln!(
                out,
                "leak_conditional         {:.16e}",
                leak.conditional_leak_probability
            );
            let _ = writeln!(
                out,
                "leak_joint               {:.16e}",
                leak.joint_leak_probability
            );
        }
        match self.oracle_max_deviation {
            Some(d) => {
                let _ = writeln!(out, "oracle_max_deviation     {d:.3e}");
            }
            None => {
                let _ = writeln!(out, "oracle_max_deviation     unchecked");
            }
        }
        out.push_str("conditional_state\n");
        for e in &self.conditional_state {
            let _ = writeln!(out, "  {} {:.16e} {:.16e}", e.label, e.re, e.im);
        }
        out.push_str("claims\n");
        for c in &self.claims {
            let rel = match c.relation {
                Relation::Equal => "=",
                Relation::GreaterThan => ">",
            };
            let _ = writeln!(
                out,
                "  [{}] {} observed {:.16e} {rel} expected {:.16e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.expected
            );
        }
        out
    }
}

/// The assertions each scenario is expected to satisfy.
pub fn scenario_claims(
    input: &ScenarioInput,
    result: &ScenarioResult,
    tolerance: f64,
) -> Result<Vec<Claim>> {
    let incoming = input_photon_state(input)?;
    let conditional = &result.conditional_photon_state;
    let n = f64::from(result.slits);
    let mut claims = Vec::new();
    match input {
        ScenarioInput::Single { .. } | ScenarioInput::Correlated { .. } => {
            claims.push(Claim::equal(
                "zero-transmission",
                0.0,
                result.transmitted_probability,
                tolerance,
            ));
            let mirror = fidelity(conditional, &reflected_image(&incoming, 1)?)?;
            claims.push(Claim::equal("mirror-reflection", 1.0, mirror, tolerance));
            claims.push(Claim::equal(
                "success-probability",
                1.0 / (2.0 * n - 1.0).powi(2),
                result.success_probability,
                tolerance,
            ));
        }
        ScenarioInput::Dual { .. } => {
            let f = fidelity(conditional, &incoming)?;
            claims.push(Claim::equal("undistorted-passage", 1.0, f, tolerance));
            claims.push(Claim::equal(
                "full-transmission",
                1.0,
                result.transmitted_probability,
                tolerance,
            ));
        }
        ScenarioInput::Leak { .. } => {
            let leak = result.leak.expect("leak scenario carries leak details");
            claims.push(Claim::greater_than(
                "leak-positive",
                LEAK_THRESHOLD,
                leak.conditional_leak_probability,
            ));
            claims.push(Claim::equal(
                "leak-residual-overlap",
                -1.0 / ((2.0 * n - 1.0) * (2.0 * n - 3.0)).sqrt(),
                leak.residual_overlap,
                tolerance,
            ));
        }
        ScenarioInput::Cascade { .. } => {
            claims.push(Claim::equal(
                "zero-transmission",
                0.0,
                result.transmitted_probability,
                tolerance,
            ));
        }
    }
    Ok(claims)
}

/// Assemble the report for a finished run. `oracle_deviation` is the
/// largest sparse/dense discrepancy when the oracle ran.
pub fn emit_report(
    config: &ScenarioConfig,
    input: &ScenarioInput,
    result: &ScenarioResult,
    oracle_deviation: Option<f64>,
) -> Result<Report> {
    let mut claims = scenario_claims(input, result, config.tolerance)?;
    if let Some(d) = oracle_deviation {
        claims.push(Claim::equal("oracle-agreement", 0.0, d, config.tolerance));
    }
    let state = &result.conditional_photon_state;
    let conditional_state = state
        .iter()
        .map(|(label, a)| StateEntry {
            label: label.render(state.layout()),
            re: a.re,
            im: a.im,
        })
        .collect();
    Ok(Report {
        scenario: result.scenario,
        slits: result.slits,
        photons: result.photons,
        seed: config.seed,
        success_probability: result.success_probability,
        transmitted_probability: result.transmitted_probability,
        reflected_probability: result.reflected_probability,
        mixed_probability: result.mixed_probability,
        undisturbed_probability: result.undisturbed_probability,
        per_stage_probabilities: result.per_stage_probabilities.clone(),
        conditional_state,
        leak: result.leak,
        oracle_checked: oracle_deviation.is_some(),
        oracle_max_deviation: oracle_deviation,
        claims,
    })
}
