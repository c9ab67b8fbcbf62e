//! Command-line batch runner.
//!
//! Exit codes: 0 when every claim passes, 1 when a claim fails, 2 on a
//! configuration error, 3 when a post-selection is impossible.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::analysis::run_scenario;
use crate::config::{AlphaSpec, OutputFormat, ScenarioConfig, ScenarioKind, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::oracle::{dense_result, enumerate_branch_table, max_deviation};
use crate::report::{emit_report, Report};

pub const TOLERANCE_ENV: &str = "QSHUTTER_TOLERANCE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_POST_SELECTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qshutter",
    version,
    about = "Pre- and post-selected shutter scenarios"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario and print its report.
    Run(RunArgs),
    /// Run every configuration of a JSON grid file.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Slit count N.
    #[arg(long)]
    slits: Option<u16>,
    /// Photon count K.
    #[arg(long)]
    photons: Option<u16>,
    /// `random` or `re,im;re,im;...`
    #[arg(long, allow_hyphen_values = true)]
    alphas: Option<AlphaSpec>,
    /// Slits of the leak scenario's photon pair, `j,k`.
    #[arg(long)]
    slit_pair: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Rescale the given amplitudes to unit norm.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Cross-check against the dense oracle.
    #[arg(long)]
    oracle: bool,
    /// Print the single-shutter branch table as TSV and exit.
    #[arg(long)]
    oracle_table: bool,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON file: an array of configurations, or `{"points": [...]}`.
    #[arg(long)]
    grid: PathBuf,
    #[arg(long, conflicts_with = "text")]
    json: bool,
    #[arg(long)]
    text: bool,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GridFile {
    Points { points: Vec<Value> },
    List(Vec<Value>),
}

/// Map an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::PostSelectionImpossible { .. } => EXIT_POST_SELECTION,
        _ => EXIT_CONFIG,
    }
}

fn env_tolerance() -> Result<Option<f64>> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Error::Config(format!("{TOLERANCE_ENV}={v} is not a number"))),
        Err(_) => Ok(None),
    }
}

/// Deserialize a configuration object, filling `tolerance` from the
/// environment override when absent.
pub fn config_from_value(mut value: Value) -> Result<ScenarioConfig> {
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::config("configuration must be a JSON object"))?;
    if !obj.contains_key("tolerance") {
        let tol = env_tolerance()?.unwrap_or(DEFAULT_TOLERANCE);
        obj.insert("tolerance".into(), tol.into());
    }
    let config: ScenarioConfig = serde_json::from_value(value)
        .map_err(|e| Error::Config(format!("invalid configuration: {e}")))?;
    config.validate()?;
    Ok(config)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("{} is not valid JSON: {e}", path.display())))
}

fn parse_pair(s: &str) -> Result<[u16; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [j, k] => match (j.parse(), k.parse()) {
            (Ok(j), Ok(k)) => Ok([j, k]),
            _ => Err(Error::Config(format!(
                "--slit-pair expects two slit numbers, got '{s}'"
            ))),
        },
        _ => Err(Error::Config(format!("--slit-pair expects j,k, got '{s}'"))),
    }
}

/// Build the run configuration: file fields first, flags on top.
fn parse_config(args: &RunArgs) -> Result<ScenarioConfig> {
    let mut obj = match &args.config {
        Some(path) => match read_json(path)? {
            Value::Object(map) => map,
            _ => return Err(Error::config("configuration file must hold a JSON object")),
        },
        None => Map::new(),
    };
    // flags use the canonical keys; drop file aliases they replace
    if args.slits.is_some() {
        obj.remove("slits");
    }
    if args.photons.is_some() {
        obj.remove("photons");
    }
    let mut set = |key: &str, v: Value| {
        obj.insert(key.to_string(), v);
    };
    if let Some(s) = args.scenario {
        set("scenario", s.name().into());
    }
    if let Some(n) = args.slits {
        set("N", n.into());
    }
    if let Some(k) = args.photons {
        set("K", k.into());
    }
    if let Some(a) = &args.alphas {
        set("alphas", serde_json::to_value(a).expect("alphas serialize"));
    }
    if let Some(p) = &args.slit_pair {
        set(
            "slit_pair",
            serde_json::to_value(parse_pair(p)?).expect("pair serializes"),
        );
    }
    if let Some(seed) = args.seed {
        set("seed", seed.into());
    }
    if args.normalize {
        set("normalize_input", true.into());
    }
    if let Some(t) = args.tolerance {
        set("tolerance", t.into());
    }
    if args.oracle {
        set("oracle", true.into());
    }
    if args.json {
        set("output_format", "json".into());
    } else if args.text || args.config.is_none() {
        set("output_format", "text".into());
    }
    for (key, flag) in [("scenario", "--scenario"), ("N", "--slits")] {
        if !obj.contains_key(key) && !(key == "N" && obj.contains_key("slits")) {
            return Err(Error::Config(format!("missing {flag}")));
        }
    }
    config_from_value(Value::Object(obj))
}

/// Run one configuration end to end, including the optional oracle check.
pub fn execute(config: &ScenarioConfig) -> Result<Report> {
    let input = config.input()?;
    let mut result = run_scenario(&input)?;
    let deviation = if config.oracle {
        match dense_result(&input) {
            Ok(dense) => Some(max_deviation(&result, &dense)?),
            Err(Error::DimensionGuard { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    result.oracle_checked = deviation.is_some();
    emit_report(config, &input, &result, deviation)
}

fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Text => report.to_text(),
    }
}

fn run_command(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if args.oracle_table {
        let slits = args.slits.unwrap_or(2);
        let photons = args.photons.unwrap_or(1);
        return match enumerate_branch_table(slits, photons) {
            Ok(table) => {
                let _ = out.write_all(table.to_tsv().as_bytes());
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                exit_code(&e)
            }
        };
    }
    let config = match parse_config(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    match execute(&config) {
        Ok(report) => {
            let _ = writeln!(out, "{}", render(&report, config.output_format));
            if report.all_pass() {
                EXIT_OK
            } else {
                EXIT_CLAIM_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn sweep_command(args: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let points = match read_json(&args.grid).and_then(|v| {
        serde_json::from_value::<GridFile>(v).map_err(|_| {
            Error::config("grid must be an array of configurations or {\"points\": [...]}")
        })
    }) {
        Ok(GridFile::Points { points }) | Ok(GridFile::List(points)) => points,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return exit_code(&e);
        }
    };
    let format = if args.text {
        OutputFormat::Text
    } else {
        OutputFormat::Json
    };

    let outcomes: Vec<Result<Report>> = points
        .into_par_iter()
        .map(|v| config_from_value(v).and_then(|c| execute(&c)))
        .collect();

    let mut code = EXIT_OK;
    let mut worst = |c: i32| {
        // config errors dominate post-selection failures, which dominate
        // failed claims
        let rank = |c: i32| match c {
            EXIT_CONFIG => 3,
            EXIT_POST_SELECTION => 2,
            EXIT_CLAIM_FAILED => 1,
            _ => 0,
        };
        if rank(c) > rank(code) {
            code = c;
        }
    };
    let mut json_entries = Vec::with_capacity(outcomes.len());
    for (index, outcome) in outcomes.iter().enumerate() {
        match outcome {
            Ok(report) => {
                if !report.all_pass() {
                    worst(EXIT_CLAIM_FAILED);
                }
                match format {
                    OutputFormat::Json => {
                        json_entries.push(serde_json::to_value(report).expect("report serializes"))
                    }
                    OutputFormat::Text => {
                        let _ = writeln!(out, "# point {index}\n{}", report.to_text());
                    }
                }
            }
            Err(e) => {
                worst(exit_code(e));
                let _ = writeln!(err, "error: point {index}: {e}");
                if format == OutputFormat::Json {
                    json_entries.push(serde_json::json!({
                        "index": index,
                        "error": e.to_string(),
                        "exit_code": exit_code(e),
                    }));
                }
            }
        }
    }
    if format == OutputFormat::Json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&Value::Array(json_entries)).expect("json")
        );
    }
    code
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            if e.use_stderr() {
                let _ = write!(err, "{e}");
            } else {
                let _ = write!(out, "{e}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Run(args) => run_command(args, out, err),
        Command::Sweep(args) => sweep_command(args, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["qshutter"];
        full.extend_from_slice(args);
        let code = run_cli(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn explicit_alphas_run() {
        let (code, out, _) = run(&[
            "run",
            "--scenario",
            "single",
            "--slits",
            "4",
            "--alphas",
            "0.5,0;0.5,0;0.5,0;0.5,0",
            "--json",
        ]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["N"], 4);
        assert_eq!(v["claims"][0]["name"], "zero-transmission");
    }

    #[test]
    fn cascade_k_exceeding_n_is_config_error() {
        let (code, _, err) = run(&[
            "run",
            "--scenario",
            "cascade",
            "--slits",
            "3",
            "--photons",
            "4",
        ]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("K must not exceed N"), "{err}");
    }

    #[test]
    fn missing_scenario() {
        let (code, _, err) = run(&["run", "--slits", "3"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("--scenario"));
    }

    #[test]
    fn unknown_flag_is_config_error() {
        let (code, _, _) = run(&["run", "--bogus"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn bad_slit_pair() {
        let (code, _, err) = run(&[
            "run",
            "--scenario",
            "leak",
            "--slits",
            "3",
            "--slit-pair",
            "1",
        ]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(err.contains("slit-pair"));
    }

    #[test]
    fn oracle_table_tsv() {
        let (code, out, _) = run(&["run", "--oracle-table", "--slits", "3", "--photons", "1"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 7);
        assert!(out.lines().next().unwrap().split('\t').count() == 6);
    }

    #[test]
    fn text_is_default_without_config() {
        let (code, out, _) = run(&["run", "--scenario", "dual", "--slits", "3", "--seed", "4"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("scenario dual N=3 K=1 seed=4"));
        assert!(out.contains("[PASS] undistorted-passage"));
    }
}
