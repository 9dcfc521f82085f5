//! Command-line front end.
//!
//! Subcommands: `check-axioms`, `verify <condition>`, `solve` and
//! `demo <name>`. Settings come from flags, optionally layered over a JSON
//! config file (`--config`). Exit codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | passed / holds / converged / demo matched |
//! | 1    | violation found / certificate fails       |
//! | 2    | usage, parse or configuration error       |
//! | 3    | solve ended in a cycle                    |
//! | 4    | solve exhausted `max_iter`                |
//! | 5    | orbit left the domain                     |

mod demo;
pub mod parse;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::contraction::{self, Certificate, CyclicDecomposition};
use crate::error::Error;
use crate::metric::PartialMetric;
use crate::solver::{self, SolveResult, SolveStatus, SolverConfig};
use crate::spaces::{catalog, CatalogEntry, SetDescriptor, CATALOG_NAMES};
use crate::{DEFAULT_DENSITY, DEFAULT_TOL, DEFAULT_TOL_EQ};

pub use demo::{run_demo, Claim, DemoName, DemoReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CYCLE: i32 = 3;
pub const EXIT_EXHAUSTED: i32 = 4;
pub const EXIT_ESCAPE: i32 = 5;

/// Tolerance used by `check-axioms` unless `--tol` is given.
pub const AXIOM_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "pmfix",
    version,
    about = "Fixed points and contraction checks on partial metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the partial-metric axioms P1-P4 on a sample grid
    CheckAxioms(RunArgs),
    /// Verify a contraction condition on sampled sets
    Verify {
        #[arg(value_enum)]
        condition: ConditionArg,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run Picard iteration from --x0
    Solve(RunArgs),
    /// Run a scripted reproduction scenario
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[arg(long, value_enum)]
        output: Option<OutputFormat>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionArg {
    C1,
    C2,
    Pc2,
    Orbital,
    Strict,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Text,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags given on the command line override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog space: max, rationals-max, hybrid-unit, counterexample
    #[arg(long)]
    pub space: Option<String>,
    /// Custom metric rule, e.g. "x+y" or "[0,1): |x-y|; max(x,y)"
    #[arg(long = "space-custom")]
    pub space_custom: Option<String>,
    /// Map, e.g. "x/2" or "[0,1): 3/2; {3/2}: 1/2; [3,4]: (x-2)/2"
    #[arg(long)]
    pub map: Option<String>,
    /// Cyclic decomposition, sets separated by ';', e.g. "[0,1/2]; [1/2,1]"
    #[arg(long)]
    pub sets: Option<String>,
    /// Contraction constant in (0, 1)
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Starting point for solve
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Grid density per interval [default: 100]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Tolerance [default: 1e-9; 1e-12 for check-axioms]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap for solve [default: 10000]
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Output format [default: text]
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
}

/// Settings of one run, as read from a config file or assembled from flags.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub space: Option<String>,
    pub space_custom: Option<String>,
    pub map: Option<String>,
    /// Sets separated by ';'.
    pub decomposition: Option<String>,
    pub alpha: Option<f64>,
    pub x0: Option<f64>,
    pub density: Option<usize>,
    pub solver: SolverSettings,
    pub output: Option<OutputFormat>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub cycle_window: Option<usize>,
    pub tol_eq: Option<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            input: "config".into(),
            column: e.column(),
            message: format!("line {}: {e}", e.line()),
        })
    }

    /// Overlays the flags that were given.
    pub fn apply_flags(mut self, a: &RunArgs) -> Self {
        macro_rules! over {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = Some(v);
                }
            };
        }
        over!(self.space, a.space);
        over!(self.space_custom, a.space_custom);
        over!(self.map, a.map);
        over!(self.decomposition, a.sets);
        over!(self.alpha, a.alpha);
        over!(self.x0, a.x0);
        over!(self.density, a.grid);
        over!(self.solver.tol, a.tol);
        over!(self.solver.max_iter, a.max_iter);
        over!(self.output, a.output);
        self
    }

    pub fn density(&self) -> usize {
        self.density.unwrap_or(DEFAULT_DENSITY)
    }

    pub fn output(&self) -> OutputFormat {
        self.output.unwrap_or_default()
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        let d = SolverConfig::<f64>::default();
        SolverConfig {
            tol: self.solver.tol.unwrap_or(DEFAULT_TOL),
            max_iter: self.solver.max_iter.unwrap_or(d.max_iter),
            cycle_window: self.solver.cycle_window.unwrap_or(d.cycle_window),
            tol_eq: self.solver.tol_eq.unwrap_or(DEFAULT_TOL_EQ),
            stall_count: d.stall_count,
        }
    }

    /// Builds the space, map and decomposition this config describes.
    pub fn resolve(&self) -> Result<CatalogEntry<f64>, Error> {
        let sets = self
            .decomposition
            .as_deref()
            .map(parse::parse_sets::<f64>)
            .transpose()?;
        let mut entry = match (&self.space, &self.space_custom) {
            (Some(_), Some(_)) => {
                return Err(Error::Argument(
                    "give either --space or --space-custom, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Argument(
                    "no space given (use --space or --space-custom)".into(),
                ))
            }
            (Some(name), None) => catalog::<f64>(name).ok_or_else(|| {
                Error::Argument(format!(
                    "unknown space `{name}` (known: {})",
                    CATALOG_NAMES.join(", ")
                ))
            })?,
            (None, Some(rule)) => {
                let domain = match &sets {
                    Some(s) => s[1..].iter().fold(s[0].clone(), |acc, x| acc.union(x)),
                    None => SetDescriptor::closed(0.0, 1.0),
                };
                CatalogEntry {
                    name: "custom".into(),
                    space: PartialMetric::new("custom", domain, parse::parse_metric(rule)?),
                    map: None,
                    decomposition: None,
                    notes: vec![],
                    extensions: vec![],
                }
            }
        };
        if let Some(m) = &self.map {
            entry.map = Some(parse::parse_map(m)?);
        }
        if let Some(s) = sets {
            entry.decomposition = Some(CyclicDecomposition::new(s)?);
        }
        Ok(entry)
    }
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &Error) -> Self {
        let code = match e {
            Error::DomainEscape { .. } => EXIT_ESCAPE,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(code, text)
            };
        }
    };
    execute(&cli.command)
}

pub fn execute(command: &Command) -> Outcome {
    let result = match command {
        Command::CheckAxioms(a) => load(a).and_then(|c| cmd_check_axioms(&c)),
        Command::Verify { condition, run } => load(run).and_then(|c| cmd_verify(&c, *condition)),
        Command::Solve(a) => load(a).and_then(|c| cmd_solve(&c)),
        Command::Demo { name, output } => Ok(cmd_demo(*name, output.unwrap_or_default())),
    };
    result.unwrap_or_else(|e| Outcome::error(&e))
}

fn load(a: &RunArgs) -> Result<RunConfig, Error> {
    let base = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    Ok(base.apply_flags(a))
}

fn envelope(command: &str, config: &RunConfig, result: Value, extra: &[(&str, Value)]) -> String {
    let mut obj = json!({
        "command": command,
        "config": config,
        "result": result,
    });
    for (k, v) in extra {
        obj[*k] = v.clone();
    }
    serde_json::to_string_pretty(&obj).expect("serializable") + "\n"
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn cmd_check_axioms(config: &RunConfig) -> Result<Outcome, Error> {
    let entry = config.resolve()?;
    let sample = entry.space.domain.sample(config.density());
    let tol = config.solver.tol.unwrap_or(AXIOM_TOL);
    let report = entry.space.check_axioms(&sample, tol)?;
    let code = if report.passed { EXIT_OK } else { EXIT_FAIL };
    let out = match config.output() {
        OutputFormat::Json => envelope("check-axioms", config, to_value(&report), &[]),
        OutputFormat::Csv => {
            let mut s = String::from("axiom,witness,lhs,rhs\n");
            for v in &report.violations {
                let w: Vec<String> = v.witness.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(s, "{},{},{},{}", v.axiom, w.join(" "), v.lhs, v.rhs);
            }
            s
        }
        OutputFormat::Text => {
            let mut s = format!(
                "space {} ({} sample points, tol {tol:e}): {}\n",
                entry.space.name,
                sample.len(),
                if report.passed {
                    "all axioms hold"
                } else {
                    "violations found"
                }
            );
            for v in report.violations.iter().take(20) {
                let w: Vec<String> = v.witness.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(
                    s,
                    "  {} witness ({}) lhs {} rhs {}",
                    v.axiom,
                    w.join(", "),
                    v.lhs,
                    v.rhs
                );
            }
            if report.violations.len() > 20 {
                let _ = writeln!(s, "  ... {} violations in total", report.violations.len());
            }
            s
        }
    };
    Ok(Outcome::ok(code, out))
}

fn need_alpha(config: &RunConfig, condition: ConditionArg) -> Result<f64, Error> {
    config
        .alpha
        .ok_or_else(|| Error::Argument(format!("condition {condition:?} needs --alpha")))
}

/// Of several certificates, the failing or least-margin one.
fn worst(certs: Vec<Certificate<f64>>) -> Certificate<f64> {
    let mut iter = certs.into_iter();
    let first = iter.next().expect("at least one certificate");
    let (checked, skipped) = (first.checked, first.skipped);
    let (mut best, checked, skipped) =
        iter.fold((first, checked, skipped), |(best, c, s), cert| {
            let (c, s) = (c + cert.checked, s + cert.skipped);
            let worse = match (cert.margin, best.margin) {
                (Some(m), Some(b)) => m < b,
                (Some(_), None) => true,
                _ => false,
            };
            (if worse { cert } else { best }, c, s)
        });
    best.checked = checked;
    best.skipped = skipped;
    best
}

pub fn cmd_verify(config: &RunConfig, condition: ConditionArg) -> Result<Outcome, Error> {
    let entry = config.resolve()?;
    let density = config.density();
    let t = entry.map()?;
    let space = &entry.space;
    let mut extra = Vec::new();
    let cert = match condition {
        ConditionArg::C1 => contraction::verify_inclusions(t, entry.decomposition()?, density)?,
        ConditionArg::C2 => {
            let decomp = entry.decomposition()?;
            let alpha = need_alpha(config, condition)?;
            let est = contraction::estimate_alpha_cyclic(space, t, decomp, density)?;
            extra.push(("alpha_estimate", to_value(&est)));
            contraction::verify_c2(space, t, decomp, alpha, density)?
        }
        ConditionArg::Pc2 => {
            let alpha = need_alpha(config, condition)?;
            match &entry.decomposition {
                Some(d) => worst(
                    (0..d.k())
                        .map(|i| {
                            contraction::verify_partial_cyclic(
                                space,
                                t,
                                &d.sets[i],
                                d.next(i),
                                alpha,
                                density,
                            )
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => contraction::verify_partial_contraction(space, t, alpha, density)?,
            }
        }
        ConditionArg::Orbital => {
            let alpha = need_alpha(config, condition)?;
            let sample = match &entry.decomposition {
                Some(d) => d.union_sample(density),
                None => space.domain.sample(density),
            };
            let mut c = contraction::verify_orbital(space, t, &sample, alpha)?;
            c.density = Some(density);
            c
        }
        ConditionArg::Strict => {
            contraction::verify_strict(space, t, entry.decomposition()?, density)?
        }
    };
    let code = if cert.holds { EXIT_OK } else { EXIT_FAIL };
    let out = match config.output() {
        OutputFormat::Json => {
            extra.push(("certificate", to_value(&cert)));
            envelope(
                "verify",
                config,
                json!({ "holds": cert.holds, "notes": entry.extensions }),
                &extra,
            )
        }
        OutputFormat::Csv => {
            let rec = cert.to_record();
            // witness coordinates are separated by ';' inside the cell
            let (keys, vals): (Vec<&str>, Vec<String>) = rec
                .split(' ')
                .filter_map(|kv| kv.split_once('='))
                .map(|(k, v)| (k, v.replace(',', ";")))
                .unzip();
            format!("{}\n{}\n", keys.join(","), vals.join(","))
        }
        OutputFormat::Text => {
            let mut s = cert.to_record() + "\n";
            for e in &entry.extensions {
                let _ = writeln!(s, "note: {e}");
            }
            s
        }
    };
    Ok(Outcome::ok(code, out))
}

fn solve_code(status: &SolveStatus<f64>) -> i32 {
    match status {
        SolveStatus::Converged { .. } => EXIT_OK,
        SolveStatus::Cycle { .. } => EXIT_CYCLE,
        SolveStatus::Exhausted => EXIT_EXHAUSTED,
    }
}

pub fn cmd_solve(config: &RunConfig) -> Result<Outcome, Error> {
    let entry = config.resolve()?;
    let x0 = config
        .x0
        .ok_or_else(|| Error::Argument("solve needs --x0".into()))?;
    let t = entry.map()?;
    let cfg = config.solver_config();
    let result: SolveResult<f64> = match &entry.decomposition {
        Some(d) => solver::solve_cyclic(&entry.space, t, d, x0, &cfg)?,
        None => solver::picard(&entry.space, t, x0, &cfg)?,
    };
    let code = solve_code(&result.status);
    let out = match config.output() {
        OutputFormat::Json => {
            let summary = json!({
                "status": result.status,
                "membership": result.membership,
                "steps": result.trace.steps(),
            });
            envelope(
                "solve",
                config,
                summary,
                &[("trace", to_value(&result.trace))],
            )
        }
        OutputFormat::Csv => result.trace.to_csv(),
        OutputFormat::Text => {
            let mut s = match &result.status {
                SolveStatus::Converged { u, p_uu, orbital_residual } => format!(
                    "converged: u = {u}, p(u,u) = {p_uu}, |p(Tu,u) - p(Tu,Tu)| = {orbital_residual}\n"
                ),
                SolveStatus::Cycle { period, orbit } => {
                    let pts: Vec<String> = orbit.iter().map(|p| p.to_string()).collect();
                    format!("cycle: period {period}, orbit {{{}}}\n", pts.join(", "))
                }
                SolveStatus::Exhausted => format!("exhausted after {} steps\n", result.trace.steps()),
            };
            if let Some(m) = &result.membership {
                let _ = writeln!(s, "membership: {m:?}");
            }
            let _ = writeln!(s, "steps: {}", result.trace.steps());
            for e in &entry.extensions {
                let _ = writeln!(s, "note: {e}");
            }
            s
        }
    };
    Ok(Outcome::ok(code, out))
}

pub fn cmd_demo(name: DemoName, output: OutputFormat) -> Outcome {
    let report = match run_demo(name) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let code = if report.reproduced() {
        EXIT_OK
    } else {
        EXIT_FAIL
    };
    let out = match output {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&json!({
                "command": "demo",
                "config": { "name": name },
                "result": report,
            }))
            .expect("serializable")
                + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("claim,reproduced,detail\n");
            for c in &report.claims {
                let _ = writeln!(
                    s,
                    "\"{}\",{},\"{}\"",
                    c.statement,
                    c.reproduced,
                    c.detail.replace('"', "'")
                );
            }
            s
        }
        OutputFormat::Text => report.to_text(),
    };
    Outcome::ok(code, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("pmfix").chain(args.iter().copied()))
    }

    #[test]
    fn config_file_fields() {
        let c = RunConfig::from_json(r#"{"space": "max", "density": 20, "solver": {"tol": 1e-6}}"#)
            .unwrap();
        assert_eq!(c.density(), 20);
        assert_eq!(c.solver_config().tol, 1e-6);
        assert!(RunConfig::from_json(r#"{"spaec": "max"}"#).is_err());
    }

    #[test]
    fn flags_override_config() {
        let c = RunConfig {
            space: Some("max".into()),
            density: Some(10),
            ..RunConfig::default()
        };
        let a = RunArgs {
            grid: Some(50),
            ..RunArgs::default()
        };
        let c = c.apply_flags(&a);
        assert_eq!(c.density(), 50);
        assert_eq!(c.space.as_deref(), Some("max"));
    }

    #[test]
    fn resolve_errors() {
        assert!(RunConfig::default().resolve().is_err());
        let c = RunConfig {
            space: Some("nope".into()),
            ..RunConfig::default()
        };
        assert!(c.resolve().is_err());
    }

    #[test]
    fn missing_alpha_is_usage_error() {
        let o = run_args(&["verify", "c2", "--space", "counterexample"]);
        assert_eq!(o.code, EXIT_USAGE);
        assert!(o.stderr.contains("--alpha"));
    }

    #[test]
    fn missing_decomposition_is_usage_error() {
        assert_eq!(
            run_args(&["verify", "c1", "--space", "max"]).code,
            EXIT_USAGE
        );
    }

    #[test]
    fn escape_exit_code() {
        let o = run_args(&[
            "solve",
            "--space-custom",
            "max(x,y)",
            "--map",
            "2*x",
            "--x0",
            "0.75",
        ]);
        assert_eq!(o.code, EXIT_ESCAPE, "{o:?}");
    }
}
