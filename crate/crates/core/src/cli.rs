//! `vbs` command-line interface.
//!
//! Exit codes: 0 success, 1 validation or solve failure, 2 usage, I/O or
//! parse error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::algebra::{OperationCounter, SolutionTable};
use crate::error::Error;
use crate::format::{parse_model_with, ParseOptions};
use crate::fusion::{candidate_next, one_step_look_ahead, solve, DeletionSequence, SolveReport};
use crate::model::{DecisionProblem, Odometer, VarId, WELL_DEFINED_TOLERANCE};
use crate::oracle;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Tolerance used by `oracle` when comparing the three MEU routes.
const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(
    name = "vbs",
    version,
    about = "Solve Bayesian decision problems by fusion"
)]
struct Cli {
    /// Absolute tolerance for the potential normalization check.
    #[arg(long, global = true, default_value_t = WELL_DEFINED_TOLERANCE)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a model, including normalization of its potentials.
    Check { file: PathBuf },
    /// Compute the maximum expected utility and an optimal strategy.
    Solve {
        file: PathBuf,
        /// Deletion sequence, e.g. `D,T,B,G`. Defaults to one-step look-ahead.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[arg(long)]
        json: bool,
    },
    /// Cross-check fusion against brute force and global marginalization.
    Oracle { file: PathBuf },
    /// Print operation counts only.
    Count {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
    },
    /// Print the look-ahead deletion sequence and the first-step candidates.
    Order { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        CliOutput {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl std::fmt::Display) -> Self {
        CliOutput {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => EXIT_USAGE,
        _ => EXIT_INVALID,
    }
}

fn load(path: &Path, tolerance: f64) -> Result<DecisionProblem, CliOutput> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliOutput::fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    let options = ParseOptions {
        well_defined: Some(tolerance),
    };
    parse_model_with(&text, &options)
        .map_err(|e| CliOutput::fail(exit_code(&e), format!("{}: {e}", path.display())))
}

fn sequence_from(
    problem: &DecisionProblem,
    order: &Option<Vec<String>>,
) -> Result<Option<DeletionSequence>, CliOutput> {
    order
        .as_ref()
        .map(|names| DeletionSequence::from_names(problem, names))
        .transpose()
        .map_err(|e| CliOutput::fail(exit_code(&e), e))
}

/// Runs the CLI on `args` (including the program name) without touching
/// the process's stdout or exit status.
pub fn run_cli<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CliOutput::ok(text)
            } else {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(out) | Err(out) => out,
    }
}

fn dispatch(cli: Cli) -> Result<CliOutput, CliOutput> {
    let tol = cli.tolerance;
    match cli.command {
        Command::Check { file } => {
            let p = load(&file, tol)?;
            let decisions = p.decision_vars().len();
            Ok(CliOutput::ok(format!(
                "ok: {} variables ({} decision, {} random), {} valuations, well-defined\n",
                p.variables().len(),
                decisions,
                p.variables().len() - decisions,
                p.valuations().len()
            )))
        }
        Command::Solve { file, order, json } => {
            let p = load(&file, tol)?;
            let seq = sequence_from(&p, &order)?;
            let report = solve(&p, seq.as_ref()).map_err(|e| CliOutput::fail(exit_code(&e), e))?;
            let text = if json {
                let mut s = serde_json::to_string_pretty(&JsonReport::new(&p, &report))
                    .expect("report serializes");
                s.push('\n');
                s
            } else {
                human_report(&p, &report)
            };
            Ok(CliOutput::ok(text))
        }
        Command::Count { file, order } => {
            let p = load(&file, tol)?;
            let seq = sequence_from(&p, &order)?;
            let report = solve(&p, seq.as_ref()).map_err(|e| CliOutput::fail(exit_code(&e), e))?;
            Ok(CliOutput::ok(format!("{}\n", report.counter)))
        }
        Command::Order { file } => {
            let p = load(&file, tol)?;
            let seq = one_step_look_ahead(&p);
            let all: Vec<VarId> = p.ids().collect();
            let first: Vec<String> = candidate_next(&p, &all)
                .iter()
                .map(|v| p.variable(*v).name.clone())
                .collect();
            Ok(CliOutput::ok(format!(
                "sequence {}\ncandidates {}\n",
                seq.names(&p).join(" "),
                first.join(" ")
            )))
        }
        Command::Oracle { file } => {
            let p = load(&file, tol)?;
            oracle_report(&p)
        }
    }
}

fn oracle_report(p: &DecisionProblem) -> Result<CliOutput, CliOutput> {
    let fail = |e: Error| CliOutput::fail(exit_code(&e), e);
    let report = solve(p, None).map_err(fail)?;
    let global = oracle::global_solve(p).map_err(fail)?;
    let scored = oracle::evaluate_strategy(p, &report.strategy).map_err(fail)?;

    let mut out = String::new();
    let mut worst: f64 = 0.0;
    let mut line = |out: &mut String, label: &str, value: f64, note: &str| {
        let delta = (value - report.meu).abs();
        worst = worst.max(delta);
        let _ = writeln!(out, "{label:<12} {value:.6}  delta {delta:.3e}{note}");
    };
    let _ = writeln!(out, "{:<12} {:.6}", "fusion", report.meu);
    line(&mut out, "global", global, "");
    match oracle::brute_force_solve(p) {
        Ok((meu, _)) => {
            let size = oracle::strategy_space_size(p).map_err(fail)?;
            line(
                &mut out,
                "brute-force",
                meu,
                &format!("  ({size} strategies)"),
            );
        }
        Err(e @ Error::StrategySpaceTooLarge { .. }) => {
            let _ = writeln!(out, "{:<12} skipped: {e}", "brute-force");
        }
        Err(e) => return Err(fail(e)),
    }
    line(
        &mut out,
        "strategy",
        scored,
        "  (fusion strategy, forward-executed)",
    );

    if worst > ORACLE_TOLERANCE {
        return Ok(CliOutput {
            code: EXIT_INVALID,
            stdout: out,
            stderr: format!("error: oracle mismatch of {worst:e} exceeds {ORACLE_TOLERANCE:e}\n"),
        });
    }
    Ok(CliOutput::ok(out))
}

/// `(configuration labels, chosen act)` for every row of a solution table.
fn table_rows(p: &DecisionProblem, t: &SolutionTable) -> Vec<(Vec<String>, String)> {
    let acts = &p.variable(t.decision).states;
    Odometer::new(t.shape.clone())
        .zip(&t.choices)
        .map(|(states, &c)| {
            let labels = t
                .domain
                .vars()
                .iter()
                .zip(states)
                .map(|(v, s)| p.variable(*v).states[s].clone())
                .collect();
            (labels, acts[c].clone())
        })
        .collect()
}

fn human_report(p: &DecisionProblem, r: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "MEU {:.6}", r.meu);
    let _ = writeln!(out, "sequence {}", r.sequence.names(p).join(" "));
    for t in r.strategy.tables() {
        let over: Vec<&str> = t
            .domain
            .vars()
            .iter()
            .map(|v| p.variable(*v).name.as_str())
            .collect();
        let name = &p.variable(t.decision).name;
        if over.is_empty() {
            let _ = writeln!(out, "strategy {name}");
        } else {
            let _ = writeln!(out, "strategy {name} | {}", over.join(" "));
        }
        for (labels, act) in table_rows(p, t) {
            let when = if labels.is_empty() {
                "*".to_string()
            } else {
                labels.join(" ")
            };
            let _ = writeln!(out, "  {when} -> {act}");
        }
    }
    let _ = writeln!(out, "{}", r.counter);
    out
}

#[derive(Serialize)]
struct JsonRule {
    when: Vec<String>,
    choose: String,
}

#[derive(Serialize)]
struct JsonTable {
    decision: String,
    domain: Vec<String>,
    rules: Vec<JsonRule>,
}

#[derive(Serialize)]
struct JsonReport {
    meu: f64,
    sequence: Vec<String>,
    strategy: Vec<JsonTable>,
    counts: OperationCounter,
}

impl JsonReport {
    fn new(p: &DecisionProblem, r: &SolveReport) -> Self {
        let strategy = r
            .strategy
            .tables()
            .iter()
            .map(|t| JsonTable {
                decision: p.variable(t.decision).name.clone(),
                domain: t
                    .domain
                    .vars()
                    .iter()
                    .map(|v| p.variable(*v).name.clone())
                    .collect(),
                rules: table_rows(p, t)
                    .into_iter()
                    .map(|(when, choose)| JsonRule { when, choose })
                    .collect(),
            })
            .collect();
        JsonReport {
            meu: r.meu,
            sequence: r.sequence.names(p),
            strategy,
            counts: r.counter,
        }
    }
}
