use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use rrcheck::charclass::{chern_character, todd_class};
use rrcheck::equivariant::{equivariant_ch, equivariant_euler, EquivariantBundle, FixedComponent};
use rrcheck::verify::scenario::document_string;
use rrcheck::verify::{grid, run_all, run_until_failure, Outcome, Report, ScenarioEntry, Summary};
use rrcheck::{BundleData, Error, ExecMode, GradedElement, VarietyModel};

/// Exit status for a failed or errored check.
const EXIT_FAILED: u8 = 1;
/// Exit status for unreadable or malformed input.
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(name = "rrcheck", version, about = "Exact checks of Riemann-Roch and fixed-point identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate scenario files and write one JSON report per line.
    Verify {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Write reports here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stop after the first scenario that does not pass.
        #[arg(long)]
        fail_fast: bool,
        /// Evaluate scenarios one at a time.
        #[arg(long)]
        sequential: bool,
        /// Print a status line per scenario on standard error.
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,
    },
    /// Print a characteristic class as canonical JSON.
    Compute { kind: ComputeKind, payload: PathBuf },
    /// Print one of the built-in scenario grids as a JSON array.
    Grid {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(grid::GRID_NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComputeKind {
    /// Chern character of a bundle.
    Ch,
    /// Todd class of a variety.
    Td,
    /// Equivariant Euler class of a fixed component's conormal data.
    Euler,
    /// Equivariant Chern character.
    Eqch,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { files, out, fail_fast, sequential, verbose } => {
            verify(&files, out.as_deref(), fail_fast, sequential, verbose)
        }
        Command::Compute { kind, payload } => compute(kind, &payload),
        Command::Grid { name, out } => emit_grid(&name, out.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("rrcheck: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>, String> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn verify(
    files: &[PathBuf],
    out: Option<&Path>,
    fail_fast: bool,
    sequential: bool,
    verbose: u8,
) -> Result<ExitCode, String> {
    let mut entries: Vec<ScenarioEntry> = Vec::new();
    for path in files {
        let text = read(path)?;
        let parsed = rrcheck::verify::parse_document(&text, &path.display().to_string()).map_err(|e| e.to_string())?;
        entries.extend(parsed);
    }

    let mode = if sequential { ExecMode::Sequential } else { ExecMode::Parallel };
    let reports: Vec<Report> = if fail_fast { run_until_failure(&entries) } else { run_all(&entries, mode) };
    let summary = Summary::from_reports(&reports);

    let mut w = open_output(out)?;
    let write_err = |e: io::Error| format!("writing reports: {e}");
    for r in &reports {
        writeln!(w, "{}", r.to_json_line()).map_err(write_err)?;
        if verbose > 0 {
            let status = match r.outcome() {
                Outcome::Passed => "pass",
                Outcome::Failed => "FAIL",
                Outcome::Errored => "ERROR",
            };
            eprintln!("{status:5} {}", r.id);
        }
    }
    writeln!(w, "{}", summary.to_json_line()).map_err(write_err)?;
    w.flush().map_err(write_err)?;
    if verbose > 0 {
        eprintln!("{} passed, {} failed, {} errored", summary.passed, summary.failed, summary.errored);
    }
    Ok(if summary.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED) })
}

/// The variety named by `{"variety": {...}}`, or by the payload itself
/// when it carries `"factors"`.
fn payload_variety(v: &Value) -> rrcheck::Result<VarietyModel> {
    VarietyModel::from_json(v.get("variety").unwrap_or(v))
}

/// `{"variety", "line": [..]}`, `{"variety", "lines": [[..]]}` or
/// `{"variety", "rank", "chern": <graded element>}`.
fn payload_bundle(v: &Value) -> rrcheck::Result<BundleData> {
    let x = payload_variety(v)?;
    let as_ints = |l: &Value| -> rrcheck::Result<Vec<i64>> {
        l.as_array()
            .ok_or_else(|| Error::Parse("a line bundle is a list of integer twists".into()))?
            .iter()
            .map(|k| k.as_i64().ok_or_else(|| Error::Parse(format!("bad twist {k}"))))
            .collect()
    };
    if let Some(l) = v.get("line") {
        return x.line_bundle(&as_ints(l)?);
    }
    if let Some(ls) = v.get("lines").and_then(Value::as_array) {
        return ls.iter().try_fold(BundleData::trivial(x.presentation(), 0), |acc, l| {
            acc.direct_sum(&x.line_bundle(&as_ints(l)?)?)
        });
    }
    match (v.get("rank").and_then(Value::as_i64), v.get("chern")) {
        (Some(rank), Some(c)) => BundleData::new(rank, GradedElement::from_json(x.presentation(), c)?),
        _ => Err(Error::Parse("bundle needs \"line\", \"lines\" or \"rank\" with \"chern\"".into())),
    }
}

fn compute(kind: ComputeKind, payload: &Path) -> Result<ExitCode, String> {
    let text = read(payload)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", payload.display()))?;
    let class = match kind {
        ComputeKind::Ch => payload_bundle(&v).map(|e| chern_character(&e)),
        ComputeKind::Td => payload_variety(&v).map(|x| todd_class(&x)),
        ComputeKind::Euler => FixedComponent::from_json(&v).map(|c| equivariant_euler(&c)),
        ComputeKind::Eqch => EquivariantBundle::from_json(&v).map(|b| equivariant_ch(&b)),
    }
    .map_err(|e| format!("{}: {e}", payload.display()))?;
    println!("{}", class.canonical_string());
    Ok(ExitCode::SUCCESS)
}

fn emit_grid(name: &str, out: Option<&Path>) -> Result<ExitCode, String> {
    let entries = grid::grid_by_name(name).ok_or_else(|| format!("unknown grid {name:?}"))?;
    let mut w = open_output(out)?;
    w.write_all(document_string(&entries).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| format!("writing grid: {e}"))?;
    Ok(ExitCode::SUCCESS)
}
