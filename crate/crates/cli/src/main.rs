// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use speedup_core::oracles::{Family, FamilyKind};
use speedup_core::verify::{run_suite, Suite};
use speedup_core::{BitString, Error};
use speedup_cli::commands::{self, load_family};
use speedup_cli::config::{Algo, ChoiceSpec, Format, Mode};

#[derive(Parser)]
#[command(name = "speedup", version, about = "Oracle algorithms with an explicit problem-setter register")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and emit the stage-by-stage trace.
    Run(RunArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Enumerate the valid divisions of the projection on b.
    Share(ShareArgs),
    /// List the classical histories behind the function evaluation.
    Histories(HistoryArgs),
    /// Emit the query-count comparison table.
    Report(ReportArgs),
}

#[derive(Args)]
struct Target {
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long)]
    n: Option<u32>,
    /// JSON family file: {"kind": "dj", "n": 2, "members": ["0011", ...]}
    #[arg(long)]
    family: Option<PathBuf>,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    target: Target,
    /// Bit string of the choice, or `random`.
    #[arg(long, default_value = "random")]
    b: String,
    #[arg(long, value_enum, default_value = "relativized")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// states, entropies, sharing, histories, classical or all
    suite: String,
    /// Check this family instead of the standard ones.
    #[arg(long)]
    family: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ShareArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long)]
    b: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HistoryArgs {
    #[command(flatten)]
    target: Target,
    /// Only list the histories of this choice.
    #[arg(long)]
    b: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportKind {
    Speedup,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(value_enum, default_value = "speedup")]
    kind: ReportKind,
    /// Every family when omitted.
    #[arg(long, value_enum)]
    algo: Option<Algo>,
    #[arg(long, default_value_t = 2)]
    n: u32,
    #[arg(long)]
    family: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

enum Failure {
    /// Bad arguments, family or configuration.
    Usage(String),
    /// A check failed or the computation broke down.
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Family(_) | Error::Parse(_) | Error::Argument(_) | Error::Capability(_) | Error::Dimension(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Verification(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit(bytes: &[u8], out: Option<&PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(doc: &T, output: &Output) -> Result<(), Failure> {
    if output.format == Format::Csv {
        return Err(Failure::Usage("csv output is only available for report tables".into()));
    }
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Failure::Verification(e.to_string()))?;
    text.push('\n');
    emit(text.as_bytes(), output.out.as_ref())
}

fn family_of(target: &Target, checked: bool) -> Result<Family, Failure> {
    Ok(load_family(target.algo.map(FamilyKind::from), target.n, target.family.as_deref(), checked)?)
}

fn parse_b(s: &str) -> Result<BitString, Failure> {
    Ok(s.parse::<BitString>()?)
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run(args) => {
            let family = family_of(&args.target, true)?;
            let choice: ChoiceSpec = args.b.parse()?;
            emit_json(&commands::run(&family, choice, args.mode, args.seed)?, &args.output)
        }
        Command::Verify(args) => {
            let suite: Suite = args.suite.parse()?;
            let custom = args.family.as_deref().map(|p| load_family(None, None, Some(p), false)).transpose()?;
            let report = run_suite(suite, custom.as_ref());
            emit_json(&report, &args.output)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
                Err(Failure::Verification(format!("failed checks: {}", failed.join(", "))))
            }
        }
        Command::Share(args) => {
            let family = family_of(&args.target, true)?;
            emit_json(&commands::share(&family, &parse_b(&args.b)?)?, &args.output)
        }
        Command::Histories(args) => {
            let family = family_of(&args.target, true)?;
            let b = args.b.as_deref().map(parse_b).transpose()?;
            emit_json(&commands::histories(&family, b.as_ref())?, &args.output)
        }
        Command::Report(args) => {
            let ReportKind::Speedup = args.kind;
            let families: Vec<Family> = match (&args.family, args.algo) {
                (Some(p), algo) => vec![load_family(algo.map(FamilyKind::from), Some(args.n), Some(p), true)?],
                (None, Some(algo)) => vec![Family::full(algo.into(), args.n)?],
                (None, None) => [FamilyKind::Grover, FamilyKind::DeutschJozsa, FamilyKind::Simon]
                    .into_iter()
                    .map(|k| Family::full(k, args.n))
                    .collect::<Result<_, _>>()?,
            };
            let rows = commands::report(&families)?;
            match args.output.format {
                Format::Json => emit_json(&rows, &args.output),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    for row in &rows {
                        w.serialize(row).map_err(|e| Failure::Verification(e.to_string()))?;
                    }
                    let bytes = w.into_inner().map_err(|e| Failure::Verification(e.to_string()))?;
                    emit(&bytes, args.output.out.as_ref())
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
