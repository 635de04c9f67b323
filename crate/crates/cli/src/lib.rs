//! Library half of the `dotphase` command-line tool: argument parsing,
//! config resolution, subcommands and report output.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{
    CalibrateClockArgs, CommandKind, EstimateArgs, FeasibilityArgs, GlobalFlags, OutputFormat,
    PulseFitArgs, RunConfig, SectionFlags, SweepArgs, OUTPUT_DIR_ENV,
};
use error::{CliError, Result};
use report::{RunReport, Timing, Versions};

#[derive(Debug, Parser)]
#[command(
    name = "dotphase",
    version,
    about = "Quantum phase estimation on a double quantum dot"
)]
pub struct Cli {
    /// Config file (TOML, or JSON for `.json`; a JSON report is accepted too).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report destination (default: stdout, or $DOTPHASE_OUTPUT_DIR/<command>.<ext>).
    #[arg(short, long, global = true)]
    pub output: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run phase estimation for one phase.
    Estimate(EstimateArgs),
    /// Success probability against the lower bound over register sizes and phases.
    Sweep(SweepArgs),
    /// Fit pulse parameters to a single-qubit gate.
    PulseFit(PulseFitArgs),
    /// Convert a duration to a phase and judge a clock against a reference.
    CalibrateClock(CalibrateClockArgs),
    /// Physical feasibility figures for a device.
    Feasibility(FeasibilityArgs),
    /// Re-run the config echoed in a JSON report.
    Replay { report: PathBuf },
}

/// What a run produced, before it is written anywhere.
pub struct Rendered {
    pub kind: CommandKind,
    pub format: OutputFormat,
    pub body: String,
    pub report: Option<RunReport>,
}

/// Executes a resolved config.
pub fn execute(config: RunConfig) -> Result<Rendered> {
    let started = Instant::now();
    let kind = config
        .command
        .ok_or_else(|| CliError::usage("config does not name a command"))?;
    let seed = config.seed.unwrap_or(0);
    let format = config.output_format.unwrap_or(OutputFormat::Json);
    let missing = || CliError::usage(format!("config has no [{}] section", kind.name()));
    let mut csv_body = None;
    let outcome = match kind {
        CommandKind::Estimate => {
            commands::estimate(config.estimate.as_ref().ok_or_else(missing)?, seed)?
        }
        CommandKind::Sweep => {
            let (outcome, rows) =
                commands::sweep(config.sweep.as_ref().ok_or_else(missing)?, seed)?;
            if format == OutputFormat::Csv {
                let mut buf = Vec::new();
                commands::write_sweep_csv(&rows, &mut buf)?;
                csv_body = Some(String::from_utf8(buf).expect("csv output is utf-8"));
            }
            outcome
        }
        CommandKind::PulseFit => {
            commands::pulse_fit(config.pulse_fit.as_ref().ok_or_else(missing)?)?
        }
        CommandKind::CalibrateClock => {
            commands::calibrate(config.calibrate_clock.as_ref().ok_or_else(missing)?)?
        }
        CommandKind::Feasibility => {
            commands::feasibility_report(config.feasibility.as_ref().ok_or_else(missing)?)?
        }
    };
    if let Some(body) = csv_body {
        return Ok(Rendered {
            kind,
            format,
            body,
            report: None,
        });
    }
    let report = RunReport {
        config,
        results: outcome.results,
        warnings: outcome.warnings,
        versions: Versions::current(),
        timing: Timing {
            wall_clock_s: started.elapsed().as_secs_f64(),
        },
    };
    Ok(Rendered {
        kind,
        format,
        body: report.to_json(),
        report: Some(report),
    })
}

/// Parses flags, resolves the config and runs it.
pub fn run_cli(cli: Cli) -> Result<(Rendered, Option<String>)> {
    let global = GlobalFlags {
        seed: cli.seed,
        output_path: cli.output,
        output_format: cli.format,
    };
    let (section, file) = match cli.command {
        Command::Estimate(a) => (SectionFlags::Estimate(a), None),
        Command::Sweep(a) => (SectionFlags::Sweep(a), None),
        Command::PulseFit(a) => (SectionFlags::PulseFit(a), None),
        Command::CalibrateClock(a) => (SectionFlags::CalibrateClock(a), None),
        Command::Feasibility(a) => (SectionFlags::Feasibility(a), None),
        Command::Replay { report } => {
            let file = config::load_file(&report)?;
            let kind = file
                .command
                .ok_or_else(|| CliError::usage("report config does not name a command"))?;
            (SectionFlags::empty(kind), Some(file))
        }
    };
    let file = match (file, &cli.config) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "replay takes its config from the report; drop --config",
            ))
        }
        (Some(f), None) => Some(f),
        (None, Some(path)) => Some(config::load_file(path)?),
        (None, None) => None,
    };
    let resolved = config::resolve(global, section, file)?;
    let output = resolved.output_path.clone();
    Ok((execute(resolved)?, output))
}

fn default_output(dir: &Path, r: &Rendered) -> PathBuf {
    dir.join(format!("{}.{}", r.kind.name(), r.format))
}

/// Writes the rendered output to `path`, the env-selected directory, or stdout.
pub fn emit(r: &Rendered, path: Option<&str>) -> Result<Option<PathBuf>> {
    let target = match (path, std::env::var_os(OUTPUT_DIR_ENV)) {
        (Some(p), _) => Some(PathBuf::from(p)),
        (None, Some(dir)) if !dir.is_empty() => Some(default_output(Path::new(&dir), r)),
        _ => None,
    };
    match &target {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
            }
            std::fs::write(p, &r.body)
                .map_err(|e| CliError::io(format!("writing {}", p.display()), e))?;
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(r.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("writing stdout", e))?;
        }
    }
    Ok(target)
}
