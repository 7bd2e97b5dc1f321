use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use dimer_core::exec::{with_threads, Execution};
use dimer_core::suite::{check_names, run_checks, SuiteConfig};
use dimer_core::sweep::{self, run_figure, run_sweep, FigureGrid, SweepSpec, SweepTable};
use dimer_core::validation::OracleConfig;
use dimer_core::Error;

/// Cross-sections, emission rates and energy transfer of a two-atom system
/// with one incoherently pumped atom.
#[derive(Debug, Parser)]
#[command(name = "dimer-response", version)]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true, env = "DIMER_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a one-dimensional sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-sections against detuning at k0R = 2 for P = 0, 1.2, 7.5.
    Fig3 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Cross-sections against pump rate at resonance, k0R = 2.
    Fig4 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Cross-sections against k0R at resonance for P = 0, 1.2, 7.5.
    Fig5 {
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run the validation checks.
    Validate {
        /// Write one JSON object per check and per power comparison.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Only run checks whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Relative tolerance of the power quadrature check.
        #[arg(long)]
        oracle_tolerance: Option<f64>,
    },
}

const EXIT_VALIDATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NonFinite { .. }
            | Error::NonConvergence { .. }
            | Error::Domain(_)
            | Error::StepTooLarge { .. }
            | Error::ObservationTooShort(_),
        ) => EXIT_NUMERIC,
        _ => EXIT_CONFIG,
    }
}

fn write_table(table: &SweepTable, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run_figures(grids: Vec<FigureGrid>, out_dir: &Path, exec: Execution) -> Result<()> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    for g in grids {
        let table = run_figure(&g, exec)?;
        let path = out_dir.join(format!("{}.csv", g.stem));
        write_table(&table, &path)?;
        for n in &table.notes {
            println!("note: {n}");
        }
        println!("wrote {} ({} rows)", path.display(), table.rows.len());
    }
    Ok(())
}

fn validate(json: Option<&Path>, filter: Option<&str>, tolerance: Option<f64>, exec: Execution) -> Result<bool> {
    if let Some(f) = filter {
        if !check_names().iter().any(|n| n.contains(f)) {
            anyhow::bail!("no check matches `{f}`; available: {}", check_names().join(", "));
        }
    }
    let mut oracle = OracleConfig::default();
    if let Some(t) = tolerance {
        anyhow::ensure!(t.is_finite() && t >= 0.0, "oracle tolerance must be finite and >= 0");
        oracle.tolerance = t;
    }
    let outcomes = run_checks(filter, &SuiteConfig { oracle, exec });

    let mut sink = match json {
        Some(p) => Some(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => None,
    };
    let mut all = true;
    for o in &outcomes {
        all &= o.passed;
        println!("{} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.check, o.detail);
        if let Some(w) = sink.as_mut() {
            for r in &o.reports {
                writeln!(w, "{}", serde_json::to_string(r)?)?;
            }
            let mut line = serde_json::to_value(o)?;
            if let Some(obj) = line.as_object_mut() {
                obj.remove("reports");
            }
            writeln!(w, "{line}")?;
        }
    }
    if let Some(mut w) = sink {
        w.flush()?;
    }
    if !all {
        let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed).map(|o| o.check).collect();
        eprintln!("failed checks: {}", failed.join(", "));
    }
    Ok(all)
}

fn run(cli: Cli) -> Result<u8> {
    let exec = Execution::Parallel;
    match cli.command {
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let spec = SweepSpec::from_json(&text).with_context(|| format!("parsing {}", config.display()))?;
            let table = run_sweep(&spec, exec)?;
            for w in &table.warnings {
                log::warn!("{w}");
            }
            write_table(&table, &out)?;
        }
        Command::Fig3 { out_dir } => run_figures(sweep::fig3(), &out_dir, exec)?,
        Command::Fig4 { out_dir } => run_figures(sweep::fig4(), &out_dir, exec)?,
        Command::Fig5 { out_dir } => run_figures(sweep::fig5(), &out_dir, exec)?,
        Command::Validate { json, filter, oracle_tolerance } => {
            if !validate(json.as_deref(), filter.as_deref(), oracle_tolerance, exec)? {
                return Ok(EXIT_VALIDATION);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(EXIT_CONFIG);
    }
    let threads = cli.threads;
    match with_threads(threads, || run(cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
