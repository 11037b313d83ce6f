//! Command line front end with SAT Competition output conventions.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::error::ErrorKind;
use clap::Parser;

use super::record::{emit_csv, RunRecord};
use crate::cdcl::SolveStatus;
use crate::exchange::ExportFilter;
use crate::formula::parse_dimacs;
use crate::portfolio::{self, default_workers, PortfolioConfig};
use crate::strategy::LcmMode;

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;
pub const EXIT_UNKNOWN: i32 = 0;
pub const EXIT_ERROR: i32 = 1;

#[derive(Parser, Debug)]
#[command(name = "vivipar", version, about = "Parallel portfolio SAT solver")]
struct Args {
    /// DIMACS CNF input, or "-" for standard input.
    input: PathBuf,
    /// Learned clause minimization strategy.
    #[arg(long, default_value = "none", value_parser = ["none", "pcm", "lpcm", "ecm"])]
    lcm: String,
    /// LBD bound of clauses withheld by ECM.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    ecm_max_lbd: u32,
    /// Number of workers (defaults to the core count, at most 34).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,
    #[arg(long, env = "VIVIPAR_SEED", default_value_t = 0)]
    seed: u64,
    /// Single-threaded, reproducible scheduling.
    #[arg(long)]
    deterministic: bool,
    /// Wall clock limit in seconds; 0 disables it.
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    /// Write a statistics CSV with one row for this run.
    #[arg(long)]
    stats_csv: Option<PathBuf>,
    /// Largest LBD of exported clauses.
    #[arg(long, default_value_t = 4)]
    export_max_lbd: u32,
}

/// Runs the solver with process arguments `argv` (including the program name)
/// and returns the exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`cli_main`] with explicit output streams.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return EXIT_UNKNOWN;
        }
        Err(e) => {
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    match solve(&args, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "c error: {msg}");
            EXIT_ERROR
        }
    }
}

fn read_input(path: &Path) -> std::io::Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        std::fs::read(path)
    }
}

fn solve(args: &Args, out: &mut dyn Write) -> Result<i32, String> {
    if !(args.time_limit >= 0.0 && args.time_limit.is_finite()) {
        return Err(format!("invalid time limit {}", args.time_limit));
    }
    let mode = LcmMode::from_name(&args.lcm, args.ecm_max_lbd)?;
    let shown = args.input.display();
    let bytes = read_input(&args.input).map_err(|e| format!("{shown}: {e}"))?;
    let formula = parse_dimacs(&bytes).map_err(|e| match e.line() {
        Some(line) => format!("{shown}:{line}: {e}"),
        None => format!("{shown}: {e}"),
    })?;

    let config = PortfolioConfig {
        num_workers: args.threads.map_or_else(default_workers, |t| t as usize),
        seed: args.seed,
        lcm_mode: mode,
        export_filter: ExportFilter {
            max_lbd: args.export_max_lbd,
            ..ExportFilter::default()
        },
        time_limit: (args.time_limit > 0.0).then(|| Duration::from_secs_f64(args.time_limit)),
        deterministic: args.deterministic,
        ..PortfolioConfig::default()
    };
    let result = portfolio::run(&formula, &config).map_err(|e| e.to_string())?;

    let total = result.total_stats();
    writeln!(
        out,
        "c workers {} mode {} conflicts {} vivify_prop_pct {:.2} success_rate {:.2}",
        config.num_workers,
        mode,
        total.conflicts,
        total.vivify_prop_pct(),
        total.success_rate()
    )
    .map_err(|e| e.to_string())?;

    if let Some(path) = &args.stats_csv {
        let instance = args
            .input
            .file_name()
            .map_or_else(|| shown.to_string(), |n| n.to_string_lossy().into_owned());
        let record = RunRecord {
            instance,
            mode: mode.to_string(),
            workers: config.num_workers,
            status: result.status.label().to_string(),
            wall_seconds: (!config.deterministic).then_some(result.wall_time.as_secs_f64()),
            stats: total,
        };
        emit_csv(&[record], path).map_err(|e| format!("{}: {e}", path.display()))?;
    }

    let code = match &result.status {
        SolveStatus::Sat(model) => {
            write_model(out, model).map_err(|e| e.to_string())?;
            EXIT_SAT
        }
        SolveStatus::Unsat => {
            writeln!(out, "s UNSATISFIABLE").map_err(|e| e.to_string())?;
            EXIT_UNSAT
        }
        SolveStatus::Unknown => {
            writeln!(out, "s UNKNOWN").map_err(|e| e.to_string())?;
            EXIT_UNKNOWN
        }
    };
    Ok(code)
}

fn write_model(out: &mut dyn Write, model: &[bool]) -> std::io::Result<()> {
    writeln!(out, "s SATISFIABLE")?;
    let lits: Vec<String> = model
        .iter()
        .enumerate()
        .map(|(i, &v)| if v { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect();
    for chunk in lits.chunks(10) {
        writeln!(out, "v {}", chunk.join(" "))?;
    }
    writeln!(out, "v 0")
}
