//! Command-line front end: `run`, `verify` and `plotdata`.
//!
//! Exit codes: `0` success, `1` bad usage or an invalid scenario, `2` a
//! runtime failure (divergence, failed identity), `3` file-system trouble.
//! Human-readable text goes to stdout; results go to files only.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::metrics::{
    consensus_metrics, verification_report, write_metrics_csv, METRICS_FILE, REPORT_FILE,
};
use crate::harness::log::{LogError, TrajectoryLog};
use crate::harness::scenario::{Scenario, ScenarioError};
use crate::harness::sim::{read_run, run, write_run, SimError};
use crate::harness::builtin::{builtin_case, DEFAULT_HORIZON};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Longest run that `verify` accepts.
pub const VERIFY_MAX_STEPS: u64 = 200_000;

pub const INPUTS_FILE: &str = "inputs.csv";
pub const OUTPUTS_FILE: &str = "outputs.csv";

/// Every `k` up to this value is kept by `plotdata`; beyond it samples are
/// spaced geometrically.
const PLOT_DENSE_UNTIL: u64 = 100;
const PLOT_RATIO: f64 = 1.01;

#[derive(Debug, Parser)]
#[command(name = "hwconsensus", version, about = "Consensus of networked Hammerstein/Wiener agents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a built-in case or a scenario file and write its log.
    Run(RunArgs),
    /// Check the exact identities on a stride-1 log.
    Verify(LogArgs),
    /// Write geometrically downsampled input and output series.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in reference case.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), conflicts_with = "scenario", required_unless_present = "scenario")]
    case: Option<u8>,
    /// Scenario JSON file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Master noise seed (defaults to the scenario's own seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of steps K.
    #[arg(long)]
    horizon: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Replace the noise distribution by zero.
    #[arg(long)]
    noise_off: bool,
}

#[derive(Debug, Args)]
struct LogArgs {
    /// Directory written by `run`.
    #[arg(long)]
    log: PathBuf,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long)]
    log: PathBuf,
    /// Where to put the CSVs (defaults to the log directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Verify(a) => cmd_verify(&a.log),
        Command::Plotdata(a) => cmd_plotdata(&a.log, a.out.as_deref().unwrap_or(&a.log)),
    }
}

fn fail(code: i32, what: impl Display) -> i32 {
    eprintln!("error: {what}");
    code
}

fn scenario_code(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn sim_code(e: &SimError) -> i32 {
    match e {
        SimError::Validation(s) => scenario_code(s),
        SimError::NonFinite { .. } | SimError::NoSeeds => EXIT_RUNTIME,
        SimError::Log(_) => EXIT_IO,
    }
}

fn cmd_run(args: &RunArgs) -> i32 {
    let scenario = match (args.case, &args.scenario) {
        (Some(case), _) => builtin_case(case),
        (None, Some(path)) => Scenario::load(path),
        (None, None) => unreachable!("clap requires one of --case or --scenario"),
    };
    let mut scenario = match scenario {
        Ok(s) => s,
        Err(e) => return fail(scenario_code(&e), e),
    };
    if let Some(k) = args.horizon {
        scenario.horizon = k;
    }
    if args.noise_off {
        scenario = scenario.noise_free();
    }
    if scenario.horizon > DEFAULT_HORIZON && scenario.log_stride == 1 {
        // keep roughly DEFAULT_HORIZON rows in memory and on disk
        scenario.log_stride = scenario.horizon.div_ceil(DEFAULT_HORIZON);
        println!(
            "note: horizon {} exceeds {DEFAULT_HORIZON}; logging every {} steps (verify will refuse this log)",
            scenario.horizon, scenario.log_stride
        );
    }
    match scenario.validate(true) {
        Ok(_) => {}
        Err(e) => return fail(scenario_code(&e), e),
    }
    let seed = args.seed.unwrap_or(scenario.noise.master_seed);
    let result = match run(&scenario, seed) {
        Ok(r) => r,
        Err(e) => {
            let code = sim_code(&e);
            if let SimError::NonFinite { partial, .. } = &e {
                if write_partial(partial, &args.out).is_ok() {
                    eprintln!("partial log written to {}", args.out.display());
                }
            }
            return fail(code, e);
        }
    };
    if let Err(e) = write_run(&args.out, &scenario, &result) {
        return fail(EXIT_IO, e);
    }
    let s = &result.summary;
    println!("{} (seed {}), K = {}", s.label, s.seed, s.steps);
    println!("  final output spread   {:.3e}", s.final_spread);
    println!("  final residual ‖Lh‖∞  {:.3e}", s.final_residual);
    println!("  truncations σ̄          {}", s.sigma_bar_final);
    println!("  log written to         {}", args.out.display());
    EXIT_OK
}

fn write_partial(log: &TrajectoryLog, dir: &Path) -> Result<(), LogError> {
    std::fs::create_dir_all(dir)?;
    log.write_csv(dir)
}

fn load_log(dir: &Path) -> Result<(Scenario, TrajectoryLog), i32> {
    read_run(dir).map_err(|e| {
        let code = match &e {
            SimError::Log(_) => EXIT_IO,
            other => sim_code(other),
        };
        fail(code, format!("cannot read log in {}: {e}", dir.display()))
    })
}

fn cmd_verify(dir: &Path) -> i32 {
    let (scenario, log) = match load_log(dir) {
        Ok(x) => x,
        Err(code) => return code,
    };
    if log.stride != 1 || !log.is_contiguous() {
        return fail(EXIT_USAGE, "verification requires stride 1");
    }
    if log.len() as u64 > VERIFY_MAX_STEPS {
        return fail(EXIT_USAGE, format!("verification is capped at K = {VERIFY_MAX_STEPS}"));
    }
    let gains = match scenario.gains() {
        Ok(g) => g,
        Err(e) => return fail(EXIT_USAGE, e),
    };
    let report = match verification_report(&log, &gains, &scenario.topology) {
        Ok(r) => r,
        Err(e) => return fail(EXIT_RUNTIME, e),
    };
    let mark = |ok: bool| if ok { "PASS" } else { "FAIL" };
    println!("{:<34} {:>12}  result", "identity", "value");
    println!(
        "{:<34} {:>12.3e}  {}",
        "centralized recursion residual",
        report.centralized_residual,
        mark(report.centralized_pass)
    );
    println!(
        "{:<34} {:>12}  {}",
        format!("catch-up lag (diameter {})", report.diameter),
        report.max_catch_up_lag,
        mark(report.diameter_bound_ok)
    );
    println!("{:<34} {:>12}  {}", "step-size window bounds", "-", mark(report.window_bound_ok));
    println!(
        "{:<34} {:>12.3e}  {}",
        "noise decomposition max error",
        report.decomposition_max_err,
        mark(report.decomposition_max_err < 1e-10)
    );
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Err(e) = std::fs::write(dir.join(REPORT_FILE), json) {
        return fail(EXIT_IO, e);
    }
    match consensus_metrics(&log, &gains, &scenario.topology.laplacian()) {
        Ok(rows) => {
            if let Err(e) = write_metrics_csv(&dir.join(METRICS_FILE), &rows) {
                return fail(EXIT_IO, e);
            }
        }
        Err(e) => return fail(EXIT_RUNTIME, e),
    }
    if report.pass() {
        EXIT_OK
    } else {
        EXIT_RUNTIME
    }
}

/// Row indices to plot: dense at the start, then spaced by a constant ratio.
pub fn geometric_rows(steps: &[u64]) -> Vec<usize> {
    let mut rows = Vec::new();
    let Some(&last) = steps.last() else { return rows };
    let mut target = 1.0f64;
    loop {
        let k = target.round() as u64;
        let row = steps.partition_point(|&s| s < k);
        if row >= steps.len() {
            break;
        }
        if rows.last() != Some(&row) {
            rows.push(row);
        }
        target = if k < PLOT_DENSE_UNTIL { (k + 1) as f64 } else { target * PLOT_RATIO };
    }
    let final_row = steps.len() - 1;
    if rows.last() != Some(&final_row) && steps[final_row] == last {
        rows.push(final_row);
    }
    rows
}

fn write_series(
    path: &Path,
    log: &TrajectoryLog,
    rows: &[usize],
    prefix: &str,
    value: impl Fn(&crate::harness::log::AgentRecord) -> f64,
    k_offset: u64,
) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(w, "k")?;
    for i in 1..=log.agent_count() {
        write!(w, ",{prefix}{i}")?;
    }
    writeln!(w)?;
    for &row in rows {
        write!(w, "{}", log.step_at(row) + k_offset)?;
        for a in log.agents_at(row) {
            write!(w, ",{}", value(a))?;
        }
        writeln!(w)?;
    }
    w.flush()
}

fn cmd_plotdata(dir: &Path, out: &Path) -> i32 {
    let (_, log) = match load_log(dir) {
        Ok(x) => x,
        Err(code) => return code,
    };
    if log.is_empty() {
        return fail(EXIT_IO, format!("log in {} has no rows", dir.display()));
    }
    let rows = geometric_rows(log.steps());
    let written = std::fs::create_dir_all(out)
        .and_then(|_| write_series(&out.join(INPUTS_FILE), &log, &rows, "u", |a| a.u, 0))
        // row k carries y_{k+1}
        .and_then(|_| write_series(&out.join(OUTPUTS_FILE), &log, &rows, "y", |a| a.y_next, 1));
    if let Err(e) = written {
        return fail(EXIT_IO, e);
    }
    println!(
        "wrote {} and {} ({} points, {} series each) to {}",
        INPUTS_FILE,
        OUTPUTS_FILE,
        rows.len(),
        log.agent_count(),
        out.display()
    );
    EXIT_OK
}
