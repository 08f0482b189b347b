//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on numerical
//! failures such as an infeasible capped program.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimators::{build_fourier_lp, build_kernel_lp, default_c_alpha, Estimate};
use crate::frontier::{sample_support, FrontierFunction, Sample};
use crate::harness::{format_table, rate_experiment, run_replications, RateSpec, SimulationConfig};
use crate::kernel::{validate_kernel, Bandwidth, Kernel, KernelFamily};

#[derive(Debug, Parser)]
#[command(name = "frontier-lp", version, about = "Frontier estimation by linear programming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit an estimate to a sample CSV and write it as JSON plus a curve CSV.
    Estimate(EstimateArgs),
    /// Run Monte Carlo replications described by a JSON config.
    Simulate(SimulateArgs),
    /// Run a convergence-rate experiment described by a JSON config.
    Rates(RatesArgs),
    /// Check a kernel against the symmetry, normalization, Lipschitz and moment assumptions.
    ValidateKernel(ValidateArgs),
    /// Draw a uniform sample below a frontier and write it as CSV.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EstimatorKind {
    Kernel,
    Modified,
    Fourier,
    Partition,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "kernel")]
    estimator: EstimatorKind,
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    #[arg(long)]
    h: Option<f64>,
    /// Weight cap constant for the modified estimator (default: 2 max Y).
    #[arg(long = "C-alpha")]
    c_alpha: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long)]
    slices: Option<usize>,
    /// Estimate JSON path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Curve CSV path; defaults to the output path with a `.csv` extension.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Number of curve nodes on [0, 1].
    #[arg(long, default_value_t = 1001)]
    grid: usize,
    /// Write the linear program in plain text before solving.
    #[arg(long = "dump-lp")]
    dump_lp: Option<PathBuf>,
    /// Let the modified estimator use the gaussian kernel.
    #[arg(long)]
    allow_infinite_support: bool,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    kernel: Option<String>,
}

#[derive(Debug, Args)]
struct RatesArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, default_value = "epanechnikov")]
    kernel: String,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long = "N", alias = "n")]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Frontier CSV (`knot_x,knot_v`); the benchmark frontier when omitted.
    #[arg(long)]
    frontier: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with_io(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// As [`run_cli`] with explicit output streams.
pub fn run_with_io<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Estimate(a) => estimate(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Rates(a) => rates(a, out),
        Command::ValidateKernel(a) => validate(a, out),
        Command::Sample(a) => sample(a, out),
    }
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn require<T>(v: Option<T>, flag: &str, estimator: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required for the {estimator} estimator")))
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let s = Sample::load(&a.input)?;
    let kernel = Kernel::new(a.kernel.parse::<KernelFamily>()?);

    if let Some(path) = &a.dump_lp {
        let lp = match a.estimator {
            EstimatorKind::Kernel => Some(build_kernel_lp(&s, &kernel, Bandwidth::new(require(a.h, "h", "kernel")?)?, None)?),
            EstimatorKind::Modified => {
                let c = a.c_alpha.unwrap_or_else(|| default_c_alpha(&s));
                let h = Bandwidth::new(require(a.h, "h", "modified")?)?;
                Some(build_kernel_lp(&s, &kernel, h, Some(c / s.len().max(1) as f64))?)
            }
            EstimatorKind::Fourier => Some(build_fourier_lp(&s, require(a.m, "M", "Fourier")?, require(a.l, "L", "Fourier")?)?),
            EstimatorKind::Partition => None,
        };
        match lp {
            Some(lp) => std::fs::write(path, lp.to_text())?,
            None => return Err(Error::InvalidArgument("the partition estimator solves no linear program".into())),
        }
    }

    let spec = match a.estimator {
        EstimatorKind::Kernel => crate::harness::EstimatorSpec::Kernel {
            h: require(a.h, "h", "kernel")?,
        },
        EstimatorKind::Modified => crate::harness::EstimatorSpec::Modified {
            h: require(a.h, "h", "modified")?,
            c_alpha: a.c_alpha,
            allow_infinite_support: a.allow_infinite_support,
        },
        EstimatorKind::Fourier => crate::harness::EstimatorSpec::Fourier {
            l: require(a.l, "L", "Fourier")?,
            m: require(a.m, "M", "Fourier")?,
        },
        EstimatorKind::Partition => crate::harness::EstimatorSpec::Partition {
            h: require(a.h, "h", "partition")?,
            slices: require(a.slices, "slices", "partition")?,
        },
    };
    let estimate: Estimate = spec.fit(&s, &kernel)?;
    emit(&estimate.to_json()?, a.output.as_deref(), out)?;

    let curve = a
        .curve
        .clone()
        .or_else(|| a.output.as_ref().map(|p| p.with_extension("csv")));
    if let Some(path) = curve {
        estimate.save_curve(path, a.grid)?;
    }
    Ok(())
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg: SimulationConfig = serde_json::from_str(&std::fs::read_to_string(&a.config)?)?;
    if let Some(r) = a.reps {
        cfg.replications = r;
    }
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    if let Some(g) = a.grid {
        cfg.grid = g;
    }
    if let Some(k) = a.kernel {
        cfg.kernel = k.parse()?;
    }
    let report = run_replications(&cfg)?;
    write!(out, "{}", format_table(&[report.table_row()]))?;
    if report.failures > 0 {
        writeln!(out, "({} of {} replications failed and were excluded)", report.failures, cfg.replications)?;
    }
    if let Some(path) = a.output {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

fn rates(a: RatesArgs, out: &mut dyn Write) -> Result<()> {
    let mut spec: RateSpec = serde_json::from_str(&std::fs::read_to_string(&a.config)?)?;
    if let Some(r) = a.reps {
        spec.replications = r;
    }
    if let Some(s) = a.seed {
        spec.master_seed = s;
    }
    if let Some(g) = a.grid {
        spec.grid = g;
    }
    let exp = rate_experiment(&spec)?;
    writeln!(out, "{:>6} {:>8} {:>10} {:>12} {:>10} {:>8}", "N", "h", "schedule", "mean(Δ_N)", "st-dev", "failed")?;
    for c in &exp.cells {
        writeln!(
            out,
            "{:>6} {:>8.4} {:>10.4} {:>12.4} {:>10.4} {:>8}",
            c.n, c.h, c.schedule, c.mean_error, c.std_error, c.failures
        )?;
    }
    writeln!(out, "slope {:.3}, inversions {}", exp.slope, exp.inversions)?;
    if let Some(path) = a.output {
        std::fs::write(path, serde_json::to_string_pretty(&exp)?)?;
    }
    Ok(())
}

fn validate(a: ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let kernel = Kernel::new(a.kernel.parse::<KernelFamily>()?);
    let report = validate_kernel(&kernel);
    emit(&serde_json::to_string_pretty(&report)?, a.output.as_deref(), out)
}

fn sample(a: SampleArgs, out: &mut dyn Write) -> Result<()> {
    let f = match &a.frontier {
        Some(p) => FrontierFunction::load(p)?,
        None => FrontierFunction::benchmark(),
    };
    let s = sample_support(&f, a.n, a.seed)?;
    match &a.output {
        Some(p) => s.write_csv(std::fs::File::create(p)?)?,
        None => s.write_csv(out)?,
    }
    Ok(())
}
