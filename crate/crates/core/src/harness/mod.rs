//! Monte Carlo replication of the error tables and convergence-rate runs.
//!
//! Replication `r` always draws its sample from `derive_seed(master_seed, r)`
//! and results are aggregated in replication order, so reports do not depend
//! on how many threads ran them.

mod rates;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::estimators::{
    default_c_alpha, fit_fourier_estimator, fit_kernel_estimator, fit_modified_estimator_with,
    fit_partition_estimator, Estimate, FrontierEstimate,
};
use crate::frontier::{derive_seed, sample_support, FrontierFunction, Sample};
use crate::kernel::{Bandwidth, Kernel, KernelFamily};
use crate::metrics::{l1_error, DEFAULT_GRID};

pub use rates::{ls_slope, rate_experiment, HRule, RateCell, RateEstimator, RateExperiment, RateSpec};
pub use table::{format_table, TableRow};

/// Environment variable capping the worker threads used for replications.
pub const THREADS_ENV: &str = "FRONTIER_LP_THREADS";

/// Which estimator a simulation fits, with its tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EstimatorSpec {
    Kernel {
        h: f64,
    },
    Modified {
        h: f64,
        /// `None` uses `2 max_i Y_i` per replication.
        #[serde(rename = "C_alpha", default)]
        c_alpha: Option<f64>,
        #[serde(default)]
        allow_infinite_support: bool,
    },
    Fourier {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "M")]
        m: usize,
    },
    Partition {
        h: f64,
        slices: usize,
    },
}

impl EstimatorSpec {
    pub fn label(&self) -> &'static str {
        match self {
            EstimatorSpec::Kernel { .. } => "kernel",
            EstimatorSpec::Modified { .. } => "modified",
            EstimatorSpec::Fourier { .. } => "Fourier",
            EstimatorSpec::Partition { .. } => "partition",
        }
    }

    /// Fits the estimator described by `self` to `s`.
    pub fn fit(&self, s: &Sample, kernel: &Kernel) -> Result<Estimate> {
        Ok(match *self {
            EstimatorSpec::Kernel { h } => fit_kernel_estimator(s, kernel, Bandwidth::new(h)?)?.into(),
            EstimatorSpec::Modified {
                h,
                c_alpha,
                allow_infinite_support,
            } => {
                let c = c_alpha.unwrap_or_else(|| default_c_alpha(s));
                fit_modified_estimator_with(s, kernel, Bandwidth::new(h)?, c, allow_infinite_support)?.into()
            }
            EstimatorSpec::Fourier { l, m } => fit_fourier_estimator(s, m, l)?.into(),
            EstimatorSpec::Partition { h, slices } => {
                fit_partition_estimator(s, kernel, Bandwidth::new(h)?, slices)?.into()
            }
        })
    }
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

fn default_replications() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// True frontier; the benchmark frontier when omitted.
    #[serde(default = "FrontierFunction::benchmark")]
    pub frontier: FrontierFunction,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub estimator: EstimatorSpec,
    #[serde(default)]
    pub kernel: KernelFamily,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

impl SimulationConfig {
    pub fn new(n: usize, replications: usize, estimator: EstimatorSpec) -> Self {
        Self {
            frontier: FrontierFunction::benchmark(),
            n,
            replications,
            estimator,
            kernel: KernelFamily::default(),
            master_seed: 0,
            grid: DEFAULT_GRID,
        }
    }

    pub fn with_kernel(mut self, kernel: KernelFamily) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid("N must be at least 1");
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        Ok(())
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationResult {
    pub delta: f64,
    pub np: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub successes: usize,
    /// Replications whose fit failed (e.g. an infeasible capped program).
    /// They are excluded from the moments.
    pub failures: usize,
    pub mean_delta: f64,
    pub std_delta: f64,
    pub mean_np: f64,
    pub std_np: f64,
    /// Divisor used for the standard deviations. A single success reports 0.
    pub std_divisor: String,
    /// Rule used for `C_alpha` when the configuration leaves it unset.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub c_alpha_rule: Option<String>,
}

impl SimulationReport {
    pub fn table_row(&self) -> TableRow {
        TableRow::from_report(self)
    }
}

/// Mean and sample standard deviation (divisor `n - 1`, zero for `n = 1`).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Samples, fits and scores one replication.
pub fn run_replication(cfg: &SimulationConfig, index: u64) -> Result<ReplicationResult> {
    let seed = derive_seed(cfg.master_seed, index);
    replicate_with_seed(&cfg.frontier, cfg.n, &cfg.estimator, cfg.kernel, cfg.grid, seed)
}

pub(crate) fn replicate_with_seed(
    frontier: &FrontierFunction,
    n: usize,
    spec: &EstimatorSpec,
    kernel: KernelFamily,
    grid: usize,
    seed: u64,
) -> Result<ReplicationResult> {
    let s = sample_support(frontier, n, seed)?;
    let e = spec.fit(&s, &Kernel::new(kernel))?;
    Ok(ReplicationResult {
        delta: l1_error(&e, frontier, grid)?,
        np: e.parameter_count(),
    })
}

/// Runs `f(0..count)` on a pool capped by [`THREADS_ENV`], returning results
/// in index order.
pub(crate) fn parallel_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0);
    let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
    match threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    }
}

pub fn run_replications(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let results = parallel_map(cfg.replications, |r| run_replication(cfg, r as u64));
    summarize(cfg, results)
}

fn summarize(cfg: &SimulationConfig, results: Vec<Result<ReplicationResult>>) -> Result<SimulationReport> {
    let mut deltas = Vec::with_capacity(results.len());
    let mut nps = Vec::with_capacity(results.len());
    let mut failures = 0;
    let mut last_error = None;
    for r in results {
        match r {
            Ok(r) => {
                deltas.push(r.delta);
                nps.push(r.np as f64);
            }
            Err(e) if e.is_numerical() => {
                failures += 1;
                last_error = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    if deltas.is_empty() {
        return Err(Error::Infeasible(format!(
            "all {} replications failed; last error: {}",
            failures,
            last_error.map_or_else(String::new, |e| e.to_string())
        )));
    }
    let (mean_delta, std_delta) = mean_std(&deltas);
    let (mean_np, std_np) = mean_std(&nps);
    let c_alpha_rule = match cfg.estimator {
        EstimatorSpec::Modified { c_alpha: None, .. } => Some("2 * max(Y)".to_string()),
        _ => None,
    };
    Ok(SimulationReport {
        config: cfg.clone(),
        successes: deltas.len(),
        failures,
        mean_delta,
        std_delta,
        mean_np,
        std_np,
        std_divisor: "R-1".into(),
        c_alpha_rule,
    })
}
