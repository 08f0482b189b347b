//! Convergence-rate experiments: mean L1 error over a grid of sample sizes
//! with the bandwidth following a schedule in `N`, and the log-log slope of
//! that error against the rate the schedule is expected to deliver.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::frontier::{derive_seed, FrontierFunction};
use crate::kernel::KernelFamily;
use crate::metrics::DEFAULT_GRID;

use super::{mean_std, parallel_map, replicate_with_seed, EstimatorSpec};

/// Bandwidth schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HRule {
    /// `h = (log N / N)^(1/4)`, the best rate for the uncapped estimator.
    Quarter,
    /// `h = (log N / N)^(1/3)`, the best rate for the capped estimator.
    Third,
    Fixed(f64),
}

impl HRule {
    pub fn bandwidth(&self, n: usize) -> f64 {
        let r = (n as f64).ln() / n as f64;
        match *self {
            HRule::Quarter => r.powf(0.25),
            HRule::Third => r.powf(1.0 / 3.0),
            HRule::Fixed(h) => h,
        }
    }

    /// Error rate expected at `N`. For the power rules this is
    /// `(log N / N)^exponent`; for a fixed bandwidth it is
    /// `max(h, sqrt(log N / (N h^p)))` with `p = 1` for the capped estimator
    /// and `p = 2` otherwise.
    pub fn schedule(&self, n: usize, capped: bool) -> f64 {
        let r = (n as f64).ln() / n as f64;
        match *self {
            HRule::Quarter => r.powf(0.25),
            HRule::Third => r.powf(1.0 / 3.0),
            HRule::Fixed(h) => {
                let p = if capped { 1 } else { 2 };
                h.max((r / h.powi(p)).sqrt())
            }
        }
    }
}

/// Which estimator a rate experiment runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RateEstimator {
    Kernel,
    Modified {
        #[serde(rename = "C_alpha", default)]
        c_alpha: Option<f64>,
    },
}

fn default_grid() -> usize {
    DEFAULT_GRID
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSpec {
    #[serde(default = "FrontierFunction::benchmark")]
    pub frontier: FrontierFunction,
    pub n_grid: Vec<usize>,
    pub h_rule: HRule,
    pub estimator: RateEstimator,
    #[serde(default)]
    pub kernel: KernelFamily,
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCell {
    #[serde(rename = "N")]
    pub n: usize,
    pub h: f64,
    pub schedule: f64,
    pub mean_error: f64,
    pub std_error: f64,
    pub successes: usize,
    pub failures: usize,
}

impl RateCell {
    pub fn failed(&self) -> bool {
        self.successes == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateExperiment {
    pub spec: RateSpec,
    pub cells: Vec<RateCell>,
    /// Least-squares slope of `log(mean error)` against `log(schedule)` over non-failed cells.
    pub slope: f64,
    /// Adjacent pairs where the mean error increased with `N`.
    pub inversions: usize,
}

impl RateSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.len() < 3 {
            return invalid("a rate experiment needs at least three sample sizes");
        }
        if self.n_grid.windows(2).any(|w| w[1] <= w[0]) || self.n_grid[0] < 2 {
            return invalid("sample sizes must be strictly increasing and at least 2");
        }
        if self.replications == 0 {
            return invalid("replications must be at least 1");
        }
        Ok(())
    }

    fn capped(&self) -> bool {
        matches!(self.estimator, RateEstimator::Modified { .. })
    }

    fn estimator_at(&self, h: f64) -> EstimatorSpec {
        match self.estimator {
            RateEstimator::Kernel => EstimatorSpec::Kernel { h },
            RateEstimator::Modified { c_alpha } => EstimatorSpec::Modified {
                h,
                c_alpha,
                allow_infinite_support: false,
            },
        }
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn rate_experiment(spec: &RateSpec) -> Result<RateExperiment> {
    spec.validate()?;
    let mut cells = Vec::with_capacity(spec.n_grid.len());
    for &n in &spec.n_grid {
        let h = spec.h_rule.bandwidth(n);
        let est = spec.estimator_at(h);
        let cell_seed = derive_seed(spec.master_seed, n as u64);
        let results = parallel_map(spec.replications, |r| {
            replicate_with_seed(&spec.frontier, n, &est, spec.kernel, spec.grid, derive_seed(cell_seed, r as u64))
        });
        let mut errors = Vec::new();
        let mut failures = 0;
        for r in results {
            match r {
                Ok(r) => errors.push(r.delta),
                Err(e) if e.is_numerical() => failures += 1,
                Err(e) => return Err(e),
            }
        }
        let (mean_error, std_error) = mean_std(&errors);
        cells.push(RateCell {
            n,
            h,
            schedule: spec.h_rule.schedule(n, spec.capped()),
            mean_error,
            std_error,
            successes: errors.len(),
            failures,
        });
    }
    let ok: Vec<&RateCell> = cells.iter().filter(|c| !c.failed()).collect();
    let slope = if ok.len() >= 2 {
        let x: Vec<f64> = ok.iter().map(|c| c.schedule.ln()).collect();
        let y: Vec<f64> = ok.iter().map(|c| c.mean_error.ln()).collect();
        ls_slope(&x, &y)
    } else {
        f64::NAN
    };
    let inversions = ok.windows(2).filter(|w| w[1].mean_error > w[0].mean_error).count();
    Ok(RateExperiment {
        spec: spec.clone(),
        cells,
        slope,
        inversions,
    })
}
