//! Frontier estimators.
//!
//! * [`kernel`]: nonnegative kernel expansions whose weights solve a linear
//!   program (optionally with a per-weight cap).
//! * [`fourier`]: trigonometric expansion under a Lipschitz budget, also an LP.
//! * [`partition`]: smoothed per-slice maxima, no optimization involved.

pub mod fourier;
pub mod kernel;
pub mod partition;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frontier::Sample;
use crate::kernel::{Bandwidth, Kernel, KernelFamily};

pub use fourier::{build_fourier_lp, fit_fourier_estimator, FourierFrontierEstimate};
pub use kernel::{
    build_kernel_lp, default_c_alpha, fit_kernel_estimator, fit_modified_estimator,
    fit_modified_estimator_with, solve_kernel_program, Atom, KernelFit, KernelFrontierEstimate,
};
pub use partition::{fit_partition_estimator, PartitionFrontierEstimate, Slice};

/// Relative part of the threshold below which a coefficient counts as zero.
pub const SPARSITY_RELATIVE: f64 = 1e-7;
/// Absolute floor of the sparsity threshold.
pub const SPARSITY_FLOOR: f64 = 1e-12;

/// Threshold for coefficients whose largest magnitude is `max_abs`.
pub fn sparsity_threshold(max_abs: f64) -> f64 {
    (SPARSITY_RELATIVE * max_abs).max(SPARSITY_FLOOR)
}

/// Number of coefficients above the sparsity threshold.
pub fn count_nonzero<I: IntoIterator<Item = f64>>(values: I) -> usize {
    let v: Vec<f64> = values.into_iter().map(f64::abs).collect();
    let max = v.iter().copied().fold(0.0, f64::max);
    let thr = sparsity_threshold(max);
    v.into_iter().filter(|a| *a > thr).count()
}

/// Common interface of fitted frontier estimates.
pub trait FrontierEstimate {
    fn value(&self, x: f64) -> f64;

    /// Abscissas where the estimate may have a kink or a jump in a
    /// derivative. Used as mandatory quadrature nodes.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Number of effective (nonzero) parameters.
    fn parameter_count(&self) -> usize;
}

/// Any fitted estimate.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Kernel(KernelFrontierEstimate),
    Fourier(FourierFrontierEstimate),
    Partition(PartitionFrontierEstimate),
}

impl FrontierEstimate for Estimate {
    fn value(&self, x: f64) -> f64 {
        match self {
            Estimate::Kernel(e) => e.value(x),
            Estimate::Fourier(e) => e.value(x),
            Estimate::Partition(e) => e.value(x),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            Estimate::Kernel(e) => e.breakpoints(),
            Estimate::Fourier(e) => e.breakpoints(),
            Estimate::Partition(e) => e.breakpoints(),
        }
    }

    fn parameter_count(&self) -> usize {
        match self {
            Estimate::Kernel(e) => e.parameter_count(),
            Estimate::Fourier(e) => e.parameter_count(),
            Estimate::Partition(e) => e.parameter_count(),
        }
    }
}

impl From<KernelFrontierEstimate> for Estimate {
    fn from(e: KernelFrontierEstimate) -> Self {
        Estimate::Kernel(e)
    }
}

impl From<FourierFrontierEstimate> for Estimate {
    fn from(e: FourierFrontierEstimate) -> Self {
        Estimate::Fourier(e)
    }
}

impl From<PartitionFrontierEstimate> for Estimate {
    fn from(e: PartitionFrontierEstimate) -> Self {
        Estimate::Partition(e)
    }
}

/// Evaluates any estimate at `x`.
pub fn evaluate_estimate(e: &dyn FrontierEstimate, x: f64) -> f64 {
    e.value(x)
}

/// Number of support vectors (kernel) or nonzero coefficients (Fourier).
pub fn support_vector_count(e: &dyn FrontierEstimate) -> usize {
    e.parameter_count()
}

/// Coverage tolerance used by [`log_likelihood`].
pub const LIKELIHOOD_COVER_TOL: f64 = 1e-9;

/// Log-likelihood of the sample under the uniform law on the region below a
/// kernel estimate: `-N log(sum alpha)` when every point is covered, `-inf`
/// otherwise (also when the total mass is not positive).
pub fn log_likelihood(s: &Sample, e: &KernelFrontierEstimate) -> f64 {
    let mass = e.total_mass();
    if mass.is_nan() || mass <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let covered = s
        .points()
        .iter()
        .all(|p| p.y <= e.value(p.x) + LIKELIHOOD_COVER_TOL);
    if !covered {
        return f64::NEG_INFINITY;
    }
    -(s.len() as f64) * mass.ln()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceRecord {
    pub center: f64,
    pub width: f64,
    pub occupied: bool,
    pub max_y: f64,
}

/// JSON form of an estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum EstimateRecord {
    Kernel {
        kernel: KernelFamily,
        h: f64,
        atoms: Vec<Atom>,
    },
    Modified {
        kernel: KernelFamily,
        h: f64,
        cap: f64,
        atoms: Vec<Atom>,
    },
    Fourier {
        c0: f64,
        a: Vec<f64>,
        b: Vec<f64>,
        #[serde(rename = "M")]
        m: usize,
        #[serde(rename = "L")]
        l: f64,
    },
    Partition {
        kernel: KernelFamily,
        h: f64,
        slices: Vec<SliceRecord>,
    },
}

impl From<&Estimate> for EstimateRecord {
    fn from(e: &Estimate) -> Self {
        match e {
            Estimate::Kernel(k) => {
                let atoms = k.atoms().to_vec();
                let (kernel, h) = (k.kernel().family(), k.bandwidth().get());
                match k.cap() {
                    Some(cap) => EstimateRecord::Modified { kernel, h, cap, atoms },
                    None => EstimateRecord::Kernel { kernel, h, atoms },
                }
            }
            Estimate::Fourier(f) => EstimateRecord::Fourier {
                c0: f.c0(),
                a: f.cosine().to_vec(),
                b: f.sine().to_vec(),
                m: f.harmonics(),
                l: f.lipschitz_budget(),
            },
            Estimate::Partition(p) => EstimateRecord::Partition {
                kernel: p.kernel().family(),
                h: p.bandwidth().get(),
                slices: p
                    .slices()
                    .iter()
                    .map(|s| SliceRecord {
                        center: s.center,
                        width: s.width,
                        occupied: s.max_y.is_some(),
                        max_y: s.max_y.unwrap_or(0.0),
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<EstimateRecord> for Estimate {
    type Error = Error;

    fn try_from(r: EstimateRecord) -> Result<Self> {
        Ok(match r {
            EstimateRecord::Kernel { kernel, h, atoms } => Estimate::Kernel(
                KernelFrontierEstimate::from_atoms(Kernel::new(kernel), Bandwidth::new(h)?, atoms, None)?,
            ),
            EstimateRecord::Modified { kernel, h, cap, atoms } => Estimate::Kernel(
                KernelFrontierEstimate::from_atoms(Kernel::new(kernel), Bandwidth::new(h)?, atoms, Some(cap))?,
            ),
            EstimateRecord::Fourier { c0, a, b, m, l } => {
                if a.len() != m || b.len() != m {
                    return Err(Error::InvalidArgument(format!(
                        "Fourier record declares M = {m} but has {} cosine and {} sine terms",
                        a.len(),
                        b.len()
                    )));
                }
                Estimate::Fourier(FourierFrontierEstimate::new(c0, a, b, l))
            }
            EstimateRecord::Partition { kernel, h, slices } => {
                Estimate::Partition(PartitionFrontierEstimate::from_slices(
                    Kernel::new(kernel),
                    Bandwidth::new(h)?,
                    slices
                        .into_iter()
                        .map(|s| Slice {
                            center: s.center,
                            width: s.width,
                            max_y: s.occupied.then_some(s.max_y),
                        })
                        .collect(),
                ))
            }
        })
    }
}

impl Estimate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&EstimateRecord::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<EstimateRecord>(text)?.try_into()
    }

    /// Writes `x,value` rows on `grid` equally spaced nodes of `[lo, hi]`.
    pub fn write_curve_csv<W: std::io::Write>(&self, w: W, lo: f64, hi: f64, grid: usize) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["x", "value"])?;
        let grid = grid.max(2);
        for i in 0..grid {
            let x = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
            out.serialize((x, self.value(x)))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save_curve(&self, path: impl AsRef<Path>, grid: usize) -> Result<()> {
        self.write_curve_csv(std::fs::File::create(path)?, 0.0, 1.0, grid)
    }
}
