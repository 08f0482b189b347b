//! Baseline estimate from per-slice maxima:
//! `f(x) = sum_r K_h(x - x_r) |I_r| Y*_r` over an equal-width partition of `[0, 1]`.

use crate::error::{invalid, Result};
use crate::frontier::Sample;
use crate::kernel::{Bandwidth, Kernel};

use super::{count_nonzero, FrontierEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slice {
    pub center: f64,
    pub width: f64,
    /// Largest ordinate in the slice; `None` when no point falls in it.
    pub max_y: Option<f64>,
}

impl Slice {
    /// Weight of the slice in the expansion; empty slices contribute zero.
    pub fn coefficient(&self) -> f64 {
        self.max_y.map_or(0.0, |y| self.width * y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionFrontierEstimate {
    kernel: Kernel,
    h: Bandwidth,
    slices: Vec<Slice>,
}

impl PartitionFrontierEstimate {
    pub fn from_slices(kernel: Kernel, h: Bandwidth, slices: Vec<Slice>) -> Self {
        Self { kernel, h, slices }
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.h
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }
}

impl FrontierEstimate for PartitionFrontierEstimate {
    fn value(&self, x: f64) -> f64 {
        self.slices
            .iter()
            .map(|s| self.kernel.eval_scaled(self.h, x - s.center) * s.coefficient())
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        if !self.kernel.has_finite_support() {
            return Vec::new();
        }
        let h = self.h.get();
        self.slices
            .iter()
            .filter(|s| s.max_y.is_some())
            .flat_map(|s| [s.center - h, s.center, s.center + h])
            .collect()
    }

    fn parameter_count(&self) -> usize {
        count_nonzero(self.slices.iter().map(Slice::coefficient))
    }
}

/// Splits `[0, 1]` into `slices` equal intervals and smooths their maxima.
/// Points outside `[0, 1]` are assigned to the nearest end slice.
pub fn fit_partition_estimator(s: &Sample, k: &Kernel, h: Bandwidth, slices: usize) -> Result<PartitionFrontierEstimate> {
    if slices == 0 {
        return invalid("the partition needs at least one slice");
    }
    let width = 1.0 / slices as f64;
    let mut out: Vec<Slice> = (0..slices)
        .map(|r| Slice {
            center: (r as f64 + 0.5) * width,
            width,
            max_y: None,
        })
        .collect();
    for p in s.points() {
        let r = ((p.x * slices as f64).floor().max(0.0) as usize).min(slices - 1);
        let m = out[r].max_y.get_or_insert(p.y);
        *m = m.max(p.y);
    }
    Ok(PartitionFrontierEstimate::from_slices(*k, h, out))
}
