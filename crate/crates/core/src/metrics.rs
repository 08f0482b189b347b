//! Error functionals and coverage audits.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::estimators::{FrontierEstimate, KernelFrontierEstimate};
use crate::frontier::{FrontierFunction, Sample};
use crate::quad::{merged_grid, trapezoid_on};

/// Default number of uniform nodes for the L1 error.
pub const DEFAULT_GRID: usize = 20_001;
/// Smallest grid accepted by [`l1_error`].
pub const MIN_GRID: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    /// L1 distance to the true frontier on `[0, 1]`.
    pub l1: f64,
    pub grid_size: usize,
    /// `max(0, max_i Y_i - f(X_i))`
    pub max_coverage_violation: f64,
    /// Number of effective parameters.
    pub support_count: usize,
}

/// `∫_0^1 |e - f|` by composite trapezoid on `grid` uniform nodes plus the
/// knots of `f` and the breakpoints of `e`.
pub fn l1_error(e: &dyn FrontierEstimate, f: &FrontierFunction, grid: usize) -> Result<f64> {
    if grid < MIN_GRID {
        return invalid(format!("L1 grid must have at least {MIN_GRID} nodes, got {grid}"));
    }
    let mut mandatory = f.breakpoints();
    mandatory.extend(e.breakpoints());
    let nodes = merged_grid(0.0, 1.0, grid, &mandatory);
    Ok(trapezoid_on(|x| (e.value(x) - f.eval(x)).abs(), &nodes))
}

/// `max_i (Y_i - e(X_i))`; at most a small tolerance for a covering fit.
pub fn coverage_check(e: &dyn FrontierEstimate, s: &Sample) -> f64 {
    s.points()
        .iter()
        .map(|p| p.y - e.value(p.x))
        .fold(f64::NEG_INFINITY, f64::max)
}

pub fn error_report(e: &dyn FrontierEstimate, f: &FrontierFunction, s: &Sample, grid: usize) -> Result<ErrorReport> {
    Ok(ErrorReport {
        l1: l1_error(e, f, grid)?,
        grid_size: grid,
        max_coverage_violation: coverage_check(e, s).max(0.0),
        support_count: e.parameter_count(),
    })
}

/// Integral of a kernel estimate over the whole line, by trapezoid on
/// `grid` nodes spanning every atom's (truncated) support, with the support
/// edges inserted as nodes.
pub fn surface_integral(e: &KernelFrontierEstimate, grid: usize) -> f64 {
    if e.atoms().is_empty() {
        return 0.0;
    }
    let reach = e.kernel().effective_radius() * e.bandwidth().get();
    let lo = e.atoms().iter().map(|a| a.x).fold(f64::INFINITY, f64::min) - reach;
    let hi = e.atoms().iter().map(|a| a.x).fold(f64::NEG_INFINITY, f64::max) + reach;
    let nodes = merged_grid(lo, hi, grid, &e.breakpoints());
    trapezoid_on(|x| e.value(x), &nodes)
}
