//! Kernel frontier estimates `f(x) = sum_i K_h(x - X_i) alpha_i`, `alpha >= 0`.
//!
//! The weights minimize the surface `sum alpha_i` (the integral of the
//! estimate over the line) subject to covering every sample point,
//! `f(X_i) >= Y_i`. The capped variant also bounds each weight by `C_alpha / N`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frontier::Sample;
use crate::kernel::{Bandwidth, Kernel};
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus, Sense, VarBounds};

use super::{count_nonzero, sparsity_threshold, FrontierEstimate};

/// A support vector: sample abscissa and its weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelFrontierEstimate {
    kernel: Kernel,
    h: Bandwidth,
    atoms: Vec<Atom>,
    cap: Option<f64>,
    total_mass: f64,
    dropped_mass: f64,
}

impl KernelFrontierEstimate {
    /// Builds an estimate from raw weights, dropping those at or below the
    /// sparsity threshold. Negative weights are rejected.
    pub fn from_coefficients(
        kernel: Kernel,
        h: Bandwidth,
        xs: &[f64],
        alphas: &[f64],
        cap: Option<f64>,
    ) -> Result<Self> {
        if xs.len() != alphas.len() {
            return invalid("abscissas and weights differ in length");
        }
        if alphas.iter().any(|a| !a.is_finite() || *a < -SPARSITY_NEGATIVE_SLACK) {
            return invalid("kernel weights must be finite and nonnegative");
        }
        let max = alphas.iter().copied().fold(0.0, f64::max);
        let thr = sparsity_threshold(max);
        let mut atoms = Vec::new();
        let mut dropped_mass = 0.0;
        for (&x, &alpha) in xs.iter().zip(alphas) {
            if alpha > thr {
                atoms.push(Atom { x, alpha });
            } else {
                dropped_mass += alpha.max(0.0);
            }
        }
        let total_mass = atoms.iter().map(|a| a.alpha).sum();
        Ok(Self {
            kernel,
            h,
            atoms,
            cap,
            total_mass,
            dropped_mass,
        })
    }

    pub fn from_atoms(kernel: Kernel, h: Bandwidth, atoms: Vec<Atom>, cap: Option<f64>) -> Result<Self> {
        let (xs, alphas): (Vec<f64>, Vec<f64>) = atoms.iter().map(|a| (a.x, a.alpha)).unzip();
        Self::from_coefficients(kernel, h, &xs, &alphas, cap)
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.h
    }

    /// Retained atoms, in sample order.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Per-weight upper bound, present for the capped estimator.
    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    /// `sum alpha_i` over retained atoms; equals the integral of the estimate over the line.
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    /// Weight discarded by the sparsity threshold.
    pub fn dropped_mass(&self) -> f64 {
        self.dropped_mass
    }

    /// Upper bound on how much dropping atoms changed any value of the estimate.
    pub fn max_truncation_effect(&self) -> f64 {
        self.dropped_mass * self.kernel.constants().k_max / self.h.get()
    }
}

/// Negative weights up to this size are solver noise and treated as zero.
const SPARSITY_NEGATIVE_SLACK: f64 = 1e-9;

impl FrontierEstimate for KernelFrontierEstimate {
    fn value(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .map(|a| self.kernel.eval_scaled(self.h, x - a.x) * a.alpha)
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        if !self.kernel.has_finite_support() {
            return Vec::new();
        }
        let h = self.h.get();
        self.atoms
            .iter()
            .flat_map(|a| [a.x - h, a.x, a.x + h])
            .collect()
    }

    fn parameter_count(&self) -> usize {
        count_nonzero(self.atoms.iter().map(|a| a.alpha))
    }
}

fn require_unit_kernel(k: &Kernel) -> Result<()> {
    if k.scale() != 1.0 {
        return invalid(format!("kernel `{k}` does not integrate to one"));
    }
    Ok(())
}

/// The covering program: `min 1'alpha` s.t. `A alpha >= Y`, `0 <= alpha <= cap`,
/// with `A_ij = K_h(X_i - X_j)`.
pub fn build_kernel_lp(s: &Sample, k: &Kernel, h: Bandwidth, cap: Option<f64>) -> Result<LinearProgram> {
    s.require_nonempty()?;
    require_unit_kernel(k)?;
    if let Some(c) = cap {
        if !(c > 0.0 && c.is_finite()) {
            return invalid(format!("weight cap must be positive and finite, got {c}"));
        }
    }
    let n = s.len();
    let xs: Vec<f64> = s.xs().collect();
    let upper = cap.unwrap_or(f64::INFINITY);
    let mut lp = LinearProgram::new(vec![1.0; n]).with_bounds(vec![VarBounds::new(0.0, upper); n]);
    for p in s.points() {
        let row = xs.iter().map(|&xj| k.eval_scaled(h, p.x - xj)).collect();
        lp.add_row(row, Sense::Ge, p.y);
    }
    Ok(lp)
}

/// A fitted kernel estimate together with its program and solver output.
#[derive(Debug, Clone)]
pub struct KernelFit {
    pub estimate: KernelFrontierEstimate,
    pub program: LinearProgram,
    pub solution: LpSolution,
}

/// Builds and solves the kernel program. Infeasibility is an error.
pub fn solve_kernel_program(s: &Sample, k: &Kernel, h: Bandwidth, cap: Option<f64>) -> Result<KernelFit> {
    let program = build_kernel_lp(s, k, h, cap)?;
    let solution = solve_lp(&program)?;
    match solution.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => {
            return Err(Error::Infeasible(match cap {
                Some(c) => format!(
                    "no weights below the cap {c:.6} cover the sample; increase C_alpha, h or N"
                ),
                None => "kernel covering program has no feasible point".into(),
            }))
        }
        LpStatus::Unbounded => {
            return Err(Error::Internal("kernel covering program reported unbounded".into()))
        }
    }
    let xs: Vec<f64> = s.xs().collect();
    let alphas: Vec<f64> = solution.primal.iter().map(|a| a.max(0.0)).collect();
    let estimate = KernelFrontierEstimate::from_coefficients(*k, h, &xs, &alphas, cap)?;
    Ok(KernelFit {
        estimate,
        program,
        solution,
    })
}

/// Minimal-surface kernel estimate covering the sample.
pub fn fit_kernel_estimator(s: &Sample, k: &Kernel, h: Bandwidth) -> Result<KernelFrontierEstimate> {
    solve_kernel_program(s, k, h, None).map(|f| f.estimate)
}

/// Capped estimate: every weight is at most `c_alpha / N`. Requires a
/// finite-support kernel.
pub fn fit_modified_estimator(s: &Sample, k: &Kernel, h: Bandwidth, c_alpha: f64) -> Result<KernelFrontierEstimate> {
    fit_modified_estimator_with(s, k, h, c_alpha, false)
}

/// As [`fit_modified_estimator`]; `allow_infinite_support` admits the gaussian.
pub fn fit_modified_estimator_with(
    s: &Sample,
    k: &Kernel,
    h: Bandwidth,
    c_alpha: f64,
    allow_infinite_support: bool,
) -> Result<KernelFrontierEstimate> {
    if !k.has_finite_support() && !allow_infinite_support {
        return invalid(format!(
            "the capped estimator needs a finite-support kernel; `{k}` is not (set the override to use it anyway)"
        ));
    }
    if !(c_alpha > 0.0 && c_alpha.is_finite()) {
        return invalid(format!("C_alpha must be positive and finite, got {c_alpha}"));
    }
    s.require_nonempty()?;
    solve_kernel_program(s, k, h, Some(c_alpha / s.len() as f64)).map(|f| f.estimate)
}

/// `C_alpha` used when the frontier maximum is unknown: twice the largest ordinate.
pub fn default_c_alpha(s: &Sample) -> f64 {
    2.0 * s.max_y()
}
