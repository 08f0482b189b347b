//! Trigonometric frontier estimate
//! `g(x) = c0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)`.
//!
//! The coefficients minimize `c0` (the integral of `g` over `[0, 1]`) subject
//! to covering the sample and the Lipschitz budget
//! `sum_k k (|a_k| + |b_k|) <= L / (2 pi)`. Absolute values are handled by
//! splitting each coefficient into nonnegative positive and negative parts.

use std::f64::consts::TAU;

use crate::error::{invalid, Error, Result};
use crate::frontier::Sample;
use crate::lp::{solve_lp, LinearProgram, LpStatus, Sense, VarBounds};

use super::{count_nonzero, FrontierEstimate};

#[derive(Debug, Clone, PartialEq)]
pub struct FourierFrontierEstimate {
    c0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    budget: f64,
}

impl FourierFrontierEstimate {
    pub fn new(c0: f64, a: Vec<f64>, b: Vec<f64>, lipschitz_budget: f64) -> Self {
        debug_assert_eq!(a.len(), b.len());
        Self {
            c0,
            a,
            b,
            budget: lipschitz_budget,
        }
    }

    /// Constant term; also the integral of the estimate over `[0, 1]`.
    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn cosine(&self) -> &[f64] {
        &self.a
    }

    pub fn sine(&self) -> &[f64] {
        &self.b
    }

    /// Number of harmonics `M`.
    pub fn harmonics(&self) -> usize {
        self.a.len()
    }

    /// The Lipschitz budget `L` the estimate was fitted with.
    pub fn lipschitz_budget(&self) -> f64 {
        self.budget
    }

    /// `sum_k k (|a_k| + |b_k|)`, to compare against `L / (2 pi)`.
    pub fn weighted_coefficient_norm(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .enumerate()
            .map(|(k, (a, b))| (k + 1) as f64 * (a.abs() + b.abs()))
            .sum()
    }
}

impl FrontierEstimate for FourierFrontierEstimate {
    fn value(&self, x: f64) -> f64 {
        let mut v = self.c0;
        for (k, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let phase = TAU * (k + 1) as f64 * x;
            v += a * phase.cos() + b * phase.sin();
        }
        v
    }

    fn parameter_count(&self) -> usize {
        count_nonzero(std::iter::once(self.c0).chain(self.a.iter().copied()).chain(self.b.iter().copied()))
    }
}

/// Variables: `c0` (free), then `a+`, `a-`, `b+`, `b-` (each `M` long, nonnegative).
/// Rows: `N` coverage rows followed by the budget row.
pub fn build_fourier_lp(s: &Sample, harmonics: usize, lipschitz: f64) -> Result<LinearProgram> {
    s.require_nonempty()?;
    if harmonics == 0 {
        return invalid("the Fourier estimate needs at least one harmonic");
    }
    if !(lipschitz >= 0.0 && lipschitz.is_finite()) {
        return invalid(format!("Lipschitz budget must be finite and nonnegative, got {lipschitz}"));
    }
    let m = harmonics;
    let nvars = 1 + 4 * m;
    let mut objective = vec![0.0; nvars];
    objective[0] = 1.0;
    let mut bounds = vec![VarBounds::NONNEGATIVE; nvars];
    bounds[0] = VarBounds::FREE;
    let mut lp = LinearProgram::new(objective).with_bounds(bounds);

    for p in s.points() {
        let mut row = vec![0.0; nvars];
        row[0] = 1.0;
        for k in 0..m {
            let phase = TAU * (k + 1) as f64 * p.x;
            let (sin, cos) = phase.sin_cos();
            row[1 + k] = cos;
            row[1 + m + k] = -cos;
            row[1 + 2 * m + k] = sin;
            row[1 + 3 * m + k] = -sin;
        }
        lp.add_row(row, Sense::Ge, p.y);
    }

    let mut budget = vec![0.0; nvars];
    for part in 0..4 {
        for k in 0..m {
            budget[1 + part * m + k] = (k + 1) as f64;
        }
    }
    lp.add_row(budget, Sense::Le, lipschitz / TAU);
    Ok(lp)
}

/// Fits the Fourier estimate with `harmonics` terms and Lipschitz budget `lipschitz`.
pub fn fit_fourier_estimator(s: &Sample, harmonics: usize, lipschitz: f64) -> Result<FourierFrontierEstimate> {
    let lp = build_fourier_lp(s, harmonics, lipschitz)?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        // a = b = 0, c0 = max Y is always feasible and c0 >= max Y - 2 pi sum|.| bounds the objective.
        return Err(Error::Internal(format!(
            "Fourier program reported {:?}",
            sol.status
        )));
    }
    let m = harmonics;
    let x = &sol.primal;
    let a = (0..m).map(|k| x[1 + k] - x[1 + m + k]).collect();
    let b = (0..m).map(|k| x[1 + 2 * m + k] - x[1 + 3 * m + k]).collect();
    Ok(FourierFrontierEstimate::new(x[0], a, b, lipschitz))
}
