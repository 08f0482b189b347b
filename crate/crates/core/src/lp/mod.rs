//! Dense linear programs, a bounded-variable simplex solver and a vertex
//! enumeration oracle for small instances.
//!
//! Programs are always minimizations `min c'x` subject to rows
//! `a'x {>=, <=, =} b` and per-variable bounds `l <= x <= u`, where either
//! bound may be infinite.

mod oracle;
mod simplex;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub use oracle::{brute_force_lp, ORACLE_SIZE_LIMIT};
pub use simplex::{solve_lp, solve_lp_with, PivotRule, SolverOptions};

/// Absolute tolerance on constraint residuals.
pub const TOL_FEAS: f64 = 1e-9;
/// Relative tolerance on the duality gap, scaled by `1 + |J*|`.
pub const TOL_GAP: f64 = 1e-8;
/// Tableau entries with magnitude below this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Ge => ">=",
            Sense::Le => "<=",
            Sense::Eq => "=",
        })
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            ">=" => Ok(Sense::Ge),
            "<=" => Ok(Sense::Le),
            "=" | "==" => Ok(Sense::Eq),
            _ => invalid(format!("unknown constraint sense `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coefficients: Vec<f64>, sense: Sense, rhs: f64) -> Self {
        Self { coefficients, sense, rhs }
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, v)| a * v).sum()
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let r = self.activity(x) - self.rhs;
        match self.sense {
            Sense::Ge => (-r).max(0.0),
            Sense::Le => r.max(0.0),
            Sense::Eq => r.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarBounds {
    pub lower: f64,
    pub upper: f64,
}

impl VarBounds {
    pub const NONNEGATIVE: VarBounds = VarBounds {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    pub const FREE: VarBounds = VarBounds {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
    };

    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }
}

/// `min c'x` subject to rows and bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
}

impl LinearProgram {
    /// Program with the given objective, no rows, and `x >= 0`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            constraints: Vec::new(),
            bounds: vec![VarBounds::NONNEGATIVE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_row(&mut self, coefficients: Vec<f64>, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint::new(coefficients, sense, rhs));
        self
    }

    pub fn with_bounds(mut self, bounds: Vec<VarBounds>) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks dimensions, bound ordering and finiteness of the data.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return invalid(format!("{} bounds given for {} variables", self.bounds.len(), n));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return invalid("objective coefficients must be finite");
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return invalid(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coefficients.len()
                ));
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|a| !a.is_finite()) {
                return invalid(format!("row {i} contains a non-finite value"));
            }
        }
        for (j, b) in self.bounds.iter().enumerate() {
            if b.lower.is_nan() || b.upper.is_nan() || b.lower > b.upper {
                return invalid(format!("variable {j} has bounds [{}, {}]", b.lower, b.upper));
            }
            if b.lower == f64::INFINITY || b.upper == f64::NEG_INFINITY {
                return invalid(format!("variable {j} has an empty bound range"));
            }
        }
        Ok(())
    }

    /// Largest row or bound violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.constraints.iter().map(|r| r.violation(x));
        let bounds = self
            .bounds
            .iter()
            .zip(x)
            .map(|(b, &v)| (b.lower - v).max(v - b.upper).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }

    /// Plain-text dump: the objective line, one line per row
    /// (`a1 a2 ... sense b`), then one `bound l u` line per variable.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let join = |v: &[f64]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "min {}", join(&self.objective));
        for row in &self.constraints {
            let _ = writeln!(out, "row {} {} {}", join(&row.coefficients), row.sense, row.rhs);
        }
        for b in &self.bounds {
            let _ = writeln!(out, "bound {} {}", b.lower, b.upper);
        }
        out
    }

    /// Parses the format written by [`LinearProgram::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("bad number `{s}` in LP dump")))
        };
        let mut objective = None;
        let mut constraints = Vec::new();
        let mut bounds = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("min") => objective = Some(parts.map(num).collect::<Result<Vec<_>>>()?),
                Some("row") => {
                    let toks: Vec<&str> = parts.collect();
                    if toks.len() < 2 {
                        return invalid(format!("malformed row `{line}`"));
                    }
                    let rhs = num(toks[toks.len() - 1])?;
                    let sense = toks[toks.len() - 2].parse()?;
                    let coefs = toks[..toks.len() - 2].iter().map(|t| num(t)).collect::<Result<_>>()?;
                    constraints.push(Constraint::new(coefs, sense, rhs));
                }
                Some("bound") => {
                    let toks: Vec<&str> = parts.collect();
                    if toks.len() != 2 {
                        return invalid(format!("malformed bound `{line}`"));
                    }
                    bounds.push(VarBounds::new(num(toks[0])?, num(toks[1])?));
                }
                _ => return invalid(format!("unrecognized LP dump line `{line}`")),
            }
        }
        let objective = objective.ok_or_else(|| Error::InvalidArgument("LP dump has no objective".into()))?;
        let lp = LinearProgram {
            objective,
            constraints,
            bounds,
        };
        lp.validate()?;
        Ok(lp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of a solve. Primal and dual vectors are only meaningful when the
/// status is [`LpStatus::Optimal`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row: `>= 0` for `>=` rows, `<= 0` for `<=` rows.
    pub duals: Vec<f64>,
    /// `c - A'y` per variable.
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    pub(crate) fn without_point(status: LpStatus, n: usize, m: usize, iterations: usize) -> Self {
        let objective = match status {
            LpStatus::Unbounded => f64::NEG_INFINITY,
            _ => f64::NAN,
        };
        Self {
            status,
            primal: vec![f64::NAN; n],
            objective,
            duals: vec![f64::NAN; m],
            reduced_costs: vec![f64::NAN; n],
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Optimality certificate measured against the original program data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// Largest row or bound violation of the primal point.
    pub primal_residual: f64,
    /// Largest sign violation of the row multipliers and of the reduced costs
    /// against infinite bounds.
    pub dual_residual: f64,
    /// `|c'x - dual objective|`.
    pub gap: f64,
    /// Largest `|multiplier * slack|` over rows and bounds.
    pub complementarity: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
}

impl Certificate {
    /// All residuals within the solver tolerances.
    pub fn holds(&self) -> bool {
        let scale = 1.0 + self.primal_objective.abs();
        self.primal_residual <= TOL_FEAS
            && self.dual_residual <= TOL_GAP * scale
            && self.gap <= TOL_GAP * scale
            && self.complementarity <= TOL_GAP * scale
    }
}

/// Builds the optimality certificate of an optimal solution.
///
/// The dual objective is `b'y + sum_j (l_j z+_j - u_j z-_j)` with
/// `z = c - A'y` split into its positive and negative parts. Reduced costs
/// are recomputed from the original data, not taken from the solver.
pub fn certificate(s: &LpSolution, p: &LinearProgram) -> Result<Certificate> {
    if s.status != LpStatus::Optimal {
        return Err(Error::InvalidState(format!(
            "certificate requested for a {:?} solution",
            s.status
        )));
    }
    let n = p.num_vars();
    if s.primal.len() != n || s.duals.len() != p.num_rows() {
        return invalid("solution dimensions do not match the program");
    }
    let x = &s.primal;
    let y = &s.duals;

    let mut z = p.objective.clone();
    let mut dual_obj = 0.0;
    let mut dual_residual: f64 = 0.0;
    let mut complementarity: f64 = 0.0;
    for (row, &yi) in p.constraints.iter().zip(y) {
        for (zj, a) in z.iter_mut().zip(&row.coefficients) {
            *zj -= a * yi;
        }
        dual_obj += row.rhs * yi;
        let wrong_sign = match row.sense {
            Sense::Ge => (-yi).max(0.0),
            Sense::Le => yi.max(0.0),
            Sense::Eq => 0.0,
        };
        dual_residual = dual_residual.max(wrong_sign);
        let slack = row.activity(x) - row.rhs;
        if row.sense != Sense::Eq {
            complementarity = complementarity.max((yi * slack).abs());
        }
    }
    for ((&zj, b), &xj) in z.iter().zip(&p.bounds).zip(x) {
        let bound = if zj > 0.0 { b.lower } else { b.upper };
        if zj == 0.0 {
            continue;
        }
        if bound.is_finite() {
            dual_obj += zj * bound;
            complementarity = complementarity.max((zj * (xj - bound)).abs());
        } else {
            // A reduced cost pushing against an infinite bound is a dual infeasibility.
            dual_residual = dual_residual.max(zj.abs());
            dual_obj += zj * xj;
        }
    }
    let primal_obj = p.objective_value(x);
    Ok(Certificate {
        primal_residual: p.max_violation(x),
        dual_residual,
        gap: (primal_obj - dual_obj).abs(),
        complementarity,
        primal_objective: primal_obj,
        dual_objective: dual_obj,
    })
}

/// `|c'x* - dual objective|` for an optimal solution.
pub fn duality_gap(s: &LpSolution, p: &LinearProgram) -> Result<f64> {
    certificate(s, p).map(|c| c.gap)
}
