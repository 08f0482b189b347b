//! Brute-force reference solver for tiny programs.
//!
//! Every candidate point is the intersection of `n` hyperplanes picked from
//! the rows, the finite bounds and, for free variables, the coordinate planes
//! `x_j = 0`. Adding those coordinate planes makes the search work even when
//! the feasible set has a lineality space. Unboundedness is decided separately
//! by minimizing `c'd` over the recession cone intersected with a unit box.

use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Result};

use super::{LinearProgram, LpSolution, LpStatus, VarBounds};

/// Largest `variables + rows` accepted by [`brute_force_lp`].
pub const ORACLE_SIZE_LIMIT: usize = 14;

const FEAS_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-11;

#[derive(Clone)]
struct Plane {
    normal: Vec<f64>,
    offset: f64,
}

/// Solves `p` by vertex enumeration. Only the status, primal point and
/// objective are filled in; the multipliers are left as NaN.
pub fn brute_force_lp(p: &LinearProgram) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();
    let m = p.num_rows();
    if n + m > ORACLE_SIZE_LIMIT {
        return invalid(format!(
            "vertex enumeration is limited to {ORACLE_SIZE_LIMIT} variables + rows, got {}",
            n + m
        ));
    }

    let best = best_vertex(p);
    let Some((x, objective)) = best else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, n, m, 0));
    };

    if recession_descent(p) < -1e-9 {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n, m, 0));
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal: x,
        objective,
        duals: vec![f64::NAN; m],
        reduced_costs: vec![f64::NAN; n],
        iterations: 0,
    })
}

fn planes(p: &LinearProgram) -> Vec<Plane> {
    let n = p.num_vars();
    let unit = |j: usize| {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        v
    };
    let mut out: Vec<Plane> = p
        .constraints
        .iter()
        .map(|r| Plane {
            normal: r.coefficients.clone(),
            offset: r.rhs,
        })
        .collect();
    for (j, b) in p.bounds.iter().enumerate() {
        if b.lower.is_finite() {
            out.push(Plane {
                normal: unit(j),
                offset: b.lower,
            });
        }
        if b.upper.is_finite() && b.upper != b.lower {
            out.push(Plane {
                normal: unit(j),
                offset: b.upper,
            });
        }
        if !b.lower.is_finite() && !b.upper.is_finite() {
            out.push(Plane {
                normal: unit(j),
                offset: 0.0,
            });
        }
    }
    out
}

/// Best feasible candidate point, ties resolved by enumeration order.
fn best_vertex(p: &LinearProgram) -> Option<(Vec<f64>, f64)> {
    let n = p.num_vars();
    if n == 0 {
        return (p.max_violation(&[]) <= FEAS_TOL).then(|| (Vec::new(), 0.0));
    }
    let hyper = planes(p);
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut choice: Vec<usize> = (0..n).collect();
    if hyper.len() < n {
        return None;
    }
    loop {
        if let Some(x) = intersect(&hyper, &choice, n) {
            if p.max_violation(&x) <= FEAS_TOL {
                let obj = p.objective_value(&x);
                if best.as_ref().is_none_or(|(_, b)| obj < *b) {
                    best = Some((x, obj));
                }
            }
        }
        if !next_combination(&mut choice, hyper.len()) {
            break;
        }
    }
    best
}

fn intersect(hyper: &[Plane], choice: &[usize], n: usize) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(n, n, |r, c| hyper[choice[r]].normal[c]);
    let b = DVector::from_iterator(n, choice.iter().map(|&k| hyper[k].offset));
    let lu = a.clone().lu();
    let scale = a.amax().max(1.0);
    // Reject (nearly) singular selections via the smallest pivot of U.
    let u = lu.u();
    let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if min_pivot <= SINGULAR_TOL * scale {
        return None;
    }
    lu.solve(&b).map(|x| x.iter().copied().collect())
}

fn next_combination(choice: &mut [usize], total: usize) -> bool {
    let k = choice.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if choice[i] < total - k + i {
            choice[i] += 1;
            for j in i + 1..k {
                choice[j] = choice[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `min c'd` over the recession cone of `p` intersected with `[-1, 1]^n`.
fn recession_descent(p: &LinearProgram) -> f64 {
    let bounds = p
        .bounds
        .iter()
        .map(|b| {
            let lo = if b.lower.is_finite() { 0.0 } else { -1.0 };
            let hi = if b.upper.is_finite() { 0.0 } else { 1.0 };
            VarBounds::new(lo, hi)
        })
        .collect();
    let mut cone = LinearProgram::new(p.objective.clone()).with_bounds(bounds);
    for r in &p.constraints {
        cone.add_row(r.coefficients.clone(), r.sense, 0.0);
    }
    // The cone program is bounded and pointed, and d = 0 is always feasible.
    best_vertex(&cone).map_or(0.0, |(_, v)| v.min(0.0))
}
