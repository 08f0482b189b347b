//! Dense bounded-variable primal simplex.
//!
//! Two phases with explicit artificial variables. Nonbasic variables sit at a
//! finite bound (or at zero when free); the ratio test includes bound flips of
//! the entering variable. Row multipliers are read off the reduced costs of
//! the slack and artificial columns at the end of phase two.

// Tableau loops index several parallel arrays by column.
#![allow(clippy::needless_range_loop)]

use crate::error::{Error, Result};

use super::{LinearProgram, LpSolution, LpStatus, Sense, PIVOT_TOL, TOL_FEAS};

/// Entering-variable selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest eligible index enters, smallest index leaves on ties.
    Bland,
    /// Most negative reduced cost enters. After a run of degenerate pivots the
    /// solver switches to Bland's rule until the objective moves again.
    #[default]
    Dantzig,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolverOptions {
    pub rule: PivotRule,
    /// Hard cap on pivots and bound flips; `None` picks a size-based default.
    pub max_iterations: Option<usize>,
}

/// Reduced costs above `-OPT_TOL` count as nonnegative.
const OPT_TOL: f64 = 1e-9;
/// Consecutive degenerate pivots before the Dantzig rule hands over to Bland.
const STALL_LIMIT: usize = 25;
const DEGENERATE_STEP: f64 = 1e-12;
/// Row factors below this are skipped during elimination.
const DROP_TOL: f64 = 1e-15;

const NONBASIC: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnKind {
    Structural,
    Slack,
    Artificial,
}

/// Solves `p` with the default options.
pub fn solve_lp(p: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(p, SolverOptions::default())
}

pub fn solve_lp_with(p: &LinearProgram, opts: SolverOptions) -> Result<LpSolution> {
    p.validate()?;
    let n = p.num_vars();
    let m = p.num_rows();

    // All-zero rows are either trivially satisfied or make the program infeasible.
    let mut kept = Vec::with_capacity(m);
    for (i, row) in p.constraints.iter().enumerate() {
        if row.coefficients.iter().any(|a| *a != 0.0) {
            kept.push(i);
        } else if row.violation(&vec![0.0; n]) > TOL_FEAS {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, n, m, 0));
        }
    }

    let mut tab = Tableau::build(p, &kept);
    let max_iter = opts
        .max_iterations
        .unwrap_or_else(|| 50_000 + 50 * (tab.m + tab.ncols));

    if tab.has_artificials() {
        tab.set_phase_one_costs();
        match tab.iterate(opts.rule, max_iter)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(Error::Internal("phase one reported an unbounded ray".into()));
            }
        }
        let infeasibility: f64 = (0..tab.ncols)
            .filter(|&j| tab.kind[j] == ColumnKind::Artificial)
            .map(|j| tab.x[j])
            .sum();
        if infeasibility > TOL_FEAS {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, n, m, tab.iterations));
        }
        tab.end_phase_one();
    }

    tab.set_phase_two_costs(&p.objective);
    let outcome = tab.iterate(opts.rule, max_iter)?;
    if outcome == Outcome::Unbounded {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n, m, tab.iterations));
    }

    let primal: Vec<f64> = tab.x[..n].to_vec();
    let reduced_costs: Vec<f64> = tab.d[..n].to_vec();
    let mut duals = vec![0.0; m];
    for (k, &i) in kept.iter().enumerate() {
        // A column s*e_k has reduced cost -s*y_k.
        let (col, coef) = tab.row_dual_column[k];
        duals[i] = -coef * tab.d[col];
    }
    let objective = p.objective_value(&primal);
    let violation = p.max_violation(&primal);
    if violation > 1e-7 {
        log::warn!("simplex finished with constraint violation {violation:e}");
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        objective,
        duals,
        reduced_costs,
        iterations: tab.iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Optimal,
    Unbounded,
}

enum Leaving {
    Flip,
    Row(usize),
}

struct Tableau {
    m: usize,
    ncols: usize,
    /// Row-major `m x ncols` matrix `B^-1 [A | S | R]`.
    t: Vec<f64>,
    /// Reduced costs for the current phase.
    d: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    kind: Vec<ColumnKind>,
    /// Columns that may never enter (artificials in phase two).
    barred: Vec<bool>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    /// For each tableau row, a column `coef * e_row` whose reduced cost yields the multiplier.
    row_dual_column: Vec<(usize, f64)>,
    iterations: usize,
    scratch: Vec<f64>,
}

impl Tableau {
    fn build(p: &LinearProgram, kept: &[usize]) -> Self {
        let n = p.num_vars();
        let m = kept.len();

        let mut x0 = vec![0.0; n];
        for (v, b) in x0.iter_mut().zip(&p.bounds) {
            *v = if b.lower.is_finite() {
                b.lower
            } else if b.upper.is_finite() {
                b.upper
            } else {
                0.0
            };
        }

        // Column plan: structurals, one slack per inequality row, then artificials.
        let mut slack_of = vec![None; m];
        let mut ncols = n;
        for (k, &i) in kept.iter().enumerate() {
            if p.constraints[i].sense != Sense::Eq {
                slack_of[k] = Some(ncols);
                ncols += 1;
            }
        }
        // (basic column, its coefficient in row k, initial value)
        let mut basic_plan = Vec::with_capacity(m);
        let mut art_of = vec![None; m];
        for (k, &i) in kept.iter().enumerate() {
            let row = &p.constraints[i];
            let r = row.rhs - row.activity(&x0);
            let plan = match (row.sense, slack_of[k]) {
                (Sense::Le, Some(s)) if r >= 0.0 => (s, 1.0, r),
                (Sense::Ge, Some(s)) if r <= 0.0 => (s, -1.0, -r),
                _ => {
                    let sign = if r >= 0.0 { 1.0 } else { -1.0 };
                    art_of[k] = Some((ncols, sign));
                    ncols += 1;
                    (ncols - 1, sign, r.abs())
                }
            };
            basic_plan.push(plan);
        }

        let mut kind = vec![ColumnKind::Structural; ncols];
        let mut lower = vec![0.0; ncols];
        let mut upper = vec![f64::INFINITY; ncols];
        let mut x = vec![0.0; ncols];
        for j in 0..n {
            lower[j] = p.bounds[j].lower;
            upper[j] = p.bounds[j].upper;
            x[j] = x0[j];
        }
        let mut t = vec![0.0; m * ncols];
        let mut row_dual_column = Vec::with_capacity(m);
        for (k, &i) in kept.iter().enumerate() {
            let row = &p.constraints[i];
            let dst = &mut t[k * ncols..(k + 1) * ncols];
            dst[..n].copy_from_slice(&row.coefficients);
            if let Some(s) = slack_of[k] {
                let coef = if row.sense == Sense::Le { 1.0 } else { -1.0 };
                dst[s] = coef;
                kind[s] = ColumnKind::Slack;
                row_dual_column.push((s, coef));
            }
            if let Some((a, sign)) = art_of[k] {
                dst[a] = sign;
                kind[a] = ColumnKind::Artificial;
                if slack_of[k].is_none() {
                    row_dual_column.push((a, sign));
                }
            }
            let (_, diag, _) = basic_plan[k];
            if diag != 1.0 {
                dst.iter_mut().for_each(|v| *v /= diag);
            }
        }

        let mut basis = vec![0; m];
        let mut row_of = vec![NONBASIC; ncols];
        for (k, &(col, _, value)) in basic_plan.iter().enumerate() {
            basis[k] = col;
            row_of[col] = k;
            x[col] = value;
        }

        Self {
            m,
            ncols,
            t,
            d: vec![0.0; ncols],
            cost: vec![0.0; ncols],
            lower,
            upper,
            x,
            kind,
            barred: vec![false; ncols],
            basis,
            row_of,
            row_dual_column,
            iterations: 0,
            scratch: vec![0.0; ncols],
        }
    }

    fn has_artificials(&self) -> bool {
        self.kind.contains(&ColumnKind::Artificial)
    }

    fn set_phase_one_costs(&mut self) {
        for j in 0..self.ncols {
            self.cost[j] = if self.kind[j] == ColumnKind::Artificial { 1.0 } else { 0.0 };
        }
        self.price();
    }

    fn set_phase_two_costs(&mut self, c: &[f64]) {
        self.cost.iter_mut().for_each(|v| *v = 0.0);
        self.cost[..c.len()].copy_from_slice(c);
        self.price();
    }

    /// Recomputes `d = c - c_B' T` from scratch.
    fn price(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for r in 0..self.m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * self.ncols..(r + 1) * self.ncols];
                for (dj, a) in self.d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        for r in 0..self.m {
            self.d[self.basis[r]] = 0.0;
        }
    }

    /// Pivots remaining basic artificials out where possible, pins all
    /// artificials at zero and drops the ones no longer needed.
    fn end_phase_one(&mut self) {
        for r in 0..self.m {
            if self.kind[self.basis[r]] != ColumnKind::Artificial {
                continue;
            }
            let row = &self.t[r * self.ncols..(r + 1) * self.ncols];
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.ncols {
                if self.row_of[j] != NONBASIC || self.kind[j] == ColumnKind::Artificial {
                    continue;
                }
                let a = row[j].abs();
                if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            // No candidate: the row is redundant and the artificial stays basic at zero.
            if let Some((q, _)) = best {
                let leaving = self.basis[r];
                self.x[leaving] = 0.0;
                self.pivot(r, q);
            }
        }
        for j in 0..self.ncols {
            if self.kind[j] == ColumnKind::Artificial {
                self.lower[j] = 0.0;
                self.upper[j] = 0.0;
                self.barred[j] = true;
                if self.row_of[j] == NONBASIC {
                    self.x[j] = 0.0;
                }
            }
        }
        self.compact();
    }

    /// Removes nonbasic artificial columns that no row multiplier depends on.
    fn compact(&mut self) {
        let mut needed = vec![true; self.ncols];
        for j in 0..self.ncols {
            if self.kind[j] == ColumnKind::Artificial && self.row_of[j] == NONBASIC {
                needed[j] = false;
            }
        }
        for &(col, _) in &self.row_dual_column {
            needed[col] = true;
        }
        if needed.iter().all(|&k| k) {
            return;
        }
        let keep: Vec<usize> = (0..self.ncols).filter(|&j| needed[j]).collect();
        let mut new_index = vec![NONBASIC; self.ncols];
        for (nj, &j) in keep.iter().enumerate() {
            new_index[j] = nj;
        }
        let nc = keep.len();
        let mut t = vec![0.0; self.m * nc];
        for r in 0..self.m {
            let src = &self.t[r * self.ncols..(r + 1) * self.ncols];
            let dst = &mut t[r * nc..(r + 1) * nc];
            for (nj, &j) in keep.iter().enumerate() {
                dst[nj] = src[j];
            }
        }
        let pick = |v: &[f64]| keep.iter().map(|&j| v[j]).collect::<Vec<f64>>();
        self.d = pick(&self.d);
        self.cost = pick(&self.cost);
        self.lower = pick(&self.lower);
        self.upper = pick(&self.upper);
        self.x = pick(&self.x);
        self.kind = keep.iter().map(|&j| self.kind[j]).collect();
        self.barred = keep.iter().map(|&j| self.barred[j]).collect();
        self.row_of = keep.iter().map(|&j| self.row_of[j]).collect();
        for b in self.basis.iter_mut() {
            *b = new_index[*b];
        }
        for (col, _) in self.row_dual_column.iter_mut() {
            *col = new_index[*col];
        }
        self.t = t;
        self.ncols = nc;
        self.scratch = vec![0.0; nc];
    }

    /// Direction in which nonbasic column `j` may move, if its reduced cost
    /// makes that profitable.
    fn improving_direction(&self, j: usize) -> Option<f64> {
        let (l, u, v, dj) = (self.lower[j], self.upper[j], self.x[j], self.d[j]);
        if l == u {
            return None;
        }
        let at_lower = l.is_finite() && v == l;
        let at_upper = u.is_finite() && v == u;
        if dj < -OPT_TOL && !at_upper {
            Some(1.0)
        } else if dj > OPT_TOL && !at_lower {
            Some(-1.0)
        } else {
            None
        }
    }

    fn choose_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if self.row_of[j] != NONBASIC || self.barred[j] {
                continue;
            }
            if let Some(dir) = self.improving_direction(j) {
                if bland {
                    return Some((j, dir));
                }
                if best.is_none_or(|(b, _)| self.d[j].abs() > self.d[b].abs()) {
                    best = Some((j, dir));
                }
            }
        }
        best
    }

    fn ratio_test(&self, q: usize, dir: f64, bland: bool) -> (Leaving, f64) {
        let range = self.upper[q] - self.lower[q];
        let mut step = if range.is_finite() { range } else { f64::INFINITY };
        let mut leaving = Leaving::Flip;
        let mut leaving_pivot = 0.0;
        for i in 0..self.m {
            let a = self.t[i * self.ncols + q];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[i];
            let rate = -dir * a;
            let limit = if rate < 0.0 {
                if !self.lower[b].is_finite() {
                    continue;
                }
                (self.x[b] - self.lower[b]) / -rate
            } else {
                if !self.upper[b].is_finite() {
                    continue;
                }
                (self.upper[b] - self.x[b]) / rate
            };
            let limit = limit.max(0.0);
            let tie = 1e-12 * (1.0 + limit.abs());
            let better = match leaving {
                _ if limit < step - tie => true,
                Leaving::Row(r) if (limit - step).abs() <= tie => {
                    if bland {
                        b < self.basis[r]
                    } else {
                        a.abs() > leaving_pivot
                    }
                }
                _ => false,
            };
            if better {
                step = limit;
                leaving = Leaving::Row(i);
                leaving_pivot = a.abs();
            }
        }
        (leaving, step)
    }

    fn iterate(&mut self, rule: PivotRule, max_iter: usize) -> Result<Outcome> {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations >= max_iter {
                return Err(Error::Internal(format!(
                    "simplex iteration limit ({max_iter}) exhausted"
                )));
            }
            let bland = rule == PivotRule::Bland || degenerate_run >= STALL_LIMIT;
            let Some((q, dir)) = self.choose_entering(bland) else {
                return Ok(Outcome::Optimal);
            };
            let (leaving, step) = self.ratio_test(q, dir, bland);
            if !step.is_finite() {
                return Ok(Outcome::Unbounded);
            }
            self.iterations += 1;

            if step > 0.0 {
                self.x[q] += dir * step;
                for i in 0..self.m {
                    let a = self.t[i * self.ncols + q];
                    if a != 0.0 {
                        self.x[self.basis[i]] -= dir * step * a;
                    }
                }
            }
            match leaving {
                Leaving::Flip => {
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
                }
                Leaving::Row(r) => {
                    let b = self.basis[r];
                    let rate = -dir * self.t[r * self.ncols + q];
                    self.x[b] = if rate < 0.0 { self.lower[b] } else { self.upper[b] };
                    self.pivot(r, q);
                }
            }
            if step <= DEGENERATE_STEP {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let nc = self.ncols;
        let piv = self.t[r * nc + q];
        {
            let row = &mut self.t[r * nc..(r + 1) * nc];
            let inv = 1.0 / piv;
            row.iter_mut().for_each(|v| *v *= inv);
            row[q] = 1.0;
            self.scratch.copy_from_slice(row);
        }
        let pivot_row = &self.scratch;
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let row = &mut self.t[i * nc..(i + 1) * nc];
            let f = row[q];
            if f.abs() <= DROP_TOL {
                row[q] = 0.0;
                continue;
            }
            for (v, p) in row.iter_mut().zip(pivot_row) {
                *v -= f * p;
            }
            row[q] = 0.0;
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, p) in self.d.iter_mut().zip(pivot_row) {
                *v -= f * p;
            }
        }
        self.d[q] = 0.0;

        let leaving = self.basis[r];
        self.row_of[leaving] = NONBASIC;
        self.basis[r] = q;
        self.row_of[q] = r;
    }
}
