//! Helpers shared by the integration test targets.

#![allow(dead_code)]

use frontier_lp::lp::{LinearProgram, Sense, VarBounds};
use rand::Rng;

/// A small random program with integer data, mixed senses and bounds, and
/// occasional duplicated rows, so that degenerate vertices are common. About
/// half of the programs are built around a planted feasible point (with
/// tight rows), the rest have arbitrary right-hand sides.
pub fn random_program<R: Rng>(rng: &mut R, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_rows);
    let objective = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
    let bounds = (0..n)
        .map(|_| match rng.gen_range(0..5) {
            0 | 1 => VarBounds::NONNEGATIVE,
            2 => VarBounds::FREE,
            3 => {
                let l = rng.gen_range(-3..=1) as f64;
                VarBounds::new(l, l + rng.gen_range(0..=4) as f64)
            }
            _ => VarBounds::new(f64::NEG_INFINITY, rng.gen_range(-1..=3) as f64),
        })
        .collect();
    let mut p = LinearProgram::new(objective).with_bounds(bounds);
    let planted: Option<Vec<f64>> = rng.gen_bool(0.5).then(|| {
        p.bounds
            .iter()
            .map(|b| {
                let lo = if b.lower.is_finite() { b.lower as i64 } else { -3 };
                let hi = if b.upper.is_finite() { b.upper as i64 } else { lo.max(0) + 3 };
                rng.gen_range(lo..=hi) as f64
            })
            .collect()
    });
    while p.num_rows() < m {
        if p.num_rows() > 0 && rng.gen_bool(0.2) {
            let dup = p.constraints[rng.gen_range(0..p.num_rows())].clone();
            p.add_row(dup.coefficients, dup.sense, dup.rhs);
            continue;
        }
        let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
        let sense = match rng.gen_range(0..5) {
            0 | 1 => Sense::Ge,
            2 | 3 => Sense::Le,
            _ => Sense::Eq,
        };
        let rhs = match &planted {
            Some(x0) => {
                let activity: f64 = row.iter().zip(x0).map(|(a, x)| a * x).sum();
                let slack = rng.gen_range(0..=2) as f64;
                match sense {
                    Sense::Ge => activity - slack,
                    Sense::Le => activity + slack,
                    Sense::Eq => activity,
                }
            }
            None => rng.gen_range(-5..=5) as f64,
        };
        p.add_row(row, sense, rhs);
    }
    p
}
