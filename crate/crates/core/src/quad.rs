//! Small quadrature helpers shared by the kernel validation and error metrics.

/// Composite Simpson rule on `intervals` equal sub-intervals of `[a, b]`.
///
/// `intervals` is rounded up to the next even number.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let step = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + step * i as f64);
    }
    acc * step / 3.0
}

/// Uniform grid of `grid` nodes on `[a, b]` merged with the `mandatory` nodes
/// that fall inside the interval. The result is sorted and deduplicated.
pub fn merged_grid(a: f64, b: f64, grid: usize, mandatory: &[f64]) -> Vec<f64> {
    let grid = grid.max(2);
    let step = (b - a) / (grid - 1) as f64;
    let mut nodes: Vec<f64> = (0..grid).map(|i| a + step * i as f64).collect();
    nodes[grid - 1] = b;
    nodes.extend(mandatory.iter().copied().filter(|t| *t > a && *t < b));
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|x, y| (*x - *y).abs() <= 1e-15);
    nodes
}

/// Composite trapezoid rule over the given (sorted) nodes.
pub fn trapezoid_on<F: Fn(f64) -> f64>(f: F, nodes: &[f64]) -> f64 {
    let mut acc = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &t in nodes {
        let v = f(t);
        if let Some((t0, v0)) = prev {
            acc += 0.5 * (t - t0) * (v + v0);
        }
        prev = Some((t, v));
    }
    acc
}
