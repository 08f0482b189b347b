use std::fmt::Write as _;

use super::{EstimatorSpec, SimulationReport};

/// One printed row, in the column order `estimate h L M mean(Δ_N)
/// st-dev(Δ_N) mean(np) st-dev(np)`.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub estimate: String,
    pub h: Option<f64>,
    pub l: Option<f64>,
    pub m: Option<usize>,
    pub mean_delta: f64,
    pub std_delta: f64,
    pub mean_np: f64,
    pub std_np: f64,
}

impl TableRow {
    pub fn from_report(r: &SimulationReport) -> Self {
        let (h, l, m) = match r.config.estimator {
            EstimatorSpec::Kernel { h } | EstimatorSpec::Modified { h, .. } | EstimatorSpec::Partition { h, .. } => {
                (Some(h), None, None)
            }
            EstimatorSpec::Fourier { l, m } => (None, Some(l), Some(m)),
        };
        Self {
            estimate: r.config.estimator.label().to_string(),
            h,
            l,
            m,
            mean_delta: r.mean_delta,
            std_delta: r.std_delta,
            mean_np: r.mean_np,
            std_np: r.std_np,
        }
    }
}

/// Fixed-width table with a header line.
pub fn format_table(rows: &[TableRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<10} {:>7} {:>7} {:>4} {:>12} {:>14} {:>10} {:>12}",
        "estimate", "h", "L", "M", "mean(Δ_N)", "st-dev(Δ_N)", "mean(np)", "st-dev(np)"
    );
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.3}"));
    for r in rows {
        let _ = writeln!(
            out,
            "{:<10} {:>7} {:>7} {:>4} {:>12.3} {:>14.3} {:>10.3} {:>12.3}",
            r.estimate,
            opt(r.h),
            opt(r.l),
            r.m.map_or(String::new(), |m| m.to_string()),
            r.mean_delta,
            r.std_delta,
            r.mean_np,
            r.std_np
        );
    }
    out
}
