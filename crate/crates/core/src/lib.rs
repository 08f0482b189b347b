//! Frontier estimation by linear programming.
//!
//! Given points drawn uniformly below an unknown positive function `f` on
//! `[0, 1]`, the estimators in this crate build the smallest-surface function
//! of a given form that lies above every point:
//!
//! * a nonnegative kernel expansion over the sample abscissas, whose weights
//!   solve a covering linear program (and are typically sparse),
//! * the same expansion with each weight capped at `C_alpha / N`,
//! * a trigonometric expansion with a Lipschitz budget,
//! * and, for comparison, a smoothed histogram of per-slice maxima.
//!
//! The [`lp`] module carries the dense simplex solver behind the first three,
//! with duality certificates and a brute-force oracle for small programs.
//! [`harness`] replicates fits over many seeded samples.
//!
//! ```
//! use frontier_lp::{estimators, frontier, kernel, metrics};
//!
//! let f = frontier::FrontierFunction::benchmark();
//! let sample = frontier::sample_support(&f, 25, 7)?;
//! let k = kernel::Kernel::new(kernel::KernelFamily::Gaussian);
//! let fit = estimators::fit_kernel_estimator(&sample, &k, kernel::Bandwidth::new(0.14)?)?;
//! assert!(metrics::coverage_check(&fit, &sample) <= 1e-7);
//! assert!(metrics::l1_error(&fit, &f, 2001)? < 0.51);
//! # Ok::<(), frontier_lp::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimators;
pub mod frontier;
pub mod harness;
pub mod kernel;
pub mod lp;
pub mod metrics;
pub mod quad;

pub use error::{Error, Result};

// The guide's code listings are compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/frontier.md")]
    mod frontier {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/linear-programs.md")]
    mod linear_programs {}
    #[doc = include_str!("../../../book/src/estimators.md")]
    mod estimators {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
}
