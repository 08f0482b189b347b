//! Smoothing kernels and their constants.
//!
//! Every family here is even, nonnegative, integrates to one and is Lipschitz.
//! The finite-support families vanish outside `[-1, 1]`.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad::simpson;

/// Kernel families selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    #[default]
    Epanechnikov,
    Triangular,
    Biweight,
    Gaussian,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::Epanechnikov,
        KernelFamily::Triangular,
        KernelFamily::Biweight,
        KernelFamily::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Triangular => "triangular",
            KernelFamily::Biweight => "biweight",
            KernelFamily::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown kernel `{s}` (expected epanechnikov | triangular | biweight | gaussian)"
                ))
            })
    }
}

/// Analytic constants of a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConstants {
    /// `max K(t)`
    pub k_max: f64,
    /// Lipschitz constant of `K`.
    pub lipschitz: f64,
    /// `∫ K(t)^2 dt`
    pub c0: f64,
    /// `∫ t^2 K(t) dt`
    pub c2: f64,
    /// Half-width of the support; infinite for the gaussian.
    pub support_radius: f64,
}

/// A kernel family with an optional multiplicative scale.
///
/// The scale is 1 for every kernel used in estimation; other values only
/// exist to exercise the assumption checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    family: KernelFamily,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel::new(KernelFamily::default())
    }
}

impl From<KernelFamily> for Kernel {
    fn from(family: KernelFamily) -> Self {
        Kernel::new(family)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.scale == 1.0 {
            write!(f, "{}", self.family)
        } else {
            write!(f, "{} x{}", self.family, self.scale)
        }
    }
}

/// Truncation radius used when integrating the gaussian numerically. The mass
/// beyond it is below `1e-20`.
pub const GAUSSIAN_TRUNCATION: f64 = 10.0;

impl Kernel {
    pub fn new(family: KernelFamily) -> Self {
        Self { family, scale: 1.0 }
    }

    /// `scale * K(t)`. Not a valid estimation kernel unless `scale == 1`.
    pub fn scaled(family: KernelFamily, scale: f64) -> Self {
        Self { family, scale }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn has_finite_support(&self) -> bool {
        self.family != KernelFamily::Gaussian
    }

    /// Support half-width, or [`GAUSSIAN_TRUNCATION`] for the gaussian.
    pub fn effective_radius(&self) -> f64 {
        if self.has_finite_support() {
            1.0
        } else {
            GAUSSIAN_TRUNCATION
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        let v = match self.family {
            KernelFamily::Epanechnikov => {
                if a < 1.0 {
                    0.75 * (1.0 - a * a)
                } else {
                    0.0
                }
            }
            KernelFamily::Triangular => (1.0 - a).max(0.0),
            KernelFamily::Biweight => {
                if a < 1.0 {
                    let u = 1.0 - a * a;
                    15.0 / 16.0 * u * u
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => (-0.5 * a * a).exp() / (2.0 * PI).sqrt(),
        };
        self.scale * v
    }

    /// Rescaled kernel `K_h(t) = K(t / h) / h`.
    #[inline]
    pub fn eval_scaled(&self, h: Bandwidth, t: f64) -> f64 {
        self.eval(t / h.get()) / h.get()
    }

    pub fn constants(&self) -> KernelConstants {
        let s = self.scale;
        let (k_max, lipschitz, c0, c2, support_radius) = match self.family {
            KernelFamily::Epanechnikov => (0.75, 1.5, 0.6, 0.2, 1.0),
            KernelFamily::Triangular => (1.0, 1.0, 2.0 / 3.0, 1.0 / 6.0, 1.0),
            // |K'| = (15/4)|t|(1 - t^2) peaks at t = 1/sqrt(3)
            KernelFamily::Biweight => (15.0 / 16.0, 5.0 / (2.0 * 3f64.sqrt()), 5.0 / 7.0, 1.0 / 7.0, 1.0),
            // |K'| = |t| phi(t) peaks at t = 1
            KernelFamily::Gaussian => {
                let norm = 1.0 / (2.0 * PI).sqrt();
                (norm, norm / E.sqrt(), 1.0 / (2.0 * PI.sqrt()), 1.0, f64::INFINITY)
            }
        };
        KernelConstants {
            k_max: s * k_max,
            lipschitz: s * lipschitz,
            c0: s * s * c0,
            c2: s * c2,
            support_radius,
        }
    }
}

/// Positive smoothing bandwidth `h`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return invalid(format!("bandwidth must be positive and finite, got {h}"));
        }
        Ok(Self(h))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Bandwidth {
    type Error = Error;

    fn try_from(h: f64) -> Result<Self> {
        Bandwidth::new(h)
    }
}

impl From<Bandwidth> for f64 {
    fn from(h: Bandwidth) -> f64 {
        h.0
    }
}

/// One assumption check with the value measured for it.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub expected: f64,
}

/// Result of checking a kernel against symmetry, normalization, Lipschitz
/// continuity and finiteness of its second moments.
#[derive(Debug, Clone, Serialize)]
pub struct KernelValidation {
    pub kernel: String,
    pub symmetry: Check,
    pub normalization: Check,
    pub lipschitz: Check,
    pub moments: Check,
    pub finite_support: bool,
    pub constants: KernelConstants,
    /// Numerically integrated `∫ K^2` and `∫ t^2 K`.
    pub c0_measured: f64,
    pub c2_measured: f64,
}

impl KernelValidation {
    pub fn all_passed(&self) -> bool {
        self.symmetry.passed && self.normalization.passed && self.lipschitz.passed && self.moments.passed
    }

    /// True when the kernel may be used by the capped estimator without an override.
    pub fn eligible_for_capped_fit(&self) -> bool {
        self.all_passed() && self.finite_support
    }
}

const QUAD_INTERVALS: usize = 10_000;
const PROBES: usize = 10_000;

/// Checks the kernel assumptions by probing and composite Simpson quadrature
/// on `10^4 + 1` nodes over the (truncated) support.
pub fn validate_kernel(k: &Kernel) -> KernelValidation {
    let r = k.effective_radius();
    let constants = k.constants();

    let probe = |i: usize| -r - 0.5 + (2.0 * r + 1.0) * i as f64 / PROBES as f64;
    let asym = (0..=PROBES)
        .map(|i| {
            let t = probe(i);
            let (a, b) = (k.eval(t), k.eval(-t));
            if a < 0.0 {
                f64::INFINITY
            } else {
                (a - b).abs()
            }
        })
        .fold(0.0, f64::max);

    let mass = simpson(|t| k.eval(t), -r, r, QUAD_INTERVALS);

    let mut slope: f64 = 0.0;
    for i in 0..PROBES {
        let (s, t) = (probe(i), probe(i + 1));
        slope = slope.max((k.eval(t) - k.eval(s)).abs() / (t - s));
    }

    let c0 = simpson(|t| k.eval(t).powi(2), -r, r, QUAD_INTERVALS);
    let c2 = simpson(|t| t * t * k.eval(t), -r, r, QUAD_INTERVALS);
    let moments_ok = c0.is_finite()
        && c2.is_finite()
        && (c0 - constants.c0).abs() <= 1e-6 * constants.c0.max(1.0)
        && (c2 - constants.c2).abs() <= 1e-6 * constants.c2.max(1.0);

    KernelValidation {
        kernel: k.to_string(),
        symmetry: Check {
            name: "symmetry",
            passed: asym <= 1e-15,
            measured: asym,
            expected: 0.0,
        },
        normalization: Check {
            name: "normalization",
            passed: (mass - 1.0).abs() <= 1e-6,
            measured: mass,
            expected: 1.0,
        },
        lipschitz: Check {
            name: "lipschitz",
            passed: slope <= constants.lipschitz * (1.0 + 1e-9),
            measured: slope,
            expected: constants.lipschitz,
        },
        moments: Check {
            name: "second moments",
            passed: moments_ok,
            measured: c0,
            expected: constants.c0,
        },
        finite_support: k.has_finite_support(),
        constants,
        c0_measured: c0,
        c2_measured: c2,
    }
}
