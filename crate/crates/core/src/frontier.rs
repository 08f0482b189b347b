//! True frontier functions and uniform sampling from the region below them.
//!
//! A frontier is a positive piecewise-linear function on `[0, 1]` given by its
//! knots. Outside `[0, 1]` it is zero. The support is the set
//! `{(x, y) : 0 <= x <= 1, 0 <= y <= f(x)}`.

use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// One knot of a piecewise-linear frontier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub v: f64,
}

/// Positive piecewise-linear frontier on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrontierRecord", into = "FrontierRecord")]
pub struct FrontierFunction {
    knots: Vec<Knot>,
    f_min: f64,
    f_max: f64,
    lipschitz: f64,
    integral: f64,
}

#[derive(Serialize, Deserialize)]
struct FrontierRecord {
    knots: Vec<(f64, f64)>,
}

impl TryFrom<FrontierRecord> for FrontierFunction {
    type Error = crate::Error;

    fn try_from(r: FrontierRecord) -> Result<Self> {
        FrontierFunction::new(r.knots.into_iter().map(|(x, v)| Knot { x, v }).collect())
    }
}

impl From<FrontierFunction> for FrontierRecord {
    fn from(f: FrontierFunction) -> Self {
        FrontierRecord {
            knots: f.knots.iter().map(|k| (k.x, k.v)).collect(),
        }
    }
}

impl FrontierFunction {
    /// Builds a frontier from knots. Abscissas must increase strictly from 0
    /// to 1 and every value must be positive and finite.
    pub fn new(knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return invalid("a frontier needs at least two knots");
        }
        if knots[0].x != 0.0 || knots[knots.len() - 1].x != 1.0 {
            return invalid("frontier knots must start at x = 0 and end at x = 1");
        }
        for w in knots.windows(2) {
            if w[1].x.is_nan() || w[1].x <= w[0].x {
                return invalid("frontier knot abscissas must be strictly increasing");
            }
        }
        if knots.iter().any(|k| !k.v.is_finite() || k.v <= 0.0 || !k.x.is_finite()) {
            return invalid("frontier values must be finite and strictly positive");
        }

        let f_min = knots.iter().map(|k| k.v).fold(f64::INFINITY, f64::min);
        let f_max = knots.iter().map(|k| k.v).fold(0.0, f64::max);
        let mut lipschitz: f64 = 0.0;
        let mut integral = 0.0;
        for w in knots.windows(2) {
            let dx = w[1].x - w[0].x;
            lipschitz = lipschitz.max((w[1].v - w[0].v).abs() / dx);
            integral += 0.5 * dx * (w[0].v + w[1].v);
        }
        Ok(Self {
            knots,
            f_min,
            f_max,
            lipschitz,
            integral,
        })
    }

    /// Frontier from `(x, v)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(x, v)| Knot { x, v }).collect())
    }

    /// Constant frontier `f = c` on `[0, 1]`.
    pub fn constant(c: f64) -> Result<Self> {
        Self::from_pairs(&[(0.0, c), (1.0, c)])
    }

    /// The benchmark frontier used in the simulation tables:
    ///
    /// `0.1 + 5(x-0.1)+ - 5(x-0.2)+ + (x-0.5)+ - 9(x-0.8)+ + 8(x-0.9)+`
    pub fn benchmark() -> Self {
        Self::from_pairs(&[
            (0.0, 0.1),
            (0.1, 0.1),
            (0.2, 0.6),
            (0.5, 0.6),
            (0.8, 0.9),
            (0.9, 0.1),
            (1.0, 0.1),
        ])
        .expect("benchmark knots are valid")
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    /// Knot abscissas, useful as mandatory quadrature nodes.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.knots.iter().map(|k| k.x).collect()
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }

    /// Largest absolute slope between consecutive knots.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Exact integral of the frontier over `[0, 1]` (the area of the support).
    pub fn integral(&self) -> f64 {
        self.integral
    }

    /// Linear interpolation on `[0, 1]`, zero elsewhere.
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        let seg = self.knots.partition_point(|k| k.x <= x);
        if seg >= self.knots.len() {
            return self.knots[self.knots.len() - 1].v;
        }
        let (a, b) = (self.knots[seg - 1], self.knots[seg]);
        a.v + (b.v - a.v) * (x - a.x) / (b.x - a.x)
    }

    /// Reads a frontier from CSV with header `knot_x,knot_v`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        check_header(rdr.headers()?, &["knot_x", "knot_v"])?;
        let mut pairs = Vec::new();
        for rec in rdr.deserialize() {
            let (x, v): (f64, f64) = rec?;
            pairs.push((x, v));
        }
        Self::from_pairs(&pairs)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["knot_x", "knot_v"])?;
        for k in &self.knots {
            w.serialize((k.x, k.v))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// A point of the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Observations `(X_i, Y_i)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sample {
    points: Vec<Point>,
}

impl Sample {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(x, y)| Point { x, y }).collect())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.x)
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.y)
    }

    pub fn max_y(&self) -> f64 {
        self.ys().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn require_nonempty(&self) -> Result<()> {
        if self.points.is_empty() {
            return invalid("the sample must contain at least one point");
        }
        if self.points.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return invalid("sample coordinates must be finite");
        }
        Ok(())
    }

    /// Reads a sample from CSV with header `x,y`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        check_header(rdr.headers()?, &["x", "y"])?;
        let points = rdr
            .deserialize::<Point>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self::new(points))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

fn check_header(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let found: Vec<&str> = found.iter().map(str::trim).collect();
    if found != expected {
        return invalid(format!(
            "expected CSV header `{}`, found `{}`",
            expected.join(","),
            found.join(",")
        ));
    }
    Ok(())
}

/// Mixes a master seed with a stream index (SplitMix64 finalizer applied to
/// `master + golden_gamma * (index + 1)`).
///
/// Every replication draws from `derive_seed(master, r)`, so results depend on
/// the index only, never on execution order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `n` points uniformly from the support of `f` by rejection from
/// `[0, 1] x [0, f_max]`.
pub fn sample_support(f: &FrontierFunction, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return invalid("sample size must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let x: f64 = rng.gen();
        let y = rng.gen::<f64>() * f.f_max();
        if y <= f.eval(x) {
            points.push(Point { x, y });
        }
    }
    Ok(Sample::new(points))
}
