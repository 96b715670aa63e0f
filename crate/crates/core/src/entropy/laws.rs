use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Atoms, GridDensity, SpectralMeasure};

/// Catalog of compactly supported laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum Law {
    /// Centered semicircle with the given variance.
    Semicircle { variance: f64 },
    /// Density `√(4 − t²)/π` on `[0, 2]`; second moment 1.
    QuarterCircle,
    /// Free Poisson law of rate `ratio ≥ 1` (no atom at 0).
    MarchenkoPastur { ratio: f64 },
    /// Density `1/(π√(1 − t²))` on `[−1, 1]`.
    Arcsine,
    Uniform { a: f64, b: f64 },
    Point { c: f64 },
    /// Weight `p` at `a` and `1 − p` at `b`.
    TwoPoint { p: f64, a: f64, b: f64 },
}

impl Law {
    pub fn name(&self) -> &'static str {
        match self {
            Law::Semicircle { .. } => "semicircle",
            Law::QuarterCircle => "quarter_circle",
            Law::MarchenkoPastur { .. } => "marchenko_pastur",
            Law::Arcsine => "arcsine",
            Law::Uniform { .. } => "uniform",
            Law::Point { .. } => "point",
            Law::TwoPoint { .. } => "two_point",
        }
    }

    /// The law as a spectral measure; densities use `n` grid nodes.
    pub fn measure(&self, n: usize) -> Result<SpectralMeasure> {
        match *self {
            Law::Semicircle { variance } => semicircle(variance, n),
            Law::QuarterCircle => quarter_circle(n),
            Law::MarchenkoPastur { ratio } => marchenko_pastur(ratio, n),
            Law::Arcsine => arcsine(n),
            Law::Uniform { a, b } => uniform(a, b, n),
            Law::Point { c } => Ok(point(c)),
            Law::TwoPoint { p, a, b } => two_point(p, a, b),
        }
    }
}

fn grid(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<SpectralMeasure> {
    Ok(SpectralMeasure::Grid(GridDensity::from_density(a, b, n, f)?))
}

pub fn semicircle(variance: f64, n: usize) -> Result<SpectralMeasure> {
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(Error::invalid(format!("semicircle variance must be positive, got {variance}")));
    }
    let r = 2.0 * variance.sqrt();
    grid(-r, r, n, |t| (r * r - t * t).max(0.0).sqrt() / (2.0 * PI * variance))
}

pub fn quarter_circle(n: usize) -> Result<SpectralMeasure> {
    grid(0.0, 2.0, n, |t| (4.0 - t * t).max(0.0).sqrt() / PI)
}

pub fn marchenko_pastur(ratio: f64, n: usize) -> Result<SpectralMeasure> {
    if !(ratio >= 1.0 && ratio.is_finite()) {
        return Err(Error::invalid(format!(
            "marchenko_pastur needs ratio ≥ 1 (smaller ratios carry an atom at 0), got {ratio}"
        )));
    }
    let lo = (1.0 - ratio.sqrt()).powi(2);
    let hi = (1.0 + ratio.sqrt()).powi(2);
    grid(lo, hi, n, move |t| ((t - lo) * (hi - t)).max(0.0).sqrt() / (2.0 * PI * t))
}

pub fn arcsine(n: usize) -> Result<SpectralMeasure> {
    grid(-1.0, 1.0, n, |t| 1.0 / (PI * (1.0 - t * t).sqrt()))
}

pub fn uniform(a: f64, b: f64, n: usize) -> Result<SpectralMeasure> {
    if !(a < b) {
        return Err(Error::invalid(format!("uniform law needs a < b, got [{a}, {b}]")));
    }
    Ok(SpectralMeasure::Grid(GridDensity::from_unnormalized(a, b, vec![1.0; n])?))
}

pub fn point(c: f64) -> SpectralMeasure {
    SpectralMeasure::point(c)
}

pub fn two_point(p: f64, a: f64, b: f64) -> Result<SpectralMeasure> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("two_point weight must lie in (0, 1), got {p}")));
    }
    Ok(SpectralMeasure::Atoms(Atoms::new(vec![a, b], vec![p, 1.0 - p])?))
}
