//! One-variable free entropy and the identities around it.

mod energy;
pub mod laws;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ext_f64;
use crate::spectral::{self, FunctionSpec, SpectralMeasure};

pub use laws::Law;

/// `3/4 + ½·log 2π`, the additive constant of the one-variable entropy.
pub fn free_entropy_constant() -> f64 {
    0.75 + 0.5 * (2.0 * std::f64::consts::PI).ln()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    EigenvalueEstimator,
}

/// An entropy or log-energy value; `−∞` is an ordinary value here.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub method: Method,
    #[serde(with = "ext_f64")]
    pub error_estimate: f64,
}

impl EntropyValue {
    fn neg_infinity(method: Method) -> Self {
        Self { value: f64::NEG_INFINITY, method, error_estimate: 0.0 }
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    fn shifted(self, c: f64) -> Self {
        Self { value: self.value + c, ..self }
    }
}

/// `∬ log|s − t| dm(s) dm(t)`.
///
/// Any atom pairs with itself, so atomic measures give `−∞`. Grid densities
/// use exact cell-pair integration; the error estimate is the change against
/// the same computation at half resolution.
pub fn log_energy(m: &SpectralMeasure) -> EntropyValue {
    match m {
        SpectralMeasure::Atoms(_) => EntropyValue::neg_infinity(Method::Quadrature),
        SpectralMeasure::Grid(g) => {
            let (value, error_estimate) = energy::grid_log_energy(g);
            EntropyValue { value, method: Method::Quadrature, error_estimate }
        }
    }
}

/// `χ^sa` of one self-adjoint variable with distribution `m`.
pub fn chi_sa_one(m: &SpectralMeasure) -> EntropyValue {
    log_energy(m).shifted(free_entropy_constant())
}

fn half_square() -> FunctionSpec {
    FunctionSpec::power(2.0).then(FunctionSpec::affine(0.5, 0.0))
}

/// `χ(ub)` for `u` Haar and `b ≥ 0` with distribution `mu_b`:
/// `χ^sa(b²/2) + 3/4 + ½·log 2π`.
///
/// The log energy of `b²/2` is evaluated in the variable `b`, as
/// `E(μ_b) + ∬ log((s + t)/2) dμ_b(s) dμ_b(t)`. A uniform grid in `b²/2` is a
/// poor representation when `μ_b` has a density blowing up at 0 (the image
/// then behaves like `y^{-3/4}` and the grid energy converges like `h^{1/2}`);
/// the grid in `b` has no such problem. [`chi_rdiag_via_pushforward`] keeps
/// the literal route.
pub fn chi_rdiag(mu_b: &SpectralMeasure) -> Result<EntropyValue> {
    let (lo, _) = mu_b.support();
    if lo < 0.0 {
        return Err(Error::domain(format!("support of b starts at {lo} < 0")));
    }
    let Some(g) = mu_b.as_grid() else {
        return Ok(EntropyValue::neg_infinity(Method::Quadrature));
    };
    let e = log_energy(mu_b);
    let f = half_square();
    let masses = g.cell_masses();
    let centers: Vec<f64> = (0..masses.len()).map(|i| 0.5 * (g.node(i) + g.node(i + 1))).collect();
    let fine = kernel_integral(&masses, &centers, &f);
    let coarse_masses: Vec<f64> = masses.chunks(2).map(|c| c.iter().sum()).collect();
    let coarse_centers: Vec<f64> = masses
        .chunks(2)
        .enumerate()
        .map(|(j, c)| {
            let (x0, x1) = (g.node(2 * j), g.node((2 * j + c.len()).min(g.n() - 1)));
            0.5 * (x0 + x1)
        })
        .collect();
    let coarse = kernel_integral(&coarse_masses, &coarse_centers, &f);
    Ok(EntropyValue {
        value: e.value + fine + 2.0 * free_entropy_constant(),
        method: Method::Quadrature,
        error_estimate: e.error_estimate + (fine - coarse).abs(),
    })
}

/// `χ(ub)` computed literally as `χ^sa` of the grid pushforward of `μ_b`
/// under `t ↦ t²/2`, plus the constant.
pub fn chi_rdiag_via_pushforward(mu_b: &SpectralMeasure) -> Result<EntropyValue> {
    let pushed = spectral::pushforward(mu_b, &half_square())?;
    Ok(chi_sa_one(&pushed).shifted(free_entropy_constant()))
}

/// `|χ(ub) − 2·χ^sa(2^{-1/2}x)|` where `x` is the symmetrization of `b`.
pub fn chi_symmetric_identity_defect(mu_b: &SpectralMeasure) -> Result<f64> {
    if mu_b.is_atomic() {
        return Err(Error::domain("identity defect is uninformative for atomic laws (both sides are −∞)"));
    }
    let lhs = chi_rdiag(mu_b)?;
    let x = spectral::symmetrize(mu_b)?.dilate(std::f64::consts::FRAC_1_SQRT_2)?;
    let rhs = 2.0 * chi_sa_one(&x).value;
    Ok((lhs.value - rhs).abs())
}

/// Upper bound `χ^sa(y*y/2) + 3/4 + ½·log 2π` on `χ(y)` given the
/// distribution `mu_yy` of `y*y`.
pub fn chi_upper_bound(mu_yy: &SpectralMeasure) -> Result<EntropyValue> {
    let pushed = spectral::pushforward(mu_yy, &FunctionSpec::affine(0.5, 0.0))?;
    Ok(chi_sa_one(&pushed).shifted(free_entropy_constant()))
}

/// `∬ log((f(s) − f(t))/(s − t)) dμ(s) dμ(t)` by the midpoint rule on the
/// grid cells, with `log f'` on the diagonal.
pub fn changevar_rhs(mu: &SpectralMeasure, f: &FunctionSpec) -> Result<f64> {
    let g = mu
        .as_grid()
        .ok_or_else(|| Error::domain("change of variables needs a density, not atoms"))?;
    f.validate()?;
    let masses = g.cell_masses();
    let centers: Vec<f64> = (0..masses.len()).map(|i| 0.5 * (g.node(i) + g.node(i + 1))).collect();
    Ok(kernel_integral(&masses, &centers, f))
}

fn kernel_integral(masses: &[f64], centers: &[f64], f: &FunctionSpec) -> f64 {
    let images: Vec<f64> = centers.iter().map(|&c| f.eval(c)).collect();
    let mut total = 0.0;
    for i in 0..masses.len() {
        if masses[i] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for j in 0..i {
            if masses[j] != 0.0 {
                row += masses[j] * ((images[i] - images[j]) / (centers[i] - centers[j])).ln();
            }
        }
        total += masses[i] * (2.0 * row + masses[i] * f.derivative(centers[i]).ln());
    }
    total
}

/// `|[E(f_*μ) − E(μ)] − ∬ log((f(s) − f(t))/(s − t)) dμ²|`.
pub fn changevar_defect(mu: &SpectralMeasure, f: &FunctionSpec) -> Result<f64> {
    Ok(changevar_terms(mu, f)?.defect())
}

/// Both sides of the change-of-variables identity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangevarTerms {
    pub energy_shift: f64,
    pub kernel_integral: f64,
}

impl ChangevarTerms {
    pub fn defect(&self) -> f64 {
        (self.energy_shift - self.kernel_integral).abs()
    }
}

pub fn changevar_terms(mu: &SpectralMeasure, f: &FunctionSpec) -> Result<ChangevarTerms> {
    if mu.is_atomic() {
        return Err(Error::domain("change of variables needs a density, not atoms"));
    }
    let pushed = spectral::pushforward(mu, f)?;
    let energy_shift = log_energy(&pushed).value - log_energy(mu).value;
    let kernel_integral = changevar_rhs(mu, f)?;
    Ok(ChangevarTerms { energy_shift, kernel_integral })
}

/// `(1/k²) Σ_{i≠j} log|λ_i − λ_j|`, the finite-`k` counterpart of the log
/// energy. Exact ties give `−∞`. The error estimate is the `log k / k` bias
/// scale; no bias correction is applied.
pub fn log_energy_estimator(eigs: &[f64]) -> Result<EntropyValue> {
    let k = eigs.len();
    if k < 2 {
        return Err(Error::invalid("the eigenvalue estimator needs at least two eigenvalues"));
    }
    if eigs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("eigenvalues must be finite"));
    }
    let mut sorted = eigs.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(EntropyValue::neg_infinity(Method::EigenvalueEstimator));
    }
    let mut sum = 0.0;
    for i in 0..k {
        for j in i + 1..k {
            sum += (sorted[j] - sorted[i]).ln();
        }
    }
    let kf = k as f64;
    Ok(EntropyValue {
        value: 2.0 * sum / (kf * kf),
        method: Method::EigenvalueEstimator,
        error_estimate: kf.ln() / kf,
    })
}

/// The `k` quantiles of `m` at levels `(i − ½)/k`.
pub fn quantile_spectrum(m: &SpectralMeasure, k: usize) -> Vec<f64> {
    (1..=k).map(|i| m.quantile((i as f64 - 0.5) / k as f64)).collect()
}
