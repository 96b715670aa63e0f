//! Measure geometry of the polar decomposition: Jacobians of `(v, p) ↦ vp`
//! and `p ↦ p²/2`, the volume of `U(k)`, and a goodness-of-fit check of the
//! singular values of Ginibre matrices.

use faer::Mat;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use crate::entropy::free_entropy_constant;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::models::ginibre;
use crate::parallel::par_map;
use crate::quadrature::gauss_legendre;
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct PolarPair {
    pub v: ComplexMatrix,
    pub p: ComplexMatrix,
}

/// `a = v·p` with `p = (a*a)^{1/2}`, from the SVD `a = U S V*`:
/// `v = U V*`, `p = V S V*`. For singular `a` the SVD's choice of singular
/// vectors completes `v`.
pub fn polar_decompose(a: &ComplexMatrix) -> Result<PolarPair> {
    let svd = a.svd()?;
    let v = svd.u.mul(&svd.v.adjoint());
    let vs = ComplexMatrix::from_fn(a.dim(), |i, j| svd.v[(i, j)] * svd.s[j]);
    let p = vs.mul(&svd.v.adjoint()).hermitian_part();
    Ok(PolarPair { v, p })
}

const PSD_TOL: f64 = 1e-9;

/// `−k² log 2 + Σ_{α,β} log(λ_α + λ_β)`.
fn log_pair_product(p: &ComplexMatrix) -> Result<f64> {
    if !p.is_self_adjoint(PSD_TOL * (1.0 + p.max_abs_entry())) {
        return Err(Error::domain("Jacobian needs a self-adjoint argument"));
    }
    let lambda = p.eigh_values()?;
    let scale = lambda.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if lambda.iter().any(|&l| l < -PSD_TOL * scale) {
        return Err(Error::domain(format!("matrix is not positive semidefinite (eigenvalue {:.3e})", lambda[0])));
    }
    let lambda: Vec<f64> = lambda.iter().map(|l| l.max(0.0)).collect();
    let k = lambda.len() as f64;
    let mut s = -k * k * std::f64::consts::LN_2;
    for &a in &lambda {
        for &b in &lambda {
            s += (a + b).ln();
        }
    }
    Ok(s)
}

/// `log det DP(p)` for `P(v, p) = vp` at `v = 1`; `−∞` when `p` is singular.
pub fn jacobian_dp(p: &ComplexMatrix) -> Result<f64> {
    log_pair_product(p)
}

/// `log det DS(p)` for `S(p) = p²/2` on self-adjoint matrices. It coincides
/// with [`jacobian_dp`] by construction.
pub fn jacobian_ds(p: &ComplexMatrix) -> Result<f64> {
    log_pair_product(p)
}

/// Orthonormal basis of the self-adjoint `k×k` matrices for
/// `⟨a, b⟩ = Re Tr(ab*)`.
pub fn self_adjoint_basis(k: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in a..k {
            if a == b {
                out.push(ComplexMatrix::from_fn(k, |i, j| C64::new((i == a && j == a) as u8 as f64, 0.0)));
            } else {
                out.push(ComplexMatrix::from_fn(k, |i, j| {
                    C64::new(if (i, j) == (a, b) || (i, j) == (b, a) { r } else { 0.0 }, 0.0)
                }));
                out.push(ComplexMatrix::from_fn(k, |i, j| {
                    C64::new(0.0, if (i, j) == (a, b) { -r } else if (i, j) == (b, a) { r } else { 0.0 })
                }));
            }
        }
    }
    out
}

fn expm(x: &ComplexMatrix) -> ComplexMatrix {
    let k = x.dim();
    let mut term = ComplexMatrix::identity(k);
    let mut sum = ComplexMatrix::identity(k);
    for n in 1..30 {
        term = term.mul(x).scale_real(1.0 / n as f64);
        sum = sum.add(&term);
    }
    sum
}

fn log_abs_det(columns: &[Vec<f64>]) -> f64 {
    let n = columns.len();
    let m = Mat::<f64>::from_fn(n, n, |i, j| columns[j][i]);
    m.as_ref().determinant().abs().ln()
}

fn coords(m: &ComplexMatrix, basis: &[ComplexMatrix]) -> Vec<f64> {
    basis.iter().map(|e| m.trace_of_product(&e.adjoint()).re).collect()
}

/// Step of the central differences.
pub const FD_STEP: f64 = 1e-5;

/// `log |det|` of the central-difference derivative of `(v, p) ↦ vp` at
/// `(1, p)`, over orthonormal bases of `u(k) ⊕ M_k^sa` and of `M_k`.
pub fn jacobian_dp_fd(p: &ComplexMatrix) -> f64 {
    let k = p.dim();
    let sa = self_adjoint_basis(k);
    let i = C64::new(0.0, 1.0);
    let skew: Vec<ComplexMatrix> = sa.iter().map(|e| e.scale(i)).collect();
    let mut out_basis = sa.clone();
    out_basis.extend(skew.iter().cloned());
    let h = FD_STEP;
    let mut cols = Vec::with_capacity(2 * k * k);
    for x in &skew {
        let plus = expm(&x.scale_real(h)).mul(p);
        let minus = expm(&x.scale_real(-h)).mul(p);
        cols.push(coords(&plus.sub(&minus).scale_real(0.5 / h), &out_basis));
    }
    for e in &sa {
        let plus = p.add(&e.scale_real(h));
        let minus = p.sub(&e.scale_real(h));
        cols.push(coords(&plus.sub(&minus).scale_real(0.5 / h), &out_basis));
    }
    log_abs_det(&cols)
}

/// `log |det|` of the central-difference derivative of `p ↦ p²/2` on
/// self-adjoint matrices.
pub fn jacobian_ds_fd(p: &ComplexMatrix) -> f64 {
    let sa = self_adjoint_basis(p.dim());
    let h = FD_STEP;
    let s = |m: &ComplexMatrix| m.mul(m).scale_real(0.5);
    let cols: Vec<Vec<f64>> = sa
        .iter()
        .map(|e| {
            let d = s(&p.add(&e.scale_real(h))).sub(&s(&p.sub(&e.scale_real(h))));
            coords(&d.scale_real(0.5 / h), &sa)
        })
        .collect();
    log_abs_det(&cols)
}

/// `log C_k` for the volume of `U(k)` under `⟨a, b⟩ = Re Tr(ab*)`:
/// `(k(k+1)/2)·log 2π − Σ_{j<k} log j!`.
pub fn volume_ck(k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let kf = k as f64;
    let log_factorials: f64 = (1..k).map(|j| ln_gamma(j as f64 + 1.0)).sum();
    Ok(0.5 * kf * (kf + 1.0) * (2.0 * std::f64::consts::PI).ln() - log_factorials)
}

/// `log C_k / k² + ½ log k − (3/4 + ½ log 2π)`, which tends to 0.
pub fn limck_residual(k: usize) -> Result<f64> {
    let kf = k as f64;
    Ok(volume_ck(k)? / (kf * kf) + 0.5 * kf.ln() - free_entropy_constant())
}

/// Significance level of the goodness-of-fit checks.
pub const SIGNIFICANCE: f64 = 1e-3;
/// Fewest samples accepted by [`push_measure_check`].
pub const MIN_PUSH_SAMPLES: usize = 10_000;

const BINS: usize = 16;
const RANGE: f64 = 4.0;
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// `chi_squared` for `k = 2`, `kolmogorov_smirnov` for `k = 1`.
    pub test: String,
    pub statistic: f64,
    pub degrees_of_freedom: Option<usize>,
    pub p_value: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushReport {
    pub k: usize,
    pub n_samples: usize,
    pub fit: FitReport,
    /// The same test with `λ₁` and `λ₂` taken from different samples; it
    /// should fail.
    pub negative_control: Option<FitReport>,
}

/// Unnormalized joint density of the ordered singular values
/// `λ₁ > λ₂` of a 2×2 Ginibre matrix with `E|g_ij|² = 1`.
pub fn ginibre2_singular_density(l1: f64, l2: f64) -> f64 {
    let d = l1 * l1 - l2 * l2;
    d * d * l1 * l2 * (-(l1 * l1 + l2 * l2)).exp()
}

/// Expected bin probabilities over `λ₁ > λ₂` on the `BINS×BINS` grid of
/// `[0, RANGE]²`, row index for `λ₁`.
fn expected_probabilities() -> Vec<f64> {
    let (x, w) = gauss_legendre(12);
    let h = RANGE / BINS as f64;
    let mut probs = vec![0.0; BINS * BINS];
    for i in 0..BINS {
        for j in 0..=i {
            let a = i as f64 * h;
            let mut s = 0.0;
            for (xp, wp) in x.iter().zip(&w) {
                let l1 = a + 0.5 * h * (xp + 1.0);
                // λ₂ over the bin, or over [a, λ₁] on the diagonal
                let (c, d) = if j == i { (a, l1) } else { (j as f64 * h, (j + 1) as f64 * h) };
                let mut inner = 0.0;
                for (yq, wq) in x.iter().zip(&w) {
                    inner += wq * ginibre2_singular_density(l1, c + 0.5 * (d - c) * (yq + 1.0));
                }
                s += wp * 0.5 * h * 0.5 * (d - c) * inner;
            }
            probs[i * BINS + j] = s;
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter().map(|p| p / total).collect()
}

fn chi_squared_fit(pairs: &[(f64, f64)]) -> Result<FitReport> {
    let h = RANGE / BINS as f64;
    let mut counts = vec![0usize; BINS * BINS];
    let mut inside = 0usize;
    for &(l1, l2) in pairs {
        if l1 < RANGE && l2 >= 0.0 {
            let i = (l1 / h) as usize;
            let j = ((l2 / h) as usize).min(i);
            counts[i * BINS + j] += 1;
            inside += 1;
        }
    }
    let probs = expected_probabilities();
    let n = inside as f64;
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (c, p) in counts.iter().zip(&probs) {
        let e = n * p;
        if e < MIN_EXPECTED {
            pooled_obs += *c as f64;
            pooled_exp += e;
        } else {
            stat += (*c as f64 - e).powi(2) / e;
            bins += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    let dof = bins.saturating_sub(1).max(1);
    let dist = ChiSquared::new(dof as f64).map_err(|e| Error::invalid(e.to_string()))?;
    let p_value = dist.sf(stat);
    Ok(FitReport {
        test: "chi_squared".into(),
        statistic: stat,
        degrees_of_freedom: Some(dof),
        p_value,
        threshold: SIGNIFICANCE,
        pass: p_value > SIGNIFICANCE,
    })
}

/// Asymptotic Kolmogorov tail `P(√n·D > x)`.
fn kolmogorov_sf(x: f64) -> f64 {
    if x < 0.2 {
        return 1.0;
    }
    let mut s = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = (-2.0 * jf * jf * x * x).exp();
        s += if j % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test of `values` against `cdf`.
pub fn ks_test(values: &[f64], cdf: impl Fn(f64) -> f64) -> FitReport {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in v.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    // finite-n correction of the asymptotic law
    let p_value = kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    FitReport {
        test: "kolmogorov_smirnov".into(),
        statistic: d,
        degrees_of_freedom: None,
        p_value,
        threshold: SIGNIFICANCE,
        pass: p_value > SIGNIFICANCE,
    }
}

/// Two-sample KS test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> FitReport {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < n && j < m {
        let t = x[i].min(y[j]);
        while i < n && x[i] <= t {
            i += 1;
        }
        while j < m && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    let p_value = kolmogorov_sf((en + 0.12 + 0.11 / en) * d);
    FitReport {
        test: "kolmogorov_smirnov_two_sample".into(),
        statistic: d,
        degrees_of_freedom: None,
        p_value,
        threshold: SIGNIFICANCE,
        pass: p_value > SIGNIFICANCE,
    }
}

/// Samples unit-variance Ginibre matrices, takes the eigenvalues of their
/// positive parts and tests them against the density predicted by the polar
/// change of variables: `∝ r e^{−r²}` for `k = 1`, and
/// `∝ (λ₁² − λ₂²)² λ₁λ₂ e^{−(λ₁² + λ₂²)}` for `k = 2`.
pub fn push_measure_check(k: usize, n_samples: usize, rng: RngStream, workers: usize) -> Result<PushReport> {
    if n_samples < MIN_PUSH_SAMPLES {
        return Err(Error::InsufficientSamples { got: n_samples, required: MIN_PUSH_SAMPLES });
    }
    if !(k == 1 || k == 2) {
        return Err(Error::invalid(format!("push check is implemented for k = 1, 2, got {k}")));
    }
    let svals = par_map(n_samples, workers, |i| -> Result<Vec<f64>> {
        let g = ginibre(k, 1.0, rng.substream(i as u64))?;
        polar_decompose(&g)?.p.eigh_values().map(|mut l| {
            l.reverse();
            l
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    if k == 1 {
        let r: Vec<f64> = svals.iter().map(|s| s[0]).collect();
        let fit = ks_test(&r, |x| 1.0 - (-x * x).exp());
        return Ok(PushReport { k, n_samples, fit, negative_control: None });
    }
    let pairs: Vec<(f64, f64)> = svals.iter().map(|s| (s[0], s[1])).collect();
    let fit = chi_squared_fit(&pairs)?;
    let shuffled: Vec<(f64, f64)> = (0..n_samples)
        .map(|i| {
            let (a, b) = (svals[i][0], svals[(i + 1) % n_samples][1]);
            (a.max(b), a.min(b))
        })
        .collect();
    let negative_control = Some(chi_squared_fit(&shuffled)?);
    Ok(PushReport { k, n_samples, fit, negative_control })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_polar_form() {
        let pp = polar_decompose(&ComplexMatrix::from_real_diagonal(&[-2.0])).unwrap();
        assert!((pp.v[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((pp.p[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn jacobian_closed_forms() {
        assert!(jacobian_dp(&ComplexMatrix::identity(3)).unwrap().abs() < 1e-12);
        assert!((jacobian_dp(&ComplexMatrix::from_real_diagonal(&[3.0])).unwrap() - 3f64.ln()).abs() < 1e-12);
        let p = ComplexMatrix::from_real_diagonal(&[1.0, 3.0]);
        assert!((jacobian_ds(&p).unwrap() - 12f64.ln()).abs() < 1e-12);
        assert_eq!(jacobian_dp(&ComplexMatrix::zeros(2)).unwrap(), f64::NEG_INFINITY);
        assert!(jacobian_dp(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = self_adjoint_basis(3);
        assert_eq!(b.len(), 9);
        for (i, x) in b.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                let ip = x.trace_of_product(&y.adjoint()).re;
                assert!((ip - (i == j) as u8 as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn small_volumes() {
        let l2p = (2.0 * std::f64::consts::PI).ln();
        assert!((volume_ck(1).unwrap() - l2p).abs() < 1e-14);
        assert!((volume_ck(2).unwrap() - 3.0 * l2p).abs() < 1e-14);
    }

    #[test]
    fn expected_probabilities_sum_to_one() {
        let p = expected_probabilities();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&x| x >= 0.0));
    }
}
