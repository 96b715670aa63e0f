//! Spectral measures and the operations connecting matrices to them.

mod csv;
mod function;
mod measure;

pub use csv::{from_csv, to_csv};
pub use function::FunctionSpec;
pub use measure::{Atoms, GridDensity, SpectralMeasure};

pub(crate) use csv::fmt17;
pub(crate) use measure::node;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Default node count for grid densities.
pub const DEFAULT_GRID_NODES: usize = 4096;

const SELF_ADJOINT_TOL: f64 = 1e-10;

/// Empirical spectral distribution: the `k` eigenvalues of `a`, each with
/// weight `1/k`.
///
/// With `self_adjoint` set the matrix must be Hermitian within `1e-10` and the
/// Hermitian eigensolver is used. Otherwise the general eigensolver runs and
/// every eigenvalue must be real to within `1e-10·(1 + ‖a‖_F)`.
pub fn esd(a: &ComplexMatrix, self_adjoint: bool) -> Result<SpectralMeasure> {
    let eigs = if self_adjoint {
        if !a.is_self_adjoint(SELF_ADJOINT_TOL) {
            return Err(Error::domain(format!(
                "matrix is not self-adjoint (defect {:.3e})",
                a.hermitian_defect()
            )));
        }
        a.eigh_values()?
    } else {
        let tol = SELF_ADJOINT_TOL * (1.0 + a.frobenius_norm());
        let eigs = a.eigenvalues()?;
        if let Some(z) = eigs.iter().find(|z| z.im.abs() > tol) {
            return Err(Error::domain(format!("eigenvalue {z} is not real")));
        }
        eigs.iter().map(|z| z.re).collect()
    };
    Ok(SpectralMeasure::Atoms(Atoms::empirical(&eigs)?))
}

/// The eigenvalue distribution of `a*a/2`, from the singular values of `a`.
pub fn singular_square_measure(a: &ComplexMatrix) -> Result<SpectralMeasure> {
    let s = a.singular_values()?;
    let vals: Vec<f64> = s.iter().map(|x| 0.5 * x * x).collect();
    Ok(SpectralMeasure::Atoms(Atoms::empirical(&vals)?))
}

fn require_nonnegative_support(m: &SpectralMeasure) -> Result<()> {
    let (lo, _) = m.support();
    if lo < 0.0 {
        return Err(Error::domain(format!("support starts at {lo} < 0")));
    }
    Ok(())
}

/// Image of `m` under `f`.
///
/// Atoms move with their weights. A grid density is rebuilt on uniform nodes
/// over `[f(a), f(b)]` from the exact mass the source interpolant puts in the
/// preimage of every new cell, so singular Jacobians at the ends (`t ↦ t²`
/// near 0) cost no accuracy.
pub fn pushforward(m: &SpectralMeasure, f: &FunctionSpec) -> Result<SpectralMeasure> {
    require_nonnegative_support(m)?;
    f.validate()?;
    match m {
        SpectralMeasure::Atoms(at) => {
            let locs = at.locations().iter().map(|&x| f.eval(x)).collect();
            Ok(SpectralMeasure::Atoms(Atoms::new(locs, at.weights().to_vec())?))
        }
        SpectralMeasure::Grid(g) => Ok(SpectralMeasure::Grid(pushforward_grid(g, f)?)),
    }
}

fn pushforward_grid(g: &GridDensity, f: &FunctionSpec) -> Result<GridDensity> {
    if let FunctionSpec::Affine { a, c } = *f {
        if a == 1.0 && c == 0.0 {
            return Ok(g.clone());
        }
        let values = g.values().iter().map(|v| v / a).collect();
        return GridDensity::from_unnormalized(a * g.a() + c, a * g.b() + c, values);
    }
    let inv = f.inverse();
    let n = g.n();
    let (ya, yb) = (f.eval(g.a()), f.eval(g.b()));
    if !(yb > ya) {
        return Err(Error::domain("pushforward collapses the support to a point"));
    }
    let prefix = g.cumulative_masses();
    let preimage = |i: usize| match i {
        0 => g.a(),
        _ if i + 1 == n => g.b(),
        _ => inv.eval(node(ya, yb, n, i)).clamp(g.a(), g.b()),
    };
    let values = (0..n)
        .map(|i| {
            let x = preimage(i);
            let rho = g.density_at(x);
            if rho == 0.0 {
                0.0
            } else {
                rho / f.derivative(x)
            }
        })
        .collect();
    let cdf = |x: f64| g.cdf_with_prefix(&prefix, x);
    GridDensity::from_samples(ya, yb, values, |i| (cdf(preimage(i + 1)) - cdf(preimage(i))).max(0.0))
}

fn is_symmetric(m: &SpectralMeasure) -> bool {
    match m {
        SpectralMeasure::Atoms(at) => {
            let (l, w) = (at.locations(), at.weights());
            let n = l.len();
            (0..n).all(|i| l[i] == -l[n - 1 - i] && w[i] == w[n - 1 - i])
        }
        SpectralMeasure::Grid(g) => {
            let v = g.values();
            g.a() == -g.b() && (0..v.len()).all(|i| v[i] == v[v.len() - 1 - i])
        }
    }
}

/// The symmetric law `μ_x(A) = ½μ_b(A ∩ [0,∞)) + ½μ_b(−A ∩ [0,∞))`.
///
/// A measure that is already symmetric about 0 is returned unchanged.
pub fn symmetrize(mu_b: &SpectralMeasure) -> Result<SpectralMeasure> {
    if is_symmetric(mu_b) {
        return Ok(mu_b.clone());
    }
    require_nonnegative_support(mu_b)?;
    match mu_b {
        SpectralMeasure::Atoms(at) => {
            let mut locs = Vec::with_capacity(2 * at.len());
            let mut ws = Vec::with_capacity(2 * at.len());
            for (&x, &w) in at.locations().iter().zip(at.weights()) {
                if x == 0.0 {
                    locs.push(0.0);
                    ws.push(w);
                } else {
                    locs.extend([-x, x]);
                    ws.extend([0.5 * w, 0.5 * w]);
                }
            }
            Ok(SpectralMeasure::Atoms(Atoms::new(locs, ws)?))
        }
        SpectralMeasure::Grid(g) => {
            let g = if g.a() > 0.0 {
                // extend to [0, b] at the same step, zero below a
                let n = ((g.b() / g.step()).round() as usize + 1).max(2);
                let values = (0..n).map(|i| g.density_at(node(0.0, g.b(), n, i))).collect();
                GridDensity::from_unnormalized(0.0, g.b(), values)?
            } else {
                g.clone()
            };
            let v = g.values();
            let n = v.len();
            let mut values = Vec::with_capacity(2 * n - 1);
            values.extend(v.iter().rev().map(|x| 0.5 * x));
            values.extend(v[1..].iter().map(|x| 0.5 * x));
            Ok(SpectralMeasure::Grid(GridDensity::from_unnormalized(-g.b(), g.b(), values)?))
        }
    }
}

/// `∫ tʲ dm` for `j = 0..=n`.
///
/// Grid moments are exact for the piecewise-linear density, so no quadrature
/// convergence issue can arise.
pub fn measure_moments(m: &SpectralMeasure, n: usize) -> Vec<f64> {
    m.moments(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::C64;

    fn qc(n: usize) -> SpectralMeasure {
        SpectralMeasure::Grid(
            GridDensity::from_density(0.0, 2.0, n, |t| (4.0 - t * t).max(0.0).sqrt() / std::f64::consts::PI).unwrap(),
        )
    }

    #[test]
    fn esd_of_identity_and_diagonal() {
        let m = esd(&ComplexMatrix::identity(3), true).unwrap();
        assert_eq!(m, SpectralMeasure::point(1.0));
        let d = ComplexMatrix::from_real_diagonal(&[3.0, 1.0, 2.0]);
        let m = esd(&d, false).unwrap();
        let at = m.as_atoms().unwrap();
        assert_eq!(at.locations(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn esd_rejects_non_hermitian() {
        let a = ComplexMatrix::from_fn(2, |i, j| if i < j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        assert!(esd(&a, true).is_err());
    }

    #[test]
    fn singular_square_of_scaled_identity() {
        let m = singular_square_measure(&ComplexMatrix::identity(4).scale_real(2.0)).unwrap();
        let at = m.as_atoms().unwrap();
        assert_eq!(at.len(), 1);
        assert!((at.locations()[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn pushforward_atoms_and_uniform() {
        let m = pushforward(&SpectralMeasure::point(1.0), &FunctionSpec::power(2.0)).unwrap();
        assert_eq!(m, SpectralMeasure::point(1.0));
        let u = SpectralMeasure::Grid(GridDensity::from_unnormalized(0.0, 1.0, vec![1.0; 11]).unwrap());
        let m = pushforward(&u, &FunctionSpec::affine(2.0, 0.0)).unwrap();
        let g = m.as_grid().unwrap();
        assert_eq!((g.a(), g.b()), (0.0, 2.0));
        assert!(g.values().iter().all(|v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn pushforward_rejects_negative_support() {
        let m = SpectralMeasure::Atoms(Atoms::empirical(&[-1.0, 1.0]).unwrap());
        assert!(pushforward(&m, &FunctionSpec::power(2.0)).is_err());
    }

    #[test]
    fn pushforward_square_of_quarter_circle_keeps_moments() {
        // moments of b² are even moments of b: 1, 2, 5
        let m = pushforward(&qc(4096), &FunctionSpec::power(2.0)).unwrap();
        let mo = m.moments(3);
        for (got, want) in mo[1..].iter().zip([1.0, 2.0, 5.0]) {
            assert!((got - want).abs() < 1e-4, "{got} vs {want}");
        }
    }

    #[test]
    fn symmetrize_atoms() {
        let m = symmetrize(&SpectralMeasure::point(1.0)).unwrap();
        let at = m.as_atoms().unwrap();
        assert_eq!(at.locations(), &[-1.0, 1.0]);
        assert_eq!(at.weights(), &[0.5, 0.5]);
        assert_eq!(symmetrize(&SpectralMeasure::point(0.0)).unwrap(), SpectralMeasure::point(0.0));
        assert_eq!(symmetrize(&m).unwrap(), m);
    }

    #[test]
    fn symmetrize_quarter_circle_is_semicircle() {
        let x = symmetrize(&qc(4097)).unwrap();
        let mo = x.moments(6);
        let catalan = [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0];
        for (j, (got, want)) in mo.iter().zip(catalan).enumerate() {
            assert!((got - want).abs() < 5e-5, "moment {j}: {got}");
        }
    }

    #[test]
    fn symmetrize_grid_with_positive_left_end() {
        let u = SpectralMeasure::Grid(GridDensity::from_unnormalized(1.0, 2.0, vec![1.0; 101]).unwrap());
        let x = symmetrize(&u).unwrap();
        assert_eq!(x.support(), (-2.0, 2.0));
        assert!(x.moments(1)[1].abs() < 1e-14);
    }

    #[test]
    fn symmetrize_preserves_even_moments() {
        let b = qc(1025);
        let (mb, mx) = (b.moments(8), symmetrize(&b).unwrap().moments(8));
        for j in 0..=8 {
            let want = if j % 2 == 0 { mb[j] } else { 0.0 };
            assert!((mx[j] - want).abs() < 1e-12, "moment {j}");
        }
    }
}
