use rdlab::entropy::*;
use rdlab::quadrature::gauss_legendre;
use rdlab::spectral::{pushforward, FunctionSpec, GridDensity, SpectralMeasure, DEFAULT_GRID_NODES as N};

fn log_pi_e() -> f64 {
    (std::f64::consts::PI * std::f64::consts::E).ln()
}

#[test]
fn log_energy_examples() {
    let e = log_energy(&laws::semicircle(1.0, N).unwrap());
    assert!((e.value + 0.25).abs() < 1e-3, "{e:?}");
    let e = log_energy(&laws::uniform(-1.0, 1.0, N).unwrap());
    assert!((e.value - (2f64.ln() - 1.5)).abs() < 1e-3);
    assert!(log_energy(&laws::point(0.0)).is_neg_infinity());
}

#[test]
fn chi_sa_examples() {
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    assert!((chi_sa_one(&laws::semicircle(1.0, N).unwrap()).value - 0.5 * two_pi_e.ln()).abs() < 1e-3);
    assert!((chi_sa_one(&laws::semicircle(0.5, N).unwrap()).value - 0.5 * log_pi_e()).abs() < 1e-3);
    assert!(chi_sa_one(&laws::point(2.0)).is_neg_infinity());
}

#[test]
fn chi_rdiag_examples() {
    let qc = laws::quarter_circle(N).unwrap();
    let base = chi_rdiag(&qc).unwrap().value;
    // χ of a circular element is the χ^sa of its real and imaginary parts
    let parts = 2.0 * chi_sa_one(&laws::semicircle(0.5, N).unwrap()).value;
    assert!((base - log_pi_e()).abs() < 2e-3);
    assert!((base - parts).abs() < 2e-3);
    assert!(chi_rdiag(&laws::point(1.0)).unwrap().is_neg_infinity());
    let scaled = chi_rdiag(&qc.dilate(2.0).unwrap()).unwrap().value;
    assert!((scaled - base - 2.0 * 2f64.ln()).abs() < 2e-3);
    assert!(chi_rdiag(&laws::semicircle(1.0, 257).unwrap()).is_err());
}

#[test]
fn both_routes_agree() {
    let u = laws::uniform(0.0, 1.0, N).unwrap();
    let a = chi_rdiag(&u).unwrap();
    let b = chi_rdiag_via_pushforward(&u).unwrap();
    assert!((a.value - b.value).abs() < a.error_estimate + b.error_estimate + 1e-4);
}

#[test]
fn identity_defects() {
    for mu in [laws::quarter_circle(N).unwrap(), laws::marchenko_pastur(1.0, N).unwrap(), laws::uniform(0.0, 1.0, N).unwrap()] {
        assert!(chi_symmetric_identity_defect(&mu).unwrap() < 5e-3);
    }
}

#[test]
fn upper_bound_examples() {
    let mp = laws::marchenko_pastur(1.0, N).unwrap();
    assert!((chi_upper_bound(&mp).unwrap().value - log_pi_e()).abs() < 2e-3);
    assert!(chi_upper_bound(&laws::point(1.0)).unwrap().is_neg_infinity());
    let u = laws::uniform(0.0, 4.0, N).unwrap();
    let bound = chi_upper_bound(&u).unwrap().value;
    let b = pushforward(&u, &FunctionSpec::power(0.5)).unwrap();
    assert!((bound - chi_rdiag(&b).unwrap().value).abs() < 5e-3);
}

#[test]
fn upper_bound_is_attained_by_ub() {
    for mu_b in [laws::quarter_circle(N).unwrap(), laws::uniform(0.5, 2.0, N).unwrap(), laws::marchenko_pastur(2.0, N).unwrap()] {
        let yy = pushforward(&mu_b, &FunctionSpec::power(2.0)).unwrap();
        let gap = chi_upper_bound(&yy).unwrap().value - chi_rdiag(&mu_b).unwrap().value;
        assert!(gap.abs() < 5e-3, "{gap}");
    }
}

#[test]
fn change_of_variables_examples() {
    let u01 = laws::uniform(0.0, 1.0, N).unwrap();
    assert_eq!(changevar_defect(&u01, &FunctionSpec::affine(1.0, 0.0)).unwrap(), 0.0);
    let t = changevar_terms(&u01, &FunctionSpec::affine(3.0, 0.0)).unwrap();
    assert!(t.defect() < 1e-6);
    assert!((t.energy_shift - 3f64.ln()).abs() < 1e-6);

    // independent oracle on uniform[1, 2] under t²: the kernel is log(s + t),
    // and E(uniform[a, b]) = log(b − a) − 3/2 gives the energy of the source
    let u12 = laws::uniform(1.0, 2.0, N).unwrap();
    let t = changevar_terms(&u12, &FunctionSpec::power(2.0)).unwrap();
    let (x, w) = gauss_legendre(40);
    let node = |i: usize| 1.5 + 0.5 * x[i];
    let mut kernel = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            kernel += 0.25 * w[i] * w[j] * (node(i) + node(j)).ln();
        }
    }
    assert!((t.kernel_integral - kernel).abs() < 1e-4, "{} vs {kernel}", t.kernel_integral);
    assert!(t.defect() < 1e-4);
    assert!(changevar_defect(&laws::point(1.0), &FunctionSpec::power(2.0)).is_err());
}

#[test]
fn estimator_examples() {
    assert_eq!(log_energy_estimator(&[0.0, 1.0]).unwrap().value, 0.0);
    assert!(log_energy_estimator(&[0.5, 0.5, 1.0]).unwrap().is_neg_infinity());
    let sc = laws::semicircle(1.0, N).unwrap();
    let e = log_energy_estimator(&quantile_spectrum(&sc, 512)).unwrap();
    assert!((e.value + 0.25).abs() < 2e-2);
}

#[test]
fn estimator_converges_to_quadrature() {
    for law in [laws::semicircle(1.0, N).unwrap(), laws::uniform(-1.0, 1.0, N).unwrap(), laws::quarter_circle(N).unwrap()] {
        let q = log_energy(&law).value;
        let errs: Vec<f64> = [128, 256, 512]
            .iter()
            .map(|&k| (log_energy_estimator(&quantile_spectrum(&law, k)).unwrap().value - q).abs())
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    }
}

#[test]
fn scaling_law() {
    for law in [laws::semicircle(1.0, N).unwrap(), laws::uniform(0.0, 1.0, N).unwrap(), laws::quarter_circle(N).unwrap()] {
        let e = log_energy(&law).value;
        for a in [0.5, 2.0, 3.0] {
            let scaled = log_energy(&law.dilate(a).unwrap()).value;
            assert!((scaled - e - f64::ln(a)).abs() < 1e-6);
        }
    }
}

/// The law of `|x|` for a symmetric grid law with a node at 0.
fn fold(x: &SpectralMeasure) -> SpectralMeasure {
    let g = x.as_grid().unwrap();
    let v = g.values();
    SpectralMeasure::Grid(GridDensity::from_unnormalized(0.0, g.b(), v[v.len() / 2..].to_vec()).unwrap())
}

#[test]
fn squared_against_symmetric_identity() {
    let n = N + 1;
    for x in [laws::semicircle(1.0, n).unwrap(), laws::uniform(-1.0, 1.0, n).unwrap(), laws::arcsine(n).unwrap()] {
        let half_square = FunctionSpec::power(2.0).then(FunctionSpec::affine(0.5, 0.0));
        let lhs = log_energy(&pushforward(&fold(&x), &half_square).unwrap()).value;
        let rhs = 2.0 * log_energy(&x.dilate(std::f64::consts::FRAC_1_SQRT_2).unwrap()).value;
        assert!((lhs - rhs).abs() < 5e-3, "{lhs} vs {rhs}");
    }
}

#[test]
fn refinement_stays_within_error_estimate() {
    for make in [|n| laws::semicircle(1.0, n), |n| laws::uniform(0.0, 1.0, n), |n| laws::marchenko_pastur(2.0, n)] {
        let coarse = log_energy(&make(2049).unwrap());
        let fine = log_energy(&make(4097).unwrap());
        assert!((fine.value - coarse.value).abs() <= coarse.error_estimate, "{coarse:?} {fine:?}");
    }
}
