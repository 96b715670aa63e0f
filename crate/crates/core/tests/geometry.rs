use rdlab::entropy::laws;
use rdlab::geometry::*;
use rdlab::models::{ginibre, haar_unitary, positive_with_spectrum};
use rdlab::{ComplexMatrix, RngStream, C64};

fn random_positive(k: usize, i: u64) -> ComplexMatrix {
    positive_with_spectrum(&laws::uniform(0.3, 3.0, 257).unwrap(), k, RngStream::new(100 + k as u64, i)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1e-300)
}

#[test]
fn jacobians_match_finite_differences() {
    for k in 1..=3 {
        for i in 0..20 {
            let p = random_positive(k, i);
            let exact = jacobian_dp(&p).unwrap();
            assert_eq!(exact.to_bits(), jacobian_ds(&p).unwrap().to_bits());
            let (dp, ds) = (jacobian_dp_fd(&p), jacobian_ds_fd(&p));
            assert!(rel(exact, dp) < 1e-4, "k={k}: {exact} vs {dp}");
            assert!(rel(exact, ds) < 1e-4, "k={k}: {exact} vs {ds}");
        }
    }
}

#[test]
fn jacobian_examples() {
    assert!(jacobian_dp(&ComplexMatrix::identity(4)).unwrap().abs() < 1e-12);
    assert!((jacobian_dp(&ComplexMatrix::from_real_diagonal(&[3.0])).unwrap() - 3f64.ln()).abs() < 1e-12);
    let p = ComplexMatrix::from_real_diagonal(&[1.0, 3.0]);
    assert!((jacobian_ds(&p).unwrap() - 12f64.ln()).abs() < 1e-12);
    assert!(rel(12.0, jacobian_ds_fd(&p).exp()) < 1e-4);

    let u = haar_unitary(2, RngStream::new(1, 0)).unwrap();
    let q = u.mul(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0])).mul(&u.adjoint()).hermitian_part();
    let exact = jacobian_dp(&q).unwrap();
    assert!(rel(exact.exp(), jacobian_dp_fd(&q).exp()) < 1e-4);

    assert_eq!(jacobian_dp(&ComplexMatrix::zeros(2)).unwrap(), f64::NEG_INFINITY);
    assert!(jacobian_dp(&ComplexMatrix::from_real_diagonal(&[1.0, -1.0])).is_err());
}

#[test]
fn jacobian_is_unitarily_invariant() {
    for i in 0..10 {
        let p = random_positive(4, i);
        let u = haar_unitary(4, RngStream::new(2, i)).unwrap();
        let q = u.mul(&p).mul(&u.adjoint()).hermitian_part();
        assert!((jacobian_dp(&p).unwrap() - jacobian_dp(&q).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn polar_examples() {
    let pp = polar_decompose(&ComplexMatrix::identity(3)).unwrap();
    assert!(pp.v.sub(&ComplexMatrix::identity(3)).max_abs_entry() < 1e-12);
    assert!(pp.p.sub(&ComplexMatrix::identity(3)).max_abs_entry() < 1e-12);

    let pp = polar_decompose(&ComplexMatrix::from_real_diagonal(&[-2.0])).unwrap();
    assert!((pp.v[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-12);
    assert!((pp.p[(0, 0)] - C64::new(2.0, 0.0)).norm() < 1e-12);

    let a = ginibre(8, 1.0, RngStream::new(3, 0)).unwrap();
    let pp = polar_decompose(&a).unwrap();
    assert!(pp.v.is_unitary(1e-9));
    assert!(pp.p.is_positive_semidefinite(1e-9));
    assert!(pp.v.mul(&pp.p).sub(&a).frobenius_norm() / a.frobenius_norm() < 1e-10);
    // p against the square root from an eigendecomposition of a*a
    let e = a.adjoint().mul(&a).hermitian_part().eigh().unwrap();
    let root = ComplexMatrix::from_fn(8, |i, j| {
        (0..8).map(|l| e.vectors[(i, l)] * e.values[l].max(0.0).sqrt() * e.vectors[(j, l)].conj()).sum()
    });
    assert!(pp.p.sub(&root).max_abs_entry() < 1e-9);

    let singular = polar_decompose(&ComplexMatrix::zeros(2)).unwrap();
    assert!(singular.v.is_unitary(1e-9));
}

#[test]
fn polar_inverts_multiplication() {
    for i in 0..10 {
        let v = haar_unitary(5, RngStream::new(4, i)).unwrap();
        let p = random_positive(5, i);
        let pp = polar_decompose(&v.mul(&p)).unwrap();
        assert!(pp.v.sub(&v).max_abs_entry() < 1e-9);
        assert!(pp.p.sub(&p).max_abs_entry() < 1e-9);
    }
}

#[test]
fn volume_examples() {
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((volume_ck(1).unwrap() - two_pi.ln()).abs() < 1e-12);
    assert!((volume_ck(2).unwrap() - 3.0 * two_pi.ln()).abs() < 1e-12);
    assert!(volume_ck(0).is_err());
    let r: Vec<f64> = [100, 1000, 10_000].iter().map(|&k| limck_residual(k).unwrap().abs()).collect();
    assert!(r[2] < 0.01 && r[0] > r[1] && r[1] > r[2], "{r:?}");
    for k in [100, 1000] {
        assert!(limck_residual(2 * k).unwrap().abs() < limck_residual(k).unwrap().abs());
    }
    assert!(limck_residual(1).unwrap().is_finite());
}

#[test]
fn push_check_passes_and_control_fails() {
    let r = push_measure_check(2, 100_000, RngStream::new(5, 0), 1).unwrap();
    assert!(r.fit.pass, "{r:?}");
    assert!(!r.negative_control.unwrap().pass);

    let r = push_measure_check(1, 100_000, RngStream::new(6, 0), 1).unwrap();
    assert!(r.fit.pass, "{r:?}");
    assert!(push_measure_check(2, 100, RngStream::new(0, 0), 1).is_err());
}

#[test]
fn two_sample_ks_on_rayleigh() {
    // independent singular-value sampling agrees with the check's sampler
    let a: Vec<f64> = (0..5000).map(|i| ginibre(1, 1.0, RngStream::new(7, i)).unwrap()[(0, 0)].norm()).collect();
    let b: Vec<f64> = (0..5000).map(|i| ginibre(1, 1.0, RngStream::new(8, i)).unwrap()[(0, 0)].norm()).collect();
    assert!(ks_two_sample(&a, &b).pass);
    let r = ks_test(&a, |r| 1.0 - (-r * r).exp());
    assert!(r.pass, "{r:?}");
}
