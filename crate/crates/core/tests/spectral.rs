use proptest::prelude::*;
use rand::Rng;
use rdlab::entropy::laws;
use rdlab::models::ginibre;
use rdlab::spectral::*;
use rdlab::{ComplexMatrix, RngStream};

fn gue(k: usize, seed: u64) -> ComplexMatrix {
    let g = ginibre(k, 1.0 / k as f64, RngStream::new(seed, 0)).unwrap();
    g.add(&g.adjoint()).scale_real(std::f64::consts::FRAC_1_SQRT_2).hermitian_part()
}

#[test]
fn esd_examples() {
    assert_eq!(esd(&ComplexMatrix::identity(3), true).unwrap(), SpectralMeasure::point(1.0));
    let m = esd(&ComplexMatrix::from_real_diagonal(&[1.0, 2.0, 3.0]), true).unwrap();
    let at = m.as_atoms().unwrap();
    assert_eq!(at.locations(), &[1.0, 2.0, 3.0]);
    assert!(at.weights().iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-15));

    let x = gue(512, 1);
    let m = esd(&x, true).unwrap();
    assert!((m.moments(1)[1] - x.normalized_trace().re).abs() < 1e-10);
    for (got, want) in m.moments(4)[1..].iter().zip([0.0, 1.0, 0.0, 2.0]) {
        assert!((got - want).abs() < 0.1, "{got} vs {want}");
    }
}

#[test]
fn singular_square_examples() {
    assert_eq!(singular_square_measure(&ComplexMatrix::identity(4)).unwrap(), SpectralMeasure::point(0.5));
    let m = singular_square_measure(&ComplexMatrix::identity(4).scale_real(2.0)).unwrap();
    assert!((m.moments(1)[1] - 2.0).abs() < 1e-12);
    // unit-variance entries: normalize by k to get the Marchenko–Pastur scale
    let g = ginibre(512, 1.0 / 512.0, RngStream::new(2, 0)).unwrap();
    let first = singular_square_measure(&g).unwrap().moments(1)[1];
    assert!((first - 0.5).abs() < 0.05, "{first}");
}

#[test]
fn singular_square_matches_esd_of_half_gram() {
    for seed in 0..5 {
        let a = ginibre(6, 1.0, RngStream::new(3, seed)).unwrap();
        let half_gram = a.adjoint().mul(&a).scale_real(0.5).hermitian_part();
        let lhs = esd(&half_gram, true).unwrap();
        let rhs = singular_square_measure(&a).unwrap();
        let (l, r) = (lhs.as_atoms().unwrap(), rhs.as_atoms().unwrap());
        assert_eq!(l.len(), r.len());
        for (x, y) in l.locations().iter().zip(r.locations()) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}

#[test]
fn pushforward_composition_against_sample_transport() {
    // b² for quarter-circular b, then t ↦ (2t)^{1/2}
    let qc = laws::quarter_circle(DEFAULT_GRID_NODES).unwrap();
    let squared = pushforward(&qc, &FunctionSpec::power(2.0)).unwrap();
    let f = FunctionSpec::affine(2.0, 0.0).then(FunctionSpec::power(0.5));
    let image = pushforward(&squared, &f).unwrap();
    let got = image.moments(2)[2];
    // stratified inverse-CDF samples of the source, transported pointwise
    let n = 1_000_000;
    let mut rng = RngStream::new(4, 0).rng();
    let oracle = (0..n)
        .map(|i| {
            let u = (i as f64 + rng.gen::<f64>()) / n as f64;
            let y = f.eval(squared.quantile(u));
            y * y
        })
        .sum::<f64>()
        / n as f64;
    assert!((got - oracle).abs() < 1e-3, "{got} vs {oracle}");
    assert!((got - 2.0).abs() < 1e-3);
}

#[test]
fn pushforward_preserves_mass_and_rejects_negative_support() {
    for f in [FunctionSpec::power(2.0), FunctionSpec::exp_shift(1.0), FunctionSpec::log_shift(2.0)] {
        let m = pushforward(&laws::uniform(0.0, 1.0, 1025).unwrap(), &f).unwrap();
        assert!((m.total_mass() - 1.0).abs() < 1e-10);
    }
    let s = laws::semicircle(1.0, 257).unwrap();
    assert!(pushforward(&s, &FunctionSpec::power(2.0)).is_err());
}

#[test]
fn symmetrize_examples() {
    let m = symmetrize(&SpectralMeasure::point(1.0)).unwrap();
    assert_eq!(m.as_atoms().unwrap().locations(), &[-1.0, 1.0]);
    assert_eq!(symmetrize(&SpectralMeasure::point(0.0)).unwrap(), SpectralMeasure::point(0.0));
    let x = symmetrize(&laws::quarter_circle(4097).unwrap()).unwrap();
    let mo = measure_moments(&x, 6);
    for (j, want) in [1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0].iter().enumerate() {
        assert!((mo[j] - want).abs() < 5e-5, "moment {j}: {}", mo[j]);
    }
}

#[test]
fn moment_examples() {
    assert_eq!(measure_moments(&SpectralMeasure::point(2.0), 3), vec![1.0, 2.0, 4.0, 8.0]);
    let u = measure_moments(&laws::uniform(-1.0, 1.0, 101).unwrap(), 4);
    for (got, want) in u.iter().zip([1.0, 0.0, 1.0 / 3.0, 0.0, 0.2]) {
        // exact for the interpolant; the uniform interpolant is the law
        assert!((got - want).abs() < 1e-12);
    }
    let s = measure_moments(&laws::semicircle(1.0, 16385).unwrap(), 6);
    for (got, want) in s.iter().zip([1.0, 0.0, 1.0, 0.0, 2.0, 0.0, 5.0]) {
        assert!((got - want).abs() < 1e-5, "{got} vs {want}");
    }
}

fn atoms() -> impl Strategy<Value = SpectralMeasure> {
    prop::collection::vec((0.0f64..5.0, 0.01f64..1.0), 1..8).prop_map(|pairs| {
        let (l, w): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        SpectralMeasure::Atoms(Atoms::from_unnormalized(l, w).unwrap())
    })
}

fn catalog_function() -> impl Strategy<Value = FunctionSpec> {
    prop_oneof![
        (0.1f64..4.0, 0.0f64..2.0).prop_map(|(a, c)| FunctionSpec::affine(a, c)),
        (0.3f64..3.0).prop_map(FunctionSpec::power),
        (0.1f64..2.0).prop_map(FunctionSpec::exp_shift),
        (0.1f64..2.0).prop_map(FunctionSpec::log_shift),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pushforward_then_inverse_returns_atoms(m in atoms(), f in catalog_function()) {
        let there = pushforward(&m, &f).unwrap();
        let back = pushforward(&there, &f.inverse()).unwrap();
        let (a, b) = (m.as_atoms().unwrap(), back.as_atoms().unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.locations().iter().zip(b.locations()) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetrize_keeps_even_moments(m in atoms()) {
        let x = symmetrize(&m).unwrap();
        let (mb, mx) = (measure_moments(&m, 6), measure_moments(&x, 6));
        for j in 0..=6 {
            let want = if j % 2 == 0 { mb[j] } else { 0.0 };
            prop_assert!((mx[j] - want).abs() < 1e-12 * (1.0 + mb[j].abs()));
        }
        prop_assert_eq!(symmetrize(&x).unwrap(), x);
    }

    #[test]
    fn esd_mass_and_first_moment(seed in 0u64..1000, k in 1usize..8) {
        let x = gue(k, seed);
        let m = esd(&x, true).unwrap();
        prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!((m.moments(1)[1] - x.normalized_trace().re).abs() < 1e-10);
    }
}
