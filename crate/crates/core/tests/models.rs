use rdlab::entropy::laws;
use rdlab::geometry::ks_two_sample;
use rdlab::models::*;
use rdlab::spectral::{esd, singular_square_measure};
use rdlab::word::StarWord;
use rdlab::{ComplexMatrix, RngStream, C64};

fn haar(k: usize, seed: u64, n: usize) -> Vec<ComplexMatrix> {
    (0..n).map(|i| haar_unitary(k, RngStream::new(seed, i as u64)).unwrap()).collect()
}

#[test]
fn haar_k1_is_a_phase() {
    for i in 0..100 {
        let u = haar_unitary(1, RngStream::new(1, i)).unwrap();
        assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn haar_is_unitary_and_centered() {
    let us = haar(64, 2, 10_000);
    assert!(us.iter().take(20).all(|u| u.is_unitary(1e-10)));
    let mean: C64 = us.iter().map(|u| u.normalized_trace()).sum::<C64>() / us.len() as f64;
    assert!(mean.norm() < 0.02, "{mean}");
}

#[test]
fn haar_first_entry_weight() {
    let n = 100_000;
    let m: f64 = (0..n).map(|i| haar_unitary(16, RngStream::new(3, i)).unwrap()[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
    assert!((m - 1.0 / 16.0).abs() < 5e-3, "{m}");
}

#[test]
fn haar_left_invariance() {
    let v = haar_unitary(4, RngStream::new(4, 999_999)).unwrap();
    let plain: Vec<f64> = haar(4, 5, 10_000).iter().map(|u| u.trace().re).collect();
    let turned: Vec<f64> = haar(4, 6, 10_000).iter().map(|u| v.mul(u).trace().re).collect();
    let r = ks_two_sample(&plain, &turned);
    assert!(r.pass, "{r:?}");
    // the shifted control has power
    let shifted: Vec<f64> = turned.iter().map(|x| x + 0.2).collect();
    assert!(!ks_two_sample(&plain, &shifted).pass);
}

#[test]
fn ginibre_examples() {
    let n = 100_000;
    let m: f64 = (0..n).map(|i| ginibre(1, 1.0, RngStream::new(7, i)).unwrap()[(0, 0)].norm_sqr()).sum::<f64>() / n as f64;
    assert!((m - 1.0).abs() < 2e-2);
    let g = ginibre(256, 1.0 / 256.0, RngStream::new(8, 0)).unwrap();
    let first = singular_square_measure(&g).unwrap().moments(1)[1];
    assert!((first - 0.5).abs() < 2e-2, "{first}");
    assert_eq!(ginibre(2, 0.0, RngStream::new(9, 0)).unwrap(), ComplexMatrix::zeros(2));
    assert!(ginibre(0, 1.0, RngStream::new(9, 0)).is_err());
}

#[test]
fn positive_with_spectrum_examples() {
    let c = positive_with_spectrum(&laws::point(2.5), 5, RngStream::new(10, 0)).unwrap();
    assert_eq!(c, ComplexMatrix::from_real_diagonal(&[2.5; 5]));

    let two = laws::two_point(0.5, 0.0, 1.0).unwrap();
    let p = positive_with_spectrum(&two, 4, RngStream::new(11, 0)).unwrap();
    let eigs = p.eigh_values().unwrap();
    for (got, want) in eigs.iter().zip([0.0, 0.0, 1.0, 1.0]) {
        assert!((got - want).abs() < 1e-12, "{eigs:?}");
    }

    let qc = laws::quarter_circle(4096).unwrap();
    let p = positive_with_spectrum(&qc, 512, RngStream::new(12, 0)).unwrap();
    assert!(p.is_positive_semidefinite(1e-10));
    let second = esd(&p, true).unwrap().moments(2)[2];
    assert!((second - 1.0).abs() < 5e-3, "{second}");

    let negative = laws::uniform(-1.0, 1.0, 101).unwrap();
    assert!(positive_with_spectrum(&negative, 4, RngStream::new(0, 0)).is_err());
}

#[test]
fn rdiag_sample_examples() {
    let z = rdiag_sample(&laws::point(1.0), 8, RngStream::new(13, 0)).unwrap();
    assert!(z.is_unitary(1e-10));
    let z = rdiag_sample(&laws::point(0.0), 3, RngStream::new(13, 1)).unwrap();
    assert_eq!(z.max_abs_entry(), 0.0);

    let qc = laws::quarter_circle(4096).unwrap();
    let z = rdiag_sample(&qc, 64, RngStream::new(14, 0)).unwrap();
    let mut s = z.singular_values().unwrap();
    s.sort_by(f64::total_cmp);
    for (got, want) in s.iter().zip(quantile_diagonal(&qc, 64)) {
        assert!((got - want).abs() < 1e-9);
    }

    let z = rdiag_sample(&qc, 512, RngStream::new(15, 0)).unwrap();
    let zz = z.mul(&z.adjoint());
    let m = zz.trace_of_product(&zz).re / 512.0;
    assert!((m - 2.0).abs() < 0.05, "{m}");
}

#[test]
fn rdiag_phase_invariance() {
    let qc = laws::quarter_circle(4096).unwrap();
    let n = 400;
    let k = 16;
    let plain: Vec<Vec<ComplexMatrix>> = (0..n).map(|i| vec![rdiag_sample(&qc, k, RngStream::new(16, i)).unwrap()]).collect();
    let turned: Vec<Vec<ComplexMatrix>> = (0..n)
        .map(|i| {
            let z = rdiag_sample(&qc, k, RngStream::new(17, i)).unwrap();
            vec![haar_unitary(k, RngStream::new(18, i)).unwrap().mul(&z)]
        })
        .collect();
    for w in rdlab::word::words_up_to(1, 4) {
        let a = mixed_moment_estimate(&plain, &w).unwrap();
        let b = mixed_moment_estimate(&turned, &w).unwrap();
        let se = (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
        assert!((a.mean - b.mean).norm() <= 3.0 * se + 1e-12, "{}: {} vs {}", w.to_string_with(&['z']), a.mean, b.mean);
    }
}

#[test]
fn mixed_moment_examples() {
    let us = haar(8, 19, 50);
    let samples: Vec<Vec<ComplexMatrix>> = us.iter().map(|u| vec![u.clone()]).collect();
    let e = mixed_moment_estimate(&samples, &StarWord::empty()).unwrap();
    assert_eq!((e.mean, e.stderr), (C64::new(1.0, 0.0), 0.0));
    let e = mixed_moment_estimate(&samples, &StarWord::parse("zZ").unwrap()).unwrap();
    assert!((e.mean - 1.0).norm() < 1e-12 && e.stderr < 1e-12);
    assert!(mixed_moment_estimate(&[], &StarWord::empty()).is_err());

    // u b u* b with b the quantile diagonal of ½(δ_1 + δ_3): τ(b)² = 4
    let k = 256;
    let b = ComplexMatrix::from_real_diagonal(&quantile_diagonal(&laws::two_point(0.5, 1.0, 3.0).unwrap(), k));
    let samples: Vec<Vec<ComplexMatrix>> = (0..200).map(|i| vec![haar_unitary(k, RngStream::new(20, i)).unwrap(), b.clone()]).collect();
    let e = mixed_moment_estimate(&samples, &StarWord::parse("zwZw").unwrap()).unwrap();
    assert!((e.mean - 4.0).norm() < 3.0 * e.stderr + 1e-3, "{e:?}");
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn within_stderr(r: &FreenessReport) {
    for w in &r.words {
        assert!(dist(w.empirical, w.predicted) <= 3.0 * w.stderr + 1e-12, "{w:?}");
    }
}

#[test]
fn freeness_first_order_and_zero_b() {
    let qc = laws::quarter_circle(4096).unwrap();
    let r = freeness_defect_quantile(&qc, 16, 2000, 1, RngStream::new(21, 0), 1).unwrap();
    within_stderr(&r);

    let us = haar(8, 22, 2000);
    let zeros = vec![ComplexMatrix::zeros(8); 2000];
    let r = freeness_defect(&us, &zeros, 4).unwrap();
    within_stderr(&r);
}

#[test]
fn freeness_paths_agree() {
    // the generic path on diagonal b equals the trace-only path
    let qc = laws::quarter_circle(4096).unwrap();
    let k = 12;
    let rng = RngStream::new(23, 0);
    let fast = freeness_defect_quantile(&qc, k, 50, 4, rng, 1).unwrap();
    let b = ComplexMatrix::from_real_diagonal(&quantile_diagonal(&qc, k));
    let us: Vec<ComplexMatrix> = (0..50).map(|i| haar_unitary(k, rng.substream(i)).unwrap()).collect();
    let slow = freeness_defect(&us, &vec![b; 50], 4).unwrap();
    for (a, b) in fast.words.iter().zip(&slow.words) {
        assert!(dist(a.empirical, b.empirical) < 1e-10);
        assert!(dist(a.predicted, b.predicted) < 1e-10);
    }
}

#[test]
fn determinism_across_workers() {
    let qc = laws::quarter_circle(1025).unwrap();
    let rng = RngStream::new(24, 0);
    let one = freeness_defect_quantile(&qc, 8, 64, 3, rng, 1).unwrap();
    let many = freeness_defect_quantile(&qc, 8, 64, 3, rng, 8).unwrap();
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&many).unwrap());
    assert_eq!(haar_unitary(5, rng).unwrap(), haar_unitary(5, rng).unwrap());
}

#[test]
fn csv_round_trip() {
    let rng = RngStream::new(25, 3);
    let g = ginibre(3, 1.0, rng).unwrap();
    let (back, r) = sample_from_csv(&sample_to_csv(&g, rng)).unwrap();
    assert_eq!((back, r), (g, rng));
}
