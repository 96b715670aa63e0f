use proptest::prelude::*;
use rdlab::cumulants::*;
use rdlab::word::StarWord;
use rdlab::C64;

fn w(s: &str) -> StarWord {
    StarWord::parse(s).unwrap()
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Number of set partitions of {1..n} with no crossing, by brute force over
/// restricted growth strings.
fn brute_force_nc(n: usize) -> usize {
    fn go(labels: &mut Vec<usize>, n: usize, next: usize, count: &mut usize) {
        if labels.len() == n {
            let crossing = (0..n).any(|a| {
                (a + 1..n).any(|b| {
                    (b + 1..n).any(|c| {
                        (c + 1..n).any(|d| labels[a] == labels[c] && labels[b] == labels[d] && labels[a] != labels[b])
                    })
                })
            });
            if !crossing {
                *count += 1;
            }
            return;
        }
        for l in 0..=next {
            labels.push(l);
            go(labels, n, next.max(l + 1), count);
            labels.pop();
        }
    }
    let mut count = 0;
    go(&mut Vec::new(), n, 0, &mut count);
    count
}

#[test]
fn nc_counts() {
    assert_eq!(enumerate_nc(1).unwrap().len(), 1);
    assert_eq!(enumerate_nc(4).unwrap().len(), 14);
    assert_eq!(brute_force_nc(4), 14);
    let mut c = vec![1usize];
    for n in 1..=8 {
        c.push((0..n).map(|i| c[i] * c[n - 1 - i]).sum());
    }
    let all = enumerate_nc(8).unwrap();
    assert_eq!(all.len(), c[8]);
    assert!(all.iter().all(|p| p.is_partition() && p.is_non_crossing()));
    assert!(enumerate_nc(0).is_err() && enumerate_nc(11).is_err());
}

#[test]
fn semicircular_cumulants() {
    let k = moments_to_cumulants(&semicircular(8).unwrap());
    for (word, v) in k.iter().skip(1) {
        let want = if word.len() == 2 { 1.0 } else { 0.0 };
        assert!((v - re(want)).norm() < 1e-12, "{word}: {v}");
    }
}

#[test]
fn haar_alternating_cumulants_are_signed_catalan() {
    let k = moments_to_cumulants(&MomentTable::haar_unitary(8).unwrap());
    for (word, want) in [("zZ", 1.0), ("zZzZ", -1.0), ("zZzZzZ", 2.0), ("zZzZzZzZ", -5.0)] {
        assert!((k.get(&w(word)).unwrap() - re(want)).norm() < 1e-12, "{word}");
        assert!((k.get(&w(word).adjoint()).unwrap() - re(want)).norm() < 1e-12);
    }
}

#[test]
fn constants_have_no_higher_cumulants() {
    let k = moments_to_cumulants(&MomentTable::constant(re(0.7), 6).unwrap());
    assert!((k.get(&w("z")).unwrap() - re(0.7)).norm() < 1e-12);
    for (word, v) in k.iter() {
        if word.len() >= 2 {
            assert!(v.norm() < 1e-12, "{word}");
        }
    }
}

#[test]
fn cumulants_to_moments_examples() {
    let only_k2 = CumulantTable::from_fn(1, 6, |x| re(if x.len() == 2 { 1.0 } else { 0.0 })).unwrap();
    let m = cumulants_to_moments(&only_k2);
    for (word, want) in [("zz", 1.0), ("zzzz", 2.0), ("zzzzzz", 5.0)] {
        assert!((m.get(&w(word)).unwrap() - re(want)).norm() < 1e-12);
    }
    let zero = cumulants_to_moments(&CumulantTable::from_fn(1, 4, |_| re(0.0)).unwrap());
    assert!(zero.iter().skip(1).all(|(_, v)| v.norm() == 0.0));
    let c = circular(1.0, 4).unwrap();
    assert!((c.get(&w("zZzZ")).unwrap() - re(2.0)).norm() < 1e-12);
    assert!(c.get(&w("zz")).unwrap().norm() < 1e-12);
}

#[test]
fn corpus_verdicts_and_cross_check() {
    for e in corpus(6).unwrap() {
        let r = is_r_diagonal(&e.table, 1e-10).unwrap();
        assert_eq!(r.r_diagonal, e.expect_r_diagonal, "{}: {r:?}", e.name);
        assert!(r.consistent, "{}: {r:?}", e.name);
    }
}

#[test]
fn haar_multiply_fixes_circular_and_haar() {
    for m in [circular(1.0, 8).unwrap(), MomentTable::haar_unitary(8).unwrap()] {
        assert!(haar_multiply(&m).unwrap().max_abs_diff(&m) < 1e-12);
    }
}

#[test]
fn haar_multiply_is_idempotent_and_keeps_positive_part() {
    for e in corpus(6).unwrap() {
        let once = haar_multiply(&e.table).unwrap();
        let twice = haar_multiply(&once).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-10, "{}", e.name);
        for word in ["zZ", "zZzZ", "zZzZzZ"] {
            let (a, b) = (once.get(&w(word)).unwrap(), e.table.get(&w(word)).unwrap());
            assert!((a - b).norm() < 1e-10 * (1.0 + b.norm()), "{} {word}", e.name);
        }
    }
}

#[test]
fn order_limits() {
    assert!(MomentTable::haar_unitary(9).is_err());
    let fp = FreeProduct::new().with_family(&[0], &circular(1.0, 2).unwrap()).unwrap();
    assert!(fp.moment(w("zZzZ").letters()).is_err());
}

#[test]
fn gamma_split_examples() {
    let c = circular(2.0, 4).unwrap();
    let g = gamma_split(&c, None).unwrap();
    assert!((g.tau_x2 - 1.0).abs() < 1e-12 && (g.tau_y2 - 1.0).abs() < 1e-12);
    let h = gamma_split(&c, Some(C64::from_polar(1.0, 0.3))).unwrap();
    assert!((h.tau_x2 - 1.0).abs() < 1e-12);

    // τ(z²) = i, τ(zz*) = 3: z = a + ib with semicircular-like a, b
    let raw = WordTable::from_fn(1, 2, |x| match x.to_string().as_str() {
        "" => re(1.0),
        "zz" => C64::new(0.0, 1.0),
        "ZZ" => C64::new(0.0, -1.0),
        "zZ" | "Zz" => re(3.0),
        _ => re(0.0),
    })
    .unwrap();
    let m = MomentTable::new(raw).unwrap();
    let g = gamma_split(&m, Some(re(1.0))).unwrap();
    assert!(g.rotated_square.re.abs() < 1e-15);
    assert!((g.tau_x2 - 1.5).abs() < 1e-15 && (g.tau_y2 - 1.5).abs() < 1e-15);
    let auto = gamma_split(&m, None).unwrap();
    assert!(auto.rotated_square.re.abs() < 1e-15);
    assert!(gamma_split(&m, Some(re(2.0))).is_err());
}

fn arbitrary_table() -> impl Strategy<Value = MomentTable> {
    (0.2f64..3.0, 0.0f64..2.0, -1.0f64..1.0, 0usize..4).prop_map(|(v, shift, theta, kind)| {
        let order = 6;
        let c = circular(v, order).unwrap();
        let one = MomentTable::constant(C64::from_polar(shift, theta), order).unwrap();
        let s = semicircular(order).unwrap();
        let x = rdlab::cumulants::Polynomial::letter(rdlab::word::Letter::plain(0));
        let y = rdlab::cumulants::Polynomial::letter(rdlab::word::Letter::plain(1));
        match kind {
            0 => c,
            1 => free_polynomial(&[c, one], &x.add(&y), order).unwrap(),
            2 => free_polynomial(&[c, s], &x.mul(&y), order).unwrap(),
            _ => free_polynomial(&[s, one], &x.add(&y), order).unwrap(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn round_trip(m in arbitrary_table()) {
        let back = cumulants_to_moments(&moments_to_cumulants(&m));
        prop_assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn detector_agrees_with_fixed_point(m in arbitrary_table()) {
        let r = is_r_diagonal(&m, 1e-10).unwrap();
        prop_assert!(r.consistent, "{:?}", r);
    }
}
