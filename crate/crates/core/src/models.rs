//! Matrix models: Haar unitaries, Ginibre matrices, positive matrices with a
//! prescribed spectrum and the R-diagonal model `u·b`, with Monte Carlo
//! estimates of normalized-trace *-moments.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cumulants::{FreeProduct, MomentTable};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::parallel::par_map;
use crate::rng::RngStream;
use crate::spectral::{fmt17, SpectralMeasure};
use crate::word::{Letter, StarWord};

fn gaussian_entries(k: usize, sigma2: f64, rng: &mut impl Rng) -> Vec<C64> {
    let s = (0.5 * sigma2).sqrt();
    (0..k * k)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(s * re, s * im)
        })
        .collect()
}

/// `k×k` matrix of independent complex Gaussians with `E|g_ij|² = sigma2`.
pub fn ginibre(k: usize, sigma2: f64, rng: RngStream) -> Result<ComplexMatrix> {
    if k == 0 {
        return Err(Error::invalid("matrix dimension must be at least 1"));
    }
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!("variance must be finite and ≥ 0, got {sigma2}")));
    }
    ComplexMatrix::from_row_major(k, gaussian_entries(k, sigma2, &mut rng.rng()))
}

/// Haar-distributed `k×k` unitary: the Q factor of a Ginibre matrix with the
/// phases of R's diagonal moved into Q.
pub fn haar_unitary(k: usize, rng: RngStream) -> Result<ComplexMatrix> {
    let g = ginibre(k, 1.0, rng)?;
    let (q, r_diag) = g.qr_with_r_diagonal();
    let phases: Vec<C64> = r_diag
        .iter()
        .map(|r| if r.norm() == 0.0 { C64::new(1.0, 0.0) } else { r / r.norm() })
        .collect();
    Ok(ComplexMatrix::from_fn(k, |i, j| q[(i, j)] * phases[j]))
}

/// The `k` quantiles of `mu` at levels `(i − ½)/k`, ascending.
pub fn quantile_diagonal(mu: &SpectralMeasure, k: usize) -> Vec<f64> {
    (1..=k).map(|i| mu.quantile((i as f64 - 0.5) / k as f64)).collect()
}

fn require_positive_support(mu: &SpectralMeasure) -> Result<()> {
    let (lo, hi) = mu.support();
    if lo < 0.0 {
        return Err(Error::domain(format!("positive part needs support in [0, ∞), got lower end {lo}")));
    }
    if !hi.is_finite() {
        return Err(Error::domain("support must be bounded"));
    }
    Ok(())
}

/// `U·diag(quantiles)·U*` with `U` Haar, symmetrized to be exactly Hermitian.
/// A spectrum with a single value gives the scalar matrix exactly.
pub fn positive_with_spectrum(mu: &SpectralMeasure, k: usize, rng: RngStream) -> Result<ComplexMatrix> {
    require_positive_support(mu)?;
    let d = quantile_diagonal(mu, k);
    if d.iter().all(|&x| x == d[0]) {
        return Ok(ComplexMatrix::scalar(k, C64::new(d[0], 0.0)));
    }
    let u = haar_unitary(k, rng)?;
    let ud = ComplexMatrix::from_fn(k, |i, j| u[(i, j)] * d[j]);
    Ok(ud.mul(&u.adjoint()).hermitian_part())
}

/// `u·b` with `u` Haar on substream 0 and `b` from [`positive_with_spectrum`]
/// on substream 1.
pub fn rdiag_sample(mu_b: &SpectralMeasure, k: usize, rng: RngStream) -> Result<ComplexMatrix> {
    let b = positive_with_spectrum(mu_b, k, rng.substream(1))?;
    let u = haar_unitary(k, rng.substream(0))?;
    Ok(u.mul(&b))
}

/// `tr(w(x_0, x_1, ...))` for one tuple of matrices, symbol `i` read as
/// `tuple[i]`.
pub fn word_trace(tuple: &[ComplexMatrix], word: &StarWord) -> Result<C64> {
    let Some(first) = tuple.first() else {
        return Err(Error::invalid("empty matrix tuple"));
    };
    let k = first.dim();
    if tuple.iter().any(|m| m.dim() != k) {
        return Err(Error::invalid("matrices in a tuple must share their dimension"));
    }
    let letters = word.letters();
    if letters.is_empty() {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut cache: HashMap<Letter, ComplexMatrix> = HashMap::new();
    let mut get = |l: Letter| -> Result<ComplexMatrix> {
        let m = tuple
            .get(l.symbol as usize)
            .ok_or_else(|| Error::invalid(format!("word uses symbol {} beyond the tuple", l.symbol)))?;
        Ok(if l.starred { cache.entry(l).or_insert_with(|| m.adjoint()).clone() } else { m.clone() })
    };
    if letters.len() == 1 {
        return Ok(get(letters[0])?.normalized_trace());
    }
    let mut acc = get(letters[0])?;
    for &l in &letters[1..letters.len() - 1] {
        acc = acc.mul(&get(l)?);
    }
    Ok(acc.trace_of_product(&get(letters[letters.len() - 1])?) / k as f64)
}

/// Mean and standard error of a complex sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub mean: C64,
    pub stderr: f64,
    pub n: usize,
}

impl MomentEstimate {
    pub fn from_values(values: &[C64]) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::invalid("no samples"));
        }
        let mean = values.iter().sum::<C64>() / n as f64;
        let stderr = if n > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean).norm_sqr()).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, stderr, n })
    }
}

/// Sample mean of `tr(word)` over tuples, with standard error.
pub fn mixed_moment_estimate(samples: &[Vec<ComplexMatrix>], word: &StarWord) -> Result<MomentEstimate> {
    let values = samples.iter().map(|t| word_trace(t, word)).collect::<Result<Vec<_>>>()?;
    MomentEstimate::from_values(&values)
}

/// Words in `u` (symbol 0) and a self-adjoint `b` (symbol 1) of length
/// `1..=order` whose letters alternate between `u^{±1}` and `b` cyclically,
/// plus the single letters.
pub fn alternating_words(order: usize) -> Vec<StarWord> {
    let mut out = Vec::new();
    for len in 1..=order {
        for start_with_u in [true, false] {
            let n_u = if start_with_u { len.div_ceil(2) } else { len / 2 };
            for mask in 0..1u32 << n_u {
                let mut letters = Vec::with_capacity(len);
                let mut ui = 0;
                for p in 0..len {
                    let is_u = (p % 2 == 0) == start_with_u;
                    if is_u {
                        letters.push(Letter { symbol: 0, starred: mask >> ui & 1 == 1 });
                        ui += 1;
                    } else {
                        letters.push(Letter::plain(1));
                    }
                }
                out.push(StarWord(letters));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Traces of all `words` for `(u, diag(d))` in `O(k²)` each; valid for words
/// with at most two `u`-letters.
fn diagonal_word_traces(u: &ComplexMatrix, d: &[f64], words: &[StarWord]) -> Vec<C64> {
    let k = d.len();
    let kf = k as f64;
    let entry = |l: Letter, i: usize, j: usize| if l.starred { u[(j, i)].conj() } else { u[(i, j)] };
    words
        .iter()
        .map(|w| {
            let l = w.letters();
            let pos: Vec<usize> = (0..l.len()).filter(|&p| l[p].symbol == 0).collect();
            let power = |from: usize, to: usize| -> usize { (from..to).filter(|&p| l[p % l.len()].symbol == 1).count() };
            match pos.len() {
                0 => C64::new(d.iter().map(|x| x.powi(l.len() as i32)).sum::<f64>() / kf, 0.0),
                1 => {
                    let e = l.len() as i32 - 1;
                    (0..k).map(|i| entry(l[pos[0]], i, i) * d[i].powi(e)).sum::<C64>() / kf
                }
                2 => {
                    let (a, b) = (pos[0], pos[1]);
                    let e1 = power(a + 1, b) as i32;
                    let e2 = power(b + 1, a + l.len()) as i32;
                    let p1: Vec<f64> = d.iter().map(|x| x.powi(e1)).collect();
                    let mut s = C64::new(0.0, 0.0);
                    for i in 0..k {
                        let mut row = C64::new(0.0, 0.0);
                        for j in 0..k {
                            row += entry(l[a], i, j) * p1[j] * entry(l[b], j, i);
                        }
                        s += row * d[i].powi(e2);
                    }
                    s / kf
                }
                _ => unreachable!("fast path limited to two unitary letters"),
            }
        })
        .collect()
}

/// Comparison of empirical mixed moments of `(u, b)` with the values freeness
/// predicts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreenessReport {
    pub k: usize,
    pub n_samples: usize,
    pub order: usize,
    /// `max_w |empirical − predicted|`.
    pub defect: f64,
    pub worst_word: String,
    pub worst_stderr: f64,
    pub words: Vec<WordDefect>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordDefect {
    pub word: String,
    pub empirical: [f64; 2],
    pub predicted: [f64; 2],
    pub stderr: f64,
}

fn word_name(w: &StarWord) -> String {
    w.to_string_with(&['u', 'b'])
}

/// Free prediction for words in `u` and `b` when `b` has normalized-trace
/// moments `b_moments`.
fn free_predictions(b_moments: &[f64], words: &[StarWord], order: usize) -> Result<Vec<C64>> {
    let fp = FreeProduct::new()
        .with_family(&[0], &MomentTable::haar_unitary(order)?)?
        .with_family(&[1], &MomentTable::self_adjoint(b_moments, order)?)?;
    words.iter().map(|w| fp.moment(w.letters())).collect()
}

fn defect_report(
    k: usize,
    order: usize,
    words: &[StarWord],
    per_sample: &[Vec<C64>],
    predicted: &[C64],
) -> Result<FreenessReport> {
    let mut out = Vec::with_capacity(words.len());
    let mut worst = (0.0f64, 0usize, 0.0f64);
    for (i, w) in words.iter().enumerate() {
        let column: Vec<C64> = per_sample.iter().map(|s| s[i]).collect();
        let est = MomentEstimate::from_values(&column)?;
        let dev = (est.mean - predicted[i]).norm();
        if dev > worst.0 || i == 0 {
            worst = (dev, i, est.stderr);
        }
        out.push(WordDefect {
            word: word_name(w),
            empirical: [est.mean.re, est.mean.im],
            predicted: [predicted[i].re, predicted[i].im],
            stderr: est.stderr,
        });
    }
    Ok(FreenessReport {
        k,
        n_samples: per_sample.len(),
        order,
        defect: worst.0,
        worst_word: word_name(&words[worst.1]),
        worst_stderr: worst.2,
        words: out,
    })
}

const MAX_FREENESS_ORDER: usize = 6;

/// Freeness defect from given pairs `(u_i, b_i)`. Predictions use the
/// normalized-trace moments of `b` averaged over the samples.
pub fn freeness_defect(u_samples: &[ComplexMatrix], b_samples: &[ComplexMatrix], order: usize) -> Result<FreenessReport> {
    if order == 0 || order > MAX_FREENESS_ORDER {
        return Err(Error::invalid(format!("order must lie in 1..={MAX_FREENESS_ORDER}")));
    }
    if u_samples.len() != b_samples.len() || u_samples.is_empty() {
        return Err(Error::invalid("need equally many, and at least one, u and b samples"));
    }
    let k = u_samples[0].dim();
    let words = alternating_words(order);
    let mut b_moments = vec![0.0; order + 1];
    for b in b_samples {
        let mut p = ComplexMatrix::identity(k);
        for m in b_moments.iter_mut() {
            *m += p.normalized_trace().re / b_samples.len() as f64;
            p = p.mul(b);
        }
    }
    let per_sample = u_samples
        .iter()
        .zip(b_samples)
        .map(|(u, b)| words.iter().map(|w| word_trace(&[u.clone(), b.clone()], w)).collect())
        .collect::<Result<Vec<Vec<C64>>>>()?;
    let predicted = free_predictions(&b_moments, &words, order)?;
    defect_report(k, order, &words, &per_sample, &predicted)
}

/// Streaming freeness defect for `u` Haar and `b = diag(quantiles of mu_b)`,
/// sample `i` drawn from `rng.substream(i)`. Conjugating `b` by an independent
/// unitary leaves the joint law of traces unchanged, so the diagonal `b` loses
/// nothing. Predictions use the moments of the quantile spectrum itself.
pub fn freeness_defect_quantile(
    mu_b: &SpectralMeasure,
    k: usize,
    n_samples: usize,
    order: usize,
    rng: RngStream,
    workers: usize,
) -> Result<FreenessReport> {
    if order == 0 || order > MAX_FREENESS_ORDER {
        return Err(Error::invalid(format!("order must lie in 1..={MAX_FREENESS_ORDER}")));
    }
    if n_samples == 0 {
        return Err(Error::invalid("no samples"));
    }
    require_positive_support(mu_b)?;
    let d = quantile_diagonal(mu_b, k);
    let words = alternating_words(order);
    let fast = order <= 4;
    let b = ComplexMatrix::from_real_diagonal(&d);
    let per_sample = par_map(n_samples, workers, |i| -> Result<Vec<C64>> {
        let u = haar_unitary(k, rng.substream(i as u64))?;
        if fast {
            Ok(diagonal_word_traces(&u, &d, &words))
        } else {
            words.iter().map(|w| word_trace(&[u.clone(), b.clone()], w)).collect()
        }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let b_moments: Vec<f64> = (0..=order).map(|j| d.iter().map(|x| x.powi(j as i32)).sum::<f64>() / k as f64).collect();
    let predicted = free_predictions(&b_moments, &words, order)?;
    defect_report(k, order, &words, &per_sample, &predicted)
}

/// CSV dump of a sample: a `k,seed,stream_id` header line and its values,
/// then one row per matrix row with interleaved real and imaginary parts.
pub fn sample_to_csv(m: &ComplexMatrix, rng: RngStream) -> String {
    let k = m.dim();
    let mut out = format!("k,seed,stream_id\n{k},{},{}\n", rng.seed, rng.stream_id);
    for i in 0..k {
        let row: Vec<String> = (0..k).flat_map(|j| [fmt17(m[(i, j)].re), fmt17(m[(i, j)].im)]).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn sample_from_csv(text: &str) -> Result<(ComplexMatrix, RngStream)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let bad = |msg: &str| Error::Parse(msg.to_string());
    if lines.next().map(str::trim) != Some("k,seed,stream_id") {
        return Err(bad("expected header k,seed,stream_id"));
    }
    let meta: Vec<&str> = lines.next().ok_or_else(|| bad("missing k,seed,stream_id values"))?.split(',').collect();
    if meta.len() != 3 {
        return Err(bad("expected three header values"));
    }
    let k: usize = meta[0].trim().parse().map_err(|_| bad("bad k"))?;
    let seed: u64 = meta[1].trim().parse().map_err(|_| bad("bad seed"))?;
    let stream_id: u64 = meta[2].trim().parse().map_err(|_| bad("bad stream_id"))?;
    let mut data = Vec::with_capacity(k * k);
    for line in lines {
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 2 * k {
            return Err(bad("row length must be 2k"));
        }
        data.extend(vals.chunks(2).map(|c| C64::new(c[0], c[1])));
    }
    Ok((ComplexMatrix::from_row_major(k, data)?, RngStream::new(seed, stream_id)))
}
