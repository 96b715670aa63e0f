//! Microstate sets `Γ_R(m, k, ε)`: membership, Monte Carlo estimates of their
//! Lebesgue volume, and the block bookkeeping `M_{dk} ≅ M_k^{d²}`.
//!
//! Volumes are taken for the Euclidean structure `⟨a, b⟩ = Re Tr(ab*)`, so a
//! complex `k×k` matrix has `2k²` real coordinates and a self-adjoint one has
//! `k²`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::cumulants::{circular, quarter_circular, semicircular, FreeProduct, MomentTable};
use crate::entropy::{chi_rdiag, laws};
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::parallel::par_map;
use crate::report::ext_f64;
use crate::rng::RngStream;
use crate::spectral::DEFAULT_GRID_NODES;
use crate::word::{Letter, StarWord};

/// Largest real dimension the volume estimator accepts.
pub const MAX_REAL_DIMENSION: usize = 200;
/// Fewest samples the volume estimator accepts.
pub const MIN_SAMPLES: usize = 10_000;
/// Splitting stops, with no hits, once the level has dropped by less than
/// `STALL_DECREASE` (relative) over `STALL_WINDOW` levels.
const STALL_WINDOW: usize = 4;
const STALL_DECREASE: f64 = 0.01;
/// Effective sample sizes below this are flagged.
pub const LOW_ESS: f64 = 100.0;

/// With no second-moment constraint the reference variance is `R²` over this.
const VAR_PER_RADIUS: f64 = 4.0;

/// Named target distributions, expanded to moment tables at the requested
/// order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetLaw {
    Circular { variance: f64 },
    HaarUnitary,
    Semicircular,
    QuarterCircular,
}

impl TargetLaw {
    pub fn table(&self, order: usize) -> Result<MomentTable> {
        match *self {
            TargetLaw::Circular { variance } => circular(variance, order),
            TargetLaw::HaarUnitary => MomentTable::haar_unitary(order),
            TargetLaw::Semicircular => semicircular(order),
            TargetLaw::QuarterCircular => quarter_circular(order),
        }
    }

    /// Whether the law is that of a self-adjoint element.
    pub fn is_self_adjoint(&self) -> bool {
        matches!(self, TargetLaw::Semicircular | TargetLaw::QuarterCircular)
    }
}

/// Parameters of `Γ_R(targets; m, k, ε)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaSpec {
    pub r: f64,
    pub m: usize,
    pub epsilon: f64,
    pub targets: MomentTable,
    pub n_vars: usize,
    /// Microstates are self-adjoint matrices and only unstarred words count.
    pub self_adjoint: bool,
}

impl GammaSpec {
    pub fn new(r: f64, m: usize, epsilon: f64, targets: MomentTable, self_adjoint: bool) -> Result<Self> {
        if !(r > 0.0) || !(epsilon > 0.0) || m == 0 {
            return Err(Error::invalid(format!("need R > 0, ε > 0 and m ≥ 1, got R={r}, ε={epsilon}, m={m}")));
        }
        if targets.order() < m {
            return Err(Error::invalid(format!("targets hold words up to {} but m = {m}", targets.order())));
        }
        let n_vars = targets.n_symbols();
        Ok(Self { r, m, epsilon, targets, n_vars, self_adjoint })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.r, self.m, epsilon, self.targets.clone(), self.self_adjoint)
    }

    pub fn with_m(&self, m: usize) -> Result<Self> {
        Self::new(self.r, m, self.epsilon, self.targets.clone(), self.self_adjoint)
    }

    fn alphabet(&self) -> Vec<Letter> {
        (0..self.n_vars as u8)
            .flat_map(|s| if self.self_adjoint { vec![Letter::plain(s)] } else { vec![Letter::plain(s), Letter::star(s)] })
            .collect()
    }

    /// Real dimension of `k×k` tuples.
    pub fn real_dimension(&self, k: usize) -> usize {
        let per = if self.self_adjoint { k * k } else { 2 * k * k };
        self.n_vars * per
    }
}

/// Serializable form of a [`GammaSpec`]: free variables with named laws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaConfig {
    pub r: f64,
    pub m: usize,
    pub epsilon: f64,
    /// One law per variable; distinct variables are free.
    pub targets: Vec<TargetLaw>,
    /// Defaults to whether every target is self-adjoint.
    #[serde(default)]
    pub self_adjoint: Option<bool>,
}

impl GammaConfig {
    pub fn build(&self) -> Result<GammaSpec> {
        if self.targets.is_empty() {
            return Err(Error::invalid("at least one target law is required"));
        }
        let self_adjoint = self.self_adjoint.unwrap_or_else(|| self.targets.iter().all(TargetLaw::is_self_adjoint));
        if self_adjoint && !self.targets.iter().all(TargetLaw::is_self_adjoint) {
            return Err(Error::invalid("self-adjoint microstates need self-adjoint target laws"));
        }
        let targets = if self.targets.len() == 1 {
            self.targets[0].table(self.m)?
        } else {
            let mut fp = FreeProduct::new();
            for (i, law) in self.targets.iter().enumerate() {
                fp = fp.with_family(&[i as u8], &law.table(self.m)?)?;
            }
            let mut failure = None;
            let table = MomentTable::from_fn(self.targets.len(), self.m, |w| {
                fp.moment(w.letters()).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    C64::new(0.0, 0.0)
                })
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            table
        };
        GammaSpec::new(self.r, self.m, self.epsilon, targets, self_adjoint)
    }
}

/// Largest `|tr(w) − τ(w)|` over the constrained words, with the
/// word.
fn worst_deviation(tuple: &[ComplexMatrix], spec: &GammaSpec) -> (f64, Vec<Letter>) {
    let k = tuple[0].dim() as f64;
    let alphabet = spec.alphabet();
    let mats: Vec<ComplexMatrix> = alphabet
        .iter()
        .map(|l| if l.starred { tuple[l.symbol as usize].adjoint() } else { tuple[l.symbol as usize].clone() })
        .collect();
    let mut worst = (0.0, Vec::new());
    let mut word = Vec::with_capacity(spec.m);
    fn walk(
        prefix: Option<&ComplexMatrix>,
        word: &mut Vec<Letter>,
        mats: &[ComplexMatrix],
        alphabet: &[Letter],
        spec: &GammaSpec,
        k: f64,
        worst: &mut (f64, Vec<Letter>),
    ) {
        for (l, m) in alphabet.iter().zip(mats) {
            word.push(*l);
            let last = word.len() == spec.m;
            let (tr, next) = match prefix {
                None => (m.trace(), if last { None } else { Some(m.clone()) }),
                Some(p) if last => (p.trace_of_product(m), None),
                Some(p) => {
                    let q = p.mul(m);
                    (q.trace(), Some(q))
                }
            };
            let dev = (tr / k - spec.targets.at(word)).norm();
            if dev > worst.0 || worst.1.is_empty() {
                *worst = (dev, word.clone());
            }
            if let Some(q) = next {
                walk(Some(&q), word, mats, alphabet, spec, k, worst);
            }
            word.pop();
        }
    }
    walk(None, &mut word, &mats, &alphabet, spec, k, &mut worst);
    worst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub worst_deviation: f64,
    pub worst_word: String,
    pub max_norm: f64,
}

/// Whether `tuple` lies in `Γ_R`: every constrained word within `ε` of its
/// target and every matrix of norm at most `R`.
pub fn gamma_membership(tuple: &[ComplexMatrix], spec: &GammaSpec) -> Result<Membership> {
    if tuple.len() != spec.n_vars {
        return Err(Error::invalid(format!("expected {} matrices, got {}", spec.n_vars, tuple.len())));
    }
    let k = tuple[0].dim();
    if tuple.iter().any(|m| m.dim() != k) {
        return Err(Error::invalid("matrices in a tuple must share their dimension"));
    }
    if spec.self_adjoint && tuple.iter().any(|m| !m.is_self_adjoint(1e-10 * (1.0 + m.max_abs_entry()))) {
        return Err(Error::domain("self-adjoint microstates must be Hermitian"));
    }
    let max_norm = tuple.iter().map(|m| m.operator_norm()).collect::<Result<Vec<_>>>()?.into_iter().fold(0.0, f64::max);
    let (dev, word) = worst_deviation(tuple, spec);
    Ok(Membership {
        member: dev < spec.epsilon && max_norm <= spec.r,
        worst_deviation: dev,
        worst_word: StarWord(word).to_string(),
        max_norm,
    })
}

/// How reference samples are parametrized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    /// Entries of each matrix directly.
    #[default]
    Direct,
    /// A non-self-adjoint `z` as `x + iy` with `x, y` self-adjoint.
    RealImaginary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorOptions {
    pub chart: Chart,
    /// Intersect `Γ` with the positive matrices (self-adjoint specs only).
    pub restrict_positive: bool,
    /// Fraction of the population kept at each splitting level.
    pub keep_fraction: f64,
    pub moves_per_level: usize,
    pub max_levels: usize,
    pub workers: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            chart: Chart::Direct,
            restrict_positive: false,
            keep_fraction: 0.1,
            moves_per_level: 10,
            max_levels: 60,
            workers: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub k: usize,
    #[serde(with = "ext_f64")]
    pub log_volume: f64,
    #[serde(with = "ext_f64")]
    pub stderr: f64,
    pub effective_sample_size: f64,
    /// `log_volume/k² + n·log k`, or `+ (n/2)·log k` for self-adjoint specs.
    #[serde(with = "ext_f64")]
    pub normalized: f64,
    #[serde(with = "ext_f64")]
    pub normalized_stderr: f64,
    pub n_samples: usize,
    /// Splitting levels used before reaching `ε`.
    pub levels: usize,
    pub low_confidence: bool,
}

/// Gaussian reference: every matrix is `μ·1` plus independent Gaussian
/// coordinates of variance `σ²` in an orthonormal basis, with `μ, σ²`
/// matched to the first two target moments.
#[derive(Clone, Debug)]
struct Reference {
    k: usize,
    means: Vec<C64>,
    sigma2: Vec<f64>,
    self_adjoint: bool,
    chart: Chart,
}

impl Reference {
    fn new(spec: &GammaSpec, k: usize, chart: Chart) -> Self {
        let mut means = Vec::new();
        let mut sigma2 = Vec::new();
        for s in 0..spec.n_vars as u8 {
            let mean = spec.targets.at(&[Letter::plain(s)]);
            let mean = if spec.self_adjoint { C64::new(mean.re, 0.0) } else { mean };
            let var = if spec.m >= 2 {
                let w = if spec.self_adjoint { [Letter::plain(s), Letter::plain(s)] } else { [Letter::plain(s), Letter::star(s)] };
                (spec.targets.at(&w).re - mean.norm_sqr()).max(spec.epsilon.min(1.0))
            } else {
                // only the norm bound limits the spread
                spec.r * spec.r / VAR_PER_RADIUS
            };
            means.push(mean);
            sigma2.push(var / k as f64);
        }
        Self { k, means, sigma2, self_adjoint: spec.self_adjoint, chart }
    }

    fn hermitian_noise(k: usize, sigma: f64, rng: &mut impl Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(k);
        let r = std::f64::consts::FRAC_1_SQRT_2 * sigma;
        for i in 0..k {
            let d: f64 = rng.sample(StandardNormal);
            m[(i, i)] = C64::new(sigma * d, 0.0);
            for j in i + 1..k {
                let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                m[(i, j)] = C64::new(r * a, r * b);
                m[(j, i)] = C64::new(r * a, -r * b);
            }
        }
        m
    }

    /// Centered draw for variable `i`.
    fn noise(&self, i: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let k = self.k;
        let s2 = self.sigma2[i];
        if self.self_adjoint {
            return Self::hermitian_noise(k, s2.sqrt(), rng);
        }
        match self.chart {
            Chart::Direct => {
                let s = (0.5 * s2).sqrt();
                ComplexMatrix::from_fn(k, |_, _| {
                    let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                    C64::new(s * a, s * b)
                })
            }
            Chart::RealImaginary => {
                // x, y self-adjoint with coordinate variance σ²/2; z = x + iy
                // has the same law as the direct chart and the map is an
                // isometry, so no Jacobian enters.
                let x = Self::hermitian_noise(k, (0.5 * s2).sqrt(), rng);
                let y = Self::hermitian_noise(k, (0.5 * s2).sqrt(), rng);
                x.add(&y.scale(C64::new(0.0, 1.0)))
            }
        }
    }

    fn draw(&self, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
        (0..self.means.len())
            .map(|i| self.noise(i, rng).add(&ComplexMatrix::scalar(self.k, self.means[i])))
            .collect()
    }

    /// Preconditioned Crank–Nicolson proposal; it leaves the reference law
    /// invariant.
    fn propose(&self, x: &[ComplexMatrix], rho: f64, rng: &mut impl Rng) -> Vec<ComplexMatrix> {
        let c = (1.0 - rho * rho).sqrt();
        x.iter()
            .enumerate()
            .map(|(i, xi)| {
                let mu = ComplexMatrix::scalar(self.k, self.means[i]);
                mu.add(&xi.sub(&mu).scale_real(rho)).add(&self.noise(i, rng).scale_real(c))
            })
            .collect()
    }

    /// Log density with respect to Lebesgue measure.
    fn log_density(&self, x: &[ComplexMatrix]) -> f64 {
        let k2 = (self.k * self.k) as f64;
        let mut s = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let d = xi.sub(&ComplexMatrix::scalar(self.k, self.means[i]));
            let f2 = d.frobenius_norm().powi(2);
            let s2 = self.sigma2[i];
            if self.self_adjoint {
                s += -0.5 * k2 * (2.0 * std::f64::consts::PI * s2).ln() - f2 / (2.0 * s2);
            } else {
                s += -k2 * (std::f64::consts::PI * s2).ln() - f2 / s2;
            }
        }
        s
    }
}

/// Distance score: worst moment deviation, `∞` outside the norm ball (or
/// the positive cone when requested).
fn score(x: &[ComplexMatrix], spec: &GammaSpec, positive: bool) -> f64 {
    for m in x {
        if !m.operator_norm_at_most(spec.r).unwrap_or(false) {
            return f64::INFINITY;
        }
        if positive && !m.is_positive_semidefinite(0.0) {
            return f64::INFINITY;
        }
    }
    worst_deviation(x, spec).0
}

fn log_mean_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + (v.iter().map(|x| (x - m).exp()).sum::<f64>() / v.len() as f64).ln()
}

/// `log λ(Γ_R)` for `k×k` tuples.
///
/// The reference Gaussian `q` is split into nested levels
/// `{score ≤ L_1} ⊃ {score ≤ L_2} ⊃ ... ⊃ Γ`, each level keeping a fixed
/// fraction of the population and refilling it by Metropolis moves that
/// preserve `q` restricted to the level. Then
/// `λ(Γ) = P_q(Γ)·E_q[1/q | Γ]`. Plain importance sampling is the special case
/// where the first level already is `Γ`.
pub fn log_volume_estimate(spec: &GammaSpec, k: usize, n_samples: usize, rng: RngStream) -> Result<EntropyEstimate> {
    log_volume_estimate_with(spec, k, n_samples, rng, &EstimatorOptions::default())
}

pub fn log_volume_estimate_with(
    spec: &GammaSpec,
    k: usize,
    n_samples: usize,
    rng: RngStream,
    opts: &EstimatorOptions,
) -> Result<EntropyEstimate> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let dim = spec.real_dimension(k);
    if dim > MAX_REAL_DIMENSION {
        return Err(Error::invalid(format!(
            "real dimension {dim} exceeds the estimator's limit {MAX_REAL_DIMENSION}"
        )));
    }
    if n_samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: n_samples, required: MIN_SAMPLES });
    }
    if opts.chart == Chart::RealImaginary && spec.self_adjoint {
        return Err(Error::invalid("the real/imaginary chart applies to non-self-adjoint specs"));
    }
    if opts.restrict_positive && !spec.self_adjoint {
        return Err(Error::invalid("positivity restriction applies to self-adjoint specs"));
    }
    if !(opts.keep_fraction > 0.0 && opts.keep_fraction < 1.0) || opts.moves_per_level == 0 {
        return Err(Error::invalid("keep_fraction must lie in (0, 1) and moves_per_level ≥ 1"));
    }
    let reference = Reference::new(spec, k, opts.chart);
    let positive = opts.restrict_positive;
    let n = n_samples;

    let draws = par_map(n, opts.workers, |i| {
        let x = reference.draw(&mut rng.substream(0).substream(i as u64).rng());
        let s = score(&x, spec, positive);
        (x, s)
    });
    let (mut particles, mut scores): (Vec<_>, Vec<_>) = draws.into_iter().unzip();

    let mut log_p = 0.0;
    let mut rel_var = 0.0;
    let mut level = f64::INFINITY;
    let mut rho = 0.8f64;
    let mut levels = 0;
    let mut history: Vec<f64> = Vec::new();
    let keep = ((opts.keep_fraction * n as f64).ceil() as usize).clamp(1, n);
    let failed = |levels| EntropyEstimate {
        k,
        log_volume: f64::NEG_INFINITY,
        stderr: f64::INFINITY,
        effective_sample_size: 0.0,
        normalized: f64::NEG_INFINITY,
        normalized_stderr: f64::INFINITY,
        n_samples: n,
        levels,
        low_confidence: true,
    };
    loop {
        let mut sorted = scores.clone();
        sorted.sort_by(f64::total_cmp);
        let mut next = sorted[keep - 1];
        if !next.is_finite() {
            next = sorted.iter().rev().find(|s| s.is_finite()).copied().unwrap_or(f64::INFINITY);
        }
        let done = next < spec.epsilon;
        if done {
            break;
        }
        let stalled = history.len() >= STALL_WINDOW
            && history[history.len() - STALL_WINDOW] - next < STALL_DECREASE * next;
        if !next.is_finite() || next >= level || stalled || levels >= opts.max_levels {
            // no finite score, levels converging to a floor above ε, or the
            // level budget exhausted
            let hits = scores.iter().filter(|&&s| s < spec.epsilon).count();
            if hits == 0 {
                return Ok(failed(levels));
            }
            break;
        }
        let survivors: Vec<usize> = (0..n).filter(|&i| scores[i] <= next).collect();
        let p = survivors.len() as f64 / n as f64;
        log_p += p.ln();
        rel_var += (1.0 - p) / (p * n as f64);
        level = next;
        history.push(next);
        levels += 1;

        let mut pick = rng.substream(1).substream(levels as u64).rng();
        let starts: Vec<usize> = (0..n).map(|_| survivors[pick.gen_range(0..survivors.len())]).collect();
        let current_rho = rho;
        let moved = par_map(n, opts.workers, |i| {
            let mut r = rng.substream(2 + levels as u64).substream(i as u64).rng();
            let mut x = particles[starts[i]].clone();
            let mut s = scores[starts[i]];
            let mut accepted = 0usize;
            for _ in 0..opts.moves_per_level {
                let y = reference.propose(&x, current_rho, &mut r);
                let sy = score(&y, spec, positive);
                if sy <= level {
                    x = y;
                    s = sy;
                    accepted += 1;
                }
            }
            (x, s, accepted)
        });
        let total_accepted: usize = moved.iter().map(|m| m.2).sum();
        let rate = total_accepted as f64 / (n * opts.moves_per_level) as f64;
        if rate < 0.2 {
            rho = 1.0 - 0.5 * (1.0 - rho);
        } else if rate > 0.5 {
            rho = (1.0 - 1.5 * (1.0 - rho)).max(0.0);
        }
        particles = moved.iter().map(|m| m.0.clone()).collect();
        scores = moved.iter().map(|m| m.1).collect();
    }

    let hit_idx: Vec<usize> = (0..n).filter(|&i| scores[i] < spec.epsilon).collect();
    let p = hit_idx.len() as f64 / n as f64;
    log_p += p.ln();
    if p < 1.0 {
        rel_var += (1.0 - p) / (p * n as f64);
    }
    let log_w: Vec<f64> = hit_idx.iter().map(|&i| -reference.log_density(&particles[i])).collect();
    let lme = log_mean_exp(&log_w);
    let w: Vec<f64> = log_w.iter().map(|x| (x - lme).exp()).collect();
    let (s1, s2): (f64, f64) = (w.iter().sum(), w.iter().map(|x| x * x).sum());
    let ess = s1 * s1 / s2;
    let m = w.len() as f64;
    if m > 1.0 {
        let mean = s1 / m;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
        rel_var += var / (m * mean * mean);
    }
    let log_volume = log_p + lme;
    let stderr = rel_var.sqrt();
    let kf = k as f64;
    let n_log_k = if spec.self_adjoint { 0.5 * spec.n_vars as f64 * kf.ln() } else { spec.n_vars as f64 * kf.ln() };
    Ok(EntropyEstimate {
        k,
        log_volume,
        stderr,
        effective_sample_size: ess,
        normalized: log_volume / (kf * kf) + n_log_k,
        normalized_stderr: stderr / (kf * kf),
        n_samples: n,
        levels,
        low_confidence: ess < LOW_ESS,
    })
}

/// Normalized estimates for every `k` in `k_list`, each on its own
/// substream.
pub fn chi_curve(
    spec: &GammaSpec,
    k_list: &[usize],
    n_samples: usize,
    rng: RngStream,
    opts: &EstimatorOptions,
) -> Result<Vec<EntropyEstimate>> {
    k_list
        .iter()
        .map(|&k| log_volume_estimate_with(spec, k, n_samples, rng.substream(k as u64), opts))
        .collect()
}

/// `Z = Σ X_ij ⊗ e_ij`: the `dk×dk` matrix with block `(i, j)` equal to
/// `entries[i][j]`.
pub fn block_embed(entries: &[Vec<ComplexMatrix>]) -> Result<ComplexMatrix> {
    let d = entries.len();
    if d == 0 || entries.iter().any(|row| row.len() != d) {
        return Err(Error::invalid("block entries must form a non-empty d×d array"));
    }
    let k = entries[0][0].dim();
    if entries.iter().flatten().any(|m| m.dim() != k) {
        return Err(Error::invalid("all blocks must have the same dimension"));
    }
    Ok(ComplexMatrix::from_fn(d * k, |r, c| entries[r / k][c / k][(r % k, c % k)]))
}

/// Inverse of [`block_embed`].
pub fn entry_split(z: &ComplexMatrix, d: usize) -> Result<Vec<Vec<ComplexMatrix>>> {
    if d == 0 || z.dim() % d != 0 {
        return Err(Error::invalid(format!("dimension {} is not divisible by {d}", z.dim())));
    }
    let k = z.dim() / d;
    Ok((0..d)
        .map(|i| (0..d).map(|j| ComplexMatrix::from_fn(k, |r, c| z[(i * k + r, j * k + c)])).collect())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationReport {
    pub d: usize,
    pub v: f64,
    /// `χ` of `d²` free circular entries of variance `v/d`.
    pub lhs: f64,
    /// `d²·χ(Z)` for `Z` circular of variance `v`.
    pub rhs_matrix_term: f64,
    pub constant: f64,
    /// `d² log d`.
    pub expected_magnitude: f64,
    pub magnitude_matches: bool,
    pub sign: Sign,
    pub note: String,
}

/// Tolerance on `|constant| = d² log d`.
pub const AMPLIFICATION_TOL: f64 = 1e-9;

/// The dimensional constant between the entropy of the `d²` entries of a
/// circular `Z ∈ M_d(A)` and `d²` times the entropy of `Z`.
///
/// Entries of `Z` (variance `v`) are free circulars of variance `v/d`.
/// Both sides come from `χ(circular, w) = χ(ub)` with `b` a quarter-circular
/// law scaled by `√w`, and additivity over free families.
pub fn amplification_constant(d: usize, v: f64) -> Result<AmplificationReport> {
    if d == 0 || !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("need d ≥ 1 and v > 0, got d={d}, v={v}")));
    }
    let qc = laws::quarter_circle(DEFAULT_GRID_NODES)?;
    let chi_circ = |w: f64| -> Result<f64> { Ok(chi_rdiag(&qc.dilate(w.sqrt())?)?.value) };
    let d2 = (d * d) as f64;
    let lhs = d2 * chi_circ(v / d as f64)?;
    let rhs_matrix_term = d2 * chi_circ(v)?;
    let constant = lhs - rhs_matrix_term;
    let expected_magnitude = d2 * (d as f64).ln();
    let sign = if constant.abs() <= AMPLIFICATION_TOL {
        Sign::Zero
    } else if constant < 0.0 {
        Sign::Negative
    } else {
        Sign::Positive
    };
    Ok(AmplificationReport {
        d,
        v,
        lhs,
        rhs_matrix_term,
        constant,
        expected_magnitude,
        magnitude_matches: (constant.abs() - expected_magnitude).abs() < AMPLIFICATION_TOL,
        sign,
        note: "the amplification inequality is written with +d² log d; in this circular equality case \
               the computed constant is lhs − d²χ(Z), and only its magnitude is asserted"
            .into(),
    })
}
