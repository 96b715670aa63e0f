use crate::error::{Error, Result};
use crate::quadrature;

const MASS_TOL: f64 = 1e-12;
const END_CELLS: usize = 32;

/// A probability measure on the real line: either finitely many atoms or a
/// density sampled on a uniform grid.
///
/// Conversions between the two representations are always explicit; the log
/// energy of an atomic measure is `−∞` and that must not be hidden by a silent
/// smoothing step.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralMeasure {
    Atoms(Atoms),
    Grid(GridDensity),
}

/// Point masses at strictly increasing locations.
#[derive(Clone, Debug, PartialEq)]
pub struct Atoms {
    locations: Vec<f64>,
    weights: Vec<f64>,
}

/// A density given by its values on `n` uniform nodes spanning `[a, b]`.
///
/// Between nodes the density is the linear interpolant, so the trapezoid rule
/// integrates it exactly and moments, CDF and quantiles are all computed for
/// that interpolant.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity {
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl Atoms {
    /// Atoms with given weights; the weights must already sum to one.
    /// Locations are sorted and exact duplicates merged.
    pub fn new(locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let atoms = Self::merged(locations, weights)?;
        let total: f64 = atoms.weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL * (1.0 + atoms.weights.len() as f64).sqrt() {
            return Err(Error::invalid(format!("atom weights sum to {total}, not 1")));
        }
        Ok(atoms)
    }

    pub fn from_unnormalized(locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let mut atoms = Self::merged(locations, weights)?;
        let total: f64 = atoms.weights.iter().sum();
        atoms.weights.iter_mut().for_each(|w| *w /= total);
        Ok(atoms)
    }

    /// The empirical measure of `values`, each with weight `1/len`.
    pub fn empirical(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("empirical measure of an empty list"));
        }
        let w = 1.0 / values.len() as f64;
        Self::merged(values.to_vec(), vec![w; values.len()])
    }

    fn merged(locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if locations.is_empty() || locations.len() != weights.len() {
            return Err(Error::invalid("atoms need equally many locations and weights, at least one"));
        }
        if locations.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("atom locations must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid("atom weights must be positive and finite"));
        }
        let mut pairs: Vec<(f64, f64)> = locations.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut locs: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut ws: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            let x = if x == 0.0 { 0.0 } else { x };
            match locs.last() {
                Some(&last) if last == x => *ws.last_mut().unwrap() += w,
                _ => {
                    locs.push(x);
                    ws.push(w);
                }
            }
        }
        Ok(Self { locations: locs, weights: ws })
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }
}

impl GridDensity {
    /// A grid density whose trapezoid mass is already one.
    pub fn new(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        let g = Self::unchecked(a, b, values)?;
        let mass = g.trapezoid_mass();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("grid density integrates to {mass}, not 1")));
        }
        Ok(g)
    }

    /// Rescales `values` to unit trapezoid mass.
    pub fn from_unnormalized(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        let mut g = Self::unchecked(a, b, values)?;
        let mass = g.trapezoid_mass();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("grid density has no mass"));
        }
        g.values.iter_mut().for_each(|v| *v /= mass);
        Ok(g)
    }

    /// Samples `density` on `n` nodes of `[a, b]`.
    ///
    /// The end cells are then made to carry their exact mass, see
    /// [`GridDensity::from_samples`]; end-cell masses come from a Gauss rule
    /// after a square-root substitution, which handles both square-root edges
    /// and integrable inverse-square-root blow-ups.
    pub fn from_density(a: f64, b: f64, n: usize, density: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("a grid needs at least two nodes"));
        }
        let values: Vec<f64> = (0..n).map(|i| density(node(a, b, n, i))).collect();
        let cell = |i: usize| {
            let (x0, x1) = (node(a, b, n, i), node(a, b, n, i + 1));
            if i == 0 {
                quadrature::integrate_sqrt_singular_left(&density, x0, x1, 16)
            } else if i == n - 2 {
                quadrature::integrate_sqrt_singular_right(&density, x0, x1, 16)
            } else {
                quadrature::integrate(&density, x0, x1, 16)
            }
        };
        Self::from_samples(a, b, values, cell)
    }

    /// Builds a grid from point samples of a density (end values may be
    /// infinite) and the exact masses of cells near the ends.
    ///
    /// Point sampling is accurate in the interior, but within a few cells of a
    /// square-root edge or an inverse-square-root blow-up the trapezoid mass of
    /// a cell is off by a few percent. For the `END_CELLS` cells at either end
    /// the node values are therefore recomputed inward-to-outward so that each
    /// of those cells carries exactly `cell_mass(i)`.
    pub fn from_samples(a: f64, b: f64, mut values: Vec<f64>, cell_mass: impl Fn(usize) -> f64) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::invalid("a grid needs at least two nodes"));
        }
        let h = (b - a) / (n - 1) as f64;
        let j = END_CELLS.min((n - 1) / 2);
        if j > 0 {
            for i in (0..j).rev() {
                values[i] = (2.0 * cell_mass(i) / h - values[i + 1]).max(0.0);
            }
            for i in (n - 1 - j)..(n - 1) {
                values[i + 1] = (2.0 * cell_mass(i) / h - values[i]).max(0.0);
            }
        } else {
            let m = cell_mass(0);
            values = vec![m / h; 2];
        }
        Self::from_unnormalized(a, b, values)
    }

    fn unchecked(a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("grid support [{a}, {b}] is not a proper interval")));
        }
        if values.len() < 2 {
            return Err(Error::invalid("a grid needs at least two nodes"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("grid density values must be finite and nonnegative"));
        }
        Ok(Self { a, b, values })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n() - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        node(self.a, self.b, self.n(), i)
    }

    pub fn trapezoid_mass(&self) -> f64 {
        self.cell_masses().iter().sum()
    }

    /// Mass of each of the `n − 1` cells.
    pub fn cell_masses(&self) -> Vec<f64> {
        let h = self.step();
        self.values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).collect()
    }

    /// Interpolated density at `x` (zero outside the support).
    pub fn density_at(&self, x: f64) -> f64 {
        if x < self.a || x > self.b {
            return 0.0;
        }
        let (i, s) = self.locate(x);
        self.values[i] + (self.values[i + 1] - self.values[i]) * s
    }

    /// Cell index and fractional position of `x ∈ [a, b]`.
    fn locate(&self, x: f64) -> (usize, f64) {
        let h = self.step();
        let t = ((x - self.a) / h).max(0.0);
        let i = (t.floor() as usize).min(self.n() - 2);
        (i, (t - i as f64).clamp(0.0, 1.0))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.cdf_with_prefix(&self.cumulative_masses(), x)
    }

    /// CDF given the running sums of the cell masses (length `n`).
    pub(crate) fn cdf_with_prefix(&self, prefix: &[f64], x: f64) -> f64 {
        if x <= self.a {
            return 0.0;
        }
        if x >= self.b {
            return 1.0;
        }
        let (i, s) = self.locate(x);
        let h = self.step();
        let (v0, v1) = (self.values[i], self.values[i + 1]);
        (prefix[i] + h * (v0 * s + 0.5 * (v1 - v0) * s * s)).min(1.0)
    }

    pub(crate) fn cumulative_masses(&self) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.n());
        prefix.push(0.0);
        for m in self.cell_masses() {
            prefix.push(prefix.last().unwrap() + m);
        }
        prefix
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let h = self.step();
        let masses = self.cell_masses();
        let mut acc = 0.0;
        for (i, &m) in masses.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            if acc + m >= p || i == masses.len() - 1 {
                let r = ((p - acc) / h).max(0.0);
                let (v0, v1) = (self.values[i], self.values[i + 1]);
                let d = v1 - v0;
                let disc = (v0 * v0 + 2.0 * d * r).max(0.0);
                let denom = v0 + disc.sqrt();
                let s = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
                return self.node(i) + h * s.clamp(0.0, 1.0);
            }
            acc += m;
        }
        self.b
    }

    /// Moments `∫ tʲ ρ(t) dt` for `j = 0..=n`, exact for the linear
    /// interpolant up to rounding.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        let q = n / 2 + 2;
        let (gx, gw) = quadrature::gauss_legendre(q);
        let mut out = vec![0.0; n + 1];
        for i in 0..self.n() - 1 {
            let (x0, x1) = (self.node(i), self.node(i + 1));
            let (v0, v1) = (self.values[i], self.values[i + 1]);
            if v0 == 0.0 && v1 == 0.0 {
                continue;
            }
            let mid = 0.5 * (x0 + x1);
            let half = 0.5 * (x1 - x0);
            for (&xi, &wi) in gx.iter().zip(&gw) {
                let t = mid + half * xi;
                let rho = v0 + (v1 - v0) * 0.5 * (1.0 + xi);
                let mut power = wi * half * rho;
                for slot in out.iter_mut() {
                    *slot += power;
                    power *= t;
                }
            }
        }
        out
    }

    /// The interpolant re-sampled on `n` nodes over the same support.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("a grid needs at least two nodes"));
        }
        let values = (0..n).map(|i| self.density_at(node(self.a, self.b, n, i))).collect();
        Self::from_unnormalized(self.a, self.b, values)
    }
}

pub(crate) fn node(a: f64, b: f64, n: usize, i: usize) -> f64 {
    if i + 1 == n {
        b
    } else {
        a + (b - a) * (i as f64 / (n - 1) as f64)
    }
}

impl SpectralMeasure {
    pub fn point(c: f64) -> Self {
        SpectralMeasure::Atoms(Atoms {
            locations: vec![c],
            weights: vec![1.0],
        })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, SpectralMeasure::Atoms(_))
    }

    /// Closed hull of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SpectralMeasure::Atoms(at) => (at.locations[0], *at.locations.last().unwrap()),
            SpectralMeasure::Grid(g) => (g.a, g.b),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            SpectralMeasure::Atoms(at) => at.weights.iter().sum(),
            SpectralMeasure::Grid(g) => g.trapezoid_mass(),
        }
    }

    /// Moments `∫ tʲ dμ` for `j = 0..=n`.
    pub fn moments(&self, n: usize) -> Vec<f64> {
        match self {
            SpectralMeasure::Atoms(at) => {
                let mut out = vec![0.0; n + 1];
                for (&x, &w) in at.locations.iter().zip(&at.weights) {
                    let mut p = w;
                    for slot in out.iter_mut() {
                        *slot += p;
                        p *= x;
                    }
                }
                out
            }
            SpectralMeasure::Grid(g) => g.moments(n),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments(1)[1]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            SpectralMeasure::Atoms(at) => at
                .locations
                .iter()
                .zip(&at.weights)
                .filter(|(&l, _)| l <= x)
                .map(|(_, &w)| w)
                .sum::<f64>()
                .min(1.0),
            SpectralMeasure::Grid(g) => g.cdf(x),
        }
    }

    /// Left-continuous inverse of the CDF: the smallest `x` with `F(x) ≥ p`.
    pub fn quantile(&self, p: f64) -> f64 {
        match self {
            SpectralMeasure::Atoms(at) => {
                let mut acc = 0.0;
                for (&x, &w) in at.locations.iter().zip(&at.weights) {
                    acc += w;
                    if acc >= p - 1e-12 {
                        return x;
                    }
                }
                *at.locations.last().unwrap()
            }
            SpectralMeasure::Grid(g) => g.quantile(p),
        }
    }

    /// The image of the measure under `t ↦ c·t`, `c > 0`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain(format!("dilation factor must be positive, got {c}")));
        }
        Ok(match self {
            SpectralMeasure::Atoms(at) => SpectralMeasure::Atoms(Atoms {
                locations: at.locations.iter().map(|x| x * c).collect(),
                weights: at.weights.clone(),
            }),
            SpectralMeasure::Grid(g) => {
                if c == 1.0 {
                    return Ok(self.clone());
                }
                let values = g.values.iter().map(|v| v / c).collect();
                SpectralMeasure::Grid(GridDensity::from_unnormalized(g.a * c, g.b * c, values)?)
            }
        })
    }

    pub fn as_grid(&self) -> Option<&GridDensity> {
        match self {
            SpectralMeasure::Grid(g) => Some(g),
            SpectralMeasure::Atoms(_) => None,
        }
    }

    pub fn as_atoms(&self) -> Option<&Atoms> {
        match self {
            SpectralMeasure::Atoms(a) => Some(a),
            SpectralMeasure::Grid(_) => None,
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_sorted_and_merged() {
        let at = Atoms::empirical(&[2.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(at.locations(), &[1.0, 2.0, 3.0]);
        assert_eq!(at.weights(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn atoms_reject_bad_weights() {
        assert!(Atoms::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
        assert!(Atoms::new(vec![0.0, 1.0], vec![1.5, -0.5]).is_err());
        assert!(Atoms::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridDensity::new(0.0, 1.0, vec![1.0, 1.0]).is_ok());
        assert!(GridDensity::new(0.0, 1.0, vec![1.0, 2.0]).is_err());
        assert!(GridDensity::new(1.0, 0.0, vec![1.0, 1.0]).is_err());
        assert!(GridDensity::new(0.0, 1.0, vec![2.0, -0.0, 0.0]).is_err());
    }

    #[test]
    fn uniform_grid_moments_cdf_quantile() {
        let g = GridDensity::from_unnormalized(-1.0, 1.0, vec![1.0; 11]).unwrap();
        let m = g.moments(4);
        let expected = [1.0, 0.0, 1.0 / 3.0, 0.0, 0.2];
        for (a, b) in m.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((g.cdf(0.3) - 0.65).abs() < 1e-14);
        assert!((g.quantile(0.65) - 0.3).abs() < 1e-13);
    }

    #[test]
    fn quantile_inverts_cdf_on_linear_density() {
        let g = GridDensity::from_unnormalized(0.0, 2.0, vec![0.0, 1.0, 3.0, 0.5]).unwrap();
        for &p in &[0.01, 0.2, 0.5, 0.77, 0.99] {
            let x = g.quantile(p);
            assert!((g.cdf(x) - p).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn atom_quantiles_are_left_continuous() {
        let m = SpectralMeasure::Atoms(Atoms::new(vec![0.0, 1.0], vec![0.5, 0.5]).unwrap());
        assert_eq!(m.quantile(0.125), 0.0);
        assert_eq!(m.quantile(0.5), 0.0);
        assert_eq!(m.quantile(0.625), 1.0);
    }

    #[test]
    fn singular_endpoint_gets_exact_mass() {
        // arcsine on [-1, 1]; the end cells carry 1/π·(π/2 − asin(1 − h)).
        let n = 101;
        let g = GridDensity::from_density(-1.0, 1.0, n, |t| 1.0 / (std::f64::consts::PI * (1.0 - t * t).sqrt())).unwrap();
        let h = g.step();
        let exact = (std::f64::consts::FRAC_PI_2 - (1.0 - h).asin()) / std::f64::consts::PI;
        let first = g.cell_masses()[0];
        assert!((first - exact).abs() / exact < 2e-2);
        assert!(g.values().iter().all(|v| v.is_finite()));
    }
}
