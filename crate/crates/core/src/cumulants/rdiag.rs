use serde::{Deserialize, Serialize};

use super::expr::{distribution_of, Polynomial};
use super::free_product::FreeProduct;
use super::table::{CumulantTable, MomentTable, MAX_ORDER};
use super::transform::{cumulants_to_moments, moments_to_cumulants};
use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::word::{Letter, StarWord};

/// Entrywise tolerance of the `uz = z` fixed-point test.
pub const FIXED_POINT_TOL: f64 = 1e-9;

fn one_symbol(m: &MomentTable) -> Result<()> {
    if m.n_symbols() != 1 {
        return Err(Error::invalid(format!("expected a one-symbol table, got {} symbols", m.n_symbols())));
    }
    Ok(())
}

/// The distribution of `uz` for a Haar unitary `u` *-free from `z`.
pub fn haar_multiply(m: &MomentTable) -> Result<MomentTable> {
    one_symbol(m)?;
    if m.order() > MAX_ORDER {
        return Err(Error::OrderOverflow { requested: m.order(), max: MAX_ORDER });
    }
    let fp = FreeProduct::new()
        .with_family(&[0], &MomentTable::haar_unitary(m.order())?)?
        .with_family(&[1], m)?;
    let uz = Polynomial::letter(Letter::plain(0)).mul(&Polynomial::letter(Letter::plain(1)));
    distribution_of(&fp, &uz, m.order())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RDiagonalReport {
    pub r_diagonal: bool,
    /// Largest `|κ(w)|` over words that are not even alternations of `z`
    /// and `z*`, with its word.
    pub worst_word: Option<String>,
    pub worst_cumulant: f64,
    /// `max_w |τ_{uz}(w) − τ_z(w)|`.
    pub fixed_point_defect: f64,
    /// The cumulant criterion and the fixed-point test agree.
    pub consistent: bool,
    /// `τ(zz*) = 0`: `z` vanishes and has no polar decomposition, so the
    /// verdict is formal.
    pub degenerate_at_zero: bool,
}

/// Alternating-cumulant test for R-diagonality, cross-checked against
/// invariance under multiplication by a free Haar unitary.
pub fn is_r_diagonal(m: &MomentTable, tol: f64) -> Result<RDiagonalReport> {
    one_symbol(m)?;
    let k = moments_to_cumulants(m);
    let mut worst: Option<(StarWord, f64)> = None;
    for (w, v) in k.iter() {
        if w.is_empty() || w.is_alternating() {
            continue;
        }
        if worst.as_ref().map_or(true, |(_, x)| v.norm() > *x) {
            worst = Some((w, v.norm()));
        }
    }
    let worst_cumulant = worst.as_ref().map_or(0.0, |(_, x)| *x);
    let r_diagonal = worst_cumulant < tol;
    let fixed_point_defect = haar_multiply(m)?.max_abs_diff(m);
    let zz = m.order() >= 2 && m.at(&[Letter::plain(0), Letter::star(0)]).norm() == 0.0;
    Ok(RDiagonalReport {
        r_diagonal,
        worst_word: worst.map(|(w, _)| w.to_string()),
        worst_cumulant,
        fixed_point_defect,
        consistent: r_diagonal == (fixed_point_defect < FIXED_POINT_TOL),
        degenerate_at_zero: zz,
    })
}

/// Circular element with `τ(zz*) = variance`.
pub fn circular(variance: f64, order: usize) -> Result<MomentTable> {
    let c = CumulantTable::from_fn(1, order, |w| {
        if w.len() == 2 && w.is_alternating() {
            C64::new(variance, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    Ok(cumulants_to_moments(&c))
}

/// Standard semicircular element.
pub fn semicircular(order: usize) -> Result<MomentTable> {
    let moments: Vec<f64> = (0..=order).map(|j| if j % 2 == 0 { catalan(j / 2) } else { 0.0 }).collect();
    MomentTable::self_adjoint(&moments, order)
}

fn catalan(n: usize) -> f64 {
    (0..n).fold(1.0, |c, i| c * 2.0 * (2 * i + 1) as f64 / (i + 2) as f64)
}

/// Positive element with density `√(4 − t²)/π` on `[0, 2]`.
pub fn quarter_circular(order: usize) -> Result<MomentTable> {
    use statrs::function::beta::beta;
    let moments: Vec<f64> = (0..=order)
        .map(|j| 2f64.powi(j as i32 + 1) / std::f64::consts::PI * beta((j as f64 + 1.0) / 2.0, 1.5))
        .collect();
    MomentTable::self_adjoint(&moments, order)
}

/// Positive element uniform on `[0, 1]`.
pub fn uniform_positive(order: usize) -> Result<MomentTable> {
    let moments: Vec<f64> = (0..=order).map(|j| 1.0 / (j as f64 + 1.0)).collect();
    MomentTable::self_adjoint(&moments, order)
}

fn z(i: u8) -> Polynomial {
    Polynomial::letter(Letter::plain(i))
}

/// Distribution of a polynomial in free variables, each given by a
/// one-symbol table.
pub fn free_polynomial(vars: &[MomentTable], p: &Polynomial, order: usize) -> Result<MomentTable> {
    let mut fp = FreeProduct::new();
    for (i, m) in vars.iter().enumerate() {
        fp = fp.with_family(&[i as u8], m)?;
    }
    distribution_of(&fp, p, order)
}

/// A named table together with the expected verdict.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub table: MomentTable,
    pub expect_r_diagonal: bool,
}

/// Ten one-symbol tables, half of them R-diagonal.
pub fn corpus(order: usize) -> Result<Vec<CorpusEntry>> {
    let c = circular(1.0, order)?;
    let s = semicircular(order)?;
    let u = MomentTable::haar_unitary(order)?;
    let one = MomentTable::constant(C64::new(1.0, 0.0), order)?;
    let sum = z(0).add(&z(1));
    let prod = z(0).mul(&z(1));
    let entry = |name, table, expect_r_diagonal| CorpusEntry { name, table, expect_r_diagonal };
    Ok(vec![
        entry("circular", c.clone(), true),
        entry("haar_unitary", u.clone(), true),
        entry("circular_times_circular", free_polynomial(&[c.clone(), c.clone()], &prod, order)?, true),
        entry("haar_times_uniform", free_polynomial(&[u.clone(), uniform_positive(order)?], &prod, order)?, true),
        entry("circular_times_semicircular", free_polynomial(&[c.clone(), s.clone()], &prod, order)?, true),
        entry("semicircular", s.clone(), false),
        entry("shifted_circular", free_polynomial(&[c.clone(), one.clone()], &sum, order)?, false),
        entry("quarter_circular", quarter_circular(order)?, false),
        entry("shifted_haar", free_polynomial(&[u, one], &sum, order)?, false),
        entry("circular_plus_semicircular", free_polynomial(&[c, s], &sum, order)?, false),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_multiply_of_unit_is_haar() {
        let one = MomentTable::constant(C64::new(1.0, 0.0), 6).unwrap();
        let out = haar_multiply(&one).unwrap();
        assert!(out.max_abs_diff(&MomentTable::haar_unitary(6).unwrap()) < 1e-14);
    }

    #[test]
    fn quarter_circular_under_haar() {
        let out = haar_multiply(&quarter_circular(4).unwrap()).unwrap();
        let zz = out.get(&StarWord::parse("zZ").unwrap()).unwrap();
        let z2 = out.get(&StarWord::parse("zz").unwrap()).unwrap();
        assert!((zz - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(z2.norm() < 1e-14);
    }

    #[test]
    fn semicircular_is_not_r_diagonal() {
        let r = is_r_diagonal(&semicircular(4).unwrap(), 1e-10).unwrap();
        assert!(!r.r_diagonal && r.consistent);
        assert_eq!(r.worst_word.as_deref(), Some("zz"));
    }
}
