use super::free_product::FreeProduct;
use super::table::{MomentTable, WordTable};
use crate::error::Result;
use crate::matrix::C64;
use crate::word::Letter;

/// A noncommutative polynomial `Σ c_t · m_t` in the letters of a
/// [`FreeProduct`]; an empty monomial is the unit.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub terms: Vec<(C64, Vec<Letter>)>,
}

impl Polynomial {
    pub fn letter(l: Letter) -> Self {
        Self { terms: vec![(C64::new(1.0, 0.0), vec![l])] }
    }

    pub fn constant(c: C64) -> Self {
        Self { terms: vec![(c, Vec::new())] }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                let mut m = ma.clone();
                m.extend_from_slice(mb);
                terms.push((a * b, m));
            }
        }
        Self { terms }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(c, m)| (c.conj(), m.iter().rev().map(|l| l.adjoint()).collect()))
                .collect(),
        }
    }
}

/// The one-symbol *-distribution of `z` up to `order`, for `z` a polynomial
/// in free variables.
pub fn distribution_of(fp: &FreeProduct, z: &Polynomial, order: usize) -> Result<MomentTable> {
    let zs = z.adjoint();
    let mut out = WordTable::zeros(1, order)?;
    let words: Vec<_> = out.iter().map(|(w, _)| w).collect();
    for w in words {
        let mut acc = vec![(C64::new(1.0, 0.0), Vec::<Letter>::new())];
        for l in w.letters() {
            let p = if l.starred { &zs } else { z };
            let mut next = Vec::with_capacity(acc.len() * p.terms.len());
            for (c, m) in &acc {
                for (d, pm) in &p.terms {
                    let mut mm = m.clone();
                    mm.extend_from_slice(pm);
                    next.push((c * d, mm));
                }
            }
            acc = next;
        }
        let mut v = C64::new(0.0, 0.0);
        for (c, m) in acc {
            v += c * fp.moment(&m)?;
        }
        out.set_at(w.letters(), v);
    }
    MomentTable::new(out)
}
