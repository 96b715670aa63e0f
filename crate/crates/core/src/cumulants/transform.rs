//! Moment ↔ cumulant transforms by recursion on the block of the first
//! letter: `τ(w) = Σ_{V ∋ 1} κ(w_V) · Π_{gaps G of V} τ(w_G)`.

use super::table::{CumulantTable, MomentTable, WordTable};
use crate::matrix::C64;
use crate::word::{words_of_length, Letter};

/// Sum over blocks `V ∋ 1` of `κ(w_V) Π τ(gaps)`, skipping the full block
/// unless `include_full`.
pub(crate) fn first_block_sum(
    letters: &[Letter],
    include_full: bool,
    kappa: impl Fn(&[Letter]) -> C64,
    tau: impl Fn(&[Letter]) -> C64,
) -> C64 {
    let n = letters.len();
    let full = (1u32 << (n - 1)) - 1;
    let mut total = C64::new(0.0, 0.0);
    let mut block: Vec<Letter> = Vec::with_capacity(n);
    for mask in 0..=full {
        if mask == full && !include_full {
            continue;
        }
        block.clear();
        block.push(letters[0]);
        let mut term = C64::new(1.0, 0.0);
        let mut prev = 0;
        for p in 1..n {
            if mask >> (p - 1) & 1 == 1 {
                block.push(letters[p]);
                if p > prev + 1 {
                    term *= tau(&letters[prev + 1..p]);
                }
                prev = p;
            }
        }
        if prev + 1 < n {
            term *= tau(&letters[prev + 1..n]);
        }
        if term == C64::new(0.0, 0.0) {
            continue;
        }
        total += kappa(&block) * term;
    }
    total
}

pub fn moments_to_cumulants(m: &MomentTable) -> CumulantTable {
    let mut k = WordTable::zeros(m.n_symbols(), m.order()).expect("shape taken from a valid table");
    for len in 1..=m.order() {
        for w in words_of_length(m.n_symbols(), len) {
            let l = w.letters();
            let rest = first_block_sum(l, false, |b| k.at(b), |g| m.at(g));
            let v = m.at(l) - rest;
            k.set_at(l, v);
        }
    }
    CumulantTable::from_table(k)
}

pub fn cumulants_to_moments(c: &CumulantTable) -> MomentTable {
    let mut m = WordTable::zeros(c.n_symbols(), c.order()).expect("shape taken from a valid table");
    m.set_at(&[], C64::new(1.0, 0.0));
    for len in 1..=c.order() {
        for w in words_of_length(c.n_symbols(), len) {
            let l = w.letters();
            let v = first_block_sum(l, true, |b| c.at(b), |g| m.at(g));
            m.set_at(l, v);
        }
    }
    MomentTable::from_trusted(m)
}
