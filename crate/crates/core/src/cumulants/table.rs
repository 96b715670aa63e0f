use std::fmt::Write as _;
use std::ops::Deref;

use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::spectral::fmt17;
use crate::word::{words_up_to, Letter, StarWord, SYMBOL_NAMES};

/// Largest word length held by a table.
pub const MAX_ORDER: usize = 8;

const SYMMETRY_TOL: f64 = 1e-10;

/// Dense map from every *-word of length `≤ order` over `n_symbols` symbols to
/// a complex number.
#[derive(Clone, Debug, PartialEq)]
pub struct WordTable {
    n_symbols: usize,
    order: usize,
    values: Vec<C64>,
}

fn offset(alphabet: usize, len: usize) -> usize {
    (0..len).map(|l| alphabet.pow(l as u32)).sum()
}

impl WordTable {
    pub fn zeros(n_symbols: usize, order: usize) -> Result<Self> {
        if n_symbols == 0 || n_symbols > SYMBOL_NAMES.len() {
            return Err(Error::invalid(format!("tables need 1..={} symbols", SYMBOL_NAMES.len())));
        }
        if order > MAX_ORDER {
            return Err(Error::OrderOverflow { requested: order, max: MAX_ORDER });
        }
        let len = offset(2 * n_symbols, order + 1);
        Ok(Self { n_symbols, order, values: vec![C64::new(0.0, 0.0); len] })
    }

    pub fn from_fn(n_symbols: usize, order: usize, mut f: impl FnMut(&StarWord) -> C64) -> Result<Self> {
        let mut t = Self::zeros(n_symbols, order)?;
        for (i, w) in words_up_to(n_symbols, order).enumerate() {
            t.values[i] = f(&w);
        }
        Ok(t)
    }

    pub fn n_symbols(&self) -> usize {
        self.n_symbols
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub(crate) fn index_of(&self, letters: &[Letter]) -> Option<usize> {
        if letters.len() > self.order {
            return None;
        }
        let a = 2 * self.n_symbols;
        let mut idx = 0;
        for l in letters {
            if l.symbol as usize >= self.n_symbols {
                return None;
            }
            idx = idx * a + l.code();
        }
        Some(offset(a, letters.len()) + idx)
    }

    /// Value at `letters`; panics when the word is outside the table.
    pub(crate) fn at(&self, letters: &[Letter]) -> C64 {
        self.values[self.index_of(letters).expect("word outside table")]
    }

    pub(crate) fn set_at(&mut self, letters: &[Letter], v: C64) {
        let i = self.index_of(letters).expect("word outside table");
        self.values[i] = v;
    }

    pub fn get(&self, w: &StarWord) -> Option<C64> {
        self.index_of(w.letters()).map(|i| self.values[i])
    }

    /// All `(word, value)` pairs, shortest words first.
    pub fn iter(&self) -> impl Iterator<Item = (StarWord, C64)> + '_ {
        words_up_to(self.n_symbols, self.order).zip(self.values.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest entrywise `|a − b|` over the words both tables hold.
    pub fn max_abs_diff(&self, other: &WordTable) -> f64 {
        let order = self.order.min(other.order);
        words_up_to(self.n_symbols.min(other.n_symbols), order)
            .map(|w| (self.at(w.letters()) - other.at(w.letters())).norm())
            .fold(0.0, f64::max)
    }

    /// The same table cut down to words of length `≤ order`.
    pub fn truncated(&self, order: usize) -> WordTable {
        let order = order.min(self.order);
        let len = offset(2 * self.n_symbols, order + 1);
        WordTable { n_symbols: self.n_symbols, order, values: self.values[..len].to_vec() }
    }
}

/// The *-distribution of a family of noncommutative variables up to a
/// truncation order: `τ(w)` for every word `w`.
///
/// Construction enforces `τ(1) = 1`, invariance under cyclic rotation and
/// `τ(w*) = conj τ(w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable(WordTable);

/// Free cumulants `κ(w)` indexed like a [`MomentTable`].
#[derive(Clone, Debug, PartialEq)]
pub struct CumulantTable(WordTable);

impl Deref for MomentTable {
    type Target = WordTable;
    fn deref(&self) -> &WordTable {
        &self.0
    }
}

impl Deref for CumulantTable {
    type Target = WordTable;
    fn deref(&self) -> &WordTable {
        &self.0
    }
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= SYMMETRY_TOL * (1.0 + a.norm().max(b.norm()))
}

impl MomentTable {
    /// Validates tracial and *-symmetry of `raw`.
    pub fn new(raw: WordTable) -> Result<Self> {
        if !close(raw.at(&[]), C64::new(1.0, 0.0)) {
            return Err(Error::invalid("the empty word must have moment 1"));
        }
        for (w, v) in raw.iter() {
            let adj = raw.at(w.adjoint().letters());
            if !close(adj, v.conj()) {
                return Err(Error::invalid(format!("τ({w}*) ≠ conj τ({w}): {adj} vs {v}")));
            }
            let rot = raw.at(w.rotate(1).letters());
            if !close(rot, v) {
                return Err(Error::invalid(format!("τ is not tracial at {w}: {v} vs {rot}")));
            }
        }
        Ok(Self(raw))
    }

    /// Averages `raw` over cyclic rotations and the star symmetry, then sets
    /// the unit entry to 1.
    pub fn symmetrized(raw: &WordTable) -> Self {
        let mut out = raw.clone();
        for (w, _) in raw.iter() {
            let n = w.len().max(1);
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let r = w.rotate(k);
                acc += raw.at(r.letters()) + raw.at(r.adjoint().letters()).conj();
            }
            out.set_at(w.letters(), acc / (2.0 * n as f64));
        }
        out.set_at(&[], C64::new(1.0, 0.0));
        Self(out)
    }

    /// Moments built by a closure assumed to be tracial and *-compatible;
    /// the result is still checked.
    pub fn from_fn(n_symbols: usize, order: usize, f: impl FnMut(&StarWord) -> C64) -> Result<Self> {
        Self::new(WordTable::from_fn(n_symbols, order, f)?)
    }

    pub(crate) fn from_trusted(t: WordTable) -> Self {
        Self(t)
    }

    pub fn table(&self) -> &WordTable {
        &self.0
    }

    /// A Haar unitary: `τ(w) = 1` when `w` has as many `u` as `u*`, else 0.
    pub fn haar_unitary(order: usize) -> Result<Self> {
        Self::from_fn(1, order, |w| {
            let stars = w.letters().iter().filter(|l| l.starred).count();
            if 2 * stars == w.len() {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// A self-adjoint variable with moments `moments[j] = τ(xʲ)`; the star is
    /// ignored.
    pub fn self_adjoint(moments: &[f64], order: usize) -> Result<Self> {
        if moments.len() <= order {
            return Err(Error::invalid(format!("need moments up to order {order}, got {}", moments.len() - 1)));
        }
        Self::from_fn(1, order, |w| C64::new(moments[w.len()], 0.0))
    }

    /// The constant `c·1`.
    pub fn constant(c: C64, order: usize) -> Result<Self> {
        Self::from_fn(1, order, |w| {
            let mut v = C64::new(1.0, 0.0);
            for l in w.letters() {
                v *= if l.starred { c.conj() } else { c };
            }
            v
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("word,real,imag\n");
        for (w, v) in self.iter() {
            let _ = writeln!(out, "{},{},{}", w, fmt17(v.re), fmt17(v.im));
        }
        out
    }

    /// Reads `word,real,imag` rows. Every word up to the longest one present
    /// must be listed; symbols are `z, w, x, ...` with upper case for the
    /// adjoint.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<(StarWord, C64)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("word")) {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected word,real,imag", i + 1)));
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))
            };
            rows.push((StarWord::parse(cols[0])?, C64::new(parse(cols[1])?, parse(cols[2])?)));
        }
        let order = rows.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        let n_symbols = rows.iter().filter_map(|(w, _)| w.max_symbol()).max().map_or(1, |s| s as usize + 1);
        let mut t = WordTable::zeros(n_symbols, order)?;
        let mut seen = vec![false; t.len()];
        for (w, v) in rows {
            let i = t.index_of(w.letters()).expect("in range by construction");
            if seen[i] {
                return Err(Error::Parse(format!("word {w:?} listed twice")));
            }
            seen[i] = true;
            t.values[i] = v;
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            let w = words_up_to(n_symbols, order).nth(i).unwrap();
            return Err(Error::Parse(format!("missing word {:?}", w.to_string())));
        }
        Self::new(t)
    }
}

impl CumulantTable {
    pub fn from_fn(n_symbols: usize, order: usize, f: impl FnMut(&StarWord) -> C64) -> Result<Self> {
        Ok(Self(WordTable::from_fn(n_symbols, order, f)?))
    }

    pub(crate) fn from_table(t: WordTable) -> Self {
        Self(t)
    }

    pub fn table(&self) -> &WordTable {
        &self.0
    }
}
