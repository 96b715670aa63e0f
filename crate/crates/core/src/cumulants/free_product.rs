use std::collections::HashMap;

use super::table::{CumulantTable, MomentTable};
use super::transform::moments_to_cumulants;
use crate::error::{Error, Result};
use crate::matrix::C64;
use crate::word::Letter;

/// Joint moments of free families, each given by its own moment table.
///
/// Mixed free cumulants vanish, so in the first-block recursion only blocks
/// whose letters all belong to the family of the first letter contribute.
/// Every sub-problem is a contiguous piece of the queried word, so one query
/// costs at most `O(L²)` memoized evaluations.
#[derive(Clone, Debug, Default)]
pub struct FreeProduct {
    families: Vec<Family>,
    owner: HashMap<u8, (usize, u8)>,
}

#[derive(Clone, Debug)]
struct Family {
    cumulants: CumulantTable,
}

impl FreeProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a family whose local symbol `i` is the global symbol `symbols[i]`.
    pub fn with_family(mut self, symbols: &[u8], moments: &MomentTable) -> Result<Self> {
        if symbols.len() != moments.n_symbols() {
            return Err(Error::invalid(format!(
                "family has {} symbols but {} were named",
                moments.n_symbols(),
                symbols.len()
            )));
        }
        let index = self.families.len();
        for (local, &g) in symbols.iter().enumerate() {
            if self.owner.insert(g, (index, local as u8)).is_some() {
                return Err(Error::invalid(format!("symbol {g} belongs to two families")));
            }
        }
        self.families.push(Family { cumulants: moments_to_cumulants(moments) });
        Ok(self)
    }

    /// `τ(word)` in the free product.
    pub fn moment(&self, word: &[Letter]) -> Result<C64> {
        let mut local = Vec::with_capacity(word.len());
        for l in word {
            let &(fam, sym) = self
                .owner
                .get(&l.symbol)
                .ok_or_else(|| Error::invalid(format!("symbol {} has no family", l.symbol)))?;
            local.push((fam, Letter { symbol: sym, starred: l.starred }));
        }
        let n = local.len();
        let mut memo: Vec<Option<C64>> = vec![None; (n + 1) * (n + 1)];
        self.interval(&local, 0, n, &mut memo)
    }

    fn interval(&self, w: &[(usize, Letter)], lo: usize, hi: usize, memo: &mut Vec<Option<C64>>) -> Result<C64> {
        if lo >= hi {
            return Ok(C64::new(1.0, 0.0));
        }
        let n1 = w.len() + 1;
        if let Some(v) = memo[lo * n1 + hi] {
            return Ok(v);
        }
        let fam = w[lo].0;
        let table = &self.families[fam].cumulants;
        let candidates: Vec<usize> = (lo + 1..hi).filter(|&p| w[p].0 == fam).collect();
        let mut total = C64::new(0.0, 0.0);
        let mut block: Vec<Letter> = Vec::with_capacity(candidates.len() + 1);
        let mut positions: Vec<usize> = Vec::with_capacity(candidates.len() + 1);
        for mask in 0u64..(1u64 << candidates.len()) {
            block.clear();
            positions.clear();
            block.push(w[lo].1);
            positions.push(lo);
            for (i, &p) in candidates.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    block.push(w[p].1);
                    positions.push(p);
                }
            }
            if block.len() > table.order() {
                return Err(Error::OrderOverflow { requested: block.len(), max: table.order() });
            }
            let kappa = table.at(&block);
            if kappa == C64::new(0.0, 0.0) {
                continue;
            }
            let mut term = kappa;
            positions.push(hi);
            for pair in positions.windows(2) {
                if pair[1] > pair[0] + 1 {
                    term *= self.interval(w, pair[0] + 1, pair[1], memo)?;
                    if term == C64::new(0.0, 0.0) {
                        break;
                    }
                }
            }
            total += term;
        }
        memo[lo * n1 + hi] = Some(total);
        Ok(total)
    }
}
