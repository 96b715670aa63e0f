use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_nc`].
pub const MAX_NC_SIZE: usize = 10;

/// A non-crossing partition of `{1, ..., n}`; blocks are sorted and listed by
/// their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NCPartition {
    pub n: usize,
    pub blocks: Vec<Vec<usize>>,
}

impl NCPartition {
    /// True when the blocks cover `{1, ..., n}` exactly once.
    pub fn is_partition(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for &x in b {
                if x == 0 || x > self.n || seen[x] {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen[1..].iter().all(|&s| s)
    }

    /// No `a < b < c < d` with `a, c` in one block and `b, d` in another.
    pub fn is_non_crossing(&self) -> bool {
        let mut owner = vec![usize::MAX; self.n + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                if x <= self.n {
                    owner[x] = i;
                }
            }
        }
        for a in 1..=self.n {
            for b in a + 1..=self.n {
                for c in b + 1..=self.n {
                    if owner[a] != owner[c] || owner[a] == owner[b] {
                        continue;
                    }
                    for d in c + 1..=self.n {
                        if owner[d] == owner[b] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// All non-crossing partitions of `{1, ..., n}`, `1 ≤ n ≤ 10`.
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    if !(1..=MAX_NC_SIZE).contains(&n) {
        return Err(Error::invalid(format!("n must lie in 1..={MAX_NC_SIZE}, got {n}")));
    }
    let mut out: Vec<NCPartition> = partitions_of_interval(1, n + 1)
        .into_iter()
        .map(|mut blocks| {
            blocks.sort();
            NCPartition { n, blocks }
        })
        .collect();
    out.sort_by(|a, b| a.blocks.cmp(&b.blocks));
    Ok(out)
}

/// NC partitions of `lo..hi`: pick the block of `lo`, then partition every
/// gap it leaves independently.
fn partitions_of_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![Vec::new()];
    }
    let rest: Vec<usize> = (lo + 1..hi).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        let mut block = vec![lo];
        block.extend(rest.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &x)| x));
        let mut bounds: Vec<usize> = block.clone();
        bounds.push(hi);
        let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![block]];
        for w in bounds.windows(2) {
            let gaps = partitions_of_interval(w[0] + 1, w[1]);
            let mut next = Vec::with_capacity(acc.len() * gaps.len());
            for a in &acc {
                for g in &gaps {
                    let mut p = a.clone();
                    p.extend(g.iter().cloned());
                    next.push(p);
                }
            }
            acc = next;
        }
        out.extend(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(enumerate_nc(1).unwrap().len(), 1);
        assert_eq!(enumerate_nc(3).unwrap().len(), 5);
        assert!(enumerate_nc(0).is_err());
        assert!(enumerate_nc(11).is_err());
    }

    #[test]
    fn crossing_detection() {
        let p = NCPartition { n: 4, blocks: vec![vec![1, 3], vec![2, 4]] };
        assert!(p.is_partition());
        assert!(!p.is_non_crossing());
        let q = NCPartition { n: 4, blocks: vec![vec![1, 4], vec![2, 3]] };
        assert!(q.is_non_crossing());
    }
}
