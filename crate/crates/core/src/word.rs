use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One letter of a *-word: a symbol, possibly starred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub symbol: u8,
    pub starred: bool,
}

impl Letter {
    pub fn plain(symbol: u8) -> Self {
        Self { symbol, starred: false }
    }

    pub fn star(symbol: u8) -> Self {
        Self { symbol, starred: true }
    }

    pub fn adjoint(self) -> Self {
        Self { starred: !self.starred, ..self }
    }

    /// Position in the alphabet `s0, s0*, s1, s1*, ...`.
    pub fn code(self) -> usize {
        2 * self.symbol as usize + self.starred as usize
    }

    pub fn from_code(code: usize) -> Self {
        Self { symbol: (code / 2) as u8, starred: code % 2 == 1 }
    }
}

/// A word in symbols and their adjoints. The empty word stands for the unit.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StarWord(pub Vec<Letter>);

/// Default letter names: symbol `i` is written with `SYMBOL_NAMES[i]`, its
/// adjoint with the upper-case letter.
pub const SYMBOL_NAMES: &[char] = &['z', 'w', 'x', 'y', 'v'];

impl StarWord {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    /// `(w)* `: reversed, every letter starred or unstarred.
    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn rotate(&self, k: usize) -> Self {
        let mut v = self.0.clone();
        if !v.is_empty() {
            let k = k % v.len();
            v.rotate_left(k);
        }
        Self(v)
    }

    pub fn max_symbol(&self) -> Option<u8> {
        self.0.iter().map(|l| l.symbol).max()
    }

    /// True for `z z* z z* ...` or `z* z z* z ...` of even length over one
    /// symbol.
    pub fn is_alternating(&self) -> bool {
        let n = self.0.len();
        n > 0
            && n % 2 == 0
            && self.0.windows(2).all(|w| w[0].symbol == w[1].symbol && w[0].starred != w[1].starred)
    }

    /// Parses letters named by `names` (lower case plain, upper case starred).
    /// The empty string is the unit word.
    pub fn parse_with(s: &str, names: &[char]) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| {
                let lower = c.to_ascii_lowercase();
                let symbol = names
                    .iter()
                    .position(|&n| n == lower)
                    .ok_or_else(|| Error::Parse(format!("unknown letter {c:?} in word {s:?}")))?;
                Ok(Letter { symbol: symbol as u8, starred: c.is_ascii_uppercase() })
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with(s, SYMBOL_NAMES)
    }

    pub fn to_string_with(&self, names: &[char]) -> String {
        self.0
            .iter()
            .map(|l| {
                let c = names.get(l.symbol as usize).copied().unwrap_or('?');
                if l.starred {
                    c.to_ascii_uppercase()
                } else {
                    c
                }
            })
            .collect()
    }
}

impl fmt::Display for StarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(SYMBOL_NAMES))
    }
}

/// All words of length exactly `len` over `n_symbols` symbols, in
/// lexicographic order of letter codes.
pub fn words_of_length(n_symbols: usize, len: usize) -> impl Iterator<Item = StarWord> {
    let a = 2 * n_symbols;
    let count = a.pow(len as u32);
    (0..count).map(move |mut idx| {
        let mut letters = vec![Letter::plain(0); len];
        for slot in letters.iter_mut().rev() {
            *slot = Letter::from_code(idx % a);
            idx /= a;
        }
        StarWord(letters)
    })
}

/// All words of length `0..=order`.
pub fn words_up_to(n_symbols: usize, order: usize) -> impl Iterator<Item = StarWord> {
    (0..=order).flat_map(move |l| words_of_length(n_symbols, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let w = StarWord::parse("zZzZ").unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.is_alternating());
        assert_eq!(w.to_string(), "zZzZ");
        assert_eq!(StarWord::parse("").unwrap(), StarWord::empty());
        assert!(StarWord::parse("zq").is_err());
    }

    #[test]
    fn adjoint_reverses_and_toggles() {
        let w = StarWord::parse("zzW").unwrap();
        assert_eq!(w.adjoint().to_string(), "wZZ");
        assert_eq!(w.adjoint().adjoint(), w);
    }

    #[test]
    fn alternation() {
        for (s, want) in [("zZ", true), ("Zz", true), ("zz", false), ("zZz", false), ("zW", false), ("", false)] {
            assert_eq!(StarWord::parse(s).unwrap().is_alternating(), want, "{s}");
        }
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(words_of_length(1, 3).count(), 8);
        assert_eq!(words_up_to(2, 2).count(), 1 + 4 + 16);
        let all: Vec<_> = words_of_length(1, 2).map(|w| w.to_string()).collect();
        assert_eq!(all, ["zz", "zZ", "Zz", "ZZ"]);
    }
}
