//! Spin configurations, bit-packed one node per bit.
//!
//! A spin is either -1 or +1. The packed representation stores bit 1 for +1
//! and bit 0 for -1, which makes the text encoding ('1' / '0') and the packed
//! words agree: configuration text reads left to right as node 0, 1, 2, ...

use crate::error::{Q2rError, Result};

/// One node state. `Minus` is -1, `Plus` is +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Minus,
    Plus,
}

impl Spin {
    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Spin::Minus => -1,
            Spin::Plus => 1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Minus => Spin::Plus,
            Spin::Plus => Spin::Minus,
        }
    }

    #[inline]
    pub fn from_bool(up: bool) -> Spin {
        if up {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Spin::Minus => '0',
            Spin::Plus => '1',
        }
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", if *self == Spin::Plus { "+1" } else { "-1" })
    }
}

const WORD_BITS: usize = 64;

/// A full network state: one spin per node, packed 64 per word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    n: usize,
    words: Vec<u64>,
}

impl Configuration {
    /// All nodes at -1.
    pub fn all_minus(n: usize) -> Self {
        Configuration { n, words: vec![0; n.div_ceil(WORD_BITS)] }
    }

    /// All nodes at +1.
    pub fn all_plus(n: usize) -> Self {
        let mut c = Self::all_minus(n);
        for i in 0..n {
            c.set(i, Spin::Plus);
        }
        c
    }

    pub fn from_spins(spins: &[Spin]) -> Self {
        let mut c = Self::all_minus(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            c.set(i, s);
        }
        c
    }

    /// Build from the low `n` bits of `bits` (bit i -> node i). Handy for
    /// exhaustive sweeps over small networks.
    pub fn from_bits_u64(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "from_bits_u64 covers at most 64 nodes");
        let mut c = Self::all_minus(n);
        if n > 0 {
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            c.words[0] = bits & mask;
        }
        c
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> Spin {
        debug_assert!(i < self.n);
        Spin::from_bool(self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: Spin) {
        debug_assert!(i < self.n);
        let w = &mut self.words[i / WORD_BITS];
        let bit = 1u64 << (i % WORD_BITS);
        match s {
            Spin::Plus => *w |= bit,
            Spin::Minus => *w &= !bit,
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Number of +1 nodes among the listed neighbors.
    #[inline]
    pub fn count_plus(&self, nodes: &[u32]) -> usize {
        nodes.iter().filter(|&&j| self.get(j as usize) == Spin::Plus).count()
    }

    /// Global negation: every spin flipped.
    pub fn negated(&self) -> Configuration {
        let mut c = self.clone();
        for w in &mut c.words {
            *w = !*w;
        }
        c.mask_tail();
        c
    }

    pub fn iter(&self) -> impl Iterator<Item = Spin> + '_ {
        (0..self.n).map(move |i| self.get(i))
    }

    /// Packed words, for hashing and exact comparisons by callers.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn mask_tail(&mut self) {
        let used = self.n % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    /// Parse a configuration line: exactly `'0'` and `'1'`, one per node.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let mut c = Self::all_minus(text.chars().count());
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => c.set(i, Spin::Plus),
                other => {
                    return Err(Q2rError::parse(
                        1,
                        format!("configuration may contain only 0 and 1, found {other:?} at position {}", i + 1),
                    ))
                }
            }
        }
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        self.iter().map(Spin::as_char).collect()
    }
}

impl std::fmt::Debug for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Configuration({})", self.to_text())
    }
}

impl std::fmt::Display for Configuration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let c = Configuration::parse("1000").unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.get(0), Spin::Plus);
        assert_eq!(c.get(3), Spin::Minus);
        assert_eq!(c.to_text(), "1000");
    }

    #[test]
    fn empty_configuration_is_legal() {
        let c = Configuration::parse("").unwrap();
        assert_eq!(c.len(), 0);
        assert_eq!(c.to_text(), "");
    }

    #[test]
    fn rejects_foreign_characters() {
        assert!(Configuration::parse("10x0").is_err());
    }

    #[test]
    fn negation_flips_every_spin_and_nothing_else() {
        let c = Configuration::parse("101100111").unwrap();
        let n = c.negated();
        assert_eq!(n.to_text(), "010011000");
        assert_eq!(n.negated(), c);
    }

    #[test]
    fn bit_sweep_matches_indexing_across_word_boundary() {
        let mut c = Configuration::all_minus(130);
        c.set(0, Spin::Plus);
        c.set(63, Spin::Plus);
        c.set(64, Spin::Plus);
        c.set(129, Spin::Plus);
        assert_eq!(c.iter().filter(|&s| s == Spin::Plus).count(), 4);
        c.flip(64);
        assert_eq!(c.get(64), Spin::Minus);
    }
}
