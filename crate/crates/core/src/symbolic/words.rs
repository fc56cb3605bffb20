use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Symbol = u16;

/// Default upper bound on `K^n` for a single enumeration.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 24;

/// Partition alphabet `{0, …, K-1}` with its admissible transitions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    size: usize,
    adjacency: Vec<bool>,
}

impl Alphabet {
    /// Full shift on `k` symbols.
    pub fn full(k: usize) -> Result<Self> {
        Self::from_flat(k, vec![true; k * k])
    }

    pub fn new(adjacency: &[Vec<bool>]) -> Result<Self> {
        let k = adjacency.len();
        if adjacency.iter().any(|row| row.len() != k) {
            return Err(Error::invalid("adjacency must be square"));
        }
        Self::from_flat(k, adjacency.iter().flatten().copied().collect())
    }

    /// Row-major `k × k` adjacency.
    pub fn from_flat(k: usize, adjacency: Vec<bool>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("alphabet needs at least one symbol"));
        }
        if k > Symbol::MAX as usize {
            return Err(Error::invalid(format!("alphabet of {k} symbols is too large")));
        }
        if adjacency.len() != k * k {
            return Err(Error::invalid(format!("adjacency has {} entries, expected {}", adjacency.len(), k * k)));
        }
        let dead: Vec<usize> = (0..k).filter(|&a| !adjacency[a * k..(a + 1) * k].iter().any(|&x| x)).collect();
        if !dead.is_empty() {
            return Err(Error::invalid(format!("symbols {dead:?} have no admissible successor")));
        }
        Ok(Self { size: k, adjacency })
    }

    /// Golden-mean shift: the word `11` is forbidden.
    pub fn golden_mean() -> Self {
        Self::from_flat(2, vec![true, true, true, false]).expect("valid adjacency")
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn allows(&self, a: Symbol, b: Symbol) -> bool {
        self.adjacency[a as usize * self.size + b as usize]
    }

    pub fn adjacency(&self) -> &[bool] {
        &self.adjacency
    }

    pub fn is_full(&self) -> bool {
        self.adjacency.iter().all(|&x| x)
    }

    pub fn is_admissible(&self, letters: &[Symbol]) -> bool {
        letters.iter().all(|&s| (s as usize) < self.size) && letters.windows(2).all(|w| self.allows(w[0], w[1]))
    }

    /// Errors with the unreachable symbols when the transition graph is not
    /// strongly connected.
    pub fn check_irreducible(&self) -> Result<()> {
        let k = self.size;
        for from in 0..k {
            let mut seen = vec![false; k];
            let mut stack = vec![from];
            seen[from] = true;
            while let Some(a) = stack.pop() {
                for b in 0..k {
                    if self.adjacency[a * k + b] && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
            let unreachable: Vec<usize> = (0..k).filter(|&b| !seen[b]).collect();
            if !unreachable.is_empty() {
                return Err(Error::Reducible { from, unreachable });
            }
        }
        Ok(())
    }

    fn first_successor(&self, a: Symbol) -> Symbol {
        self.next_successor(a, 0).expect("no dead symbols")
    }

    fn next_successor(&self, a: Symbol, start: usize) -> Option<Symbol> {
        (start..self.size).find(|&b| self.allows(a, b as Symbol)).map(|b| b as Symbol)
    }
}

/// Finite admissible word `[α₀, …, α_{n-1}]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolWord(Vec<Symbol>);

impl SymbolWord {
    /// Validates the letters against the alphabet.
    pub fn new(letters: Vec<Symbol>, alphabet: &Alphabet) -> Result<Self> {
        if !alphabet.is_admissible(&letters) {
            return Err(Error::invalid(format!("word {letters:?} is not admissible")));
        }
        Ok(Self(letters))
    }

    /// Wraps letters without checking admissibility.
    pub fn from_letters(letters: Vec<Symbol>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &SymbolWord) -> SymbolWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SymbolWord(v)
    }

    /// Drops the first `k` letters.
    pub fn shifted(&self, k: usize) -> SymbolWord {
        SymbolWord(self.0[k.min(self.0.len())..].to_vec())
    }

    pub fn into_letters(self) -> Vec<Symbol> {
        self.0
    }
}

impl Borrow<[Symbol]> for SymbolWord {
    fn borrow(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for SymbolWord {
    fn from(v: Vec<Symbol>) -> Self {
        Self(v)
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_cap(k: usize, n: usize, cap: u64) -> Result<()> {
    let requested = (k as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if requested > cap as u128 {
        return Err(Error::CapExceeded { requested, cap });
    }
    Ok(())
}

/// Lexicographic stream over the admissible words of a fixed length.
///
/// [`WordStream::advance`] lends the current letters without allocating; the
/// `Iterator` impl clones them into owned words.
#[derive(Clone, Debug)]
pub struct WordStream<'a> {
    alphabet: &'a Alphabet,
    letters: Vec<Symbol>,
    started: bool,
    done: bool,
}

/// Streams every admissible word of length `n` exactly once, in lexicographic
/// order. Fails if `K^n` exceeds `cap`.
pub fn enumerate_words(alphabet: &Alphabet, n: usize, cap: u64) -> Result<WordStream<'_>> {
    check_cap(alphabet.size(), n, cap)?;
    Ok(WordStream { alphabet, letters: Vec::with_capacity(n), started: false, done: false }.init(n))
}

impl<'a> WordStream<'a> {
    fn init(mut self, n: usize) -> Self {
        if n > 0 {
            self.letters.push(0);
            self.fill_from(1, n);
        }
        self
    }

    fn fill_from(&mut self, start: usize, n: usize) {
        self.letters.truncate(start);
        while self.letters.len() < n {
            let last = *self.letters.last().expect("non-empty prefix");
            self.letters.push(self.alphabet.first_successor(last));
        }
    }

    /// Moves to the next word and returns it, or `None` when exhausted.
    pub fn advance(&mut self) -> Option<&[Symbol]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.letters);
        }
        let n = self.letters.len();
        for i in (0..n).rev() {
            let cur = self.letters[i] as usize;
            let next = if i == 0 {
                (cur + 1 < self.alphabet.size()).then_some((cur + 1) as Symbol)
            } else {
                self.alphabet.next_successor(self.letters[i - 1], cur + 1)
            };
            if let Some(s) = next {
                self.letters[i] = s;
                self.fill_from(i + 1, n);
                return Some(&self.letters);
            }
        }
        self.done = true;
        None
    }
}

impl Iterator for WordStream<'_> {
    type Item = SymbolWord;

    fn next(&mut self) -> Option<SymbolWord> {
        self.advance().map(|w| SymbolWord(w.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(alphabet: &Alphabet, n: usize) -> Vec<String> {
        enumerate_words(alphabet, n, DEFAULT_ENUMERATION_CAP).unwrap().map(|w| w.to_string().replace('.', "")).collect()
    }

    #[test]
    fn empty_length_yields_single_empty_word() {
        let all: Vec<_> = enumerate_words(&Alphabet::full(2).unwrap(), 0, 16).unwrap().collect();
        assert_eq!(all, vec![SymbolWord::empty()]);
    }

    #[test]
    fn full_shift_counts() {
        let a = Alphabet::full(2).unwrap();
        assert_eq!(words(&a, 3), ["000", "001", "010", "011", "100", "101", "110", "111"]);
        assert_eq!(enumerate_words(&Alphabet::full(3).unwrap(), 5, 1 << 20).unwrap().count(), 243);
    }

    #[test]
    fn golden_mean_words() {
        assert_eq!(words(&Alphabet::golden_mean(), 3), ["000", "001", "010", "100", "101"]);
    }

    #[test]
    fn fibonacci_counts_against_brute_force() {
        // oracle: filter all binary strings
        let a = Alphabet::golden_mean();
        for n in 1..12 {
            let brute = (0u32..1 << n)
                .filter(|m| (0..n - 1).all(|i| !((m >> i) & 1 == 1 && (m >> (i + 1)) & 1 == 1)))
                .count();
            assert_eq!(enumerate_words(&a, n, 1 << 20).unwrap().count(), brute);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_words(&Alphabet::full(2).unwrap(), 25, DEFAULT_ENUMERATION_CAP).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn dead_symbols_rejected() {
        assert!(Alphabet::new(&[vec![true, true], vec![false, false]]).is_err());
    }

    #[test]
    fn reducible_adjacency_names_unreachable_symbols() {
        let a = Alphabet::new(&[vec![true, true], vec![false, true]]).unwrap();
        match a.check_irreducible() {
            Err(Error::Reducible { from, unreachable }) => {
                assert_eq!(from, 1);
                assert_eq!(unreachable, vec![0]);
            }
            other => panic!("unexpected {other:?}"),
        }
        Alphabet::golden_mean().check_irreducible().unwrap();
    }

    #[test]
    fn word_admissibility() {
        let a = Alphabet::golden_mean();
        assert!(SymbolWord::new(vec![0, 1, 0], &a).is_ok());
        assert!(SymbolWord::new(vec![1, 1], &a).is_err());
        assert!(SymbolWord::new(vec![2], &a).is_err());
    }
}
