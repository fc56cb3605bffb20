use std::collections::BTreeSet;

use super::words::{Symbol, SymbolWord};
use crate::{Error, Result};

/// Set of words sharing one length `n₀` (a subset of `Σ_{n₀}`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CylinderFamily {
    word_length: usize,
    members: BTreeSet<SymbolWord>,
}

impl CylinderFamily {
    pub fn new(word_length: usize) -> Self {
        Self { word_length, members: BTreeSet::new() }
    }

    pub fn from_words(word_length: usize, words: impl IntoIterator<Item = SymbolWord>) -> Result<Self> {
        let mut f = Self::new(word_length);
        for w in words {
            f.insert(w)?;
        }
        Ok(f)
    }

    /// Inserts a member; returns `false` if it was already present.
    pub fn insert(&mut self, word: SymbolWord) -> Result<bool> {
        if word.len() != self.word_length {
            return Err(Error::invalid(format!(
                "word {word} has length {}, family length is {}",
                word.len(),
                self.word_length
            )));
        }
        Ok(self.members.insert(word))
    }

    pub fn word_length(&self) -> usize {
        self.word_length
    }

    pub fn contains(&self, letters: &[Symbol]) -> bool {
        self.members.contains(letters)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &SymbolWord> {
        self.members.iter()
    }

    pub fn is_subset(&self, other: &CylinderFamily) -> bool {
        self.word_length == other.word_length && self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &CylinderFamily) -> Result<CylinderFamily> {
        if self.word_length != other.word_length {
            return Err(Error::invalid("families of different word lengths"));
        }
        Ok(Self { word_length: self.word_length, members: self.members.union(&other.members).cloned().collect() })
    }

    pub fn is_disjoint(&self, other: &CylinderFamily) -> bool {
        self.members.is_disjoint(&other.members)
    }
}
