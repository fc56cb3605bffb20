//! Symbolic dynamics over a finite partition alphabet.

mod counting;
mod family;
mod io;
mod weights;
mod windows;
mod words;

pub use counting::{counting_bound, log_binomial, CountingBound};
pub use family::CylinderFamily;
pub use io::{read_family, write_family};
pub use weights::{pressure_sum, word_weight, WeightTable, DEFAULT_FLOOR_LOG};
pub use windows::{
    sigma_p_tau, sigma_p_tau_weight_sum, stopping_decomposition, window_hits,
    StoppingDecomposition,
};
pub use words::{enumerate_words, Alphabet, Symbol, SymbolWord, WordStream, DEFAULT_ENUMERATION_CAP};
