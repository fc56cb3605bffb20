//! Topological pressure, Markov measures and entropy.
//!
//! Pressure is available by three independent routes: the log spectral radius
//! of the Ruelle transfer matrix, `(1/n) log` of brute-force word sums, and
//! maximal `(ε, T)`-separated sets built from sampled orbits. The variational
//! principle is realized by the Parry/Gibbs construction.

mod entropy;
mod markov;
mod potential;
mod sampling;
mod separated;
mod transfer;

pub use entropy::{markov_entropy, markov_integral, ruelle_check, smb_entropy_estimate, RuelleReport};
pub use markov::MarkovMeasure;
pub use potential::Potential;
pub use sampling::{perturb_measure, random_markov_measure};
pub use separated::{separated_set, separated_set_growth, separated_set_pressure, OrbitSampler, SeparatedGrowth, SeparatedSet, ShiftSampler};
pub use transfer::{
    brute_force_pressure, parry_measure, perron, transfer_matrix, transfer_pressure, PerronData,
    POWER_ITERATION_MAX, POWER_ITERATION_TOL,
};
