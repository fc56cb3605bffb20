//! Numerical laboratory for thermodynamic formalism on subshifts of finite type
//! and for damped quantizations of hyperbolic toral automorphisms.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbolic`]: words over a partition alphabet, discrete unstable Jacobian
//!   weights, the window families `Σ_p(W, τ)`, stopping-time decompositions and
//!   the counting bound for low-pressure families.
//! - [`thermo`]: topological pressure by transfer matrix, brute-force word sums
//!   and separated sets; Parry/Gibbs measures, Markov entropy, the
//!   Shannon–McMillan–Breiman estimator and the Ruelle inequality.
//! - [`classical`]: the hyperbolic toral automorphism (optionally perturbed by
//!   a shear), partitions, itineraries, Lyapunov exponents, damping profiles
//!   and the pressure of the undamped set.
//! - [`quantum`]: the metaplectic quantization, damped propagators, dense
//!   non-Hermitian spectra, cylinder operators and the quantum functional,
//!   together with the numerical checks built on them.
//!
//! The discrete model works with the time-one map of the dynamics; entropy and
//! pressure of the flow are recovered from the map by Abramov's formula, so no
//! continuous-time integration appears anywhere.
//!
//! Classical and symbolic code is generic over the scalar through [`Real`];
//! the aliases below fix the usual `f64` instantiation. The quantum module is
//! `f64`/`c64` only since it sits on top of a dense complex eigensolver.

pub mod classical;
pub mod error;
pub mod quantum;
pub mod report;
pub mod scalar;
pub mod symbolic;
pub mod thermo;

pub use error::{Error, Result};
pub use scalar::Real;

pub use faer::c64;

/// Discrete unstable Jacobian table in double precision.
pub type WeightTableF64 = symbolic::WeightTable<f64>;
/// Discrete unstable Jacobian table in single precision.
pub type WeightTableF32 = symbolic::WeightTable<f32>;
/// Pair potential in double precision.
pub type PotentialF64 = thermo::Potential<f64>;
/// Pair potential in single precision.
pub type PotentialF32 = thermo::Potential<f32>;
/// Markov measure in double precision.
pub type MarkovMeasureF64 = thermo::MarkovMeasure<f64>;
/// Markov measure in single precision.
pub type MarkovMeasureF32 = thermo::MarkovMeasure<f32>;
/// Toral map in double precision.
pub type TorusMapF64 = classical::TorusMap<f64>;
/// Torus partition in double precision.
pub type TorusPartitionF64 = classical::TorusPartition<f64>;
/// Damping profile in double precision.
pub type DampingProfileF64 = classical::DampingProfile<f64>;

/// Crate version embedded in every emitted artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
