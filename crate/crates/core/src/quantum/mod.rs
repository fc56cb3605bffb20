//! Quantized toral automorphisms with position damping.
//!
//! The Hilbert space is `ℂ^N` with position basis `q_j = j/N`, so
//! `ħ = 1/(2πN)`. A quantum map has no energy parameter: the energy window
//! of a flow collapses, and the decay rate `γ = −log|λ|` of an eigenvalue
//! `λ` of `M = D U` plays the part of `−Im z/ħ`.
//!
//! Everything here is `f64`/[`c64`](faer::c64); the dense eigensolver is
//! faer's.

mod checks;
mod cylinder;
mod linalg;
mod propagator;
mod quantize;
mod scans;

pub use checks::{
    dispersive_norm_check, interleaved_norm, orthogonality_defect, subinvariance_check, DispersiveReport,
    OrthogonalityReport, SubinvarianceReport, DISPERSIVE_KAPPA,
};
pub use cylinder::{
    cylinder_apply, cylinder_operator, family_functionals, family_mass, interleaved_apply, quantum_functional,
    PartitionOperators, TimeConvention,
};
pub use propagator::{
    damped_propagator, orthonormalize_clusters, spectrum, spectrum_with_cap, DampedPropagator, EigenmodeRecord,
    EigenmodeSummary, DENSE_SOLVER_CAP, RESIDUAL_TOL,
};
pub use quantize::{
    egorov_check, egorov_label, is_admissible, quantize, translation, translation_matrix, unitarity_defect, EgorovEntry,
    EgorovReport, UNITARITY_TOL,
};
pub use scans::{
    cylinder_traces, damped_spectrum, gap_scan, mass_scan, mode_average, read_matrix, slow_modes,
    write_matrix, GapRow, MassRow, MassScanFamilies, MatrixKind, MATRIX_MAGIC,
};
