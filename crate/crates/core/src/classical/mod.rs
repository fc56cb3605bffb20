//! Hyperbolic toral automorphisms, their codings by partitions, damping
//! profiles and the pressure of the undamped set.
//!
//! The discrete-time map stands in for the time-one map of an Anosov flow.

mod coding;
mod damping;
mod map;
mod orbits;
mod partition;

pub use coding::{
    cylinder_areas, edge_shift_coding, realized_transitions, undamped_pressure, weight_table_from_map, EdgeShift,
    UndampedPressure,
};
pub use damping::{DampingProfile, GRID_MAGIC, ZERO_THRESHOLD};
pub use map::{lyapunov_exponent, Shear, TorusMap, ANOSOV_SHEAR_LIMIT, UNSTABLE_RELAXATION_STEPS};
pub use orbits::TorusSampler;
pub use partition::{itinerary, Rect, TorusPartition, BOUNDARY_TOLERANCE};
