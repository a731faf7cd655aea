//! Entanglement harvesting with derivative-coupled Unruh–DeWitt detectors
//! in (1+1)-dimensional Schwarzschild and Minkowski spacetimes.
//!
//! Units: every time and length is measured in units of the switching
//! width σ.

pub mod correlator;
pub mod detector_pair;
pub mod error;
pub mod geometry;
pub mod quadrature;
pub mod scenario;
pub mod worldline;

pub use correlator::{commutator_kernel, two_point, CorrelatorContext, VacuumKind};
pub use detector_pair::{
    assemble_density_matrix, concurrence, local_term, mutual_information, nonlocal_term, pair_matrix,
    signalling_estimator, DetectorParams, OrderingTime, PairMatrix,
};
pub use error::{Error, Result};
pub use geometry::{proper_distance, BlackHoleParams};
pub use quadrature::{
    certified_integral, integrate_2d, smooth_step, Certified, Interval, LadderReport, QuadratureSpec,
    Regulator,
};
pub use scenario::{evaluate, sweep, Placement, ResultRow, ScenarioConfig, ScenarioKind, SweepAxis};
pub use worldline::Worldline;
