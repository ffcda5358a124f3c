//! Matter-wave Talbot–Lau interference from closed-form path-integral wave
//! functions: single-path propagators, grating superpositions, coherence
//! averaging, fringe metrics and grid evaluation with export.

// `!(a > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence;
pub mod error;
pub mod fieldgrid;
pub mod physics;
pub mod presets;
pub mod propagators;
pub mod scenario;
pub mod superposition;

pub use coherence::{CoherenceKernel, FringeMetrics, ResonancePoint};
pub use error::{Error, Result};
pub use fieldgrid::{DensityField, GridSpec, Profile};
pub use num_complex::Complex64;
pub use physics::{
    Coherence, FlightTimes, Geometry, GratingSpec, Particle, SourceKind, SourceSpec, Spectrum, SpreadingParams, ZPlane,
};
pub use propagators::{ComplexAmplitude, DTerm, PathContext, SourcePoint};
pub use scenario::{RegionSelector, Scenario};
pub use superposition::{FieldRequest, PropagatorKind, Region};
