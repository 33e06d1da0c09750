//! Pairwise-visibility tests of coherence and preparation contextuality in
//! n-path interferometers whose paths are tagged by qubit which-path detectors.
//!
//! The crate is organised bottom-up:
//!
//! - [`bloch`]: pure qubit states as Bloch vectors, overlaps, density matrices.
//! - [`interferometer`]: path amplitudes + detector states, reduced detector
//!   state, two-path visibilities and Hilbert–Schmidt coherence.
//! - [`inequalities`]: three-path facets, the visibility inequality with
//!   arbitrary amplitudes, the n-cycle expression and its closed-form bounds.
//! - [`gram`]: Gram-determinant feasibility of overlap triples.
//! - [`optimizer`]: multi-start ascent of the n-cycle value over qubit
//!   configurations, the coplanar reduction `H(φ)` and canonical forms.
//! - [`robustness`]: uniform visibility reduction and violation thresholds.
//! - [`fringe_lab`]: synthetic fringes with counting noise, sinusoid fits and
//!   the simulated end-to-end experiment.
//! - [`presets`]: named detector configurations used throughout.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod error;
pub mod fringe_lab;
pub mod gram;
pub mod inequalities;
pub mod interferometer;
pub mod optimizer;
pub mod presets;
pub mod robustness;

pub use bloch::{DensityMatrix2, OverlapMatrix, PureQubit};
pub use error::{Error, Result};
pub use inequalities::CycleReport;
pub use interferometer::{InterferometerSpec, VisibilityMatrix};
