//! Simulation and verification engine for learning a unitary through a
//! projective measurement when the training inputs are entangled with a
//! reference system.
//!
//! The crate is organised bottom-up:
//!
//! * [`complex`]: dense complex matrices and pure states.
//! * [`rng`], [`stats`], [`par`]: seeded streams, estimators, and the
//!   data-parallel helpers (rayon behind the `parallel` feature).
//! * [`haar`]: Haar sampling and closed-form second moments.
//! * [`dataset`]: entangled and diagonal training-state samplers.
//! * [`learner`]: shot-noise measurement, the argmin learner and the risk.
//! * [`theory`]: lower-bound evaluators, shot-variance and mean-gap
//!   formulas, packing construction and projector concentration.
//! * [`harness`]: sweep configuration, CSV persistence, aggregation, the
//!   verification suites and the `qnfl` command line.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod complex;
pub mod dataset;
pub mod error;
pub mod haar;
pub mod harness;
pub mod learner;
pub mod par;
pub mod rng;
pub mod stats;
pub mod theory;

pub use complex::{CMatrix, PureState, C64};
pub use error::{Error, Result};
pub use learner::{Shots, TrialConfig, TrialRecord};
pub use rng::SimRng;
pub use stats::Estimate;
