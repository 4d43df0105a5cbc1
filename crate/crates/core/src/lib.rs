//! Fixed-time frequency estimation of biased sinusoids.
//!
//! The estimator chains three pieces: a hybrid sliding-mode differentiator
//! ([`differentiator`]) that recovers `y'` and `y'''` from the measurement,
//! sliding-window integrals of their magnitudes ([`window`]), and a
//! two-branch adaptive law ([`estimator`]) that identifies `w^2` from the
//! relation `w^2 * int|y'| = int|y'''|`. A finite-time Volterra-kernel
//! estimator ([`baseline`]) is included for comparison, and [`sim`] runs
//! both on simulated measurements.

// `!(x > 0.0)` style checks are deliberate: NaN has to fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod differentiator;
pub mod error;
pub mod estimator;
pub mod integrate;
pub mod presets;
pub mod signal;
pub mod sim;
pub mod window;

pub use baseline::{BaselineConfig, BaselineState};
pub use differentiator::{spow, DifferentiatorConfig, DifferentiatorState};
pub use error::{Error, Result};
pub use estimator::{Branch, EstimatorConfig, EstimatorState};
pub use integrate::Scheme;
pub use signal::{DerivativeBound, NoiseKind, NoiseSource, NoiseSpec, SignalSpec};
pub use sim::{
    run, settling_time, sweep, EstimatorKind, RunSummary, Scenario, ScenarioResult, SimConfig,
    SweepAxis, SweepRow,
};
pub use window::{pe_lower_bound, Quadrature, WindowIntegral};
