//! Numerical checks of pointwise envelopes, norm decay rates and log-derivative
//! growth on snapshots of the vorticity/density solver.
//!
//! Every check is a pure function of the snapshots it is given.

mod decay;
mod envelope;
mod loggrowth;
mod report;
mod snapshots;

pub use decay::{kato_decay_check, lp_decay_check, SLOPE_TOL};
pub use envelope::{gauss_lower_check, gauss_upper_check, C_MAX, C_MIN};
pub use loggrowth::{aux_sign_check, log_growth_check, AuxConstants, LogGrowth};
pub use report::{fit_slope, write_reports_csv, EnvelopeReport, EstimateKind};
pub use snapshots::{admissible_floor, snapshots, FLOOR};

use thiserror::Error;
use vx_pde::PdeError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegularityError {
    #[error("no snapshots supplied")]
    Empty,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{kind:?} envelope fails for every C ≤ {c_max:e} (best worst-case ratio {ratio:.4e})")]
    EnvelopeViolation { kind: EstimateKind, c_max: f64, ratio: f64 },
    #[error("time range too short: t_max/t_min = {ratio:.3} < 10")]
    InsufficientRange { ratio: f64 },
    #[error("admissible region empty at t = {0}")]
    EmptyRegion(f64),
    #[error("initial-data test fails at x = ({x1}, {x2}): {value:.6e} > {bound:.6e}")]
    Precondition { x1: f64, x2: f64, value: f64, bound: f64 },
    #[error(transparent)]
    Pde(#[from] PdeError),
}
