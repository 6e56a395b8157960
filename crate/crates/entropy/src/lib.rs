//! Distances between gridded densities (total variation, relative entropy,
//! relative Fisher information), checks of the entropy inequalities on
//! computable instances, exponential-moment probes, and convergence studies
//! of particle ensembles against the mean-field limit.

mod chain;
mod ckp;
mod density;
mod divergence;
mod gibbs;
mod kde;
mod probe;
mod study;

pub use chain::{chain_rule_check, ChainRule};
pub use ckp::{weighted_ckp_check, ProbeMargin, WeightedCkp};
pub use density::{Axis, Grid, GriddedDensity, NORMALIZATION_TOL};
pub use divergence::{fisher_information, relative_entropy, total_variation, FisherInformation, RelativeEntropy};
pub use gibbs::{gibbs_bound_check, gibbs_eta_sweep, GibbsCheck};
pub use kde::{kde_density, kde_weighted, silverman_bandwidth};
pub use probe::{
    cancellation_residual, exp_moment_probe, exp_moment_probe_unchecked, gamma_estimate, CancellationMode,
    ConcentrationProbe, ProbeReport, ProbeRow, TestFunction, CANCELLATION_TOL, C_JW, Z,
};
pub use study::{
    convergence_study, dipole_conditionals, fit_slope, limit_solution, product_conditionals, reports_json,
    write_reports_csv, EntropyReport, LimitSolution, StudyConfig, StudyResult,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("no samples")]
    EmptySamples,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cancellation residual {residual:e} exceeds {tol:e}")]
    CancellationFailed { residual: f64, tol: f64 },
    #[error("{have} replicas insufficient, about {need} required")]
    InsufficientReplicas { have: usize, need: usize },
    #[error("particle simulation failed: {0}")]
    Sim(String),
    #[error("limit solver failed: {0}")]
    Pde(String),
}
