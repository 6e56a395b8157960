//! Stochastic point-vortex system
//!
//! `dX_i = (1/N) Σ_j M_j K(X_i - X_j) dt + √(2σ) dB_i`
//!
//! stepped with Euler-Maruyama. Noise for particle `i` at step `s` is read
//! from ChaCha8 stream `i` at word offset `4s`, so the noise does not depend
//! on the force method, the thread count or the particle ordering in memory.

mod checkpoint;
mod diagnostics;
mod ensemble;
mod force;
mod init;
mod step;
pub mod tree;

pub use checkpoint::{checkpoint, restore, CheckpointError, CHECKPOINT_VERSION};
pub use diagnostics::{conserved_diagnostics, ConservedDiagnostics};
pub use ensemble::{ForceMethod, ParticleEnsemble, SimConfig};
pub use force::drift_velocities;
pub use init::{InitialSampler, ProductGaussian, SignedDipole};
pub use step::{
    em_step, particle_noise, run_ensemble, simulate, simulate_steps, write_snapshot_csv, Trajectory,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("non-finite position for particle {index} at step {step} (t = {t})")]
    Blowup { index: usize, step: u64, t: f64 },
    #[error("invalid simulation input: {0}")]
    Invalid(String),
}
