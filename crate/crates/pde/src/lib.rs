//! Vorticity equation `∂_t ω + (K∗ω)·∇ω = σΔω` on a periodic box `[-L, L)²`
//! standing in for the plane, plus the family of conditional densities
//! transported by the same velocity.
//!
//! Time stepping is RK4 with an exact integrating factor for `σΔ` and a
//! 2/3-truncated advection product.

mod conditional;
mod exact;
mod grid;
mod io;
mod lattice;
mod solver;
mod spectral;

pub use conditional::{reconstruct_vorticity, ConditionalDensitySet};
pub use exact::{gaussian_field, lamb_oseen, lamb_oseen_velocity};
pub use grid::{GridSpec, VorticityField};
pub use io::{read_field_dump, write_field_csv, write_field_dump, FieldIoError};
pub use lattice::{eisenstein_g, FreeSpaceCorrection, LATTICE_TERMS};
pub use solver::{PdeSolver, VelocityMode, CFL_MAX};
pub use spectral::Spectral;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PdeError {
    #[error("dt = {dt} violates the CFL bound (Courant number {courant:.3} > {CFL_MAX}); try dt ≤ {suggested:.3e}")]
    Cfl { dt: f64, courant: f64, suggested: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("{fraction:.3e} of |field| mass sits in the outer 10% annulus at t = {t}; enlarge the box")]
    Truncation { fraction: f64, t: f64 },
    #[error("non-finite field value at t = {0}")]
    NonFinite(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
}
