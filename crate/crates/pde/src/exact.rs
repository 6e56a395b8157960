use crate::{GridSpec, VorticityField};
use std::f64::consts::PI;

/// Lamb-Oseen vortex `Γ/(4πσ(t+t0)) exp(-|x|²/(4σ(t+t0)))` at time `t`.
pub fn lamb_oseen(grid: GridSpec, gamma: f64, t0: f64, sigma: f64, t: f64) -> VorticityField {
    let s = sigma * (t + t0);
    assert!(s > 0.0, "lamb_oseen needs σ(t + t0) > 0");
    let amp = gamma / (4.0 * PI * s);
    VorticityField::from_fn(grid, t, |a, b| amp * (-(a * a + b * b) / (4.0 * s)).exp())
}

/// Azimuthal speed of the Lamb-Oseen vortex at radius `r`.
pub fn lamb_oseen_velocity(gamma: f64, t0: f64, sigma: f64, t: f64, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let s = sigma * (t + t0);
    gamma / (2.0 * PI * r) * (-(-r * r / (4.0 * s)).exp_m1())
}

/// Isotropic Gaussian density with mean `(m1, m2)` and per-axis variance `v`.
pub fn gaussian_field(grid: GridSpec, mass: f64, m1: f64, m2: f64, v: f64, t: f64) -> VorticityField {
    let amp = mass / (2.0 * PI * v);
    VorticityField::from_fn(grid, t, |a, b| amp * (-((a - m1).powi(2) + (b - m2).powi(2)) / (2.0 * v)).exp())
}
