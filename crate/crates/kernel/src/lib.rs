//! Biot-Savart kernel family for the 2D vortex system.
//!
//! The exact kernel is `K(x) = (1/2π)(-x2, x1)/|x|²` with the convention
//! `K(0) = 0`; the blob kernel multiplies it by `|x|²/(|x|²+δ²)`.

mod law;
mod rescale;
pub mod rng;
mod vec2;

pub use law::{gauss_legendre, CirculationLaw, LawError};
pub use rescale::{rescale_to_unit, unscale_positions, RescaleError, Rescaled};
pub use vec2::Vec2;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const INV_2PI: f64 = 0.5 / PI;

/// Sup norm of the antiderivative `V`.
pub const V_SUP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct KernelSpec {
    /// mollification length, 0 for the exact kernel
    pub delta: f64,
}

impl KernelSpec {
    pub const EXACT: KernelSpec = KernelSpec { delta: 0.0 };

    pub fn blob(delta: f64) -> Self {
        assert!(delta >= 0.0, "kernel delta must be non-negative");
        KernelSpec { delta }
    }
}

/// Velocity induced at `x` by a unit vortex at the origin.
#[inline(always)]
pub fn biot_savart(x: Vec2, spec: KernelSpec) -> Vec2 {
    let r2 = x.x1 * x.x1 + x.x2 * x.x2;
    let d2 = spec.delta * spec.delta;
    let denom = r2 + d2;
    if denom == 0.0 {
        return Vec2::ZERO;
    }
    let s = INV_2PI / denom;
    Vec2::new(-x.x2 * s, x.x1 * s)
}

/// Scalar factor of `V(x) = -(1/2π) arctan(x1/x2) Id`.
///
/// On the axis `x2 = 0` the limit from `x2 -> 0+` is returned, i.e.
/// `-sign(x1)/4` (and 0 at the origin).
#[inline]
pub fn v_matrix(x: Vec2) -> f64 {
    if x.x2 == 0.0 {
        if x.x1 == 0.0 {
            return 0.0;
        }
        return -x.x1.signum() * V_SUP;
    }
    -INV_2PI * (x.x1 / x.x2).atan()
}

/// `∇·(v Id) = ∇v` by central differences with step `h`.
pub fn v_divergence_fd(x: Vec2, h: f64) -> Vec2 {
    let d1 = (v_matrix(Vec2::new(x.x1 + h, x.x2)) - v_matrix(Vec2::new(x.x1 - h, x.x2))) / (2.0 * h);
    let d2 = (v_matrix(Vec2::new(x.x1, x.x2 + h)) - v_matrix(Vec2::new(x.x1, x.x2 - h))) / (2.0 * h);
    Vec2::new(d1, d2)
}

/// Draws `n` i.i.d. circulations; deterministic in `seed`.
pub fn sample_circulations(law: &CirculationLaw, n: usize, seed: u64) -> Vec<f64> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| law.sample(&mut rng)).collect()
}
