use crate::{tree::QuadTree, ForceMethod, ParticleEnsemble, SimConfig};
use rayon::prelude::*;
use vx_kernel::{biot_savart, KernelSpec, Vec2};

/// `b_i = (1/N) Σ_{j≠i} M_j K(X_i - X_j)`.
pub fn drift_velocities(ens: &ParticleEnsemble, cfg: &SimConfig) -> Vec<Vec2> {
    drift_of(&ens.positions, ens.circulations(), cfg.kernel, cfg.force)
}

pub(crate) fn drift_of(x: &[Vec2], m: &[f64], kernel: KernelSpec, method: ForceMethod) -> Vec<Vec2> {
    let n = x.len();
    let inv_n = 1.0 / n as f64;
    match method {
        ForceMethod::Free => vec![Vec2::ZERO; n],
        ForceMethod::Direct => (0..n)
            .into_par_iter()
            .with_min_len(64)
            .map(|i| direct_one(i, x, m, kernel) * inv_n)
            .collect(),
        ForceMethod::Tree { theta, order } => {
            let tree = QuadTree::build(x, m, order);
            x.par_iter().with_min_len(64).map(|&z| tree.velocity(z, theta, kernel) * inv_n).collect()
        }
    }
}

#[inline]
fn direct_one(i: usize, x: &[Vec2], m: &[f64], kernel: KernelSpec) -> Vec2 {
    let xi = x[i];
    let mut acc = Vec2::ZERO;
    for (j, (&xj, &mj)) in x.iter().zip(m).enumerate() {
        if j != i {
            acc += biot_savart(xi - xj, kernel) * mj;
        }
    }
    acc
}
