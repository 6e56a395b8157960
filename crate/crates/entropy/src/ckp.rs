use crate::{fisher_information, relative_entropy, EntropyError, GriddedDensity};
use serde::{Deserialize, Serialize};
use vx_kernel::{biot_savart, KernelSpec, Vec2, V_SUP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeMargin {
    pub probe: Vec2,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCkp {
    pub rows: Vec<ProbeMargin>,
    /// `‖V‖∞ √I(m1|m2)`
    pub fisher_term: f64,
    /// `λ^{-1} √(1 + log ∫ e^{λ²‖V‖²|∇log m2|²} dm2) √(2H(m1|m2))`
    pub entropy_term: f64,
    /// `log ∫ e^{λ²‖V‖²|∇log m2|²} dm2`
    pub log_exp_moment: f64,
    /// exponential moment not integrable on the grid; rhs reported as `+∞`
    pub divergent: bool,
}

impl WeightedCkp {
    pub fn min_margin(&self) -> f64 {
        self.rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min)
    }
}

/// `|∫ K(p - y)(m1 - m2)(y) dy|` against the transport bound, for every probe
/// point `p`. Both densities live on the same two-dimensional grid.
pub fn weighted_ckp_check(m1: &GriddedDensity, m2: &GriddedDensity, lambda: f64, probes: &[Vec2]) -> Result<WeightedCkp, EntropyError> {
    m1.check_same(m2)?;
    let grid = &m1.grid;
    if grid.dim() != 2 {
        return Err(EntropyError::Invalid("weighted CKP check needs a planar grid".into()));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(EntropyError::Invalid(format!("lambda must be positive, got {lambda}")));
    }
    if m2.values.iter().any(|v| *v <= 0.0) {
        return Err(EntropyError::Invalid("m2 must be positive on the grid".into()));
    }
    let vol = grid.cell_volume();
    let h = relative_entropy(m1, m2, 1)?.value;
    let fisher = fisher_information(m1, m2)?.value;

    // ∇log m2 by central differences at interior nodes, summed in log space
    let (a1, a2) = (grid.axes[0], grid.axes[1]);
    let c = lambda * lambda * V_SUP * V_SUP;
    let lm: Vec<f64> = m2.values.iter().map(|v| v.ln()).collect();
    let mut exps = Vec::with_capacity(grid.len());
    let mut frame_max = f64::NEG_INFINITY;
    let cut1 = 0.9 * (a1.n - 1) as f64 * 0.5;
    let cut2 = 0.9 * (a2.n - 1) as f64 * 0.5;
    for i in 1..a1.n - 1 {
        for j in 1..a2.n - 1 {
            let idx = i * a2.n + j;
            let g1 = (lm[idx + a2.n] - lm[idx - a2.n]) / (2.0 * a1.h);
            let g2 = (lm[idx + 1] - lm[idx - 1]) / (2.0 * a2.h);
            let e = lm[idx] + c * (g1 * g1 + g2 * g2);
            exps.push(e);
            let d1 = (i as f64 - 0.5 * (a1.n - 1) as f64).abs();
            let d2 = (j as f64 - 0.5 * (a2.n - 1) as f64).abs();
            if d1 > cut1 || d2 > cut2 {
                frame_max = frame_max.max(e);
            }
        }
    }
    let top = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = exps.iter().map(|e| (e - top).exp()).sum();
    let log_exp_moment = top + (sum * vol).ln();
    // the integrand must have decayed by the outer frame
    let divergent = !log_exp_moment.is_finite() || frame_max - log_exp_moment > (1e-6 * vol).ln();

    let fisher_term = V_SUP * fisher.sqrt();
    let entropy_term = if divergent {
        f64::INFINITY
    } else {
        (1.0 + log_exp_moment).max(0.0).sqrt() * (2.0 * h).sqrt() / lambda
    };
    let rhs = fisher_term + entropy_term;

    let rows = probes
        .iter()
        .map(|&p| {
            let mut acc = Vec2::new(0.0, 0.0);
            for idx in 0..grid.len() {
                let d = m1.values[idx] - m2.values[idx];
                if d == 0.0 {
                    continue;
                }
                let (i, j) = (idx / a2.n, idx % a2.n);
                let y = Vec2::new(a1.node(i), a2.node(j));
                acc = acc + biot_savart(p - y, KernelSpec::EXACT) * d;
            }
            let lhs = (acc * vol).norm();
            ProbeMargin { probe: p, lhs, rhs, margin: rhs - lhs }
        })
        .collect();
    Ok(WeightedCkp { rows, fisher_term, entropy_term, log_exp_moment, divergent })
}
