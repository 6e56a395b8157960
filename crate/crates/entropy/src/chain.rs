use crate::{EntropyError, GriddedDensity};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRule {
    /// `∫ H(K¹_x | K²_x) m¹(dx)`
    pub lhs: f64,
    /// `H(m¹ | m²)`
    pub marginal: f64,
    /// `H(m¹|m²) + ∫ H(K¹_x|K²_x) m¹(dx)`
    pub mid: f64,
    /// `H(m¹K¹ | m²K²)`
    pub rhs: f64,
    pub support_violation: bool,
}

struct Kahan(f64, f64);

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.1;
        let t = self.0 + y;
        self.1 = (t - self.0) - y;
        self.0 = t;
    }
}

fn xlogy(a: f64, b: f64) -> Option<f64> {
    if a <= 0.0 {
        Some(0.0)
    } else if b <= 0.0 {
        None
    } else {
        Some(a * (a / b).ln())
    }
}

/// Disintegrates two joints on a two-axis grid along the first axis and
/// evaluates all three members of the chain rule.
pub fn chain_rule_check(joint1: &GriddedDensity, joint2: &GriddedDensity) -> Result<ChainRule, EntropyError> {
    joint1.check_same(joint2)?;
    let g = &joint1.grid;
    if g.dim() != 2 {
        return Err(EntropyError::Invalid("chain rule check needs a two-axis product grid".into()));
    }
    let (ax, ay) = (g.axes[0], g.axes[1]);
    let (nx, ny) = (ax.n, ay.n);
    let marg = |j: &GriddedDensity| -> Vec<f64> { (0..nx).map(|i| j.values[i * ny..(i + 1) * ny].iter().sum::<f64>() * ay.h).collect() };
    let (m1, m2) = (marg(joint1), marg(joint2));
    let mut bad = false;

    let mut marginal = Kahan(0.0, 0.0);
    let mut cond = Kahan(0.0, 0.0);
    let mut joint = Kahan(0.0, 0.0);
    for i in 0..nx {
        match xlogy(m1[i], m2[i]) {
            Some(v) => marginal.add(v * ax.h),
            None => bad = true,
        }
        if m1[i] <= 0.0 {
            continue;
        }
        let mut inner = Kahan(0.0, 0.0);
        for j in 0..ny {
            let (p, q) = (joint1.values[i * ny + j], joint2.values[i * ny + j]);
            match xlogy(p, q) {
                Some(v) => joint.add(v * ax.h * ay.h),
                None => bad = true,
            }
            if m2[i] > 0.0 {
                if let Some(v) = xlogy(p / m1[i], q / m2[i]) {
                    inner.add(v * ay.h);
                }
            }
        }
        cond.add(m1[i] * ax.h * inner.0);
    }
    if bad {
        let inf = f64::INFINITY;
        return Ok(ChainRule { lhs: inf, marginal: inf, mid: inf, rhs: inf, support_violation: true });
    }
    Ok(ChainRule { lhs: cond.0, marginal: marginal.0, mid: marginal.0 + cond.0, rhs: joint.0, support_violation: false })
}
