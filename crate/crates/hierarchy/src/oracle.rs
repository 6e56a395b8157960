use crate::quad::integrate;
use crate::{GrowthFunction, HierarchyError, IteratedIntegralQuery};

pub const MAX_ORACLE_DEPTH: usize = 4;
const INNER_REL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegralKind {
    A,
    B,
}

struct Nest {
    g: GrowthFunction,
    l: usize,
    kind: IntegralKind,
}

impl Nest {
    /// Innermost layer: `e^{-lφ}` for B, `1` for A (one level deeper).
    fn top(&self) -> usize {
        match self.kind {
            IntegralKind::A => self.l + 1,
            IntegralKind::B => self.l,
        }
    }

    /// `F_j(τ) = ∫_0^τ e^{-j(φ(τ)-φ(s))} f(s) F_{j+1}(s) ds`
    fn layer(&self, j: usize, tau: f64) -> f64 {
        if j == self.top() {
            return match self.kind {
                IntegralKind::A => 1.0,
                IntegralKind::B => (-(j as f64) * self.g.phi(tau)).exp(),
            };
        }
        let pt = self.g.phi(tau);
        let jf = j as f64;
        let r = integrate(
            |s| (-jf * (pt - self.g.phi(s))).exp() * self.g.h(s) * self.layer(j + 1, s),
            0.0,
            tau,
            1e-300,
            INNER_REL,
        );
        r.value
    }
}

/// The coefficient evaluated directly from its nested-integral definition.
/// Cost grows like (evaluations per level)^depth, so depth is capped.
pub fn iterated_quadrature(q: &IteratedIntegralQuery, kind: IntegralKind) -> Result<f64, HierarchyError> {
    q.validate()?;
    let depth = q.l - q.k + usize::from(kind == IntegralKind::A);
    if q.l - q.k > MAX_ORACLE_DEPTH {
        return Err(HierarchyError::DepthLimit { depth, limit: MAX_ORACLE_DEPTH });
    }
    let nest = Nest { g: q.growth, l: q.l, kind };
    let last = match kind {
        IntegralKind::A => q.l,
        IntegralKind::B => q.l - 1,
    };
    let prefactor: f64 = (q.k..=last).map(|j| j as f64).product();
    Ok(prefactor * nest.layer(q.k, q.t))
}
