//! Growth functions, the iterated-integral coefficients `A_k^l`, `B_k^l` and
//! their quadrature oracles, Beta tails, and numerical certification of the
//! `M e^{5φ} k²/N²` envelope for the linear ODE hierarchy.

mod closed;
mod growth;
mod oracle;
pub mod quad;
mod solve;
mod tail;
mod transform;

pub use closed::{a_closed, b_closed, b_normalization, b_partial_sum, b_weighted_l2, ln_binomial, neg_binomial_series, recurrence_check, RecurrenceResiduals};
pub use growth::GrowthFunction;
pub use oracle::{iterated_quadrature, IntegralKind, MAX_ORACLE_DEPTH};
pub use solve::{
    certify_envelope, envelope_constant, solve_fixed_steps, solve_hierarchy, write_trajectory_csv, Coupling, EnvelopeCertificate,
    HierarchyProblem, HierarchySolution,
};
pub use tail::{beta_tail_bound, i0_index, write_lattice_csv, LatticeRow};
pub use transform::{recovery_holds, transform_zw, ZwTransform};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HierarchyError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("oracle depth {depth} exceeds the limit {limit}")]
    DepthLimit { depth: usize, limit: usize },
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("step refinement not monotone at level {level}: successive changes {diffs:?}")]
    Unstable { level: usize, diffs: Vec<f64> },
    #[error("step refinement did not reach {tol} after {levels} halvings (last change {last})")]
    NotConverged { tol: f64, levels: usize, last: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IteratedIntegralQuery {
    pub k: usize,
    pub l: usize,
    pub t: f64,
    pub growth: GrowthFunction,
}

impl IteratedIntegralQuery {
    pub fn new(k: usize, l: usize, t: f64, growth: GrowthFunction) -> Self {
        IteratedIntegralQuery { k, l, t, growth }
    }

    pub fn validate(&self) -> Result<(), HierarchyError> {
        if self.k < 1 || self.l < self.k {
            return Err(HierarchyError::InvalidQuery(format!("need 1 <= k <= l, got k={} l={}", self.k, self.l)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(HierarchyError::InvalidQuery(format!("t must be finite and >= 0, got {}", self.t)));
        }
        if !self.growth.is_valid() {
            return Err(HierarchyError::InvalidQuery(format!("bad growth function {:?}", self.growth)));
        }
        Ok(())
    }

    pub fn phi(&self) -> f64 {
        self.growth.phi(self.t)
    }
}
