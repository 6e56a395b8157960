use serde::{Deserialize, Serialize};

/// Time-decay coefficient `h(t)` and its antiderivative `φ(t) = ∫_0^t h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunction {
    /// `h = C(1 + log(1+t))/(1+t)`
    PaperLog { c: f64 },
    /// `h = γ`
    Constant { gamma: f64 },
}

impl GrowthFunction {
    pub fn h(&self, t: f64) -> f64 {
        match *self {
            GrowthFunction::PaperLog { c } => c * (1.0 + t.ln_1p()) / (1.0 + t),
            GrowthFunction::Constant { gamma } => gamma,
        }
    }

    pub fn phi(&self, t: f64) -> f64 {
        match *self {
            GrowthFunction::PaperLog { c } => {
                let s = t.ln_1p();
                c * (s + 0.5 * s * s)
            }
            GrowthFunction::Constant { gamma } => gamma * t,
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            GrowthFunction::PaperLog { c } => c > 0.0 && c.is_finite(),
            GrowthFunction::Constant { gamma } => gamma >= 0.0 && gamma.is_finite(),
        }
    }
}
