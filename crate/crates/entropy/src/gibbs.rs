use crate::{relative_entropy, EntropyError, GriddedDensity};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GibbsCheck {
    pub eta: f64,
    /// `∫ Φ ρ_N`
    pub lhs: f64,
    /// `H_N(ρ_N | ρ̄^{⊗N}) / η + log ∫ e^{NηΦ} ρ̄^{⊗N} / (ηN)`
    pub rhs: f64,
    pub entropy_term: f64,
    pub exp_term: f64,
    /// a term was infinite or not representable
    pub flagged: bool,
}

fn tensor_power(rho: &GriddedDensity, n: usize) -> GriddedDensity {
    let mut t = rho.clone();
    for _ in 1..n {
        t = t.tensor(rho);
    }
    t
}

/// Both sides of the change-of-measure inequality for an `n`-particle density
/// on the product grid (`n` small). The exponential moment is taken under the
/// tensorized reference `ρ̄^{⊗N}`.
pub fn gibbs_bound_check(phi: &[f64], rho_n: &GriddedDensity, rho_bar: &GriddedDensity, n: usize, eta: f64) -> Result<GibbsCheck, EntropyError> {
    if n == 0 || !(eta > 0.0 && eta.is_finite()) {
        return Err(EntropyError::Invalid(format!("need n >= 1 and eta > 0, got n={n} eta={eta}")));
    }
    let reference = tensor_power(rho_bar, n);
    rho_n.check_same(&reference)?;
    if phi.len() != rho_n.values.len() {
        return Err(EntropyError::GridMismatch(format!("{} test-function values for {} nodes", phi.len(), rho_n.values.len())));
    }
    let vol = rho_n.grid.cell_volume();
    let lhs = phi.iter().zip(&rho_n.values).map(|(f, r)| f * r).sum::<f64>() * vol;
    let h = relative_entropy(rho_n, &reference, n)?.value;
    let nf = n as f64;
    let top = phi
        .iter()
        .zip(&reference.values)
        .filter(|(_, r)| **r > 0.0)
        .map(|(f, _)| nf * eta * f)
        .fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = phi.iter().zip(&reference.values).map(|(f, r)| r * (nf * eta * f - top).exp()).sum();
    let log_exp = top + (s * vol).ln();
    let entropy_term = h / eta;
    let exp_term = log_exp / (eta * nf);
    let rhs = entropy_term + exp_term;
    Ok(GibbsCheck { eta, lhs, rhs, entropy_term, exp_term, flagged: !rhs.is_finite() })
}

/// Smallest right-hand side over `etas`.
pub fn gibbs_eta_sweep(phi: &[f64], rho_n: &GriddedDensity, rho_bar: &GriddedDensity, n: usize, etas: &[f64]) -> Result<GibbsCheck, EntropyError> {
    let mut best: Option<GibbsCheck> = None;
    for &eta in etas {
        let c = gibbs_bound_check(phi, rho_n, rho_bar, n, eta)?;
        if best.is_none_or(|b| c.rhs < b.rhs) {
            best = Some(c);
        }
    }
    best.ok_or_else(|| EntropyError::Invalid("empty eta sweep".into()))
}
