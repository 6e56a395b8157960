use crate::{PdeError, PdeSolver, VorticityField};
use rayon::prelude::*;

/// Conditional densities `f^{m_q}` on circulation quadrature nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDensitySet {
    pub m_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub densities: Vec<Vec<f64>>,
    pub t: f64,
}

impl ConditionalDensitySet {
    pub fn new(m_nodes: Vec<f64>, weights: Vec<f64>, densities: Vec<Vec<f64>>, t: f64) -> Result<Self, PdeError> {
        if m_nodes.len() != weights.len() || m_nodes.len() != densities.len() || m_nodes.is_empty() {
            return Err(PdeError::Invalid("nodes, weights and densities must have equal non-zero length".into()));
        }
        Ok(ConditionalDensitySet { m_nodes, weights, densities, t })
    }

    pub fn masses(&self, field_grid: &crate::GridSpec) -> Vec<f64> {
        self.densities.iter().map(|f| field_grid.integrate(f)).collect()
    }

    /// `Σ_q w_q ∫ f^{m_q}`.
    pub fn total_mass(&self, grid: &crate::GridSpec) -> f64 {
        self.masses(grid).iter().zip(&self.weights).map(|(m, w)| m * w).sum()
    }
}

/// `ω = Σ_q w_q m_q f^{m_q}`.
pub fn reconstruct_vorticity(set: &ConditionalDensitySet, grid: crate::GridSpec) -> VorticityField {
    let mut values = vec![0.0; grid.len()];
    for ((m, w), f) in set.m_nodes.iter().zip(&set.weights).zip(&set.densities) {
        let c = m * w;
        for (v, x) in values.iter_mut().zip(f) {
            *v += c * x;
        }
    }
    VorticityField { grid, t: set.t, values }
}

impl PdeSolver {
    /// Advances the densities and the vorticity together; every density is
    /// transported by the velocity of `field` at each RK stage.
    pub fn step_conditional(
        &self,
        set: &ConditionalDensitySet,
        field: &VorticityField,
        dt: f64,
    ) -> Result<(ConditionalDensitySet, VorticityField), PdeError> {
        if set.densities.iter().any(|f| f.len() != field.grid.len()) {
            return Err(PdeError::GridMismatch("density length differs from the field grid".into()));
        }
        if (set.t - field.t).abs() > 1e-12 * (1.0 + field.t.abs()) {
            return Err(PdeError::GridMismatch(format!("density time {} vs field time {}", set.t, field.t)));
        }
        let passive: Vec<&[f64]> = set.densities.iter().map(|f| f.as_slice()).collect();
        let mut specs = self.step_many(field, &passive, dt)?;
        let rest = specs.split_off(1);
        let omega = self.finish(specs.remove(0).into_field(field, dt, self))?;
        let densities: Vec<Vec<f64>> = rest.into_par_iter().map(|s| s.into_values(self)).collect();
        if densities.iter().flatten().any(|v| !v.is_finite()) {
            return Err(PdeError::NonFinite(omega.t));
        }
        Ok((
            ConditionalDensitySet { m_nodes: set.m_nodes.clone(), weights: set.weights.clone(), densities, t: omega.t },
            omega,
        ))
    }
}
