use crate::Vec2;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RescaleError {
    #[error("circulation bound must be positive, got {0}")]
    NonPositiveBound(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rescaled {
    pub positions: Vec<Vec2>,
    pub circulations: Vec<f64>,
    pub sigma: f64,
    /// factor applied to lengths (positions and blob radius)
    pub length_scale: f64,
}

/// Maps a system with circulations in `[-A, A]` to one with support in
/// `[-1, 1]`: `Y = X/√A`, `M' = M/A`, `σ' = σ/A`. Time is unchanged.
pub fn rescale_to_unit(
    a: f64,
    positions: &[Vec2],
    circulations: &[f64],
    sigma: f64,
) -> Result<Rescaled, RescaleError> {
    if !(a > 0.0) {
        return Err(RescaleError::NonPositiveBound(a));
    }
    let s = 1.0 / a.sqrt();
    Ok(Rescaled {
        positions: positions.iter().map(|&x| x * s).collect(),
        circulations: circulations.iter().map(|&m| m / a).collect(),
        sigma: sigma / a,
        length_scale: s,
    })
}

pub fn unscale_positions(a: f64, positions: &[Vec2]) -> Vec<Vec2> {
    let s = a.sqrt();
    positions.iter().map(|&y| y * s).collect()
}
