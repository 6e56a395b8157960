use crate::RegularityError;
use vx_pde::{PdeSolver, VorticityField};

/// Relative truncation floor for logarithms and quotients.
pub const FLOOR: f64 = 1e-12;

/// `FLOOR · max g`.
pub fn admissible_floor(f: &VorticityField) -> f64 {
    FLOOR * f.values.iter().fold(0.0f64, |m, &v| m.max(v))
}

/// Advances `initial` through the increasing `times`, keeping one snapshot per
/// entry.
pub fn snapshots(solver: &PdeSolver, initial: &VorticityField, times: &[f64], dt_max: f64) -> Result<Vec<VorticityField>, RegularityError> {
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < initial.t) {
        return Err(RegularityError::Invalid("snapshot times must increase from the initial time".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    let mut f = initial.clone();
    for &t in times {
        f = solver.advance(&f, t, dt_max)?;
        f.t = t;
        out.push(f.clone());
    }
    Ok(out)
}

pub(crate) fn check_fields(fields: &[VorticityField]) -> Result<(), RegularityError> {
    let Some(first) = fields.first() else {
        return Err(RegularityError::Empty);
    };
    if fields.iter().any(|f| f.grid != first.grid) {
        return Err(RegularityError::Invalid("snapshots on different grids".into()));
    }
    if fields.iter().any(|f| !(f.t >= 0.0) || f.values.iter().any(|v| !v.is_finite())) {
        return Err(RegularityError::Invalid("snapshot with negative time or non-finite values".into()));
    }
    Ok(())
}
