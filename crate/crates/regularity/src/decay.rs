use crate::report::fit_slope;
use crate::snapshots::check_fields;
use crate::{EnvelopeReport, EstimateKind, RegularityError};
use rayon::prelude::*;
use vx_pde::{PdeSolver, VorticityField};

/// Accepted distance between fitted and expected decay slopes.
pub const SLOPE_TOL: f64 = 0.15;

fn check_range(times: &[f64]) -> Result<(), RegularityError> {
    let lo = times.iter().fold(f64::INFINITY, |m, &t| m.min(t));
    let hi = times.iter().fold(0.0f64, |m, &t| m.max(t));
    let ratio = if lo > 0.0 { hi / lo } else if hi > 0.0 { f64::INFINITY } else { 0.0 };
    if times.len() < 2 || ratio < 10.0 {
        return Err(RegularityError::InsufficientRange { ratio });
    }
    Ok(())
}

/// Builds a decay report from per-time norms `y` against the clock `x`
/// (`1+t` or `t∨1`) and the expected exponent.
fn decay_report(kind: EstimateKind, order: f64, times: Vec<f64>, x: &[f64], y: Vec<f64>, expected: f64, region: &str) -> EnvelopeReport {
    let slope = fit_slope(x, &y);
    // smallest C with y ≤ C x^expected at every sample
    let constant = x.iter().zip(&y).fold(0.0f64, |m, (&x, &y)| m.max(y * x.powf(-expected)));
    let worst_ratio = x.iter().zip(&y).fold(0.0f64, |m, (&x, &y)| m.max(y / (constant * x.powf(expected))));
    let holds = (slope - expected).abs() <= SLOPE_TOL && worst_ratio <= 1.0 + 1e-12;
    EnvelopeReport {
        kind,
        constant,
        worst_ratio,
        holds,
        holds_at_double: holds,
        region: region.to_string(),
        times,
        per_time: y,
        order: Some(order),
        slope: Some(slope),
        expected_slope: Some(expected),
    }
}

/// Log-log slope of `‖g(t)‖_p` against `1+t`, one report per `p`; the
/// expected exponent is `-(1-1/p)`.
pub fn lp_decay_check(fields: &[VorticityField], p_list: &[f64]) -> Result<Vec<EnvelopeReport>, RegularityError> {
    check_fields(fields)?;
    if p_list.iter().any(|&p| !(p >= 1.0)) {
        return Err(RegularityError::Invalid("p must be ≥ 1".into()));
    }
    let times: Vec<f64> = fields.iter().map(|f| f.t).collect();
    check_range(&times)?;
    let x: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
    Ok(p_list
        .iter()
        .map(|&p| {
            let y: Vec<f64> = fields.par_iter().map(|f| f.lp_norm(p)).collect();
            let expected = if p.is_infinite() { -1.0 } else { -(1.0 - 1.0 / p) };
            decay_report(EstimateKind::LpDecay, p, times.clone(), &x, y, expected, "whole grid")
        })
        .collect())
}

/// Sup norms of `∇^k(K∗ω)` for `k ∈ {0, 1}` against `t∨1`; samples with
/// `t < 1` are dropped. Expected exponent `-(1+k)/2`.
pub fn kato_decay_check(solver: &PdeSolver, fields: &[VorticityField], k_orders: &[usize]) -> Result<Vec<EnvelopeReport>, RegularityError> {
    check_fields(fields)?;
    if k_orders.iter().any(|&k| k > 1) {
        return Err(RegularityError::Invalid("only k ∈ {0, 1} is supported".into()));
    }
    let kept: Vec<&VorticityField> = fields.iter().filter(|f| f.t >= 1.0).collect();
    let times: Vec<f64> = kept.iter().map(|f| f.t).collect();
    check_range(&times)?;
    let mut out = Vec::new();
    for &k in k_orders {
        let y = kept
            .par_iter()
            .map(|f| -> Result<f64, RegularityError> {
                if k == 0 {
                    let (u1, u2) = solver.velocity(f)?;
                    Ok(u1.iter().zip(&u2).fold(0.0f64, |m, (a, b)| m.max(a.hypot(*b))))
                } else {
                    let g = solver.velocity_gradient(f)?;
                    Ok((0..g[0].len()).fold(0.0f64, |m, i| {
                        m.max((g[0][i].powi(2) + g[1][i].powi(2) + g[2][i].powi(2) + g[3][i].powi(2)).sqrt())
                    }))
                }
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let expected = -(1.0 + k as f64) / 2.0;
        let region = if k == 0 { "whole grid, |u|, t ≥ 1" } else { "whole grid, Frobenius |∇u|, t ≥ 1" };
        out.push(decay_report(EstimateKind::KatoDecay, k as f64, times.clone(), &times, y, expected, region));
    }
    Ok(out)
}
