use crate::report::fit_slope;
use crate::snapshots::{admissible_floor, check_fields};
use crate::{EnvelopeReport, EstimateKind, RegularityError};
use rayon::prelude::*;
use vx_pde::VorticityField;

/// Search interval for envelope constants.
pub const C_MIN: f64 = 1e-6;
pub const C_MAX: f64 = 1e6;
const BISECTIONS: usize = 200;

/// `(t, |x|², ln g)` over the admissible region of one snapshot.
struct Samples {
    t: f64,
    pts: Vec<(f64, f64)>,
}

fn collect(fields: &[VorticityField]) -> Result<Vec<Samples>, RegularityError> {
    fields
        .par_iter()
        .map(|f| {
            let floor = admissible_floor(f);
            let pts: Vec<(f64, f64)> = f
                .values
                .iter()
                .enumerate()
                .filter(|(_, &g)| g > floor)
                .map(|(i, &g)| {
                    let (a, b) = f.grid.point(i);
                    (a * a + b * b, g.ln())
                })
                .collect();
            if pts.is_empty() {
                return Err(RegularityError::EmptyRegion(f.t));
            }
            Ok(Samples { t: f.t, pts })
        })
        .collect()
}

/// Per-time max of `ln(ratio)` for a log-ratio function `lr(t, r², ln g, C)`.
fn log_ratios(s: &[Samples], c: f64, lr: &(dyn Fn(f64, f64, f64, f64) -> f64 + Sync)) -> Vec<f64> {
    s.par_iter()
        .map(|x| x.pts.iter().fold(f64::NEG_INFINITY, |m, &(r2, lg)| m.max(lr(x.t, r2, lg, c))))
        .collect()
}

fn worst(v: &[f64]) -> f64 {
    v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x))
}

/// Smallest `C` in `[C_MIN, C_MAX]` with every log-ratio ≤ 0, bisecting
/// on `ln C`. The ratio must be non-increasing in `C`.
fn fit(kind: EstimateKind, fields: &[VorticityField], lr: &(dyn Fn(f64, f64, f64, f64) -> f64 + Sync)) -> Result<EnvelopeReport, RegularityError> {
    let s = collect(fields)?;
    let at_max = worst(&log_ratios(&s, C_MAX, lr));
    if at_max > 0.0 {
        return Err(RegularityError::EnvelopeViolation { kind, c_max: C_MAX, ratio: at_max.exp() });
    }
    let c = if worst(&log_ratios(&s, C_MIN, lr)) <= 0.0 {
        C_MIN
    } else {
        let (mut lo, mut hi) = (C_MIN.ln(), C_MAX.ln());
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if worst(&log_ratios(&s, mid.exp(), lr)) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.exp()
    };
    let per_time: Vec<f64> = log_ratios(&s, c, lr).into_iter().map(f64::exp).collect();
    let worst_ratio = per_time.iter().fold(0.0f64, |m, &x| m.max(x));
    let holds_at_double = worst(&log_ratios(&s, 2.0 * c, lr)) <= 0.0;
    let times: Vec<f64> = fields.iter().map(|f| f.t).collect();
    let slope = if times.len() >= 2 {
        let peaks: Vec<f64> = fields.iter().map(|f| f.values.iter().fold(0.0f64, |m, &v| m.max(v))).collect();
        let one_plus: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
        Some(fit_slope(&one_plus, &peaks))
    } else {
        None
    };
    Ok(EnvelopeReport {
        kind,
        constant: c,
        worst_ratio,
        holds: worst_ratio <= 1.0,
        holds_at_double,
        region: format!("grid points with g > {:e}·max g", crate::FLOOR),
        times,
        per_time,
        order: None,
        slope,
        expected_slope: Some(-1.0),
    })
}

/// Fits `g(t,x) ≤ C/(1+t)·exp(-|x|²/(8t+C))` after checking the earliest
/// snapshot against `C0·exp(-|x|²/C0)` on its admissible region. `slope` is the log-log slope of
/// `max g` against `1+t`.
pub fn gauss_upper_check(fields: &[VorticityField], c0: f64) -> Result<EnvelopeReport, RegularityError> {
    check_fields(fields)?;
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(RegularityError::Invalid(format!("C0 must be positive, got {c0}")));
    }
    let first = fields.iter().min_by(|a, b| a.t.total_cmp(&b.t)).expect("non-empty");
    let floor = admissible_floor(first);
    for (i, &g) in first.values.iter().enumerate().filter(|(_, &g)| g > floor) {
        let (x1, x2) = first.grid.point(i);
        let bound = c0 * (-(x1 * x1 + x2 * x2) / c0).exp();
        if g > bound {
            return Err(RegularityError::Precondition { x1, x2, value: g, bound });
        }
    }
    fit(EstimateKind::GaussUpper, fields, &|t, r2, lg, c| lg - c.ln() + (1.0 + t).ln() + r2 / (8.0 * t + c))
}

/// Fits `g(t,x) ≥ (C(1+t)^C)^{-1}·exp(-C|x|²/(1+t))` on the admissible region.
pub fn gauss_lower_check(fields: &[VorticityField]) -> Result<EnvelopeReport, RegularityError> {
    check_fields(fields)?;
    fit(EstimateKind::GaussLower, fields, &|t, r2, lg, c| -c.ln() - c * (1.0 + t).ln() - c * r2 / (1.0 + t) - lg)
}
