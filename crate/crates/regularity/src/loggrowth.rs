use crate::snapshots::{admissible_floor, check_fields};
use crate::{EnvelopeReport, EstimateKind, RegularityError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use vx_pde::{Spectral, VorticityField};

/// Largest accepted max/min ratio of per-time fitted constants.
pub const LOG_SPREAD: f64 = 10.0;
/// Relative tolerance on `max F`.
pub const AUX_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogGrowth {
    pub grad: EnvelopeReport,
    pub hess: EnvelopeReport,
}

/// Constants of `F = |∇g|²/g + (C/σ) g log g - C1 g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxConstants {
    pub c: f64,
    pub c1: f64,
}

/// Pointwise `g`, `∇g`, `∇²g` on the admissible region of one snapshot.
struct Derivs {
    t: f64,
    /// (x1, x2, g, g1, g2, g11, g12, g22)
    pts: Vec<[f64; 8]>,
}

fn derivs(sp: &Spectral, f: &VorticityField, hessian: bool) -> Result<Derivs, RegularityError> {
    let floor = admissible_floor(f);
    let (g1, g2) = sp.gradient(&f.values);
    let (h11, h12, h22) = if hessian { sp.hessian(&f.values) } else { (Vec::new(), Vec::new(), Vec::new()) };
    let pts: Vec<[f64; 8]> = (0..f.values.len())
        .filter(|&i| f.values[i] > floor)
        .map(|i| {
            let (a, b) = f.grid.point(i);
            let h = if hessian { [h11[i], h12[i], h22[i]] } else { [0.0; 3] };
            [a, b, f.values[i], g1[i], g2[i], h[0], h[1], h[2]]
        })
        .collect();
    if pts.is_empty() {
        return Err(RegularityError::EmptyRegion(f.t));
    }
    Ok(Derivs { t: f.t, pts })
}

fn log_bound(t: f64, r2: f64) -> f64 {
    (1.0 + (1.0 + t).ln()) / (1.0 + t) + r2 / (1.0 + t).powi(2)
}

fn growth_report(kind: EstimateKind, times: Vec<f64>, per_time: Vec<f64>) -> EnvelopeReport {
    let constant = per_time.iter().fold(0.0f64, |m, &x| m.max(x));
    let least = per_time.iter().fold(f64::INFINITY, |m, &x| m.min(x));
    let holds = constant.is_finite() && least > 0.0 && constant / least <= LOG_SPREAD;
    EnvelopeReport {
        kind,
        constant,
        worst_ratio: if constant > 0.0 { 1.0 } else { 0.0 },
        holds,
        holds_at_double: holds,
        region: format!("grid points with g > {:e}·max g; spectral derivatives of g", crate::FLOOR),
        times,
        per_time,
        order: None,
        slope: None,
        expected_slope: None,
    }
}

/// Per-time sup of `|∇log g|²` and of the spectral norm of `∇²log g`, each
/// divided by `(1+log(1+t))/(1+t) + |x|²/(1+t)²`. Log-derivatives are formed
/// as quotients of spectral derivatives of `g`.
pub fn log_growth_check(fields: &[VorticityField], t_list: &[f64]) -> Result<LogGrowth, RegularityError> {
    check_fields(fields)?;
    let picked: Vec<&VorticityField> = t_list
        .iter()
        .map(|&t| {
            fields
                .iter()
                .find(|f| (f.t - t).abs() <= 1e-9 * (1.0 + t))
                .ok_or_else(|| RegularityError::Invalid(format!("no snapshot at t = {t}")))
        })
        .collect::<Result<_, _>>()?;
    let sp = Spectral::new(fields[0].grid);
    let rows = picked
        .par_iter()
        .map(|f| -> Result<(f64, f64), RegularityError> {
            let d = derivs(&sp, f, true)?;
            let (mut rg, mut rh) = (0.0f64, 0.0f64);
            for &[a, b, g, g1, g2, g11, g12, g22] in &d.pts {
                let (l1, l2) = (g1 / g, g2 / g);
                let bound = log_bound(d.t, a * a + b * b);
                rg = rg.max((l1 * l1 + l2 * l2) / bound);
                let (p, q, r) = (g11 / g - l1 * l1, g12 / g - l1 * l2, g22 / g - l2 * l2);
                let norm = (0.5 * (p + r)).abs() + (0.25 * (p - r).powi(2) + q * q).sqrt();
                rh = rh.max(norm / bound);
            }
            Ok((rg, rh))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let times: Vec<f64> = picked.iter().map(|f| f.t).collect();
    Ok(LogGrowth {
        grad: growth_report(EstimateKind::LogGrad, times.clone(), rows.iter().map(|r| r.0).collect()),
        hess: growth_report(EstimateKind::LogHess, times, rows.iter().map(|r| r.1).collect()),
    })
}

/// Max over the admissible region of `F = |∇g|²/g + (C/σ) g log g - C1 g`
/// per snapshot, after the initial-data test
/// `|∇log g0|² + (C/σ) log g0 ≤ C1` on the earliest snapshot. The verdict
/// is `max F ≤ AUX_TOL·scale` with `scale` the largest sum of term magnitudes.
pub fn aux_sign_check(fields: &[VorticityField], sigma: f64, k: AuxConstants) -> Result<EnvelopeReport, RegularityError> {
    check_fields(fields)?;
    if !(sigma > 0.0 && k.c.is_finite() && k.c1.is_finite()) {
        return Err(RegularityError::Invalid("σ must be positive and constants finite".into()));
    }
    let sp = Spectral::new(fields[0].grid);
    let first = fields.iter().min_by(|a, b| a.t.total_cmp(&b.t)).expect("non-empty");
    let d0 = derivs(&sp, first, false)?;
    let slack = 1e-8 * (1.0 + k.c1.abs());
    for &[x1, x2, g, g1, g2, ..] in &d0.pts {
        let value = (g1 * g1 + g2 * g2) / (g * g) + k.c / sigma * g.ln();
        if value > k.c1 + slack {
            return Err(RegularityError::Precondition { x1, x2, value, bound: k.c1 });
        }
    }
    let eval = |c: f64| -> Result<(Vec<f64>, f64), RegularityError> {
        let rows = fields
            .par_iter()
            .map(|f| -> Result<(f64, f64), RegularityError> {
                let d = derivs(&sp, f, false)?;
                let (mut fmax, mut scale) = (f64::NEG_INFINITY, 0.0f64);
                for &[_, _, g, g1, g2, ..] in &d.pts {
                    let a = (g1 * g1 + g2 * g2) / g;
                    let b = c / sigma * g * g.ln();
                    let e = k.c1 * g;
                    fmax = fmax.max(a + b - e);
                    scale = scale.max(a + b.abs() + e.abs());
                }
                Ok((fmax, scale))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scale = rows.iter().fold(0.0f64, |m, r| m.max(r.1));
        Ok((rows.into_iter().map(|r| r.0).collect(), scale))
    };
    let (per_time, scale) = eval(k.c)?;
    let fmax = per_time.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let worst_ratio = fmax / (AUX_TOL * scale);
    let (at2, scale2) = eval(2.0 * k.c)?;
    let holds_at_double = at2.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)) <= AUX_TOL * scale2;
    Ok(EnvelopeReport {
        kind: EstimateKind::AuxSign,
        constant: k.c,
        worst_ratio,
        holds: worst_ratio <= 1.0,
        holds_at_double,
        region: format!("grid points with g > {:e}·max g; C1 = {}", crate::FLOOR, k.c1),
        times: fields.iter().map(|f| f.t).collect(),
        per_time,
        order: None,
        slope: None,
        expected_slope: None,
    })
}
