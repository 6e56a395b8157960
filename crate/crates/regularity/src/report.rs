use serde::{Deserialize, Serialize};
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    GaussUpper,
    GaussLower,
    LpDecay,
    KatoDecay,
    LogGrad,
    LogHess,
    AuxSign,
}

impl EstimateKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimateKind::GaussUpper => "gauss_upper",
            EstimateKind::GaussLower => "gauss_lower",
            EstimateKind::LpDecay => "lp_decay",
            EstimateKind::KatoDecay => "kato_decay",
            EstimateKind::LogGrad => "log_grad",
            EstimateKind::LogHess => "log_hess",
            EstimateKind::AuxSign => "aux_sign",
        }
    }
}

/// Outcome of one check. `worst_ratio ≤ 1` means the envelope holds with
/// `constant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub kind: EstimateKind,
    pub constant: f64,
    pub worst_ratio: f64,
    pub holds: bool,
    /// verdict re-evaluated with the constant doubled
    pub holds_at_double: bool,
    pub region: String,
    pub times: Vec<f64>,
    /// per-time quantity: worst ratio, norm, or max of F
    pub per_time: Vec<f64>,
    /// `p` for L^p decay, `k` for velocity derivatives
    pub order: Option<f64>,
    pub slope: Option<f64>,
    pub expected_slope: Option<f64>,
}

impl EnvelopeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// OLS slope of `ln y` against `ln x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// One row per report and time: `kind,order,t,value`.
pub fn write_reports_csv<W: Write>(w: &mut W, reports: &[EnvelopeReport]) -> io::Result<()> {
    writeln!(w, "kind,order,t,value")?;
    for r in reports {
        let order = r.order.map(|o| format!("{o}")).unwrap_or_default();
        for (t, v) in r.times.iter().zip(&r.per_time) {
            writeln!(w, "{},{},{},{:.12e}", r.kind.name(), order, t, v)?;
        }
    }
    Ok(())
}
