use crate::{EntropyError, GriddedDensity};
use serde::{Deserialize, Serialize};

/// `½ ∫ |p - q|`
pub fn total_variation(p: &GriddedDensity, q: &GriddedDensity) -> Result<f64, EntropyError> {
    p.check_same(q)?;
    let s: f64 = p.values.iter().zip(&q.values).map(|(a, b)| (a - b).abs()).sum();
    Ok(0.5 * s * p.grid.cell_volume())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropy {
    /// `(1/k) ∫ p log(p/q)`, `+∞` when `p` charges `{q = 0}`
    pub value: f64,
    /// `∫_{q=0} p`
    pub mass_outside_support: f64,
}

pub fn relative_entropy(p: &GriddedDensity, q: &GriddedDensity, k: usize) -> Result<RelativeEntropy, EntropyError> {
    p.check_same(q)?;
    if k == 0 {
        return Err(EntropyError::Invalid("k must be at least 1".into()));
    }
    let (mut acc, mut comp, mut outside) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in p.values.iter().zip(&q.values) {
        if a <= 0.0 {
            continue;
        }
        if b <= 0.0 {
            outside += a;
            continue;
        }
        // Kahan
        let y = a * (a / b).ln() - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    let vol = p.grid.cell_volume();
    let mass_outside_support = outside * vol;
    let value = if outside > 0.0 { f64::INFINITY } else { acc * vol / k as f64 };
    Ok(RelativeEntropy { value, mass_outside_support })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherInformation {
    /// `∫ p |∇ log(p/q)|²` over the retained region
    pub value: f64,
    /// `∫ p` over the retained region
    pub region_mass: f64,
    pub floor: f64,
}

/// Relative Fisher information with central differences; nodes where `p` or
/// `q` (or a stencil neighbour) falls below `1e-12·peak` are dropped.
pub fn fisher_information(p: &GriddedDensity, q: &GriddedDensity) -> Result<FisherInformation, EntropyError> {
    p.check_same(q)?;
    let peak = p.values.iter().chain(&q.values).fold(0.0f64, |m, v| m.max(*v));
    let floor = 1e-12 * peak;
    let ok = |i: usize| p.values[i] > floor && q.values[i] > floor;
    let lr: Vec<f64> = p
        .values
        .iter()
        .zip(&q.values)
        .map(|(a, b)| if *a > floor && *b > floor { (a / b).ln() } else { 0.0 })
        .collect();
    let strides = p.grid.strides();
    let (mut value, mut mass) = (0.0, 0.0);
    for i in 0..p.values.len() {
        if !ok(i) {
            continue;
        }
        let mi = p.grid.multi_index(i);
        let mut g2 = 0.0;
        let mut keep = true;
        for (d, a) in p.grid.axes.iter().enumerate() {
            if mi[d] == 0 || mi[d] + 1 >= a.n || !ok(i - strides[d]) || !ok(i + strides[d]) {
                keep = false;
                break;
            }
            let g = (lr[i + strides[d]] - lr[i - strides[d]]) / (2.0 * a.h);
            g2 += g * g;
        }
        if keep {
            value += p.values[i] * g2;
            mass += p.values[i];
        }
    }
    let vol = p.grid.cell_volume();
    Ok(FisherInformation { value: value * vol, region_mass: mass * vol, floor })
}
