use crate::HierarchyError;
use std::io::{self, Write};

/// Sub-Gaussian bound `exp(-2(l+2)(θ - k/(l+1))_+²)` for `Y ~ Beta(k, l-k+1)`
/// together with the exact `P(Y > θ)`. Returns `(bound, exact)`.
pub fn beta_tail_bound(k: usize, l: usize, threshold: f64) -> Result<(f64, f64), HierarchyError> {
    if k < 1 || l < k {
        return Err(HierarchyError::InvalidQuery(format!("need 1 <= k <= l, got k={k} l={l}")));
    }
    if !(0.0..=1.0).contains(&threshold) {
        return Err(HierarchyError::InvalidQuery(format!("threshold {threshold} outside [0,1]")));
    }
    let excess = (threshold - k as f64 / (l + 1) as f64).max(0.0);
    let bound = (-2.0 * (l + 2) as f64 * excess * excess).exp();
    // P(Y > θ) = I_{1-θ}(l-k+1, k), avoiding 1 - I_θ(k, l-k+1)
    let exact = statrs::function::beta::beta_reg((l - k + 1) as f64, k as f64, 1.0 - threshold);
    Ok((bound, exact))
}

/// `max(1, inf{i > 0 : (i/(i+1))^5 ≥ c2/c1})`
pub fn i0_index(c1: f64, c2: f64) -> Result<usize, HierarchyError> {
    if !(c1 > c2 && c2 >= 0.0 && c1.is_finite()) {
        return Err(HierarchyError::Invalid(format!("need c1 > c2 >= 0, got c1={c1} c2={c2}")));
    }
    let ratio = c2 / c1;
    let ok = |i: usize| {
        let r = i as f64 / (i + 1) as f64;
        r.powi(5) >= ratio
    };
    // (i/(i+1))^5 ≥ ρ  ⇔  i ≥ ρ^{1/5}/(1-ρ^{1/5}); start just below and scan
    let s = ratio.powf(0.2);
    let mut i = ((s / (1.0 - s)).floor() as usize).saturating_sub(2).max(1);
    while i > 1 && ok(i - 1) {
        i -= 1;
    }
    while !ok(i) {
        i += 1;
    }
    Ok(i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRow {
    pub k: usize,
    pub l: usize,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub bound: f64,
    pub exact: f64,
}

pub fn write_lattice_csv<W: Write>(mut w: W, rows: &[LatticeRow]) -> io::Result<()> {
    writeln!(w, "k,l,t,A,B,bound,exact")?;
    for r in rows {
        writeln!(w, "{},{},{:e},{:e},{:e},{:e},{:e}", r.k, r.l, r.t, r.a, r.b, r.bound, r.exact)?;
    }
    Ok(())
}
