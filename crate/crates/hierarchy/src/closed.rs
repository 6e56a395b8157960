use crate::{HierarchyError, IteratedIntegralQuery};

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    statrs::function::factorial::ln_binomial(n, k)
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

fn b_phi(k: usize, l: usize, phi: f64) -> f64 {
    if l == k {
        return (-(k as f64) * phi).exp();
    }
    if phi == 0.0 {
        return 0.0;
    }
    let ln = ln_binomial((l - 1) as u64, (k - 1) as u64) + (l - k) as f64 * (-(-phi).exp_m1()).ln() - k as f64 * phi;
    ln.exp()
}

/// `A` as the binomial probability `P(Bin(l, e^{-φ}) ≤ k-1)`, which equals the
/// Beta(k, l-k+1) upper tail at `e^{-φ}`.
fn a_phi(k: usize, l: usize, phi: f64) -> f64 {
    if phi == 0.0 {
        return 0.0;
    }
    let lp = -phi;
    let lq = (-(-phi).exp_m1()).ln();
    let mut acc = Neumaier::default();
    for j in 0..k {
        acc.add((ln_binomial(l as u64, j as u64) + j as f64 * lp + (l - j) as f64 * lq).exp());
    }
    acc.value().min(1.0)
}

pub fn b_closed(q: &IteratedIntegralQuery) -> Result<f64, HierarchyError> {
    q.validate()?;
    Ok(b_phi(q.k, q.l, q.phi()))
}

pub fn a_closed(q: &IteratedIntegralQuery) -> Result<f64, HierarchyError> {
    q.validate()?;
    Ok(a_phi(q.k, q.l, q.phi()))
}

/// Compensated `Σ_{l=k}^{l_max} B_k^l` at fixed `φ`.
pub fn b_partial_sum(k: usize, phi: f64, l_max: usize) -> f64 {
    let mut acc = Neumaier::default();
    for l in k..=l_max {
        acc.add(b_phi(k, l, phi));
    }
    acc.value()
}

/// `Σ_{l≥k} l^p B_k^l` truncated once the geometric bound on the remaining
/// tail is below `tol`; returns `(sum, last l)`.
fn b_moment(k: usize, phi: f64, power: i32, tol: f64) -> (f64, usize) {
    let q = -(-phi).exp_m1();
    let mut acc = Neumaier::default();
    let mut l = k;
    loop {
        let lf = l as f64;
        let term = lf.powi(power) * b_phi(k, l, phi);
        acc.add(term);
        let ratio = ((lf + 1.0) / lf).powi(power) * lf / (l + 1 - k) as f64 * q;
        if (ratio < 1.0 && term * ratio / (1.0 - ratio) < tol) || l >= 50_000_000 {
            return (acc.value(), l);
        }
        l += 1;
    }
}

/// `Σ_{l≥k} l² B_k^l`, tail below `tol`.
pub fn b_weighted_l2(k: usize, phi: f64, tol: f64) -> f64 {
    b_moment(k, phi, 2, tol).0
}

/// `Σ_{l≥k} B_k^l` with adaptive truncation; returns `(sum, last l)`.
pub fn b_normalization(k: usize, phi: f64, tol: f64) -> (f64, usize) {
    b_moment(k, phi, 0, tol)
}

/// `Σ_j C(j+k-1, k-1) x^j` summed until the geometric tail bound drops under
/// `tol`; returns `(sum, terms used)`.
pub fn neg_binomial_series(k: usize, x: f64, tol: f64) -> (f64, usize) {
    assert!((0.0..1.0).contains(&x) && k >= 1);
    let mut acc = Neumaier::default();
    let mut term = 1.0;
    let mut j = 0usize;
    loop {
        acc.add(term);
        let ratio = (j + k) as f64 / (j + 1) as f64 * x;
        let next = term * ratio;
        if ratio < 1.0 && next / (1.0 - ratio) < tol * acc.value() {
            return (acc.value(), j + 1);
        }
        term = next;
        j += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecurrenceResiduals {
    /// `dB_k^l/dt + k f B_k^l - k f B_{k+1}^l` with a central difference.
    pub ode: f64,
    /// `A_k^l - A_k^{l-1} + B_k^l`
    pub ab_identity: f64,
    /// `A_k^l - A_k^k + Σ_{j=k+1}^l B_k^j`
    pub telescoping: f64,
}

pub fn recurrence_check(q: &IteratedIntegralQuery, fd_step: f64) -> Result<RecurrenceResiduals, HierarchyError> {
    q.validate()?;
    let (k, l, t, g) = (q.k, q.l, q.t, q.growth);
    if k >= l {
        return Err(HierarchyError::InvalidQuery(format!("recurrence needs k < l, got k={k} l={l}")));
    }
    let b = |s: f64, kk: usize| b_phi(kk, l, g.phi(s));
    let (lo, hi) = if t >= fd_step { (t - fd_step, t + fd_step) } else { (t, t + 2.0 * fd_step) };
    let tc = 0.5 * (lo + hi);
    let db = (b(hi, k) - b(lo, k)) / (hi - lo);
    let f = g.h(tc);
    let kf = k as f64 * f;
    let ode = db + kf * b(tc, k) - kf * b(tc, k + 1);

    let phi = g.phi(t);
    let ab_identity = a_phi(k, l, phi) - a_phi(k, l - 1, phi) + b_phi(k, l, phi);
    let mut acc = Neumaier::default();
    acc.add(a_phi(k, l, phi));
    acc.add(-a_phi(k, k, phi));
    for j in k + 1..=l {
        acc.add(b_phi(k, j, phi));
    }
    Ok(RecurrenceResiduals { ode, ab_identity, telescoping: acc.value() })
}
