use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LawError {
    #[error("circulation law parameter `{name}` invalid: {reason}")]
    Invalid { name: &'static str, reason: String },
}

/// Distribution of the circulation variable, supported in `[-A, A]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CirculationLaw {
    Constant { c: f64 },
    Uniform { a: f64 },
    /// `+a` with probability `p`, `-a` otherwise.
    TwoPoint { a: f64, p: f64 },
}

impl CirculationLaw {
    /// Smallest `A` with support in `[-A, A]`.
    pub fn bound(&self) -> f64 {
        match *self {
            CirculationLaw::Constant { c } => c.abs(),
            CirculationLaw::Uniform { a } | CirculationLaw::TwoPoint { a, .. } => a,
        }
    }

    pub fn validate(&self) -> Result<(), LawError> {
        let bad = |name, reason: &str| Err(LawError::Invalid { name, reason: reason.to_string() });
        match *self {
            CirculationLaw::Constant { c } if !c.is_finite() => bad("c", "must be finite"),
            CirculationLaw::Uniform { a } if !(a > 0.0 && a.is_finite()) => bad("a", "must be positive"),
            CirculationLaw::TwoPoint { a, .. } if !(a > 0.0 && a.is_finite()) => bad("a", "must be positive"),
            CirculationLaw::TwoPoint { p, .. } if !(0.0..=1.0).contains(&p) => bad("p", "must lie in [0,1]"),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            CirculationLaw::Constant { c } => c,
            CirculationLaw::Uniform { a } => a * (2.0 * rng.random::<f64>() - 1.0),
            CirculationLaw::TwoPoint { a, p } => {
                if rng.random::<f64>() < p {
                    a
                } else {
                    -a
                }
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            CirculationLaw::Constant { c } => c,
            CirculationLaw::Uniform { .. } => 0.0,
            CirculationLaw::TwoPoint { a, p } => a * (2.0 * p - 1.0),
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            CirculationLaw::Constant { .. } => 0.0,
            CirculationLaw::Uniform { a } => a * a / 3.0,
            CirculationLaw::TwoPoint { a, p } => 4.0 * a * a * p * (1.0 - p),
        }
    }

    /// Quadrature in `m` with probability weights summing to one.
    ///
    /// Discrete laws return their atoms; the uniform law uses `q`-point
    /// Gauss-Legendre on `[-a, a]`.
    pub fn quadrature(&self, q: usize) -> (Vec<f64>, Vec<f64>) {
        match *self {
            CirculationLaw::Constant { c } => (vec![c], vec![1.0]),
            CirculationLaw::TwoPoint { a, p } => (vec![-a, a], vec![1.0 - p, p]),
            CirculationLaw::Uniform { a } => {
                let (x, w) = gauss_legendre(q.max(1));
                (x.iter().map(|v| a * v).collect(), w.iter().map(|v| 0.5 * v).collect())
            }
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            if n == 1 {
                dp = 1.0;
            }
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        for n in [1usize, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((s - exact).abs() < 1e-13, "n={n} deg={deg}: {s} vs {exact}");
            }
        }
    }

    #[test]
    fn quadrature_weights_are_probabilities() {
        for law in [
            CirculationLaw::Constant { c: 0.4 },
            CirculationLaw::Uniform { a: 1.0 },
            CirculationLaw::TwoPoint { a: 0.5, p: 0.3 },
        ] {
            let (_, w) = law.quadrature(8);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(CirculationLaw::TwoPoint { a: 1.0, p: 1.5 }.validate().is_err());
        assert!(CirculationLaw::Uniform { a: 0.0 }.validate().is_err());
        assert!(CirculationLaw::Uniform { a: 1.0 }.validate().is_ok());
    }
}
