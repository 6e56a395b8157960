//! Free-space correction for the periodic Biot-Savart inversion.
//!
//! The spectral velocity is the velocity of the periodized vorticity with
//! its mean removed. The difference to the whole-plane velocity is a smooth
//! field inside the box which, for vorticity concentrated near the centre,
//! is a polynomial in `z = x1 + i x2`: a linear part from the removed mean
//! plus the image sum
//! `F'(z) = Σ_m (G_{4m}/P^{4m}) Σ_j C(4m-1, j) z^{4m-1-j} (-1)^j μ_j`
//! with `μ_j = ∫ ζ^j ω(ζ) dA`, `P = 2L` and `G_n = Σ'_{w ∈ Z[i]} w^{-n}`.
//! Only `n ≡ 0 mod 4` survives the square lattice symmetry.

use crate::GridSpec;
use rustfft::num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Number of lattice sums `G_4 .. G_{4·LATTICE_TERMS}` kept.
pub const LATTICE_TERMS: usize = 12;
const DIRECT_RANGE: i64 = 60;

fn e4_at_i() -> f64 {
    let q = (-2.0 * PI).exp();
    let mut s = 0.0;
    let mut qn = 1.0;
    for n in 1..30u64 {
        qn *= q;
        let sigma3: u64 = (1..=n).filter(|d| n % d == 0).map(|d| d * d * d).sum();
        s += sigma3 as f64 * qn;
    }
    1.0 + 240.0 * s
}

/// `G_n = Σ'_{a,b} (a + i b)^{-n}` for the unit square lattice, `n ≡ 0 mod 4`.
pub fn eisenstein_g(n: usize) -> f64 {
    assert!(n >= 4 && n % 4 == 0, "only n ≡ 0 mod 4 is non-zero on the square lattice");
    let e4 = e4_at_i();
    match n {
        4 => PI.powi(4) / 45.0 * e4,
        8 => 2.0 * PI.powi(8) / 9450.0 * e4 * e4,
        _ => {
            // direct sum, tail is O(R^{2-n}) with n ≥ 12
            let mut terms = Vec::new();
            for a in -DIRECT_RANGE..=DIRECT_RANGE {
                for b in -DIRECT_RANGE..=DIRECT_RANGE {
                    if a != 0 || b != 0 {
                        let w = C64::new(a as f64, b as f64);
                        terms.push(w.inv().powu(n as u32).re);
                    }
                }
            }
            // smallest first
            terms.sort_by(|x, y| x.abs().partial_cmp(&y.abs()).unwrap());
            terms.iter().sum()
        }
    }
}

fn scaled_sums(period: f64) -> Vec<f64> {
    static G: OnceLock<Vec<f64>> = OnceLock::new();
    let g = G.get_or_init(|| (1..=LATTICE_TERMS).map(|m| eisenstein_g(4 * m)).collect());
    g.iter().enumerate().map(|(i, gi)| gi / period.powi(4 * (i as i32 + 1))).collect()
}

/// Correction `u_free - u_periodic` for one vorticity field.
#[derive(Debug, Clone)]
pub struct FreeSpaceCorrection {
    gamma: f64,
    m1: C64,
    period: f64,
    /// coefficients of F'(z), lowest power first
    coef: Vec<C64>,
}

impl FreeSpaceCorrection {
    pub fn new(grid: &GridSpec, omega: &[f64]) -> Self {
        let deg = 4 * LATTICE_TERMS - 1;
        let mut mu = vec![C64::new(0.0, 0.0); deg + 1];
        let da = grid.cell_area();
        // a cell enters μ_j scaled by at most (|z|/P)^j ≤ 1, so cells far
        // below the peak cannot matter
        let floor = 1e-18 * omega.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (idx, &w) in omega.iter().enumerate() {
            if w.abs() <= floor {
                continue;
            }
            let (a, b) = grid.point(idx);
            let z = C64::new(a, b);
            let mut p = C64::new(w * da, 0.0);
            for m in mu.iter_mut() {
                *m += p;
                p *= z;
            }
        }
        let period = 2.0 * grid.half_width;
        let g = scaled_sums(period);
        let mut coef = vec![C64::new(0.0, 0.0); deg + 1];
        for (i, gi) in g.iter().enumerate() {
            let e = 4 * (i + 1) - 1;
            let mut binom = 1.0f64;
            for (j, muj) in mu.iter().enumerate().take(e + 1) {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                coef[e - j] += muj * (gi * binom * sign);
                binom = binom * (e - j) as f64 / (j + 1) as f64;
            }
        }
        FreeSpaceCorrection { gamma: mu[0].re, m1: mu[1], period, coef }
    }

    fn fprime(&self, z: C64) -> (C64, C64) {
        // Horner for F' and F''
        let mut f = C64::new(0.0, 0.0);
        let mut df = C64::new(0.0, 0.0);
        for c in self.coef.iter().rev() {
            df = df * z + f;
            f = f * z + c;
        }
        (f, df)
    }

    /// Velocity to add to the periodic velocity at `(x1, x2)`.
    #[inline]
    pub fn velocity(&self, x1: f64, x2: f64) -> (f64, f64) {
        let (fp, _) = self.fprime(C64::new(x1, x2));
        let p2 = 2.0 * self.period * self.period;
        let d1 = -(self.gamma * x1 - self.m1.re) / p2 - fp.re / (2.0 * PI);
        let d2 = -(self.gamma * x2 - self.m1.im) / p2 + fp.im / (2.0 * PI);
        (d2, -d1)
    }

    /// Gradient `[∂1c1, ∂2c1, ∂1c2, ∂2c2]` of the correction velocity.
    pub fn gradient(&self, x1: f64, x2: f64) -> [f64; 4] {
        let (_, fpp) = self.fprime(C64::new(x1, x2));
        let g = self.gamma / (2.0 * self.period * self.period);
        let (re, im) = (fpp.re / (2.0 * PI), fpp.im / (2.0 * PI));
        [im, -g + re, g + re, -im]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_direct_sums() {
        // G_4, G_8 from E_4(i) against a brute-force lattice sum
        for n in [4usize, 8] {
            let mut s = 0.0;
            let r = 400i64;
            for a in -r..=r {
                for b in -r..=r {
                    if a != 0 || b != 0 {
                        s += C64::new(a as f64, b as f64).inv().powu(n as u32).re;
                    }
                }
            }
            let rel = (s - eisenstein_g(n)).abs() / eisenstein_g(n);
            assert!(rel < if n == 4 { 1e-5 } else { 1e-12 }, "G_{n}: {s} vs {}", eisenstein_g(n));
        }
    }

    #[test]
    fn frozen_values() {
        assert!((eisenstein_g(4) - 3.151_212_002_153_897).abs() < 1e-13);
        assert!((eisenstein_g(8) - 4.255_773_035_365_189).abs() < 1e-12);
        // G_n → 4 as n grows (the four unit lattice points dominate)
        assert!((eisenstein_g(48) - 4.0).abs() < 1e-6);
    }
}
