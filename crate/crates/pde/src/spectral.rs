use crate::GridSpec;
use rustfft::num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// 2D FFT and wavenumber tables for one grid.
///
/// Spectra use the same row-major layout as physical fields: entry
/// `m1·n + m2` holds the mode `(k1, k2) = (π/L)(m1', m2')` with `m'` the
/// signed index.
#[derive(Clone)]
pub struct Spectral {
    pub grid: GridSpec,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    /// signed wavenumber per 1D index
    pub k: Vec<f64>,
    /// derivative wavenumber per 1D index (Nyquist zeroed)
    pub kd: Vec<f64>,
    /// 2/3-rule keep flag per 1D index
    pub keep: Vec<bool>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

impl Spectral {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let base = std::f64::consts::PI / grid.half_width;
        let signed = |m: usize| if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
        let k: Vec<f64> = (0..n).map(|m| base * signed(m)).collect();
        let kd: Vec<f64> = (0..n).map(|m| if m == n / 2 { 0.0 } else { base * signed(m) }).collect();
        let keep: Vec<bool> = (0..n).map(|m| !grid.dealias || 3.0 * signed(m).abs() <= n as f64).collect();
        Spectral { grid, fwd, inv, k, kd, keep }
    }

    fn transform(&self, data: &mut [C64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n;
        let mut scratch = vec![C64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
        plan.process_with_scratch(data, &mut scratch);
        transpose(data, n);
    }

    pub fn forward(&self, v: &[f64]) -> Vec<C64> {
        let mut d: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        self.transform(&mut d, &self.fwd);
        d
    }

    pub fn forward_complex(&self, mut d: Vec<C64>) -> Vec<C64> {
        self.transform(&mut d, &self.fwd);
        d
    }

    /// Normalized inverse transform, complex result.
    pub fn inverse_complex(&self, mut d: Vec<C64>) -> Vec<C64> {
        self.transform(&mut d, &self.inv);
        let s = 1.0 / self.grid.len() as f64;
        for z in d.iter_mut() {
            *z *= s;
        }
        d
    }

    pub fn inverse(&self, d: Vec<C64>) -> Vec<f64> {
        self.inverse_complex(d).into_iter().map(|z| z.re).collect()
    }

    /// Two real fields from `â + i b̂` where both spectra are Hermitian.
    pub fn inverse_pair(&self, d: Vec<C64>) -> (Vec<f64>, Vec<f64>) {
        let z = self.inverse_complex(d);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    #[inline]
    pub fn k2(&self, idx: usize) -> f64 {
        let n = self.grid.n;
        let (a, b) = (self.k[idx / n], self.k[idx % n]);
        a * a + b * b
    }

    #[inline]
    pub fn kept(&self, idx: usize) -> bool {
        let n = self.grid.n;
        self.keep[idx / n] && self.keep[idx % n]
    }

    /// Spectral gradient `(∂1 v, ∂2 v)`.
    pub fn gradient(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.grid.n;
        let vh = self.forward(v);
        let d: Vec<C64> = vh
            .iter()
            .enumerate()
            .map(|(idx, &w)| {
                let (k1, k2) = (self.kd[idx / n], self.kd[idx % n]);
                // i k1 w + i (i k2 w)
                C64::new(0.0, k1) * w - k2 * w
            })
            .collect();
        self.inverse_pair(d)
    }

    /// Spectral Hessian `(∂11 v, ∂12 v, ∂22 v)`.
    pub fn hessian(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.n;
        let vh = self.forward(v);
        let mut a = Vec::with_capacity(vh.len());
        let mut b = Vec::with_capacity(vh.len());
        for (idx, &w) in vh.iter().enumerate() {
            let (k1, k2) = (self.k[idx / n], self.k[idx % n]);
            let (d1, d2) = (self.kd[idx / n], self.kd[idx % n]);
            a.push(-(k1 * k1) * w - C64::new(0.0, k2 * k2) * w);
            b.push(-(d1 * d2) * w);
        }
        let (v11, v22) = self.inverse_pair(a);
        (v11, self.inverse(b), v22)
    }

    /// Applies the heat semigroup `e^{sΔ}` to `v`.
    pub fn heat(&self, v: &[f64], s: f64) -> Vec<f64> {
        let mut vh = self.forward(v);
        for (idx, w) in vh.iter_mut().enumerate() {
            *w *= (-s * self.k2(idx)).exp();
        }
        self.inverse(vh)
    }
}

fn transpose(d: &mut [C64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            d.swap(i * n + j, j * n + i);
        }
    }
}
