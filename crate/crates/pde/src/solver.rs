use crate::{FreeSpaceCorrection, GridSpec, PdeError, Spectral, VorticityField};
use rustfft::num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Largest accepted `dt·max(|u1|+|u2|)/h`.
pub const CFL_MAX: f64 = 0.8;
/// Largest accepted fraction of `∫|ω|` in the outer 10% frame.
pub const TRUNCATION_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityMode {
    /// whole-plane Biot-Savart law (periodic inversion + image correction)
    #[default]
    FreeSpace,
    /// velocity of the periodized field, `û = i k⊥ ω̂/|k|²`, `û(0) = 0`
    Periodic,
}

#[derive(Debug, Clone)]
pub struct PdeSolver {
    pub spectral: Spectral,
    pub sigma: f64,
    pub mode: VelocityMode,
    /// abort when the outer-frame fraction exceeds the limit
    pub monitor_truncation: bool,
}

pub(crate) struct Stage {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl PdeSolver {
    pub fn new(grid: GridSpec, sigma: f64, mode: VelocityMode) -> Result<Self, PdeError> {
        grid.validate()?;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(PdeError::Invalid(format!("sigma must be non-negative, got {sigma}")));
        }
        Ok(PdeSolver { spectral: Spectral::new(grid), sigma, mode, monitor_truncation: true })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.spectral.grid
    }

    fn check_grid(&self, g: &GridSpec) -> Result<(), PdeError> {
        if g != self.grid() {
            return Err(PdeError::GridMismatch(format!("{g:?} vs solver {:?}", self.grid())));
        }
        Ok(())
    }

    /// Velocity from a vorticity spectrum.
    pub(crate) fn velocity_hat(&self, wh: &[C64]) -> Stage {
        let sp = &self.spectral;
        let n = sp.grid.n;
        let mut uh = Vec::with_capacity(wh.len());
        for (idx, &w) in wh.iter().enumerate() {
            let k2 = sp.k2(idx);
            if k2 == 0.0 {
                uh.push(C64::new(0.0, 0.0));
                continue;
            }
            let (k1, kk2) = (sp.kd[idx / n], sp.kd[idx % n]);
            // û1 = i k2 ω̂/k², û2 = -i k1 ω̂/k²; pack û1 + i û2
            let u1 = C64::new(0.0, kk2 / k2) * w;
            let u2 = C64::new(0.0, -k1 / k2) * w;
            uh.push(u1 + C64::new(0.0, 1.0) * u2);
        }
        let (mut u1, mut u2) = sp.inverse_pair(uh);
        if self.mode == VelocityMode::FreeSpace {
            let omega = sp.inverse(wh.to_vec());
            let corr = FreeSpaceCorrection::new(&sp.grid, &omega);
            for idx in 0..u1.len() {
                let (a, b) = sp.grid.point(idx);
                let (c1, c2) = corr.velocity(a, b);
                u1[idx] += c1;
                u2[idx] += c2;
            }
        }
        Stage { u1, u2 }
    }

    /// `u = K∗ω` on the grid.
    pub fn velocity(&self, field: &VorticityField) -> Result<(Vec<f64>, Vec<f64>), PdeError> {
        self.check_grid(&field.grid)?;
        let s = self.velocity_hat(&self.spectral.forward(&field.values));
        Ok((s.u1, s.u2))
    }

    /// `[∂1u1, ∂2u1, ∂1u2, ∂2u2]` on the grid.
    pub fn velocity_gradient(&self, field: &VorticityField) -> Result<[Vec<f64>; 4], PdeError> {
        self.check_grid(&field.grid)?;
        let sp = &self.spectral;
        let n = sp.grid.n;
        let wh = sp.forward(&field.values);
        let mut a = Vec::with_capacity(wh.len());
        let mut b = Vec::with_capacity(wh.len());
        for (idx, &w) in wh.iter().enumerate() {
            let k2 = sp.k2(idx);
            if k2 == 0.0 {
                a.push(C64::new(0.0, 0.0));
                b.push(C64::new(0.0, 0.0));
                continue;
            }
            let (k1, kk2) = (sp.kd[idx / n], sp.kd[idx % n]);
            // ∂j û1 = i kj · i k2 ω̂/k² = -kj k2 ω̂/k², ∂j û2 = kj k1 ω̂/k²
            let d1u1 = -(k1 * kk2 / k2) * w;
            let d2u1 = -(kk2 * kk2 / k2) * w;
            let d1u2 = (k1 * k1 / k2) * w;
            let d2u2 = (kk2 * k1 / k2) * w;
            a.push(d1u1 + C64::new(0.0, 1.0) * d2u1);
            b.push(d1u2 + C64::new(0.0, 1.0) * d2u2);
        }
        let (mut g11, mut g12) = sp.inverse_pair(a);
        let (mut g21, mut g22) = sp.inverse_pair(b);
        if self.mode == VelocityMode::FreeSpace {
            let corr = FreeSpaceCorrection::new(&sp.grid, &field.values);
            for idx in 0..g11.len() {
                let (x1, x2) = sp.grid.point(idx);
                let c = corr.gradient(x1, x2);
                g11[idx] += c[0];
                g12[idx] += c[1];
                g21[idx] += c[2];
                g22[idx] += c[3];
            }
        }
        Ok([g11, g12, g21, g22])
    }

    /// Dealiased `-FFT(u·∇f)` for each transported spectrum, with the zero mode
    /// pinned to 0.
    pub(crate) fn advection(&self, u: &Stage, fh: &[C64]) -> Vec<C64> {
        let sp = &self.spectral;
        let n = sp.grid.n;
        let mut gh = Vec::with_capacity(fh.len());
        for (idx, &w) in fh.iter().enumerate() {
            if !sp.kept(idx) {
                gh.push(C64::new(0.0, 0.0));
                continue;
            }
            let (k1, k2) = (sp.kd[idx / n], sp.kd[idx % n]);
            gh.push(C64::new(0.0, k1) * w - k2 * w);
        }
        let (f1, f2) = sp.inverse_pair(gh);
        let prod: Vec<f64> = (0..f1.len()).map(|i| u.u1[i] * f1[i] + u.u2[i] * f2[i]).collect();
        let mut out = sp.forward(&prod);
        for (idx, z) in out.iter_mut().enumerate() {
            *z = if sp.kept(idx) { -*z } else { C64::new(0.0, 0.0) };
        }
        out[0] = C64::new(0.0, 0.0);
        out
    }

    pub(crate) fn max_speed_sum(u: &Stage) -> f64 {
        u.u1.iter().zip(&u.u2).fold(0.0, |m, (a, b)| m.max(a.abs() + b.abs()))
    }

    pub(crate) fn cfl(&self, u: &Stage, dt: f64) -> Result<(), PdeError> {
        let h = self.grid().h();
        let s = Self::max_speed_sum(u);
        let courant = dt * s / h;
        if courant > CFL_MAX {
            return Err(PdeError::Cfl { dt, courant, suggested: 0.9 * CFL_MAX * h / s });
        }
        Ok(())
    }

    pub(crate) fn factors(&self, dt: f64) -> (Vec<f64>, Vec<f64>) {
        let sp = &self.spectral;
        let e: Vec<f64> = (0..sp.grid.len()).map(|i| (-self.sigma * sp.k2(i) * dt).exp()).collect();
        let eh: Vec<f64> = (0..sp.grid.len()).map(|i| (-self.sigma * sp.k2(i) * dt * 0.5).exp()).collect();
        (e, eh)
    }

    /// One integrating-factor RK4 step of the vorticity equation.
    pub fn step_vorticity(&self, field: &VorticityField, dt: f64) -> Result<VorticityField, PdeError> {
        let mut out = self.step_many(field, &[], dt)?;
        let f = out.remove(0).into_field(field, dt, self);
        self.finish(f)
    }

    pub(crate) fn finish(&self, f: VorticityField) -> Result<VorticityField, PdeError> {
        if f.values.iter().any(|v| !v.is_finite()) {
            return Err(PdeError::NonFinite(f.t));
        }
        if self.monitor_truncation {
            let fraction = f.grid.outer_fraction(&f.values);
            if fraction > TRUNCATION_LIMIT {
                return Err(PdeError::Truncation { fraction, t: f.t });
            }
        }
        Ok(f)
    }

    /// RK4 for ω together with passive fields driven by the velocity of ω at
    /// every stage. Returns spectra of ω followed by the passive fields.
    pub(crate) fn step_many(
        &self,
        field: &VorticityField,
        passive: &[&[f64]],
        dt: f64,
    ) -> Result<Vec<Spec>, PdeError> {
        self.check_grid(&field.grid)?;
        if !(dt > 0.0) {
            return Err(PdeError::Invalid(format!("dt must be positive, got {dt}")));
        }
        // the image correction assumes ω is concentrated inside the box
        if self.monitor_truncation {
            let fraction = field.grid.outer_fraction(&field.values);
            if fraction > TRUNCATION_LIMIT {
                return Err(PdeError::Truncation { fraction, t: field.t });
            }
        }
        let sp = &self.spectral;
        let (e, eh) = self.factors(dt);
        let mut y0: Vec<Vec<C64>> = vec![sp.forward(&field.values)];
        y0.extend(passive.iter().map(|p| sp.forward(p)));

        let rhs = |y: &[Vec<C64>], check: bool| -> Result<Vec<Vec<C64>>, PdeError> {
            let u = self.velocity_hat(&y[0]);
            if check {
                self.cfl(&u, dt)?;
            }
            Ok(y.iter().map(|f| scale(&self.advection(&u, f), dt)).collect())
        };
        let a = rhs(&y0, true)?;
        let y1: Vec<Vec<C64>> = y0.iter().zip(&a).map(|(y, a)| mul(&eh, &axpy(y, a, 0.5))).collect();
        let b = rhs(&y1, false)?;
        let y2: Vec<Vec<C64>> = y0.iter().zip(&b).map(|(y, b)| axpy(&mul(&eh, y), b, 0.5)).collect();
        let c = rhs(&y2, false)?;
        let y3: Vec<Vec<C64>> = y0.iter().zip(&c).map(|(y, c)| add(&mul(&e, y), &mul(&eh, c))).collect();
        let d = rhs(&y3, false)?;
        let mut out = Vec::with_capacity(y0.len());
        for q in 0..y0.len() {
            let mut r = Vec::with_capacity(y0[q].len());
            for i in 0..y0[q].len() {
                let s = e[i] * a[q][i] + 2.0 * eh[i] * (b[q][i] + c[q][i]) + d[q][i];
                r.push(e[i] * y0[q][i] + s / 6.0);
            }
            out.push(Spec(r));
        }
        Ok(out)
    }

    /// Steps until `t_end` with the largest uniform step ≤ `dt_max`.
    pub fn advance(&self, field: &VorticityField, t_end: f64, dt_max: f64) -> Result<VorticityField, PdeError> {
        let span = t_end - field.t;
        if span < 0.0 {
            return Err(PdeError::Invalid(format!("t_end {t_end} precedes field time {}", field.t)));
        }
        if span == 0.0 {
            return Ok(field.clone());
        }
        let steps = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let mut f = field.clone();
        for s in 0..steps {
            f = self.step_vorticity(&f, dt)?;
            f.t = field.t + (s + 1) as f64 * dt;
        }
        Ok(f)
    }

    /// Exact heat flow `e^{σ(t_end - t)Δ}` of the field (no advection).
    pub fn heat_flow(&self, field: &VorticityField, t_end: f64) -> Result<VorticityField, PdeError> {
        self.check_grid(&field.grid)?;
        let values = self.spectral.heat(&field.values, self.sigma * (t_end - field.t));
        Ok(VorticityField { grid: field.grid, t: t_end, values })
    }
}

pub(crate) struct Spec(pub Vec<C64>);

impl Spec {
    pub(crate) fn into_field(self, prev: &VorticityField, dt: f64, s: &PdeSolver) -> VorticityField {
        VorticityField { grid: prev.grid, t: prev.t + dt, values: s.spectral.inverse(self.0) }
    }

    pub(crate) fn into_values(self, s: &PdeSolver) -> Vec<f64> {
        s.spectral.inverse(self.0)
    }
}

fn scale(v: &[C64], s: f64) -> Vec<C64> {
    v.iter().map(|z| z * s).collect()
}

fn mul(f: &[f64], v: &[C64]) -> Vec<C64> {
    f.iter().zip(v).map(|(a, z)| z * a).collect()
}

fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn axpy(y: &[C64], x: &[C64], s: f64) -> Vec<C64> {
    y.iter().zip(x).map(|(a, b)| a + b * s).collect()
}
