use crate::{GrowthFunction, HierarchyError};
use std::fmt;
use std::io::{self, Write};
use std::sync::Arc;

/// Source of the `y_k(t)` terms. `Zero` is the default experiment.
#[derive(Clone, Default)]
pub enum Coupling {
    #[default]
    Zero,
    /// `(k, t) -> y_k(t)` with `k` one-based; must be nonnegative.
    Custom(Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Zero => write!(f, "Zero"),
            Coupling::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Coupling {
    fn y(&self, k: usize, t: f64) -> f64 {
        match self {
            Coupling::Zero => 0.0,
            Coupling::Custom(g) => g(k, t),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HierarchyProblem {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    pub growth: GrowthFunction,
    /// `x0[k-1] = x_k(0)`
    pub x0: Vec<f64>,
    pub coupling: Coupling,
}

impl HierarchyProblem {
    pub fn new(n: usize, c1: f64, c2: f64, growth: GrowthFunction, x0: Vec<f64>) -> Self {
        HierarchyProblem { n, c1, c2, growth, x0, coupling: Coupling::Zero }
    }

    /// `x_k(0) = k²/N²`.
    pub fn quadratic_start(n: usize, c1: f64, c2: f64, growth: GrowthFunction) -> Self {
        let nn = (n * n) as f64;
        Self::new(n, c1, c2, growth, (1..=n).map(|k| (k * k) as f64 / nn).collect())
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn validate(&self) -> Result<(), HierarchyError> {
        let mut errs = Vec::new();
        if self.n == 0 {
            errs.push("N must be >= 1".to_string());
        }
        if !(self.c1 > self.c2 && self.c2 >= 0.0 && self.c1.is_finite()) {
            errs.push(format!("need c1 > c2 >= 0, got c1={} c2={}", self.c1, self.c2));
        }
        if !self.growth.is_valid() {
            errs.push(format!("bad growth function {:?}", self.growth));
        }
        if self.x0.len() != self.n {
            errs.push(format!("x0 has {} entries, N = {}", self.x0.len(), self.n));
        }
        if self.x0.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            errs.push("x0 must be finite and nonnegative".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(HierarchyError::Invalid(errs.join("; ")))
        }
    }

    fn rhs(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let h = self.growth.h(t);
        let inv_n2 = 1.0 / (n * n) as f64;
        for k in 1..=n {
            let i = k - 1;
            let kf = k as f64;
            let mut d = -self.c1 * self.coupling.y(k, t) + h * x[i] + kf * kf * inv_n2 * h;
            if k < n {
                d += self.c2 * self.coupling.y(k + 1, t) + kf * h * (x[i + 1] - x[i]);
            }
            out[i] = d;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchySolution {
    pub times: Vec<f64>,
    /// `x[s][k-1]` at `times[s]`
    pub x: Vec<Vec<f64>>,
    pub dt: f64,
    /// relative sup-norm change at each halving, coarsest first
    pub changes: Vec<f64>,
}

/// Classic RK4 with `n_steps` equal steps on the equality form of the system.
pub fn solve_fixed_steps(prob: &HierarchyProblem, t_final: f64, n_steps: usize) -> HierarchySolution {
    let n = prob.n;
    let dt = t_final / n_steps as f64;
    let mut x = prob.x0.clone();
    let mut times = vec![0.0];
    let mut out = vec![x.clone()];
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for s in 0..n_steps {
        let t = s as f64 * dt;
        prob.rhs(t, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        prob.rhs(t + 0.5 * dt, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        prob.rhs(t + 0.5 * dt, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        prob.rhs(t + dt, &tmp, &mut k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        times.push((s + 1) as f64 * dt);
        out.push(x.clone());
    }
    HierarchySolution { times, x: out, dt, changes: Vec::new() }
}

fn relative_change(coarse: &HierarchySolution, fine: &HierarchySolution) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (s, xc) in coarse.x.iter().enumerate() {
        for (a, b) in xc.iter().zip(&fine.x[2 * s]) {
            let d = (a - b).abs();
            diff = if d.is_nan() { f64::INFINITY } else { diff.max(d) };
            scale = scale.max(b.abs());
        }
    }
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(f64::MIN_POSITIVE)
    }
}

pub const REFINE_TOL: f64 = 1e-6;
const INITIAL_DT: f64 = 0.02;
const MAX_LEVELS: usize = 14;

/// Halve the step until the relative sup-norm change over `[0, t_final]` is
/// at most `1e-6`. A change that grows under refinement is refused.
pub fn solve_hierarchy(prob: &HierarchyProblem, t_final: f64) -> Result<HierarchySolution, HierarchyError> {
    prob.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(HierarchyError::Invalid(format!("t_final must be positive, got {t_final}")));
    }
    let mut steps = ((t_final / INITIAL_DT).ceil() as usize).max(1);
    let mut coarse = solve_fixed_steps(prob, t_final, steps);
    let mut changes = Vec::new();
    for level in 0..MAX_LEVELS {
        steps *= 2;
        let fine = solve_fixed_steps(prob, t_final, steps);
        let c = relative_change(&coarse, &fine);
        if let Some(&prev) = changes.last() {
            if prev < f64::INFINITY && c >= prev && c > 0.0 {
                changes.push(c);
                return Err(HierarchyError::Unstable { level, diffs: changes });
            }
        }
        changes.push(c);
        if c <= REFINE_TOL {
            return Ok(HierarchySolution { changes, ..fine });
        }
        coarse = fine;
    }
    Err(HierarchyError::NotConverged { tol: REFINE_TOL, levels: MAX_LEVELS, last: *changes.last().unwrap() })
}

/// `sup_{t,k} x_k(t) N²/(k² e^{5φ(t)})` with its location `(t, k)`.
pub fn envelope_constant(sol: &HierarchySolution, growth: &GrowthFunction) -> (f64, f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0.0, 0);
    for (t, x) in sol.times.iter().zip(&sol.x) {
        let n = x.len() as f64;
        let e = (5.0 * growth.phi(*t)).exp();
        for (i, v) in x.iter().enumerate() {
            let k = (i + 1) as f64;
            let r = v * n * n / (k * k * e);
            if r > best.0 {
                best = (r, *t, i + 1);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeCertificate {
    pub m: f64,
    pub m_half: f64,
    pub relative_change: f64,
    pub stable: bool,
    pub dt: f64,
    pub argmax_t: f64,
    pub argmax_k: usize,
    pub changes: Vec<f64>,
}

/// Envelope constant from the converged run and from one more halving;
/// `stable` when the two agree within 10%.
pub fn certify_envelope(prob: &HierarchyProblem, t_final: f64) -> Result<EnvelopeCertificate, HierarchyError> {
    let sol = solve_hierarchy(prob, t_final)?;
    let (m, argmax_t, argmax_k) = envelope_constant(&sol, &prob.growth);
    let half = solve_fixed_steps(prob, t_final, 2 * (sol.times.len() - 1));
    let (m_half, _, _) = envelope_constant(&half, &prob.growth);
    let relative_change = (m - m_half).abs() / m_half.abs().max(f64::MIN_POSITIVE);
    Ok(EnvelopeCertificate {
        m,
        m_half,
        relative_change,
        stable: m.is_finite() && relative_change <= 0.1,
        dt: sol.dt,
        argmax_t,
        argmax_k,
        changes: sol.changes,
    })
}

/// Rows `t,k,x_k`, keeping every `stride`-th time level.
pub fn write_trajectory_csv<W: Write>(mut w: W, sol: &HierarchySolution, stride: usize) -> io::Result<()> {
    writeln!(w, "t,k,x_k")?;
    let stride = stride.max(1);
    let last = sol.times.len() - 1;
    for (s, (t, x)) in sol.times.iter().zip(&sol.x).enumerate() {
        if s % stride != 0 && s != last {
            continue;
        }
        for (i, v) in x.iter().enumerate() {
            writeln!(w, "{:e},{},{:e}", t, i + 1, v)?;
        }
    }
    Ok(())
}
