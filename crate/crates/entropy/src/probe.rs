use crate::EntropyError;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use vx_kernel::rng::child_seed;
use vx_sim::InitialSampler;

/// `1600² + 36e⁴`
pub const C_JW: f64 = 1600.0 * 1600.0 + 36.0 * 54.598_150_033_144_236;

/// Precondition tolerance on the Monte-Carlo cancellation residual.
pub const CANCELLATION_TOL: f64 = 1e-2;

/// A point `z = (m, x1, x2)`.
pub type Z = [f64; 3];

pub type ZFn = Arc<dyn Fn(&Z) -> f64 + Send + Sync>;
pub type ZZFn = Arc<dyn Fn(&Z, &Z) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum TestFunction {
    /// `φ(z, w) = a(z) b(w)`; `sup_b = sup |b|`
    Separable { a: ZFn, b: ZFn, sup_b: f64 },
    General(ZZFn),
}

impl TestFunction {
    pub fn eval(&self, z: &Z, w: &Z) -> f64 {
        match self {
            TestFunction::Separable { a, b, .. } => a(z) * b(w),
            TestFunction::General(f) => f(z, w),
        }
    }

    /// `φ ↦ s·φ`
    pub fn scaled(&self, s: f64) -> TestFunction {
        match self {
            TestFunction::Separable { a, b, sup_b } => {
                let b = b.clone();
                TestFunction::Separable { a: a.clone(), b: Arc::new(move |w| s * b(w)), sup_b: s.abs() * sup_b }
            }
            TestFunction::General(f) => {
                let f = f.clone();
                TestFunction::General(Arc::new(move |z, w| s * f(z, w)))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CancellationMode {
    /// `∫ φ(z, w) ρ̄(w) dw = 0`; statistic `(1/N) Σ_{j,k} φ(z1,zj) φ(z1,zk)`
    OneSided,
    /// both marginal integrals vanish; statistic `(1/N) Σ_{i,j} φ(zi,zj)`
    TwoSided,
}

#[derive(Clone)]
pub struct ConcentrationProbe {
    pub phi: TestFunction,
    pub mode: CancellationMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    /// `log E exp(S_N)`
    pub log_moment: f64,
    pub stderr: f64,
    pub n_mc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub cancellation_residual: f64,
    pub gamma_estimate: f64,
}

impl ProbeReport {
    /// No estimate exceeds an earlier one by more than `z` combined standard errors.
    pub fn no_growth(&self, z: f64) -> bool {
        self.rows.iter().enumerate().all(|(i, a)| {
            self.rows[i + 1..].iter().all(|b| b.log_moment - a.log_moment <= z * (a.stderr.hypot(b.stderr)))
        })
    }
}

fn to_z(s: (f64, vx_kernel::Vec2)) -> Z {
    [s.0, s.1.x1, s.1.x2]
}

fn draw(sampler: &dyn InitialSampler, n: usize, seed: u64, stream: u64) -> Vec<Z> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| to_z(sampler.draw(&mut rng))).collect()
}

/// Largest sampled `|∫ φ(z,·) ρ̄|` over 32 probe points `z` (and, for the
/// two-sided mode, `|∫ φ(·,w) ρ̄|` over 32 points `w`), each integral averaged
/// over `n_samples` draws.
pub fn cancellation_residual(probe: &ConcentrationProbe, sampler: &dyn InitialSampler, n_samples: usize, seed: u64) -> f64 {
    let pts = draw(sampler, 32, seed, 1);
    let cloud = draw(sampler, n_samples, seed, 2);
    let mut r = 0.0f64;
    for p in &pts {
        let m = cloud.iter().map(|w| probe.phi.eval(p, w)).sum::<f64>() / n_samples as f64;
        r = r.max(m.abs());
        if probe.mode == CancellationMode::TwoSided {
            let m = cloud.iter().map(|z| probe.phi.eval(z, p)).sum::<f64>() / n_samples as f64;
            r = r.max(m.abs());
        }
    }
    r
}

/// `C_JW (max_{1≤p≤20} ‖sup_w |φ(·,w)|‖_{L^p(ρ̄)} / p)²` by Monte Carlo; the
/// sup over `w` is exact for separable φ and a sample maximum otherwise.
pub fn gamma_estimate(phi: &TestFunction, sampler: &dyn InitialSampler, n_samples: usize, seed: u64) -> f64 {
    let zs = draw(sampler, n_samples, seed, 3);
    let sup_w: Vec<f64> = match phi {
        TestFunction::Separable { a, sup_b, .. } => zs.iter().map(|z| a(z).abs() * sup_b).collect(),
        TestFunction::General(f) => {
            let ws = &zs[..zs.len().min(512)];
            zs.iter().map(|z| ws.iter().map(|w| f(z, w).abs()).fold(0.0, f64::max)).collect()
        }
    };
    let mut best = 0.0f64;
    for p in 1..=20 {
        let m = sup_w.iter().map(|v| v.powi(p)).sum::<f64>() / zs.len() as f64;
        best = best.max(m.powf(1.0 / p as f64) / p as f64);
    }
    C_JW * best * best
}

fn statistic(probe: &ConcentrationProbe, zs: &[Z]) -> f64 {
    let n = zs.len() as f64;
    match (&probe.phi, probe.mode) {
        (TestFunction::Separable { a, b, .. }, CancellationMode::OneSided) => {
            let s: f64 = zs.iter().map(|w| b(w)).sum();
            let a1 = a(&zs[0]);
            a1 * a1 * s * s / n
        }
        (TestFunction::Separable { a, b, .. }, CancellationMode::TwoSided) => {
            let sa: f64 = zs.iter().map(|z| a(z)).sum();
            let sb: f64 = zs.iter().map(|w| b(w)).sum();
            sa * sb / n
        }
        (TestFunction::General(f), CancellationMode::OneSided) => {
            let s: f64 = zs.iter().map(|w| f(&zs[0], w)).sum();
            s * s / n
        }
        (TestFunction::General(f), CancellationMode::TwoSided) => {
            zs.iter().map(|z| zs.iter().map(|w| f(z, w)).sum::<f64>()).sum::<f64>() / n
        }
    }
}

const BLOCK: usize = 1000;

fn moment(probe: &ConcentrationProbe, sampler: &dyn InitialSampler, n: usize, n_mc: usize, seed: u64) -> ProbeRow {
    let blocks = n_mc.div_ceil(BLOCK);
    let s: Vec<f64> = (0..blocks)
        .into_par_iter()
        .flat_map_iter(|bk| {
            let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, n as u64));
            rng.set_stream(bk as u64);
            let count = BLOCK.min(n_mc - bk * BLOCK);
            let mut out = Vec::with_capacity(count);
            let mut zs = Vec::with_capacity(n);
            for _ in 0..count {
                zs.clear();
                zs.extend((0..n).map(|_| to_z(sampler.draw(&mut rng))));
                out.push(statistic(probe, &zs));
            }
            out
        })
        .collect();
    let top = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = s.iter().map(|v| (v - top).exp()).collect();
    let m = e.iter().sum::<f64>() / n_mc as f64;
    let var = e.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n_mc as f64 - 1.0);
    ProbeRow { n, log_moment: top + m.ln(), stderr: (var / n_mc as f64).sqrt() / m, n_mc }
}

/// Monte-Carlo `log E_{ρ̄^{⊗N}} exp(S_N)` for each `N`, after checking the
/// cancellation precondition on `ρ̄`.
pub fn exp_moment_probe(
    probe: &ConcentrationProbe,
    sampler: &dyn InitialSampler,
    n_list: &[usize],
    n_mc: usize,
    seed: u64,
) -> Result<ProbeReport, EntropyError> {
    run(probe, sampler, n_list, n_mc, seed, true)
}

/// The same estimates with the precondition only measured (positive controls).
pub fn exp_moment_probe_unchecked(
    probe: &ConcentrationProbe,
    sampler: &dyn InitialSampler,
    n_list: &[usize],
    n_mc: usize,
    seed: u64,
) -> Result<ProbeReport, EntropyError> {
    run(probe, sampler, n_list, n_mc, seed, false)
}

fn run(
    probe: &ConcentrationProbe,
    sampler: &dyn InitialSampler,
    n_list: &[usize],
    n_mc: usize,
    seed: u64,
    check: bool,
) -> Result<ProbeReport, EntropyError> {
    if n_mc < 2 || n_list.is_empty() || n_list.contains(&0) {
        return Err(EntropyError::Invalid("need n_mc >= 2 and nonempty N list without zeros".into()));
    }
    let residual = cancellation_residual(probe, sampler, 20_000, seed ^ 0x5eed);
    if check && residual > CANCELLATION_TOL {
        return Err(EntropyError::CancellationFailed { residual, tol: CANCELLATION_TOL });
    }
    let rows = n_list.iter().map(|&n| moment(probe, sampler, n, n_mc, seed)).collect();
    let gamma = gamma_estimate(&probe.phi, sampler, 20_000, seed ^ 0x9a77a);
    Ok(ProbeReport { rows, cancellation_residual: residual, gamma_estimate: gamma })
}
