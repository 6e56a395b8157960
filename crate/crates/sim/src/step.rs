use crate::force::drift_of;
use crate::{InitialSampler, ParticleEnsemble, SimConfig, SimError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::io::{self, Write};
use vx_kernel::rng::{child_seed, normal_pair};
use vx_kernel::Vec2;

/// Stream reserved for initial-data draws of a replica.
pub(crate) const INIT_STREAM: u64 = u64::MAX;

/// Standard 2D normal assigned to particle `i` at step `step`.
pub fn particle_noise(seed: u64, i: usize, step: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng.set_word_pos(step as u128 * 4);
    normal_pair(&mut rng)
}

pub fn em_step(ens: &ParticleEnsemble, cfg: &SimConfig) -> Result<ParticleEnsemble, SimError> {
    let b = drift_of(&ens.positions, ens.circulations(), cfg.kernel, cfg.force);
    let dt = cfg.dt;
    let amp = (2.0 * ens.sigma * dt).sqrt();
    let (seed, step) = (ens.seed, ens.step);
    let positions: Vec<Vec2> = ens
        .positions
        .par_iter()
        .zip(b.par_iter())
        .enumerate()
        .with_min_len(256)
        .map(|(i, (&x, &bi))| {
            let mut y = x + bi * dt;
            if amp > 0.0 {
                let (g1, g2) = particle_noise(seed, i, step);
                y += Vec2::new(g1, g2) * amp;
            }
            y
        })
        .collect();
    if let Some(index) = positions.iter().position(|x| !x.is_finite()) {
        return Err(SimError::Blowup { index, step: step + 1, t: ens.t + dt });
    }
    Ok(ParticleEnsemble::from_parts(
        positions,
        ens.circulations().to_vec(),
        ens.t + dt,
        ens.sigma,
        seed,
        step + 1,
    ))
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<ParticleEnsemble>,
}

impl Trajectory {
    pub fn last(&self) -> &ParticleEnsemble {
        self.snapshots.last().expect("trajectory always holds a snapshot")
    }
}

pub fn simulate_steps(ens: &ParticleEnsemble, cfg: &SimConfig, n_steps: u64) -> Result<ParticleEnsemble, SimError> {
    let mut cur = ens.clone();
    for _ in 0..n_steps {
        cur = em_step(&cur, cfg)?;
    }
    Ok(cur)
}

/// Steps from `ens0.t` to `cfg.t_final`, keeping snapshots at the steps
/// nearest to `snapshot_times` and always at the end.
pub fn simulate(ens0: &ParticleEnsemble, cfg: &SimConfig, snapshot_times: &[f64]) -> Result<Trajectory, SimError> {
    cfg.validate()?;
    if cfg.t_final < ens0.t {
        return Err(SimError::Invalid(format!("t_final {} precedes start time {}", cfg.t_final, ens0.t)));
    }
    let n_steps = ((cfg.t_final - ens0.t) / cfg.dt).round() as u64;
    let mut marks: Vec<u64> = snapshot_times
        .iter()
        .filter(|&&t| t >= ens0.t && t <= cfg.t_final)
        .map(|&t| ((t - ens0.t) / cfg.dt).round() as u64)
        .chain(std::iter::once(n_steps))
        .collect();
    marks.sort_unstable();
    marks.dedup();
    let mut snapshots = Vec::with_capacity(marks.len());
    let mut cur = ens0.clone();
    let mut done = 0u64;
    for &m in &marks {
        cur = simulate_steps(&cur, cfg, m - done)?;
        done = m;
        snapshots.push(cur.clone());
    }
    Ok(Trajectory { snapshots })
}

/// Independent replicas with seeds `child_seed(cfg.seed, r)`; initial data
/// is drawn jointly in `(m, x)` from the sampler.
pub fn run_ensemble(
    sampler: &dyn InitialSampler,
    n_particles: usize,
    sigma: f64,
    cfg: &SimConfig,
    snapshot_times: &[f64],
) -> Result<Vec<Trajectory>, SimError> {
    cfg.validate()?;
    if n_particles == 0 {
        return Err(SimError::Invalid("n_particles must be at least 1".into()));
    }
    (0..cfg.n_replicas as u64)
        .into_par_iter()
        .map(|r| {
            let seed = child_seed(cfg.seed, r);
            let ens = initial_ensemble(sampler, n_particles, sigma, seed)?;
            simulate(&ens, cfg, snapshot_times)
        })
        .collect()
}

pub(crate) fn initial_ensemble(
    sampler: &dyn InitialSampler,
    n: usize,
    sigma: f64,
    seed: u64,
) -> Result<ParticleEnsemble, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM);
    let (m, x): (Vec<f64>, Vec<Vec2>) = (0..n).map(|_| sampler.draw(&mut rng)).unzip();
    ParticleEnsemble::new(x, m, sigma, seed)
}

/// Snapshot rows `step,t,i,m,x1,x2`.
pub fn write_snapshot_csv<W: Write>(w: &mut W, ens: &ParticleEnsemble, header: bool) -> io::Result<()> {
    if header {
        writeln!(w, "step,t,i,m,x1,x2")?;
    }
    for (i, (x, m)) in ens.positions.iter().zip(ens.circulations()).enumerate() {
        writeln!(w, "{},{},{},{},{},{}", ens.step, ens.t, i, m, x.x1, x.x2)?;
    }
    Ok(())
}
