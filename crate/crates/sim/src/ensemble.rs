use crate::SimError;
use serde::{Deserialize, Serialize};
use vx_kernel::{KernelSpec, Vec2};

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub positions: Vec<Vec2>,
    circulations: Vec<f64>,
    pub t: f64,
    pub sigma: f64,
    /// root of the per-particle noise streams
    pub seed: u64,
    pub step: u64,
}

impl ParticleEnsemble {
    pub fn new(positions: Vec<Vec2>, circulations: Vec<f64>, sigma: f64, seed: u64) -> Result<Self, SimError> {
        if positions.is_empty() {
            return Err(SimError::Invalid("ensemble needs at least one particle".into()));
        }
        if positions.len() != circulations.len() {
            return Err(SimError::Invalid(format!(
                "{} positions but {} circulations",
                positions.len(),
                circulations.len()
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(SimError::Invalid(format!("sigma must be finite and non-negative, got {sigma}")));
        }
        if !positions.iter().all(|x| x.is_finite()) || !circulations.iter().all(|m| m.is_finite()) {
            return Err(SimError::Invalid("non-finite initial state".into()));
        }
        Ok(ParticleEnsemble { positions, circulations, t: 0.0, sigma, seed, step: 0 })
    }

    pub(crate) fn from_parts(
        positions: Vec<Vec2>,
        circulations: Vec<f64>,
        t: f64,
        sigma: f64,
        seed: u64,
        step: u64,
    ) -> Self {
        ParticleEnsemble { positions, circulations, t, sigma, seed, step }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Circulations are fixed at construction.
    pub fn circulations(&self) -> &[f64] {
        &self.circulations
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum ForceMethod {
    Direct,
    /// Barnes-Hut quadtree; `order` is the highest multipole power kept.
    Tree {
        theta: f64,
        #[serde(default = "default_order")]
        order: usize,
    },
    /// Interaction switched off (pure diffusion).
    Free,
}

fn default_order() -> usize {
    crate::tree::DEFAULT_ORDER
}

impl ForceMethod {
    pub fn tree(theta: f64) -> Self {
        ForceMethod::Tree { theta, order: crate::tree::DEFAULT_ORDER }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub kernel: KernelSpec,
    #[serde(default = "direct")]
    pub force: ForceMethod,
    #[serde(default = "one")]
    pub n_replicas: usize,
    #[serde(default)]
    pub seed: u64,
}

fn direct() -> ForceMethod {
    ForceMethod::Direct
}

fn one() -> usize {
    1
}

impl SimConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        SimConfig { dt, t_final, kernel: KernelSpec::EXACT, force: ForceMethod::Direct, n_replicas: 1, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::Invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.kernel.delta >= 0.0) {
            return Err(SimError::Invalid("kernel delta must be non-negative".into()));
        }
        if let ForceMethod::Tree { theta, order } = self.force {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(SimError::Invalid(format!("tree theta must lie in (0,1], got {theta}")));
            }
            if order > crate::tree::MAX_ORDER {
                return Err(SimError::Invalid(format!("tree order at most {}", crate::tree::MAX_ORDER)));
            }
        }
        if self.n_replicas == 0 {
            return Err(SimError::Invalid("n_replicas must be at least 1".into()));
        }
        Ok(())
    }
}
