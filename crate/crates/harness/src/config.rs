use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};
use vx_kernel::V_SUP;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Convergence,
    LambOseen,
    HierarchyCert,
    Regularity,
    Concentration,
    /// particle ensembles only, no comparison
    Simulate,
}

impl StudyKind {
    pub fn name(self) -> &'static str {
        match self {
            StudyKind::Convergence => "convergence",
            StudyKind::LambOseen => "lamb_oseen",
            StudyKind::HierarchyCert => "hierarchy_cert",
            StudyKind::Regularity => "regularity",
            StudyKind::Concentration => "concentration",
            StudyKind::Simulate => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Default,
    /// enforces σ > √2·A·‖V‖∞
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    Constant,
    Uniform,
    #[default]
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Force {
    #[default]
    Direct,
    Tree,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    /// counter-rotating blobs at ±d·e1, circulation ±A
    #[default]
    Dipole,
    /// circulation from `law`, positions N(0, std²)
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub sigma: f64,
    /// circulation bound
    pub a: f64,
    pub law: Law,
    pub preset: Preset,
    pub t_eval: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics { sigma: 0.5, a: 1.0, law: Law::TwoPoint, preset: Preset::Default, t_eval: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub half_width: f64,
    pub n: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { half_width: 8.0, n: 128 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Particles {
    pub n_list: Vec<usize>,
    pub replicas: usize,
    pub dt: f64,
    pub force: Force,
    pub theta: f64,
    pub initial: Initial,
    pub std: f64,
    pub separation: f64,
    /// smoothing length of the empirical vorticity
    pub bandwidth: f64,
    /// marginal order, 1 or 2
    pub k: usize,
    /// step of the limit PDE
    pub pde_dt: f64,
    /// pass requires the fitted log-log slope of the L¹ error to be at most this
    pub slope_max: f64,
}

impl Default for Particles {
    fn default() -> Self {
        Particles {
            n_list: vec![1024, 4096],
            replicas: 8,
            dt: 0.01,
            force: Force::Direct,
            theta: 0.5,
            initial: Initial::Dipole,
            std: 0.5,
            separation: 1.0,
            bandwidth: 0.25,
            k: 1,
            pde_dt: 0.01,
            slope_max: -0.35,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LambOseen {
    pub gamma: f64,
    pub t0: f64,
    pub t_final: f64,
    pub dt: f64,
    /// number of rows in the error table
    pub checkpoints: usize,
    pub tolerance: f64,
}

impl Default for LambOseen {
    fn default() -> Self {
        LambOseen { gamma: 1.0, t0: 1.0, t_final: 1.0, dt: 0.01, checkpoints: 4, tolerance: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hierarchy {
    pub n: usize,
    pub c1: f64,
    pub c2: f64,
    /// constant of the paper_log growth function
    pub growth_c: f64,
    pub t_final: f64,
    /// keep every `stride`-th step in the trajectory CSV
    pub stride: usize,
}

impl Default for Hierarchy {
    fn default() -> Self {
        Hierarchy { n: 64, c1: 1.0, c2: 0.3, growth_c: 1.0, t_final: 5.0, stride: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Regularity {
    pub half_width: f64,
    pub n: usize,
    /// viscosity of the Lamb-Oseen runs
    pub sigma: f64,
    pub t0: f64,
    pub times: Vec<f64>,
    /// age of the nearly point-like vortex used for the velocity decay run
    pub kato_t0: f64,
    pub log_times: Vec<f64>,
    pub dt_max: f64,
    pub c0: f64,
    /// heat-flow run for the auxiliary function: viscosity, initial
    /// diffusion time σ·t (variance 2·aux_s0), constants
    pub aux_sigma: f64,
    pub aux_s0: f64,
    pub aux_times: Vec<f64>,
    pub aux_c: f64,
    pub aux_c1_margin: f64,
}

impl Default for Regularity {
    fn default() -> Self {
        Regularity {
            half_width: 16.0,
            n: 256,
            sigma: 0.125,
            t0: 1.0,
            times: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            kato_t0: 0.05,
            log_times: vec![1.0, 2.0, 4.0, 8.0],
            dt_max: 0.25,
            c0: 4.0,
            aux_sigma: 1.0,
            aux_s0: 0.05,
            aux_times: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            aux_c: 25.0,
            aux_c1_margin: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Concentration {
    pub phi_sup: f64,
    pub n_list: Vec<usize>,
    pub n_mc: usize,
    /// also run the non-cancelling control
    pub positive_control: bool,
}

impl Default for Concentration {
    fn default() -> Self {
        Concentration { phi_sup: 0.1, n_list: vec![10, 100, 1000], n_mc: 100_000, positive_control: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub study: StudyKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub physics: Physics,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub particles: Particles,
    #[serde(default)]
    pub lamb_oseen: LambOseen,
    #[serde(default)]
    pub hierarchy: Hierarchy,
    #[serde(default)]
    pub regularity: Regularity,
    #[serde(default)]
    pub concentration: Concentration,
}

/// One failed constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub constraint: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.constraint, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{} constraint violation(s):\n{}", .0.len(), .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
}

impl ExperimentConfig {
    pub fn minimal(study: StudyKind) -> Self {
        ExperimentConfig {
            study,
            seed: 0,
            out: None,
            physics: Physics::default(),
            grid: Grid::default(),
            particles: Particles::default(),
            lamb_oseen: LambOseen::default(),
            hierarchy: Hierarchy::default(),
            regularity: Regularity::default(),
            concentration: Concentration::default(),
        }
    }

    /// Every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut need = |ok: bool, constraint: &'static str, message: String| {
            if !ok {
                v.push(Violation { constraint, message });
            }
        };
        let p = &self.physics;
        need(p.sigma > 0.0 && p.sigma.is_finite(), "sigma>0", format!("physics.sigma must be positive, got {}", p.sigma));
        need(p.a > 0.0 && p.a.is_finite(), "A>0", format!("physics.a must be positive, got {}", p.a));
        need(p.t_eval > 0.0, "t_eval>0", format!("physics.t_eval must be positive, got {}", p.t_eval));
        if self.study == StudyKind::HierarchyCert && p.preset == Preset::Sharp {
            let min = std::f64::consts::SQRT_2 * p.a * V_SUP;
            need(
                p.sigma > min,
                "sigma>sqrt2*A*Vsup",
                format!("sharp preset needs σ > √2·A·‖V‖∞ = √2·{}/4 ≈ {min:.4}, got σ = {}", p.a, p.sigma),
            );
        }
        let g = &self.grid;
        need(g.n >= 32 && g.n.is_power_of_two(), "grid.n", format!("grid.n must be a power of two ≥ 32, got {}", g.n));
        need(g.half_width > 0.0, "grid.half_width>0", format!("grid.half_width must be positive, got {}", g.half_width));
        match self.study {
            StudyKind::Convergence | StudyKind::Simulate => {
                let q = &self.particles;
                need(!q.n_list.is_empty() && q.n_list.iter().all(|&n| n > 0), "n_list", "particles.n_list must be non-empty and positive".into());
                need(q.n_list.windows(2).all(|w| w[0] < w[1]), "n_list increasing", "particles.n_list must increase".into());
                need(q.dt > 0.0 && q.dt <= p.t_eval, "dt", format!("particles.dt must lie in (0, t_eval], got {}", q.dt));
                need(q.pde_dt > 0.0, "pde_dt>0", "particles.pde_dt must be positive".into());
                need(q.std > 0.0, "std>0", "particles.std must be positive".into());
                need(q.bandwidth > 0.0, "bandwidth>0", "particles.bandwidth must be positive".into());
                need(q.theta > 0.0 && q.theta <= 1.0, "theta", format!("particles.theta must lie in (0, 1], got {}", q.theta));
                need(q.k == 1 || q.k == 2, "k", format!("particles.k must be 1 or 2, got {}", q.k));
                let min_reps = if self.study == StudyKind::Convergence { 2 } else { 1 };
                need(q.replicas >= min_reps, "replicas", format!("particles.replicas must be ≥ {min_reps}, got {}", q.replicas));
            }
            StudyKind::LambOseen => {
                let l = &self.lamb_oseen;
                need(l.t0 > 0.0, "t0>0", "lamb_oseen.t0 must be positive".into());
                need(l.t_final > 0.0, "t_final>0", "lamb_oseen.t_final must be positive".into());
                need(l.dt > 0.0, "dt>0", "lamb_oseen.dt must be positive".into());
                need(l.checkpoints >= 1, "checkpoints", "lamb_oseen.checkpoints must be ≥ 1".into());
                need(l.tolerance > 0.0, "tolerance>0", "lamb_oseen.tolerance must be positive".into());
            }
            StudyKind::HierarchyCert => {
                let h = &self.hierarchy;
                need(h.n >= 1, "hierarchy.n", "hierarchy.n must be ≥ 1".into());
                need(h.c1 >= 0.0 && h.c2 >= 0.0, "c1,c2≥0", "hierarchy.c1 and c2 must be non-negative".into());
                need(h.growth_c > 0.0, "growth_c>0", "hierarchy.growth_c must be positive".into());
                need(h.t_final > 0.0, "t_final>0", "hierarchy.t_final must be positive".into());
            }
            StudyKind::Regularity => {
                let r = &self.regularity;
                need(r.n >= 32 && r.n.is_power_of_two(), "regularity.n", format!("regularity.n must be a power of two ≥ 32, got {}", r.n));
                need(r.sigma > 0.0 && r.aux_sigma > 0.0, "sigma>0", "regularity.sigma and aux_sigma must be positive".into());
                need(r.t0 > 0.0 && r.kato_t0 > 0.0 && r.aux_s0 > 0.0, "ages>0", "regularity.t0, kato_t0 and aux_s0 must be positive".into());
                need(r.times.windows(2).all(|w| w[0] < w[1]) && r.times.len() >= 2, "times", "regularity.times must increase".into());
                need(r.times.first().is_some_and(|&t| t >= 1.0), "times≥1", "regularity.times must start at t ≥ 1".into());
                need(r.log_times.iter().all(|t| r.times.contains(t)), "log_times⊂times", "regularity.log_times must be a subset of times".into());
                need(r.aux_times.windows(2).all(|w| w[0] < w[1]) && r.aux_times.first() == Some(&0.0), "aux_times", "regularity.aux_times must increase from 0".into());
            }
            StudyKind::Concentration => {
                let c = &self.concentration;
                need(c.phi_sup > 0.0, "phi_sup>0", "concentration.phi_sup must be positive".into());
                need(c.n_list.len() >= 2 && c.n_list.iter().all(|&n| n >= 2), "n_list", "concentration.n_list needs ≥ 2 entries, each ≥ 2".into());
                need(c.n_mc >= 2, "n_mc", "concentration.n_mc must be ≥ 2".into());
            }
        }
        v
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| {
                    let before = &text[..s.start.min(text.len())];
                    (before.matches('\n').count() + 1, before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1)
                })
                .unwrap_or((0, 0));
            ConfigError::Parse { line, column, message: e.message().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical TOML with every default filled in.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    ExperimentConfig::parse(&text)
}
