use crate::{fisher_information, kde_weighted, relative_entropy, total_variation, Axis, EntropyError, Grid, GriddedDensity};
use serde::{Deserialize, Serialize};
use std::io::{self, Write};
use vx_kernel::{CirculationLaw, Vec2};
use vx_pde::{ConditionalDensitySet, GridSpec, PdeSolver, Spectral, VelocityMode, VorticityField};
use vx_sim::{run_ensemble, ForceMethod, InitialSampler, SimConfig};

/// Limit objects at the evaluation time on the solver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSolution {
    pub omega: VorticityField,
    /// position density `Σ_q w_q f^{m_q}`
    pub density: Vec<f64>,
}

fn gaussian(grid: GridSpec, mean: Vec2, std: f64) -> Vec<f64> {
    let v = std * std;
    let c = 1.0 / (2.0 * std::f64::consts::PI * v);
    grid.sample(|a, b| c * (-((a - mean.x1).powi(2) + (b - mean.x2).powi(2)) / (2.0 * v)).exp())
}

/// Conditional densities of the counter-rotating pair of blobs.
pub fn dipole_conditionals(a: f64, d: f64, std: f64, grid: GridSpec) -> ConditionalDensitySet {
    let f = vec![gaussian(grid, Vec2::new(d, 0.0), std), gaussian(grid, Vec2::new(-d, 0.0), std)];
    ConditionalDensitySet::new(vec![a, -a], vec![0.5, 0.5], f, 0.0).expect("two nodes")
}

/// Conditional densities when `M` is independent of a Gaussian position.
pub fn product_conditionals(law: &CirculationLaw, mean: Vec2, std: f64, q: usize, grid: GridSpec) -> ConditionalDensitySet {
    let (nodes, weights) = law.quadrature(q);
    let g = gaussian(grid, mean, std);
    let f = vec![g; nodes.len()];
    ConditionalDensitySet::new(nodes, weights, f, 0.0).expect("matching lengths")
}

fn position_density(set: &ConditionalDensitySet, n: usize) -> Vec<f64> {
    let mut d = vec![0.0; n];
    for (w, f) in set.weights.iter().zip(&set.densities) {
        for (a, b) in d.iter_mut().zip(f) {
            *a += w * b;
        }
    }
    d
}

/// Evolves the conditional family and vorticity to `t_eval`. With
/// `interacting = false` both only diffuse.
pub fn limit_solution(
    set0: &ConditionalDensitySet,
    grid: GridSpec,
    sigma: f64,
    t_eval: f64,
    dt: f64,
    interacting: bool,
) -> Result<LimitSolution, EntropyError> {
    let pde = |e: vx_pde::PdeError| EntropyError::Pde(e.to_string());
    let solver = PdeSolver::new(grid, sigma, VelocityMode::FreeSpace).map_err(pde)?;
    let mut set = set0.clone();
    let mut omega = vx_pde::reconstruct_vorticity(&set, grid);
    if !interacting {
        let spec = Spectral::new(grid);
        let s = sigma * (t_eval - set.t);
        set.densities = set.densities.iter().map(|f| spec.heat(f, s)).collect();
        set.t = t_eval;
        omega = vx_pde::reconstruct_vorticity(&set, grid);
    } else {
        let steps = ((t_eval - set.t) / dt).ceil().max(1.0) as usize;
        let h = (t_eval - set.t) / steps as f64;
        let t0 = set.t;
        for s in 0..steps {
            let (ns, no) = solver.step_conditional(&set, &omega, h).map_err(pde)?;
            set = ns;
            omega = no;
            set.t = t0 + (s + 1) as f64 * h;
            omega.t = set.t;
        }
    }
    let density = position_density(&set, grid.len());
    Ok(LimitSolution { omega, density })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub n_list: Vec<usize>,
    /// marginal order, 1 or 2
    pub k: usize,
    pub n_replicas: usize,
    pub sigma: f64,
    pub t_eval: f64,
    pub dt: f64,
    pub force: ForceMethod,
    pub grid: GridSpec,
    /// smoothing length of the empirical measures
    pub bandwidth: f64,
    pub seed: u64,
    /// refuse when the relative standard error of the L¹ error exceeds this
    #[serde(default)]
    pub target_rel_se: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub t: f64,
    /// normalized relative entropy of the smoothed position marginal
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "TV")]
    pub tv: f64,
    /// `∫|ω^{N,k} - ω^{⊗k}|` after smoothing both sides
    pub l1_vorticity: f64,
    pub stderr: f64,
    pub n_replicas: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub reports: Vec<EntropyReport>,
    /// least-squares slope of `log L¹` against `log N` over all replicas
    pub slope: f64,
    pub slope_ci95: (f64, f64),
    pub strictly_decreasing: bool,
}

fn floor_normalize(grid: &Grid, mut v: Vec<f64>) -> Result<GriddedDensity, EntropyError> {
    let peak = v.iter().cloned().fold(0.0, f64::max);
    for x in v.iter_mut() {
        *x = x.max(1e-14 * peak);
    }
    GriddedDensity::normalized(grid.clone(), v)
}

struct ReplicaStats {
    l1: f64,
    h: f64,
    i: f64,
    tv: f64,
}

struct Refs {
    grid: Grid,
    omega: Vec<f64>,
    density: GriddedDensity,
    // pair objects on the coarse grid (k = 2)
    coarse: Option<(Grid, Vec<f64>, GriddedDensity, f64)>,
}

fn stride_sample(v: &[f64], n: usize, stride: usize) -> Vec<f64> {
    let m = n / stride;
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            out.push(v[(i * stride) * n + j * stride]);
        }
    }
    out
}

fn outer(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(a.len() * b.len());
    for x in a {
        v.extend(b.iter().map(|y| x * y));
    }
    v
}

const COARSE_N: usize = 32;

fn references(cfg: &StudyConfig, limit: &LimitSolution) -> Result<Refs, EntropyError> {
    let spec = Spectral::new(cfg.grid);
    let grid = Grid::from_pde(&cfg.grid);
    let s = 0.5 * cfg.bandwidth * cfg.bandwidth;
    let omega = spec.heat(&limit.omega.values, s);
    let density = floor_normalize(&grid, spec.heat(&limit.density, s))?;
    let coarse = if cfg.k == 2 {
        let stride = (cfg.grid.n / COARSE_N).max(1);
        let nc = cfg.grid.n / stride;
        let hc = cfg.grid.h() * stride as f64;
        let bc = cfg.bandwidth.max(hc);
        let sc = 0.5 * bc * bc;
        let ax = Axis::new(-cfg.grid.half_width, hc, nc);
        let g2 = Grid::new(vec![ax, ax]);
        let om = stride_sample(&spec.heat(&limit.omega.values, sc), cfg.grid.n, stride);
        let de = stride_sample(&spec.heat(&limit.density, sc), cfg.grid.n, stride);
        let g4 = g2.product(&g2);
        let pair_omega = outer(&om, &om);
        let pair_density = floor_normalize(&g4, outer(&de, &de))?;
        Some((g2, pair_omega, pair_density, bc))
    } else {
        None
    };
    Ok(Refs { grid, omega, density, coarse })
}

fn replica_stats(cfg: &StudyConfig, refs: &Refs, x: &[Vec2], m: &[f64]) -> Result<ReplicaStats, EntropyError> {
    let n = x.len() as f64;
    let flat: Vec<f64> = x.iter().flat_map(|p| [p.x1, p.x2]).collect();
    if cfg.k == 1 {
        let w: Vec<f64> = m.iter().map(|v| v / n).collect();
        let om = kde_weighted(&flat, Some(&w), cfg.bandwidth, &refs.grid)?;
        let l1 = om.iter().zip(&refs.omega).map(|(a, b)| (a - b).abs()).sum::<f64>() * refs.grid.cell_volume();
        let rho = floor_normalize(&refs.grid, kde_weighted(&flat, None, cfg.bandwidth, &refs.grid)?)?;
        return Ok(ReplicaStats {
            l1,
            h: relative_entropy(&rho, &refs.density, 1)?.value,
            i: fisher_information(&rho, &refs.density)?.value,
            tv: total_variation(&rho, &refs.density)?,
        });
    }
    let (g2, pair_omega, pair_density, bc) = refs.coarse.as_ref().expect("k = 2 references");
    let g4 = g2.product(g2);
    // Σ_{i≠j} = (Σ_i)(Σ_j) - Σ_{i=j}
    let diag: Vec<f64> = x.iter().flat_map(|p| [p.x1, p.x2, p.x1, p.x2]).collect();
    let norm = 1.0 / (n * (n - 1.0));
    let s_m = kde_weighted(&flat, Some(m), *bc, g2)?;
    let m2: Vec<f64> = m.iter().map(|v| v * v).collect();
    let d_m = kde_weighted(&diag, Some(&m2), *bc, &g4)?;
    let pair: Vec<f64> = outer(&s_m, &s_m).iter().zip(&d_m).map(|(a, b)| (a - b) * norm).collect();
    let l1 = pair.iter().zip(pair_omega).map(|(a, b)| (a - b).abs()).sum::<f64>() * g4.cell_volume();
    let s_1 = kde_weighted(&flat, None, *bc, g2)?;
    let d_1 = kde_weighted(&diag, None, *bc, &g4)?;
    let dens: Vec<f64> = outer(&s_1, &s_1).iter().zip(&d_1).map(|(a, b)| (a - b).max(0.0)).collect();
    let rho = floor_normalize(&g4, dens)?;
    Ok(ReplicaStats {
        l1,
        h: relative_entropy(&rho, pair_density, 2)?.value,
        i: fisher_information(&rho, pair_density)?.value / 2.0,
        tv: total_variation(&rho, pair_density)?,
    })
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// OLS slope of `y` on `x` with a two-sided 95% Student-t interval.
pub fn fit_slope(x: &[f64], y: &[f64]) -> (f64, (f64, f64)) {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - icpt - slope * a).powi(2)).sum();
    let dof = n - 2.0;
    if dof < 1.0 {
        return (slope, (f64::NEG_INFINITY, f64::INFINITY));
    }
    let se = (rss / dof / sxx).sqrt();
    let q = StudentsT::new(0.0, 1.0, dof).expect("dof > 0").inverse_cdf(0.975);
    (slope, (slope - q * se, slope + q * se))
}

/// For each `N`: simulate `n_replicas` systems from `sampler` to `t_eval`,
/// smooth the empirical measures with a Gaussian of width `bandwidth`, and
/// compare against the equally smoothed limit.
pub fn convergence_study(cfg: &StudyConfig, sampler: &dyn InitialSampler, limit: &LimitSolution) -> Result<StudyResult, EntropyError> {
    if cfg.k != 1 && cfg.k != 2 {
        return Err(EntropyError::Invalid(format!("k must be 1 or 2, got {}", cfg.k)));
    }
    if cfg.n_replicas < 2 {
        return Err(EntropyError::InsufficientReplicas { have: cfg.n_replicas, need: 2 });
    }
    if cfg.n_list.is_empty() || cfg.n_list.iter().any(|&n| n < 2) {
        return Err(EntropyError::Invalid("N list must be nonempty with N >= 2".into()));
    }
    if limit.omega.grid != cfg.grid || (limit.omega.t - cfg.t_eval).abs() > 1e-9 {
        return Err(EntropyError::GridMismatch("limit solution grid or time differs from the study".into()));
    }
    let refs = references(cfg, limit)?;
    let (mut lx, mut ly) = (Vec::new(), Vec::new());
    let mut reports = Vec::new();
    for (ni, &n) in cfg.n_list.iter().enumerate() {
        let sim = SimConfig {
            dt: cfg.dt,
            t_final: cfg.t_eval,
            kernel: vx_kernel::KernelSpec::EXACT,
            force: cfg.force,
            n_replicas: cfg.n_replicas,
            seed: vx_kernel::rng::child_seed(cfg.seed, ni as u64),
        };
        let runs = run_ensemble(sampler, n, cfg.sigma, &sim, &[]).map_err(|e| EntropyError::Sim(e.to_string()))?;
        let mut stats = Vec::with_capacity(runs.len());
        for r in &runs {
            let e = r.last();
            stats.push(replica_stats(cfg, &refs, &e.positions, e.circulations())?);
        }
        let l1: Vec<f64> = stats.iter().map(|s| s.l1).collect();
        let (l1m, l1se) = mean_se(&l1);
        if let Some(target) = cfg.target_rel_se {
            if l1se > target * l1m {
                let need = (cfg.n_replicas as f64 * (l1se / (target * l1m)).powi(2)).ceil() as usize;
                return Err(EntropyError::InsufficientReplicas { have: cfg.n_replicas, need });
            }
        }
        for v in &l1 {
            lx.push((n as f64).ln());
            ly.push(v.ln());
        }
        let avg = |f: fn(&ReplicaStats) -> f64| stats.iter().map(f).sum::<f64>() / stats.len() as f64;
        reports.push(EntropyReport {
            n,
            k: cfg.k,
            t: cfg.t_eval,
            h: avg(|s| s.h),
            i: avg(|s| s.i),
            tv: avg(|s| s.tv),
            l1_vorticity: l1m,
            stderr: l1se,
            n_replicas: stats.len(),
        });
    }
    let strictly_decreasing = reports.windows(2).all(|w| w[1].l1_vorticity < w[0].l1_vorticity);
    let (slope, slope_ci95) = if cfg.n_list.len() >= 2 { fit_slope(&lx, &ly) } else { (f64::NAN, (f64::NAN, f64::NAN)) };
    Ok(StudyResult { reports, slope, slope_ci95, strictly_decreasing })
}

/// Rows `N,k,t,H,I,TV,stderr,L1`; `stderr` belongs to the L¹ column.
pub fn write_reports_csv<W: Write>(mut w: W, reports: &[EntropyReport]) -> io::Result<()> {
    writeln!(w, "N,k,t,H,I,TV,stderr,L1")?;
    for r in reports {
        writeln!(w, "{},{},{:e},{:e},{:e},{:e},{:e},{:e}", r.n, r.k, r.t, r.h, r.i, r.tv, r.stderr, r.l1_vorticity)?;
    }
    Ok(())
}

pub fn reports_json(result: &StudyResult) -> String {
    serde_json::to_string_pretty(result).expect("plain data")
}
