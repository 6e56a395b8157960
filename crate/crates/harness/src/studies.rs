use crate::config::{ExperimentConfig, Force, Initial, Law, Regularity, StudyKind};
use crate::{ArtifactDir, HarnessError};
use serde_json::json;
use std::f64::consts::PI;
use vx_entropy::{
    convergence_study, dipole_conditionals, exp_moment_probe, exp_moment_probe_unchecked, limit_solution, product_conditionals,
    reports_json, write_reports_csv, CancellationMode, ConcentrationProbe, ProbeReport, StudyConfig, StudyResult, TestFunction, Z,
};
use vx_hierarchy::{
    a_closed, b_closed, beta_tail_bound, certify_envelope, solve_fixed_steps, write_lattice_csv, write_trajectory_csv, EnvelopeCertificate,
    GrowthFunction, HierarchyProblem, HierarchySolution, IteratedIntegralQuery, LatticeRow,
};
use vx_kernel::{CirculationLaw, Vec2};
use vx_pde::{gaussian_field, lamb_oseen, GridSpec, PdeSolver, VelocityMode};
use vx_regularity::{
    aux_sign_check, gauss_lower_check, gauss_upper_check, kato_decay_check, log_growth_check, lp_decay_check, snapshots, AuxConstants,
    EnvelopeReport, LogGrowth, SLOPE_TOL,
};
use vx_sim::{conserved_diagnostics, run_ensemble, write_snapshot_csv, ForceMethod, InitialSampler, ProductGaussian, SignedDipole, SimConfig};

/// Verdict of a finished study.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub verdict: String,
}

fn fail(study: &'static str) -> impl Fn(String) -> HarnessError {
    move |message| HarnessError::Study { study, message }
}

pub(crate) fn dispatch(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    match cfg.study {
        StudyKind::LambOseen => lamb_oseen_study(cfg, art),
        StudyKind::Convergence => convergence_run(cfg, art),
        StudyKind::Simulate => simulate_study(cfg, art),
        StudyKind::HierarchyCert => hierarchy_study(cfg, art),
        StudyKind::Regularity => regularity_study(cfg, art),
        StudyKind::Concentration => concentration_study(cfg, art),
    }
}

fn grid(cfg: &ExperimentConfig) -> GridSpec {
    GridSpec::new(cfg.grid.half_width, cfg.grid.n)
}

pub fn circulation_law(cfg: &ExperimentConfig) -> CirculationLaw {
    let a = cfg.physics.a;
    match cfg.physics.law {
        Law::Constant => CirculationLaw::Constant { c: a },
        Law::Uniform => CirculationLaw::Uniform { a },
        Law::TwoPoint => CirculationLaw::TwoPoint { a, p: 0.5 },
    }
}

pub fn force_method(cfg: &ExperimentConfig) -> ForceMethod {
    match cfg.particles.force {
        Force::Direct => ForceMethod::Direct,
        Force::Tree => ForceMethod::tree(cfg.particles.theta),
        Force::Free => ForceMethod::Free,
    }
}

pub fn sampler(cfg: &ExperimentConfig) -> Box<dyn InitialSampler> {
    let p = &cfg.particles;
    match p.initial {
        Initial::Dipole => Box::new(SignedDipole { a: cfg.physics.a, d: p.separation, std: p.std }),
        Initial::Gaussian => Box::new(ProductGaussian { law: circulation_law(cfg), mean: Vec2::new(0.0, 0.0), std: p.std }),
    }
}

// ---------------------------------------------------------------- lamb-oseen

/// `(t, max|ω - ω_exact| / max|ω_exact|)` at evenly spaced checkpoints.
pub fn lamb_oseen_errors(cfg: &ExperimentConfig) -> Result<Vec<(f64, f64)>, HarnessError> {
    let l = &cfg.lamb_oseen;
    let g = grid(cfg);
    let sigma = cfg.physics.sigma;
    let err = |e: vx_pde::PdeError| fail("lamb_oseen")(e.to_string());
    let solver = PdeSolver::new(g, sigma, VelocityMode::FreeSpace).map_err(err)?;
    let mut w = lamb_oseen(g, l.gamma, l.t0, sigma, 0.0);
    let mut rows = Vec::with_capacity(l.checkpoints);
    for j in 1..=l.checkpoints {
        let t = l.t_final * j as f64 / l.checkpoints as f64;
        w = solver.advance(&w, t, l.dt).map_err(err)?;
        w.t = t;
        let exact = lamb_oseen(g, l.gamma, l.t0, sigma, t);
        let peak = exact.max_abs();
        let e = w.values.iter().zip(&exact.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / peak;
        rows.push((t, e));
    }
    Ok(rows)
}

fn lamb_oseen_study(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let rows = lamb_oseen_errors(cfg)?;
    let mut csv = String::from("t,max_rel_err\n");
    for (t, e) in &rows {
        csv += &format!("{t},{e:.6e}\n");
    }
    art.write("lamb_oseen_errors.csv", csv.as_bytes())?;
    let worst = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let tol = cfg.lamb_oseen.tolerance;
    let passed = worst <= tol;
    let verdict = format!("{} lamb_oseen max relative error {worst:.3e} (tolerance {tol:e})", if passed { "PASS" } else { "FAIL" });
    art.write("verdict.txt", format!("{verdict}\n").as_bytes())?;
    Ok(Outcome { passed, verdict })
}

// --------------------------------------------------------------- convergence

pub fn study_config(cfg: &ExperimentConfig) -> StudyConfig {
    let p = &cfg.particles;
    StudyConfig {
        n_list: p.n_list.clone(),
        k: p.k,
        n_replicas: p.replicas,
        sigma: cfg.physics.sigma,
        t_eval: cfg.physics.t_eval,
        dt: p.dt,
        force: force_method(cfg),
        grid: grid(cfg),
        bandwidth: p.bandwidth,
        seed: cfg.seed,
        target_rel_se: None,
    }
}

/// Particle systems against the limit PDE at `t_eval`.
pub fn convergence(cfg: &ExperimentConfig) -> Result<StudyResult, HarnessError> {
    let f = fail("convergence");
    let p = &cfg.particles;
    let g = grid(cfg);
    let set = match p.initial {
        Initial::Dipole => dipole_conditionals(cfg.physics.a, p.separation, p.std, g),
        Initial::Gaussian => {
            let q = match cfg.physics.law {
                Law::Constant => 1,
                Law::TwoPoint => 2,
                Law::Uniform => 8,
            };
            product_conditionals(&circulation_law(cfg), Vec2::new(0.0, 0.0), p.std, q, g)
        }
    };
    let interacting = p.force != Force::Free;
    let limit = limit_solution(&set, g, cfg.physics.sigma, cfg.physics.t_eval, p.pde_dt, interacting).map_err(|e| f(e.to_string()))?;
    convergence_study(&study_config(cfg), sampler(cfg).as_ref(), &limit).map_err(|e| f(e.to_string()))
}

pub fn convergence_verdict(cfg: &ExperimentConfig, r: &StudyResult) -> Outcome {
    let max = cfg.particles.slope_max;
    let passed = r.strictly_decreasing && r.slope <= max && r.slope_ci95.1 < 0.0;
    Outcome {
        passed,
        verdict: format!(
            "{} convergence slope {:.3} (95% CI [{:.3}, {:.3}], need ≤ {max}), strictly decreasing: {}",
            if passed { "PASS" } else { "FAIL" },
            r.slope,
            r.slope_ci95.0,
            r.slope_ci95.1,
            r.strictly_decreasing
        ),
    }
}

fn convergence_run(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let r = convergence(cfg)?;
    let mut csv = Vec::new();
    write_reports_csv(&mut csv, &r.reports)?;
    art.write("convergence.csv", &csv)?;
    art.write("convergence.json", reports_json(&r).as_bytes())?;
    let o = convergence_verdict(cfg, &r);
    art.write("verdict.txt", format!("{}\n", o.verdict).as_bytes())?;
    Ok(o)
}

// ------------------------------------------------------------------ simulate

fn simulate_study(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let f = fail("simulate");
    let p = &cfg.particles;
    let sim = SimConfig { force: force_method(cfg), n_replicas: p.replicas, seed: cfg.seed, ..SimConfig::new(p.dt, cfg.physics.t_eval) };
    let s = sampler(cfg);
    let mut diag = String::from("N,replica,t,P1,P2,angular,hamiltonian\n");
    for &n in &p.n_list {
        let runs = run_ensemble(s.as_ref(), n, cfg.physics.sigma, &sim, &[]).map_err(|e| f(e.to_string()))?;
        for (r, tr) in runs.iter().enumerate() {
            let e = tr.last();
            let d = conserved_diagnostics(e);
            diag += &format!(
                "{n},{r},{},{:.15e},{:.15e},{:.15e},{:.15e}\n",
                e.t, d.linear_impulse.x1, d.linear_impulse.x2, d.angular_impulse, d.hamiltonian
            );
        }
        let mut snap = Vec::new();
        write_snapshot_csv(&mut snap, runs[0].last(), true)?;
        art.write(&format!("snapshot_N{n}.csv"), &snap)?;
    }
    art.write("diagnostics.csv", diag.as_bytes())?;
    Ok(Outcome { passed: true, verdict: format!("PASS simulate {} ensemble size(s)", p.n_list.len()) })
}

// ----------------------------------------------------------------- hierarchy

pub fn hierarchy_problem(cfg: &ExperimentConfig) -> HierarchyProblem {
    let h = &cfg.hierarchy;
    HierarchyProblem::quadratic_start(h.n, h.c1, h.c2, GrowthFunction::PaperLog { c: h.growth_c })
}

/// Certificate plus the trajectory at the accepted step.
pub fn hierarchy_run(cfg: &ExperimentConfig) -> Result<(EnvelopeCertificate, HierarchySolution), HarnessError> {
    let f = fail("hierarchy_cert");
    let prob = hierarchy_problem(cfg);
    let t = cfg.hierarchy.t_final;
    let cert = certify_envelope(&prob, t).map_err(|e| f(e.to_string()))?;
    let steps = (t / cert.dt).round() as usize;
    Ok((cert, solve_fixed_steps(&prob, t, steps)))
}

pub fn lattice_rows(growth: GrowthFunction) -> Result<Vec<LatticeRow>, HarnessError> {
    let f = fail("hierarchy_cert");
    let mut rows = Vec::new();
    for k in 1..=4 {
        for l in k..=k + 3 {
            for t in [0.1, 1.0, 5.0] {
                let q = IteratedIntegralQuery::new(k, l, t, growth);
                let a = a_closed(&q).map_err(|e| f(e.to_string()))?;
                let b = b_closed(&q).map_err(|e| f(e.to_string()))?;
                let (bound, exact) = beta_tail_bound(k, l, (-q.phi()).exp()).map_err(|e| f(e.to_string()))?;
                rows.push(LatticeRow { k, l, t, a, b, bound, exact });
            }
        }
    }
    Ok(rows)
}

fn hierarchy_study(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let (cert, sol) = hierarchy_run(cfg)?;
    let mut csv = Vec::new();
    write_trajectory_csv(&mut csv, &sol, cfg.hierarchy.stride)?;
    art.write("hierarchy_trajectory.csv", &csv)?;
    let mut csv = Vec::new();
    write_lattice_csv(&mut csv, &lattice_rows(GrowthFunction::PaperLog { c: cfg.hierarchy.growth_c })?)?;
    art.write("hierarchy_lattice.csv", &csv)?;
    let js = json!({
        "M": cert.m, "M_half_dt": cert.m_half, "relative_change": cert.relative_change, "stable": cert.stable,
        "dt": cert.dt, "argmax_t": cert.argmax_t, "argmax_k": cert.argmax_k, "refinement_changes": cert.changes,
    });
    art.write("hierarchy_certificate.json", serde_json::to_string_pretty(&js).expect("json").as_bytes())?;
    let passed = cert.stable;
    let verdict = format!(
        "{} hierarchy envelope M = {:.6} (dt/2: {:.6}, change {:.2e}) at t = {}, k = {}",
        if passed { "PASS" } else { "FAIL" },
        cert.m,
        cert.m_half,
        cert.relative_change,
        cert.argmax_t,
        cert.argmax_k
    );
    art.write("verdict.txt", format!("{verdict}\n").as_bytes())?;
    Ok(Outcome { passed, verdict })
}

// ---------------------------------------------------------------- regularity

#[derive(Debug, Clone)]
pub struct RegularitySuite {
    pub upper: EnvelopeReport,
    pub lower: EnvelopeReport,
    pub lp: Vec<EnvelopeReport>,
    pub kato: Vec<EnvelopeReport>,
    pub log: LogGrowth,
    pub aux: EnvelopeReport,
}

impl RegularitySuite {
    pub fn all(&self) -> Vec<EnvelopeReport> {
        let mut v = vec![self.upper.clone(), self.lower.clone()];
        v.extend(self.lp.iter().cloned());
        v.extend(self.kato.iter().cloned());
        v.push(self.log.grad.clone());
        v.push(self.log.hess.clone());
        v.push(self.aux.clone());
        v
    }

    /// Each report holds and every fitted slope is within `SLOPE_TOL`.
    pub fn passed(&self) -> bool {
        self.all().iter().all(|r| {
            r.holds && r.slope.zip(r.expected_slope).is_none_or(|(s, e)| (s - e).abs() <= SLOPE_TOL)
        })
    }
}

/// Lamb-Oseen runs for the envelopes and decay rates, the heat-flow run for
/// the auxiliary function.
pub fn regularity_suite(r: &Regularity) -> Result<RegularitySuite, HarnessError> {
    let f = fail("regularity");
    let e = |x: vx_regularity::RegularityError| f(x.to_string());
    let g = GridSpec::new(r.half_width, r.n);
    let solver = PdeSolver::new(g, r.sigma, VelocityMode::FreeSpace).map_err(|x| f(x.to_string()))?;
    let w0 = lamb_oseen(g, 1.0, r.t0, r.sigma, 0.0);
    let fields = snapshots(&solver, &w0, &r.times, r.dt_max).map_err(e)?;
    let upper = gauss_upper_check(&fields, r.c0).map_err(e)?;
    let lower = gauss_lower_check(&fields).map_err(e)?;
    let lp = lp_decay_check(&fields, &[2.0, f64::INFINITY]).map_err(e)?;
    let log = log_growth_check(&fields, &r.log_times).map_err(e)?;
    // nearly point-like vortex initialised at the first sample time
    let k0 = lamb_oseen(g, 1.0, r.kato_t0, r.sigma, r.times[0]);
    let mut kf = vec![k0.clone()];
    kf.extend(snapshots(&solver, &k0, &r.times[1..], r.dt_max).map_err(e)?);
    let kato = kato_decay_check(&solver, &kf, &[0, 1]).map_err(e)?;
    let heat = PdeSolver::new(g, r.aux_sigma, VelocityMode::FreeSpace).map_err(|x| f(x.to_string()))?;
    let h0 = gaussian_field(g, 1.0, 0.0, 0.0, 2.0 * r.aux_s0, 0.0);
    let hf: Vec<_> = r.aux_times.iter().map(|&t| heat.heat_flow(&h0, t)).collect::<Result<_, _>>().map_err(|x| f(x.to_string()))?;
    // smallest C1 the initial-data test allows for a Gaussian of mass 1, plus a margin
    let c1 = r.aux_c / r.aux_sigma * (1.0 / (4.0 * PI * r.aux_s0)).ln() + r.aux_c1_margin;
    let aux = aux_sign_check(&hf, r.aux_sigma, AuxConstants { c: r.aux_c, c1 }).map_err(e)?;
    Ok(RegularitySuite { upper, lower, lp, kato, log, aux })
}

fn regularity_study(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let s = regularity_suite(&cfg.regularity)?;
    let all = s.all();
    let mut csv = Vec::new();
    vx_regularity::write_reports_csv(&mut csv, &all)?;
    art.write("regularity.csv", &csv)?;
    art.write("regularity.json", serde_json::to_string_pretty(&all).expect("json").as_bytes())?;
    let passed = s.passed();
    let mut lines = Vec::new();
    for r in &all {
        lines.push(format!(
            "{} {} order={} C={:.4e} worst={:.4e} slope={}",
            if r.holds { "ok  " } else { "FAIL" },
            r.kind.name(),
            r.order.map_or("-".into(), |o| o.to_string()),
            r.constant,
            r.worst_ratio,
            r.slope.map_or("-".into(), |s| format!("{s:.4}"))
        ));
    }
    let verdict = format!("{} regularity: {} checks", if passed { "PASS" } else { "FAIL" }, all.len());
    art.write("verdict.txt", format!("{verdict}\n{}\n", lines.join("\n")).as_bytes())?;
    Ok(Outcome { passed, verdict })
}

// ------------------------------------------------------------- concentration

/// `φ(z,w) = s·m_z cos(x2_z)·sin(x1_w)`, whose partial integrals vanish under
/// a symmetric circulation law and centred Gaussian positions.
pub fn cancelling_probe(s: f64) -> ConcentrationProbe {
    ConcentrationProbe {
        phi: TestFunction::Separable {
            a: std::sync::Arc::new(|z: &Z| z[0] * z[2].cos()),
            b: std::sync::Arc::new(move |w: &Z| s * w[1].sin()),
            sup_b: s,
        },
        mode: CancellationMode::TwoSided,
    }
}

/// `φ(z,w) = s·(sin(x1_w) + 1/2)`: the mean does not cancel.
pub fn control_probe(s: f64) -> ConcentrationProbe {
    ConcentrationProbe {
        phi: TestFunction::Separable {
            a: std::sync::Arc::new(|_: &Z| 1.0),
            b: std::sync::Arc::new(move |w: &Z| s * (w[1].sin() + 0.5)),
            sup_b: 1.5 * s,
        },
        mode: CancellationMode::TwoSided,
    }
}

pub fn concentration(cfg: &ExperimentConfig) -> Result<(ProbeReport, Option<ProbeReport>), HarnessError> {
    let f = fail("concentration");
    let c = &cfg.concentration;
    let rho = ProductGaussian { law: CirculationLaw::TwoPoint { a: cfg.physics.a, p: 0.5 }, mean: Vec2::new(0.0, 0.0), std: 1.0 };
    let main = exp_moment_probe(&cancelling_probe(c.phi_sup), &rho, &c.n_list, c.n_mc, cfg.seed).map_err(|e| f(e.to_string()))?;
    let control = if c.positive_control {
        Some(exp_moment_probe_unchecked(&control_probe(c.phi_sup), &rho, &c.n_list, c.n_mc, cfg.seed ^ 0x5eed).map_err(|e| f(e.to_string()))?)
    } else {
        None
    };
    Ok((main, control))
}

/// Log-log slope of the control's log-moment against N.
pub fn control_growth_exponent(r: &ProbeReport) -> f64 {
    let x: Vec<f64> = r.rows.iter().map(|row| (row.n as f64).ln()).collect();
    let y: Vec<f64> = r.rows.iter().map(|row| row.log_moment.max(f64::MIN_POSITIVE).ln()).collect();
    vx_entropy::fit_slope(&x, &y).0
}

fn concentration_study(cfg: &ExperimentConfig, art: &mut ArtifactDir) -> Result<Outcome, HarnessError> {
    let (main, control) = concentration(cfg)?;
    let mut csv = String::from("probe,N,log_moment,stderr,n_mc\n");
    for (name, r) in std::iter::once(("cancelling", &main)).chain(control.as_ref().map(|c| ("control", c))) {
        for row in &r.rows {
            csv += &format!("{name},{},{:.12e},{:.12e},{}\n", row.n, row.log_moment, row.stderr, row.n_mc);
        }
    }
    art.write("concentration.csv", csv.as_bytes())?;
    let flat = main.no_growth(3.0);
    let grows = control.as_ref().map(|c| (control_growth_exponent(c) - 1.0).abs() <= 0.15 && !c.no_growth(3.0));
    let passed = flat && grows.unwrap_or(true);
    let verdict = format!(
        "{} concentration: cancelling probe flat at 3 SE: {flat}; control linear in N: {}",
        if passed { "PASS" } else { "FAIL" },
        grows.map_or("not run".into(), |g| g.to_string())
    );
    art.write("verdict.txt", format!("{verdict}\n").as_bytes())?;
    Ok(Outcome { passed, verdict })
}
