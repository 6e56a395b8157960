use vx_entropy::*;
use vx_kernel::{CirculationLaw, Vec2};
use vx_pde::GridSpec;
use vx_sim::{ForceMethod, ProductGaussian, SignedDipole};

fn free_config(n_list: Vec<usize>, k: usize, reps: usize) -> StudyConfig {
    StudyConfig {
        n_list,
        k,
        n_replicas: reps,
        sigma: 0.5,
        t_eval: 0.5,
        dt: 0.05,
        force: ForceMethod::Free,
        grid: GridSpec::new(8.0, 64),
        bandwidth: 0.3,
        seed: 21,
        target_rel_se: None,
    }
}

fn free_limit(cfg: &StudyConfig, law: &CirculationLaw) -> LimitSolution {
    let set = product_conditionals(law, Vec2::new(0.0, 0.0), 0.5, 2, cfg.grid);
    limit_solution(&set, cfg.grid, cfg.sigma, cfg.t_eval, 0.01, false).unwrap()
}

#[test]
fn free_particles_estimator_noise_slope() {
    let law = CirculationLaw::Constant { c: 1.0 };
    let cfg = free_config(vec![64, 256, 1024], 1, 8);
    let limit = free_limit(&cfg, &law);
    let sampler = ProductGaussian { law, mean: Vec2::new(0.0, 0.0), std: 0.5 };
    let res = convergence_study(&cfg, &sampler, &limit).unwrap();
    assert!(res.strictly_decreasing, "{:?}", res.reports);
    assert!((res.slope + 0.5).abs() < 0.15, "slope {} {:?}", res.slope, res.slope_ci95);
    assert!(res.slope_ci95.1 < 0.0);
    for r in &res.reports {
        assert!(r.tv <= (r.h / 2.0).sqrt() + 1e-12, "{r:?}");
        assert!(r.h >= 0.0 && r.i >= 0.0 && r.n_replicas == 8);
    }
    let mut csv = Vec::new();
    write_reports_csv(&mut csv, &res.reports).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    let js = reports_json(&res);
    assert!(js.contains("\"N\": 1024") && js.contains("\"TV\""));
}

#[test]
fn interacting_dipole_error_decreases() {
    let cfg = StudyConfig {
        n_list: vec![128, 1024],
        dt: 0.02,
        force: ForceMethod::Direct,
        n_replicas: 4,
        ..free_config(vec![], 1, 4)
    };
    let set = dipole_conditionals(1.0, 1.0, 0.5, cfg.grid);
    let limit = limit_solution(&set, cfg.grid, cfg.sigma, cfg.t_eval, 0.01, true).unwrap();
    let sampler = SignedDipole { a: 1.0, d: 1.0, std: 0.5 };
    let res = convergence_study(&cfg, &sampler, &limit).unwrap();
    assert!(res.strictly_decreasing, "{:?}", res.reports);
}

#[test]
fn pair_marginal_report() {
    let law = CirculationLaw::TwoPoint { a: 1.0, p: 0.5 };
    let cfg = free_config(vec![32, 128], 2, 2);
    let limit = free_limit(&cfg, &law);
    let sampler = ProductGaussian { law, mean: Vec2::new(0.0, 0.0), std: 0.5 };
    let res = convergence_study(&cfg, &sampler, &limit).unwrap();
    for r in &res.reports {
        assert_eq!(r.k, 2);
        assert!(r.l1_vorticity.is_finite() && r.h.is_finite() && r.i.is_finite());
        assert!(r.tv <= (2.0 * r.h / 2.0).sqrt() + 1e-12, "{r:?}");
    }
}

#[test]
fn refusals() {
    let law = CirculationLaw::Constant { c: 1.0 };
    let sampler = ProductGaussian { law: law.clone(), mean: Vec2::new(0.0, 0.0), std: 0.5 };
    let cfg = free_config(vec![64], 1, 1);
    let limit = free_limit(&cfg, &law);
    assert!(matches!(convergence_study(&cfg, &sampler, &limit), Err(EntropyError::InsufficientReplicas { .. })));
    let cfg = StudyConfig { target_rel_se: Some(1e-6), ..free_config(vec![64], 1, 3) };
    match convergence_study(&cfg, &sampler, &limit) {
        Err(EntropyError::InsufficientReplicas { have, need }) => assert!(need > have),
        other => panic!("{other:?}"),
    }
    let cfg = free_config(vec![64], 3, 3);
    assert!(convergence_study(&cfg, &sampler, &limit).is_err());
}
