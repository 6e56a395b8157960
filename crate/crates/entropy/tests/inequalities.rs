use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vx_entropy::*;
use vx_kernel::Vec2;

fn plane(l: f64, n: usize) -> Grid {
    let a = Axis::span(-l, l, n);
    Grid::new(vec![a, a])
}

fn gauss2(g: &Grid, m: Vec2, s: f64) -> GriddedDensity {
    GriddedDensity::from_fn(g.clone(), |x| (-((x[0] - m.x1).powi(2) + (x[1] - m.x2).powi(2)) / (2.0 * s * s)).exp()).unwrap()
}

fn probes() -> Vec<Vec2> {
    let mut p = Vec::new();
    for i in -2..=2 {
        for j in -2..=2 {
            // between nodes, away from the kernel singularity
            p.push(Vec2::new(0.9 * i as f64 + 0.0371, 0.9 * j as f64 - 0.0213));
        }
    }
    p
}

#[test]
fn weighted_ckp_identical_densities() {
    let g = plane(8.0, 121);
    let m = gauss2(&g, Vec2::new(0.0, 0.0), 1.0);
    let r = weighted_ckp_check(&m, &m, 1.0, &probes()).unwrap();
    assert!(r.rows.iter().all(|p| p.lhs == 0.0 && p.margin >= 0.0));
}

#[test]
fn weighted_ckp_shifted_gaussians() {
    let g = plane(8.0, 121);
    let m2 = gauss2(&g, Vec2::new(0.0, 0.0), 1.0);
    for &(dx, dy) in &[(0.1, 0.0), (0.5, 0.0), (0.3, -0.4), (1.0, 1.0), (2.0, 0.0)] {
        let m1 = gauss2(&g, Vec2::new(dx, dy), 1.0);
        let r = weighted_ckp_check(&m1, &m2, 1.0, &probes()).unwrap();
        assert!(!r.divergent);
        assert!(r.min_margin() >= 0.0, "shift ({dx},{dy}): {}", r.min_margin());
        assert!(r.rows.iter().any(|p| p.lhs > 0.0));
    }
}

#[test]
fn weighted_ckp_lambda_scaling() {
    let g = plane(8.0, 121);
    let m2 = gauss2(&g, Vec2::new(0.0, 0.0), 1.0);
    let m1 = gauss2(&g, Vec2::new(0.4, 0.2), 1.0);
    let a = weighted_ckp_check(&m1, &m2, 0.5, &probes()).unwrap();
    let b = weighted_ckp_check(&m1, &m2, 1.0, &probes()).unwrap();
    assert_eq!(a.fisher_term, b.fisher_term);
    assert_ne!(a.entropy_term, b.entropy_term);
    // recompute the second term from its own parts
    let h = relative_entropy(&m1, &m2, 1).unwrap().value;
    let expect = (1.0 + b.log_exp_moment).sqrt() * (2.0 * h).sqrt() / 1.0;
    assert!((b.entropy_term - expect).abs() < 1e-14);
    for (ra, rb) in a.rows.iter().zip(&b.rows) {
        assert_eq!(ra.lhs, rb.lhs);
    }
}

#[test]
fn weighted_ckp_flags_divergent_moment() {
    // narrow m2: λ²|V|²|∇log m2|² outgrows log m2 when λ² ≥ 8 s²
    let g = plane(4.0, 121);
    let m2 = gauss2(&g, Vec2::new(0.0, 0.0), 0.3);
    let m1 = gauss2(&g, Vec2::new(0.2, 0.0), 0.3);
    let r = weighted_ckp_check(&m1, &m2, 2.0, &probes()).unwrap();
    assert!(r.divergent);
    assert!(r.rows.iter().all(|p| p.rhs.is_infinite()));
}

#[test]
fn gibbs_zero_test_function() {
    let g = Grid::line(Axis::span(-6.0, 6.0, 121));
    let bar = GriddedDensity::from_fn(g.clone(), |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
    let rho = GriddedDensity::from_fn(g.clone(), |x| (-(x[0] - 0.5).powi(2) / 2.0).exp()).unwrap();
    let phi = vec![0.0; g.len()];
    let c = gibbs_bound_check(&phi, &rho, &bar, 1, 2.0).unwrap();
    assert_eq!(c.lhs, 0.0);
    let h = relative_entropy(&rho, &bar, 1).unwrap().value;
    assert!((c.rhs - h / 2.0).abs() < 1e-14);
}

#[test]
fn gibbs_jensen_gap_n1() {
    let g = Grid::line(Axis::span(-6.0, 6.0, 241));
    let bar = GriddedDensity::from_fn(g.clone(), |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
    let phi = g.sample(|x| x[0].sin());
    for &eta in &[0.1, 1.0, 5.0] {
        let c = gibbs_bound_check(&phi, &bar, &bar, 1, eta).unwrap();
        assert!(c.entropy_term.abs() < 1e-14);
        assert!(c.lhs <= c.rhs + 1e-14, "eta={eta} {c:?}");
    }
}

#[test]
fn gibbs_two_particles_eta_sweep() {
    let g = Grid::line(Axis::span(-6.0, 6.0, 81));
    let bar = GriddedDensity::from_fn(g.clone(), |x| (-x[0] * x[0] / 2.0).exp()).unwrap();
    let gg = g.product(&g);
    // correlated pair
    let rho = GriddedDensity::from_fn(gg.clone(), |x| (-(x[0] * x[0] - 1.2 * x[0] * x[1] + x[1] * x[1]) / 2.0).exp()).unwrap();
    let phi = gg.sample(|x| 0.3 * (x[0] * x[1]).tanh());
    let etas: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let best = gibbs_eta_sweep(&phi, &rho, &bar, 2, &etas).unwrap();
    assert!(best.rhs - best.lhs >= -1e-10, "{best:?}");
    for &e in &etas {
        let c = gibbs_bound_check(&phi, &rho, &bar, 2, e).unwrap();
        assert!(c.lhs <= c.rhs + 1e-12 && c.rhs >= best.rhs);
    }
    assert!(gibbs_bound_check(&phi, &rho, &bar, 1, 1.0).is_err());
}

fn table(n: usize, m: usize, v: Vec<f64>) -> GriddedDensity {
    GriddedDensity::new(Grid::new(vec![Axis::new(0.0, 1.0, n), Axis::new(0.0, 1.0, m)]), v).unwrap()
}

#[test]
fn chain_rule_two_by_two() {
    let p = table(2, 2, vec![0.1, 0.2, 0.3, 0.4]);
    let q = table(2, 2, vec![0.25; 4]);
    let c = chain_rule_check(&p, &q).unwrap();
    let joint = 0.1 * 0.4f64.ln() + 0.2 * 0.8f64.ln() + 0.3 * 1.2f64.ln() + 0.4 * 1.6f64.ln();
    let marg = 0.3 * 0.6f64.ln() + 0.7 * 1.4f64.ln();
    assert!((c.rhs - joint).abs() < 1e-15);
    assert!((c.marginal - marg).abs() < 1e-15);
    assert!((c.lhs - (joint - marg)).abs() < 1e-15);
    assert!(c.lhs <= c.mid);
}

#[test]
fn chain_rule_product_joints() {
    let p = table(2, 2, vec![0.5 * 0.3, 0.5 * 0.7, 0.5 * 0.3, 0.5 * 0.7]);
    let q = table(2, 2, vec![0.5 * 0.6, 0.5 * 0.4, 0.5 * 0.6, 0.5 * 0.4]);
    let c = chain_rule_check(&p, &q).unwrap();
    assert!(c.marginal.abs() < 1e-16);
    assert!((c.lhs - c.rhs).abs() < 1e-16);
}

#[test]
fn chain_rule_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..100 {
        let mut draw = || {
            let v: Vec<f64> = (0..64).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = v.iter().sum();
            table(8, 8, v.into_iter().map(|x| x / s).collect())
        };
        let (p, q) = (draw(), draw());
        let c = chain_rule_check(&p, &q).unwrap();
        assert!((c.mid - c.rhs).abs() <= 1e-12, "{c:?}");
        assert!(c.lhs <= c.mid + 1e-15 && c.marginal >= 0.0);
    }
}

#[test]
fn chain_rule_support_violation() {
    let p = table(2, 2, vec![0.25; 4]);
    let q = table(2, 2, vec![0.5, 0.0, 0.25, 0.25]);
    assert!(chain_rule_check(&p, &q).unwrap().support_violation);
}
