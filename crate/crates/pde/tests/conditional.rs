use vx_kernel::CirculationLaw;
use vx_pde::*;

fn blob(g: GridSpec, c1: f64, c2: f64, v: f64) -> Vec<f64> {
    gaussian_field(g, 1.0, c1, c2, v, 0.0).values
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn single_node_matches_vorticity_step() {
    let g = GridSpec::new(8.0, 64);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let gamma = 1.3;
    let f = blob(g, 0.5, 0.0, 0.6);
    let w = VorticityField { grid: g, t: 0.0, values: f.iter().map(|v| gamma * v).collect() };
    let set = ConditionalDensitySet::new(vec![gamma], vec![1.0], vec![f], 0.0).unwrap();
    let (set1, w1) = s.step_conditional(&set, &w, 0.02).unwrap();
    let direct = s.step_vorticity(&w, 0.02).unwrap();
    assert!(max_diff(&w1.values, &direct.values) < 1e-15);
    let scaled: Vec<f64> = set1.densities[0].iter().map(|v| gamma * v).collect();
    assert!(max_diff(&scaled, &direct.values) < 1e-13);
}

#[test]
fn self_consistency_and_mass() {
    let g = GridSpec::new(8.0, 64);
    let s = PdeSolver::new(g, 0.15, VelocityMode::FreeSpace).unwrap();
    let law = CirculationLaw::TwoPoint { a: 1.0, p: 0.4 };
    let (m, w) = law.quadrature(0);
    let dens = vec![blob(g, -0.8, 0.0, 0.5), blob(g, 0.8, 0.2, 0.4)];
    let mut set = ConditionalDensitySet::new(m, w, dens, 0.0).unwrap();
    let mut omega = reconstruct_vorticity(&set, g);
    let m0 = set.masses(&g);
    for _ in 0..100 {
        let (a, b) = s.step_conditional(&set, &omega, 0.01).unwrap();
        set = a;
        omega = b;
    }
    let recon = reconstruct_vorticity(&set, g);
    assert!(max_diff(&recon.values, &omega.values) <= 1e-8);
    for (a, b) in set.masses(&g).iter().zip(&m0) {
        assert!((a - b).abs() <= 1e-10);
    }
    assert!((set.total_mass(&g) - 1.0).abs() < 1e-8);
    let peak = set.densities.iter().flatten().fold(0.0f64, |a, v| a.max(*v));
    assert!(set.densities.iter().flatten().all(|&v| v >= -1e-8 * peak));
}

#[test]
fn symmetric_atoms_cancel() {
    let g = GridSpec::new(4.0, 32);
    let f = blob(g, 0.0, 0.0, 0.5);
    let set = ConditionalDensitySet::new(vec![-0.5, 0.5], vec![0.5, 0.5], vec![f.clone(), f], 0.0).unwrap();
    assert!(reconstruct_vorticity(&set, g).values.iter().all(|v| *v == 0.0));
}

#[test]
fn constant_law_scales() {
    let g = GridSpec::new(4.0, 32);
    let f = blob(g, 0.0, 0.0, 0.5);
    let set = ConditionalDensitySet::new(vec![0.7], vec![1.0], vec![f.clone()], 0.0).unwrap();
    let w = reconstruct_vorticity(&set, g);
    assert!(w.values.iter().zip(&f).all(|(a, b)| *a == 0.7 * b));
}

/// Conditional densities `G(x)(1 + ε p(m) x1)` with `deg p ≤ 7`.
fn polynomial_family(g: GridSpec, q: usize) -> ConditionalDensitySet {
    let (m, w) = CirculationLaw::Uniform { a: 1.0 }.quadrature(q);
    let base = blob(g, 0.0, 0.0, 0.5);
    let p = |m: f64| 0.3 - 0.2 * m + 0.1 * m.powi(3) + 0.05 * m.powi(7);
    let dens = m
        .iter()
        .map(|&mq| {
            base.iter().enumerate().map(|(i, b)| b * (1.0 + 0.2 * p(mq) * g.point(i).0.tanh())).collect()
        })
        .collect();
    ConditionalDensitySet::new(m, w, dens, 0.0).unwrap()
}

#[test]
fn gauss_legendre_exactness() {
    let g = GridSpec::new(8.0, 64);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let (mut s8, mut s16) = (polynomial_family(g, 8), polynomial_family(g, 16));
    let mut w8 = reconstruct_vorticity(&s8, g);
    let mut w16 = reconstruct_vorticity(&s16, g);
    assert!(max_diff(&w8.values, &w16.values) <= 1e-10);
    for _ in 0..10 {
        (s8, w8) = s.step_conditional(&s8, &w8, 0.02).unwrap();
        (s16, w16) = s.step_conditional(&s16, &w16, 0.02).unwrap();
    }
    assert!(max_diff(&reconstruct_vorticity(&s8, g).values, &reconstruct_vorticity(&s16, g).values) <= 1e-10);
}

#[test]
fn mismatched_inputs_rejected() {
    let g = GridSpec::new(4.0, 32);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let set = ConditionalDensitySet::new(vec![1.0], vec![1.0], vec![vec![0.0; 16]], 0.0).unwrap();
    assert!(matches!(s.step_conditional(&set, &VorticityField::zeros(g, 0.0), 0.01), Err(PdeError::GridMismatch(_))));
    let set = ConditionalDensitySet::new(vec![1.0], vec![1.0], vec![vec![0.0; g.len()]], 1.0).unwrap();
    assert!(s.step_conditional(&set, &VorticityField::zeros(g, 0.0), 0.01).is_err());
}
