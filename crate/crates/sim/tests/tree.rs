use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vx_kernel::rng::normal_pair;
use vx_kernel::{CirculationLaw, KernelSpec, Vec2};
use vx_sim::{drift_velocities, ForceMethod, ParticleEnsemble, SimConfig};

fn gaussian_cloud(n: usize, seed: u64) -> ParticleEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let law = CirculationLaw::Uniform { a: 1.0 };
    let mut x = Vec::new();
    let mut m = Vec::new();
    for _ in 0..n {
        let (a, b) = normal_pair(&mut rng);
        x.push(Vec2::new(a, b));
        m.push(law.sample(&mut rng));
    }
    ParticleEnsemble::new(x, m, 0.0, 0).unwrap()
}

fn rel_error(ens: &ParticleEnsemble, force: ForceMethod) -> f64 {
    let mut cfg = SimConfig::new(1e-3, 1.0);
    let exact = drift_velocities(ens, &cfg);
    cfg.force = force;
    let approx = drift_velocities(ens, &cfg);
    let rms = (exact.iter().map(|v| v.norm2()).sum::<f64>() / exact.len() as f64).sqrt();
    let worst = exact
        .iter()
        .zip(&approx)
        .map(|(a, b)| (a.x1 - b.x1).abs().max((a.x2 - b.x2).abs()))
        .fold(0.0, f64::max);
    worst / rms
}

#[test]
fn tree_matches_direct_on_gaussian_cloud() {
    let ens = gaussian_cloud(4096, 3);
    let err = rel_error(&ens, ForceMethod::tree(0.5));
    assert!(err <= 1e-3, "tree error {err:e} relative to rms drift");
}

#[test]
fn tree_error_by_order() {
    let ens = gaussian_cloud(4096, 3);
    let errs: Vec<f64> = [1usize, 2, 3, 4, 6]
        .iter()
        .map(|&order| rel_error(&ens, ForceMethod::Tree { theta: 0.5, order }))
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] < w[0], "{errs:?}");
    }
    // the monopole + dipole truncation alone misses the 1e-3 target
    assert!(errs[0] > 1e-3);
}

#[test]
fn tree_tightens_as_theta_decreases() {
    let ens = gaussian_cloud(2048, 8);
    let errs: Vec<f64> = [0.9, 0.7, 0.5, 0.3, 0.1]
        .iter()
        .map(|&theta| rel_error(&ens, ForceMethod::tree(theta)))
        .collect();
    for w in errs.windows(2) {
        assert!(w[1] <= w[0], "{errs:?}");
    }
}

#[test]
fn tree_is_deterministic() {
    let ens = gaussian_cloud(1000, 1);
    let mut cfg = SimConfig::new(1e-3, 1.0);
    cfg.force = ForceMethod::tree(0.6);
    assert_eq!(drift_velocities(&ens, &cfg), drift_velocities(&ens, &cfg));
}

#[test]
fn tree_with_blob_kernel_close_to_direct() {
    let ens = gaussian_cloud(2048, 5);
    let mut cfg = SimConfig::new(1e-3, 1.0);
    cfg.kernel = KernelSpec::blob(0.01);
    let exact = drift_velocities(&ens, &cfg);
    cfg.force = ForceMethod::tree(0.4);
    let approx = drift_velocities(&ens, &cfg);
    let rms = (exact.iter().map(|v| v.norm2()).sum::<f64>() / exact.len() as f64).sqrt();
    let worst = exact.iter().zip(&approx).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
    assert!(worst / rms < 1e-3, "{}", worst / rms);
}
