use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vx_kernel::{rescale_to_unit, CirculationLaw, KernelSpec, Vec2};
use vx_sim::*;

fn random_state(n: usize, seed: u64, sigma: f64) -> ParticleEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n).map(|_| Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let m = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ParticleEnsemble::new(x, m, sigma, seed).unwrap()
}

/// Points in the unit disc with pairwise separation at least `min_sep`.
fn separated_state(n: usize, seed: u64, min_sep: f64) -> ParticleEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<Vec2> = Vec::new();
    while x.len() < n {
        let p = Vec2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if p.norm() <= 1.0 && x.iter().all(|q| (*q - p).norm() >= min_sep) {
            x.push(p);
        }
    }
    let m = (0..n).map(|_| rng.random_range(0.2..1.0) * if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
    ParticleEnsemble::new(x, m, 0.0, seed).unwrap()
}

#[test]
fn lone_deterministic_particle_stays_put() {
    let ens = ParticleEnsemble::new(vec![Vec2::new(0.3, 0.1)], vec![1.0], 0.0, 1).unwrap();
    let out = simulate_steps(&ens, &SimConfig::new(0.1, 1.0), 10).unwrap();
    assert_eq!(out.positions, ens.positions);
    assert_eq!(out.step, 10);
}

#[test]
fn increment_variance_is_two_sigma_dt() {
    let (sigma, dt, n) = (0.5, 0.01, 10_000);
    let ens = ParticleEnsemble::new(vec![Vec2::ZERO; n], vec![1.0; n], sigma, 77).unwrap();
    let mut cfg = SimConfig::new(dt, dt);
    cfg.force = ForceMethod::Free;
    let out = em_step(&ens, &cfg).unwrap();
    for comp in [0, 1] {
        let v: Vec<f64> = out.positions.iter().map(|p| if comp == 0 { p.x1 } else { p.x2 }).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        assert!((var / (2.0 * sigma * dt) - 1.0).abs() < 0.05, "var {var}");
    }
}

#[test]
fn euler_step_conserves_linear_impulse() {
    for seed in 0..20 {
        let ens = random_state(8, seed, 0.0);
        let before = conserved_diagnostics(&ens).linear_impulse;
        let after = conserved_diagnostics(&em_step(&ens, &SimConfig::new(1e-3, 1.0)).unwrap()).linear_impulse;
        assert!((before - after).norm() <= 1e-14, "seed {seed}: {:e}", (before - after).norm());
    }
}

#[test]
fn circulations_never_change() {
    let ens = random_state(32, 4, 0.3);
    let out = simulate_steps(&ens, &SimConfig::new(1e-3, 1.0), 50).unwrap();
    let a: Vec<u64> = ens.circulations().iter().map(|m| m.to_bits()).collect();
    let b: Vec<u64> = out.circulations().iter().map(|m| m.to_bits()).collect();
    assert_eq!(a, b);
}

#[test]
fn permutation_equivariance() {
    // deterministic dynamics so the per-index noise assignment plays no role
    let ens = random_state(24, 9, 0.0);
    let perm: Vec<usize> = (0..24).rev().collect();
    let permuted = ParticleEnsemble::new(
        perm.iter().map(|&i| ens.positions[i]).collect(),
        perm.iter().map(|&i| ens.circulations()[i]).collect(),
        0.0,
        9,
    )
    .unwrap();
    let cfg = SimConfig::new(1e-3, 1.0);
    let a = simulate_steps(&ens, &cfg, 20).unwrap();
    let b = simulate_steps(&permuted, &cfg, 20).unwrap();
    for (k, &i) in perm.iter().enumerate() {
        assert!((a.positions[i] - b.positions[k]).norm() < 1e-13);
    }
}

#[test]
fn zero_length_run_returns_initial_state() {
    let ens = random_state(5, 2, 0.1);
    let traj = simulate(&ens, &SimConfig::new(0.01, 0.0), &[]).unwrap();
    assert_eq!(traj.snapshots.len(), 1);
    assert_eq!(traj.snapshots[0], ens);
}

#[test]
fn snapshots_at_requested_times() {
    let ens = random_state(5, 2, 0.1);
    let traj = simulate(&ens, &SimConfig::new(0.01, 0.1), &[0.05, 0.0]).unwrap();
    let steps: Vec<u64> = traj.snapshots.iter().map(|s| s.step).collect();
    assert_eq!(steps, vec![0, 5, 10]);
}

fn two_vortex_drift(dt: f64) -> f64 {
    let ens = ParticleEnsemble::new(vec![Vec2::new(0.5, 0.0), Vec2::new(-0.5, 0.0)], vec![1.0, 1.0], 0.0, 0).unwrap();
    let out = simulate(&ens, &SimConfig::new(dt, 1.0), &[]).unwrap();
    let p = &out.last().positions;
    ((p[0] - p[1]).norm() - 1.0).abs()
}

#[test]
fn co_rotating_pair_keeps_separation() {
    let d1 = two_vortex_drift(1e-4);
    let d2 = two_vortex_drift(5e-5);
    assert!(d1 <= 1e-3, "drift {d1}");
    let ratio = d1 / d2;
    assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
}

fn invariant_drift(ens: &ParticleEnsemble, dt: f64) -> (f64, f64) {
    let d0 = conserved_diagnostics(ens);
    let out = simulate(ens, &SimConfig::new(dt, 1.0), &[]).unwrap();
    let d1 = conserved_diagnostics(out.last());
    (
        (d1.angular_impulse - d0.angular_impulse).abs() / d0.angular_impulse.abs(),
        (d1.hamiltonian - d0.hamiltonian).abs() / d0.hamiltonian.abs(),
    )
}

#[test]
fn invariants_drift_at_first_order() {
    for (n, seed) in [(4usize, 1u64), (8, 2)] {
        let ens = separated_state(n, seed, 0.3);
        let (a1, h1) = invariant_drift(&ens, 1e-4);
        let (a2, h2) = invariant_drift(&ens, 5e-5);
        assert!(h1 <= 1e-3, "N={n} hamiltonian drift {h1}");
        for r in [a1 / a2, h1 / h2] {
            assert!((1.7..=2.3).contains(&r), "N={n} ratio {r}");
        }
    }
}

#[test]
fn blowup_is_reported() {
    let ens = ParticleEnsemble::new(vec![Vec2::new(1e300, 0.0), Vec2::new(-1e300, 0.0)], vec![1.0, 1.0], 1e300, 0).unwrap();
    match em_step(&ens, &SimConfig::new(1e300, 1.0)) {
        Err(SimError::Blowup { step, .. }) => assert_eq!(step, 1),
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn rescaled_system_tracks_original() {
    let a = 4.0;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let n = 16;
    let x: Vec<Vec2> = (0..n).map(|_| Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    let m: Vec<f64> = (0..n).map(|_| rng.random_range(-a..a)).collect();
    let sigma = 0.8;
    let r = rescale_to_unit(a, &x, &m, sigma).unwrap();
    assert!(r.circulations.iter().all(|v| v.abs() <= 1.0));
    let cfg = SimConfig::new(1e-3, 1.0);
    let mut orig = ParticleEnsemble::new(x, m, sigma, 5).unwrap();
    let mut resc = ParticleEnsemble::new(r.positions, r.circulations, r.sigma, 5).unwrap();
    for _ in 0..100 {
        orig = em_step(&orig, &cfg).unwrap();
        resc = em_step(&resc, &cfg).unwrap();
        for (p, q) in orig.positions.iter().zip(&resc.positions) {
            assert!((*p - *q * a.sqrt()).norm() <= 1e-12 * (1.0 + p.norm()));
        }
    }
}

#[test]
fn blob_kernel_bounds_drift() {
    let ens = ParticleEnsemble::new(vec![Vec2::new(1e-9, 0.0), Vec2::ZERO], vec![1.0, 1.0], 0.0, 0).unwrap();
    let mut cfg = SimConfig::new(1e-3, 1.0);
    cfg.kernel = KernelSpec::blob(0.1);
    let b = drift_velocities(&ens, &cfg);
    assert!(b[0].norm() <= 0.5 / (4.0 * std::f64::consts::PI * 0.1));
}

#[test]
fn child_seeds_and_replicas() {
    let sampler = ProductGaussian { law: CirculationLaw::Uniform { a: 1.0 }, mean: Vec2::ZERO, std: 1.0 };
    let mut cfg = SimConfig::new(0.01, 0.0);
    cfg.n_replicas = 64;
    cfg.seed = 2024;
    let runs = run_ensemble(&sampler, 256, 0.1, &cfg, &[]).unwrap();
    let mut seeds: Vec<u64> = runs.iter().map(|t| t.last().seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 64);
}

#[test]
fn single_replica_is_simulate() {
    let sampler = SignedDipole { a: 1.0, d: 1.0, std: 0.5 };
    let mut cfg = SimConfig::new(0.01, 0.1);
    cfg.seed = 3;
    let runs = run_ensemble(&sampler, 32, 0.2, &cfg, &[]).unwrap();
    assert_eq!(runs.len(), 1);
    let start = ParticleEnsemble::new(
        runs[0].last().positions.clone(),
        runs[0].last().circulations().to_vec(),
        0.2,
        runs[0].last().seed,
    )
    .unwrap();
    // rebuild replica 0 by hand: same seed, same initial draw
    let again = run_ensemble(&sampler, 32, 0.2, &cfg, &[]).unwrap();
    assert_eq!(again[0].last(), runs[0].last());
    assert_eq!(start.circulations(), runs[0].last().circulations());
}

#[test]
fn diffusion_variance_closed_form() {
    let sampler = ProductGaussian { law: CirculationLaw::Constant { c: 1.0 }, mean: Vec2::ZERO, std: 0.7 };
    let mut cfg = SimConfig::new(0.01, 1.0);
    cfg.n_replicas = 10_000;
    cfg.seed = 99;
    let runs = run_ensemble(&sampler, 1, 0.5, &cfg, &[]).unwrap();
    let n = runs.len() as f64;
    let expected = 0.49 + 2.0 * 0.5 * 1.0;
    for comp in [0, 1] {
        let v: Vec<f64> = runs.iter().map(|t| {
            let p = t.last().positions[0];
            if comp == 0 { p.x1 } else { p.x2 }
        }).collect();
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0);
        // SE of a Gaussian sample variance
        let se = expected * (2.0 / (n - 1.0)).sqrt();
        assert!((var - expected).abs() <= 3.0 * se, "var {var} vs {expected}");
    }
}

#[test]
fn direct_runs_independent_of_thread_count() {
    let ens = random_state(300, 6, 0.2);
    let cfg = SimConfig::new(1e-3, 0.02);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate(&ens, &cfg, &[]).unwrap())
    };
    assert_eq!(run(1).last(), run(4).last());
}

#[test]
fn snapshot_csv_rows() {
    let ens = random_state(3, 1, 0.0);
    let mut buf = Vec::new();
    write_snapshot_csv(&mut buf, &ens, true).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "step,t,i,m,x1,x2");
    assert_eq!(lines.len(), 4);
    let f: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(f[4], ens.positions[1].x1);
}
