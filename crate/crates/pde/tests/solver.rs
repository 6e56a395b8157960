use std::f64::consts::PI;
use std::time::Instant;
use vx_pde::*;

fn max_rel_err(a: &VorticityField, b: &VorticityField) -> f64 {
    let peak = b.max_abs();
    a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / peak
}

#[test]
fn zero_field_has_zero_velocity_and_stays_zero() {
    let g = GridSpec::new(4.0, 32);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let z = VorticityField::zeros(g, 0.0);
    let (u1, u2) = s.velocity(&z).unwrap();
    assert!(u1.iter().chain(&u2).all(|v| *v == 0.0));
    assert_eq!(s.step_vorticity(&z, 0.01).unwrap().values, z.values);
}

#[test]
fn lamb_oseen_oracle() {
    let g = GridSpec::new(8.0, 256);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let start = Instant::now();
    let w0 = lamb_oseen(g, 1.0, 1.0, 0.1, 0.0);
    let w1 = s.advance(&w0, 1.0, 0.01).unwrap();
    let err = max_rel_err(&w1, &lamb_oseen(g, 1.0, 1.0, 0.1, 1.0));
    assert!(err <= 1e-6, "Lamb-Oseen error {err:e}");
    assert!(start.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn periodic_inversion_misses_the_image_velocity() {
    // the literal periodic multiplier carries an L^-4 image error
    let g = GridSpec::new(8.0, 128);
    let s = PdeSolver::new(g, 0.1, VelocityMode::Periodic).unwrap();
    let w = lamb_oseen(g, 1.0, 1.0, 0.1, 0.0);
    let (u1, u2) = s.velocity(&w).unwrap();
    let free = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let (v1, v2) = free.velocity(&w).unwrap();
    let mut worst_p: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for i in 0..g.len() {
        let (a, b) = g.point(i);
        let r = a.hypot(b);
        let sp = lamb_oseen_velocity(1.0, 1.0, 0.1, 0.0, r);
        let (e1, e2) = if r > 0.0 { (-sp * b / r, sp * a / r) } else { (0.0, 0.0) };
        worst_p = worst_p.max((u1[i] - e1).abs().max((u2[i] - e2).abs()));
        worst_f = worst_f.max((v1[i] - e1).abs().max((v2[i] - e2).abs()));
    }
    assert!(worst_p > 1e-4, "{worst_p:e}");
    // residual is the truncated lattice series at the box corners
    assert!(worst_f < 1e-8, "{worst_f:e}");
}

#[test]
fn radial_vorticity_gives_azimuthal_velocity() {
    let g = GridSpec::new(8.0, 256);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let w = VorticityField::from_fn(g, 0.0, |a, b| (-(a * a + b * b)).exp());
    let (u1, u2) = s.velocity(&w).unwrap();
    let (mut radial, mut speed): (f64, f64) = (0.0, 0.0);
    for i in 0..g.len() {
        let (a, b) = g.point(i);
        let r = a.hypot(b);
        if r > 0.0 {
            radial = radial.max(((u1[i] * a + u2[i] * b) / r).abs());
        }
        speed = speed.max(u1[i].hypot(u2[i]));
    }
    assert!(radial / speed <= 1e-6, "{:e}", radial / speed);
}

#[test]
fn single_mode_multiplier() {
    let l = 4.0;
    let g = GridSpec::new(l, 64);
    let s = PdeSolver::new(g, 0.0, VelocityMode::Periodic).unwrap();
    let k = PI / l;
    let w = VorticityField::from_fn(g, 0.0, |a, _| (k * a).sin());
    let (u1, u2) = s.velocity(&w).unwrap();
    // ψ = -sin(k x1)/k², u = (-∂2ψ, ∂1ψ) = (0, -cos(k x1)/k)
    for i in 0..g.len() {
        let (a, _) = g.point(i);
        assert!(u1[i].abs() < 1e-12);
        assert!((u2[i] + (k * a).cos() / k).abs() < 1e-12);
    }
}

#[test]
fn circulation_conserved_over_1000_steps() {
    let g = GridSpec::new(8.0, 128);
    let s = PdeSolver::new(g, 0.05, VelocityMode::FreeSpace).unwrap();
    let mut w = VorticityField::from_fn(g, 0.0, |a, b| {
        (-((a - 0.8).powi(2) + b * b) / 0.5).exp() - 0.6 * (-((a + 0.8).powi(2) + (b - 0.3).powi(2)) / 0.4).exp()
    });
    let c0 = w.integral();
    for _ in 0..1000 {
        w = s.step_vorticity(&w, 0.01).unwrap();
    }
    assert!((w.integral() - c0).abs() <= 1e-10 * c0.abs(), "{} vs {}", w.integral(), c0);
}

#[test]
fn inviscid_advection_keeps_l2() {
    let g = GridSpec::new(6.0, 64);
    let s = PdeSolver::new(g, 0.0, VelocityMode::FreeSpace).unwrap();
    let mut w = VorticityField::from_fn(g, 0.0, |a, b| {
        (-((a - 0.6).powi(2) + b * b)).exp() + 0.8 * (-((a + 0.6).powi(2) + (b - 0.2).powi(2))).exp()
    });
    let n0 = w.lp_norm(2.0);
    for _ in 0..100 {
        w = s.step_vorticity(&w, 0.01).unwrap();
    }
    let drift = (w.lp_norm(2.0) - n0).abs() / n0;
    assert!(drift <= 1e-8, "{drift:e}");
}

#[test]
fn sup_norm_non_increasing() {
    let g = GridSpec::new(6.0, 64);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let mut w = VorticityField::from_fn(g, 0.0, |a, b| {
        (-((a - 0.7).powi(2) + b * b) / 0.6).exp() + (-((a + 0.7).powi(2) + b * b) / 0.6).exp()
    });
    for _ in 0..100 {
        let next = s.step_vorticity(&w, 0.02).unwrap();
        assert!(next.max_abs() <= w.max_abs() + 1e-10);
        w = next;
    }
}

#[test]
fn grid_doubling_converges_spectrally() {
    let err = |n| {
        let g = GridSpec::new(8.0, n);
        let mut s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
        // the coarse grid rings at the 1e-5 level everywhere
        s.monitor_truncation = false;
        let w = s.advance(&lamb_oseen(g, 1.0, 1.0, 0.1, 0.0), 0.2, 0.01).unwrap();
        max_rel_err(&w, &lamb_oseen(g, 1.0, 1.0, 0.1, 0.2))
    };
    let (e32, e64) = (err(32), err(64));
    assert!(e64 * 10.0 <= e32, "{e32:e} -> {e64:e}");
}

#[test]
fn semigroup_property() {
    let g = GridSpec::new(8.0, 128);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let w = s.advance(&lamb_oseen(g, 1.0, 1.0, 0.1, 0.5), 1.0, 0.01).unwrap();
    assert!(max_rel_err(&w, &lamb_oseen(g, 1.0, 1.0, 0.1, 1.0)) < 1e-9);
}

#[test]
fn lamb_oseen_formula() {
    let g = GridSpec::new(8.0, 128);
    let w = lamb_oseen(g, 2.0, 1.0, 0.1, 1.0);
    assert!((w.integral() - 2.0).abs() < 1e-12);
    assert!((w.max_abs() - 2.0 / (4.0 * PI * 0.2)).abs() < 1e-14);
}

#[test]
fn cfl_refusal_suggests_dt() {
    let g = GridSpec::new(4.0, 64);
    let s = PdeSolver::new(g, 0.01, VelocityMode::FreeSpace).unwrap();
    let w = lamb_oseen(g, 50.0, 10.0, 0.01, 0.0);
    match s.step_vorticity(&w, 1.0) {
        Err(PdeError::Cfl { suggested, .. }) => {
            assert!(suggested < 1.0);
            assert!(s.step_vorticity(&w, suggested).is_ok());
        }
        other => panic!("expected CFL refusal, got {other:?}"),
    }
}

#[test]
fn truncation_monitor_fires() {
    let g = GridSpec::new(2.0, 32);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let w = lamb_oseen(g, 1.0, 3.0, 0.1, 0.0);
    let r = s.step_vorticity(&w, 0.01);
    assert!(matches!(r, Err(PdeError::Truncation { .. })), "{r:?}");
}

#[test]
fn grid_mismatch_is_an_error() {
    let s = PdeSolver::new(GridSpec::new(4.0, 32), 0.1, VelocityMode::FreeSpace).unwrap();
    let w = VorticityField::zeros(GridSpec::new(4.0, 64), 0.0);
    assert!(matches!(s.step_vorticity(&w, 0.01), Err(PdeError::GridMismatch(_))));
}

#[test]
fn dump_round_trip() {
    let g = GridSpec::new(3.0, 32);
    let w = lamb_oseen(g, 1.0, 1.0, 0.1, 0.3);
    let bytes = write_field_dump(&w);
    assert_eq!(read_field_dump(&bytes).unwrap(), w);
    assert_eq!(read_field_dump(&bytes[..bytes.len() - 3]), Err(FieldIoError::Truncated));
    let mut bad = bytes.clone();
    bad[100] ^= 1;
    assert_eq!(read_field_dump(&bad), Err(FieldIoError::Checksum));
    let mut csv = Vec::new();
    write_field_csv(&mut csv, &w).unwrap();
    assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + 32 * 32);
}

#[test]
fn invalid_grids_rejected() {
    assert!(GridSpec::new(1.0, 16).validate().is_err());
    assert!(GridSpec::new(1.0, 48).validate().is_err());
    assert!(GridSpec::new(0.0, 64).validate().is_err());
}

#[test]
fn velocity_gradient_matches_closed_form() {
    let g = GridSpec::new(8.0, 128);
    let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
    let w = lamb_oseen(g, 1.0, 1.0, 0.1, 0.0);
    let [g11, g12, g21, g22] = s.velocity_gradient(&w).unwrap();
    let peak = w.max_abs();
    for i in 0..g.len() {
        // curl u = ω, div u = 0
        assert!((g21[i] - g12[i] - w.values[i]).abs() < 1e-9 * peak);
        assert!((g11[i] + g22[i]).abs() < 1e-9 * peak);
    }
}
