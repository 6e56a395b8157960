use std::sync::Arc;
use vx_entropy::*;
use vx_kernel::{CirculationLaw, Vec2};
use vx_sim::ProductGaussian;

fn rho_bar() -> ProductGaussian {
    ProductGaussian { law: CirculationLaw::TwoPoint { a: 1.0, p: 0.5 }, mean: Vec2::new(0.0, 0.0), std: 1.0 }
}

/// `φ(z,w) = s·m_z cos(x2_z)·sin(x1_w)`: both marginal integrals vanish.
fn cancelling(s: f64, mode: CancellationMode) -> ConcentrationProbe {
    ConcentrationProbe {
        phi: TestFunction::Separable {
            a: Arc::new(|z: &Z| z[0] * z[2].cos()),
            b: Arc::new(move |w: &Z| s * w[1].sin()),
            sup_b: s,
        },
        mode,
    }
}

#[test]
fn zero_test_function() {
    let p = ConcentrationProbe { phi: TestFunction::General(Arc::new(|_: &Z, _: &Z| 0.0)), mode: CancellationMode::TwoSided };
    let r = exp_moment_probe(&p, &rho_bar(), &[5, 50], 200, 1).unwrap();
    for row in &r.rows {
        assert_eq!(row.log_moment, 0.0);
        assert_eq!(row.stderr, 0.0);
    }
    assert_eq!(r.gamma_estimate, 0.0);
}

#[test]
fn cancellation_precondition_refuses() {
    let p = ConcentrationProbe { phi: TestFunction::General(Arc::new(|_: &Z, _: &Z| 0.05)), mode: CancellationMode::OneSided };
    match exp_moment_probe(&p, &rho_bar(), &[10], 100, 2) {
        Err(EntropyError::CancellationFailed { residual, .. }) => assert!((residual - 0.05).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cancelling_probe_has_no_trend() {
    for mode in [CancellationMode::OneSided, CancellationMode::TwoSided] {
        let r = exp_moment_probe(&cancelling(0.1, mode), &rho_bar(), &[10, 100, 1000], 4000, 3).unwrap();
        assert!(r.cancellation_residual <= CANCELLATION_TOL);
        assert!(r.no_growth(3.0), "{mode:?}: {:?}", r.rows);
    }
}

#[test]
fn general_and_separable_paths_agree() {
    let sep = cancelling(0.1, CancellationMode::TwoSided);
    let gen = ConcentrationProbe {
        phi: TestFunction::General(Arc::new(|z: &Z, w: &Z| z[0] * z[2].cos() * 0.1 * w[1].sin())),
        mode: CancellationMode::TwoSided,
    };
    let a = exp_moment_probe(&sep, &rho_bar(), &[20], 500, 9).unwrap();
    let b = exp_moment_probe(&gen, &rho_bar(), &[20], 500, 9).unwrap();
    assert!((a.rows[0].log_moment - b.rows[0].log_moment).abs() < 1e-12);
}

#[test]
fn positive_control_grows_linearly() {
    let p = ConcentrationProbe {
        phi: TestFunction::Separable { a: Arc::new(|_: &Z| 1.0), b: Arc::new(|w: &Z| 0.1 * (w[1].sin() + 0.5)), sup_b: 0.15 },
        mode: CancellationMode::TwoSided,
    };
    assert!(exp_moment_probe(&p, &rho_bar(), &[10], 100, 4).is_err());
    let ns = [10usize, 100, 1000];
    let r = exp_moment_probe_unchecked(&p, &rho_bar(), &ns, 2000, 4).unwrap();
    assert!(!r.no_growth(3.0));
    let x: Vec<f64> = ns.iter().map(|n| *n as f64).collect();
    let y: Vec<f64> = r.rows.iter().map(|row| row.log_moment).collect();
    let (slope, ci) = fit_slope(&x, &y);
    // S_N = N·mean(a)·mean(b) with mean(b) = 0.05
    assert!((slope - 0.05).abs() < 0.005, "{slope} {ci:?}");
}

#[test]
fn small_scale_quadratic_in_s() {
    let ss = [0.025, 0.05, 0.1];
    let mut y = Vec::new();
    for &s in &ss {
        let r = exp_moment_probe(&cancelling(s, CancellationMode::OneSided), &rho_bar(), &[100], 20_000, 5).unwrap();
        y.push(r.rows[0].log_moment.ln());
    }
    let x: Vec<f64> = ss.iter().map(|s: &f64| s.ln()).collect();
    let (slope, _) = fit_slope(&x, &y);
    assert!((slope - 2.0).abs() < 0.1, "{slope}");
}

#[test]
fn gamma_of_bounded_separable() {
    let p = cancelling(0.1, CancellationMode::TwoSided);
    let g = gamma_estimate(&p.phi, &rho_bar(), 20_000, 1);
    // sup_w|φ(z,w)| = 0.1|cos x2| and the max over p sits at p = 1
    assert!(g > 0.0 && g <= C_JW * 0.01);
    assert!((C_JW - 2_561_965.533_401_193).abs() < 1e-6);
}
