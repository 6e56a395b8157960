use vx_pde::{gaussian_field, GridSpec, PdeSolver, VelocityMode, VorticityField};
use vx_regularity::*;

fn heat(grid: GridSpec, t0: f64, times: &[f64]) -> Vec<VorticityField> {
    let s = PdeSolver::new(grid, 1.0, VelocityMode::FreeSpace).unwrap();
    let g0 = gaussian_field(grid, 1.0, 0.0, 0.0, 2.0 * t0, 0.0);
    times.iter().map(|&t| s.heat_flow(&g0, t).unwrap()).collect()
}

fn bound(t: f64, r2: f64) -> f64 {
    (1.0 + (1.0 + t).ln()) / (1.0 + t) + r2 / (1.0 + t).powi(2)
}

#[test]
fn gaussian_log_derivatives_against_closed_form() {
    let grid = GridSpec::new(32.0, 256);
    let times = [1.0, 2.0, 4.0, 8.0];
    let f = heat(grid, 1.0, &times);
    let r = log_growth_check(&f, &times).unwrap();
    for (i, &t) in times.iter().enumerate() {
        let s = t + 1.0;
        // Hessian of log g is -Id/(2s); the ratio peaks at x = 0
        let hess = 1.0 / (2.0 * s) / bound(t, 0.0);
        assert!((r.hess.per_time[i] / hess - 1.0).abs() < 1e-6, "t={t}: {} vs {hess}", r.hess.per_time[i]);
        // |∇log g|² = |x|²/(4s²) grows along |x|, capped by the admissible edge
        let edge = f[i]
            .values
            .iter()
            .enumerate()
            .filter(|(_, &g)| g > 1e-12 * f[i].values.iter().cloned().fold(0.0, f64::max))
            .map(|(j, _)| {
                let (a, b) = grid.point(j);
                a * a + b * b
            })
            .fold(0.0, f64::max);
        let grad = edge / (4.0 * s * s) / bound(t, edge);
        // at g ≈ 1e-12·peak, FFT roundoff in ∇g (~1e-16·k_max·peak) limits the quotient to ~1e-3
        assert!((r.grad.per_time[i] / grad - 1.0).abs() < 1e-3, "t={t}: {} vs {grad}", r.grad.per_time[i]);
    }
    assert!(r.grad.holds && r.hess.holds);
    assert!(r.grad.constant.is_finite() && r.hess.constant.is_finite());
}

#[test]
fn missing_time_is_an_error() {
    let f = heat(GridSpec::new(16.0, 64), 1.0, &[1.0, 2.0]);
    assert!(matches!(log_growth_check(&f, &[3.0]), Err(RegularityError::Invalid(_))));
}

fn aux_setup() -> (Vec<VorticityField>, f64, AuxConstants) {
    let grid = GridSpec::new(16.0, 256);
    let s0 = 0.05;
    let f = heat(grid, s0, &[0.0, 0.5, 1.0, 2.0, 4.0]);
    // |∇log g0|² + (C/σ)log g0 = |x|²(1/(4s0²) - C/(4 s0)) + C ln A0 ≤ C ln A0 once C ≥ 1/s0
    let c = 25.0;
    let a0 = 1.0 / (4.0 * std::f64::consts::PI * s0);
    (f, 1.0, AuxConstants { c, c1: c * a0.ln() + 0.5 })
}

#[test]
fn aux_function_nonpositive_along_heat_flow() {
    let (f, sigma, k) = aux_setup();
    let r = aux_sign_check(&f, sigma, k).unwrap();
    assert!(r.holds, "{r:?}");
    // closed form: F/g = |x|²(1/(4s²) - C/(4s)) + C ln(1/(4πs)) - C1 ≤ 0 everywhere
    for (i, g) in f.iter().enumerate() {
        let s = 0.05 + g.t;
        let centre = k.c * (1.0 / (4.0 * std::f64::consts::PI * s)).ln() - k.c1;
        assert!(centre < 0.0);
        assert!(r.per_time[i] <= 1e-8 * 1e3, "t={}: {}", g.t, r.per_time[i]);
    }
}

#[test]
fn undersized_c1_is_refused() {
    let (f, sigma, mut k) = aux_setup();
    k.c1 -= 1.0;
    match aux_sign_check(&f, sigma, k) {
        Err(RegularityError::Precondition { value, bound, x1, x2 }) => {
            assert!(value > bound);
            assert!(x1.abs() < 1.0 && x2.abs() < 1.0, "violation expected near the centre");
        }
        other => panic!("expected refusal, got {other:?}"),
    }
}
