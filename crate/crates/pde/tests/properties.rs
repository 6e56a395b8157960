use proptest::prelude::*;
use vx_pde::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_keeps_integral_and_max_principle(
        c1 in -1.0..1.0f64, c2 in -1.0..1.0f64, v in 0.3..0.8f64, amp in -2.0..2.0f64, sigma in 0.02..0.3f64,
    ) {
        let g = GridSpec::new(8.0, 64);
        let s = PdeSolver::new(g, sigma, VelocityMode::FreeSpace).unwrap();
        let w = VorticityField::from_fn(g, 0.0, |a, b| {
            amp * (-((a - c1).powi(2) + (b - c2).powi(2)) / (2.0 * v)).exp()
                + (-((a + c1).powi(2) + b * b) / (2.0 * v)).exp()
        });
        let next = s.step_vorticity(&w, 0.01).unwrap();
        prop_assert!((next.integral() - w.integral()).abs() <= 1e-12 * (1.0 + w.integral().abs()));
        prop_assert!(next.max_abs() <= w.max_abs() * (1.0 + 1e-10));
    }

    #[test]
    fn velocity_is_divergence_free(c1 in -1.0..1.0f64, v in 0.3..0.8f64) {
        let g = GridSpec::new(8.0, 64);
        let s = PdeSolver::new(g, 0.1, VelocityMode::FreeSpace).unwrap();
        let w = VorticityField::from_fn(g, 0.0, |a, b| (-((a - c1).powi(2) + b * b) / (2.0 * v)).exp());
        let [g11, _, _, g22] = s.velocity_gradient(&w).unwrap();
        let scale = w.max_abs();
        prop_assert!(g11.iter().zip(&g22).all(|(a, b)| (a + b).abs() <= 1e-9 * scale));
    }
}
