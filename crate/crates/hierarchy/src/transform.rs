#[derive(Debug, Clone, PartialEq)]
pub struct ZwTransform {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

/// `z_k = Σ_{i=k}^N x_i/(i-k+i0)^5`, `w_k = e^{-φ} z_k`. `x[0]` is `x_1`.
pub fn transform_zw(x: &[f64], i0: usize, phi: f64) -> ZwTransform {
    let n = x.len();
    let weights: Vec<f64> = (0..n).map(|d| ((d + i0) as f64).powi(-5)).collect();
    let z: Vec<f64> = (0..n).map(|k| x[k..].iter().zip(&weights).map(|(xi, wi)| xi * wi).sum()).collect();
    let e = (-phi).exp();
    let w = z.iter().map(|v| v * e).collect();
    ZwTransform { z, w }
}

/// `x_k ≤ i0^5 z_k` for every k, for nonnegative x.
pub fn recovery_holds(x: &[f64], z: &[f64], i0: usize) -> bool {
    let c = (i0 as f64).powi(5);
    x.iter().zip(z).all(|(xk, zk)| *xk <= c * zk * (1.0 + 1e-14))
}
