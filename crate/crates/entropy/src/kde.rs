use crate::{EntropyError, Grid, GriddedDensity};
use rayon::prelude::*;

const CUTOFF: f64 = 7.5;
const CHUNK: usize = 4096;

/// Silverman's rule with the mean per-axis standard deviation.
pub fn silverman_bandwidth(samples: &[f64], dim: usize) -> f64 {
    let n = samples.len() / dim;
    let mut s = 0.0;
    for d in 0..dim {
        let xs = samples.iter().skip(d).step_by(dim);
        let mean = xs.clone().sum::<f64>() / n as f64;
        let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
        s += var.sqrt();
    }
    s / dim as f64 * (4.0 / ((dim as f64 + 2.0) * n as f64)).powf(1.0 / (dim as f64 + 4.0))
}

fn accumulate(grid: &Grid, samples: &[f64], weights: Option<&[f64]>, first: usize, bw: f64, out: &mut [f64]) {
    let dim = grid.dim();
    let strides = grid.strides();
    let norm = (2.0 * std::f64::consts::PI).sqrt() * bw;
    let mut ranges: Vec<(usize, Vec<f64>)> = vec![(0, Vec::new()); dim];
    for (s, x) in samples.chunks_exact(dim).enumerate() {
        let w = weights.map_or(1.0, |w| w[first + s]);
        let mut empty = false;
        for (d, a) in grid.axes.iter().enumerate() {
            let lo = ((x[d] - CUTOFF * bw - a.lo) / a.h).ceil().max(0.0);
            let hi = ((x[d] + CUTOFF * bw - a.lo) / a.h).floor().min(a.n as f64 - 1.0);
            if hi < lo {
                empty = true;
                break;
            }
            let (lo, hi) = (lo as usize, hi as usize);
            let r = &mut ranges[d];
            r.0 = lo;
            r.1.clear();
            r.1.extend((lo..=hi).map(|i| {
                let z = (a.node(i) - x[d]) / bw;
                (-0.5 * z * z).exp() / norm
            }));
        }
        if empty {
            continue;
        }
        // walk the stencil box
        let mut idx = vec![0usize; dim];
        'walk: loop {
            let mut v = w;
            let mut flat = 0;
            for d in 0..dim {
                v *= ranges[d].1[idx[d]];
                flat += (ranges[d].0 + idx[d]) * strides[d];
            }
            out[flat] += v;
            let mut d = dim;
            loop {
                if d == 0 {
                    break 'walk;
                }
                d -= 1;
                idx[d] += 1;
                if idx[d] < ranges[d].1.len() {
                    continue 'walk;
                }
                idx[d] = 0;
            }
        }
    }
}

/// `Σ_i w_i Π_d φ_b(y_d - x_{i,d})` on the grid nodes, unnormalized.
/// `samples` is flat with `grid.dim()` coordinates per point. Summation
/// order is fixed, so the result does not depend on the thread count.
pub fn kde_weighted(samples: &[f64], weights: Option<&[f64]>, bandwidth: f64, grid: &Grid) -> Result<Vec<f64>, EntropyError> {
    let dim = grid.dim();
    if dim == 0 || samples.len() % dim != 0 {
        return Err(EntropyError::Invalid(format!("sample buffer length {} not a multiple of {dim}", samples.len())));
    }
    if samples.is_empty() {
        return Err(EntropyError::EmptySamples);
    }
    if let Some(w) = weights {
        if w.len() * dim != samples.len() {
            return Err(EntropyError::Invalid("one weight per sample required".into()));
        }
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(EntropyError::Invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let parts: Vec<Vec<f64>> = samples
        .par_chunks(CHUNK * dim)
        .enumerate()
        .map(|(c, chunk)| {
            let mut buf = vec![0.0; grid.len()];
            accumulate(grid, chunk, weights, c * CHUNK, bandwidth, &mut buf);
            buf
        })
        .collect();
    let mut out = vec![0.0; grid.len()];
    for p in parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

/// Gaussian KDE renormalized on the grid; `bandwidth = 0` selects Silverman.
pub fn kde_density(samples: &[f64], bandwidth: f64, grid: &Grid) -> Result<GriddedDensity, EntropyError> {
    let dim = grid.dim();
    if samples.is_empty() {
        return Err(EntropyError::EmptySamples);
    }
    if samples.len() < 2 * dim {
        return Err(EntropyError::Invalid("at least two samples required".into()));
    }
    let bw = if bandwidth == 0.0 { silverman_bandwidth(samples, dim) } else { bandwidth };
    if !(bw > 0.0) {
        return Err(EntropyError::Invalid("Silverman bandwidth is zero for degenerate samples".into()));
    }
    let v = kde_weighted(samples, None, bw, grid)?;
    GriddedDensity::normalized(grid.clone(), v)
}
