use crate::EntropyError;
use serde::{Deserialize, Serialize};

/// Uniform axis with nodes `lo + i·h`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub h: f64,
    pub n: usize,
}

impl Axis {
    pub fn new(lo: f64, h: f64, n: usize) -> Self {
        Axis { lo, h, n }
    }

    /// `n` nodes spanning `[lo, hi]` inclusive.
    pub fn span(lo: f64, hi: f64, n: usize) -> Self {
        Axis { lo, h: (hi - lo) / (n - 1) as f64, n }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.h
    }
}

/// Tensor grid; flat index is row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Self {
        Grid { axes }
    }

    pub fn line(axis: Axis) -> Self {
        Grid { axes: vec![axis] }
    }

    /// The square `[-L, L)²` grid of the vorticity solver.
    pub fn from_pde(g: &vx_pde::GridSpec) -> Self {
        let a = Axis::new(-g.half_width, g.h(), g.n);
        Grid { axes: vec![a, a] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.h).product()
    }

    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for d in (0..self.dim().saturating_sub(1)).rev() {
            s[d] = s[d + 1] * self.axes[d + 1].n;
        }
        s
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for d in (0..self.dim()).rev() {
            out[d] = idx % self.axes[d].n;
            idx /= self.axes[d].n;
        }
        out
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx).iter().zip(&self.axes).map(|(i, a)| a.node(*i)).collect()
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.point(i))).collect()
    }

    pub fn integrate(&self, v: &[f64]) -> f64 {
        v.iter().sum::<f64>() * self.cell_volume()
    }

    /// `self × other`
    pub fn product(&self, other: &Grid) -> Grid {
        Grid { axes: self.axes.iter().chain(&other.axes).copied().collect() }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.axes.len() == other.axes.len()
            && self.axes.iter().zip(&other.axes).all(|(a, b)| {
                a.n == b.n && (a.lo - b.lo).abs() <= 1e-12 * (1.0 + a.lo.abs()) && (a.h - b.h).abs() <= 1e-12 * a.h.abs()
            })
    }
}

pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GriddedDensity {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl GriddedDensity {
    /// Checked constructor: nonnegative values integrating to 1 within `1e-8`.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, EntropyError> {
        if values.len() != grid.len() {
            return Err(EntropyError::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(EntropyError::Invalid("density values must be finite and nonnegative".into()));
        }
        let mass = grid.integrate(&values);
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(EntropyError::Invalid(format!("density integrates to {mass}")));
        }
        Ok(GriddedDensity { grid, values })
    }

    /// Clamps negatives to zero and rescales to unit mass.
    pub fn normalized(grid: Grid, mut values: Vec<f64>) -> Result<Self, EntropyError> {
        if values.len() != grid.len() {
            return Err(EntropyError::GridMismatch(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        for v in values.iter_mut() {
            if !v.is_finite() {
                return Err(EntropyError::Invalid("non-finite density value".into()));
            }
            *v = v.max(0.0);
        }
        let mass = grid.integrate(&values);
        if mass <= 0.0 {
            return Err(EntropyError::Invalid("density has zero mass".into()));
        }
        let s = 1.0 / mass;
        values.iter_mut().for_each(|v| *v *= s);
        Ok(GriddedDensity { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self, EntropyError> {
        let v = grid.sample(f);
        Self::normalized(grid, v)
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn tensor(&self, other: &GriddedDensity) -> GriddedDensity {
        let mut v = Vec::with_capacity(self.values.len() * other.values.len());
        for a in &self.values {
            v.extend(other.values.iter().map(|b| a * b));
        }
        GriddedDensity { grid: self.grid.product(&other.grid), values: v }
    }

    pub(crate) fn check_same(&self, other: &GriddedDensity) -> Result<(), EntropyError> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(EntropyError::GridMismatch("densities live on different grids".into()))
        }
    }
}
