use crate::PdeError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// the box is `[-L, L)²`
    pub half_width: f64,
    /// points per axis, a power of two
    pub n: usize,
    #[serde(default = "yes")]
    pub dealias: bool,
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Self {
        GridSpec { half_width, n, dealias: true }
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        if self.n < 32 || !self.n.is_power_of_two() {
            return Err(PdeError::InvalidGrid(format!("n must be a power of two ≥ 32, got {}", self.n)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(PdeError::InvalidGrid(format!("half width must be positive, got {}", self.half_width)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.h() * self.h()
    }

    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h()
    }

    /// Point of flat index `idx = i1·n + i2`.
    pub fn point(&self, idx: usize) -> (f64, f64) {
        (self.coord(idx / self.n), self.coord(idx % self.n))
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Samples `f(x1, x2)` on the grid.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| {
            let (a, b) = self.point(i);
            f(a, b)
        }).collect()
    }

    pub fn integrate(&self, v: &[f64]) -> f64 {
        v.iter().sum::<f64>() * self.cell_area()
    }

    /// Fraction of `∫|v|` in the outer 10% frame `max(|x1|,|x2|) > 0.9 L`.
    pub fn outer_fraction(&self, v: &[f64]) -> f64 {
        let cut = 0.9 * self.half_width;
        let (mut outer, mut total) = (0.0, 0.0);
        for (i, &w) in v.iter().enumerate() {
            let (a, b) = self.point(i);
            total += w.abs();
            if a.abs().max(b.abs()) > cut {
                outer += w.abs();
            }
        }
        if total == 0.0 {
            0.0
        } else {
            outer / total
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VorticityField {
    pub grid: GridSpec,
    pub t: f64,
    /// row-major, index `i1·n + i2`
    pub values: Vec<f64>,
}

impl VorticityField {
    pub fn zeros(grid: GridSpec, t: f64) -> Self {
        VorticityField { grid, t, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn(grid: GridSpec, t: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        VorticityField { grid, t, values: grid.sample(f) }
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.max_abs();
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * self.grid.cell_area()).powf(1.0 / p)
    }
}
