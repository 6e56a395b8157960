use serde::{Deserialize, Serialize};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x1: f64,
    pub x2: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x1: 0.0, x2: 0.0 };

    #[inline(always)]
    pub const fn new(x1: f64, x2: f64) -> Self {
        Vec2 { x1, x2 }
    }

    #[inline(always)]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2
    }

    #[inline(always)]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline(always)]
    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    /// Rotation by +π/2.
    #[inline(always)]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.x2, self.x1)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl AddAssign for Vec2 {
    #[inline(always)]
    fn add_assign(&mut self, o: Vec2) {
        self.x1 += o.x1;
        self.x2 += o.x2;
    }
}

impl SubAssign for Vec2 {
    #[inline(always)]
    fn sub_assign(&mut self, o: Vec2) {
        self.x1 -= o.x1;
        self.x2 -= o.x2;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x1 * s, self.x2 * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x1 / s, self.x2 / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline(always)]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x1, -self.x2)
    }
}
