use rand::{Rng, RngCore};
use vx_kernel::rng::normal_pair;
use vx_kernel::{CirculationLaw, Vec2};

/// Joint law of `(M_i, X_i(0))`; the two need not be independent.
pub trait InitialSampler: Sync {
    fn draw(&self, rng: &mut dyn RngCore) -> (f64, Vec2);
}

/// `M` from `law`, independent of `X ~ N(mean, std² I)`.
#[derive(Debug, Clone)]
pub struct ProductGaussian {
    pub law: CirculationLaw,
    pub mean: Vec2,
    pub std: f64,
}

impl InitialSampler for ProductGaussian {
    fn draw(&self, mut rng: &mut dyn RngCore) -> (f64, Vec2) {
        let m = self.law.sample(&mut rng);
        let (a, b) = normal_pair(rng);
        (m, self.mean + Vec2::new(a, b) * self.std)
    }
}

/// `M = ±a` with probability ½ each and `X ~ N(sign(M)·d·e1, std² I)`:
/// a counter-rotating pair of blobs with zero net circulation.
#[derive(Debug, Clone)]
pub struct SignedDipole {
    pub a: f64,
    pub d: f64,
    pub std: f64,
}

impl InitialSampler for SignedDipole {
    fn draw(&self, rng: &mut dyn RngCore) -> (f64, Vec2) {
        let s = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
        let (a, b) = normal_pair(rng);
        (s * self.a, Vec2::new(s * self.d, 0.0) + Vec2::new(a, b) * self.std)
    }
}
