//! Seed derivation and counter-friendly normal draws shared by the samplers.

use std::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica `r` derived from a master seed. Injective in `r` for a
/// fixed master since splitmix64 is a bijection.
pub fn child_seed(master: u64, r: u64) -> u64 {
    splitmix64(master.wrapping_add(GOLDEN.wrapping_mul(r.wrapping_add(1))))
}

/// Uniform on the open interval (0, 1) from the top 52 bits.
#[inline]
pub fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Box-Muller: two uniforms in (0,1) to two independent standard normals.
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    (r * c, r * s)
}

pub fn normal_pair<R: rand::RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    box_muller(open_unit(rng.next_u64()), open_unit(rng.next_u64()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn child_seeds_distinct() {
        let mut s: Vec<u64> = (0..1000).map(|r| child_seed(42, r)).collect();
        s.sort_unstable();
        s.dedup();
        assert_eq!(s.len(), 1000);
    }

    #[test]
    fn open_unit_bounds() {
        assert!(open_unit(0) > 0.0);
        assert!(open_unit(u64::MAX) < 1.0);
    }
}
