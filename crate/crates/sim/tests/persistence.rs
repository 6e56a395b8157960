use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vx_kernel::Vec2;
use vx_sim::*;

fn random_state(n: usize, seed: u64) -> ParticleEnsemble {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..n).map(|_| Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0))).collect();
    let m = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    ParticleEnsemble::new(x, m, 0.25, seed).unwrap()
}

#[test]
fn round_trip() {
    let cfg = SimConfig::new(1e-3, 1.0);
    let ens = simulate_steps(&random_state(50, 1), &cfg, 7).unwrap();
    let back = restore(&checkpoint(&ens)).unwrap();
    assert_eq!(back, ens);
    assert_eq!(back.step, 7);
}

#[test]
fn resume_equals_uninterrupted() {
    let cfg = SimConfig::new(1e-3, 1.0);
    let ens = random_state(64, 2);
    let straight = simulate_steps(&ens, &cfg, 40).unwrap();
    let half = simulate_steps(&ens, &cfg, 17).unwrap();
    let resumed = simulate_steps(&restore(&checkpoint(&half)).unwrap(), &cfg, 23).unwrap();
    assert_eq!(resumed, straight);
}

#[test]
fn truncation_is_an_error() {
    let bytes = checkpoint(&random_state(10, 3));
    for cut in [0, 3, 8, 20, bytes.len() - 1] {
        assert!(matches!(restore(&bytes[..cut]), Err(CheckpointError::Truncated { .. })), "cut {cut}");
    }
}

#[test]
fn header_errors() {
    let mut bytes = checkpoint(&random_state(4, 3));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert_eq!(restore(&bad), Err(CheckpointError::BadMagic));
    bytes[4] = 9;
    assert_eq!(restore(&bytes), Err(CheckpointError::Version(9)));
}

proptest! {
    #[test]
    fn any_flipped_byte_is_rejected(pos in 8usize..(48 + 24 * 6 + 4), bit in 0u8..8) {
        let mut bytes = checkpoint(&random_state(6, 4));
        bytes[pos] ^= 1 << bit;
        prop_assert!(restore(&bytes).is_err());
    }
}
