//! Shared fixtures for the criterion benches.

use mcu_forge_core::{build_cnu, Circuit, McGateSpec, Statevector, Unitary2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Haar-random target unitary, fixed per seed.
pub fn target(seed: u64) -> Unitary2 {
    Unitary2::haar_su2(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `C^n U` for a seeded random target.
pub fn cnu(n: usize, seed: u64) -> Circuit {
    build_cnu(&McGateSpec::new(n, target(seed)))
}

/// Random input state on `width` wires.
pub fn state(width: usize, seed: u64) -> Statevector {
    Statevector::random(width, &mut ChaCha8Rng::seed_from_u64(seed))
}
