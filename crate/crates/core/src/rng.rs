//! Seeded random streams.
//!
//! Every stochastic operation owns a [`ChaCha8Rng`] built from an explicit
//! seed, so results are reproducible across platforms and crate versions.
//! Independent sub-streams (one per game, per request, ...) use ChaCha's
//! stream selector rather than re-seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StdRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The `stream`-th independent generator derived from `seed`.
pub fn substream(seed: u64, stream: u64) -> StdRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw on `[0, 1)`.
pub fn unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
