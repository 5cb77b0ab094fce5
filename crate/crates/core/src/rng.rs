//! Seeded random streams.
//!
//! Every consumer derives its generator from a `(seed, stream)` pair, so
//! independent tasks (restarts, grid points) never share state and results
//! are reproducible regardless of execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
