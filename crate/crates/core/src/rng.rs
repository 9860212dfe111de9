//! Reproducible random streams.
//!
//! Every Monte Carlo task draws from its own ChaCha8 stream, keyed by the
//! user seed and the task index. The stream a task sees is therefore a pure
//! function of `(seed, task)` and independent of how tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Independent stream for task `task` under user seed `seed`.
pub fn task_stream(seed: u64, task: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(task);
    rng
}
