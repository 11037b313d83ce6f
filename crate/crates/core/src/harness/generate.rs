//! Seeded random instance generation.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Var};

/// Clause-to-variable ratio at the 3-SAT phase transition.
pub const PHASE_TRANSITION_RATIO: f64 = 4.26;

/// Uniform random 3-SAT: `m` clauses over three distinct variables each with
/// random polarity. Panics if `n < 3`.
pub fn gen_random_3sat(n: u32, m: usize, seed: u64) -> Formula {
    assert!(n >= 3, "random 3-SAT needs at least 3 variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clauses: Vec<_> = (0..m)
        .map(|_| {
            sample(&mut rng, n as usize, 3)
                .into_iter()
                .map(|v| Var(v as u32).lit(rng.random()))
                .collect()
        })
        .collect();
    Formula::new(n, clauses)
}

/// Clause count for `n` variables at the phase transition.
pub fn phase_transition_clauses(n: u32) -> usize {
    (n as f64 * PHASE_TRANSITION_RATIO).round() as usize
}
