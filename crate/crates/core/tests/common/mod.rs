#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wbnsl::synth::{random_instance, random_order, InstanceShape};
use wbnsl::{MultiScores, VarOrder};

/// A small instance and start ordering drawn from `seed`.
pub fn small_case(seed: u64, max_n: usize) -> (MultiScores, VarOrder) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let f = random_instance(&mut rng, n, &InstanceShape::default());
    let tau = random_order(&mut rng, n);
    (f, tau)
}

pub fn shaped_case(seed: u64, n: usize, shape: &InstanceShape) -> (MultiScores, VarOrder) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random_instance(&mut rng, n, shape);
    let tau = random_order(&mut rng, n);
    (f, tau)
}
