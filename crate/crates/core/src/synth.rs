//! Random instance generators for tests, benchmarks and experiments.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{MultiScores, ScoreTriple, VarOrder};

/// Shape of small random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceShape {
    /// Triples per variable, including the empty parent set.
    pub max_triples: usize,
    pub max_parents: usize,
    pub max_weight: u64,
}

impl Default for InstanceShape {
    fn default() -> Self {
        Self {
            max_triples: 6,
            max_parents: 2,
            max_weight: 2,
        }
    }
}

/// Uniformly random permutation of `0..n`.
pub fn random_order<R: Rng + ?Sized>(rng: &mut R, n: usize) -> VarOrder {
    let mut seq: Vec<usize> = (0..n).collect();
    seq.shuffle(rng);
    VarOrder::new(seq).expect("shuffle keeps a permutation")
}

/// Small random instance whose scores are multiples of 1/4.
///
/// Scores of this form add up exactly in `f64`, so solvers that pick the
/// same optimum value agree bit for bit even when they sum in different
/// orders.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, shape: &InstanceShape) -> MultiScores {
    let triples = (0..n)
        .map(|v| {
            let base = -f64::from(rng.gen_range(0..200u32)) / 4.0;
            let mut list = vec![ScoreTriple::new([], base, 0)];
            let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let extra = rng.gen_range(0..shape.max_triples.max(1));
            for _ in 0..extra {
                if others.is_empty() {
                    break;
                }
                let size = rng.gen_range(1..=shape.max_parents.min(others.len()).max(1));
                let parents: Vec<usize> = others.choose_multiple(rng, size).copied().collect();
                let score = base + f64::from(rng.gen_range(-40..=60i32)) / 4.0;
                let weight = rng.gen_range(0..=shape.max_weight);
                list.push(ScoreTriple::new(parents, score, weight));
            }
            list
        })
        .collect();
    MultiScores::unnamed(triples).expect("generator output is well formed")
}

/// Larger instance with BIC-like scores.
///
/// A hidden DAG is drawn first; each candidate parent set is rewarded for
/// true parents and penalized per parent, with a little noise, and
/// candidates include spurious parents on both sides of the hidden order so
/// that the ordering matters. All weights are zero.
pub fn bic_like_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, max_triples: usize) -> MultiScores {
    let hidden = random_order(rng, n);
    let true_parents: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let pos = hidden.position(v);
            let before: Vec<usize> = hidden.as_slice()[..pos].to_vec();
            let k = rng.gen_range(0..=3usize).min(before.len());
            before.choose_multiple(rng, k).copied().collect()
        })
        .collect();
    let triples = (0..n)
        .map(|v| {
            let base = -rng.gen_range(400.0..1200.0f64);
            let gains: Vec<f64> = (0..n)
                .map(|u| {
                    if true_parents[v].contains(&u) {
                        rng.gen_range(20.0..120.0)
                    } else if rng.gen_bool(0.15) {
                        rng.gen_range(0.0..30.0)
                    } else {
                        0.0
                    }
                })
                .collect();
            let penalty = rng.gen_range(8.0..14.0);
            let others: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let mut sets: Vec<Vec<usize>> = Vec::new();
            for &u in &true_parents[v] {
                sets.push(vec![u]);
            }
            if true_parents[v].len() >= 2 {
                sets.push(true_parents[v].clone());
            }
            while sets.len() + 1 < max_triples.max(1) {
                let size = rng.gen_range(1..=3usize.min(others.len()).max(1));
                let mut s: Vec<usize> = others.choose_multiple(rng, size).copied().collect();
                if rng.gen_bool(0.5) && !true_parents[v].is_empty() {
                    s.push(*true_parents[v].choose(rng).expect("non-empty"));
                }
                s.sort_unstable();
                s.dedup();
                sets.push(s);
            }
            sets.truncate(max_triples.saturating_sub(1));
            let mut list = vec![ScoreTriple::new([], base, 0)];
            for s in sets {
                let gain: f64 = s.iter().map(|&u| gains[u]).sum();
                let size = s.len() as f64;
                let score = base + gain - penalty * size * (1.0 + 0.25 * size) + rng.gen_range(-2.0..2.0);
                list.push(ScoreTriple::new(s, score, 0));
            }
            list
        })
        .collect();
    MultiScores::unnamed(triples).expect("generator output is well formed")
}
