//! Exhaustive search of the r-insert and r-swap neighborhoods.
//!
//! Both neighborhoods have `n^O(r)` members; no better bound is expected in
//! general, so callers should check [`estimated_size`] before searching
//! large radii.

use std::collections::HashSet;

use crate::model::{Diagnostics, MultiScores, SearchResult, VarOrder};
use crate::order_dp::best_dag_for_ordering;
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborhoodKind {
    Insert,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborhoodSpec {
    pub kind: NeighborhoodKind,
    pub radius: usize,
}

/// Collects orderings in first-seen order, dropping repeats.
struct Dedup {
    seen: HashSet<Vec<usize>>,
    out: Vec<VarOrder>,
}

impl Dedup {
    fn new() -> Self {
        Self {
            seen: HashSet::new(),
            out: Vec::new(),
        }
    }

    fn push(&mut self, seq: Vec<usize>) -> bool {
        if self.seen.contains(&seq) {
            return false;
        }
        self.seen.insert(seq.clone());
        self.out.push(VarOrder::new(seq).expect("permutation"));
        true
    }
}

/// Calls `f` on every increasing `m`-subset of `0..n`.
fn for_each_combination(n: usize, m: usize, mut f: impl FnMut(&[usize])) {
    if m > n {
        return;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        f(&idx);
        let Some(i) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every ordering at insert distance at most `r` from `tau`, each once.
///
/// An ordering is within distance `r` iff removing some `min(r, n)`
/// variables from both leaves the same sequence, so it suffices to pick the
/// removed set, keep the rest in `tau` order and place the removed
/// variables in every slot/order combination.
pub fn enumerate_insert_neighbors(tau: &VarOrder, r: usize) -> Vec<VarOrder> {
    let n = tau.len();
    let m = r.min(n);
    let mut acc = Dedup::new();
    acc.push(tau.as_slice().to_vec());
    for_each_combination(n, m, |removed| {
        let moved: Vec<usize> = removed.iter().map(|&i| tau.at(i)).collect();
        let base: Vec<usize> = (0..n).filter(|i| !removed.contains(i)).map(|i| tau.at(i)).collect();
        for_each_combination(n, m, |slots| {
            let mut perm: Vec<usize> = (0..m).collect();
            loop {
                let mut seq = Vec::with_capacity(n);
                let (mut b, mut s) = (0, 0);
                for pos in 0..n {
                    if s < m && slots[s] == pos {
                        seq.push(moved[perm[s]]);
                        s += 1;
                    } else {
                        seq.push(base[b]);
                        b += 1;
                    }
                }
                acc.push(seq);
                if !crate::oracle::next_permutation(&mut perm) {
                    break;
                }
            }
        });
    });
    acc.out
}

/// Every ordering reachable with at most `r` transpositions, each once, in
/// breadth-first order.
pub fn enumerate_swap_neighbors(tau: &VarOrder, r: usize) -> Vec<VarOrder> {
    let n = tau.len();
    let mut acc = Dedup::new();
    acc.push(tau.as_slice().to_vec());
    let mut frontier = vec![tau.as_slice().to_vec()];
    for _ in 0..r {
        let mut next = Vec::new();
        for seq in &frontier {
            for i in 0..n {
                for j in i + 1..n {
                    let mut s = seq.clone();
                    s.swap(i, j);
                    if acc.push(s.clone()) {
                        next.push(s);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    acc.out
}

pub fn enumerate_neighbors(tau: &VarOrder, spec: NeighborhoodSpec) -> Vec<VarOrder> {
    match spec.kind {
        NeighborhoodKind::Insert => enumerate_insert_neighbors(tau, spec.radius),
        NeighborhoodKind::Swap => enumerate_swap_neighbors(tau, spec.radius),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Upper bound on the neighborhood size (the work the XP search will do).
pub fn estimated_size(n: usize, spec: NeighborhoodSpec) -> f64 {
    let r = spec.radius;
    match spec.kind {
        NeighborhoodKind::Insert => {
            let m = r.min(n);
            let fact: f64 = (1..=m).map(|i| i as f64).product();
            binomial(n, m) * binomial(n, m) * fact
        }
        NeighborhoodKind::Swap => {
            let pairs = binomial(n, 2);
            (0..=r).map(|i| pairs.powi(i as i32)).sum()
        }
    }
}

/// Best `best_dag_for_ordering` over the whole neighborhood. The earliest
/// neighbor in enumeration order wins ties, so `tau` is kept unless beaten.
pub fn local_search_xp(scores: &MultiScores, tau: &VarOrder, k: u64, spec: NeighborhoodSpec) -> SearchResult {
    let neighbors = enumerate_neighbors(tau, spec);
    let dags = par::map_slice(&neighbors, |sigma| best_dag_for_ordering(scores, sigma, k));
    let best = par::first_max_by(&dags, |d| d.score).expect("tau is always a neighbor");
    let evaluated = dags.len() as u64;
    SearchResult {
        dag: dags.into_iter().nth(best).expect("index in range"),
        diagnostics: Diagnostics {
            iterations: evaluated,
            evaluations: evaluated,
            ..Diagnostics::default()
        },
    }
}
