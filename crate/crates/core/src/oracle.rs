//! Brute-force reference solvers for small instances.
//!
//! Nothing here calls the solvers under test except `best_dag_for_ordering`,
//! which is itself checked against [`brute_best_dag_for_ordering`].

use crate::distance::Distance;
use crate::error::{ModelError, Result};
use crate::model::{is_acyclic, Diagnostics, MultiScores, ScoredDag, SearchResult, VarOrder};
use crate::order_dp::best_dag_for_ordering;

/// Hard caps on brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_variables: usize,
    pub max_orderings: u64,
    pub max_assignments: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_variables: 7,
            max_orderings: 1_000_000,
            max_assignments: 10_000_000,
        }
    }
}

impl OracleBudget {
    fn check_variables(&self, n: usize) -> Result<()> {
        if n > self.max_variables {
            return Err(ModelError::OracleBudget(format!(
                "{n} variables exceed the limit of {}",
                self.max_variables
            )));
        }
        Ok(())
    }

    fn check_assignments(&self, scores: &MultiScores) -> Result<()> {
        self.check_variables(scores.n())?;
        let mut total: u64 = 1;
        for v in 0..scores.n() {
            total = total.saturating_mul(scores.triples(v).len() as u64);
        }
        if total > self.max_assignments {
            return Err(ModelError::OracleBudget(format!(
                "{total} assignments exceed the limit of {}",
                self.max_assignments
            )));
        }
        Ok(())
    }

    fn check_orderings(&self, n: usize) -> Result<()> {
        self.check_variables(n)?;
        let count: u64 = (1..=n as u64).product();
        if count > self.max_orderings {
            return Err(ModelError::OracleBudget(format!(
                "{count} orderings exceed the limit of {}",
                self.max_orderings
            )));
        }
        Ok(())
    }
}

/// Steps `digits` through the mixed-radix counter; false once it wraps.
fn advance(digits: &mut [usize], radix: impl Fn(usize) -> usize) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix(i) {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Lexicographically next permutation in place; false at the last one.
pub fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

/// All orderings of `0..n` in lexicographic order.
pub fn all_orderings(n: usize) -> Vec<VarOrder> {
    let mut seq: Vec<usize> = (0..n).collect();
    let mut out = vec![VarOrder::identity(n)];
    while next_permutation(&mut seq) {
        out.push(VarOrder::new(seq.clone()).expect("permutation"));
    }
    out
}

/// Topological order preferring the smallest id among available variables.
fn topological_order(n: usize, arcs: &[(usize, usize)]) -> VarOrder {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in arcs {
        indeg[v] += 1;
        out[u].push(v);
    }
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seq = Vec::with_capacity(n);
    while let Some(u) = ready.pop_first() {
        seq.push(u);
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.insert(v);
            }
        }
    }
    VarOrder::new(seq).expect("acyclic input")
}

/// Enumerates every triple assignment accepted by `admissible` and returns
/// the best one of weight at most `k`; lexicographically first wins ties.
fn enumerate_assignments(
    scores: &MultiScores,
    k: u64,
    mut admissible: impl FnMut(&[usize]) -> Option<VarOrder>,
) -> ScoredDag {
    let n = scores.n();
    let mut digits = vec![0usize; n];
    let mut best: Option<ScoredDag> = None;
    loop {
        let weight: u64 = digits
            .iter()
            .enumerate()
            .map(|(v, &c)| scores.triples(v)[c].weight)
            .sum();
        if weight <= k {
            if let Some(order) = admissible(&digits) {
                let dag = ScoredDag::from_choices(scores, digits.clone(), order).expect("in range");
                if best.as_ref().is_none_or(|b| dag.score > b.score) {
                    best = Some(dag);
                }
            }
        }
        if !advance(&mut digits, |i| scores.triples(i).len()) {
            break;
        }
    }
    best.expect("the all-empty assignment is always admissible")
}

/// Exact W-BNSL optimum by exhausting all triple assignments.
pub fn brute_best_dag(scores: &MultiScores, k: u64) -> Result<ScoredDag> {
    brute_best_dag_with(scores, k, &OracleBudget::default())
}

pub fn brute_best_dag_with(scores: &MultiScores, k: u64, budget: &OracleBudget) -> Result<ScoredDag> {
    budget.check_assignments(scores)?;
    let n = scores.n();
    Ok(enumerate_assignments(scores, k, |choices| {
        let arcs: Vec<(usize, usize)> = choices
            .iter()
            .enumerate()
            .flat_map(|(v, &c)| scores.triples(v)[c].parents.iter().map(move |u| (u, v)))
            .collect();
        is_acyclic(n, &arcs).then(|| topological_order(n, &arcs))
    }))
}

/// Best assignment whose arcs all point forward along `order`.
pub fn brute_best_dag_for_ordering(scores: &MultiScores, order: &VarOrder, k: u64) -> Result<ScoredDag> {
    OracleBudget::default().check_assignments(scores)?;
    Ok(enumerate_assignments(scores, k, |choices| {
        let forward = choices.iter().enumerate().all(|(v, &c)| {
            scores.triples(v)[c]
                .parents
                .iter()
                .all(|u| order.position(u) < order.position(v))
        });
        forward.then(|| order.clone())
    }))
}

/// Best ordering-optimal DAG over all orderings within distance `r` of `tau`.
pub fn brute_local_search(
    scores: &MultiScores,
    tau: &VarOrder,
    k: u64,
    r: usize,
    distance: Distance,
) -> Result<SearchResult> {
    brute_local_search_with(scores, tau, k, r, distance, &OracleBudget::default())
}

pub fn brute_local_search_with(
    scores: &MultiScores,
    tau: &VarOrder,
    k: u64,
    r: usize,
    distance: Distance,
    budget: &OracleBudget,
) -> Result<SearchResult> {
    let n = scores.n();
    budget.check_orderings(n)?;
    tau.ensure_same_set(&VarOrder::identity(n))?;
    let mut best: Option<ScoredDag> = None;
    let mut evaluated = 0;
    for sigma in all_orderings(n) {
        if distance.eval(tau, &sigma)? > r {
            continue;
        }
        evaluated += 1;
        let dag = best_dag_for_ordering(scores, &sigma, k);
        if best.as_ref().is_none_or(|b| dag.score > b.score) {
            best = Some(dag);
        }
    }
    Ok(SearchResult {
        dag: best.expect("tau itself is within any radius"),
        diagnostics: Diagnostics {
            iterations: evaluated,
            evaluations: evaluated,
            ..Diagnostics::default()
        },
    })
}

/// Best unweighted ordering obtained by permuting positions `start..=start + r`,
/// trying all `(r + 1)!` permutations. The incumbent wins ties.
pub fn brute_best_window_permutation(scores: &MultiScores, tau: &VarOrder, start: usize, r: usize) -> Result<VarOrder> {
    let n = tau.len();
    if start + r >= n {
        return Err(ModelError::InvalidRange {
            start: start + 1,
            end: start + r + 1,
            n,
        });
    }
    let window = &tau.as_slice()[start..=start + r];
    let mut idx: Vec<usize> = (0..=r).collect();
    let mut best = tau.clone();
    let mut best_score = best_dag_for_ordering(scores, tau, 0).score;
    while next_permutation(&mut idx) {
        let block: Vec<usize> = idx.iter().map(|&i| window[i]).collect();
        let cand = tau.with_block(start, &block);
        let s = best_dag_for_ordering(scores, &cand, 0).score;
        if s > best_score {
            best_score = s;
            best = cand;
        }
    }
    Ok(best)
}

/// A move that improves an ordering by more than the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum Improvement {
    Insertion { from: usize, to: usize, gain: f64 },
    Window { start: usize, gain: f64 },
}

/// Exhaustive r-optimality check for the unweighted ordering score: every
/// single insertion and every permutation of every window of `r + 1`
/// consecutive positions. Windows are clamped to the ordering length.
pub fn find_improvement(scores: &MultiScores, tau: &VarOrder, r: usize, epsilon: f64) -> Option<Improvement> {
    let n = tau.len();
    let score = |o: &VarOrder| best_dag_for_ordering(scores, o, 0).score;
    let current = score(tau);
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let gain = score(&tau.insert_move(from, to)) - current;
            if gain > epsilon {
                return Some(Improvement::Insertion { from, to, gain });
            }
        }
    }
    let r = r.min(n.saturating_sub(1));
    if n == 0 {
        return None;
    }
    for start in 0..n - r {
        let window = &tau.as_slice()[start..=start + r];
        let mut idx: Vec<usize> = (0..=r).collect();
        while next_permutation(&mut idx) {
            let block: Vec<usize> = idx.iter().map(|&i| window[i]).collect();
            let gain = score(&tau.with_block(start, &block)) - current;
            if gain > epsilon {
                return Some(Improvement::Window { start, gain });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{f1, f2, order};

    #[test]
    fn brute_best_dag_examples() {
        assert_eq!(brute_best_dag(&f1(), 1).unwrap().score, 5.0);
        assert_eq!(brute_best_dag(&f1(), 0).unwrap().score, 3.0);
        assert_eq!(brute_best_dag(&f2(), 1).unwrap().score, 5.0);
        assert_eq!(brute_best_dag(&f2(), 0).unwrap().score, 4.0);
        let d = brute_best_dag(&f1(), 1).unwrap();
        assert!(d.witness_is_topological(&f1()));
    }

    #[test]
    fn brute_local_search_examples() {
        let r = brute_local_search(&f1(), &order(&[0, 1]), 1, 1, Distance::Inv).unwrap();
        assert_eq!(r.score(), 5.0);
        assert_eq!(r.diagnostics.evaluations, 2);
        let r = brute_local_search(&f2(), &order(&[0, 1, 2]), 0, 1, Distance::InvWin).unwrap();
        assert_eq!(r.score(), 4.0);
    }

    #[test]
    fn unlimited_radius_equals_global_optimum() {
        for k in 0..3 {
            for f in [f1(), f2()] {
                let tau = VarOrder::identity(f.n());
                for d in Distance::ALL {
                    let local = brute_local_search(&f, &tau, k, 100, d).unwrap();
                    assert_eq!(local.score(), brute_best_dag(&f, k).unwrap().score);
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let f = crate::synth::random_instance(
            &mut <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3),
            8,
            &Default::default(),
        );
        assert!(matches!(
            brute_local_search(&f, &VarOrder::identity(8), 0, 1, Distance::Inv),
            Err(ModelError::OracleBudget(_))
        ));
    }

    #[test]
    fn permutation_enumeration() {
        assert_eq!(all_orderings(4).len(), 24);
        assert_eq!(all_orderings(0).len(), 1);
        let all = all_orderings(3);
        assert_eq!(all[1].as_slice(), &[0, 2, 1]);
    }
}
