//! Best arc set for a fixed topological ordering.
//!
//! Once the multiscores are restricted to parent sets that precede their
//! owner, the superstructure is acyclic and the weighted problem becomes a
//! knapsack-style DP over positions: `T[i][k']` is the best score of the
//! suffix starting at position `i` with `k'` weight left.

use crate::model::{MultiScores, ScoredDag, VarOrder};

/// For every variable, the indices of triples whose parents all precede it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingRestrictedScores {
    kept: Vec<Vec<usize>>,
}

impl OrderingRestrictedScores {
    pub fn kept(&self, v: usize) -> &[usize] {
        &self.kept[v]
    }
}

pub fn restrict_to_ordering(scores: &MultiScores, order: &VarOrder) -> OrderingRestrictedScores {
    let kept = (0..scores.n())
        .map(|v| {
            let pv = order.position(v);
            scores
                .triples(v)
                .iter()
                .enumerate()
                .filter(|(_, t)| t.parents.iter().all(|u| order.position(u) < pv))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    OrderingRestrictedScores { kept }
}

/// Largest budget that can matter: the sum of the heaviest triple per variable.
pub(crate) fn effective_budget(scores: &MultiScores, k: u64) -> usize {
    let cap: u64 = (0..scores.n())
        .map(|v| scores.triples(v).iter().map(|t| t.weight).max().unwrap_or(0))
        .sum();
    k.min(cap) as usize
}

/// Optimal F-valid arc set with `order` as topological ordering and weight
/// at most `k`. Ties go to the lowest triple index.
pub fn best_dag_for_ordering(scores: &MultiScores, order: &VarOrder, k: u64) -> ScoredDag {
    let restricted = restrict_to_ordering(scores, order);
    let k = effective_budget(scores, k);
    let choices = if k == 0 {
        best_unweighted(scores, &restricted)
    } else {
        best_weighted(scores, order, &restricted, k)
    };
    ScoredDag::from_choices(scores, choices, order.clone()).expect("indices come from the instance")
}

fn best_unweighted(scores: &MultiScores, restricted: &OrderingRestrictedScores) -> Vec<usize> {
    (0..scores.n())
        .map(|v| {
            let triples = scores.triples(v);
            let mut best: Option<usize> = None;
            for &i in restricted.kept(v) {
                let t = &triples[i];
                if t.weight == 0 && best.is_none_or(|b| t.score > triples[b].score) {
                    best = Some(i);
                }
            }
            best.expect("empty parent set is always kept")
        })
        .collect()
}

fn best_weighted(
    scores: &MultiScores,
    order: &VarOrder,
    restricted: &OrderingRestrictedScores,
    k: usize,
) -> Vec<usize> {
    let n = scores.n();
    let width = k + 1;
    let mut table = vec![0.0f64; (n + 1) * width];
    let mut arg = vec![usize::MAX; n * width];
    for i in (0..n).rev() {
        let v = order.at(i);
        let triples = scores.triples(v);
        for kk in 0..=k {
            let mut best = f64::NEG_INFINITY;
            let mut best_idx = usize::MAX;
            for &t_idx in restricted.kept(v) {
                let t = &triples[t_idx];
                let w = t.weight as usize;
                if w > kk {
                    continue;
                }
                let value = t.score + table[(i + 1) * width + kk - w];
                if value > best {
                    best = value;
                    best_idx = t_idx;
                }
            }
            table[i * width + kk] = best;
            arg[i * width + kk] = best_idx;
        }
    }
    let mut choices = vec![0; n];
    let mut kk = k;
    for i in 0..n {
        let v = order.at(i);
        let t_idx = arg[i * width + kk];
        choices[v] = t_idx;
        kk -= scores.triples(v)[t_idx].weight as usize;
    }
    choices
}

/// Score of the best unweighted DAG for `order`.
pub fn ordering_score(scores: &MultiScores, order: &VarOrder) -> f64 {
    best_dag_for_ordering(scores, order, 0).score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{f1, f2, order};
    use crate::model::is_valid_scored_dag;
    use crate::oracle::brute_best_dag_for_ordering;
    use crate::synth::{random_instance, InstanceShape};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn restriction_examples() {
        let f = f1();
        let r = restrict_to_ordering(&f, &order(&[0, 1]));
        assert_eq!((r.kept(0), r.kept(1)), (&[0][..], &[0, 1][..]));
        let r = restrict_to_ordering(&f, &order(&[1, 0]));
        assert_eq!((r.kept(0), r.kept(1)), (&[0, 1][..], &[0][..]));
        // F2 with τ=(a,c,b)
        let r = restrict_to_ordering(&f2(), &order(&[0, 2, 1]));
        assert_eq!(r.kept(1), &[0, 1, 2]);
        assert_eq!(r.kept(2), &[0]);
    }

    #[test]
    fn dp_examples() {
        assert_eq!(best_dag_for_ordering(&f1(), &order(&[0, 1]), 0).score, 3.0);
        assert_eq!(best_dag_for_ordering(&f1(), &order(&[1, 0]), 1).score, 5.0);
        let d = best_dag_for_ordering(&f2(), &order(&[0, 1, 2]), 1);
        assert_eq!((d.score, d.choices.clone()), (5.0, vec![0, 1, 1]));
        assert_eq!(best_dag_for_ordering(&f2(), &order(&[0, 1, 2]), 0).score, 2.0);
    }

    #[test]
    fn huge_budget_is_clamped() {
        let d = best_dag_for_ordering(&f2(), &order(&[0, 1, 2]), u64::MAX);
        assert_eq!(d.score, 5.0);
    }

    #[test]
    fn matches_brute_force_and_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shape = InstanceShape {
            max_triples: 8,
            ..InstanceShape::default()
        };
        for _ in 0..150 {
            let n = 2 + rand::Rng::gen_range(&mut rng, 0..5);
            let f = random_instance(&mut rng, n, &shape);
            let tau = crate::synth::random_order(&mut rng, f.n());
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=4 {
                let d = best_dag_for_ordering(&f, &tau, k);
                let brute = brute_best_dag_for_ordering(&f, &tau, k).unwrap();
                assert_eq!(d.score, brute.score);
                assert!(d.score >= prev);
                assert!(is_valid_scored_dag(&f, &d, k).unwrap());
                assert!(d.witness_is_topological(&f));
                prev = d.score;
            }
        }
    }
}
