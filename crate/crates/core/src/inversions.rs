//! Local search in the Kendall tau neighborhood by color coding.
//!
//! Variables are colored; a color-restricted solution keeps the relative
//! order inside every color class. The DP state is a prefix vector `p`
//! (how many variables of each class are placed), the weight left and the
//! inversions left. The last vertex of the current prefix set is chosen as a
//! sink, which costs as many inversions as there are prefix vertices after it
//! in `tau`. Evaluation is top-down so that only reachable prefix vectors
//! are ever materialized.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ModelError, Result};
use crate::model::{Diagnostics, MultiScores, ScoredDag, SearchResult, VarOrder};
use crate::order_dp::effective_budget;
use crate::par;

/// Assignment of variables to colors `0..num_colors`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
    num_colors: usize,
}

impl Coloring {
    pub fn new(colors: Vec<usize>, num_colors: usize) -> Result<Self> {
        if let Some(&c) = colors.iter().find(|&&c| c >= num_colors) {
            return Err(ModelError::InvalidConfig(format!(
                "color {c} out of range for {num_colors} colors"
            )));
        }
        Ok(Self {
            colors,
            num_colors: num_colors.max(1),
        })
    }

    /// One color for everything: the ordering is frozen.
    pub fn single(n: usize) -> Self {
        Self {
            colors: vec![0; n],
            num_colors: 1,
        }
    }

    /// Every variable gets its own color: no restriction at all.
    pub fn all_distinct(n: usize) -> Self {
        Self {
            colors: (0..n).collect(),
            num_colors: n.max(1),
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, num_colors: usize) -> Self {
        let num_colors = num_colors.max(1);
        Self {
            colors: (0..n).map(|_| rng.gen_range(0..num_colors)).collect(),
            num_colors,
        }
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Color classes, each listed in `tau` order.
    pub fn classes(&self, tau: &VarOrder) -> Vec<Vec<usize>> {
        let mut classes = vec![Vec::new(); self.num_colors];
        for &v in tau.as_slice() {
            classes[self.colors[v]].push(v);
        }
        classes
    }
}

/// `max(1, ceil(sqrt(8 r)))` colors.
pub fn default_colors(r: usize) -> usize {
    ((8.0 * r as f64).sqrt().ceil() as usize).max(1)
}

/// `ceil((2e)^sqrt(r / 8))` random colorings.
pub fn default_repetitions(r: usize) -> usize {
    (2.0 * std::f64::consts::E)
        .powf((r as f64 / 8.0).sqrt())
        .ceil()
        .max(1.0) as usize
}

/// Lower bound on the probability that a uniform coloring with
/// [`default_colors`] colors is good: `(2e)^-sqrt(r / 8)`.
pub fn good_coloring_probability(r: usize) -> f64 {
    (2.0 * std::f64::consts::E).powf(-(r as f64 / 8.0).sqrt())
}

/// Bound on visited memo keys: `(r+2)^l * (k+1) * (r+1)`.
pub fn memo_key_bound(r: usize, num_colors: usize, k: u64) -> f64 {
    ((r + 2) as f64).powi(num_colors as i32) * (k as f64 + 1.0) * (r as f64 + 1.0)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct MemoKey {
    packed: u128,
    spill: Option<Box<[u32]>>,
    weight_left: u32,
    inversions_left: u32,
}

#[derive(Debug, Clone, Copy)]
struct Step {
    color: usize,
    weight_used: usize,
    triple: usize,
    cost: usize,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    value: f64,
    step: Option<Step>,
}

/// Top-down color-restricted DP for one instance and one coloring.
///
/// Values for several budgets can be read from the same solver; they share
/// the memo table.
pub struct ColorRestrictedSolver<'a> {
    scores: &'a MultiScores,
    tau: &'a VarOrder,
    k: usize,
    r: usize,
    color_of: Vec<usize>,
    rank: Vec<u32>,
    classes: Vec<Vec<usize>>,
    /// `before[c * (n + 1) + x]`: class-`c` vertices at positions `< x`.
    before: Vec<u32>,
    strides: Option<Vec<u128>>,
    memo: HashMap<MemoKey, Entry>,
    /// Memo entries per prefix size `|p|`.
    layer_keys: Vec<usize>,
}

impl<'a> ColorRestrictedSolver<'a> {
    pub fn new(scores: &'a MultiScores, tau: &'a VarOrder, k: u64, r: usize, coloring: &Coloring) -> Self {
        let n = scores.n();
        assert_eq!(tau.len(), n, "ordering must cover the instance");
        assert_eq!(coloring.len(), n, "coloring must cover the instance");
        let classes = coloring.classes(tau);
        let ell = classes.len();
        let mut rank = vec![0u32; n];
        for class in &classes {
            for (i, &v) in class.iter().enumerate() {
                rank[v] = i as u32;
            }
        }
        let mut before = vec![0u32; ell * (n + 1)];
        for c in 0..ell {
            for x in 0..n {
                let here = u32::from(coloring.color(tau.at(x)) == c);
                before[c * (n + 1) + x + 1] = before[c * (n + 1) + x] + here;
            }
        }
        let mut strides = Some(Vec::with_capacity(ell));
        let mut acc: u128 = 1;
        for class in &classes {
            if let Some(s) = strides.as_mut() {
                s.push(acc);
                match acc.checked_mul(class.len() as u128 + 1) {
                    Some(next) => acc = next,
                    None => strides = None,
                }
            }
        }
        Self {
            scores,
            tau,
            k: effective_budget(scores, k),
            r,
            color_of: (0..n).map(|v| coloring.color(v)).collect(),
            rank,
            classes,
            before,
            strides,
            memo: HashMap::new(),
            layer_keys: vec![0; n + 1],
        }
    }

    /// Number of `(p, k', r')` entries evaluated so far.
    pub fn visited_keys(&self) -> usize {
        self.memo.len()
    }

    /// Largest number of visited keys sharing one prefix size `|p|`.
    pub fn max_layer_keys(&self) -> usize {
        self.layer_keys.iter().copied().max().unwrap_or(0)
    }

    fn full_vector(&self) -> Vec<u32> {
        self.classes.iter().map(|c| c.len() as u32).collect()
    }

    fn key(&self, p: &[u32], weight_left: usize, inversions_left: usize) -> MemoKey {
        let (packed, spill) = match &self.strides {
            Some(strides) => (p.iter().zip(strides).map(|(&x, &s)| x as u128 * s).sum(), None),
            None => (0, Some(p.to_vec().into_boxed_slice())),
        };
        MemoKey {
            packed,
            spill,
            weight_left: weight_left as u32,
            inversions_left: inversions_left as u32,
        }
    }

    /// Inversions needed to move the last placed vertex of class `i` behind
    /// every other vertex of the prefix set.
    fn sink_cost(&self, p: &[u32], v: usize) -> usize {
        let n = self.tau.len();
        let x = self.tau.position(v) + 1;
        p.iter()
            .enumerate()
            .map(|(c, &pc)| pc.saturating_sub(self.before[c * (n + 1) + x]) as usize)
            .sum()
    }

    /// Best triple of `v` per weight bound, restricted to parents in the
    /// prefix set: `out[w]` is the best `(score, index)` with weight `<= w`.
    fn sink_scores(&self, p: &[u32], v: usize, weight_left: usize) -> Vec<Option<(f64, usize)>> {
        let mut out: Vec<Option<(f64, usize)>> = vec![None; weight_left + 1];
        for (idx, t) in self.scores.triples(v).iter().enumerate() {
            let w = t.weight as usize;
            if w > weight_left {
                continue;
            }
            let inside = t.parents.iter().all(|u| self.rank[u] < p[self.color_of[u]]);
            if inside && out[w].is_none_or(|(s, _)| t.score > s) {
                out[w] = Some((t.score, idx));
            }
        }
        for w in 1..out.len() {
            if let Some(prev) = out[w - 1] {
                if out[w].is_none_or(|(s, _)| prev.0 >= s) {
                    out[w] = Some(prev);
                }
            }
        }
        out
    }

    fn eval(&mut self, p: &mut [u32], weight_left: usize, inversions_left: usize) -> f64 {
        let key = self.key(p, weight_left, inversions_left);
        if let Some(e) = self.memo.get(&key) {
            return e.value;
        }
        let mut best = Entry {
            value: if p.iter().all(|&x| x == 0) {
                0.0
            } else {
                f64::NEG_INFINITY
            },
            step: None,
        };
        for color in 0..p.len() {
            if p[color] == 0 {
                continue;
            }
            let v = self.classes[color][p[color] as usize - 1];
            let cost = self.sink_cost(p, v);
            if cost > inversions_left {
                continue;
            }
            let sink = self.sink_scores(p, v, weight_left);
            p[color] -= 1;
            for (weight_used, entry) in sink.iter().enumerate() {
                let Some((score, triple)) = *entry else {
                    continue;
                };
                let rest = self.eval(p, weight_left - weight_used, inversions_left - cost);
                let value = score + rest;
                if value > best.value {
                    best = Entry {
                        value,
                        step: Some(Step {
                            color,
                            weight_used,
                            triple,
                            cost,
                        }),
                    };
                }
            }
            p[color] += 1;
        }
        self.memo.insert(key, best);
        self.layer_keys[p.iter().map(|&x| x as usize).sum::<usize>()] += 1;
        best.value
    }

    /// Value of the color-restricted optimum with weight budget `k'` and
    /// inversion budget `r'` (clamped to the solver's budgets).
    pub fn value(&mut self, k: u64, r: usize) -> f64 {
        let (k, r) = ((k as usize).min(self.k), r.min(self.r));
        let mut p = self.full_vector();
        self.eval(&mut p, k, r)
    }

    /// The color-restricted solution for budgets `k'` and `r'`.
    pub fn solution(&mut self, k: u64, r: usize) -> ScoredDag {
        let (k, r) = ((k as usize).min(self.k), r.min(self.r));
        let mut p = self.full_vector();
        self.eval(&mut p, k, r);
        let n = self.scores.n();
        let mut choices = vec![0usize; n];
        let mut sinks = Vec::with_capacity(n);
        let (mut kk, mut rr) = (k, r);
        while p.iter().any(|&x| x > 0) {
            let key = self.key(&p, kk, rr);
            let step = self.memo[&key].step.expect("non-empty prefix has a sink");
            let v = self.classes[step.color][p[step.color] as usize - 1];
            choices[v] = step.triple;
            sinks.push(v);
            p[step.color] -= 1;
            kk -= step.weight_used;
            rr -= step.cost;
        }
        sinks.reverse();
        let witness = VarOrder::new(sinks).expect("every vertex is emitted once");
        ScoredDag::from_choices(self.scores, choices, witness).expect("indices from the instance")
    }
}

/// A color-restricted solution: the best F-valid arc set of weight at most
/// `k` with a witness ordering within Kendall tau `r` of `tau` that keeps the
/// relative order of every color class.
pub fn color_restricted_solve(
    scores: &MultiScores,
    tau: &VarOrder,
    k: u64,
    r: usize,
    coloring: &Coloring,
) -> SearchResult {
    let mut solver = ColorRestrictedSolver::new(scores, tau, k, r, coloring);
    let dag = solver.solution(k, r);
    SearchResult {
        dag,
        diagnostics: Diagnostics {
            iterations: 1,
            repetitions: Some(1),
            seed: None,
            evaluations: solver.visited_keys() as u64,
        },
    }
}

/// Seeded generator for repetition `index` of a run seeded with `seed`.
pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Randomized Kendall tau local search: the best color-restricted solution
/// over `repetitions` uniform colorings with [`default_colors`] colors.
///
/// With [`default_repetitions`] the result is optimal with probability at
/// least `1 - 1/e`. The result is a pure function of the arguments.
pub fn ls_inversions(
    scores: &MultiScores,
    tau: &VarOrder,
    k: u64,
    r: usize,
    seed: u64,
    repetitions: usize,
) -> SearchResult {
    let n = scores.n();
    let ell = default_colors(r);
    let repetitions = repetitions.max(1);
    let runs = par::map_range(repetitions, |rep| {
        let coloring = Coloring::random(&mut stream_rng(seed, rep as u64), n, ell);
        color_restricted_solve(scores, tau, k, r, &coloring)
    });
    let best = par::first_max_by(&runs, |res| res.score()).expect("at least one repetition");
    let evaluations = runs.iter().map(|res| res.diagnostics.evaluations).sum();
    let dag = runs.into_iter().nth(best).expect("index in range").dag;
    SearchResult {
        dag,
        diagnostics: Diagnostics {
            iterations: repetitions as u64,
            repetitions: Some(repetitions as u64),
            seed: Some(seed),
            evaluations,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::kendall_tau;
    use crate::model::fixtures::{f1, f2, order};
    use crate::model::is_valid_scored_dag;
    use crate::order_dp::best_dag_for_ordering;

    #[test]
    fn constants() {
        assert_eq!(default_colors(0), 1);
        assert_eq!(default_colors(1), 3);
        assert_eq!(default_colors(2), 4);
        assert_eq!(default_colors(8), 8);
        assert_eq!(default_colors(9), 9);
        assert_eq!(default_repetitions(0), 1);
        assert_eq!(default_repetitions(2), 3);
        assert_eq!(default_repetitions(8), 6);
    }

    #[test]
    fn color_restricted_examples() {
        let tau = order(&[0, 1]);
        let one = color_restricted_solve(&f1(), &tau, 1, 1, &Coloring::single(2));
        assert_eq!((one.score(), one.witness().as_slice()), (3.0, &[0, 1][..]));
        let two = color_restricted_solve(&f1(), &tau, 1, 1, &Coloring::all_distinct(2));
        assert_eq!((two.score(), two.witness().as_slice()), (5.0, &[1, 0][..]));
        let res = color_restricted_solve(&f2(), &order(&[0, 1, 2]), 0, 1, &Coloring::all_distinct(3));
        assert_eq!((res.score(), res.witness().as_slice()), (4.0, &[0, 2, 1][..]));
        let res = color_restricted_solve(&f2(), &order(&[0, 1, 2]), 1, 2, &Coloring::all_distinct(3));
        assert_eq!(res.score(), 5.0);
    }

    #[test]
    fn zero_radius_is_the_ordering_dp() {
        let f = f2();
        for seq in [[0, 1, 2], [2, 0, 1], [1, 2, 0]] {
            let tau = order(&seq);
            for k in 0..3 {
                let res = ls_inversions(&f, &tau, k, 0, 9, 3);
                assert_eq!(res.score(), best_dag_for_ordering(&f, &tau, k).score);
            }
        }
    }

    #[test]
    fn repeated_f1_runs_find_the_optimum() {
        let hits = (0..1000u64)
            .filter(|&seed| ls_inversions(&f1(), &order(&[0, 1]), 1, 1, seed, 16).score() == 5.0)
            .count();
        assert!(hits as f64 >= 1000.0 * (1.0 - (-1.0f64).exp()));
    }

    #[test]
    fn results_are_feasible_and_seeded() {
        let f = f2();
        let tau = order(&[2, 1, 0]);
        for seed in 0..20 {
            let a = ls_inversions(&f, &tau, 1, 2, seed, 2);
            let b = ls_inversions(&f, &tau, 1, 2, seed, 2);
            assert_eq!(a, b);
            assert!(is_valid_scored_dag(&f, &a.dag, 1).unwrap());
            assert!(a.dag.witness_is_topological(&f));
            assert!(kendall_tau(&tau, a.witness()).unwrap() <= 2);
        }
    }

    #[test]
    fn witness_respects_color_classes() {
        let f = f2();
        let tau = order(&[0, 1, 2]);
        let coloring = Coloring::new(vec![0, 1, 0], 2).unwrap();
        let res = color_restricted_solve(&f, &tau, 0, 2, &coloring);
        let w = res.witness();
        assert!(w.position(0) < w.position(2));
    }

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![0, 3], 2).is_err());
        assert_eq!(Coloring::single(3).classes(&order(&[2, 0, 1])), vec![vec![2, 0, 1]]);
    }
}
