//! Hill climbing over orderings with insertion and window moves.
//!
//! An ordering is r-optimal when neither a single insertion nor a
//! permutation of any `r + 1` consecutive positions improves its unweighted
//! ordering score. Each round first tries insertions (first improvement),
//! then slides a window left to right and applies the first window whose
//! best permutation improves the score.
//!
//! Insertions are scored incrementally: moving `v` across `u` only changes
//! the local scores of `v` and `u`. Window permutations are found with a DP
//! over subsets of the window, since variables before the window are
//! untouched and variables after it see the same predecessor set whatever
//! the order inside the window.

use crate::error::{ModelError, Result};
use crate::inversions::stream_rng;
use crate::model::{MultiScores, ScoredDag, VarOrder};
use crate::par;
use crate::synth::random_order;

/// Largest supported window radius (the window DP is exponential in it).
pub const MAX_WINDOW_RADIUS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HillclimbConfig {
    pub radius: usize,
    /// Moves must gain strictly more than this.
    pub epsilon: f64,
    /// Cap on accepted moves, 0 for none.
    pub max_iterations: u64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for HillclimbConfig {
    fn default() -> Self {
        Self {
            radius: 3,
            epsilon: 1e-9,
            max_iterations: 0,
            restarts: 20,
            seed: 0,
        }
    }
}

impl HillclimbConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radius > MAX_WINDOW_RADIUS {
            return Err(ModelError::RadiusTooLarge(self.radius, MAX_WINDOW_RADIUS));
        }
        if self.epsilon.is_nan() || self.epsilon < 0.0 {
            return Err(ModelError::InvalidConfig(format!("epsilon {} < 0", self.epsilon)));
        }
        if self.restarts == 0 {
            return Err(ModelError::InvalidConfig("restarts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    index: usize,
    parents: Box<[usize]>,
}

/// Weight-zero triples per variable, best score first (lowest index on ties).
struct OrderScorer {
    cands: Vec<Vec<Candidate>>,
}

impl OrderScorer {
    fn new(scores: &MultiScores) -> Self {
        let cands = (0..scores.n())
            .map(|v| {
                let mut list: Vec<Candidate> = scores
                    .triples(v)
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.weight == 0)
                    .map(|(index, t)| Candidate {
                        score: t.score,
                        index,
                        parents: t.parents.iter().collect(),
                    })
                    .collect();
                list.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
                list
            })
            .collect();
        Self { cands }
    }

    /// Best candidate of `v` whose parents are all admissible.
    #[inline]
    fn best(&self, v: usize, admissible: impl Fn(usize) -> bool) -> &Candidate {
        self.cands[v]
            .iter()
            .find(|c| c.parents.iter().all(|&u| admissible(u)))
            .expect("the empty parent set is always admissible")
    }

    fn local(&self, order: &VarOrder) -> Vec<&Candidate> {
        (0..order.len())
            .map(|v| {
                let pv = order.position(v);
                self.best(v, |u| order.position(u) < pv)
            })
            .collect()
    }

    /// Summed in variable-id order, matching [`ScoredDag::from_choices`].
    fn score(&self, order: &VarOrder) -> f64 {
        self.local(order).iter().map(|c| c.score).sum()
    }

    fn dag(&self, scores: &MultiScores, order: &VarOrder) -> ScoredDag {
        let choices = self.local(order).iter().map(|c| c.index).collect();
        ScoredDag::from_choices(scores, choices, order.clone()).expect("indices from the instance")
    }

    /// Score changes of moving the variable at `from` to each position.
    /// Entry `from` is zero.
    #[allow(clippy::needless_range_loop)]
    fn insertion_gains(&self, order: &VarOrder, local: &[&Candidate], from: usize) -> Vec<f64> {
        let n = order.len();
        let v = order.at(from);
        let pos = |u: usize| order.position(u);
        let mut gains = vec![0.0; n];
        let mut passed = 0.0;
        for to in (0..from).rev() {
            let u = order.at(to);
            let pu = pos(u);
            passed += self.best(u, |x| x == v || pos(x) < pu).score - local[u].score;
            let own = self.best(v, |x| pos(x) < to).score - local[v].score;
            gains[to] = own + passed;
        }
        passed = 0.0;
        for to in from + 1..n {
            let u = order.at(to);
            if local[u].parents.contains(&v) {
                let pu = pos(u);
                passed += self.best(u, |x| x != v && pos(x) < pu).score - local[u].score;
            }
            let own = self.best(v, |x| pos(x) <= to).score - local[v].score;
            gains[to] = own + passed;
        }
        gains
    }

    /// Best reordering of positions `start..start + width` and its gain over
    /// the current order of that block. `None` when nothing beats it.
    fn best_window(&self, order: &VarOrder, start: usize, width: usize) -> Option<(Vec<usize>, f64)> {
        let window = &order.as_slice()[start..start + width];
        let full = 1usize << width;
        let mut local_index = std::collections::HashMap::with_capacity(width);
        for (i, &v) in window.iter().enumerate() {
            local_index.insert(v, i);
        }
        // best[i * full + mask]: best score of window variable i when its
        // in-window predecessors are `mask`.
        let mut best = vec![f64::NEG_INFINITY; width * full];
        for (i, &v) in window.iter().enumerate() {
            let table = &mut best[i * full..(i + 1) * full];
            'cand: for c in &self.cands[v] {
                let mut mask = 0usize;
                for &u in c.parents.iter() {
                    let pu = order.position(u);
                    if pu < start {
                        continue;
                    }
                    match local_index.get(&u) {
                        Some(&j) => mask |= 1 << j,
                        None => continue 'cand,
                    }
                }
                if c.score > table[mask] {
                    table[mask] = c.score;
                }
            }
            for bit in 0..width {
                for mask in 0..full {
                    if mask & (1 << bit) != 0 {
                        let sub = table[mask ^ (1 << bit)];
                        if sub > table[mask] {
                            table[mask] = sub;
                        }
                    }
                }
            }
        }

        let mut incumbent = 0.0;
        for i in 0..width {
            incumbent += best[i * full + ((1 << i) - 1)];
        }

        let mut placed = vec![f64::NEG_INFINITY; full];
        let mut last = vec![0u8; full];
        placed[0] = 0.0;
        for set in 1..full {
            let mut rest = set;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let prev = set ^ (1 << i);
                let value = placed[prev] + best[i * full + prev];
                if value > placed[set] {
                    placed[set] = value;
                    last[set] = i as u8;
                }
            }
        }
        if placed[full - 1] <= incumbent {
            return None;
        }
        let mut block = vec![0usize; width];
        let mut set = full - 1;
        for slot in (0..width).rev() {
            let i = last[set] as usize;
            block[slot] = window[i];
            set ^= 1 << i;
        }
        Some((block, placed[full - 1] - incumbent))
    }
}

/// Best permutation of the `r + 1` positions starting at 1-based position
/// `i`, for the unweighted ordering score. Returns `tau` itself when no
/// permutation is strictly better.
pub fn best_window_permutation(scores: &MultiScores, tau: &VarOrder, i: usize, r: usize) -> Result<VarOrder> {
    let n = tau.len();
    if i == 0 || i + r > n {
        return Err(ModelError::InvalidRange {
            start: i,
            end: i + r,
            n,
        });
    }
    if r > MAX_WINDOW_RADIUS {
        return Err(ModelError::RadiusTooLarge(r, MAX_WINDOW_RADIUS));
    }
    let scorer = OrderScorer::new(scores);
    Ok(match scorer.best_window(tau, i - 1, r + 1) {
        Some((block, _)) => tau.with_block(i - 1, &block),
        None => tau.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HillclimbOutcome {
    pub ordering: VarOrder,
    pub dag: ScoredDag,
    /// Accepted moves.
    pub iterations: u64,
    /// Score before the first move and after every accepted move.
    pub trace: Vec<f64>,
}

/// Climbs from `tau` to an r-optimal ordering (weight budget 0).
pub fn hillclimb(scores: &MultiScores, tau: &VarOrder, cfg: &HillclimbConfig) -> Result<HillclimbOutcome> {
    cfg.validate()?;
    let scorer = OrderScorer::new(scores);
    let n = tau.len();
    let width = (cfg.radius + 1).min(n);
    let eps = cfg.epsilon;
    let mut order = tau.clone();
    let mut current = scorer.score(&order);
    let mut trace = vec![current];
    let mut iterations = 0u64;

    let limit_reached = |it: u64| cfg.max_iterations != 0 && it >= cfg.max_iterations;
    while !limit_reached(iterations) {
        let mut next: Option<(VarOrder, f64)> = None;

        let local = scorer.local(&order);
        'insertions: for from in 0..n {
            let gains = scorer.insertion_gains(&order, &local, from);
            for (to, &gain) in gains.iter().enumerate() {
                if to == from || gain <= eps {
                    continue;
                }
                let cand = order.insert_move(from, to);
                let s = scorer.score(&cand);
                if s > current + eps {
                    next = Some((cand, s));
                    break 'insertions;
                }
            }
        }

        if next.is_none() && width >= 2 {
            for start in 0..=n - width {
                if let Some((block, gain)) = scorer.best_window(&order, start, width) {
                    if gain <= eps {
                        continue;
                    }
                    let cand = order.with_block(start, &block);
                    let s = scorer.score(&cand);
                    if s > current + eps {
                        next = Some((cand, s));
                        break;
                    }
                }
            }
        }

        match next {
            Some((cand, s)) => {
                order = cand;
                current = s;
                trace.push(s);
                iterations += 1;
            }
            None => break,
        }
    }
    let dag = scorer.dag(scores, &order);
    Ok(HillclimbOutcome {
        ordering: order,
        dag,
        iterations,
        trace,
    })
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartRun {
    pub start: VarOrder,
    pub outcome: HillclimbOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RestartStats {
    pub runs: Vec<RestartRun>,
    pub average: f64,
    pub maximum: f64,
}

impl RestartStats {
    pub fn finals(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.outcome.dag.score).collect()
    }

    /// Index of the best restart; the earliest wins ties.
    pub fn best_run(&self) -> &RestartRun {
        let idx = par::first_max_by(&self.runs, |r| r.outcome.dag.score).expect("at least one restart");
        &self.runs[idx]
    }

    /// CSV with one row per restart and two summary rows (`avg`, `max`).
    pub fn to_csv(&self, instance: &str, r: usize) -> String {
        let mut out = String::from("instance,r,restart,score,iterations\n");
        let quoted = csv_field(instance);
        for (i, run) in self.runs.iter().enumerate() {
            out.push_str(&format!(
                "{quoted},{r},{i},{},{}\n",
                run.outcome.dag.score, run.outcome.iterations
            ));
        }
        out.push_str(&format!("{quoted},{r},avg,{},\n", self.average));
        out.push_str(&format!("{quoted},{r},max,{},\n", self.maximum));
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Start orderings used by [`run_restarts`]. They depend on the seed and
/// restart index only, so runs with different radii share their starts.
pub fn restart_starts(n: usize, restarts: usize, seed: u64) -> Vec<VarOrder> {
    (0..restarts)
        .map(|i| random_order(&mut stream_rng(seed, i as u64), n))
        .collect()
}

/// Hill climbing from `cfg.restarts` uniformly random orderings.
pub fn run_restarts(scores: &MultiScores, cfg: &HillclimbConfig) -> Result<RestartStats> {
    cfg.validate()?;
    let starts = restart_starts(scores.n(), cfg.restarts, cfg.seed);
    let outcomes = par::map_slice(&starts, |start| hillclimb(scores, start, cfg));
    let runs = starts
        .into_iter()
        .zip(outcomes)
        .map(|(start, outcome)| {
            Ok(RestartRun {
                start,
                outcome: outcome?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = runs.iter().map(|r| r.outcome.dag.score).collect();
    let average = finals.iter().sum::<f64>() / finals.len() as f64;
    let maximum = finals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(RestartStats { runs, average, maximum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{f1, f2, order};
    use crate::oracle::{brute_best_window_permutation, find_improvement};
    use crate::order_dp::ordering_score;
    use crate::synth::{random_instance, InstanceShape};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(radius: usize, epsilon: f64) -> HillclimbConfig {
        HillclimbConfig {
            radius,
            epsilon,
            restarts: 1,
            ..HillclimbConfig::default()
        }
    }

    #[test]
    fn window_examples() {
        let f = f2();
        let tau = order(&[0, 1, 2]);
        let best = best_window_permutation(&f, &tau, 1, 2).unwrap();
        assert_eq!(ordering_score(&f, &best), 4.0);
        assert_eq!(best_window_permutation(&f, &tau, 2, 0).unwrap(), tau);
        let opt = order(&[0, 2, 1]);
        assert_eq!(best_window_permutation(&f, &opt, 1, 2).unwrap(), opt);
        assert!(best_window_permutation(&f, &tau, 2, 2).is_err());
        assert!(best_window_permutation(&f, &tau, 0, 1).is_err());
    }

    #[test]
    fn window_dp_matches_permutation_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let shape = InstanceShape {
            max_triples: 6,
            max_parents: 3,
            max_weight: 0,
        };
        for _ in 0..200 {
            let n = rng.gen_range(2..=7);
            let f = random_instance(&mut rng, n, &shape);
            let tau = random_order(&mut rng, n);
            let r = rng.gen_range(0..n.min(6));
            let i = rng.gen_range(1..=n - r);
            let dp = best_window_permutation(&f, &tau, i, r).unwrap();
            let brute = brute_best_window_permutation(&f, &tau, i - 1, r).unwrap();
            assert_eq!(ordering_score(&f, &dp), ordering_score(&f, &brute));
            assert_eq!(&dp.as_slice()[..i - 1], &tau.as_slice()[..i - 1]);
            assert_eq!(&dp.as_slice()[i + r..], &tau.as_slice()[i + r..]);
        }
    }

    #[test]
    fn insertion_gains_match_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let f = random_instance(&mut rng, 7, &InstanceShape::default());
            let tau = random_order(&mut rng, 7);
            let scorer = OrderScorer::new(&f);
            let local = scorer.local(&tau);
            let base = scorer.score(&tau);
            for from in 0..7 {
                let gains = scorer.insertion_gains(&tau, &local, from);
                for (to, gain) in gains.iter().enumerate() {
                    let moved = scorer.score(&tau.insert_move(from, to));
                    assert!((moved - base - gain).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn optimal_start_is_kept() {
        let f = f2();
        let out = hillclimb(&f, &order(&[0, 2, 1]), &cfg(2, 0.0)).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.ordering, order(&[0, 2, 1]));
    }

    #[test]
    fn f2_reaches_four() {
        let f = f2();
        let out = hillclimb(&f, &order(&[2, 0, 1]), &cfg(2, 0.0)).unwrap();
        assert_eq!(out.dag.score, 4.0);
        assert!(find_improvement(&f, &out.ordering, 2, 0.0).is_none());
    }

    #[test]
    fn f1_without_weighted_triple() {
        let f = MultiScores::new(
            vec!["a".into(), "b".into()],
            vec![vec![crate::ScoreTriple::new([], 0.0, 0)], f1().triples(1).to_vec()],
        )
        .unwrap();
        let out = hillclimb(&f, &order(&[0, 1]), &cfg(2, 0.0)).unwrap();
        assert_eq!((out.dag.score, out.iterations), (3.0, 0));
    }

    #[test]
    fn restarts_share_starts_across_radii() {
        let f = f2();
        let mut c = HillclimbConfig {
            radius: 2,
            restarts: 20,
            seed: 7,
            ..HillclimbConfig::default()
        };
        let a = run_restarts(&f, &c).unwrap();
        assert!(a.average <= a.maximum && a.maximum <= 5.0 && a.maximum >= 4.0);
        c.radius = 1;
        let b = run_restarts(&f, &c).unwrap();
        let starts = |s: &RestartStats| s.runs.iter().map(|r| r.start.clone()).collect::<Vec<_>>();
        assert_eq!(starts(&a), starts(&b));
        assert_eq!(a, run_restarts(&f, &HillclimbConfig { radius: 2, ..c }).unwrap());
    }

    #[test]
    fn csv_shape() {
        let f = f2();
        let stats = run_restarts(
            &f,
            &HillclimbConfig {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        let csv = stats.to_csv("f2", 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "instance,r,restart,score,iterations");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("f2,3,avg,"));
        assert!(lines[4].starts_with("f2,3,max,4,"));
    }

    #[test]
    fn trace_is_strictly_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let f = random_instance(
                &mut rng,
                9,
                &InstanceShape {
                    max_weight: 0,
                    ..Default::default()
                },
            );
            let tau = random_order(&mut rng, 9);
            let out = hillclimb(&f, &tau, &cfg(3, 1e-9)).unwrap();
            assert!(out.trace.windows(2).all(|w| w[1] > w[0] + 1e-9));
            assert_eq!(out.trace.len() as u64, out.iterations + 1);
        }
    }

    #[test]
    fn config_validation() {
        assert!(hillclimb(&f2(), &order(&[0, 1, 2]), &cfg(MAX_WINDOW_RADIUS + 1, 0.0)).is_err());
        assert!(hillclimb(&f2(), &order(&[0, 1, 2]), &cfg(1, -1.0)).is_err());
    }
}
