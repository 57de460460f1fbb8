//! Local search in the inversion-window neighborhood.
//!
//! The ordering is cut into consecutive windows; each window is solved as an
//! independent Kendall tau local search (parents before the window are
//! hidden, since every ordering of the window sees all of them), and a
//! suffix DP over window end points and weight splits picks the best cut.

use rand::RngCore;

use crate::error::{ModelError, Result};
use crate::inversions::{default_colors, stream_rng, ColorRestrictedSolver, Coloring};
use crate::model::{Diagnostics, MultiScores, ScoreTriple, ScoredDag, SearchResult, VarOrder};
use crate::order_dp::effective_budget;
use crate::par;

/// Multiscores of the variables in positions `a..=b` of an ordering, with
/// parents intersected into the window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowRestrictedScores {
    /// Local instance; local id `i` is the variable at window position `i`.
    pub scores: MultiScores,
    /// Global id of every local variable.
    pub vars: Vec<usize>,
    /// For every local triple, the index of the original triple it came from.
    pub origin: Vec<Vec<usize>>,
}

/// Restricts `scores` to the window of 1-based positions `a..=b` of `tau`.
///
/// Triples with a parent after position `b` are dropped; the remaining ones
/// keep their score and weight with parents intersected into the window.
pub fn restrict_window(scores: &MultiScores, tau: &VarOrder, a: usize, b: usize) -> Result<WindowRestrictedScores> {
    let n = tau.len();
    if a == 0 || a > b || b > n {
        return Err(ModelError::InvalidRange { start: a, end: b, n });
    }
    let vars: Vec<usize> = tau.as_slice()[a - 1..b].to_vec();
    let local = |u: usize| tau.position(u) + 1 - a;
    let mut names = Vec::with_capacity(vars.len());
    let mut triples = Vec::with_capacity(vars.len());
    let mut origin = Vec::with_capacity(vars.len());
    for &v in &vars {
        names.push(scores.name(v).to_owned());
        let mut list = Vec::new();
        let mut from = Vec::new();
        for (idx, t) in scores.triples(v).iter().enumerate() {
            if t.parents.iter().any(|u| tau.position(u) >= b) {
                continue;
            }
            let inside = t.parents.iter().filter(|&u| tau.position(u) + 1 >= a).map(local);
            list.push(ScoreTriple::new(inside, t.score, t.weight));
            from.push(idx);
        }
        triples.push(list);
        origin.push(from);
    }
    Ok(WindowRestrictedScores {
        scores: MultiScores::new(names, triples)?,
        vars,
        origin,
    })
}

/// How each window is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowOracle {
    /// All-distinct coloring: exact and deterministic.
    Exact,
    /// Best of `repetitions` uniform colorings with the default color count.
    Randomized { repetitions: usize },
}

/// Best solution of one window for every weight budget `0..=k`.
struct WindowSolutions {
    by_budget: Vec<ScoredDag>,
    evaluations: u64,
}

fn solve_window(window: &WindowRestrictedScores, k: u64, r: usize, oracle: WindowOracle, seed: u64) -> WindowSolutions {
    let w = window.vars.len();
    let tau = VarOrder::identity(w);
    let colorings: Vec<Coloring> = match oracle {
        WindowOracle::Exact => vec![Coloring::all_distinct(w)],
        WindowOracle::Randomized { repetitions } => (0..repetitions.max(1) as u64)
            .map(|rep| Coloring::random(&mut stream_rng(seed, rep), w, default_colors(r)))
            .collect(),
    };
    let mut by_budget: Vec<ScoredDag> = Vec::new();
    let mut evaluations = 0;
    for coloring in &colorings {
        let mut solver = ColorRestrictedSolver::new(&window.scores, &tau, k, r, coloring);
        for kk in 0..=k {
            let sol = solver.solution(kk, r);
            match by_budget.get_mut(kk as usize) {
                Some(best) if sol.score > best.score => *best = sol,
                Some(_) => {}
                None => by_budget.push(sol),
            }
        }
        evaluations += solver.visited_keys() as u64;
    }
    WindowSolutions { by_budget, evaluations }
}

/// Best arc set of weight at most `k` whose witness ordering is within
/// inversion-window distance `r` of `tau`.
pub fn ls_invwin(
    scores: &MultiScores,
    tau: &VarOrder,
    k: u64,
    r: usize,
    seed: u64,
    oracle: WindowOracle,
) -> SearchResult {
    let n = scores.n();
    let k = effective_budget(scores, k);
    let windows: Vec<(usize, usize)> = (0..n).flat_map(|j| (j..n).map(move |p| (j, p))).collect();
    let solved = par::map_slice(&windows, |&(j, p)| {
        let window = restrict_window(scores, tau, j + 1, p + 1).expect("valid range");
        let window_seed = stream_rng(seed, (j * (n + 1) + p) as u64).next_u64();
        let solutions = solve_window(&window, k as u64, r, oracle, window_seed);
        (window, solutions)
    });
    let index = |j: usize, p: usize| j * n - j * (j + 1) / 2 + p;

    // table[j][k'] = best score of the suffix starting at position j.
    let width = k + 1;
    let mut table = vec![0.0f64; (n + 1) * width];
    let mut arg = vec![(0usize, 0usize); n * width];
    for j in (0..n).rev() {
        for kk in 0..=k {
            let mut best = f64::NEG_INFINITY;
            let mut best_arg = (j, 0);
            for p in j..n {
                let sols = &solved[index(j, p)].1;
                for used in 0..=kk {
                    let value = sols.by_budget[used].score + table[(p + 1) * width + kk - used];
                    if value > best {
                        best = value;
                        best_arg = (p, used);
                    }
                }
            }
            table[j * width + kk] = best;
            arg[j * width + kk] = best_arg;
        }
    }

    let mut choices = vec![0usize; n];
    let mut witness = Vec::with_capacity(n);
    let (mut j, mut kk) = (0, k);
    while j < n {
        let (p, used) = arg[j * width + kk];
        let (window, sols) = &solved[index(j, p)];
        let local = &sols.by_budget[used];
        for (i, &v) in window.vars.iter().enumerate() {
            choices[v] = window.origin[i][local.choices[i]];
        }
        witness.extend(local.ordering.as_slice().iter().map(|&i| window.vars[i]));
        j = p + 1;
        kk -= used;
    }
    let witness = VarOrder::new(witness).expect("windows partition the ordering");
    let dag = ScoredDag::from_choices(scores, choices, witness).expect("indices from the instance");
    let repetitions = match oracle {
        WindowOracle::Exact => 1,
        WindowOracle::Randomized { repetitions } => repetitions.max(1) as u64,
    };
    SearchResult {
        dag,
        diagnostics: Diagnostics {
            iterations: windows.len() as u64,
            repetitions: Some(repetitions),
            seed: Some(seed),
            evaluations: solved.iter().map(|(_, s)| s.evaluations).sum(),
        },
    }
}
