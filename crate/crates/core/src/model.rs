//! Domain types: variable sets, multiscores, orderings and scored DAGs.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::{ModelError, Result};

/// A set of variable ids stored as a bitset.
#[derive(Clone, Default)]
pub struct VarSet {
    words: Vec<u64>,
}

impl VarSet {
    /// Words without trailing zeros, so equal sets compare equal.
    fn significant(&self) -> &[u64] {
        let len = self.words.iter().rposition(|&w| w != 0).map_or(0, |i| i + 1);
        &self.words[..len]
    }
}

impl PartialEq for VarSet {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl Eq for VarSet {}

impl std::hash::Hash for VarSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.significant().hash(state);
    }
}

impl VarSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, v: usize) {
        let w = v / 64;
        if w >= self.words.len() {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        if let Some(word) = self.words.get_mut(v / 64) {
            *word &= !(1 << (v % 64));
        }
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        self.words.get(v / 64).is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        let words = self.words.iter().zip(other.words.iter()).map(|(a, b)| a & b).collect();
        let mut out = VarSet { words };
        out.trim();
        out
    }

    /// Members in increasing id order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<usize> for VarSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = VarSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One local multiscore `(parents, score, weight)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTriple {
    pub parents: VarSet,
    pub score: f64,
    pub weight: u64,
}

impl ScoreTriple {
    pub fn new(parents: impl IntoIterator<Item = usize>, score: f64, weight: u64) -> Self {
        let mut parents: VarSet = parents.into_iter().collect();
        parents.trim();
        Self { parents, score, weight }
    }
}

/// The instance: local multiscores for every variable.
///
/// Every variable carries at least one triple with an empty parent set and
/// weight zero, so the empty arc set is always feasible.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiScores {
    names: Vec<String>,
    triples: Vec<Vec<ScoreTriple>>,
}

impl MultiScores {
    pub fn new(names: Vec<String>, triples: Vec<Vec<ScoreTriple>>) -> Result<Self> {
        if names.len() != triples.len() {
            return Err(ModelError::LengthMismatch {
                expected: names.len(),
                actual: triples.len(),
            });
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if seen.insert(name.as_str(), i).is_some() {
                return Err(ModelError::DuplicateName(name.clone()));
            }
        }
        let n = names.len();
        for (v, list) in triples.iter().enumerate() {
            let var = || names[v].clone();
            let mut has_empty = false;
            for t in list {
                if !t.score.is_finite() {
                    return Err(ModelError::NonFiniteScore { var: var() });
                }
                if t.parents.contains(v) {
                    return Err(ModelError::SelfParent { var: var() });
                }
                if let Some(p) = t.parents.iter().find(|&p| p >= n) {
                    return Err(ModelError::ParentOutOfRange { var: var(), parent: p });
                }
                has_empty |= t.parents.is_empty() && t.weight == 0;
            }
            if !has_empty {
                return Err(ModelError::MissingEmptyParentSet { var: var() });
            }
        }
        Ok(Self { names, triples })
    }

    /// Builds an instance with names `v0, v1, ...`.
    pub fn unnamed(triples: Vec<Vec<ScoreTriple>>) -> Result<Self> {
        let names = (0..triples.len()).map(|i| format!("v{i}")).collect();
        Self::new(names, triples)
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn triples(&self, v: usize) -> &[ScoreTriple] {
        &self.triples[v]
    }

    pub fn total_triples(&self) -> usize {
        self.triples.iter().map(Vec::len).sum()
    }

    pub fn max_parent_set_size(&self) -> usize {
        self.triples
            .iter()
            .flatten()
            .map(|t| t.parents.len())
            .max()
            .unwrap_or(0)
    }

    /// Arcs `(u, v)` of the superstructure: `u` occurs in some parent set of `v`.
    pub fn superstructure(&self) -> Vec<(usize, usize)> {
        let mut arcs = Vec::new();
        for v in 0..self.n() {
            let union: VarSet = self.triples[v].iter().flat_map(|t| t.parents.iter()).collect();
            arcs.extend(union.iter().map(|u| (u, v)));
        }
        arcs
    }

    /// Copy of the instance with every triple passed through `f`.
    pub(crate) fn map_triples(&self, mut f: impl FnMut(&ScoreTriple) -> ScoreTriple) -> Self {
        Self {
            names: self.names.clone(),
            triples: self
                .triples
                .iter()
                .map(|list| list.iter().map(&mut f).collect())
                .collect(),
        }
    }

    /// Index of the first empty, weight-zero triple of `v`.
    pub fn empty_triple(&self, v: usize) -> usize {
        self.triples[v]
            .iter()
            .position(|t| t.parents.is_empty() && t.weight == 0)
            .expect("validated on construction")
    }
}

/// A permutation of the variables with its inverse position map.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarOrder {
    seq: Vec<usize>,
    pos: Vec<usize>,
}

impl VarOrder {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let n = seq.len();
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in seq.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(ModelError::NotAPermutation(n));
            }
            pos[v] = i;
        }
        Ok(Self { seq, pos })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            seq: (0..n).collect(),
            pos: (0..n).collect(),
        }
    }

    pub fn from_names(scores: &MultiScores, names: &[&str]) -> Result<Self> {
        let seq = names
            .iter()
            .map(|name| scores.index_of(name).ok_or(ModelError::NotAPermutation(scores.n())))
            .collect::<Result<Vec<_>>>()?;
        if seq.len() != scores.n() {
            return Err(ModelError::LengthMismatch {
                expected: scores.n(),
                actual: seq.len(),
            });
        }
        Self::new(seq)
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.seq
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.seq
    }

    /// Variable at 0-based position `i`.
    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.seq[i]
    }

    /// 0-based position of variable `v`.
    #[inline]
    pub fn position(&self, v: usize) -> usize {
        self.pos[v]
    }

    pub fn positions(&self) -> &[usize] {
        &self.pos
    }

    /// Moves the variable at position `from` to position `to`.
    pub fn insert_move(&self, from: usize, to: usize) -> VarOrder {
        let mut seq = self.seq.clone();
        let v = seq.remove(from);
        seq.insert(to, v);
        VarOrder::new(seq).expect("still a permutation")
    }

    /// Replaces positions `start..start + block.len()` with `block`.
    pub fn with_block(&self, start: usize, block: &[usize]) -> VarOrder {
        let mut seq = self.seq.clone();
        seq[start..start + block.len()].copy_from_slice(block);
        VarOrder::new(seq).expect("block must permute the replaced range")
    }

    pub fn display<'a>(&'a self, scores: &'a MultiScores) -> impl fmt::Display + 'a {
        struct D<'a>(&'a VarOrder, &'a MultiScores);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                for (i, &v) in self.0.seq.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str(self.1.name(v))?;
                }
                Ok(())
            }
        }
        D(self, scores)
    }

    pub(crate) fn ensure_same_set(&self, other: &VarOrder) -> Result<()> {
        if self.len() != other.len() {
            return Err(ModelError::VariableSetMismatch(self.len(), other.len()));
        }
        Ok(())
    }
}

impl fmt::Debug for VarOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.seq.iter()).finish()
    }
}

/// One chosen triple per variable together with its totals and a witness
/// topological ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDag {
    pub choices: Vec<usize>,
    pub score: f64,
    pub weight: u64,
    pub ordering: VarOrder,
}

impl ScoredDag {
    /// Builds the dag and its totals from triple indices.
    ///
    /// The score is always accumulated in variable-id order so that two
    /// solvers choosing the same triples report bit-identical totals.
    pub fn from_choices(scores: &MultiScores, choices: Vec<usize>, ordering: VarOrder) -> Result<Self> {
        if choices.len() != scores.n() {
            return Err(ModelError::LengthMismatch {
                expected: scores.n(),
                actual: choices.len(),
            });
        }
        let mut score = 0.0;
        let mut weight = 0;
        for (v, &c) in choices.iter().enumerate() {
            let t = scores.triples(v).get(c).ok_or_else(|| ModelError::TripleOutOfRange {
                var: scores.name(v).to_owned(),
                index: c,
            })?;
            score += t.score;
            weight += t.weight;
        }
        Ok(Self {
            choices,
            score,
            weight,
            ordering,
        })
    }

    /// The arc set with every variable on its empty parent set.
    pub fn empty(scores: &MultiScores, ordering: VarOrder) -> Self {
        let choices = (0..scores.n()).map(|v| scores.empty_triple(v)).collect();
        Self::from_choices(scores, choices, ordering).expect("empty triples exist")
    }

    pub fn parents<'a>(&self, scores: &'a MultiScores, v: usize) -> &'a VarSet {
        &scores.triples(v)[self.choices[v]].parents
    }

    /// Arcs `(parent, child)` sorted by child then parent.
    pub fn arcs(&self, scores: &MultiScores) -> Vec<(usize, usize)> {
        (0..self.choices.len())
            .flat_map(|v| self.parents(scores, v).iter().map(move |u| (u, v)))
            .collect()
    }

    /// True when every arc points forward along the witness ordering.
    pub fn witness_is_topological(&self, scores: &MultiScores) -> bool {
        self.ordering.len() == scores.n()
            && self
                .arcs(scores)
                .iter()
                .all(|&(u, v)| self.ordering.position(u) < self.ordering.position(v))
    }
}

/// Checks that `dag` is an F-valid arc set of weight at most `k`.
///
/// Returns an error (not `false`) when a chosen triple index does not exist.
pub fn is_valid_scored_dag(scores: &MultiScores, dag: &ScoredDag, k: u64) -> Result<bool> {
    let n = scores.n();
    if dag.choices.len() != n {
        return Err(ModelError::LengthMismatch {
            expected: n,
            actual: dag.choices.len(),
        });
    }
    let mut weight = 0u64;
    for (v, &c) in dag.choices.iter().enumerate() {
        let t = scores.triples(v).get(c).ok_or_else(|| ModelError::TripleOutOfRange {
            var: scores.name(v).to_owned(),
            index: c,
        })?;
        weight += t.weight;
    }
    if weight > k {
        return Ok(false);
    }
    Ok(is_acyclic(n, &dag.arcs(scores)))
}

/// Kahn's algorithm.
pub(crate) fn is_acyclic(n: usize, arcs: &[(usize, usize)]) -> bool {
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in arcs {
        indeg[v] += 1;
        out[u].push(v);
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut seen = 0;
    while let Some(u) = stack.pop() {
        seen += 1;
        for &v in &out[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                stack.push(v);
            }
        }
    }
    seen == n
}

/// Weight budget `k` and search radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Budget {
    pub k: u64,
    pub r: usize,
}

/// Counters attached to a search result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Diagnostics {
    /// Accepted moves or evaluated neighbors, depending on the solver.
    pub iterations: u64,
    pub repetitions: Option<u64>,
    pub seed: Option<u64>,
    /// Memo entries or orderings scored.
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub dag: ScoredDag,
    pub diagnostics: Diagnostics,
}

impl SearchResult {
    pub fn score(&self) -> f64 {
        self.dag.score
    }

    pub fn witness(&self) -> &VarOrder {
        &self.dag.ordering
    }
}
