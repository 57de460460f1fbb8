//! Weight encoders for common structural constraints.

use crate::error::{ModelError, Result};
use crate::model::{MultiScores, ScoreTriple};

/// Bounded number of arcs: the weight of each triple becomes `|P|`.
pub fn encode_bounded_arcs(scores: &MultiScores) -> MultiScores {
    scores.map_triples(|t| ScoreTriple {
        parents: t.parents.clone(),
        score: t.score,
        weight: t.parents.len() as u64,
    })
}

/// Bounded in-degree: weight 1 for parent sets larger than `c`, 0 otherwise.
/// A budget of `k` then allows at most `k` variables above the bound.
pub fn encode_bounded_indegree(scores: &MultiScores, c: i64) -> Result<MultiScores> {
    if c < 0 {
        return Err(ModelError::NegativeBound(c));
    }
    let c = c as usize;
    Ok(scores.map_triples(|t| ScoreTriple {
        parents: t.parents.clone(),
        score: t.score,
        weight: u64::from(t.parents.len() > c),
    }))
}
