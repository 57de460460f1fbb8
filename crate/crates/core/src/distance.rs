//! Distances between orderings of the same variable set.
//!
//! All functions take the two orderings in either order (they are
//! symmetric) and fail when the orderings have different lengths.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Result;
use crate::model::VarOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Distance {
    Insert,
    Swap,
    /// Kendall tau (number of inversions).
    Inv,
    InvWin,
    Win,
}

impl Distance {
    pub const ALL: [Distance; 5] = [
        Distance::Insert,
        Distance::Swap,
        Distance::Inv,
        Distance::InvWin,
        Distance::Win,
    ];

    pub fn eval(self, a: &VarOrder, b: &VarOrder) -> Result<usize> {
        match self {
            Distance::Insert => insert_distance(a, b),
            Distance::Swap => swap_distance(a, b),
            Distance::Inv => kendall_tau(a, b),
            Distance::InvWin => invwin_distance(a, b),
            Distance::Win => win_distance(a, b),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distance::Insert => "insert",
            Distance::Swap => "swap",
            Distance::Inv => "inv",
            Distance::InvWin => "invwin",
            Distance::Win => "win",
        })
    }
}

impl FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Distance::ALL
            .into_iter()
            .find(|d| d.to_string() == s)
            .ok_or_else(|| format!("unknown distance {s:?}"))
    }
}

/// Positions in `a` of the variables of `b`, listed in `b`'s order.
fn relative(a: &VarOrder, b: &VarOrder) -> Result<Vec<usize>> {
    a.ensure_same_set(b)?;
    Ok(b.as_slice().iter().map(|&v| a.position(v)).collect())
}

/// Number of pairs `i < j` with `xs[i] > xs[j]`, by merge sort.
pub(crate) fn count_inversions(xs: &[usize]) -> usize {
    fn sort(xs: &mut [usize], buf: &mut Vec<usize>) -> usize {
        let n = xs.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort(&mut xs[..mid], buf) + sort(&mut xs[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if xs[i] <= xs[j] {
                buf.push(xs[i]);
                i += 1;
            } else {
                // every remaining left element is larger
                count += mid - i;
                buf.push(xs[j]);
                j += 1;
            }
        }
        buf.extend_from_slice(&xs[i..mid]);
        buf.extend_from_slice(&xs[j..]);
        xs.copy_from_slice(buf);
        count
    }
    let mut v = xs.to_vec();
    sort(&mut v, &mut Vec::with_capacity(xs.len()))
}

/// Kendall tau distance: the number of discordant pairs.
pub fn kendall_tau(a: &VarOrder, b: &VarOrder) -> Result<usize> {
    Ok(count_inversions(&relative(a, b)?))
}

/// `n` minus the longest common subsequence.
///
/// For permutations the LCS is the longest increasing subsequence of the
/// relative position sequence (patience sorting).
pub fn insert_distance(a: &VarOrder, b: &VarOrder) -> Result<usize> {
    let rel = relative(a, b)?;
    let mut tails: Vec<usize> = Vec::new();
    for x in rel {
        let at = tails.partition_point(|&t| t < x);
        if at == tails.len() {
            tails.push(x);
        } else {
            tails[at] = x;
        }
    }
    Ok(a.len() - tails.len())
}

/// Minimum number of transpositions: `n` minus the number of cycles.
pub fn swap_distance(a: &VarOrder, b: &VarOrder) -> Result<usize> {
    let rel = relative(a, b)?;
    let mut seen = vec![false; rel.len()];
    let mut cycles = 0;
    for start in 0..rel.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = rel[i];
        }
    }
    Ok(rel.len() - cycles)
}

/// Span between the first and last differing positions, 0 when equal.
pub fn win_distance(a: &VarOrder, b: &VarOrder) -> Result<usize> {
    a.ensure_same_set(b)?;
    let differs = |i: &usize| a.at(*i) != b.at(*i);
    let first = (0..a.len()).find(differs);
    let last = (0..a.len()).rev().find(differs);
    Ok(match (first, last) {
        (Some(f), Some(l)) => l - f,
        _ => 0,
    })
}

/// Boundaries `[start, end)` of the finest partition of the positions into
/// intervals on which both orderings hold the same variables.
pub fn equal_content_blocks(a: &VarOrder, b: &VarOrder) -> Result<Vec<(usize, usize)>> {
    let rel = relative(a, b)?;
    let mut blocks = Vec::new();
    let mut start = 0;
    let mut reach = 0;
    for (i, &x) in rel.iter().enumerate() {
        reach = reach.max(x);
        if reach == i {
            blocks.push((start, i + 1));
            start = i + 1;
        }
    }
    Ok(blocks)
}

/// Inversion-window distance.
///
/// Any window partition valid for both orderings is a coarsening of the
/// finest equal-content partition, and a coarse window's inversion count is
/// the sum of its blocks' counts, so the finest partition attains the
/// minimum of the per-window maximum.
pub fn invwin_distance(a: &VarOrder, b: &VarOrder) -> Result<usize> {
    let rel = relative(a, b)?;
    let blocks = equal_content_blocks(a, b)?;
    Ok(blocks
        .into_iter()
        .map(|(s, e)| count_inversions(&rel[s..e]))
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::order;

    // a=0, b=1, c=2, d=3
    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau(&order(&[0, 1, 2]), &order(&[0, 1, 2])).unwrap(), 0);
        assert_eq!(kendall_tau(&order(&[0, 1, 2]), &order(&[1, 0, 2])).unwrap(), 1);
        assert_eq!(kendall_tau(&order(&[0, 1, 2, 3]), &order(&[3, 1, 2, 0])).unwrap(), 5);
    }

    #[test]
    fn insert_examples() {
        assert_eq!(insert_distance(&order(&[0, 1, 2]), &order(&[0, 1, 2])).unwrap(), 0);
        assert_eq!(
            insert_distance(&order(&[0, 1, 2, 3]), &order(&[3, 1, 2, 0])).unwrap(),
            2
        );
        assert_eq!(insert_distance(&order(&[0, 1, 2]), &order(&[2, 0, 1])).unwrap(), 1);
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_distance(&order(&[0, 1, 2]), &order(&[0, 1, 2])).unwrap(), 0);
        assert_eq!(swap_distance(&order(&[0, 1, 2, 3]), &order(&[3, 1, 2, 0])).unwrap(), 1);
        assert_eq!(swap_distance(&order(&[0, 1, 2]), &order(&[2, 0, 1])).unwrap(), 2);
    }

    #[test]
    fn win_examples() {
        assert_eq!(win_distance(&order(&[0, 1, 2]), &order(&[0, 1, 2])).unwrap(), 0);
        assert_eq!(win_distance(&order(&[0, 1, 2, 3]), &order(&[3, 1, 2, 0])).unwrap(), 3);
        assert_eq!(win_distance(&order(&[0, 1, 2, 3]), &order(&[0, 2, 1, 3])).unwrap(), 1);
    }

    #[test]
    fn invwin_examples() {
        assert_eq!(
            invwin_distance(&order(&[0, 1, 2, 3]), &order(&[0, 1, 2, 3])).unwrap(),
            0
        );
        assert_eq!(
            invwin_distance(&order(&[0, 1, 2, 3]), &order(&[1, 0, 3, 2])).unwrap(),
            1
        );
        assert_eq!(
            invwin_distance(&order(&[0, 1, 2, 3]), &order(&[3, 1, 2, 0])).unwrap(),
            5
        );
    }

    #[test]
    fn mismatched_sets_error() {
        for d in Distance::ALL {
            assert!(d.eval(&order(&[0, 1]), &order(&[0, 1, 2])).is_err());
        }
    }

    #[test]
    fn distance_names_round_trip() {
        for d in Distance::ALL {
            assert_eq!(d.to_string().parse::<Distance>().unwrap(), d);
        }
    }
}
