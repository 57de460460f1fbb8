//! Ordering-based local search for Bayesian network structure learning with
//! weighted multiscores.
//!
//! An instance is a [`MultiScores`] table: every variable owns a list of
//! `(parent set, score, weight)` triples. A solution picks one triple per
//! variable so that the induced digraph is acyclic and the total weight stays
//! within a budget `k`. All solvers work over topological orderings:
//!
//! * [`order_dp`] finds the best arc set for one fixed ordering.
//! * [`neighborhood`] searches the insert and swap neighborhoods exhaustively.
//! * [`inversions`] searches the Kendall tau neighborhood with color coding.
//! * [`invwin`] searches the inversion-window neighborhood.
//! * [`hillclimb`] is the window + insertion heuristic with random restarts.
//! * [`oracle`] holds brute-force reference solvers for small instances.

pub mod distance;
pub mod encode;
pub mod error;
pub mod hillclimb;
pub mod inversions;
pub mod invwin;
pub mod model;
pub mod neighborhood;
pub mod oracle;
pub mod order_dp;
pub mod par;
pub mod scores_io;
pub mod synth;

pub use distance::{insert_distance, invwin_distance, kendall_tau, swap_distance, win_distance, Distance};
pub use error::{ModelError, Result};
pub use model::{
    is_valid_scored_dag, Budget, Diagnostics, MultiScores, ScoreTriple, ScoredDag, SearchResult, VarOrder, VarSet,
};
