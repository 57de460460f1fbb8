use std::fmt::Write;
use std::path::Path;

use thiserror::Error;
use wbnsl::encode::{encode_bounded_arcs, encode_bounded_indegree};
use wbnsl::hillclimb::{hillclimb, run_restarts, HillclimbConfig, RestartRun, RestartStats};
use wbnsl::inversions::{color_restricted_solve, default_repetitions, ls_inversions, Coloring};
use wbnsl::invwin::{ls_invwin, WindowOracle};
use wbnsl::neighborhood::{estimated_size, local_search_xp, NeighborhoodKind, NeighborhoodSpec};
use wbnsl::oracle::{brute_best_dag, brute_local_search};
use wbnsl::order_dp::best_dag_for_ordering;
use wbnsl::par;
use wbnsl::scores_io::{parse_scores, write_result, OutputFormat, ParseOptions};
use wbnsl::{Diagnostics, Distance, MultiScores, ScoredDag, SearchResult, VarOrder};

use crate::args::{BruteDistance, Cli, Command, Common, Format, LsDistance};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Runs one command and returns everything destined for standard output.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    validate(&cli.command)?;
    let common = cli.command.common();
    let scores = load_scores(common)?;
    let tau = load_ordering(common, &scores)?;
    par::with_threads(common.threads, || dispatch(&cli.command, &scores, &tau))
}

fn validate(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Ls {
            work_bound,
            repetitions,
            oracle_reps,
            ..
        } => {
            if work_bound.is_nan() || *work_bound < 0.0 {
                return Err(usage("--work-bound must be non-negative"));
            }
            if *repetitions == Some(0) || *oracle_reps == Some(0) {
                return Err(usage("repetition counts must be at least 1"));
            }
        }
        Command::Hillclimb {
            common,
            radius,
            restarts,
            epsilon,
            ..
        } => {
            if common.k != 0 {
                return Err(usage("hillclimb searches the unweighted objective; -k must be 0"));
            }
            hillclimb_config(*radius, *restarts, 0, *epsilon, 0)
                .validate()
                .map_err(|e| usage(e.to_string()))?;
        }
        Command::Score { .. } | Command::Brute { .. } => {}
    }
    Ok(())
}

fn hillclimb_config(radius: usize, restarts: usize, seed: u64, epsilon: f64, max_iterations: u64) -> HillclimbConfig {
    HillclimbConfig {
        radius,
        epsilon,
        max_iterations,
        restarts,
        seed,
    }
}

fn load_scores(common: &Common) -> Result<MultiScores, CliError> {
    let text = read_file(&common.input)?;
    let opts = ParseOptions {
        weighted: common.weighted,
        assume_empty_score: common.assume_empty_score,
    };
    let scores = parse_scores(&text, &opts).map_err(|e| input(format!("{}: {e}", common.input.display())))?;
    if common.bounded_arcs {
        return Ok(encode_bounded_arcs(&scores));
    }
    match common.indegree_limit {
        Some(c) => encode_bounded_indegree(&scores, c).map_err(|e| usage(e.to_string())),
        None => Ok(scores),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_ordering(common: &Common, scores: &MultiScores) -> Result<VarOrder, CliError> {
    let Some(path) = &common.ordering else {
        return Ok(VarOrder::identity(scores.n()));
    };
    let text = read_file(path)?;
    let names: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    for name in &names {
        if scores.index_of(name).is_none() {
            return Err(input(format!("{}: unknown variable {name:?}", path.display())));
        }
    }
    VarOrder::from_names(scores, &names).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn dispatch(command: &Command, scores: &MultiScores, tau: &VarOrder) -> Result<String, CliError> {
    let common = command.common();
    let k = common.k;
    match command {
        Command::Score { .. } => {
            let dag = best_dag_for_ordering(scores, tau, k);
            Ok(render(scores, &dag, &Diagnostics::default(), common.format))
        }
        Command::Ls {
            distance,
            radius,
            seed,
            repetitions,
            oracle_reps,
            exact,
            work_bound,
            force,
            ..
        } => {
            let r = *radius;
            let result = match distance {
                LsDistance::Insert | LsDistance::Swap => {
                    let kind = if *distance == LsDistance::Insert {
                        NeighborhoodKind::Insert
                    } else {
                        NeighborhoodKind::Swap
                    };
                    let spec = NeighborhoodSpec { kind, radius: r };
                    let size = estimated_size(scores.n(), spec);
                    if size > *work_bound {
                        let msg = format!(
                            "neighborhood has about {size:.3e} orderings, above --work-bound {work_bound:.3e}; \
                             exhaustive search grows like n^r (pass --force to run anyway)"
                        );
                        if !*force {
                            return Err(usage(msg));
                        }
                        eprintln!("wbnsl: warning: {msg}");
                    }
                    local_search_xp(scores, tau, k, spec)
                }
                LsDistance::Inv if *exact => {
                    color_restricted_solve(scores, tau, k, r, &Coloring::all_distinct(scores.n()))
                }
                LsDistance::Inv => {
                    let reps = repetitions.unwrap_or_else(|| default_repetitions(r));
                    ls_inversions(scores, tau, k, r, *seed, reps)
                }
                LsDistance::Invwin => {
                    let oracle = if *exact {
                        WindowOracle::Exact
                    } else {
                        WindowOracle::Randomized {
                            repetitions: oracle_reps.unwrap_or_else(|| default_repetitions(r)),
                        }
                    };
                    ls_invwin(scores, tau, k, r, *seed, oracle)
                }
            };
            Ok(render_result(scores, &result, common.format))
        }
        Command::Hillclimb {
            radius,
            restarts,
            seed,
            epsilon,
            max_iterations,
            instance_name,
            ..
        } => {
            let cfg = hillclimb_config(*radius, *restarts, *seed, *epsilon, *max_iterations);
            let stats = if common.ordering.is_some() {
                single_climb(scores, tau, &cfg)?
            } else {
                run_restarts(scores, &cfg).map_err(|e| usage(e.to_string()))?
            };
            let format = common.format.unwrap_or(Format::Csv);
            if format == Format::Csv {
                let name = instance_name.clone().unwrap_or_else(|| instance_label(&common.input));
                return Ok(stats.to_csv(&name, *radius));
            }
            let best = stats.best_run();
            let diagnostics = Diagnostics {
                iterations: best.outcome.iterations,
                repetitions: Some(stats.runs.len() as u64),
                seed: Some(*seed),
                evaluations: 0,
            };
            Ok(render(scores, &best.outcome.dag, &diagnostics, Some(format)))
        }
        Command::Brute { distance, radius, .. } => {
            let result = match (distance, radius) {
                (Some(d), Some(r)) => brute_local_search(scores, tau, k, *r, brute_distance(*d)),
                _ => brute_best_dag(scores, k).map(|dag| SearchResult {
                    dag,
                    diagnostics: Diagnostics::default(),
                }),
            }
            .map_err(|e| input(e.to_string()))?;
            Ok(render_result(scores, &result, common.format))
        }
    }
}

/// Climbs once from the supplied ordering and reports it as a single restart.
fn single_climb(scores: &MultiScores, tau: &VarOrder, cfg: &HillclimbConfig) -> Result<RestartStats, CliError> {
    let outcome = hillclimb(scores, tau, cfg).map_err(|e| usage(e.to_string()))?;
    let score = outcome.dag.score;
    Ok(RestartStats {
        runs: vec![RestartRun {
            start: tau.clone(),
            outcome,
        }],
        average: score,
        maximum: score,
    })
}

fn brute_distance(d: BruteDistance) -> Distance {
    match d {
        BruteDistance::Insert => Distance::Insert,
        BruteDistance::Swap => Distance::Swap,
        BruteDistance::Inv => Distance::Inv,
        BruteDistance::Invwin => Distance::InvWin,
        BruteDistance::Win => Distance::Win,
    }
}

fn instance_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "instance".to_owned())
}

fn render_result(scores: &MultiScores, result: &SearchResult, format: Option<Format>) -> String {
    render(scores, &result.dag, &result.diagnostics, format)
}

fn render(scores: &MultiScores, dag: &ScoredDag, diagnostics: &Diagnostics, format: Option<Format>) -> String {
    let format = match format.unwrap_or(Format::Text) {
        Format::Text => OutputFormat::Text,
        Format::Json => OutputFormat::Json,
        Format::Dot => OutputFormat::Dot,
        Format::Csv => return csv_row(scores, dag, diagnostics),
    };
    write_result(scores, dag, diagnostics, format)
}

fn csv_row(scores: &MultiScores, dag: &ScoredDag, diagnostics: &Diagnostics) -> String {
    let mut out = String::from("score,weight,arcs,iterations,evaluations,ordering\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{}",
        dag.score,
        dag.weight,
        dag.arcs(scores).len(),
        diagnostics.iterations,
        diagnostics.evaluations,
        csv_field(&dag.ordering.display(scores).to_string())
    );
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}
