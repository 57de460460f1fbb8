//! Reading parent-score files and writing solver results.
//!
//! The unweighted grammar is the usual GOBNILP/Jaakkola layout:
//!
//! ```text
//! <number of variables>
//! <name> <number of parent sets>
//! <score> <parent count> <parent names...>
//! ...
//! ```
//!
//! The weighted grammar puts a non-negative integer weight after the score:
//! `<score> <weight> <parent count> <parent names...>`. Tokens are separated
//! by spaces or tabs, lines end in LF or CRLF, and lines whose first
//! non-blank character is `#` are skipped, as are blank lines.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::error::ModelError;
use crate::model::{Diagnostics, MultiScores, ScoreTriple, ScoredDag};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown parent {name:?}")]
    UnknownParent { line: usize, name: String },
    #[error("line {line}: variable {name:?} lists itself as a parent")]
    SelfParent { line: usize, name: String },
    #[error("line {line}: duplicate block for variable {name:?}")]
    DuplicateVariable { line: usize, name: String },
    #[error("variable {0:?} has no empty parent set with weight 0 (use --assume-empty-score to inject one)")]
    MissingEmptyParentSet(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParseOptions {
    /// Expect a weight token after every score.
    pub weighted: bool,
    /// Score of an empty parent set injected for variables that lack one.
    pub assume_empty_score: Option<f64>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.split('\n').enumerate(),
        }
    }

    /// Next meaningful line as `(1-based line number, tokens)`.
    fn next_record(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            let trimmed = line.trim_start_matches([' ', '\t']);
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens = line.split([' ', '\t']).filter(|t| !t.is_empty()).collect();
            return Some((i + 1, tokens));
        }
        None
    }
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    token
        .parse::<usize>()
        .map_err(|_| syntax(line, format!("expected {what}, found {token:?}")))
}

fn parse_score(line: usize, token: &str) -> Result<f64, ParseError> {
    match token.parse::<f64>() {
        Ok(s) if s.is_finite() => Ok(s),
        _ => Err(syntax(line, format!("expected a finite score, found {token:?}"))),
    }
}

struct RawTriple<'a> {
    line: usize,
    score: f64,
    weight: u64,
    parents: Vec<&'a str>,
}

/// Parses a score file into multiscores; variables are numbered in file order.
pub fn parse_scores(text: &str, opts: &ParseOptions) -> Result<MultiScores, ParseError> {
    let mut lines = Lines::new(text);
    let (line, tokens) = lines
        .next_record()
        .ok_or_else(|| syntax(1, "empty input, expected the number of variables"))?;
    if tokens.len() != 1 {
        return Err(syntax(line, "expected the number of variables alone on a line"));
    }
    let n = parse_count(line, tokens[0], "the number of variables")?;

    let mut names: Vec<String> = Vec::with_capacity(n);
    let mut index: HashMap<&str, usize> = HashMap::with_capacity(n);
    let mut blocks: Vec<Vec<RawTriple<'_>>> = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, tokens) = lines
            .next_record()
            .ok_or_else(|| syntax(line, format!("expected {n} variable blocks, found {}", blocks.len())))?;
        if tokens.len() != 2 {
            return Err(syntax(line, "expected a block header \"<name> <count>\""));
        }
        let name = tokens[0];
        if index.insert(name, names.len()).is_some() {
            return Err(ParseError::DuplicateVariable {
                line,
                name: name.to_owned(),
            });
        }
        let count = parse_count(line, tokens[1], "the number of parent sets")?;
        let mut block = Vec::with_capacity(count);
        for _ in 0..count {
            let (line, tokens) = lines
                .next_record()
                .ok_or_else(|| syntax(line, format!("block {name:?} ends early")))?;
            let head = if opts.weighted { 3 } else { 2 };
            if tokens.len() < head {
                return Err(syntax(line, "parent set line is too short"));
            }
            let score = parse_score(line, tokens[0])?;
            let weight = if opts.weighted {
                tokens[1]
                    .parse::<u64>()
                    .map_err(|_| syntax(line, format!("expected a non-negative weight, found {:?}", tokens[1])))?
            } else {
                0
            };
            let p = parse_count(line, tokens[head - 1], "the parent count")?;
            if tokens.len() != head + p {
                return Err(syntax(
                    line,
                    format!("declared {p} parents but found {}", tokens.len() - head),
                ));
            }
            block.push(RawTriple {
                line,
                score,
                weight,
                parents: tokens[head..].to_vec(),
            });
        }
        names.push(name.to_owned());
        blocks.push(block);
    }
    if let Some((line, _)) = lines.next_record() {
        return Err(syntax(line, format!("unexpected content after {n} variable blocks")));
    }

    let mut triples = Vec::with_capacity(n);
    for (v, block) in blocks.into_iter().enumerate() {
        let mut list = Vec::with_capacity(block.len() + 1);
        for raw in block {
            let mut parents = Vec::with_capacity(raw.parents.len());
            for name in raw.parents {
                let u = *index.get(name).ok_or_else(|| ParseError::UnknownParent {
                    line: raw.line,
                    name: name.to_owned(),
                })?;
                if u == v {
                    return Err(ParseError::SelfParent {
                        line: raw.line,
                        name: name.to_owned(),
                    });
                }
                parents.push(u);
            }
            list.push(ScoreTriple::new(parents, raw.score, raw.weight));
        }
        if !list.iter().any(|t| t.parents.is_empty() && t.weight == 0) {
            match opts.assume_empty_score {
                Some(s) => list.push(ScoreTriple::new([], s, 0)),
                None => return Err(ParseError::MissingEmptyParentSet(names[v].clone())),
            }
        }
        triples.push(list);
    }
    Ok(MultiScores::new(names, triples)?)
}

/// Canonical serialization in the unweighted or weighted grammar.
/// The unweighted form drops weights.
pub fn write_scores(scores: &MultiScores, weighted: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", scores.n());
    for v in 0..scores.n() {
        let triples = scores.triples(v);
        let _ = writeln!(out, "{} {}", scores.name(v), triples.len());
        for t in triples {
            let _ = write!(out, "{}", t.score);
            if weighted {
                let _ = write!(out, " {}", t.weight);
            }
            let _ = write!(out, " {}", t.parents.len());
            for u in t.parents.iter() {
                let _ = write!(out, " {}", scores.name(u));
            }
            out.push('\n');
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "dot" => Ok(Self::Dot),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

#[derive(Serialize)]
struct JsonResult<'a> {
    variables: &'a [String],
    arcs: Vec<[&'a str; 2]>,
    score: f64,
    weight: u64,
    ordering: Vec<&'a str>,
    seed: Option<u64>,
    repetitions: Option<u64>,
    iterations: u64,
    evaluations: u64,
}

fn dot_id(name: &str) -> String {
    let plain = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if plain {
        name.to_owned()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

/// Renders a solved arc set.
///
/// * text: one `child <- parent,parent` line per variable, then `score`,
///   `weight` and `ordering` lines;
/// * json: keys `variables`, `arcs` (`[parent, child]` pairs), `score`,
///   `weight`, `ordering`, `seed`, `repetitions` plus the remaining counters;
/// * dot: a `digraph` with one node per variable.
pub fn write_result(scores: &MultiScores, dag: &ScoredDag, diagnostics: &Diagnostics, format: OutputFormat) -> String {
    let name = |v: usize| scores.name(v);
    let mut out = String::new();
    match format {
        OutputFormat::Text => {
            for v in 0..scores.n() {
                let parents: Vec<&str> = dag.parents(scores, v).iter().map(name).collect();
                if parents.is_empty() {
                    let _ = writeln!(out, "{} <-", name(v));
                } else {
                    let _ = writeln!(out, "{} <- {}", name(v), parents.join(","));
                }
            }
            let _ = writeln!(out, "score {}", dag.score);
            let _ = writeln!(out, "weight {}", dag.weight);
            let _ = writeln!(out, "ordering {}", dag.ordering.display(scores));
        }
        OutputFormat::Json => {
            let doc = JsonResult {
                variables: scores.names(),
                arcs: dag.arcs(scores).into_iter().map(|(u, v)| [name(u), name(v)]).collect(),
                score: dag.score,
                weight: dag.weight,
                ordering: dag.ordering.as_slice().iter().map(|&v| name(v)).collect(),
                seed: diagnostics.seed,
                repetitions: diagnostics.repetitions,
                iterations: diagnostics.iterations,
                evaluations: diagnostics.evaluations,
            };
            out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
            out.push('\n');
        }
        OutputFormat::Dot => {
            out.push_str("digraph bn {\n");
            for v in 0..scores.n() {
                let _ = writeln!(out, "  {};", dot_id(name(v)));
            }
            for (u, v) in dag.arcs(scores) {
                let _ = writeln!(out, "  {} -> {};", dot_id(name(u)), dot_id(name(v)));
            }
            out.push_str("}\n");
        }
    }
    out
}
