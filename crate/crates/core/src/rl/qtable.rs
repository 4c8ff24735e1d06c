//! Dense decomposed Q-tables and their flat-file form.
//!
//! File layout (UTF-8, whitespace separated):
//!
//! ```text
//! memtune-qtables 1
//! agents <N>
//! components <C>
//! arities <a_1> ... <a_N>
//! <C values for agent 1, state 0, action 0>
//! <C values for agent 1, state 0, action 1>
//! ...
//! ```
//!
//! Rows are agent-major, then state, then action. Values use Rust's shortest
//! round-trip exponent form, so a write/read cycle is lossless.

use std::fmt::Write as _;

use thiserror::Error;

use crate::controller::METRIC_COUNT;

/// Expected return per (local state, local action, reward component).
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    arity: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(arity: usize) -> Self {
        assert!(arity >= 1, "a Q-table needs at least one action");
        Self { arity, values: vec![0.0; arity * arity * METRIC_COUNT] }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    fn offset(&self, state: usize, action: usize) -> usize {
        assert!(state < self.arity && action < self.arity, "index out of range");
        (state * self.arity + action) * METRIC_COUNT
    }

    pub fn get(&self, state: usize, action: usize, component: usize) -> f64 {
        self.values[self.offset(state, action) + component]
    }

    pub fn set(&mut self, state: usize, action: usize, component: usize, value: f64) {
        let at = self.offset(state, action) + component;
        self.values[at] = value;
    }

    /// The component vector `Q(s, a)`.
    pub fn components(&self, state: usize, action: usize) -> &[f64] {
        let at = self.offset(state, action);
        &self.values[at..at + METRIC_COUNT]
    }

    /// Sum over components, in component order.
    pub fn summed(&self, state: usize, action: usize) -> f64 {
        self.components(state, action).iter().sum()
    }

    /// Argmax of the summed values; ties go to the lowest action index.
    pub fn greedy_action(&self, state: usize) -> usize {
        let mut best = 0;
        let mut best_value = self.summed(state, 0);
        for action in 1..self.arity {
            let value = self.summed(state, action);
            if value > best_value {
                best = action;
                best_value = value;
            }
        }
        best
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QTableFileError {
    #[error("q-table file: {0}")]
    Corrupt(String),
}

pub fn write_qtables(tables: &[QTable]) -> String {
    let mut out = String::new();
    writeln!(out, "memtune-qtables 1").unwrap();
    writeln!(out, "agents {}", tables.len()).unwrap();
    writeln!(out, "components {METRIC_COUNT}").unwrap();
    let arities: Vec<String> = tables.iter().map(|t| t.arity.to_string()).collect();
    writeln!(out, "arities {}", arities.join(" ")).unwrap();
    for table in tables {
        for row in table.values.chunks(METRIC_COUNT) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", cells.join(" ")).unwrap();
        }
    }
    out
}

pub fn read_qtables(text: &str) -> Result<Vec<QTable>, QTableFileError> {
    let corrupt = |msg: String| QTableFileError::Corrupt(msg);
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let mut header = |key: &str| -> Result<Vec<String>, QTableFileError> {
        let (n, line) = lines.next().ok_or_else(|| corrupt(format!("missing `{key}` header")))?;
        let mut words = line.split_whitespace();
        if words.next() != Some(key) {
            return Err(corrupt(format!("line {}: expected `{key}`", n + 1)));
        }
        Ok(words.map(str::to_string).collect())
    };
    if header("memtune-qtables")? != ["1"] {
        return Err(corrupt("unsupported format version".into()));
    }
    let parse_count = |words: Vec<String>, key: &str| -> Result<usize, QTableFileError> {
        match words.as_slice() {
            [w] => w.parse().map_err(|_| corrupt(format!("`{key}` is not a count"))),
            _ => Err(corrupt(format!("`{key}` takes one value"))),
        }
    };
    let agents = parse_count(header("agents")?, "agents")?;
    let components = parse_count(header("components")?, "components")?;
    if components != METRIC_COUNT {
        return Err(corrupt(format!("expected {METRIC_COUNT} components, found {components}")));
    }
    let arities = header("arities")?
        .iter()
        .map(|w| w.parse::<usize>().ok().filter(|&a| a >= 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| corrupt("arities must be positive integers".into()))?;
    if arities.len() != agents {
        return Err(corrupt(format!("{} arities for {agents} agents", arities.len())));
    }
    let mut tables: Vec<QTable> = arities.iter().map(|&a| QTable::new(a)).collect();
    for table in &mut tables {
        for row in table.values.chunks_mut(METRIC_COUNT) {
            let (n, line) = lines.next().ok_or_else(|| corrupt("file ends before all rows were read".into()))?;
            let parsed = line
                .split_whitespace()
                .map(|w| w.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| corrupt(format!("line {}: values must be finite numbers", n + 1)))?;
            if parsed.len() != METRIC_COUNT {
                return Err(corrupt(format!("line {}: expected {METRIC_COUNT} values", n + 1)));
            }
            row.copy_from_slice(&parsed);
        }
    }
    if let Some((n, _)) = lines.next() {
        return Err(corrupt(format!("line {}: unexpected trailing data", n + 1)));
    }
    Ok(tables)
}
