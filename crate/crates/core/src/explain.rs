//! Reward-difference explanations for an agent's choice between two actions.
//!
//! Components are indexed in [`Metric::ALL`] order. All subset sums are taken
//! in ascending component order so results do not depend on insertion order.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Metric, METRIC_COUNT};
use crate::rl::QTable;

/// Component-wise `Q(s, a1) - Q(s, a2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector(pub [f64; METRIC_COUNT]);

impl DeltaVector {
    pub fn component_name(component: usize) -> &'static str {
        Metric::ALL[component].name()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    fn sum_of(&self, set: &[usize]) -> f64 {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.iter().map(|&c| self.0[c]).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExplainError {
    #[error("the first action is not preferred over the second, nothing to explain")]
    NotPreferred,
    #[error("action {chosen} is not a greedy choice in state {state}")]
    NotArgmax { state: usize, chosen: usize },
}

pub fn rdx(q: &QTable, state: usize, a1: usize, a2: usize) -> DeltaVector {
    let x = q.components(state, a1);
    let y = q.components(state, a2);
    DeltaVector(std::array::from_fn(|c| x[c] - y[c]))
}

/// Total size of the negative components.
pub fn disadvantage(delta: &DeltaVector) -> f64 {
    -delta.0.iter().filter(|&&v| v < 0.0).sum::<f64>()
}

/// Component indices ordered by descending `key`, ties by index.
fn ranked(delta: &DeltaVector, keep: impl Fn(f64) -> bool, key: impl Fn(f64) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..METRIC_COUNT).filter(|&c| keep(delta.0[c])).collect();
    idx.sort_by(|&a, &b| key(delta.0[b]).total_cmp(&key(delta.0[a])).then(a.cmp(&b)));
    idx
}

/// Smallest set of positive components whose sum exceeds the disadvantage.
/// Returned in ascending index order.
pub fn msx_plus(delta: &DeltaVector) -> Result<Vec<usize>, ExplainError> {
    let d = disadvantage(delta);
    let order = ranked(delta, |v| v > 0.0, |v| v);
    for k in 1..=order.len() {
        let mut set = order[..k].to_vec();
        if delta.sum_of(&set) > d {
            set.sort_unstable();
            return Ok(set);
        }
    }
    Err(ExplainError::NotPreferred)
}

/// Sum of the set minus its weakest member.
pub fn necessity_v(msx_plus: &[usize], delta: &DeltaVector) -> f64 {
    assert!(!msx_plus.is_empty(), "necessity threshold needs a non-empty set");
    let min = msx_plus.iter().map(|&c| delta.0[c]).fold(f64::INFINITY, f64::min);
    delta.sum_of(msx_plus) - min
}

/// Smallest set of negative components whose total loss exceeds `v`, or empty.
pub fn msx_minus(delta: &DeltaVector, v: f64) -> Vec<usize> {
    let order = ranked(delta, |x| x < 0.0, |x| -x);
    for k in 1..=order.len() {
        let mut set = order[..k].to_vec();
        if -delta.sum_of(&set) > v {
            set.sort_unstable();
            return set;
        }
    }
    Vec::new()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub state: usize,
    pub chosen: usize,
    pub alternative: usize,
    pub delta: DeltaVector,
    pub d: f64,
    /// False when the two actions have equal expected return; the sets are then empty.
    pub preferred: bool,
    pub msx_plus: Vec<usize>,
    pub v: f64,
    pub msx_minus: Vec<usize>,
    pub rationale: String,
}

fn name_list(components: &[usize]) -> String {
    let names: Vec<&str> = components.iter().map(|&c| DeltaVector::component_name(c)).collect();
    match names.as_slice() {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

/// Explains `chosen` against each alternative. `label` renders action values.
pub fn explain_decision(
    q: &QTable,
    state: usize,
    chosen: usize,
    alternatives: &[usize],
    label: impl Fn(usize) -> String,
) -> Result<Vec<Explanation>, ExplainError> {
    let best = q.summed(state, chosen);
    if (0..q.arity()).any(|a| q.summed(state, a) > best) {
        return Err(ExplainError::NotArgmax { state, chosen });
    }
    let mut out = Vec::new();
    for &alt in alternatives.iter().filter(|&&a| a != chosen) {
        let delta = rdx(q, state, chosen, alt);
        let d = disadvantage(&delta);
        let (chosen_label, alt_label) = (label(chosen), label(alt));
        let explanation = match msx_plus(&delta) {
            Ok(plus) => {
                let v = necessity_v(&plus, &delta);
                let minus = msx_minus(&delta, v);
                let losses: Vec<usize> = (0..METRIC_COUNT).filter(|&c| delta.0[c] < 0.0).collect();
                let mut rationale = format!(
                    "choosing {chosen_label} over {alt_label}: the improvement in {} alone justifies the action",
                    name_list(&plus)
                );
                if !losses.is_empty() {
                    rationale.push_str(&format!(", despite losses in {}", name_list(&losses)));
                }
                Explanation { state, chosen, alternative: alt, delta, d, preferred: true, msx_plus: plus, v, msx_minus: minus, rationale }
            }
            Err(_) => Explanation {
                state,
                chosen,
                alternative: alt,
                delta,
                d,
                preferred: false,
                msx_plus: Vec::new(),
                v: 0.0,
                msx_minus: Vec::new(),
                rationale: format!("no preference between {chosen_label} and {alt_label}: expected returns are equal"),
            },
        };
        out.push(explanation);
    }
    Ok(out)
}
