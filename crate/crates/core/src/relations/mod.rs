//! Approximate and alternating approximate (bi)simulation relations between
//! finite metric systems.
//!
//! A relation `R ⊆ Xa × Xb` is an ε-approximate simulation from `Sa` to `Sb`
//! when
//!
//! 1. every initial state of `Sa` is related to some initial state of `Sb`,
//! 2. related states have outputs at distance at most ε,
//! 3. the transfer condition holds. Plain: every transition of `xa` is
//!    matched by some transition of `xb` landing in `R`. Alternating: for
//!    every input enabled at `xa` there is an input enabled at `xb` such that
//!    every successor of `xb` is related to some successor of `xa`.
//!
//! Bisimulation asks the same of `R` and of its inverse.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::fts::{FtsError, InputId, Metric, StateId, System};

mod check;
mod largest;
mod lift;

pub use check::{check_bisimulation, check_simulation, transfer_holds, transfer_violation};
pub use largest::{largest_approx_bisimulation, largest_approx_simulation, LargestSimulation};
pub use lift::lift_relation;

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("output metrics differ: {left} vs {right}")]
    MetricMismatch { left: Metric, right: Metric },
    #[error("pair ({0}, {1}) refers to a state outside the systems")]
    PairOutOfRange(StateId, StateId),
    #[error("delay bounds differ: {0}")]
    BoundsMismatch(String),
    #[error("unknown state {0:?} in relation file")]
    UnknownState(String),
    #[error("malformed relation file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    System(#[from] FtsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimulationKind {
    Plain,
    Alternating,
}

/// The three conditions of a simulation relation, in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Condition {
    #[serde(rename = "initial-coverage")]
    InitialCoverage,
    #[serde(rename = "output-closeness")]
    OutputCloseness,
    #[serde(rename = "transfer")]
    Transfer,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::InitialCoverage => "(i) initial coverage",
            Condition::OutputCloseness => "(ii) output closeness",
            Condition::Transfer => "(iii) transfer",
        })
    }
}

/// Witness of a violated condition. For (i) only `left` is set; `input` is
/// the unmatched left input for (iii).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub condition: Condition,
    pub left: StateId,
    pub right: Option<StateId>,
    pub input: Option<InputId>,
}

impl Counterexample {
    /// JSON form with state and input names.
    pub fn to_json(&self, left: &System, right: &System) -> serde_json::Value {
        serde_json::json!({
            "condition": self.condition,
            "left": left.state_name(self.left),
            "right": self.right.map(|s| right.state_name(s)),
            "input": self.input.map(|u| left.input_name(u)),
        })
    }
}

/// Outcome of a simulation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Counterexample),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `R` from left to right failed.
    #[serde(rename = "forward")]
    Forward,
    /// `R⁻¹` from right to left failed.
    #[serde(rename = "backward")]
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimVerdict {
    Holds,
    Violated {
        direction: Direction,
        counterexample: Counterexample,
    },
}

impl BisimVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, BisimVerdict::Holds)
    }
}

/// A finite set of (left state, right state) pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Relation {
    pairs: BTreeSet<(StateId, StateId)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{(s, s)}` over `n` states.
    pub fn diagonal(n: usize) -> Self {
        (0..n).map(|i| (StateId(i), StateId(i))).collect()
    }

    /// Pairs of states with equal names.
    pub fn by_name(left: &System, right: &System) -> Self {
        left.states()
            .filter_map(|s| right.state_id(left.state_name(s)).map(|t| (s, t)))
            .collect()
    }

    pub fn insert(&mut self, left: StateId, right: StateId) -> bool {
        self.pairs.insert((left, right))
    }

    pub fn remove(&mut self, left: StateId, right: StateId) -> bool {
        self.pairs.remove(&(left, right))
    }

    pub fn contains(&self, left: StateId, right: StateId) -> bool {
        self.pairs.contains(&(left, right))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, StateId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn inverse(&self) -> Relation {
        self.iter().map(|(a, b)| (b, a)).collect()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Serialized as an array of `[left-name, right-name]`.
    pub fn to_json(&self, left: &System, right: &System) -> String {
        let named: Vec<(&str, &str)> = self
            .iter()
            .map(|(a, b)| (left.state_name(a), right.state_name(b)))
            .collect();
        serde_json::to_string_pretty(&named).expect("names serialize")
    }

    pub fn from_json(text: &str, left: &System, right: &System) -> Result<Self, RelationError> {
        let named: Vec<(String, String)> = serde_json::from_str(text)?;
        named
            .into_iter()
            .map(|(a, b)| {
                let l = left.state_id(&a).ok_or(RelationError::UnknownState(a))?;
                let r = right.state_id(&b).ok_or(RelationError::UnknownState(b))?;
                Ok((l, r))
            })
            .collect::<Result<Vec<_>, RelationError>>()
            .map(|pairs| pairs.into_iter().collect())
    }

    pub(crate) fn check_range(&self, left: &System, right: &System) -> Result<(), RelationError> {
        match self
            .iter()
            .find(|(a, b)| a.0 >= left.num_states() || b.0 >= right.num_states())
        {
            Some((a, b)) => Err(RelationError::PairOutOfRange(a, b)),
            None => Ok(()),
        }
    }
}

impl FromIterator<(StateId, StateId)> for Relation {
    fn from_iter<I: IntoIterator<Item = (StateId, StateId)>>(iter: I) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl<'a> FromIterator<&'a (StateId, StateId)> for Relation {
    fn from_iter<I: IntoIterator<Item = &'a (StateId, StateId)>>(iter: I) -> Self {
        iter.into_iter().copied().collect()
    }
}

/// Dense membership matrix used by the checking loops.
#[derive(Clone)]
pub(crate) struct PairMatrix {
    cols: usize,
    bits: Vec<bool>,
}

impl PairMatrix {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        PairMatrix {
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub(crate) fn from_relation(rel: &Relation, rows: usize, cols: usize) -> Self {
        let mut m = Self::new(rows, cols);
        for (a, b) in rel.iter() {
            m.set(a, b, true);
        }
        m
    }

    #[inline]
    pub(crate) fn get(&self, a: StateId, b: StateId) -> bool {
        self.bits[a.0 * self.cols + b.0]
    }

    #[inline]
    pub(crate) fn set(&mut self, a: StateId, b: StateId, v: bool) {
        self.bits[a.0 * self.cols + b.0] = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::two_state_plant;

    #[test]
    fn json_round_trip() {
        let p = two_state_plant();
        let r: Relation = [(StateId(0), StateId(1)), (StateId(1), StateId(1))].iter().collect();
        let text = r.to_json(&p, &p);
        assert!(text.contains("\"x\""));
        assert_eq!(Relation::from_json(&text, &p, &p).unwrap(), r);
        assert!(matches!(
            Relation::from_json("[[\"x\", \"nope\"]]", &p, &p),
            Err(RelationError::UnknownState(_))
        ));
    }

    #[test]
    fn inverse_and_subset() {
        let r: Relation = [(StateId(0), StateId(1))].iter().collect();
        assert!(r.inverse().contains(StateId(1), StateId(0)));
        assert!(r.is_subset(&r));
        assert!(Relation::new().is_subset(&r));
        assert_eq!(Relation::diagonal(3).len(), 3);
    }
}
