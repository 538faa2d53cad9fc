//! Finite transition systems with outputs and output metrics.
//!
//! A [`System`] is the common substrate for plant abstractions, the network
//! models built on top of them, and the relation engine. State and input
//! identifiers are interned: names live in the system, everything else works
//! on dense [`StateId`] / [`InputId`] indices. Systems are immutable once
//! built; use [`SystemBuilder`] to assemble one.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

pub mod json;
mod metric;

pub use metric::{output_distance, Distance, Metric, OutputLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for InputId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

#[derive(Debug, Error)]
pub enum FtsError {
    #[error("unknown state {0}")]
    UnknownState(String),
    #[error("unknown input {0}")]
    UnknownInput(String),
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("duplicate input name {0:?}")]
    DuplicateInput(String),
    #[error("unknown metric kind {0:?}")]
    UnknownMetric(String),
    #[error("labels {left} and {right} cannot be compared under the {metric} metric")]
    IncompatibleLabels {
        metric: Metric,
        left: String,
        right: String,
    },
    #[error("output label {label} of state {state:?} does not fit the {metric} metric")]
    LabelShape {
        state: String,
        label: String,
        metric: Metric,
    },
}

/// A finite system `(X, X0, U, ->, Y, H)` with a metric on `Y`.
#[derive(Clone, Debug)]
pub struct System {
    state_names: Vec<String>,
    state_lookup: HashMap<String, StateId>,
    input_names: Vec<String>,
    input_lookup: HashMap<String, InputId>,
    initial: BTreeSet<StateId>,
    // post[state][input] is sorted and deduplicated
    post: Vec<Vec<Vec<StateId>>>,
    outputs: Vec<OutputLabel>,
    metric: Metric,
    transition_count: usize,
}

impl System {
    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = StateId> + Clone {
        (0..self.state_names.len()).map(StateId)
    }

    pub fn inputs(&self) -> impl ExactSizeIterator<Item = InputId> + Clone {
        (0..self.input_names.len()).map(InputId)
    }

    pub fn initial(&self) -> &BTreeSet<StateId> {
        &self.initial
    }

    pub fn is_initial(&self, s: StateId) -> bool {
        self.initial.contains(&s)
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.state_names[s.0]
    }

    pub fn input_name(&self, u: InputId) -> &str {
        &self.input_names[u.0]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_lookup.get(name).copied()
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.input_lookup.get(name).copied()
    }

    pub fn output(&self, s: StateId) -> &OutputLabel {
        &self.outputs[s.0]
    }

    /// `Post_u(x)`: all `u`-successors of `state`.
    pub fn posts(&self, state: StateId, input: InputId) -> Result<&[StateId], FtsError> {
        self.check_state(state)?;
        self.check_input(input)?;
        Ok(&self.post[state.0][input.0])
    }

    /// Unchecked variant of [`System::posts`] for hot loops.
    pub fn successors(&self, state: StateId, input: InputId) -> &[StateId] {
        &self.post[state.0][input.0]
    }

    /// `U(x)`: inputs with at least one successor from `state`.
    pub fn enabled_inputs(&self, state: StateId) -> Result<Vec<InputId>, FtsError> {
        self.check_state(state)?;
        Ok(self.enabled(state).collect())
    }

    pub(crate) fn enabled(&self, state: StateId) -> impl Iterator<Item = InputId> + '_ {
        self.post[state.0]
            .iter()
            .enumerate()
            .filter(|(_, succ)| !succ.is_empty())
            .map(|(u, _)| InputId(u))
    }

    /// `|S| = |->|`, the number of transition triples.
    pub fn size(&self) -> usize {
        self.transition_count
    }

    /// At most one successor for every state and input.
    pub fn is_deterministic(&self) -> bool {
        self.post.iter().flatten().all(|succ| succ.len() <= 1)
    }

    /// Largest `|Post_u(x)|` over all states and inputs.
    pub fn max_branching(&self) -> usize {
        self.post.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    /// All transition triples in (source, input, target) order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, InputId, StateId)> + '_ {
        self.post.iter().enumerate().flat_map(|(s, by_input)| {
            by_input.iter().enumerate().flat_map(move |(u, succ)| {
                succ.iter().map(move |&t| (StateId(s), InputId(u), t))
            })
        })
    }

    /// States reachable from the initial states, in breadth-first order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = Vec::new();
        let mut queue: VecDeque<StateId> = VecDeque::new();
        for &s in &self.initial {
            seen[s.0] = true;
            queue.push_back(s);
        }
        while let Some(s) = queue.pop_front() {
            order.push(s);
            for succ in &self.post[s.0] {
                for &t in succ {
                    if !seen[t.0] {
                        seen[t.0] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        order
    }

    /// Subsystem induced by `keep` (in the given order). Transitions leaving
    /// the kept set are dropped.
    pub fn restrict(&self, keep: &[StateId]) -> System {
        let mut b = SystemBuilder::new(self.metric);
        for u in self.inputs() {
            b.add_input(self.input_name(u)).expect("input names are unique");
        }
        let mut remap = vec![None; self.num_states()];
        for &s in keep {
            let id = b
                .add_state(self.state_name(s), self.output(s).clone())
                .expect("state names are unique");
            remap[s.0] = Some(id);
            if self.is_initial(s) {
                b.mark_initial(id);
            }
        }
        for &s in keep {
            let src = remap[s.0].unwrap();
            for u in self.inputs() {
                for &t in self.successors(s, u) {
                    if let Some(dst) = remap[t.0] {
                        b.add_transition(src, u, dst);
                    }
                }
            }
        }
        b.build().expect("restriction of a valid system is valid")
    }

    /// Structural equality by names: same states, inputs, initial states,
    /// transitions, outputs and metric (state order is ignored).
    pub fn same_as(&self, other: &System) -> bool {
        if self.metric != other.metric
            || self.num_states() != other.num_states()
            || self.input_names != other.input_names
            || self.size() != other.size()
        {
            return false;
        }
        for s in self.states() {
            let Some(t) = other.state_id(self.state_name(s)) else {
                return false;
            };
            if self.is_initial(s) != other.is_initial(t) || self.output(s) != other.output(t) {
                return false;
            }
            for u in self.inputs() {
                let mine: BTreeSet<&str> =
                    self.successors(s, u).iter().map(|&x| self.state_name(x)).collect();
                let theirs: BTreeSet<&str> =
                    other.successors(t, u).iter().map(|&x| other.state_name(x)).collect();
                if mine != theirs {
                    return false;
                }
            }
        }
        true
    }

    fn check_state(&self, s: StateId) -> Result<(), FtsError> {
        if s.0 < self.num_states() {
            Ok(())
        } else {
            Err(FtsError::UnknownState(s.to_string()))
        }
    }

    fn check_input(&self, u: InputId) -> Result<(), FtsError> {
        if u.0 < self.num_inputs() {
            Ok(())
        } else {
            Err(FtsError::UnknownInput(u.to_string()))
        }
    }
}

/// Incremental constructor for [`System`].
#[derive(Debug)]
pub struct SystemBuilder {
    metric: Metric,
    state_names: Vec<String>,
    state_lookup: HashMap<String, StateId>,
    input_names: Vec<String>,
    input_lookup: HashMap<String, InputId>,
    outputs: Vec<OutputLabel>,
    initial: BTreeSet<StateId>,
    transitions: Vec<(StateId, InputId, StateId)>,
}

impl SystemBuilder {
    pub fn new(metric: Metric) -> Self {
        SystemBuilder {
            metric,
            state_names: Vec::new(),
            state_lookup: HashMap::new(),
            input_names: Vec::new(),
            input_lookup: HashMap::new(),
            outputs: Vec::new(),
            initial: BTreeSet::new(),
            transitions: Vec::new(),
        }
    }

    pub fn add_state(
        &mut self,
        name: impl Into<String>,
        output: OutputLabel,
    ) -> Result<StateId, FtsError> {
        let name = name.into();
        if self.state_lookup.contains_key(&name) {
            return Err(FtsError::DuplicateState(name));
        }
        if !self.metric.accepts(&output) {
            return Err(FtsError::LabelShape {
                state: name,
                label: output.to_string(),
                metric: self.metric,
            });
        }
        let id = StateId(self.state_names.len());
        self.state_lookup.insert(name.clone(), id);
        self.state_names.push(name);
        self.outputs.push(output);
        Ok(id)
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> Result<InputId, FtsError> {
        let name = name.into();
        if self.input_lookup.contains_key(&name) {
            return Err(FtsError::DuplicateInput(name));
        }
        let id = InputId(self.input_names.len());
        self.input_lookup.insert(name.clone(), id);
        self.input_names.push(name);
        Ok(id)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_lookup.get(name).copied()
    }

    pub fn input_id(&self, name: &str) -> Option<InputId> {
        self.input_lookup.get(name).copied()
    }

    pub fn mark_initial(&mut self, s: StateId) {
        self.initial.insert(s);
    }

    pub fn add_transition(&mut self, from: StateId, input: InputId, to: StateId) {
        self.transitions.push((from, input, to));
    }

    pub fn build(self) -> Result<System, FtsError> {
        let n = self.state_names.len();
        let m = self.input_names.len();
        if let Some(bad) = self.initial.iter().find(|s| s.0 >= n) {
            return Err(FtsError::UnknownState(bad.to_string()));
        }
        let mut post = vec![vec![Vec::new(); m]; n];
        for &(s, u, t) in &self.transitions {
            if s.0 >= n {
                return Err(FtsError::UnknownState(s.to_string()));
            }
            if t.0 >= n {
                return Err(FtsError::UnknownState(t.to_string()));
            }
            if u.0 >= m {
                return Err(FtsError::UnknownInput(u.to_string()));
            }
            post[s.0][u.0].push(t);
        }
        let mut transition_count = 0;
        for succ in post.iter_mut().flatten() {
            succ.sort_unstable();
            succ.dedup();
            transition_count += succ.len();
        }
        Ok(System {
            state_names: self.state_names,
            state_lookup: self.state_lookup,
            input_names: self.input_names,
            input_lookup: self.input_lookup,
            initial: self.initial,
            post,
            outputs: self.outputs,
            metric: self.metric,
            transition_count,
        })
    }
}

/// The two-state plant abstraction used throughout the tests and examples:
/// states `x`, `y` (outputs `Z`, `W`), inputs `a`, `b`, input `a` leads to
/// `x` and `b` to `y` from either state.
pub fn two_state_plant() -> System {
    let mut b = SystemBuilder::new(Metric::Discrete);
    let x = b.add_state("x", OutputLabel::atom("Z")).unwrap();
    let y = b.add_state("y", OutputLabel::atom("W")).unwrap();
    let a = b.add_input("a").unwrap();
    let bb = b.add_input("b").unwrap();
    b.mark_initial(x);
    b.mark_initial(y);
    b.add_transition(x, a, x);
    b.add_transition(x, bb, y);
    b.add_transition(y, a, x);
    b.add_transition(y, bb, y);
    b.build().unwrap()
}
