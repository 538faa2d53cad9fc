//! Finite models of a networked control loop built from a plant abstraction.
//!
//! Two constructions are provided:
//!
//! * [`build_ncs_dynamic`]: the controller may have memory. A state buffers
//!   the last `nsc_max` plant states (padded with the dummy symbol), the last
//!   `nca_max` control inputs, and the delays suffered by each buffered packet
//!   on both channels. The output is the pair (newest plant output, output of
//!   the measurement currently used by the controller).
//! * [`build_ncs_static`]: the controller is memoryless, so both delays fold
//!   into a single controller-to-actuator delay in `[N_min; N_max]`.
//!
//! On every transition fresh delays are drawn nondeterministically for the
//! packet sent at that step, so the result is nondeterministic as soon as a
//! delay range has more than one value. Only states reachable from the
//! initial states are materialized unless [`BuildMode::Full`] is requested.
//!
//! Buffer slot `m` (1-based) is treated as the packet sent `m` samples ago.
//! When a channel's minimum delay is 0, the "sent 0 samples ago" candidate is
//! the packet produced at the current step: on the actuator side that is the
//! input labelling the transition together with its fresh delay, on the
//! sensor side it resolves to the newest buffered plant state.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use thiserror::Error;

use crate::fts::{FtsError, InputId, Metric, OutputLabel, StateId, System, SystemBuilder};
use crate::packet::{DelayBounds, PacketError};

mod dot;
mod dynamic;
mod fixed;
mod trace;

pub use dot::to_dot;
pub use dynamic::NcsState;
pub use fixed::StaticNcsState;
pub use trace::{simulate_trace, simulate_trace_with, trace_contained, Trace, TraceStep};

#[derive(Debug, Error)]
pub enum NcsError {
    #[error("the plant has no inputs")]
    NoInputs,
    #[error("the plant has no initial states")]
    NoInitialStates,
    #[error("the dynamic model needs nsc_max >= 1 to hold the plant state")]
    EmptyMeasurementBuffer,
    #[error("plant outputs must use a discrete or infinity-norm metric, not {0}")]
    PlantMetric(Metric),
    #[error("{what} has length {got}, expected {expected}")]
    SequenceLength {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("plant state {state} has no successor under input {input} at step {step}")]
    Blocked {
        step: usize,
        state: String,
        input: String,
    },
    #[error(transparent)]
    Delay(#[from] PacketError),
    #[error(transparent)]
    System(#[from] FtsError),
}

/// One entry of a measurement buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasSlot {
    Dummy,
    State(StateId),
}

impl MeasSlot {
    pub fn output(&self, plant: &System) -> OutputLabel {
        match self {
            MeasSlot::Dummy => OutputLabel::Dummy,
            MeasSlot::State(s) => plant.output(*s).clone(),
        }
    }

    pub fn name<'a>(&self, plant: &'a System) -> &'a str {
        match self {
            MeasSlot::Dummy => crate::fts::json::DUMMY_TOKEN,
            MeasSlot::State(s) => plant.state_name(*s),
        }
    }
}

/// Whether to materialize only reachable states or the whole product space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BuildMode {
    #[default]
    Reachable,
    Full,
}

/// Tuple states of a network model.
pub trait NcsTuple: Clone + Debug + Eq + Hash + Send + Sync {
    /// Rejects bounds the construction cannot represent.
    fn check_bounds(bounds: &DelayBounds) -> Result<(), NcsError>;

    fn metric(plant: &System) -> Metric;

    fn initial_states(plant: &System, bounds: &DelayBounds) -> Vec<Self>;

    /// Every tuple of the product state space.
    fn all_states(plant: &System, bounds: &DelayBounds) -> Vec<Self>;

    /// All `input`-successors, over every fresh delay choice.
    fn successors(&self, plant: &System, bounds: &DelayBounds, input: InputId) -> Vec<Self>;

    fn output(&self, plant: &System, bounds: &DelayBounds) -> OutputLabel;

    /// Canonical string form, used as the state name.
    fn canonical(&self, plant: &System) -> String;

    /// Every buffered delay, both channels concatenated.
    fn delays(&self) -> Vec<u32>;

    fn input_buffer(&self) -> &[InputId];

    /// Buffered plant states (or the plant state, for static tuples).
    fn plant_slots(&self) -> Vec<MeasSlot>;
}

/// A built network model: the finite system plus the tuple behind each state.
#[derive(Clone, Debug)]
pub struct NcsModel<S> {
    system: System,
    tuples: Vec<S>,
    lookup: HashMap<S, StateId>,
    bounds: DelayBounds,
    plant: System,
}

pub type DynamicModel = NcsModel<NcsState>;
pub type StaticModel = NcsModel<StaticNcsState>;

impl<S: NcsTuple> NcsModel<S> {
    pub fn build(plant: &System, bounds: DelayBounds, mode: BuildMode) -> Result<Self, NcsError> {
        S::check_bounds(&bounds)?;
        if plant.num_inputs() == 0 {
            return Err(NcsError::NoInputs);
        }
        if plant.initial().is_empty() {
            return Err(NcsError::NoInitialStates);
        }
        if plant.metric() == Metric::PairwiseMax {
            return Err(NcsError::PlantMetric(plant.metric()));
        }
        let mut tuples: Vec<S> = Vec::new();
        let mut lookup: HashMap<S, StateId> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut intern = |t: S, tuples: &mut Vec<S>, queue: &mut VecDeque<StateId>| -> StateId {
            if let Some(&id) = lookup.get(&t) {
                return id;
            }
            let id = StateId(tuples.len());
            lookup.insert(t.clone(), id);
            tuples.push(t);
            queue.push_back(id);
            id
        };
        let initial: Vec<StateId> = S::initial_states(plant, &bounds)
            .into_iter()
            .map(|t| intern(t, &mut tuples, &mut queue))
            .collect();
        if mode == BuildMode::Full {
            for t in S::all_states(plant, &bounds) {
                intern(t, &mut tuples, &mut queue);
            }
        }
        let mut edges = Vec::new();
        while let Some(id) = queue.pop_front() {
            let current = tuples[id.0].clone();
            for u in plant.inputs() {
                for next in current.successors(plant, &bounds, u) {
                    let to = intern(next, &mut tuples, &mut queue);
                    edges.push((id, u, to));
                }
            }
        }

        let mut b = SystemBuilder::new(S::metric(plant));
        for u in plant.inputs() {
            b.add_input(plant.input_name(u))?;
        }
        for t in &tuples {
            b.add_state(t.canonical(plant), t.output(plant, &bounds))?;
        }
        for id in initial {
            b.mark_initial(id);
        }
        for (s, u, t) in edges {
            b.add_transition(s, u, t);
        }
        Ok(NcsModel {
            system: b.build()?,
            lookup,
            tuples,
            bounds,
            plant: plant.clone(),
        })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn into_system(self) -> System {
        self.system
    }

    pub fn tuple(&self, s: StateId) -> &S {
        &self.tuples[s.0]
    }

    pub fn tuples(&self) -> &[S] {
        &self.tuples
    }

    pub fn id_of(&self, tuple: &S) -> Option<StateId> {
        self.lookup.get(tuple).copied()
    }

    pub fn bounds(&self) -> DelayBounds {
        self.bounds
    }

    pub fn plant(&self) -> &System {
        &self.plant
    }

    /// Restriction to the states reachable from the initial states.
    pub fn prune(&self) -> Self {
        let keep = self.system.reachable();
        let tuples: Vec<S> = keep.iter().map(|s| self.tuples[s.0].clone()).collect();
        NcsModel {
            system: self.system.restrict(&keep),
            lookup: tuples.iter().cloned().zip((0..tuples.len()).map(StateId)).collect(),
            tuples,
            bounds: self.bounds,
            plant: self.plant.clone(),
        }
    }
}

/// Network model for a controller with memory, reachable states only.
pub fn build_ncs_dynamic(plant: &System, bounds: DelayBounds) -> Result<DynamicModel, NcsError> {
    NcsModel::build(plant, bounds, BuildMode::Reachable)
}

/// Network model for a memoryless controller, reachable states only.
pub fn build_ncs_static(plant: &System, bounds: DelayBounds) -> Result<StaticModel, NcsError> {
    NcsModel::build(plant, bounds, BuildMode::Reachable)
}

/// Subsystem induced by forward reachability from the initial states.
pub fn reachable_prune(system: &System) -> System {
    system.restrict(&system.reachable())
}

/// Output map of the dynamic model.
pub fn ncs_output(state: &NcsState, plant: &System, bounds: &DelayBounds) -> OutputLabel {
    state.output(plant, bounds)
}

/// All index vectors of length `len` over `0..choices`, lexicographic order.
pub(crate) fn index_product(choices: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * choices);
        for prefix in &out {
            for c in 0..choices {
                let mut v = prefix.clone();
                v.push(c);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// Shift a buffer right by one and put `fresh` in front, keeping the length.
pub(crate) fn shifted<T: Copy>(fresh: T, buffer: &[T]) -> Vec<T> {
    if buffer.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(buffer.len());
    out.push(fresh);
    out.extend_from_slice(&buffer[..buffer.len() - 1]);
    out
}

pub(crate) fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(",")
}
