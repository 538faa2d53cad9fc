//! Concrete runs of the network loop along one delay realization, and
//! membership of output traces in a built model.
//!
//! The simulator works on absolute sample times instead of the shifting
//! buffers of the tuple models: every packet keeps its send time and delay,
//! and at each sample the latest arrived packet is looked up with
//! [`oracle_held_packet`]. Agreement with the built models is therefore a
//! real cross-check of the buffer bookkeeping.

use std::collections::{BTreeMap, HashSet};

use crate::fts::{output_distance, FtsError, InputId, OutputLabel, StateId, System};
use crate::packet::{oracle_held_packet, DelayBounds};

use super::NcsError;

/// What happened at one sample of a simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub time: i64,
    pub plant_state: StateId,
    /// Input sent by the controller at this sample.
    pub sent: InputId,
    /// Send time of the control packet applied by the ZOH.
    pub applied_from: i64,
    pub applied: InputId,
    /// Older control packets arriving at this sample and discarded because a
    /// newer one is already available.
    pub rejected: Vec<i64>,
    /// Sample time of the measurement the controller uses (`None` before the
    /// first measurement arrives).
    pub measurement_from: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct Trace {
    /// Output pairs at samples `0..=steps`.
    pub outputs: Vec<OutputLabel>,
    pub steps: Vec<TraceStep>,
    pub plant_states: Vec<StateId>,
}

/// Runs the dynamic-controller semantics along the given delays and inputs,
/// taking the first successor whenever the plant is nondeterministic.
///
/// `sc_delays[k]` and `ca_delays[k]` are the delays drawn at step `k`: the
/// former for the measurement produced by that step, the latter for the
/// control packet `inputs[k]`.
pub fn simulate_trace(
    plant: &System,
    bounds: DelayBounds,
    sc_delays: &[u32],
    ca_delays: &[u32],
    inputs: &[InputId],
    init: StateId,
    init_input: InputId,
) -> Result<Trace, NcsError> {
    simulate_trace_with(plant, bounds, sc_delays, ca_delays, inputs, init, init_input, |s| s[0])
}

/// As [`simulate_trace`], with `choose` picking among plant successors.
#[allow(clippy::too_many_arguments)]
pub fn simulate_trace_with(
    plant: &System,
    bounds: DelayBounds,
    sc_delays: &[u32],
    ca_delays: &[u32],
    inputs: &[InputId],
    init: StateId,
    init_input: InputId,
    mut choose: impl FnMut(&[StateId]) -> StateId,
) -> Result<Trace, NcsError> {
    let (sc, ca) = (bounds.sc(), bounds.ca());
    if sc.hi() == 0 {
        return Err(NcsError::EmptyMeasurementBuffer);
    }
    let steps = inputs.len();
    for (what, seq) in [("sc_delays", sc_delays), ("ca_delays", ca_delays)] {
        if seq.len() != steps {
            return Err(NcsError::SequenceLength {
                what,
                got: seq.len(),
                expected: steps,
            });
        }
    }
    for &d in sc_delays {
        sc.check(d)?;
    }
    for &d in ca_delays {
        ca.check(d)?;
    }
    plant.posts(init, init_input)?;
    for &u in inputs {
        plant.posts(init, u)?;
    }

    let input_at = |p: i64| if p < 0 { init_input } else { inputs[p as usize] };
    let ca_delay_at = |p: i64| if p < 0 { ca.hi() } else { ca_delays[p as usize] };
    // delay of the measurement of x_s; x_0 starts with the channel maximum
    let sc_delay_of = |s: i64| if s <= 0 { sc.hi() } else { sc_delays[s as usize - 1] };

    let mut xs = vec![init];
    let mut steps_out = Vec::with_capacity(steps);
    let mut outputs = Vec::with_capacity(steps + 1);

    for t in 0..=steps as i64 {
        // measurement of x_s counts as sent at s - 1; the candidate sent "now"
        // resolves to the newest plant state
        let window: BTreeMap<i64, u32> = ((t - sc.hi() as i64)..=(t - sc.lo() as i64))
            .map(|p| (p, if p == t { sc_delay_of(t) } else { sc_delay_of(p + 1) }))
            .collect();
        let j = oracle_held_packet(t, &window, sc)? as i64;
        let p = t - sc.hi() as i64 + j;
        let s = if p == t { t } else { p + 1 };
        let x_t = xs[t as usize];
        let used = if s < 0 {
            OutputLabel::Dummy
        } else {
            plant.output(xs[s as usize]).clone()
        };
        outputs.push(OutputLabel::pair(plant.output(x_t).clone(), used));
        if t == steps as i64 {
            break;
        }

        let window: BTreeMap<i64, u32> = ((t - ca.hi() as i64)..=(t - ca.lo() as i64))
            .map(|p| (p, ca_delay_at(p)))
            .collect();
        let j = oracle_held_packet(t, &window, ca)? as i64;
        let from = t - ca.hi() as i64 + j;
        let applied = input_at(from);
        let rejected = window
            .iter()
            .filter(|&(&q, &d)| q + d as i64 == t && q < from)
            .map(|(&q, _)| q)
            .collect();
        let succ = plant.successors(x_t, applied);
        if succ.is_empty() {
            return Err(NcsError::Blocked {
                step: t as usize,
                state: plant.state_name(x_t).to_string(),
                input: plant.input_name(applied).to_string(),
            });
        }
        let next = choose(succ);
        steps_out.push(TraceStep {
            time: t,
            plant_state: x_t,
            sent: inputs[t as usize],
            applied_from: from,
            applied,
            rejected,
            measurement_from: (s >= 0).then_some(s),
        });
        xs.push(next);
    }
    Ok(Trace {
        outputs,
        steps: steps_out,
        plant_states: xs,
    })
}

/// Whether some run of `system` from an initial state produces outputs
/// within `epsilon` of `trace`, step by step.
pub fn trace_contained(
    system: &System,
    trace: &[OutputLabel],
    epsilon: f64,
) -> Result<bool, FtsError> {
    let Some((first, rest)) = trace.split_first() else {
        return Ok(true);
    };
    let close = |s: StateId, y: &OutputLabel| -> Result<bool, FtsError> {
        Ok(output_distance(system.metric(), system.output(s), y)?.within(epsilon))
    };
    let mut frontier: HashSet<StateId> = HashSet::new();
    for &s in system.initial() {
        if close(s, first)? {
            frontier.insert(s);
        }
    }
    for y in rest {
        if frontier.is_empty() {
            return Ok(false);
        }
        let mut next = HashSet::new();
        for &s in &frontier {
            for u in system.inputs() {
                for &t in system.successors(s, u) {
                    if !next.contains(&t) && close(t, y)? {
                        next.insert(t);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(!frontier.is_empty())
}
