use crate::fts::{InputId, Metric, OutputLabel, System};
use crate::packet::{selected_age, ChannelRange, DelayBounds, DelayHistory};

use super::{index_product, join, shifted, MeasSlot, NcsError, NcsTuple};

/// State of the dynamic-controller model.
///
/// Slot `i` of every buffer (0-based here) belongs to the packet sent `i + 1`
/// samples ago; `meas[0]` is the current plant state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcsState {
    pub meas: Vec<MeasSlot>,
    pub inputs: Vec<InputId>,
    pub sc_delays: Vec<u32>,
    pub ca_delays: Vec<u32>,
}

impl NcsState {
    /// Sensor-channel history as seen by the controller.
    pub fn sc_history(&self, range: ChannelRange) -> DelayHistory {
        let values = range
            .values()
            .map(|m| self.sc_delays[m.max(1) as usize - 1])
            .collect();
        DelayHistory::new(range, values).expect("buffered delays lie in the channel range")
    }

    /// Actuator-channel history for a step that sends a packet with delay
    /// `fresh` (only consulted when the channel minimum is 0).
    pub fn ca_history(&self, range: ChannelRange, fresh: u32) -> DelayHistory {
        let values = range
            .values()
            .map(|m| if m == 0 { fresh } else { self.ca_delays[m as usize - 1] })
            .collect();
        DelayHistory::new(range, values).expect("buffered delays lie in the channel range")
    }

    /// Buffer slot (0-based) of the measurement the controller currently uses.
    pub fn controller_slot(&self, bounds: &DelayBounds) -> usize {
        let age = selected_age(&self.sc_history(bounds.sc()));
        age.max(1) as usize - 1
    }

    /// Input held by the ZOH when `input` is sent with actuator delay `fresh`.
    pub fn held_input(&self, bounds: &DelayBounds, input: InputId, fresh: u32) -> InputId {
        match selected_age(&self.ca_history(bounds.ca(), fresh)) {
            0 => input,
            age => self.inputs[age as usize - 1],
        }
    }
}

impl NcsTuple for NcsState {
    fn check_bounds(bounds: &DelayBounds) -> Result<(), NcsError> {
        if bounds.sc().hi() == 0 {
            return Err(NcsError::EmptyMeasurementBuffer);
        }
        Ok(())
    }

    fn metric(_plant: &System) -> Metric {
        Metric::PairwiseMax
    }

    fn initial_states(plant: &System, bounds: &DelayBounds) -> Vec<Self> {
        let (sc, ca) = (bounds.sc(), bounds.ca());
        let mut out = Vec::new();
        for &x0 in plant.initial() {
            for u0 in plant.inputs() {
                let mut meas = vec![MeasSlot::Dummy; sc.hi() as usize];
                meas[0] = MeasSlot::State(x0);
                out.push(NcsState {
                    meas,
                    inputs: vec![u0; ca.hi() as usize],
                    sc_delays: vec![sc.hi(); sc.hi() as usize],
                    ca_delays: vec![ca.hi(); ca.hi() as usize],
                });
            }
        }
        out
    }

    fn all_states(plant: &System, bounds: &DelayBounds) -> Vec<Self> {
        let (sc, ca) = (bounds.sc(), bounds.ca());
        let slots: Vec<MeasSlot> = std::iter::once(MeasSlot::Dummy)
            .chain(plant.states().map(MeasSlot::State))
            .collect();
        let metas = index_product(slots.len(), sc.hi() as usize);
        let inputs = index_product(plant.num_inputs(), ca.hi() as usize);
        let scs = index_product(sc.width() as usize, sc.hi() as usize);
        let cas = index_product(ca.width() as usize, ca.hi() as usize);
        let mut out = Vec::new();
        for m in &metas {
            for i in &inputs {
                for s in &scs {
                    for c in &cas {
                        out.push(NcsState {
                            meas: m.iter().map(|&k| slots[k]).collect(),
                            inputs: i.iter().map(|&k| InputId(k)).collect(),
                            sc_delays: s.iter().map(|&k| sc.lo() + k as u32).collect(),
                            ca_delays: c.iter().map(|&k| ca.lo() + k as u32).collect(),
                        });
                    }
                }
            }
        }
        out
    }

    fn successors(&self, plant: &System, bounds: &DelayBounds, input: InputId) -> Vec<Self> {
        let MeasSlot::State(current) = self.meas[0] else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for sc_fresh in bounds.sc().values() {
            for ca_fresh in bounds.ca().values() {
                let held = self.held_input(bounds, input, ca_fresh);
                for &next in plant.successors(current, held) {
                    out.push(NcsState {
                        meas: shifted(MeasSlot::State(next), &self.meas),
                        inputs: shifted(input, &self.inputs),
                        sc_delays: shifted(sc_fresh, &self.sc_delays),
                        ca_delays: shifted(ca_fresh, &self.ca_delays),
                    });
                }
            }
        }
        out
    }

    fn output(&self, plant: &System, bounds: &DelayBounds) -> OutputLabel {
        let used = self.meas[self.controller_slot(bounds)];
        OutputLabel::pair(self.meas[0].output(plant), used.output(plant))
    }

    fn canonical(&self, plant: &System) -> String {
        format!(
            "({}|{}|{}|{})",
            join(self.meas.iter().map(|m| m.name(plant))),
            join(self.inputs.iter().map(|&u| plant.input_name(u))),
            join(&self.sc_delays),
            join(&self.ca_delays),
        )
    }

    fn delays(&self) -> Vec<u32> {
        self.sc_delays.iter().chain(&self.ca_delays).copied().collect()
    }

    fn input_buffer(&self) -> &[InputId] {
        &self.inputs
    }

    fn plant_slots(&self) -> Vec<MeasSlot> {
        self.meas.clone()
    }
}
