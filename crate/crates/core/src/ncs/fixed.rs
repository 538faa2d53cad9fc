use crate::fts::{InputId, Metric, OutputLabel, StateId, System};
use crate::packet::{selected_age, DelayBounds, DelayHistory};

use super::{index_product, join, shifted, MeasSlot, NcsError, NcsTuple};

/// State of the static-controller model: the plant state, the last `N_max`
/// inputs and their (summed) delays, newest first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StaticNcsState {
    pub plant: StateId,
    pub inputs: Vec<InputId>,
    pub delays: Vec<u32>,
}

impl StaticNcsState {
    /// Flat tuple `(x,u1,...,uN,N1,...,NN)`.
    pub fn tuple_string(&self, plant: &System) -> String {
        let mut parts = vec![plant.state_name(self.plant).to_string()];
        parts.extend(self.inputs.iter().map(|&u| plant.input_name(u).to_string()));
        parts.extend(self.delays.iter().map(u32::to_string));
        format!("({})", parts.join(","))
    }

    /// Input held by the ZOH when `input` is sent with delay `fresh`.
    pub fn held_input(&self, bounds: &DelayBounds, input: InputId, fresh: u32) -> InputId {
        let range = bounds.combined();
        let values = range
            .values()
            .map(|m| if m == 0 { fresh } else { self.delays[m as usize - 1] })
            .collect();
        let history = DelayHistory::new(range, values).expect("buffered delays lie in range");
        match selected_age(&history) {
            0 => input,
            age => self.inputs[age as usize - 1],
        }
    }
}

impl NcsTuple for StaticNcsState {
    fn check_bounds(_bounds: &DelayBounds) -> Result<(), NcsError> {
        Ok(())
    }

    fn metric(plant: &System) -> Metric {
        plant.metric()
    }

    fn initial_states(plant: &System, bounds: &DelayBounds) -> Vec<Self> {
        let n = bounds.n_max();
        let mut out = Vec::new();
        for &x0 in plant.initial() {
            for u0 in plant.inputs() {
                out.push(StaticNcsState {
                    plant: x0,
                    inputs: vec![u0; n as usize],
                    delays: vec![n; n as usize],
                });
            }
        }
        out
    }

    fn all_states(plant: &System, bounds: &DelayBounds) -> Vec<Self> {
        let range = bounds.combined();
        let len = range.hi() as usize;
        let inputs = index_product(plant.num_inputs(), len);
        let delays = index_product(range.width() as usize, len);
        let mut out = Vec::new();
        for x in plant.states() {
            for i in &inputs {
                for d in &delays {
                    out.push(StaticNcsState {
                        plant: x,
                        inputs: i.iter().map(|&k| InputId(k)).collect(),
                        delays: d.iter().map(|&k| range.lo() + k as u32).collect(),
                    });
                }
            }
        }
        out
    }

    fn successors(&self, plant: &System, bounds: &DelayBounds, input: InputId) -> Vec<Self> {
        let mut out = Vec::new();
        for fresh in bounds.combined().values() {
            let held = self.held_input(bounds, input, fresh);
            for &next in plant.successors(self.plant, held) {
                out.push(StaticNcsState {
                    plant: next,
                    inputs: shifted(input, &self.inputs),
                    delays: shifted(fresh, &self.delays),
                });
            }
        }
        out
    }

    fn output(&self, plant: &System, _bounds: &DelayBounds) -> OutputLabel {
        plant.output(self.plant).clone()
    }

    fn canonical(&self, plant: &System) -> String {
        format!(
            "({}|{}|{})",
            plant.state_name(self.plant),
            join(self.inputs.iter().map(|&u| plant.input_name(u))),
            join(&self.delays),
        )
    }

    fn delays(&self) -> Vec<u32> {
        self.delays.clone()
    }

    fn input_buffer(&self) -> &[InputId] {
        &self.inputs
    }

    fn plant_slots(&self) -> Vec<MeasSlot> {
        vec![MeasSlot::State(self.plant)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::two_state_plant;
    use crate::ncs::{build_ncs_static, BuildMode, NcsModel, StaticModel};

    #[test]
    fn two_state_example_has_24_reachable_of_32() {
        let p = two_state_plant();
        let b = DelayBounds::new(0, 0, 1, 2).unwrap();
        let full: StaticModel = NcsModel::build(&p, b, BuildMode::Full).unwrap();
        assert_eq!(full.system().num_states(), 32);
        let m = build_ncs_static(&p, b).unwrap();
        assert_eq!(m.system().num_states(), 24);
        assert!(full.prune().system().same_as(m.system()));
    }

    #[test]
    fn tuple_strings() {
        let p = two_state_plant();
        let s = StaticNcsState {
            plant: StateId(0),
            inputs: vec![InputId(0), InputId(1)],
            delays: vec![1, 1],
        };
        assert_eq!(s.tuple_string(&p), "(x,a,b,1,1)");
        assert_eq!(s.canonical(&p), "(x|a,b|1,1)");
    }

    #[test]
    fn zero_delay_applies_input_immediately() {
        let p = two_state_plant();
        let b = DelayBounds::new(0, 0, 0, 0).unwrap();
        let m = build_ncs_static(&p, b).unwrap();
        // degenerate buffers: the model is the plant itself
        assert_eq!(m.system().num_states(), 2);
        assert!(m.system().is_deterministic());
        assert_eq!(m.system().size(), 4);
    }

    #[test]
    fn initial_count_is_initial_times_inputs() {
        let p = two_state_plant();
        let b = DelayBounds::new(1, 2, 0, 1).unwrap();
        let m = build_ncs_static(&p, b).unwrap();
        assert_eq!(m.system().initial().len(), 4);
    }
}
