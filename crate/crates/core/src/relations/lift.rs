use std::collections::HashMap;

use crate::fts::StateId;
use crate::ncs::{MeasSlot, NcsModel, NcsTuple};

use super::{Relation, RelationError};

/// Lifts a relation between two plant abstractions to the network models
/// built on top of them.
///
/// A pair of network states is related when their delay buffers are equal,
/// their buffered inputs carry the same names, and their buffered plant
/// states are pairwise related by `plant_rel` (the dummy symbol matches only
/// itself).
pub fn lift_relation<S: NcsTuple>(
    plant_rel: &Relation,
    left: &NcsModel<S>,
    right: &NcsModel<S>,
) -> Result<Relation, RelationError> {
    if left.bounds() != right.bounds() {
        return Err(RelationError::BoundsMismatch(format!(
            "{} vs {}",
            left.bounds(),
            right.bounds()
        )));
    }
    plant_rel.check_range(left.plant(), right.plant())?;

    let key = |t: &S, plant: &crate::fts::System| -> (Vec<u32>, Vec<String>) {
        let names = t
            .input_buffer()
            .iter()
            .map(|&u| plant.input_name(u).to_string())
            .collect();
        (t.delays(), names)
    };
    let mut groups: HashMap<(Vec<u32>, Vec<String>), Vec<StateId>> = HashMap::new();
    for (i, t) in right.tuples().iter().enumerate() {
        groups.entry(key(t, right.plant())).or_default().push(StateId(i));
    }

    let slots_related = |l: &[MeasSlot], r: &[MeasSlot]| {
        l.len() == r.len()
            && l.iter().zip(r).all(|pair| match pair {
                (MeasSlot::Dummy, MeasSlot::Dummy) => true,
                (MeasSlot::State(a), MeasSlot::State(b)) => plant_rel.contains(*a, *b),
                _ => false,
            })
    };

    let mut out = Relation::new();
    for (i, t) in left.tuples().iter().enumerate() {
        let Some(candidates) = groups.get(&key(t, left.plant())) else {
            continue;
        };
        let slots = t.plant_slots();
        for &j in candidates {
            if slots_related(&slots, &right.tuple(j).plant_slots()) {
                out.insert(StateId(i), j);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::two_state_plant;
    use crate::ncs::{build_ncs_dynamic, build_ncs_static};
    use crate::packet::DelayBounds;
    use crate::relations::{check_bisimulation, check_simulation, SimulationKind};

    #[test]
    fn diagonal_lifts_to_diagonal() {
        let p = two_state_plant();
        let b = DelayBounds::new(1, 2, 0, 1).unwrap();
        let m = build_ncs_dynamic(&p, b).unwrap();
        let r = lift_relation(&Relation::diagonal(2), &m, &m).unwrap();
        assert_eq!(r, Relation::diagonal(m.system().num_states()));
    }

    #[test]
    fn lifted_diagonal_passes_both_directions() {
        let p = two_state_plant();
        let b = DelayBounds::new(0, 0, 1, 2).unwrap();
        let m = build_ncs_static(&p, b).unwrap();
        let r = lift_relation(&Relation::diagonal(2), &m, &m).unwrap();
        let s = m.system();
        assert!(check_simulation(s, s, &r, 0.0, SimulationKind::Alternating).unwrap().holds());
        assert!(check_simulation(s, s, &r.inverse(), 0.0, SimulationKind::Plain).unwrap().holds());
        assert!(check_bisimulation(s, s, &r, 0.0, SimulationKind::Alternating).unwrap().holds());
    }

    #[test]
    fn empty_plant_relation_lifts_to_empty() {
        let p = two_state_plant();
        let b = DelayBounds::new(1, 1, 1, 1).unwrap();
        let m = build_ncs_dynamic(&p, b).unwrap();
        let r = lift_relation(&Relation::new(), &m, &m).unwrap();
        assert!(r.is_empty());
        let s = m.system();
        assert!(!check_simulation(s, s, &r, 0.0, SimulationKind::Plain).unwrap().holds());
    }

    #[test]
    fn bounds_mismatch_is_an_error() {
        let p = two_state_plant();
        let m1 = build_ncs_dynamic(&p, DelayBounds::new(1, 1, 1, 1).unwrap()).unwrap();
        let m2 = build_ncs_dynamic(&p, DelayBounds::new(1, 1, 1, 2).unwrap()).unwrap();
        assert!(matches!(
            lift_relation(&Relation::diagonal(2), &m1, &m2),
            Err(RelationError::BoundsMismatch(_))
        ));
    }
}
