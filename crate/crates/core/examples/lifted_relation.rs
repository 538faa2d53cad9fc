// Lifts the identity relation of a plant to its network model and checks
// the alternating simulation, the reverse simulation and the alternating
// bisimulation it induces.

use std::error::Error;

use ncs_abstract::fts::{InputId, Metric, OutputLabel, StateId, SystemBuilder};
use ncs_abstract::ncs::build_ncs_dynamic;
use ncs_abstract::relations::{check_bisimulation, check_simulation, lift_relation};
use ncs_abstract::{DelayBounds, Relation, SimulationKind};

pub fn run_example() -> Result<[bool; 3], Box<dyn Error>> {
    // nondeterministic three-state plant
    let mut b = SystemBuilder::new(Metric::Discrete);
    for (name, y) in [("lo", "L"), ("mid", "M"), ("hi", "H")] {
        let s = b.add_state(name, OutputLabel::atom(y))?;
        b.mark_initial(s);
    }
    b.add_input("down")?;
    b.add_input("up")?;
    for (s, u, t) in [(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 2), (1, 1, 1), (2, 0, 1), (2, 1, 2)] {
        b.add_transition(StateId(s), InputId(u), StateId(t));
    }
    let plant = b.build()?;

    let model = build_ncs_dynamic(&plant, DelayBounds::new(1, 2, 0, 1)?)?;
    let rel = lift_relation(&Relation::diagonal(plant.num_states()), &model, &model)?;
    let s = model.system();
    println!("{} states, {} lifted pairs", s.num_states(), rel.len());

    let results = [
        check_simulation(s, s, &rel, 0.0, SimulationKind::Alternating)?.holds(),
        check_simulation(s, s, &rel.inverse(), 0.0, SimulationKind::Plain)?.holds(),
        check_bisimulation(s, s, &rel, 0.0, SimulationKind::Alternating)?.holds(),
    ];
    println!("alternating simulation: {}", results[0]);
    println!("reverse simulation: {}", results[1]);
    println!("alternating bisimulation: {}", results[2]);
    Ok(results)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
