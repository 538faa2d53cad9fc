// Static network model of the two-state plant with a combined delay in
// [1; 2]: 24 of the 32 tuples are reachable.

use std::error::Error;

use ncs_abstract::fts::two_state_plant;
use ncs_abstract::ncs::{build_ncs_static, to_dot, BuildMode, StaticModel};
use ncs_abstract::{DelayBounds, NcsModel};

pub fn run_example() -> Result<Vec<String>, Box<dyn Error>> {
    let plant = two_state_plant();
    let bounds = DelayBounds::new(0, 0, 1, 2)?;

    let full: StaticModel = NcsModel::build(&plant, bounds, BuildMode::Full)?;
    let reachable = build_ncs_static(&plant, bounds)?;
    println!(
        "{} of {} states reachable, {} transitions",
        reachable.system().num_states(),
        full.system().num_states(),
        reachable.system().size()
    );

    let unreachable: Vec<String> = full
        .tuples()
        .iter()
        .filter(|t| reachable.id_of(t).is_none())
        .map(|t| t.tuple_string(&plant))
        .collect();
    println!("unreachable: {}", unreachable.join(" "));

    let dot = to_dot(reachable.system());
    println!("graphviz: {} lines", dot.lines().count());
    Ok(unreachable)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
