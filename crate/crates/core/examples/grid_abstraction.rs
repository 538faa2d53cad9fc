// Grid abstractions of x' = -x + u at two resolutions, related by the
// largest alternating approximate bisimulation, then lifted to the network
// models built on each.

use std::error::Error;

use ncs_abstract::ncs::build_ncs_dynamic;
use ncs_abstract::plant::{build_grid_abstraction, integrate, PlantSpec};
use ncs_abstract::relations::{check_simulation, largest_approx_bisimulation, lift_relation};
use ncs_abstract::{DelayBounds, SimulationKind};

fn spec(eta: f64) -> Result<PlantSpec, Box<dyn Error>> {
    Ok(PlantSpec::linear(
        vec![vec![-1.0]],
        vec![vec![1.0]],
        vec![(-1.0, 1.0)],
        vec![(-0.5, 0.5)],
        std::f64::consts::LN_2,
        eta,
        0.5,
    )?)
}

pub fn run_example() -> Result<bool, Box<dyn Error>> {
    let (coarse, fine) = (spec(0.25)?, spec(0.125)?);
    let x = integrate(&coarse, &[1.0], &[0.0], coarse.tau)?;
    println!("flow of 1.0 over one period: {:.6}", x[0]);

    let gc = build_grid_abstraction(&coarse)?;
    let gf = build_grid_abstraction(&fine)?;
    println!(
        "coarse: {} states, fine: {} states, dropped transitions: {} / {}",
        gc.system.num_states(),
        gf.system.num_states(),
        gc.boundary_warnings,
        gf.boundary_warnings
    );

    let eps = 0.25;
    let plant_rel = largest_approx_bisimulation(&gc.system, &gf.system, eps, SimulationKind::Alternating)?;
    println!("plant relation: {} pairs, covers initial states: {}", plant_rel.relation.len(), plant_rel.covers_initial);

    let bounds = DelayBounds::new(1, 1, 0, 1)?;
    let (mc, mf) = (build_ncs_dynamic(&gc.system, bounds)?, build_ncs_dynamic(&gf.system, bounds)?);
    let rel = lift_relation(&plant_rel.relation, &mc, &mf)?;
    let holds = check_simulation(mc.system(), mf.system(), &rel, eps, SimulationKind::Alternating)?.holds();
    println!("network models: alternating {eps}-simulation holds: {holds}");
    Ok(holds)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
