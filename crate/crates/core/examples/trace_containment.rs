// Random delay realizations of the network loop, each checked against the
// finite model.

use std::error::Error;

use ncs_abstract::fts::{two_state_plant, InputId, StateId};
use ncs_abstract::ncs::{build_ncs_dynamic, simulate_trace, trace_contained};
use ncs_abstract::DelayBounds;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<usize, Box<dyn Error>> {
    let plant = two_state_plant();
    let bounds = DelayBounds::new(0, 2, 0, 2)?;
    let model = build_ncs_dynamic(&plant, bounds)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut accepted = 0;
    let runs = 50;
    for _ in 0..runs {
        let n = 12;
        let inputs: Vec<InputId> = (0..n).map(|_| InputId(rng.gen_range(0..2))).collect();
        let sc: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let ca: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let init = StateId(rng.gen_range(0..2));
        let trace = simulate_trace(&plant, bounds, &sc, &ca, &inputs, init, InputId(0))?;
        if trace_contained(model.system(), &trace.outputs, 0.0)? {
            accepted += 1;
        }
    }
    println!("model: {} states; accepted {accepted} of {runs} traces", model.system().num_states());
    Ok(accepted)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
