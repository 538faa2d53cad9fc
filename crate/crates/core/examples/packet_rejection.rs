// Out-of-order delivery on the actuator channel: an older packet that
// lands after a newer one is discarded.

use std::error::Error;

use ncs_abstract::cli::timeline;
use ncs_abstract::fts::two_state_plant;
use ncs_abstract::ncs::{build_ncs_dynamic, simulate_trace, trace_contained, TraceStep};
use ncs_abstract::packet::{f_hat, ChannelRange, DelayHistory};
use ncs_abstract::DelayBounds;

pub fn run_example() -> Result<Vec<TraceStep>, Box<dyn Error>> {
    // delays of the packets sent 1, 2 and 3 samples ago
    let range = ChannelRange::new(1, 3)?;
    let history = DelayHistory::new(range, vec![1, 3, 3])?;
    println!("selected packet: sent {} samples ago", range.hi() - f_hat(&history));

    let plant = two_state_plant();
    let bounds = DelayBounds::new(1, 1, 1, 3)?;
    let a = plant.input_id("a").ok_or("no input a")?;
    let b = plant.input_id("b").ok_or("no input b")?;
    let x = plant.state_id("x").ok_or("no state x")?;
    let inputs = [a, b, a, a, b, b];
    let ca_delays = [3, 1, 3, 3, 1, 2];
    let trace = simulate_trace(&plant, bounds, &[1; 6], &ca_delays, &inputs, x, a)?;
    print!("{}", timeline(&plant, &trace));

    let model = build_ncs_dynamic(&plant, bounds)?;
    println!("trace accepted by the model: {}", trace_contained(model.system(), &trace.outputs, 0.0)?);
    Ok(trace.steps)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
