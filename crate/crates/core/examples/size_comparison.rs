// Size bounds for a 400-state plant abstraction with two inputs, compared
// with a construction that stores delayed state sequences.

use std::error::Error;

use ncs_abstract::sizing::{size_table, SizeInputs, SizeRow};
use ncs_abstract::DelayBounds;

pub fn run_example() -> Result<Vec<SizeRow>, Box<dyn Error>> {
    let si = SizeInputs::new(400, 2, DelayBounds::new(1, 2, 2, 3)?, 1)?;
    let rows = size_table(&si);
    for r in &rows {
        println!("{:<18} {:>16}  {}", r.name, r.exact, r.scientific);
    }
    Ok(rows)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example().map(|_| ())
}
