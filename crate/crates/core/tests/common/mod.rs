#![allow(dead_code)]

use ncs_abstract::fts::{InputId, Metric, OutputLabel, StateId, System, SystemBuilder};
use ncs_abstract::DelayBounds;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random plant with discrete outputs drawn from `alphabet` labels. Every
/// (state, input) gets 0 to `max_succ` successors; at least one state is
/// initial.
pub fn random_plant(rng: &mut impl Rng, states: usize, inputs: usize, alphabet: usize, max_succ: usize) -> System {
    let mut b = SystemBuilder::new(Metric::Discrete);
    for i in 0..states {
        let y = format!("Y{}", rng.gen_range(0..alphabet));
        b.add_state(format!("s{i}"), OutputLabel::atom(y)).unwrap();
    }
    for u in 0..inputs {
        b.add_input(format!("u{u}")).unwrap();
    }
    let mut any_initial = false;
    for i in 0..states {
        if rng.gen_bool(0.5) {
            b.mark_initial(StateId(i));
            any_initial = true;
        }
    }
    if !any_initial {
        b.mark_initial(StateId(rng.gen_range(0..states)));
    }
    add_random_edges(&mut b, rng, states, inputs, max_succ);
    b.build().unwrap()
}

/// Random system with one-dimensional vector outputs on a half-unit grid,
/// infinity-norm metric.
pub fn random_metric_system(rng: &mut impl Rng, states: usize, inputs: usize, max_succ: usize) -> System {
    let mut b = SystemBuilder::new(Metric::InfinityNorm);
    for i in 0..states {
        let y = rng.gen_range(0..8) as f64 * 0.5;
        b.add_state(format!("s{i}"), OutputLabel::Vector(vec![y])).unwrap();
    }
    for u in 0..inputs {
        b.add_input(format!("u{u}")).unwrap();
    }
    b.mark_initial(StateId(0));
    if states > 1 && rng.gen_bool(0.5) {
        b.mark_initial(StateId(rng.gen_range(1..states)));
    }
    add_random_edges(&mut b, rng, states, inputs, max_succ);
    b.build().unwrap()
}

fn add_random_edges(b: &mut SystemBuilder, rng: &mut impl Rng, states: usize, inputs: usize, max_succ: usize) {
    for s in 0..states {
        for u in 0..inputs {
            let k = rng.gen_range(0..=max_succ);
            for _ in 0..k {
                b.add_transition(StateId(s), InputId(u), StateId(rng.gen_range(0..states)));
            }
        }
    }
}

/// Random bounds with `nsc_max >= 1` and `nsc_max + nca_max <= n_max`.
pub fn random_bounds(rng: &mut impl Rng, n_max: u32) -> DelayBounds {
    assert!(n_max >= 1);
    let sc_hi = rng.gen_range(1..=n_max);
    let ca_hi = rng.gen_range(0..=(n_max - sc_hi));
    let sc_lo = rng.gen_range(0..=sc_hi);
    let ca_lo = rng.gen_range(0..=ca_hi);
    DelayBounds::new(sc_lo, sc_hi, ca_lo, ca_hi).unwrap()
}

/// A plant and a refinement of it in which every state is split into one or
/// more copies with the same output. Returns `(original, split, copy_of)`
/// where `copy_of[c]` is the original state of copy `c`.
///
/// Copies of `x` under `u` move to copies of `Post_u(x)` such that every
/// successor of `x` is represented, so the projection is an alternating
/// bisimulation with matching inputs.
pub fn split_plant(rng: &mut impl Rng, states: usize, inputs: usize, total: usize) -> (System, System, Vec<StateId>) {
    let plant = random_plant(rng, states, inputs, 2, 2);
    let mut copy_of: Vec<StateId> = plant.states().collect();
    while copy_of.len() < total {
        copy_of.push(StateId(rng.gen_range(0..states)));
    }
    let copies = |x: StateId| -> Vec<usize> { (0..copy_of.len()).filter(|&c| copy_of[c] == x).collect() };

    let mut b = SystemBuilder::new(Metric::Discrete);
    for (c, &x) in copy_of.iter().enumerate() {
        b.add_state(format!("c{c}"), plant.output(x).clone()).unwrap();
        if plant.is_initial(x) {
            b.mark_initial(StateId(c));
        }
    }
    for u in plant.inputs() {
        b.add_input(plant.input_name(u)).unwrap();
    }
    for (c, &x) in copy_of.iter().enumerate() {
        for u in plant.inputs() {
            for &y in plant.successors(x, u) {
                let ys = copies(y);
                // a nonempty subset of the copies of y
                let keep = rng.gen_range(1..=ys.len());
                let mut chosen = ys.clone();
                chosen.shuffle(rng);
                for &t in &chosen[..keep] {
                    b.add_transition(StateId(c), u, StateId(t));
                }
            }
        }
    }
    let split = b.build().unwrap();
    (plant, split, copy_of)
}

/// Random deterministic system with vector outputs.
pub fn random_deterministic(rng: &mut impl Rng, states: usize, inputs: usize) -> System {
    let mut b = SystemBuilder::new(Metric::InfinityNorm);
    for i in 0..states {
        let y = rng.gen_range(0..6) as f64 * 0.5;
        b.add_state(format!("s{i}"), OutputLabel::Vector(vec![y])).unwrap();
    }
    for u in 0..inputs {
        b.add_input(format!("u{u}")).unwrap();
    }
    b.mark_initial(StateId(0));
    for s in 0..states {
        for u in 0..inputs {
            if rng.gen_bool(0.8) {
                b.add_transition(StateId(s), InputId(u), StateId(rng.gen_range(0..states)));
            }
        }
    }
    b.build().unwrap()
}
