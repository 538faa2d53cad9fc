use rayon::prelude::*;

use crate::fts::{output_distance, StateId, System};

use super::check::{check_metrics, transfer_violation};
use super::{PairMatrix, Relation, RelationError, SimulationKind};

/// Greatest relation satisfying output closeness and the transfer
/// condition, plus whether it also covers the left initial states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargestSimulation {
    pub relation: Relation,
    pub covers_initial: bool,
    /// Number of refinement sweeps until the fixed point was reached.
    pub sweeps: usize,
}

/// Computes the largest ε-approximate (alternating) simulation relation from
/// `left` to `right` by refinement: start from all ε-close pairs and remove
/// pairs violating the transfer condition until nothing changes.
///
/// Each sweep evaluates every remaining pair against the previous sweep's
/// relation, in parallel.
pub fn largest_approx_simulation(
    left: &System,
    right: &System,
    epsilon: f64,
    kind: SimulationKind,
) -> Result<LargestSimulation, RelationError> {
    refine(left, right, epsilon, kind, false)
}

/// Largest relation `R` such that `R` is a simulation relation from `left`
/// to `right` and `R⁻¹` one from `right` to `left`, up to initial coverage,
/// which is reported for both directions in `covers_initial`.
pub fn largest_approx_bisimulation(
    left: &System,
    right: &System,
    epsilon: f64,
    kind: SimulationKind,
) -> Result<LargestSimulation, RelationError> {
    refine(left, right, epsilon, kind, true)
}

fn refine(
    left: &System,
    right: &System,
    epsilon: f64,
    kind: SimulationKind,
    both_ways: bool,
) -> Result<LargestSimulation, RelationError> {
    check_metrics(left, right)?;
    let (n, m) = (left.num_states(), right.num_states());
    let mut matrix = PairMatrix::new(n, m);
    let mut alive = Vec::new();
    for a in left.states() {
        for b in right.states() {
            if output_distance(left.metric(), left.output(a), right.output(b))?.within(epsilon) {
                matrix.set(a, b, true);
                alive.push((a, b));
            }
        }
    }

    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let verdicts: Vec<bool> = alive
            .par_iter()
            .map(|&(a, b)| {
                transfer_violation(left, right, a, b, kind, |x, y| matrix.get(x, y)).is_none()
                    && (!both_ways
                        || transfer_violation(right, left, b, a, kind, |y, x| matrix.get(x, y)).is_none())
            })
            .collect();
        if verdicts.iter().all(|&ok| ok) {
            break;
        }
        let mut kept = Vec::with_capacity(alive.len());
        for (&(a, b), ok) in alive.iter().zip(verdicts) {
            if ok {
                kept.push((a, b));
            } else {
                matrix.set(a, b, false);
            }
        }
        alive = kept;
    }

    let relation: Relation = alive.iter().collect();
    let mut covers = covers_initial(left, right, &relation);
    if both_ways {
        covers &= covers_initial(right, left, &relation.inverse());
    }
    Ok(LargestSimulation {
        relation,
        covers_initial: covers,
        sweeps,
    })
}

pub(crate) fn covers_initial(left: &System, right: &System, rel: &Relation) -> bool {
    left.initial()
        .iter()
        .all(|&a| right.initial().iter().any(|&b: &StateId| rel.contains(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::{two_state_plant, InputId, Metric, OutputLabel, SystemBuilder};
    use crate::relations::{check_simulation, transfer_holds};

    #[test]
    fn deterministic_self_contains_diagonal() {
        let p = two_state_plant();
        for kind in [SimulationKind::Plain, SimulationKind::Alternating] {
            let l = largest_approx_simulation(&p, &p, 0.0, kind).unwrap();
            assert!(Relation::diagonal(2).is_subset(&l.relation));
            assert!(l.covers_initial);
            assert!(check_simulation(&p, &p, &l.relation, 0.0, kind).unwrap().holds());
        }
    }

    /// Brute force over all subsets of pairs for the union of every
    /// relation satisfying closeness and transfer.
    fn brute_force(left: &System, right: &System, kind: SimulationKind) -> Relation {
        let pairs: Vec<(StateId, StateId)> = left
            .states()
            .flat_map(|a| right.states().map(move |b| (a, b)))
            .collect();
        let mut union = Relation::new();
        for mask in 0u32..(1 << pairs.len()) {
            let r: Relation = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            if r.iter().all(|(a, b)| transfer_holds(left, right, &r, a, b, kind)) {
                for (a, b) in r.iter() {
                    union.insert(a, b);
                }
            }
        }
        union
    }

    #[test]
    fn large_epsilon_matches_brute_force() {
        let mut b = SystemBuilder::new(Metric::InfinityNorm);
        for i in 0..3 {
            b.add_state(format!("s{i}"), OutputLabel::Vector(vec![i as f64])).unwrap();
        }
        b.add_input("u").unwrap();
        b.add_input("v").unwrap();
        b.mark_initial(StateId(0));
        for (s, u, t) in [(0, 0, 1), (0, 0, 2), (1, 1, 2), (2, 0, 0), (2, 1, 1)] {
            b.add_transition(StateId(s), InputId(u), StateId(t));
        }
        let left = b.build().unwrap();
        let mut b = SystemBuilder::new(Metric::InfinityNorm);
        for i in 0..2 {
            b.add_state(format!("t{i}"), OutputLabel::Vector(vec![i as f64])).unwrap();
        }
        b.add_input("u").unwrap();
        b.add_input("v").unwrap();
        b.mark_initial(StateId(0));
        for (s, u, t) in [(0, 0, 1), (1, 1, 0)] {
            b.add_transition(StateId(s), InputId(u), StateId(t));
        }
        let right = b.build().unwrap();
        // 3 x 2 pairs keeps the brute force at 64 subsets
        for kind in [SimulationKind::Plain, SimulationKind::Alternating] {
            let l = largest_approx_simulation(&left, &right, 10.0, kind).unwrap();
            assert_eq!(l.relation, brute_force(&left, &right, kind), "{kind:?}");
        }
    }

    #[test]
    fn no_close_pairs_gives_empty_relation() {
        let p = two_state_plant();
        let mut b = SystemBuilder::new(Metric::Discrete);
        let s = b.add_state("s", OutputLabel::atom("V")).unwrap();
        b.mark_initial(s);
        let q = b.build().unwrap();
        let l = largest_approx_simulation(&p, &q, 0.0, SimulationKind::Plain).unwrap();
        assert!(l.relation.is_empty());
        assert!(!l.covers_initial);
    }
}
