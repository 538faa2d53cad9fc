use rayon::prelude::*;

use crate::fts::{output_distance, InputId, StateId, System};

use super::{
    BisimVerdict, Condition, Counterexample, Direction, PairMatrix, Relation, RelationError,
    SimulationKind, Verdict,
};

pub(crate) fn check_metrics(left: &System, right: &System) -> Result<(), RelationError> {
    if left.metric() != right.metric() {
        return Err(RelationError::MetricMismatch {
            left: left.metric(),
            right: right.metric(),
        });
    }
    Ok(())
}

/// Left input for which the transfer condition fails at `(a, b)`, if any.
///
/// `related` is the relation the successors must land in.
pub fn transfer_violation(
    left: &System,
    right: &System,
    a: StateId,
    b: StateId,
    kind: SimulationKind,
    related: impl Fn(StateId, StateId) -> bool,
) -> Option<InputId> {
    match kind {
        SimulationKind::Plain => {
            let right_succ: Vec<StateId> = right
                .inputs()
                .flat_map(|u| right.successors(b, u).iter().copied())
                .collect();
            left.enabled(a).find(|&ua| {
                left.successors(a, ua)
                    .iter()
                    .any(|&a2| !right_succ.iter().any(|&b2| related(a2, b2)))
            })
        }
        SimulationKind::Alternating => left.enabled(a).find(|&ua| {
            let post_a = left.successors(a, ua);
            !right.enabled(b).any(|ub| {
                right
                    .successors(b, ub)
                    .iter()
                    .all(|&b2| post_a.iter().any(|&a2| related(a2, b2)))
            })
        }),
    }
}

/// Whether the transfer condition holds at `(a, b)` with respect to `rel`.
pub fn transfer_holds(
    left: &System,
    right: &System,
    rel: &Relation,
    a: StateId,
    b: StateId,
    kind: SimulationKind,
) -> bool {
    transfer_violation(left, right, a, b, kind, |x, y| rel.contains(x, y)).is_none()
}

/// Checks that `rel` is an ε-approximate (alternating) simulation relation
/// from `left` to `right`. Conditions are tested in order and the first
/// violation found is returned.
pub fn check_simulation(
    left: &System,
    right: &System,
    rel: &Relation,
    epsilon: f64,
    kind: SimulationKind,
) -> Result<Verdict, RelationError> {
    check_metrics(left, right)?;
    rel.check_range(left, right)?;

    for &a in left.initial() {
        if !right.initial().iter().any(|&b| rel.contains(a, b)) {
            return Ok(Verdict::Violated(Counterexample {
                condition: Condition::InitialCoverage,
                left: a,
                right: None,
                input: None,
            }));
        }
    }

    for (a, b) in rel.iter() {
        let d = output_distance(left.metric(), left.output(a), right.output(b))?;
        if !d.within(epsilon) {
            return Ok(Verdict::Violated(Counterexample {
                condition: Condition::OutputCloseness,
                left: a,
                right: Some(b),
                input: None,
            }));
        }
    }

    let matrix = PairMatrix::from_relation(rel, left.num_states(), right.num_states());
    let pairs: Vec<(StateId, StateId)> = rel.iter().collect();
    let failure = pairs.par_iter().find_map_first(|&(a, b)| {
        transfer_violation(left, right, a, b, kind, |x, y| matrix.get(x, y)).map(|u| (a, b, u))
    });
    Ok(match failure {
        Some((a, b, u)) => Verdict::Violated(Counterexample {
            condition: Condition::Transfer,
            left: a,
            right: Some(b),
            input: Some(u),
        }),
        None => Verdict::Holds,
    })
}

/// Checks `rel` from `left` to `right` and `rel⁻¹` from `right` to `left`.
pub fn check_bisimulation(
    left: &System,
    right: &System,
    rel: &Relation,
    epsilon: f64,
    kind: SimulationKind,
) -> Result<BisimVerdict, RelationError> {
    if let Verdict::Violated(c) = check_simulation(left, right, rel, epsilon, kind)? {
        return Ok(BisimVerdict::Violated {
            direction: Direction::Forward,
            counterexample: c,
        });
    }
    if let Verdict::Violated(c) = check_simulation(right, left, &rel.inverse(), epsilon, kind)? {
        return Ok(BisimVerdict::Violated {
            direction: Direction::Backward,
            counterexample: c,
        });
    }
    Ok(BisimVerdict::Holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::{two_state_plant, Metric, OutputLabel, SystemBuilder};

    fn chain(outputs: &[&str], edges: &[(usize, usize, usize)], inputs: usize) -> System {
        let mut b = SystemBuilder::new(Metric::Discrete);
        for (i, y) in outputs.iter().enumerate() {
            b.add_state(format!("s{i}"), OutputLabel::atom(*y)).unwrap();
        }
        for u in 0..inputs {
            b.add_input(format!("u{u}")).unwrap();
        }
        b.mark_initial(StateId(0));
        for &(s, u, t) in edges {
            b.add_transition(StateId(s), InputId(u), StateId(t));
        }
        b.build().unwrap()
    }

    #[test]
    fn identity_is_a_simulation_in_both_modes() {
        let p = two_state_plant();
        let id = Relation::diagonal(p.num_states());
        for kind in [SimulationKind::Plain, SimulationKind::Alternating] {
            assert!(check_simulation(&p, &p, &id, 0.0, kind).unwrap().holds());
            assert!(check_bisimulation(&p, &p, &id, 0.0, kind).unwrap().holds());
        }
    }

    #[test]
    fn infinite_output_distance_violates_closeness() {
        let p = two_state_plant();
        let mut r = Relation::diagonal(2);
        r.insert(StateId(0), StateId(1));
        let v = check_simulation(&p, &p, &r, 1e9, SimulationKind::Plain).unwrap();
        assert_eq!(
            v,
            Verdict::Violated(Counterexample {
                condition: Condition::OutputCloseness,
                left: StateId(0),
                right: Some(StateId(1)),
                input: None,
            })
        );
    }

    #[test]
    fn initial_coverage_comes_first() {
        let p = two_state_plant();
        let r: Relation = [(StateId(0), StateId(1))].iter().collect();
        let Verdict::Violated(c) = check_simulation(&p, &p, &r, 0.0, SimulationKind::Plain).unwrap() else {
            panic!("expected a violation");
        };
        assert_eq!(c.condition, Condition::InitialCoverage);
        assert_eq!(c.left, StateId(1));
    }

    #[test]
    fn deleted_transition_breaks_backward_direction() {
        // right lacks s0 -u1-> s2
        let left = chain(&["A", "B", "C"], &[(0, 0, 1), (0, 1, 2)], 2);
        let right = chain(&["A", "B", "C"], &[(0, 0, 1)], 2);
        let id = Relation::diagonal(3);
        let v = check_simulation(&right, &left, &id, 0.0, SimulationKind::Plain).unwrap();
        assert!(v.holds());
        match check_bisimulation(&right, &left, &id, 0.0, SimulationKind::Plain).unwrap() {
            BisimVerdict::Violated {
                direction,
                counterexample,
            } => {
                assert_eq!(direction, Direction::Backward);
                assert_eq!(counterexample.condition, Condition::Transfer);
                assert_eq!(counterexample.input, Some(InputId(1)));
            }
            BisimVerdict::Holds => panic!("expected a violation"),
        }
    }

    #[test]
    fn alternating_is_stricter_than_plain() {
        // left: one input leading to B or C; right: separate inputs for B and C
        let left = chain(&["A", "B", "C"], &[(0, 0, 1), (0, 0, 2)], 2);
        let right = chain(&["A", "B", "C"], &[(0, 0, 1), (0, 1, 2)], 2);
        let id = Relation::diagonal(3);
        assert!(check_simulation(&left, &right, &id, 0.0, SimulationKind::Plain).unwrap().holds());
        // any right input yields a successor the left input may also reach
        assert!(check_simulation(&left, &right, &id, 0.0, SimulationKind::Alternating).unwrap().holds());
        // the reverse: right must answer u0 (to B) and u1 (to C) with left's
        // only input, whose successors {B, C} are not all matched
        let v = check_simulation(&right, &left, &id, 0.0, SimulationKind::Alternating).unwrap();
        assert!(!v.holds());
        assert!(check_simulation(&right, &left, &id, 0.0, SimulationKind::Plain).unwrap().holds());
    }

    #[test]
    fn metric_mismatch_is_an_error() {
        let p = two_state_plant();
        let mut b = SystemBuilder::new(Metric::InfinityNorm);
        b.add_state("z", OutputLabel::Vector(vec![0.0])).unwrap();
        let q = b.build().unwrap();
        let r = Relation::new();
        assert!(matches!(
            check_simulation(&p, &q, &r, 0.0, SimulationKind::Plain),
            Err(RelationError::MetricMismatch { .. })
        ));
    }

    #[test]
    fn out_of_range_pair_is_an_error() {
        let p = two_state_plant();
        let r: Relation = [(StateId(0), StateId(7))].iter().collect();
        assert!(matches!(
            check_simulation(&p, &p, &r, 0.0, SimulationKind::Plain),
            Err(RelationError::PairOutOfRange(..))
        ));
    }
}
