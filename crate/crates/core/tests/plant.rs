use std::path::PathBuf;

use ncs_abstract::plant::{build_grid_abstraction, grid_cardinality, input_grid_cardinality, integrate, PlantSpec};
use proptest::prelude::*;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

#[test]
fn shipped_decay_spec_builds() {
    let spec = PlantSpec::load(data("decay_spec.json")).unwrap();
    let g = build_grid_abstraction(&spec).unwrap();
    assert_eq!(g.system.num_states() as u64, grid_cardinality(&[2.0], 0.25));
    assert_eq!(g.system.num_inputs() as u64, input_grid_cardinality(&[1.0], 0.5));
    assert_eq!(g.system.num_states(), 8);
    assert_eq!(g.system.num_inputs(), 3);
    assert!(g.system.is_deterministic());
}

#[test]
fn spec_json_round_trip() {
    let spec = PlantSpec::load(data("decay_spec.json")).unwrap();
    let back = PlantSpec::from_json(&spec.to_json()).unwrap();
    let a = build_grid_abstraction(&spec).unwrap();
    let b = build_grid_abstraction(&back).unwrap();
    assert!(a.system.same_as(&b.system));
    assert!(PlantSpec::from_json(r#"{"A": [[-1]], "B": [[1]], "domain": [[0, 1]]}"#).is_err());
}

proptest! {
    #[test]
    fn scalar_flow_matches_closed_form(a in -2.0f64..2.0, b in -2.0f64..2.0, x in -3.0f64..3.0, u in -1.0f64..1.0, t in 0.01f64..2.0) {
        prop_assume!(a.abs() > 1e-3);
        let spec = PlantSpec::linear(vec![vec![a]], vec![vec![b]], vec![(-5.0, 5.0)], vec![(-1.0, 1.0)], t, 0.5, 0.5).unwrap();
        let got = integrate(&spec, &[x], &[u], t).unwrap()[0];
        let want = (a * t).exp() * x + ((a * t).exp() - 1.0) / a * b * u;
        prop_assert!((got - want).abs() <= 1e-8 * (1.0 + want.abs()), "{} vs {}", got, want);
    }

    #[test]
    fn nearest_point_is_within_half_a_cell(x in -1.0f64..0.875, y in -1.0f64..0.875) {
        // eight points per axis, the last at 0.75
        let spec = PlantSpec::linear(
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![0.0], vec![0.0]],
            vec![(-1.0, 1.0); 2],
            vec![(0.0, 1.0)],
            0.1,
            0.25,
            1.0,
        )
        .unwrap();
        let g = build_grid_abstraction(&spec).unwrap();
        let s = g.nearest(&spec, &[x, y]).unwrap();
        let p = &g.points[s.0];
        prop_assert!((p[0] - x).abs() <= 0.125 + 1e-12 && (p[1] - y).abs() <= 0.125 + 1e-12);
    }
}
