use std::path::PathBuf;

use ncs_abstract::cli::run;
use ncs_abstract::fts::json::{load_system, save_system};
use ncs_abstract::fts::{Metric, OutputLabel, SystemBuilder};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("ncs-abstract").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn build_writes_a_loadable_model() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ncs.json");
    let plant = data("two_state_plant.json");
    let out_path = path.display().to_string();
    let (code, out, err) = cli(&["build", "--plant", &plant, "--static", "--nsc", "0", "0", "--nca", "1", "2", "--out", &out_path]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("states: 24"));
    let sys = load_system(&path).unwrap();
    assert_eq!(sys.num_states(), 24);

    let (code, out, _) = cli(&["export", "--system", &out_path, "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["nodes"], 24);
    assert!(v["dot"].as_str().unwrap().starts_with("digraph"));
}

#[test]
fn malformed_plant_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, r#"{"states": [], "initial": [], "inputs": [], "transitions": [], "outputs": {}, "metric": "discrete"}"#).unwrap();
    let (code, _, err) = cli(&["build", "--plant", &path.display().to_string()]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, _) = cli(&["build", "--plant", &dir.path().join("missing.json").display().to_string()]);
    assert_eq!(code, 2);
}

#[test]
fn check_exit_codes() {
    let plant = data("two_state_plant.json");
    let (code, out, err) = cli(&["check", "--plant", &plant, "--static", "--nsc", "0", "0", "--nca", "1", "2"]);
    assert_eq!(code, 0, "{out}{err}");

    // a right system sharing no state names leaves the initial states uncovered
    let dir = tempfile::tempdir().unwrap();
    let mut b = SystemBuilder::new(Metric::Discrete);
    let s = b.add_state("z", OutputLabel::atom("Z")).unwrap();
    b.add_input("a").unwrap();
    b.mark_initial(s);
    let other = dir.path().join("other.json");
    save_system(&b.build().unwrap(), &other).unwrap();
    let (code, out, _) = cli(&["check", "--left", &plant, "--right", &other.display().to_string(), "--json"]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn scripted_simulation_reports_rejections() {
    let plant = data("two_state_plant.json");
    let script = data("reorder_script.json");
    let (code, out, err) = cli(&["simulate", "--plant", &plant, "--nsc", "1", "1", "--nca", "1", "3", "--script", &script]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("contained: true"), "{out}");
}

#[test]
fn random_simulation_is_reproducible() {
    let plant = data("two_state_plant.json");
    let args = ["simulate", "--plant", &plant, "--nsc", "0", "1", "--nca", "1", "2", "--runs", "5", "--seed", "7", "--json"];
    let (c1, o1, _) = cli(&args);
    let (c2, o2, _) = cli(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
}
