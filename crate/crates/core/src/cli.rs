//! The `ncs-abstract` command line: `build`, `check`, `estimate`,
//! `simulate` and `export`.
//!
//! Every command prints a plain-text report, or the same report as one JSON
//! object with `--json`. The exit code is 0 only when the command succeeded
//! and every check it ran passed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::fts::json::{load_system, save_system, JsonError};
use crate::fts::{FtsError, InputId, OutputLabel, StateId, System};
use crate::ncs::{
    simulate_trace_with, to_dot, trace_contained, BuildMode, NcsError, NcsModel, NcsState,
    NcsTuple, StaticNcsState, Trace,
};
use crate::packet::{DelayBounds, PacketError};
use crate::plant::{build_grid_abstraction, grid_cardinality, input_grid_cardinality, PlantError, PlantSpec};
use crate::relations::{
    check_bisimulation, check_simulation, largest_approx_bisimulation, largest_approx_simulation,
    lift_relation, BisimVerdict, Relation, RelationError, SimulationKind, Verdict,
};
use crate::sizing::{size_table, SizeInputs, SizingError};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NCS_ABSTRACT_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error(transparent)]
    Ncs(#[from] NcsError),
    #[error(transparent)]
    Relation(#[from] RelationError),
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Sizing(#[from] SizingError),
    #[error(transparent)]
    Packet(#[from] PacketError),
    #[error(transparent)]
    System(#[from] FtsError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write report: {0}")]
    Report(#[from] std::io::Error),
}

#[derive(Debug, Parser)]
#[command(name = "ncs-abstract", version, about = "Symbolic models of networked control systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the network model of a plant and print its size.
    Build(BuildArgs),
    /// Check a relation, compute a largest relation, or check the lifted
    /// plant relation between network models.
    Check(CheckArgs),
    /// Print the closed-form size bounds.
    Estimate(EstimateArgs),
    /// Simulate the network loop and test trace containment.
    Simulate(SimulateArgs),
    /// Write a Graphviz rendering of a model.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Plant abstraction (system JSON) or plant spec (JSON with "domain").
    #[arg(long)]
    pub plant: Option<PathBuf>,
    /// Memoryless controller: one combined delay channel.
    #[arg(long = "static", conflicts_with = "dynamic")]
    pub static_model: bool,
    /// Controller with memory (the default).
    #[arg(long)]
    pub dynamic: bool,
    /// Sensor-to-controller delay bounds.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [1, 1])]
    pub nsc: Vec<u32>,
    /// Controller-to-actuator delay bounds.
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [1, 1])]
    pub nca: Vec<u32>,
    /// Materialize the whole product space before pruning.
    #[arg(long)]
    pub full: bool,
}

impl ModelArgs {
    fn bounds(&self) -> Result<DelayBounds, CliError> {
        Ok(DelayBounds::new(self.nsc[0], self.nsc[1], self.nca[0], self.nca[1])?)
    }

    fn kind(&self) -> &'static str {
        if self.static_model {
            "static"
        } else {
            "dynamic"
        }
    }

    fn plant_path(&self) -> Result<&Path, CliError> {
        self.plant
            .as_deref()
            .ok_or_else(|| CliError::Usage("--plant is required".into()))
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Write the pruned model as system JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Second plant standing in for the concrete system; the plant relation
    /// is the largest alternating bisimulation between the two plants.
    #[arg(long, requires = "plant")]
    pub concrete: Option<PathBuf>,
    /// Left system (system JSON).
    #[arg(long, requires = "right", conflicts_with = "plant")]
    pub left: Option<PathBuf>,
    /// Right system (system JSON).
    #[arg(long, requires = "left")]
    pub right: Option<PathBuf>,
    /// Relation to check, as JSON pairs of state names; without it the
    /// largest relation is computed.
    #[arg(long, requires = "left")]
    pub relation: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long)]
    pub alternating: bool,
    /// Check the relation and its inverse.
    #[arg(long)]
    pub bisim: bool,
    /// Write the computed relation.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Take state, input and branching counts from this plant.
    #[arg(long, conflicts_with_all = ["d_card", "u_card"])]
    pub plant: Option<PathBuf>,
    #[arg(long)]
    pub d_card: Option<u64>,
    #[arg(long)]
    pub u_card: Option<u64>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [1, 1])]
    pub nsc: Vec<u32>,
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"], default_values_t = [1, 1])]
    pub nca: Vec<u32>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Scripted run: JSON with "inputs", "sc_delays", "ca_delays", "init",
    /// "init_input".
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    /// Print the packet timeline of every run.
    #[arg(long)]
    pub timeline: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Export a saved system instead of building one.
    #[arg(long, conflicts_with = "plant")]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

/// Caps the global worker pool at `NCS_ABSTRACT_THREADS` when set.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        // a pool set up earlier in the process wins
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

/// Runs one command; `Ok(false)` means a requested check failed.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<bool, CliError> {
    match command {
        Command::Build(a) => cmd_build(a, out),
        Command::Check(a) => cmd_check(a, out),
        Command::Estimate(a) => cmd_estimate(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Export(a) => cmd_export(a, out),
    }
}

/// Loads a plant abstraction, building a grid abstraction when the file is a
/// plant spec.
pub fn load_plant(path: &Path) -> Result<System, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    if is_plant_spec(&text) {
        Ok(build_grid_abstraction(&PlantSpec::from_json(&text)?)?.system)
    } else {
        Ok(crate::fts::json::system_from_str(&text)?)
    }
}

fn is_plant_spec(text: &str) -> bool {
    serde_json::from_str::<Value>(text)
        .ok()
        .and_then(|v| v.as_object().map(|o| o.contains_key("domain")))
        .unwrap_or(false)
}

fn build_model<S: NcsTuple>(plant: &System, m: &ModelArgs) -> Result<(NcsModel<S>, Option<usize>), CliError> {
    let bounds = m.bounds()?;
    if m.full {
        let full: NcsModel<S> = NcsModel::build(plant, bounds, BuildMode::Full)?;
        let n = full.system().num_states();
        Ok((full.prune(), Some(n)))
    } else {
        Ok((NcsModel::build(plant, bounds, BuildMode::Reachable)?, None))
    }
}

fn emit(out: &mut dyn Write, json: bool, value: &Value, text: &str) -> Result<(), CliError> {
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(value).expect("reports serialize"))?;
    } else {
        write!(out, "{text}")?;
    }
    Ok(())
}

fn cmd_build(a: &BuildArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let plant = load_plant(a.model.plant_path()?)?;
    let (system, unpruned) = if a.model.static_model {
        let (m, n) = build_model::<StaticNcsState>(&plant, &a.model)?;
        (m.into_system(), n)
    } else {
        let (m, n) = build_model::<NcsState>(&plant, &a.model)?;
        (m.into_system(), n)
    };
    if let Some(path) = &a.out {
        save_system(&system, path)?;
    }
    let bounds = a.model.bounds()?;
    let mut text = format!(
        "model: {} ({})\nstates: {}\ntransitions: {}\ninitial: {}\n",
        a.model.kind(),
        bounds,
        system.num_states(),
        system.size(),
        system.initial().len()
    );
    if let Some(n) = unpruned {
        text.push_str(&format!("unpruned states: {n}\n"));
    }
    let value = json!({
        "model": a.model.kind(),
        "bounds": bounds.to_string(),
        "states": system.num_states(),
        "transitions": system.size(),
        "initial": system.initial().len(),
        "unpruned_states": unpruned,
        "out": a.out.as_ref().map(|p| p.display().to_string()),
    });
    emit(out, a.json, &value, &text)?;
    Ok(true)
}

fn kind_of(alternating: bool) -> SimulationKind {
    if alternating {
        SimulationKind::Alternating
    } else {
        SimulationKind::Plain
    }
}

fn verdict_json(v: &Verdict, left: &System, right: &System) -> Value {
    match v {
        Verdict::Holds => json!({"holds": true}),
        Verdict::Violated(c) => json!({"holds": false, "counterexample": c.to_json(left, right)}),
    }
}

fn bisim_json(v: &BisimVerdict, left: &System, right: &System) -> Value {
    match v {
        BisimVerdict::Holds => json!({"holds": true}),
        BisimVerdict::Violated {
            direction,
            counterexample,
        } => {
            let c = match direction {
                crate::relations::Direction::Forward => counterexample.to_json(left, right),
                crate::relations::Direction::Backward => counterexample.to_json(right, left),
            };
            json!({"holds": false, "direction": direction, "counterexample": c})
        }
    }
}

fn describe(value: &Value) -> String {
    if value["holds"].as_bool() == Some(true) {
        "holds".to_string()
    } else {
        let mut s = "violated".to_string();
        if let Some(d) = value.get("direction") {
            s.push_str(&format!(" ({} direction)", d.as_str().unwrap_or("?")));
        }
        if let Some(c) = value.get("counterexample") {
            s.push_str(&format!(": {c}"));
        }
        s
    }
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    if a.epsilon < 0.0 || a.epsilon.is_nan() {
        return Err(CliError::Usage("--epsilon must be nonnegative".into()));
    }
    if let (Some(l), Some(r)) = (&a.left, &a.right) {
        return check_systems(a, &load_plant(l)?, &load_plant(r)?, out);
    }
    let plant = load_plant(a.model.plant_path()?)?;
    let concrete = match &a.concrete {
        Some(p) => load_plant(p)?,
        None => plant.clone(),
    };
    if a.model.static_model {
        check_lifted::<StaticNcsState>(a, &plant, &concrete, out)
    } else {
        check_lifted::<NcsState>(a, &plant, &concrete, out)
    }
}

fn check_systems(a: &CheckArgs, left: &System, right: &System, out: &mut dyn Write) -> Result<bool, CliError> {
    let kind = kind_of(a.alternating);
    if let Some(path) = &a.relation {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let rel = Relation::from_json(&text, left, right)?;
        let value = if a.bisim {
            bisim_json(&check_bisimulation(left, right, &rel, a.epsilon, kind)?, left, right)
        } else {
            verdict_json(&check_simulation(left, right, &rel, a.epsilon, kind)?, left, right)
        };
        let holds = value["holds"].as_bool() == Some(true);
        let text = format!("{} at epsilon {}: {}\n", kind_name(kind, a.bisim), a.epsilon, describe(&value));
        emit(out, a.json, &value, &text)?;
        return Ok(holds);
    }
    let largest = if a.bisim {
        largest_approx_bisimulation(left, right, a.epsilon, kind)?
    } else {
        largest_approx_simulation(left, right, a.epsilon, kind)?
    };
    if let Some(path) = &a.out {
        std::fs::write(path, largest.relation.to_json(left, right)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    let value = json!({
        "pairs": largest.relation.len(),
        "covers_initial": largest.covers_initial,
        "sweeps": largest.sweeps,
    });
    let text = format!(
        "largest {} at epsilon {}: {} pairs, initial states covered: {}\n",
        kind_name(kind, a.bisim),
        a.epsilon,
        largest.relation.len(),
        largest.covers_initial
    );
    emit(out, a.json, &value, &text)?;
    Ok(largest.covers_initial)
}

fn kind_name(kind: SimulationKind, bisim: bool) -> &'static str {
    match (kind, bisim) {
        (SimulationKind::Plain, false) => "simulation",
        (SimulationKind::Plain, true) => "bisimulation",
        (SimulationKind::Alternating, false) => "alternating simulation",
        (SimulationKind::Alternating, true) => "alternating bisimulation",
    }
}

fn check_lifted<S: NcsTuple>(a: &CheckArgs, plant: &System, concrete: &System, out: &mut dyn Write) -> Result<bool, CliError> {
    let plant_rel = if a.concrete.is_some() {
        let l = largest_approx_bisimulation(plant, concrete, a.epsilon, SimulationKind::Alternating)?;
        l.relation
    } else {
        Relation::diagonal(plant.num_states())
    };
    let (abs, _) = build_model::<S>(plant, &a.model)?;
    let (con, _) = build_model::<S>(concrete, &a.model)?;
    let rel = lift_relation(&plant_rel, &abs, &con)?;
    let (sa, sc) = (abs.system(), con.system());

    let forward = check_simulation(sa, sc, &rel, a.epsilon, SimulationKind::Alternating)?;
    let backward = check_simulation(sc, sa, &rel.inverse(), a.epsilon, SimulationKind::Plain)?;
    let bisim = check_bisimulation(sa, sc, &rel, a.epsilon, SimulationKind::Alternating)?;
    let results = [
        ("alternating simulation, abstraction to concrete", verdict_json(&forward, sa, sc)),
        ("simulation, concrete to abstraction", verdict_json(&backward, sc, sa)),
        ("alternating bisimulation", bisim_json(&bisim, sa, sc)),
    ];
    let holds = results.iter().all(|(_, v)| v["holds"].as_bool() == Some(true));

    let mut text = format!(
        "model: {} ({})\nabstraction states: {}\nconcrete states: {}\nplant relation pairs: {}\nlifted relation pairs: {}\n",
        a.model.kind(),
        abs.bounds(),
        sa.num_states(),
        sc.num_states(),
        plant_rel.len(),
        rel.len()
    );
    for (name, v) in &results {
        text.push_str(&format!("{name} at epsilon {}: {}\n", a.epsilon, describe(v)));
    }
    let value = json!({
        "model": a.model.kind(),
        "epsilon": a.epsilon,
        "abstraction_states": sa.num_states(),
        "concrete_states": sc.num_states(),
        "lifted_pairs": rel.len(),
        "alternating_simulation": results[0].1,
        "reverse_simulation": results[1].1,
        "alternating_bisimulation": results[2].1,
        "holds": holds,
    });
    if let Some(path) = &a.out {
        std::fs::write(path, rel.to_json(sa, sc)).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    emit(out, a.json, &value, &text)?;
    Ok(holds)
}

fn cmd_estimate(a: &EstimateArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let bounds = DelayBounds::new(a.nsc[0], a.nsc[1], a.nca[0], a.nca[1])?;
    let (d, u, k) = match &a.plant {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            if is_plant_spec(&text) {
                let spec = PlantSpec::from_json(&text)?;
                let lengths = |axes: &[(f64, f64)]| axes.iter().map(|(lo, hi)| hi - lo).collect::<Vec<_>>();
                (
                    grid_cardinality(&lengths(&spec.domain), spec.eta),
                    input_grid_cardinality(&lengths(&spec.input_box), spec.mu),
                    1,
                )
            } else {
                let sys = crate::fts::json::system_from_str(&text)?;
                (sys.num_states() as u64, sys.num_inputs() as u64, sys.max_branching().max(1) as u64)
            }
        }
        None => {
            let need = |v: Option<u64>, name: &str| {
                v.ok_or_else(|| CliError::Usage(format!("--{name} is required without --plant")))
            };
            (need(a.d_card, "d-card")?, need(a.u_card, "u-card")?, 1)
        }
    };
    let si = SizeInputs::new(d, u, bounds, a.k.unwrap_or(k))?;
    let rows = size_table(&si);
    let ratio = |num: &str, den: &str| num.parse::<f64>().unwrap_or(f64::NAN) / den.parse::<f64>().unwrap_or(f64::NAN);
    let prior_over_dynamic = ratio(&rows[0].exact, &rows[1].exact);
    let prior_over_static = ratio(&rows[0].exact, &rows[2].exact);

    let mut text = format!("d_card: {d}\nu_card: {u}\nK: {}\nbounds: {bounds}\n", si.k);
    let width = rows.iter().map(|r| r.exact.len()).max().unwrap_or(0);
    for r in &rows {
        text.push_str(&format!(
            "{:<18} {:>width$}  {:<11} {}\n",
            r.name, r.exact, r.scientific, r.formula
        ));
    }
    text.push_str(&format!(
        "prior/dynamic: {prior_over_dynamic:.2e}\nprior/static: {prior_over_static:.2e}\n"
    ));
    let value = json!({
        "d_card": d,
        "u_card": u,
        "k": si.k,
        "bounds": bounds.to_string(),
        "rows": rows,
        "prior_over_dynamic": prior_over_dynamic,
        "prior_over_static": prior_over_static,
    });
    emit(out, a.json, &value, &text)?;
    Ok(true)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Script {
    inputs: Vec<String>,
    sc_delays: Vec<u32>,
    ca_delays: Vec<u32>,
    init: String,
    init_input: String,
}

struct Run {
    inputs: Vec<InputId>,
    sc: Vec<u32>,
    ca: Vec<u32>,
    init: StateId,
    init_input: InputId,
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    if a.epsilon < 0.0 || a.epsilon.is_nan() {
        return Err(CliError::Usage("--epsilon must be nonnegative".into()));
    }
    let plant = load_plant(a.model.plant_path()?)?;
    let bounds = a.model.bounds()?;
    // a static model is the dynamic loop with the combined delay on the
    // actuator side, observed through the first output component
    let (model, sim_bounds) = if a.model.static_model {
        let (m, _) = build_model::<StaticNcsState>(&plant, &a.model)?;
        let c = bounds.combined();
        (m.into_system(), DelayBounds::new(1, 1, c.lo(), c.hi())?)
    } else {
        let (m, _) = build_model::<NcsState>(&plant, &a.model)?;
        (m.into_system(), bounds)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let runs: Vec<Run> = match &a.script {
        Some(path) => vec![scripted(path, &plant)?],
        None => (0..a.runs).map(|_| random_run(&mut rng, &plant, sim_bounds, a.steps)).collect(),
    };

    let mut text = format!("seed: {}\nmodel: {} ({bounds})\n", a.seed, a.model.kind());
    let mut reports = Vec::new();
    let mut all = true;
    for (i, r) in runs.iter().enumerate() {
        let trace = simulate_trace_with(&plant, sim_bounds, &r.sc, &r.ca, &r.inputs, r.init, r.init_input, |succ| {
            succ[0]
        })?;
        let observed: Vec<OutputLabel> = if a.model.static_model {
            trace
                .outputs
                .iter()
                .map(|y| y.as_pair().map_or(y.clone(), |(first, _)| first.clone()))
                .collect()
        } else {
            trace.outputs.clone()
        };
        let contained = trace_contained(&model, &observed, a.epsilon)?;
        all &= contained;
        text.push_str(&format!("run {i}: {} steps, contained: {contained}\n", r.inputs.len()));
        if a.timeline || a.script.is_some() {
            text.push_str(&timeline(&plant, &trace));
        }
        reports.push(json!({
            "run": i,
            "steps": r.inputs.len(),
            "contained": contained,
            "outputs": observed.iter().map(crate::fts::json::label_to_json).collect::<Vec<_>>(),
            "timeline": trace.steps.iter().map(|s| json!({
                "time": s.time,
                "plant_state": plant.state_name(s.plant_state),
                "sent": plant.input_name(s.sent),
                "applied": plant.input_name(s.applied),
                "applied_from": s.applied_from,
                "rejected": s.rejected,
                "measurement_from": s.measurement_from,
            })).collect::<Vec<_>>(),
        }));
    }
    text.push_str(&format!("all contained: {all}\n"));
    let value = json!({"seed": a.seed, "model": a.model.kind(), "runs": reports, "all_contained": all});
    emit(out, a.json, &value, &text)?;
    Ok(all)
}

fn scripted(path: &Path, plant: &System) -> Result<Run, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let s: Script = serde_json::from_str(&text).map_err(JsonError::from)?;
    let input = |name: &str| {
        plant
            .input_id(name)
            .ok_or_else(|| CliError::Usage(format!("unknown input {name:?} in script")))
    };
    Ok(Run {
        inputs: s.inputs.iter().map(|n| input(n)).collect::<Result<_, _>>()?,
        sc: s.sc_delays,
        ca: s.ca_delays,
        init: plant
            .state_id(&s.init)
            .ok_or_else(|| CliError::Usage(format!("unknown state {:?} in script", s.init)))?,
        init_input: input(&s.init_input)?,
    })
}

fn random_run(rng: &mut ChaCha8Rng, plant: &System, bounds: DelayBounds, steps: usize) -> Run {
    let initial: Vec<StateId> = plant.initial().iter().copied().collect();
    let pick_input = |rng: &mut ChaCha8Rng| InputId(rng.gen_range(0..plant.num_inputs()));
    let (sc, ca) = (bounds.sc(), bounds.ca());
    Run {
        init: initial[rng.gen_range(0..initial.len())],
        init_input: pick_input(rng),
        inputs: (0..steps).map(|_| pick_input(rng)).collect(),
        sc: (0..steps).map(|_| rng.gen_range(sc.lo()..=sc.hi())).collect(),
        ca: (0..steps).map(|_| rng.gen_range(ca.lo()..=ca.hi())).collect(),
    }
}

/// One line per sample: plant state, input sent, input applied (with its
/// send time), rejected packets and the measurement in use.
pub fn timeline(plant: &System, trace: &Trace) -> String {
    let mut s = String::new();
    for step in &trace.steps {
        let rejected = if step.rejected.is_empty() {
            "-".to_string()
        } else {
            step.rejected.iter().map(|p| format!("u@{p}")).collect::<Vec<_>>().join(",")
        };
        let meas = step.measurement_from.map_or("q".to_string(), |m| format!("x@{m}"));
        s.push_str(&format!(
            "  t={:<3} x={:<6} sent={:<4} applied={} (sent at {}) rejected={} measurement={}\n",
            step.time,
            plant.state_name(step.plant_state),
            plant.input_name(step.sent),
            plant.input_name(step.applied),
            step.applied_from,
            rejected,
            meas
        ));
    }
    s
}

fn cmd_export(a: &ExportArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    let system = match &a.system {
        Some(path) => load_system(path)?,
        None => {
            let plant = load_plant(a.model.plant_path()?)?;
            if a.model.static_model {
                build_model::<StaticNcsState>(&plant, &a.model)?.0.into_system()
            } else {
                build_model::<NcsState>(&plant, &a.model)?.0.into_system()
            }
        }
    };
    let dot = to_dot(&system);
    match &a.out {
        Some(path) => {
            std::fs::write(path, &dot).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let value = json!({
                "nodes": system.num_states(),
                "edges": system.size(),
                "out": path.display().to_string(),
            });
            let text = format!("nodes: {}\nedges: {}\n", system.num_states(), system.size());
            emit(out, a.json, &value, &text)?;
        }
        None => {
            let value = json!({"nodes": system.num_states(), "edges": system.size(), "dot": dot});
            emit(out, a.json, &value, &dot)?;
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ncs-abstract").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn estimate_large_example() {
        let (code, out, _) = run_args(&["estimate", "--d-card", "400", "--u-card", "2", "--nsc", "1", "2", "--nca", "2", "3"]);
        assert_eq!(code, 0);
        assert!(out.contains("6.1594e13"));
        assert!(out.contains("3.2932e8"));
        assert!(out.contains("1.8662e7"));
    }

    #[test]
    fn estimate_needs_cardinalities() {
        let (code, _, err) = run_args(&["estimate"]);
        assert_eq!(code, 2);
        assert!(err.contains("--d-card"));
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let (code, _, err) = run_args(&["frobnicate"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn plant_spec_detection() {
        assert!(is_plant_spec(r#"{"domain": [[0, 1]]}"#));
        assert!(!is_plant_spec(r#"{"states": []}"#));
        assert!(!is_plant_spec("not json"));
    }
}
