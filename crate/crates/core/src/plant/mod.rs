//! Plant abstractions: grid-based symbolic models of sampled continuous
//! plants, plus file I/O for abstractions produced elsewhere.
//!
//! Counting conventions: a domain axis of length `L` holds `floor(L/η)`
//! points `lo + iη`, while an input axis holds `floor(L/µ) + 1` points, both
//! endpoints included.

use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fts::{FtsError, InputId, Metric, OutputLabel, StateId, System, SystemBuilder};

mod builtin;
mod integrate;

pub use crate::fts::json::{load_system, save_system};
pub use builtin::{builtin_rhs, Rhs, RhsFn, BUILTIN_NAMES};
pub use integrate::integrate;

/// Guards `floor` against `L/η` landing just below an integer.
const FLOOR_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("invalid plant spec: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unknown builtin right-hand side {0:?}")]
    UnknownRhs(String),
    #[error("integration diverged: {0}")]
    Divergence(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed plant spec: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    System(#[from] FtsError),
}

#[derive(Clone, Debug)]
pub enum Dynamics {
    /// `x' = A x + B u`.
    Linear { a: DMatrix<f64>, b: DMatrix<f64> },
    Nonlinear(Rhs),
}

/// A sampled plant with its domain, input box and quantization parameters.
#[derive(Clone, Debug)]
pub struct PlantSpec {
    pub dynamics: Dynamics,
    pub domain: Vec<(f64, f64)>,
    pub input_box: Vec<(f64, f64)>,
    pub tau: f64,
    pub eta: f64,
    pub mu: f64,
    /// RK4 steps per sampling period, nonlinear dynamics only.
    pub rk4_steps: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<Vec<f64>>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    b: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rhs: Option<String>,
    domain: Vec<(f64, f64)>,
    input_box: Vec<(f64, f64)>,
    tau: f64,
    eta: f64,
    mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rk4_steps: Option<usize>,
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<DMatrix<f64>, PlantError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PlantError::Dimension(format!("{what} has ragged rows")));
    }
    Ok(DMatrix::from_row_iterator(rows.len(), cols, rows.iter().flatten().copied()))
}

impl PlantSpec {
    pub fn linear(
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        domain: Vec<(f64, f64)>,
        input_box: Vec<(f64, f64)>,
        tau: f64,
        eta: f64,
        mu: f64,
    ) -> Result<Self, PlantError> {
        let dynamics = Dynamics::Linear {
            a: matrix(&a, "A")?,
            b: matrix(&b, "B")?,
        };
        Self::with_dynamics(dynamics, domain, input_box, tau, eta, mu)
    }

    pub fn nonlinear(
        rhs: Rhs,
        domain: Vec<(f64, f64)>,
        input_box: Vec<(f64, f64)>,
        tau: f64,
        eta: f64,
        mu: f64,
    ) -> Result<Self, PlantError> {
        Self::with_dynamics(Dynamics::Nonlinear(rhs), domain, input_box, tau, eta, mu)
    }

    fn with_dynamics(
        dynamics: Dynamics,
        domain: Vec<(f64, f64)>,
        input_box: Vec<(f64, f64)>,
        tau: f64,
        eta: f64,
        mu: f64,
    ) -> Result<Self, PlantError> {
        let spec = PlantSpec {
            dynamics,
            domain,
            input_box,
            tau,
            eta,
            mu,
            rk4_steps: 100,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<(), PlantError> {
        for (name, v) in [("tau", self.tau), ("eta", self.eta), ("mu", self.mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PlantError::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.domain.is_empty() {
            return Err(PlantError::Invalid("domain has no axes".into()));
        }
        for (what, axes) in [("domain", &self.domain), ("input_box", &self.input_box)] {
            if let Some((lo, hi)) = axes.iter().find(|(lo, hi)| lo > hi || !lo.is_finite() || !hi.is_finite()) {
                return Err(PlantError::Invalid(format!("{what} axis [{lo}, {hi}] is empty")));
            }
        }
        let (n, m) = (self.state_dim(), self.input_dim());
        match &self.dynamics {
            Dynamics::Linear { a, b } => {
                if a.shape() != (n, n) {
                    return Err(PlantError::Dimension(format!("A is {:?}, expected ({n}, {n})", a.shape())));
                }
                if b.shape() != (n, m) && !(m == 0 && b.nrows() == n) {
                    return Err(PlantError::Dimension(format!("B is {:?}, expected ({n}, {m})", b.shape())));
                }
            }
            Dynamics::Nonlinear(rhs) => {
                if rhs.state_dim.is_some_and(|d| d != n) || rhs.input_dim.is_some_and(|d| d != m) {
                    return Err(PlantError::Dimension(format!(
                        "{} expects state {:?} and input {:?}, spec has {n} and {m}",
                        rhs.name, rhs.state_dim, rhs.input_dim
                    )));
                }
            }
        }
        if domain_points(self).is_empty() {
            return Err(PlantError::Invalid("domain is shorter than eta on some axis".into()));
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn input_dim(&self) -> usize {
        self.input_box.len()
    }

    pub fn from_json(text: &str) -> Result<Self, PlantError> {
        let doc: SpecDoc = serde_json::from_str(text)?;
        let mut spec = match (doc.a, doc.b, doc.rhs) {
            (Some(a), Some(b), None) => PlantSpec::linear(a, b, doc.domain, doc.input_box, doc.tau, doc.eta, doc.mu)?,
            (None, None, Some(name)) => {
                let rhs = builtin_rhs(&name).ok_or(PlantError::UnknownRhs(name))?;
                PlantSpec::nonlinear(rhs, doc.domain, doc.input_box, doc.tau, doc.eta, doc.mu)?
            }
            _ => {
                return Err(PlantError::Invalid(
                    "give either both \"A\" and \"B\" or a builtin \"rhs\"".into(),
                ))
            }
        };
        if let Some(steps) = doc.rk4_steps {
            spec.rk4_steps = steps.max(1);
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        let (a, b, rhs) = match &self.dynamics {
            Dynamics::Linear { a, b } => (Some(rows(a)), Some(rows(b)), None),
            Dynamics::Nonlinear(r) => (None, None, Some(r.name.clone())),
        };
        let doc = SpecDoc {
            a,
            b,
            rhs,
            domain: self.domain.clone(),
            input_box: self.input_box.clone(),
            tau: self.tau,
            eta: self.eta,
            mu: self.mu,
            rk4_steps: Some(self.rk4_steps),
        };
        serde_json::to_string_pretty(&doc).expect("spec serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PlantError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| PlantError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Number of grid points of a box with the given axis lengths at spacing
/// `eta`: the product of `floor(length/eta)`.
pub fn grid_cardinality(lengths: &[f64], eta: f64) -> u64 {
    lengths.iter().map(|&l| axis_count(l, eta) as u64).product()
}

/// Number of input grid points: the product of `floor(length/mu) + 1`.
pub fn input_grid_cardinality(lengths: &[f64], mu: f64) -> u64 {
    lengths.iter().map(|&l| axis_count(l, mu) as u64 + 1).product()
}

fn axis_count(length: f64, step: f64) -> usize {
    (length / step + FLOOR_SLACK).floor().max(0.0) as usize
}

fn axis_points(axes: &[(f64, f64)], step: f64, closed: bool) -> Vec<Vec<f64>> {
    axes.iter()
        .map(|&(lo, hi)| {
            let count = axis_count(hi - lo, step) + usize::from(closed);
            (0..count).map(|i| lo + i as f64 * step).collect()
        })
        .collect()
}

fn domain_points(spec: &PlantSpec) -> Vec<Vec<f64>> {
    let axes = axis_points(&spec.domain, spec.eta, false);
    if axes.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    cartesian(&axes)
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Result of [`build_grid_abstraction`].
#[derive(Clone, Debug)]
pub struct GridAbstraction {
    pub system: System,
    /// Grid coordinates of each state.
    pub points: Vec<Vec<f64>>,
    /// Input vector of each input.
    pub input_values: Vec<Vec<f64>>,
    /// Transitions dropped because the flow left the domain.
    pub boundary_warnings: usize,
}

impl GridAbstraction {
    /// Index of the grid point nearest to `x` (ties toward the smaller
    /// point), or `None` when `x` lies outside the domain.
    pub fn nearest(&self, spec: &PlantSpec, x: &[f64]) -> Option<StateId> {
        nearest_index(spec, x).map(StateId)
    }
}

fn nearest_index(spec: &PlantSpec, x: &[f64]) -> Option<usize> {
    let mut index = 0;
    for (&(lo, hi), &v) in spec.domain.iter().zip(x) {
        if !(lo..=hi).contains(&v) {
            return None;
        }
        let count = axis_count(hi - lo, spec.eta);
        // ceil(t - 0.5) sends exact midpoints down
        let i = ((v - lo) / spec.eta - 0.5).ceil().clamp(0.0, (count - 1) as f64) as usize;
        index = index * count + i;
    }
    Some(index)
}

/// Grid abstraction: states are the domain grid points, inputs the input
/// grid points, and `x -u-> x'` when `x'` is the grid point nearest to the
/// flow from `x` under `u` after one sampling period. Outputs are the grid
/// point coordinates under the infinity norm.
pub fn build_grid_abstraction(spec: &PlantSpec) -> Result<GridAbstraction, PlantError> {
    spec.validate()?;
    let points = domain_points(spec);
    let input_values = if spec.input_box.is_empty() {
        vec![Vec::new()]
    } else {
        cartesian(&axis_points(&spec.input_box, spec.mu, true))
    };
    let flow = match &spec.dynamics {
        Dynamics::Linear { a, b } => Some(integrate::lti_flow(a, b, spec.tau)),
        Dynamics::Nonlinear(_) => None,
    };

    let targets: Vec<Vec<Option<usize>>> = points
        .par_iter()
        .map(|x| {
            input_values
                .iter()
                .map(|u| {
                    let next = match &flow {
                        Some(f) => integrate::apply_flow(f, spec.state_dim(), x, u),
                        None => integrate(spec, x, u, spec.tau)?,
                    };
                    if next.iter().any(|v| !v.is_finite()) {
                        return Err(PlantError::Divergence(format!("{next:?}")));
                    }
                    Ok(nearest_index(spec, &next))
                })
                .collect::<Result<Vec<_>, PlantError>>()
        })
        .collect::<Result<_, _>>()?;

    let mut b = SystemBuilder::new(Metric::InfinityNorm);
    let counts: Vec<usize> = spec.domain.iter().map(|&(lo, hi)| axis_count(hi - lo, spec.eta)).collect();
    for (k, p) in points.iter().enumerate() {
        b.add_state(grid_name('g', k, &counts), OutputLabel::Vector(p.clone()))?;
        b.mark_initial(StateId(k));
    }
    for (j, _) in input_values.iter().enumerate() {
        b.add_input(format!("u{j}"))?;
    }
    let mut boundary_warnings = 0;
    for (s, row) in targets.iter().enumerate() {
        for (u, t) in row.iter().enumerate() {
            match t {
                Some(t) => b.add_transition(StateId(s), InputId(u), StateId(*t)),
                None => boundary_warnings += 1,
            }
        }
    }
    Ok(GridAbstraction {
        system: b.build()?,
        points,
        input_values,
        boundary_warnings,
    })
}

/// `g3_14`: the per-axis indices of a flat grid index.
fn grid_name(prefix: char, mut flat: usize, counts: &[usize]) -> String {
    let mut idx = vec![0; counts.len()];
    for (slot, &c) in idx.iter_mut().zip(counts).rev() {
        *slot = flat % c;
        flat /= c;
    }
    let parts: Vec<String> = idx.iter().map(usize::to_string).collect();
    format!("{prefix}{}", parts.join("_"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(eta: f64) -> PlantSpec {
        PlantSpec::linear(
            vec![vec![-1.0]],
            vec![vec![0.0]],
            vec![(-1.0, 1.0)],
            vec![(0.0, 1.0)],
            std::f64::consts::LN_2,
            eta,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn cardinalities() {
        assert_eq!(grid_cardinality(&[2.0, 2.0], 0.1), 400);
        assert_eq!(grid_cardinality(&[0.3], 0.3), 1);
        assert_eq!(input_grid_cardinality(&[1.0], 1.0), 2);
        assert_eq!(input_grid_cardinality(&[0.0], 1.0), 1);
    }

    #[test]
    fn frozen_dynamics_self_loop() {
        let spec = PlantSpec::linear(
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            vec![vec![0.0], vec![0.0]],
            vec![(0.0, 1.0), (0.0, 1.0)],
            vec![(0.0, 1.0)],
            0.5,
            0.25,
            0.5,
        )
        .unwrap();
        let g = build_grid_abstraction(&spec).unwrap();
        assert_eq!(g.system.num_states(), 16);
        assert_eq!(g.system.num_inputs(), 3);
        for (s, u, t) in g.system.transitions() {
            assert_eq!(s, t, "input {u}");
        }
        assert_eq!(g.system.size(), 48);
        assert_eq!(g.boundary_warnings, 0);
    }

    #[test]
    fn halving_map() {
        let spec = decay(0.05);
        let g = build_grid_abstraction(&spec).unwrap();
        assert!(g.system.is_deterministic());
        for s in g.system.states() {
            let x = g.points[s.0][0];
            let t = g.system.successors(s, InputId(0))[0];
            assert!((g.points[t.0][0] - x / 2.0).abs() <= spec.eta, "{x}");
        }
    }

    #[test]
    fn midpoint_ties_round_down() {
        let spec = decay(0.5);
        // grid -1, -0.5, 0, 0.5
        assert_eq!(nearest_index(&spec, &[-0.75]), Some(0));
        assert_eq!(nearest_index(&spec, &[0.25]), Some(2));
        assert_eq!(nearest_index(&spec, &[1.0]), Some(3));
        assert_eq!(nearest_index(&spec, &[1.01]), None);
    }

    #[test]
    fn leaving_the_domain_drops_transitions() {
        let spec = PlantSpec::linear(
            vec![vec![0.0]],
            vec![vec![1.0]],
            vec![(0.0, 1.0)],
            vec![(0.0, 1.0)],
            1.0,
            0.5,
            1.0,
        )
        .unwrap();
        // grid 0, 0.5; input 1 pushes 0 -> 1 (inside) and 0.5 -> 1.5 (outside)
        let g = build_grid_abstraction(&spec).unwrap();
        assert_eq!(g.boundary_warnings, 1);
        assert_eq!(g.system.size(), 3);
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = decay(0.1);
        let back = PlantSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back.to_json(), spec.to_json());
        let text = r#"{"rhs": "pendulum", "domain": [[-1, 1], [-1, 1]], "input_box": [[-1, 1]], "tau": 0.1, "eta": 0.5, "mu": 1}"#;
        let spec = PlantSpec::from_json(text).unwrap();
        assert_eq!(build_grid_abstraction(&spec).unwrap().system.num_states(), 16);
    }

    #[test]
    fn invalid_specs() {
        let bad = r#"{"rhs": "nope", "domain": [[0, 1]], "input_box": [], "tau": 1, "eta": 0.5, "mu": 1}"#;
        assert!(matches!(PlantSpec::from_json(bad), Err(PlantError::UnknownRhs(_))));
        let bad = r#"{"rhs": "decay", "domain": [[0, 1]], "input_box": [], "tau": 0, "eta": 0.5, "mu": 1}"#;
        assert!(matches!(PlantSpec::from_json(bad), Err(PlantError::Invalid(_))));
        let bad = r#"{"A": [[1]], "domain": [[0, 1]], "input_box": [], "tau": 1, "eta": 0.5, "mu": 1}"#;
        assert!(matches!(PlantSpec::from_json(bad), Err(PlantError::Invalid(_))));
        let bad = r#"{"rhs": "pendulum", "domain": [[0, 1]], "input_box": [[0, 1]], "tau": 1, "eta": 0.5, "mu": 1}"#;
        assert!(matches!(PlantSpec::from_json(bad), Err(PlantError::Dimension(_))));
    }

    #[test]
    fn grid_names() {
        assert_eq!(grid_name('g', 7, &[3, 4]), "g1_3");
        assert_eq!(grid_name('g', 2, &[5]), "g2");
    }
}
