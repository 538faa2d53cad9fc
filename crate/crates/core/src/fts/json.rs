//! JSON interchange format for systems.
//!
//! ```json
//! {
//!   "states": ["x", "y"],
//!   "initial": ["x", "y"],
//!   "inputs": ["a", "b"],
//!   "transitions": [["x", "a", "x"], ["x", "b", "y"]],
//!   "outputs": {"x": "Z", "y": "W"},
//!   "metric": "discrete"
//! }
//! ```
//!
//! Labels are strings (atoms), arrays of numbers (vectors), the string
//! `"__q__"` (dummy symbol) or `{"pair": [l1, l2]}`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::{Metric, OutputLabel, System, SystemBuilder};

pub const DUMMY_TOKEN: &str = "__q__";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

impl JsonError {
    fn invalid(location: impl Into<String>, message: impl Into<String>) -> Self {
        JsonError::Invalid {
            location: location.into(),
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for JsonError {
    fn from(e: serde_json::Error) -> Self {
        JsonError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// Serialized form of a [`System`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub inputs: Vec<String>,
    pub transitions: Vec<(String, String, String)>,
    pub outputs: BTreeMap<String, Value>,
    pub metric: String,
}

pub fn label_to_json(label: &OutputLabel) -> Value {
    match label {
        OutputLabel::Atom(a) => Value::String(a.clone()),
        OutputLabel::Vector(v) => Value::Array(v.iter().map(|&x| Value::from(x)).collect()),
        OutputLabel::Dummy => Value::String(DUMMY_TOKEN.to_string()),
        OutputLabel::Pair(a, b) => {
            let mut obj = serde_json::Map::new();
            obj.insert(
                "pair".to_string(),
                Value::Array(vec![label_to_json(a), label_to_json(b)]),
            );
            Value::Object(obj)
        }
    }
}

pub fn label_from_json(value: &Value) -> Result<OutputLabel, String> {
    match value {
        Value::String(s) if s == DUMMY_TOKEN => Ok(OutputLabel::Dummy),
        Value::String(s) => Ok(OutputLabel::Atom(s.clone())),
        Value::Array(items) => items
            .iter()
            .map(|v| v.as_f64().ok_or_else(|| format!("vector entry {v} is not a number")))
            .collect::<Result<Vec<_>, _>>()
            .map(OutputLabel::Vector),
        Value::Object(obj) => match (obj.len(), obj.get("pair")) {
            (1, Some(Value::Array(parts))) if parts.len() == 2 => Ok(OutputLabel::pair(
                label_from_json(&parts[0])?,
                label_from_json(&parts[1])?,
            )),
            _ => Err("pair labels must be {\"pair\": [l1, l2]}".to_string()),
        },
        other => Err(format!("unsupported label {other}")),
    }
}

impl SystemDoc {
    pub fn from_system(sys: &System) -> Self {
        SystemDoc {
            states: sys.state_names().to_vec(),
            initial: sys.initial().iter().map(|&s| sys.state_name(s).to_string()).collect(),
            inputs: sys.input_names().to_vec(),
            transitions: sys
                .transitions()
                .map(|(s, u, t)| {
                    (
                        sys.state_name(s).to_string(),
                        sys.input_name(u).to_string(),
                        sys.state_name(t).to_string(),
                    )
                })
                .collect(),
            outputs: sys
                .states()
                .map(|s| (sys.state_name(s).to_string(), label_to_json(sys.output(s))))
                .collect(),
            metric: sys.metric().as_str().to_string(),
        }
    }

    pub fn to_system(&self) -> Result<System, JsonError> {
        if self.states.is_empty() {
            return Err(JsonError::invalid("states", "a system needs at least one state"));
        }
        let metric: Metric = self
            .metric
            .parse()
            .map_err(|e: super::FtsError| JsonError::invalid("metric", e.to_string()))?;
        let mut b = SystemBuilder::new(metric);
        for (i, name) in self.inputs.iter().enumerate() {
            b.add_input(name.clone())
                .map_err(|e| JsonError::invalid(format!("inputs[{i}]"), e.to_string()))?;
        }
        for (i, name) in self.states.iter().enumerate() {
            let raw = self
                .outputs
                .get(name)
                .ok_or_else(|| JsonError::invalid("outputs", format!("no output for state {name:?}")))?;
            let label = label_from_json(raw)
                .map_err(|m| JsonError::invalid(format!("outputs.{name}"), m))?;
            b.add_state(name.clone(), label)
                .map_err(|e| JsonError::invalid(format!("states[{i}]"), e.to_string()))?;
        }
        if let Some(extra) = self.outputs.keys().find(|k| b.state_id(k).is_none()) {
            return Err(JsonError::invalid(
                format!("outputs.{extra}"),
                "output for a state that is not declared",
            ));
        }
        for (i, name) in self.initial.iter().enumerate() {
            let s = b.state_id(name).ok_or_else(|| {
                JsonError::invalid(format!("initial[{i}]"), format!("unknown state {name:?}"))
            })?;
            b.mark_initial(s);
        }
        for (i, (src, input, dst)) in self.transitions.iter().enumerate() {
            let loc = format!("transitions[{i}]");
            let s = b
                .state_id(src)
                .ok_or_else(|| JsonError::invalid(&loc, format!("unknown state {src:?}")))?;
            let u = b
                .input_id(input)
                .ok_or_else(|| JsonError::invalid(&loc, format!("unknown input {input:?}")))?;
            let t = b
                .state_id(dst)
                .ok_or_else(|| JsonError::invalid(&loc, format!("unknown state {dst:?}")))?;
            b.add_transition(s, u, t);
        }
        b.build().map_err(|e| JsonError::invalid("system", e.to_string()))
    }
}

pub fn system_to_string(sys: &System) -> String {
    serde_json::to_string_pretty(&SystemDoc::from_system(sys)).expect("system documents serialize")
}

pub fn system_from_str(text: &str) -> Result<System, JsonError> {
    let doc: SystemDoc = serde_json::from_str(text)?;
    doc.to_system()
}

pub fn load_system(path: impl AsRef<Path>) -> Result<System, JsonError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| JsonError::Io {
        path: path.display().to_string(),
        source,
    })?;
    system_from_str(&text)
}

pub fn save_system(sys: &System, path: impl AsRef<Path>) -> Result<(), JsonError> {
    let path = path.as_ref();
    fs::write(path, system_to_string(sys)).map_err(|source| JsonError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fts::two_state_plant;

    #[test]
    fn plant_round_trip() {
        let p = two_state_plant();
        let back = system_from_str(&system_to_string(&p)).unwrap();
        assert!(p.same_as(&back));
    }

    #[test]
    fn labels_round_trip() {
        for label in [
            OutputLabel::atom("Z"),
            OutputLabel::Vector(vec![0.5, -1.0]),
            OutputLabel::Dummy,
            OutputLabel::pair(OutputLabel::atom("Z"), OutputLabel::Dummy),
        ] {
            assert_eq!(label_from_json(&label_to_json(&label)).unwrap(), label);
        }
    }

    #[test]
    fn empty_states_is_an_error() {
        let text = r#"{"states": [], "initial": [], "inputs": [], "transitions": [], "outputs": {}, "metric": "discrete"}"#;
        let err = system_from_str(text).unwrap_err();
        assert!(matches!(err, JsonError::Invalid { ref location, .. } if location == "states"));
    }

    #[test]
    fn dangling_identifier_reports_location() {
        let text = r#"{"states": ["x"], "initial": ["x"], "inputs": ["a"],
            "transitions": [["x", "a", "x"], ["x", "a", "nowhere"]],
            "outputs": {"x": "Z"}, "metric": "discrete"}"#;
        match system_from_str(text).unwrap_err() {
            JsonError::Invalid { location, message } => {
                assert_eq!(location, "transitions[1]");
                assert!(message.contains("nowhere"));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = system_from_str("{\"states\": [\n oops").unwrap_err();
        assert!(matches!(err, JsonError::Syntax { line: 2, .. }));
    }
}
