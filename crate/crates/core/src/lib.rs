//! Finite symbolic models of networked control systems.
//!
//! Starting from a finite abstraction of a plant, the crate builds finite
//! transition systems describing the closed network loop with bounded
//! time-varying delays on both channels, packet reordering and message
//! rejection, and checks (alternating) approximate (bi)simulation relations
//! between such systems.
//!
//! * [`fts`]: finite metric transition systems and their JSON format
//! * [`packet`]: which buffered packet the receiver currently uses
//! * [`ncs`]: network model construction, trace simulation, DOT export
//! * [`relations`]: simulation checking, largest relations, lifting
//! * [`plant`]: grid abstractions of sampled continuous plants
//! * [`sizing`]: closed-form size bounds
//! * [`cli`]: the `ncs-abstract` command line

pub mod cli;
pub mod fts;
pub mod ncs;
pub mod packet;
pub mod plant;
pub mod relations;
pub mod sizing;

pub use fts::{InputId, Metric, OutputLabel, StateId, System, SystemBuilder};
pub use ncs::{build_ncs_dynamic, build_ncs_static, NcsModel};
pub use packet::DelayBounds;
pub use relations::{Relation, SimulationKind};
