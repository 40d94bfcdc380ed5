//! Scenario-driven driver for the `gecert` binary.

pub mod output;
pub mod report;
pub mod run;
pub mod scenario;

pub use report::{RunReport, Stage};
pub use run::{run, Overrides, RunError};
pub use scenario::{parse_scenario, Scenario, ScenarioError};
