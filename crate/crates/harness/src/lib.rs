//! Scenario runner, parameter sweeps, output emission and the acceptance
//! suite behind the `trichoderma` command.

pub mod check;
pub mod error;
pub mod output;
pub mod scenario;
pub mod summary;
pub mod sweep;

pub use error::{HarnessError, Result};
pub use scenario::{builtin_scenario, builtin_scenarios, Scenario, SimOverrides};
pub use summary::{run_scenario, RunSummary, ScenarioRun};
pub use sweep::{builtin_sweep, run_sweep, ParamPath, SweepEntry, SweepSpec};
