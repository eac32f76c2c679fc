//! Named simulation scenarios: parameters, initial state and optional
//! integrator settings. Scenarios come either from the built-in table or from
//! TOML files:
//!
//! ```toml
//! name = "my-run"
//!
//! [params]
//! K_H = 0.176        # 1/h
//! alpha = 0.2
//! k_d = 0.048        # 1/h
//! Y_Bs = 1.19        # g/g
//! inv_Y_Ps = 0.2     # g/g
//! m_s = 0.0047       # 1/h
//! m_P = 0.002        # 1/h
//! growth = { kind = "monod", mu_max = 0.096, k_s = 11.27 }
//!
//! [initial]          # g/L
//! X = 45.0
//! B = 15.0
//! s = 50.0
//! P = 0.0
//!
//! [sim]              # optional
//! step = 0.01        # h
//! t_end = 2000.0     # h
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use trichoderma_core::{presets, ModelParams, SimulationConfig, State};

use crate::error::{HarnessError, Result};

/// Integrator settings that a scenario file or the command line may pin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimOverrides {
    pub step: Option<f64>,
    pub t_end: Option<f64>,
    pub steady_tol: Option<f64>,
    pub biomass_floor: Option<f64>,
    pub clamp_eps: Option<f64>,
    pub record_stride: Option<usize>,
}

impl SimOverrides {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(&self, over: &SimOverrides) -> SimOverrides {
        SimOverrides {
            step: over.step.or(self.step),
            t_end: over.t_end.or(self.t_end),
            steady_tol: over.steady_tol.or(self.steady_tol),
            biomass_floor: over.biomass_floor.or(self.biomass_floor),
            clamp_eps: over.clamp_eps.or(self.clamp_eps),
            record_stride: over.record_stride.or(self.record_stride),
        }
    }

    pub fn apply(&self, mut cfg: SimulationConfig) -> SimulationConfig {
        if let Some(v) = self.step {
            cfg.step = v;
        }
        if let Some(v) = self.t_end {
            cfg.t_end = v;
        }
        if let Some(v) = self.steady_tol {
            cfg.steady_tol = v;
        }
        if let Some(v) = self.biomass_floor {
            cfg.biomass_floor = v;
        }
        if let Some(v) = self.clamp_eps {
            cfg.clamp_eps = v;
        }
        if self.record_stride.is_some() {
            cfg.record_stride = self.record_stride;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub initial: State,
    #[serde(default)]
    pub sim: SimOverrides,
}

impl Scenario {
    pub fn new(name: impl Into<String>, params: ModelParams, initial: State) -> Self {
        Scenario {
            name: name.into(),
            params,
            initial,
            sim: SimOverrides::default(),
        }
    }

    /// Simulation config: defaults, then the scenario's own settings, then `cli`.
    pub fn config(&self, cli: &SimOverrides) -> SimulationConfig {
        self.sim.overlay(cli).apply(SimulationConfig::new(self.initial))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(HarnessError::Validation("scenario name is empty".into()));
        }
        self.params
            .check()
            .and_then(|_| self.config(&SimOverrides::default()).validate())
            .map_err(|e| HarnessError::Validation(format!("scenario {}: {e}", self.name)))
    }

    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let sc: Scenario = toml::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes to TOML")
    }

    /// Built-in name first, then a TOML file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if let Some(sc) = builtin_scenario(name_or_path) {
            return Ok(sc);
        }
        let path = Path::new(name_or_path);
        if path.exists() {
            return Self::load(path);
        }
        Err(HarnessError::Validation(format!(
            "unknown scenario '{name_or_path}' (not a built-in name or an existing file); built-ins: {}",
            builtin_scenarios()
                .iter()
                .map(|s| s.name.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )))
    }
}

/// Published scenarios shipped with the tool.
pub fn builtin_scenarios() -> Vec<Scenario> {
    let mut out = vec![
        Scenario::new("validation-1", presets::baseline_params(), presets::baseline_initial()),
        Scenario::new(
            "validation-2",
            presets::product_validation_params(),
            presets::product_validation_initial(),
        ),
    ];
    for x0 in presets::X0_SWEEP {
        let init = State {
            x: x0,
            ..presets::baseline_initial()
        };
        out.push(Scenario::new(format!("x0-{x0}"), presets::baseline_params(), init));
    }
    for k_d in presets::KD_SWEEP {
        out.push(Scenario::new(
            format!("kd-{k_d}"),
            presets::mortality_sweep_params(k_d),
            presets::baseline_initial(),
        ));
    }
    out.push(Scenario::new(
        "no-biomass",
        presets::baseline_params(),
        State {
            b: 0.0,
            ..presets::baseline_initial()
        },
    ));
    out
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    builtin_scenarios().into_iter().find(|s| s.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_names_are_unique() {
        let all = builtin_scenarios();
        let mut names: Vec<_> = all.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), all.len());
        assert!(all.iter().all(|s| s.validate().is_ok()));
    }

    #[test]
    fn toml_round_trip() {
        let sc = builtin_scenario("validation-2").unwrap();
        let back = Scenario::from_toml(&sc.to_toml(), Path::new("mem")).unwrap();
        assert_eq!(back, sc);
    }

    #[test]
    fn parses_documented_format() {
        let text = r#"
name = "my-run"
[params]
K_H = 0.176
alpha = 0.2
k_d = 0.048
Y_Bs = 1.19
inv_Y_Ps = 0.2
m_s = 0.0047
m_P = 0.002
growth = { kind = "monod", mu_max = 0.096, k_s = 11.27 }
[initial]
X = 45.0
B = 15.0
s = 50.0
P = 0.0
[sim]
step = 0.02
"#;
        let sc = Scenario::from_toml(text, Path::new("mem")).unwrap();
        assert_eq!(sc.params, presets::baseline_params());
        let cfg = sc.config(&SimOverrides::default());
        assert_eq!(cfg.step, 0.02);
        let cfg = sc.config(&SimOverrides {
            step: Some(0.05),
            ..Default::default()
        });
        assert_eq!(cfg.step, 0.05);
        assert_eq!(cfg.t_end, 2000.0);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(matches!(
            Scenario::from_toml("name = 3", Path::new("x")),
            Err(HarnessError::Parse { .. })
        ));
        let mut sc = builtin_scenario("validation-1").unwrap();
        sc.initial.s = -1.0;
        assert!(matches!(
            Scenario::from_toml(&sc.to_toml(), Path::new("x")),
            Err(HarnessError::Validation(_))
        ));
        assert!(Scenario::resolve("no-such-scenario").is_err());
    }
}
