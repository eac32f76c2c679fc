//! One-parameter sweeps over a base scenario. TOML form:
//!
//! ```toml
//! base = "validation-1"          # built-in name or scenario file
//! parameter = "initial.X"        # or params.k_d, params.mu_max, ...
//! values = [45.0, 90.0, 180.0, 360.0]
//! labels = ["x0-45", "x0-90", "x0-180", "x0-360"]   # optional
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Deserialize;
use trichoderma_core::{presets, GrowthLaw};

use crate::error::{HarnessError, Result};
use crate::scenario::{Scenario, SimOverrides};
use crate::summary::{run_scenario, RunSummary};

/// A settable scalar inside a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    InitialX,
    InitialB,
    InitialS,
    InitialP,
    KH,
    Alpha,
    KD,
    YBs,
    InvYPs,
    MS,
    MP,
    MuMax,
    KS,
}

const PATHS: [(&str, ParamPath); 13] = [
    ("initial.X", ParamPath::InitialX),
    ("initial.B", ParamPath::InitialB),
    ("initial.s", ParamPath::InitialS),
    ("initial.P", ParamPath::InitialP),
    ("params.K_H", ParamPath::KH),
    ("params.alpha", ParamPath::Alpha),
    ("params.k_d", ParamPath::KD),
    ("params.Y_Bs", ParamPath::YBs),
    ("params.inv_Y_Ps", ParamPath::InvYPs),
    ("params.m_s", ParamPath::MS),
    ("params.m_P", ParamPath::MP),
    ("params.mu_max", ParamPath::MuMax),
    ("params.k_s", ParamPath::KS),
];

impl FromStr for ParamPath {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace("growth.", "");
        PATHS.iter().find(|(name, _)| *name == key).map(|(_, p)| *p).ok_or_else(|| {
            let known: Vec<_> = PATHS.iter().map(|(n, _)| *n).collect();
            HarnessError::Validation(format!("unknown parameter path '{s}'; expected one of {}", known.join(", ")))
        })
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = PATHS.iter().find(|(_, p)| p == self).map(|(n, _)| *n).unwrap();
        f.write_str(name)
    }
}

impl ParamPath {
    pub fn set(self, sc: &mut Scenario, v: f64) {
        let GrowthLaw::Monod { mu_max, k_s } = &mut sc.params.growth;
        match self {
            ParamPath::InitialX => sc.initial.x = v,
            ParamPath::InitialB => sc.initial.b = v,
            ParamPath::InitialS => sc.initial.s = v,
            ParamPath::InitialP => sc.initial.p = v,
            ParamPath::KH => sc.params.k_h = v,
            ParamPath::Alpha => sc.params.alpha = v,
            ParamPath::KD => sc.params.k_d = v,
            ParamPath::YBs => sc.params.y_bs = v,
            ParamPath::InvYPs => sc.params.inv_y_ps = v,
            ParamPath::MS => sc.params.m_s = v,
            ParamPath::MP => sc.params.m_p = v,
            ParamPath::MuMax => *mu_max = v,
            ParamPath::KS => *k_s = v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub base: Scenario,
    pub parameter: ParamPath,
    pub values: Vec<f64>,
    pub labels: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    name: Option<String>,
    base: String,
    parameter: String,
    values: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl SweepSpec {
    /// Builds a spec; labels default to `<base>-<param>=<value>`.
    pub fn new(base: Scenario, parameter: ParamPath, values: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if values.is_empty() {
            return Err(HarnessError::Validation("sweep needs at least one value".into()));
        }
        let labels = match labels {
            Some(l) if l.len() != values.len() => {
                return Err(HarnessError::Validation(format!(
                    "sweep has {} values but {} labels",
                    values.len(),
                    l.len()
                )))
            }
            Some(l) => l,
            None => values.iter().map(|v| format!("{}-{parameter}={v}", base.name)).collect(),
        };
        let mut seen = labels.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != labels.len() {
            return Err(HarnessError::Validation("sweep labels must be unique".into()));
        }
        let spec = SweepSpec {
            name: format!("{}-{parameter}", base.name),
            base,
            parameter,
            values,
            labels,
        };
        for sc in spec.scenarios() {
            sc.validate()?;
        }
        Ok(spec)
    }

    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let file: SweepFile = toml::from_str(text).map_err(|e| HarnessError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        let base = match Scenario::resolve(&file.base) {
            Err(HarnessError::Validation(_)) => {
                // relative to the sweep file
                let rel = origin.parent().unwrap_or(Path::new(".")).join(&file.base);
                Scenario::load(&rel)?
            }
            other => other?,
        };
        let mut spec = SweepSpec::new(base, file.parameter.parse()?, file.values, file.labels)?;
        if let Some(name) = file.name {
            spec.name = name;
        }
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml(&text, path)
    }

    /// Built-in sweep name first, then a TOML file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        if let Some(spec) = builtin_sweep(name_or_path) {
            return Ok(spec);
        }
        let path = Path::new(name_or_path);
        if path.exists() {
            return Self::load(path);
        }
        Err(HarnessError::Validation(format!(
            "unknown sweep '{name_or_path}' (not x0-sweep, kd-sweep or an existing file)"
        )))
    }

    pub fn scenarios(&self) -> Vec<Scenario> {
        self.values
            .iter()
            .zip(&self.labels)
            .map(|(&v, label)| {
                let mut sc = self.base.clone();
                sc.name = label.clone();
                self.parameter.set(&mut sc, v);
                sc
            })
            .collect()
    }
}

pub fn builtin_sweep(name: &str) -> Option<SweepSpec> {
    let label = |prefix: &str, v: f64| format!("{prefix}-{v}");
    match name {
        "x0-sweep" => {
            let base = Scenario::new("validation-1", presets::baseline_params(), presets::baseline_initial());
            let values = presets::X0_SWEEP.to_vec();
            let labels = values.iter().map(|&v| label("x0", v)).collect();
            let mut spec = SweepSpec::new(base, ParamPath::InitialX, values, Some(labels)).ok()?;
            spec.name = name.into();
            Some(spec)
        }
        "kd-sweep" => {
            let mut base = Scenario::new("validation-1", presets::baseline_params(), presets::baseline_initial());
            ParamPath::MuMax.set(&mut base, presets::KD_SWEEP_MU_MAX);
            let values = presets::KD_SWEEP.to_vec();
            let labels = values.iter().map(|&v| label("kd", v)).collect();
            let mut spec = SweepSpec::new(base, ParamPath::KD, values, Some(labels)).ok()?;
            spec.name = name.into();
            Some(spec)
        }
        _ => None,
    }
}

pub const BUILTIN_SWEEPS: [&str; 2] = ["x0-sweep", "kd-sweep"];

/// Outcome for one swept value. A failed value does not stop the others.
#[derive(Debug)]
pub struct SweepEntry {
    pub label: String,
    pub value: f64,
    pub outcome: Result<RunSummary>,
}

/// Runs every value concurrently; entries come back in input order.
pub fn run_sweep(spec: &SweepSpec, overrides: &SimOverrides) -> Vec<SweepEntry> {
    spec.scenarios()
        .into_par_iter()
        .zip(spec.values.par_iter())
        .map(|(sc, &value)| SweepEntry {
            label: sc.name.clone(),
            value,
            outcome: run_scenario(&sc, overrides).map(|r| r.summary),
        })
        .collect()
}
