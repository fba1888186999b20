use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use loopspace_core::{ManifoldKind, ManifoldSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

pub const MAX_RESOLUTION: usize = 1 << 22;
pub const MAX_CUTOFF: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Norms,
    Mollifier,
    HomotopyPc,
    HomotopyRetraction,
    HomotopyTruncation,
    DistanceGlued,
    Volumes,
    Symplectic,
    Multiplication,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Norms,
        Experiment::Mollifier,
        Experiment::HomotopyPc,
        Experiment::HomotopyRetraction,
        Experiment::HomotopyTruncation,
        Experiment::DistanceGlued,
        Experiment::Volumes,
        Experiment::Symplectic,
        Experiment::Multiplication,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Norms => "norms",
            Experiment::Mollifier => "mollifier",
            Experiment::HomotopyPc => "homotopy-pc",
            Experiment::HomotopyRetraction => "homotopy-retraction",
            Experiment::HomotopyTruncation => "homotopy-truncation",
            Experiment::DistanceGlued => "distance-glued",
            Experiment::Volumes => "volumes",
            Experiment::Symplectic => "symplectic",
            Experiment::Multiplication => "multiplication",
        }
    }

    /// Tolerance names this experiment reads, with their defaults.
    pub fn default_tolerances(&self) -> &'static [(&'static str, f64)] {
        match self {
            Experiment::Norms => &[("mode", 1e-12), ("parseval", 1e-10), ("cauchy_tail", 0.01), ("growth", 0.2)],
            Experiment::Mollifier => &[("boundary", 1e-4), ("slope", 1e-6), ("identity", 1e-10)],
            Experiment::HomotopyPc => &[("final_distance", 0.05), ("limit", 1e-3), ("rough_floor", 0.1)],
            Experiment::HomotopyRetraction => &[("lipschitz", 1e-8)],
            Experiment::HomotopyTruncation => &[("exponent", 0.05), ("rate", 0.05)],
            Experiment::DistanceGlued => &[("distance", 1e-6), ("certificate", 1e-12)],
            Experiment::Volumes => &[("sphere", 1e-3), ("mobius", 1e-6), ("square", 1e-12), ("additivity", 1e-9)],
            Experiment::Symplectic => &[("antisymmetry", 1e-12), ("mode", 1e-12)],
            Experiment::Multiplication => &[("spread", 2.0)],
        }
    }

    /// What `parameter_grid` holds.
    pub fn grid_meaning(&self) -> &'static str {
        match self {
            Experiment::Norms | Experiment::Symplectic | Experiment::Multiplication => "mode cutoffs",
            Experiment::Mollifier => "lengths l",
            Experiment::HomotopyPc => "parameters h",
            Experiment::HomotopyRetraction => "parameters s'",
            Experiment::HomotopyTruncation => "times t",
            Experiment::DistanceGlued => "copy counts i_max",
            Experiment::Volumes => "quadrature resolutions",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const KEYS: [&str; 9] = [
    "experiment",
    "resolution",
    "mode_cutoff",
    "s_values",
    "parameter_grid",
    "manifold",
    "seed",
    "output_dir",
    "tolerances",
];

fn field<T: DeserializeOwned>(obj: &Map<String, Value>, key: &str) -> Result<T> {
    let v = obj.get(key).ok_or_else(|| LabError::config(key, "missing"))?;
    T::deserialize(v).map_err(|e| LabError::config(key, e.to_string()))
}

/// A validated experiment description. Every key is required; tolerances
/// not listed fall back to the experiment's defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub resolution: usize,
    pub mode_cutoff: usize,
    pub s_values: Vec<f64>,
    pub parameter_grid: Vec<f64>,
    pub manifold: ManifoldSpec,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| LabError::config("<document>", e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| LabError::config("<document>", "expected a JSON object"))?;
        if let Some(key) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(LabError::config(key.as_str(), "unknown key"));
        }
        let manifold_json: Value = field(obj, "manifold")?;
        let cfg = ExperimentConfig {
            experiment: field(obj, "experiment")?,
            resolution: field(obj, "resolution")?,
            mode_cutoff: field(obj, "mode_cutoff")?,
            s_values: field(obj, "s_values")?,
            parameter_grid: field(obj, "parameter_grid")?,
            manifold: ManifoldSpec::from_json(&manifold_json).map_err(|e| LabError::config("manifold", e.to_string()))?,
            seed: field(obj, "seed")?,
            output_dir: field(obj, "output_dir")?,
            tolerances: field(obj, "tolerances")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Keys come out sorted, so equal configs serialize identically.
    pub fn to_json(&self) -> Value {
        json!({
            "experiment": self.experiment,
            "resolution": self.resolution,
            "mode_cutoff": self.mode_cutoff,
            "s_values": self.s_values,
            "parameter_grid": self.parameter_grid,
            "manifold": self.manifold.to_json(),
            "seed": self.seed,
            "output_dir": self.output_dir,
            "tolerances": self.tolerances,
        })
    }

    pub fn sha256(&self) -> String {
        let digest = Sha256::digest(self.to_json().to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            self.experiment
                .default_tolerances()
                .iter()
                .find(|(n, _)| *n == name)
                .map(|&(_, v)| v)
                .unwrap_or_else(|| panic!("{} has no tolerance {name}", self.experiment))
        })
    }

    /// Tolerances after defaults are filled in.
    pub fn resolved_tolerances(&self) -> BTreeMap<String, f64> {
        self.experiment
            .default_tolerances()
            .iter()
            .map(|&(n, _)| (n.to_string(), self.tolerance(n)))
            .collect()
    }

    /// `parameter_grid` read as positive integers.
    pub fn integer_grid(&self) -> Vec<usize> {
        self.parameter_grid.iter().map(|&x| x as usize).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let exp = self.experiment;
        if self.mode_cutoff > MAX_CUTOFF {
            return Err(LabError::config("mode_cutoff", format!("at most {MAX_CUTOFF}")));
        }
        if self.resolution < 2 * self.mode_cutoff + 1 {
            return Err(LabError::config(
                "resolution",
                format!("{} samples cannot carry modes up to {}", self.resolution, self.mode_cutoff),
            ));
        }
        if self.resolution > MAX_RESOLUTION {
            return Err(LabError::config("resolution", format!("at most {MAX_RESOLUTION}")));
        }
        if self.parameter_grid.is_empty() {
            return Err(LabError::config("parameter_grid", "must not be empty"));
        }
        if self.s_values.is_empty() {
            return Err(LabError::config("s_values", "must not be empty"));
        }
        if let Some(s) = self.s_values.iter().find(|s| !s.is_finite() || s.abs() > 8.0) {
            return Err(LabError::config("s_values", format!("{s} is not an order in [-8, 8]")));
        }
        for (name, value) in &self.tolerances {
            if !exp.default_tolerances().iter().any(|(n, _)| n == name) {
                let known: Vec<&str> = exp.default_tolerances().iter().map(|(n, _)| *n).collect();
                return Err(LabError::config(
                    format!("tolerances.{name}"),
                    format!("{exp} reads only {}", known.join(", ")),
                ));
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(LabError::config(format!("tolerances.{name}"), "must be positive"));
            }
        }
        self.validate_grid()?;
        self.validate_manifold()?;
        if exp == Experiment::Multiplication && self.s_values.len() != 2 {
            return Err(LabError::config("s_values", "multiplication takes exactly [k, s]"));
        }
        Ok(())
    }

    fn validate_grid(&self) -> Result<()> {
        let grid = &self.parameter_grid;
        let bad = |msg: String| Err(LabError::config("parameter_grid", msg));
        let in_range = |lo: f64, hi: f64, lo_open: bool| {
            grid.iter().find(|&&x| !(x.is_finite() && x <= hi && if lo_open { x > lo } else { x >= lo }))
        };
        let integers = |lo: f64, hi: f64| grid.iter().find(|&&x| !(x.is_finite() && x.fract() == 0.0 && x >= lo && x <= hi));
        let meaning = self.experiment.grid_meaning();
        match self.experiment {
            Experiment::Norms | Experiment::Symplectic | Experiment::Multiplication => {
                if let Some(x) = integers(1.0, MAX_CUTOFF as f64) {
                    return bad(format!("{meaning} must be integers in [1, {MAX_CUTOFF}], got {x}"));
                }
                if grid.windows(2).any(|w| w[1] <= w[0]) {
                    return bad(format!("{meaning} must increase"));
                }
            }
            Experiment::Mollifier => {
                if let Some(x) = in_range(0.0, 1.0, true) {
                    return bad(format!("{meaning} must lie in (0, 1], got {x}"));
                }
            }
            Experiment::HomotopyPc => {
                if let Some(x) = in_range(0.0, 1.0, true).or_else(|| grid.iter().find(|&&x| x >= 1.0)) {
                    return bad(format!("{meaning} must lie in (0, 1), got {x}"));
                }
                if grid.windows(2).any(|w| w[1] >= w[0]) {
                    return bad(format!("{meaning} must decrease toward 0"));
                }
            }
            Experiment::HomotopyRetraction | Experiment::HomotopyTruncation => {
                if let Some(x) = in_range(0.0, 1.0, false) {
                    return bad(format!("{meaning} must lie in [0, 1], got {x}"));
                }
            }
            Experiment::DistanceGlued => {
                if let Some(x) = integers(1.0, 1e12) {
                    return bad(format!("{meaning} must be integers in [1, 1e12], got {x}"));
                }
            }
            Experiment::Volumes => {
                if let Some(x) = integers(2.0, 4096.0) {
                    return bad(format!("{meaning} must be integers in [2, 4096], got {x}"));
                }
            }
        }
        Ok(())
    }

    fn validate_manifold(&self) -> Result<()> {
        let m = &self.manifold;
        let bad = |msg: &str| Err(LabError::config("manifold", format!("{} {msg}", self.experiment)));
        match self.experiment {
            Experiment::HomotopyRetraction if m.kind() != ManifoldKind::FullLinear => {
                bad("contracts the linear space of based loops; use full-linear-space")
            }
            Experiment::HomotopyRetraction if !m.ambient().is_real() => bad("runs on real ambients"),
            Experiment::HomotopyTruncation if m.basepoint().iter().any(|z| z.norm() != 0.0) => {
                bad("cuts loops to a zero basepoint; use a translated kind or full-linear-space")
            }
            Experiment::Multiplication if !m.ambient().supports_product() => bad("needs a matrix ambient"),
            _ => Ok(()),
        }
    }
}
