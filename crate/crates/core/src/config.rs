//! Run configuration files.
//!
//! A config is TOML (or the JSON `config` block echoed in a result file):
//!
//! ```toml
//! seed = 7
//! basis = "rep"
//!
//! [group]
//! builtin = "SU2_trunc"
//! params = { J_max = "1/2" }
//!
//! [lattice]
//! lx = 2
//! ly = 1
//! include_matter = true
//!
//! [params]
//! mass = 0.5
//!
//! [[tasks]]
//! kind = "spectrum"
//! k = 6
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::file::load_group_file;
use crate::group::{build_builtin, GroupCatalogEntry, GroupParams};
use crate::lattice::{LatticeSpec, ModelParams};
use crate::link::Basis;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl std::fmt::Display for ParamValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// A built-in group with parameters, or a group file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, ParamValue>,
    /// Relative paths resolve against the config file's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl GroupRef {
    pub fn builtin(name: &str) -> Self {
        Self {
            builtin: Some(name.to_string()),
            params: BTreeMap::new(),
            file: None,
        }
    }

    pub fn load(&self, base: &Path) -> Result<GroupCatalogEntry> {
        match (&self.builtin, &self.file) {
            (Some(name), None) => {
                let params: GroupParams = self.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
                build_builtin(name, &params)
            }
            (None, Some(file)) => {
                let path = if file.is_absolute() { file.clone() } else { base.join(file) };
                if !path.exists() {
                    return Err(Error::Parse(format!("group file {} does not exist", path.display())));
                }
                load_group_file(path)
            }
            _ => Err(Error::Parse("[group] needs exactly one of `builtin` or `file`".into())),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorSpec {
    #[default]
    Trivial,
    /// One irrep label per vertex.
    Labels(Vec<String>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSpec {
    #[default]
    Ground,
    Vacuum,
}

fn default_k() -> usize {
    6
}

fn default_probes() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Verify {
        #[serde(default = "default_probes")]
        probes: usize,
    },
    Spectrum {
        #[serde(default = "default_k")]
        k: usize,
        /// Also solve inside a Gauss-law sector (finite groups).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sector: Option<SectorSpec>,
    },
    Observables {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        names: Vec<String>,
        #[serde(default)]
        state: StateSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sector: Option<SectorSpec>,
    },
    VortexMasses,
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Verify { .. } => "verify",
            Task::Spectrum { .. } => "spectrum",
            Task::Observables { .. } => "observables",
            Task::VortexMasses => "vortex-masses",
        }
    }

    pub fn default_of(kind: &str) -> Option<Task> {
        Some(match kind {
            "verify" => Task::Verify { probes: default_probes() },
            "spectrum" => Task::Spectrum { k: default_k(), sector: None },
            "observables" => Task::Observables {
                names: Vec::new(),
                state: StateSpec::Ground,
                sector: None,
            },
            "vortex-masses" => Task::VortexMasses,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: GroupRef,
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub params: ModelParams,
    #[serde(default)]
    pub basis: Basis,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub tasks: Vec<Task>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Accepts a bare config or a result file carrying a `config` block.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let inner = value.get("config").cloned().unwrap_or(value);
        let cfg: RunConfig = serde_json::from_value(inner).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tasks.is_empty() {
            return Err(Error::Parse("config lists no tasks".into()));
        }
        Ok(())
    }
}
