//! JSON configuration files.
//!
//! ```json
//! {"radius": 1.0,
//!  "modules": [{"id": 1, "pos": [0, 0, 1], "role": "mobile"},
//!              {"id": 2, "pos": [0, 0, 0]}]}
//! ```
//!
//! `role` is `fixed` (default), `mobile` or `goal-marker`. A goal marker is
//! not a module: it only names the goal cell. Scene files add `name`,
//! `description`, `goal` and `start`. A module may carry a
//! `deformation: {"axis": "ne", "fraction": 1.0}`.

use std::path::Path;

use datom_core::lattice::{ConfigError, Deformation};
use datom_core::{CellPos, Configuration, ModuleId, ModuleState, PistonAxis};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    #[default]
    Fixed,
    Mobile,
    GoalMarker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationEntry {
    pub axis: String,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleEntry {
    pub id: ModuleId,
    pub pos: [i32; 3],
    #[serde(default, skip_serializing_if = "is_fixed")]
    pub role: Role,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deformation: Option<DeformationEntry>,
}

fn is_fixed(r: &Role) -> bool {
    *r == Role::Fixed
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal: Option<[i32; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<[i32; 3]>,
    pub modules: Vec<ModuleEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Json(#[from] serde_json::Error),
    #[error("radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("{0}")]
    Config(ConfigError),
    #[error("more than one mobile module ({0} and {1})")]
    TwoMobiles(ModuleId, ModuleId),
    #[error("more than one goal marker")]
    TwoGoals,
    #[error("module {id}: unknown piston axis {axis:?}")]
    Axis { id: ModuleId, axis: String },
    #[error("module {id}: deformation fraction {fraction} outside [0, 1]")]
    Fraction { id: ModuleId, fraction: f64 },
}

/// A validated configuration with the hints stored alongside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub name: Option<String>,
    pub description: Option<String>,
    /// Every module, the mobile one included.
    pub config: Configuration,
    pub mobile: Option<ModuleId>,
    pub goal: Option<CellPos>,
    pub start: Option<CellPos>,
}

impl Loaded {
    /// The configuration without the mobile module.
    pub fn fixed(&self) -> Configuration {
        let mut cfg = self.config.clone();
        if let Some(pos) = self.mobile.and_then(|m| cfg.position_of(m)) {
            cfg.remove(pos);
        }
        cfg
    }

    pub fn mobile_pos(&self) -> Option<CellPos> {
        self.mobile.and_then(|m| self.config.position_of(m))
    }
}

pub fn parse(text: &str) -> Result<Loaded, LoadError> {
    let file: ConfigFile = serde_json::from_str(text)?;
    from_file(file)
}

pub fn load(path: &Path) -> Result<Loaded, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

pub fn from_file(file: ConfigFile) -> Result<Loaded, LoadError> {
    if !(file.radius.is_finite() && file.radius > 0.0) {
        return Err(LoadError::Radius(file.radius));
    }
    let mut config = Configuration::new(file.radius);
    let mut mobile = None;
    let mut goal = file.goal.map(CellPos::from);
    let mut marker_seen = false;
    for m in &file.modules {
        match m.role {
            Role::GoalMarker => {
                if marker_seen {
                    return Err(LoadError::TwoGoals);
                }
                marker_seen = true;
                goal = Some(m.pos.into());
                continue;
            }
            Role::Mobile => {
                if let Some(prev) = mobile {
                    return Err(LoadError::TwoMobiles(prev, m.id));
                }
                mobile = Some(m.id);
            }
            Role::Fixed => {}
        }
        let mut state = ModuleState::new(m.id, m.pos.into());
        if let Some(d) = &m.deformation {
            let axis = PistonAxis::from_name(&d.axis)
                .ok_or_else(|| LoadError::Axis { id: m.id, axis: d.axis.clone() })?;
            if !(0.0..=1.0).contains(&d.fraction) {
                return Err(LoadError::Fraction { id: m.id, fraction: d.fraction });
            }
            if d.fraction > 0.0 {
                state.deformation = Deformation::Single { axis, fraction: d.fraction };
            }
        }
        config.insert(state).map_err(LoadError::Config)?;
    }
    if !config.is_connected() {
        return Err(LoadError::Config(ConfigError::Disconnected));
    }
    Ok(Loaded {
        name: file.name,
        description: file.description,
        config,
        mobile,
        goal,
        start: file.start.map(CellPos::from),
    })
}

/// Serializes a configuration, tagging `mobile` if given.
pub fn to_file(config: &Configuration, mobile: Option<ModuleId>) -> ConfigFile {
    let mut modules: Vec<ModuleEntry> = config
        .modules()
        .map(|m| ModuleEntry {
            id: m.id,
            pos: m.pos.into(),
            role: if Some(m.id) == mobile { Role::Mobile } else { Role::Fixed },
            deformation: match m.deformation {
                Deformation::None => None,
                Deformation::Single { axis, fraction } => {
                    Some(DeformationEntry { axis: axis.name().into(), fraction })
                }
            },
        })
        .collect();
    modules.sort_by_key(|m| m.id);
    ConfigFile {
        name: None,
        description: None,
        radius: config.radius(),
        goal: None,
        start: None,
        modules,
    }
}

pub fn to_json(config: &Configuration, mobile: Option<ModuleId>) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(config, mobile)).expect("plain data");
    s.push('\n');
    s
}
