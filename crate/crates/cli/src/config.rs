//! Tolerances and thresholds, read from TOML.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use darboux_core::numeric::Settings;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Value(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub integrator: Settings,
    pub analysis: Analysis,
    pub separatrix: Separatrix,
    pub conservation: Conservation,
    pub probe: Probe,
    pub portrait: Portrait,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Analysis {
    /// Degree bound for invariant curves and exponential factors.
    pub maxdeg: u32,
    /// Truncation order of the center-manifold series.
    pub center_manifold_order: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Separatrix {
    pub eps: f64,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Conservation {
    pub trials: usize,
    pub tol: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Probe {
    pub count: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub maxdeg: u32,
    /// Γ passes when every held-out residual is at least this.
    pub gamma_threshold: f64,
    /// The algebraic control passes when its residual is at most this.
    pub control_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Portrait {
    pub grid: usize,
    pub seed: u64,
    pub size: u32,
    /// Integration time of background orbits, each way.
    pub orbit_time: f64,
}

impl Default for Analysis {
    fn default() -> Self {
        Analysis { maxdeg: 2, center_manifold_order: 7 }
    }
}

impl Default for Separatrix {
    fn default() -> Self {
        Separatrix { eps: 1e-6, length: 40.0 }
    }
}

impl Default for Conservation {
    fn default() -> Self {
        Conservation { trials: 10, tol: 1e-6, seed: 7 }
    }
}

impl Default for Probe {
    fn default() -> Self {
        Probe { count: 200, y_min: 0.2, y_max: 3.0, maxdeg: 8, gamma_threshold: 1e-5, control_threshold: 1e-10 }
    }
}

impl Default for Portrait {
    fn default() -> Self {
        Portrait { grid: 6, seed: 1, size: 600, orbit_time: 8.0 }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self, ConfigError> {
        match path {
            Some(p) => Self::from_toml(&std::fs::read_to_string(p)?),
            None => Ok(Config::default()),
        }
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let i = &self.integrator;
        let positive = [
            ("integrator.rtol", i.rtol),
            ("integrator.atol", i.atol),
            ("integrator.escape_radius", i.escape_radius),
            ("separatrix.eps", self.separatrix.eps),
            ("separatrix.length", self.separatrix.length),
            ("conservation.tol", self.conservation.tol),
            ("probe.y_min", self.probe.y_min),
            ("portrait.orbit_time", self.portrait.orbit_time),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Value(format!("{name} must be positive and finite")));
            }
        }
        if !(i.min_speed >= 0.0) {
            return Err(ConfigError::Value("integrator.min_speed must be non-negative".into()));
        }
        if !(self.probe.y_max > self.probe.y_min && self.probe.y_max.is_finite()) {
            return Err(ConfigError::Value("probe.y_max must exceed probe.y_min".into()));
        }
        if self.analysis.maxdeg > 2 {
            return Err(ConfigError::Value("analysis.maxdeg must be at most 2".into()));
        }
        if self.portrait.grid > 64 || self.portrait.size == 0 {
            return Err(ConfigError::Value("portrait.grid must be at most 64 and portrait.size positive".into()));
        }
        Ok(())
    }

    /// SHA-256 of the effective configuration, so equal settings hash equally
    /// however they were written.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn partial_sections() {
        let c = Config::from_toml("[probe]\nmaxdeg = 5\n[integrator]\nrtol = 1e-8\n").unwrap();
        assert_eq!(c.probe.maxdeg, 5);
        assert_eq!(c.probe.count, 200);
        assert_eq!(c.integrator.rtol, 1e-8);
        assert_eq!(c.integrator.escape_radius, 1e6);
    }

    #[test]
    fn rejects_unknown_and_bad_values() {
        assert!(matches!(Config::from_toml("[probe]\nfoo = 1\n"), Err(ConfigError::Toml(_))));
        assert!(matches!(Config::from_toml("bogus = 1\n"), Err(ConfigError::Toml(_))));
        assert!(matches!(Config::from_toml("[separatrix]\neps = -1.0\n"), Err(ConfigError::Value(_))));
        assert!(matches!(Config::from_toml("[probe]\ny_min = 2.0\ny_max = 1.0\n"), Err(ConfigError::Value(_))));
        assert!(matches!(Config::from_toml("[analysis]\nmaxdeg = 3\n"), Err(ConfigError::Value(_))));
    }

    #[test]
    fn hash_depends_on_values_only() {
        let a = Config::from_toml("[conservation]\nseed = 7\n").unwrap();
        let b = Config::from_toml("# same thing\n[conservation]\nseed   =   7\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash(), Config::default().hash());
        assert_eq!(a.hash().len(), 64);
        let c = Config::from_toml("[conservation]\nseed = 8\n").unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
