//! JSON configuration files mapped onto system parameters.
//!
//! Every key is optional. The defaults reproduce the reference operating
//! point (20% detector efficiency, 0.2 dB/km fiber, 1.2e-8 dark counts,
//! f = 1.15, a pairing interval of one million time bins) with 4%
//! misalignment and the block-size search capped at 3.

use std::path::Path;

use serde::Deserialize;

use mpqkd::{EzzModel, SystemParams};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "defaults::eta_d")]
    pub eta_d: f64,
    #[serde(default = "defaults::alpha_db_per_km")]
    pub alpha_db_per_km: f64,
    #[serde(default = "defaults::dark_count")]
    pub dark_count: f64,
    #[serde(default = "defaults::error_correction_f")]
    pub error_correction_f: f64,
    #[serde(default = "defaults::pairing_interval")]
    pub pairing_interval: u64,
    #[serde(default = "defaults::misalignment")]
    pub misalignment: f64,
    #[serde(default = "defaults::vacuum_error")]
    pub vacuum_error: f64,
    #[serde(default)]
    pub e_zz_model: EzzChoice,
    #[serde(default = "defaults::b_min")]
    pub b_min: u32,
    #[serde(default = "defaults::b_max")]
    pub b_max: u32,
    /// Fixed intensity. Absent or `null` means optimize per point.
    #[serde(default)]
    pub mu: Option<f64>,
}

mod defaults {
    pub fn eta_d() -> f64 {
        0.2
    }
    pub fn alpha_db_per_km() -> f64 {
        0.2
    }
    pub fn dark_count() -> f64 {
        1.2e-8
    }
    pub fn error_correction_f() -> f64 {
        1.15
    }
    pub fn pairing_interval() -> u64 {
        1_000_000
    }
    pub fn misalignment() -> f64 {
        0.04
    }
    pub fn vacuum_error() -> f64 {
        0.5
    }
    pub fn b_min() -> u32 {
        1
    }
    pub fn b_max() -> u32 {
        3
    }
}

/// Z-basis single-photon error model: a named model or a pinned value.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum EzzChoice {
    Named(String),
    Pinned(f64),
}

impl Default for EzzChoice {
    fn default() -> Self {
        EzzChoice::Named("dark_count".to_owned())
    }
}

/// A validated configuration, ready to hand to the engines.
#[derive(Debug)]
pub struct Loaded {
    pub params: SystemParams,
    pub b_range: (u32, u32),
    pub mu: Option<f64>,
}

impl ConfigFile {
    /// Reads and validates a configuration file; `None` yields the defaults.
    pub fn load(path: Option<&Path>) -> Result<Loaded, String> {
        let cfg: ConfigFile = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read config {}: {e}", p.display()))?;
                serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", p.display()))?
            }
            None => serde_json::from_str("{}").expect("empty config uses defaults"),
        };
        cfg.into_loaded()
    }

    fn into_loaded(self) -> Result<Loaded, String> {
        let e_zz_model = match &self.e_zz_model {
            EzzChoice::Named(s) if s == "dark_count" => EzzModel::DarkCountSinglePhoton,
            EzzChoice::Named(s) if s == "equal_observed" => EzzModel::EqualObservedZ,
            EzzChoice::Named(s) => {
                return Err(format!(
                    "unknown e_zz_model \"{s}\" (expected \"dark_count\", \"equal_observed\", or a number)"
                ))
            }
            EzzChoice::Pinned(v) => EzzModel::Fixed(*v),
        };
        let params = SystemParams {
            eta_d: self.eta_d,
            alpha: self.alpha_db_per_km,
            p_d: self.dark_count,
            f: self.error_correction_f,
            delta: self.pairing_interval,
            e_d: self.misalignment,
            e_0: self.vacuum_error,
            e_zz_model,
        }
        .validated()
        .map_err(|e| format!("config: {e}"))?;
        if self.b_min < 1 || self.b_min > self.b_max {
            return Err(format!(
                "config: b_min..b_max = {}..{} is not a valid block-size range",
                self.b_min, self.b_max
            ));
        }
        if let Some(mu) = self.mu {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(format!("config: mu = {mu} must be a positive finite intensity"));
            }
        }
        Ok(Loaded {
            params,
            b_range: (self.b_min, self.b_max),
            mu: self.mu,
        })
    }
}
