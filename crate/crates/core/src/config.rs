//! Campaign configuration files.
//!
//! A config file is a flat TOML document whose keys mirror the campaign
//! fields. Every key is optional; missing keys fall back to the evaluation
//! defaults, and command-line overrides win over the file:
//!
//! ```toml
//! policy = "wmm"            # wmm | pf | esrm
//! pattern_mode = "multi"    # single | multi
//! stations = [4, 8, 12]     # or a single integer
//! r_min = 20000             # bits per scheduling period
//! periods = 1000
//! networks = 100
//! seed = 1
//! v = 900
//! v_esr = 10
//! beta = 0.01
//! ema_floor = 1
//! gamma_units = "rate_normalized"   # or "dimensionless"
//! carrier_freq_ghz = 5
//! d_max_m = 15
//! d_min_m = 1
//! p_total_dbm = 20
//! t_ofdm_us = 16
//! t_dl_ms = 3.2
//! single_pattern = [9, 24]
//! multi_patterns = [[9, 24], [4, 48], [2, 102]]
//! workers = 4
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::domain::{default_multi_patterns, RuPattern};
use crate::error::{Error, Result};
use crate::policies::{GammaUnits, PolicyKind};
use crate::sim::{CampaignConfig, PatternMode};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum StationCounts {
    One(usize),
    Many(Vec<usize>),
}

impl StationCounts {
    fn into_vec(self) -> Vec<usize> {
        match self {
            StationCounts::One(k) => vec![k],
            StationCounts::Many(v) => v,
        }
    }
}

/// Every settable campaign field. Used both for the file and for flag
/// overrides.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub policy: Option<String>,
    pub pattern_mode: Option<String>,
    pub stations: Option<StationCounts>,
    pub r_min: Option<f64>,
    pub periods: Option<i64>,
    pub networks: Option<i64>,
    pub seed: Option<u64>,
    pub v: Option<f64>,
    pub v_esr: Option<f64>,
    pub beta: Option<f64>,
    pub ema_floor: Option<f64>,
    pub gamma_units: Option<GammaUnits>,
    pub carrier_freq_ghz: Option<f64>,
    pub d_max_m: Option<f64>,
    pub d_min_m: Option<f64>,
    pub p_total_dbm: Option<f64>,
    pub t_ofdm_us: Option<f64>,
    pub t_dl_ms: Option<f64>,
    pub single_pattern: Option<(usize, usize)>,
    pub multi_patterns: Option<Vec<(usize, usize)>>,
    pub workers: Option<usize>,
}

macro_rules! take {
    ($dst:ident, $src:ident, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl ConfigOverrides {
    /// Fields set in `other` replace fields set in `self`.
    pub fn merged_with(mut self, other: &ConfigOverrides) -> Self {
        take!(
            self, other, policy, pattern_mode, stations, r_min, periods, networks, seed, v, v_esr,
            beta, ema_floor, gamma_units, carrier_freq_ghz, d_max_m, d_min_m, p_total_dbm,
            t_ofdm_us, t_dl_ms, single_pattern, multi_patterns, workers
        );
        self
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let field = e
                .message()
                .split('`')
                .nth(1)
                .unwrap_or("config")
                .to_string();
            Error::config(field, e.to_string())
        })
    }

    /// Resolves against the defaults and validates the result.
    pub fn resolve(&self) -> Result<CampaignConfig> {
        let policy: PolicyKind = match &self.policy {
            Some(p) => p.parse()?,
            None => PolicyKind::Wmm,
        };
        let mode: PatternMode = match &self.pattern_mode {
            Some(m) => m.parse()?,
            None => PatternMode::Single,
        };
        let mut cfg = CampaignConfig::defaults(policy, mode);

        cfg.sim.patterns = match mode {
            PatternMode::Single => vec![self
                .single_pattern
                .map_or(RuPattern::RU26, |(n, s)| RuPattern::new(n, s))],
            PatternMode::Multi => self.multi_patterns.as_ref().map_or_else(default_multi_patterns, |v| {
                v.iter().map(|&(n, s)| RuPattern::new(n, s)).collect()
            }),
        };
        if let Some(s) = &self.stations {
            cfg.stations = s.clone().into_vec();
        }
        if let Some(x) = self.r_min {
            cfg.r_min = x;
        }
        if let Some(x) = self.periods {
            cfg.periods = u64::try_from(x).map_err(|_| Error::config("periods", "must be positive"))?;
        }
        if let Some(x) = self.networks {
            cfg.networks = u64::try_from(x).map_err(|_| Error::config("networks", "must be positive"))?;
        }
        if let Some(x) = self.seed {
            cfg.sim.master_seed = x;
        }
        let p = &mut cfg.policy_params;
        if let Some(x) = self.v {
            p.v_wmm = x;
        }
        if let Some(x) = self.v_esr {
            p.v_esr = x;
        }
        if let Some(x) = self.beta {
            p.beta = x;
        }
        if let Some(x) = self.ema_floor {
            p.ema_floor = x;
        }
        if let Some(x) = self.gamma_units {
            p.gamma_units = x;
        }
        let s = &mut cfg.sim;
        if let Some(x) = self.carrier_freq_ghz {
            s.carrier_freq_ghz = x;
        }
        if let Some(x) = self.d_max_m {
            s.d_max_m = x;
        }
        if let Some(x) = self.d_min_m {
            s.d_min_m = x;
        }
        if let Some(x) = self.p_total_dbm {
            s.p_total_dbm = x;
        }
        if let Some(x) = self.t_ofdm_us {
            s.t_ofdm_us = x;
        }
        if let Some(x) = self.t_dl_ms {
            s.t_dl_ms = x;
        }
        cfg.workers = self.workers;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Loads `path` (if any), applies `flags` on top and resolves defaults.
pub fn parse_config(path: Option<&Path>, flags: &ConfigOverrides) -> Result<CampaignConfig> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })?;
            ConfigOverrides::from_toml(&text)?
        }
        None => ConfigOverrides::default(),
    };
    file.merged_with(flags).resolve()
}
