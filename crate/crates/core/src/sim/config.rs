//! Scenario configuration: TOML key-value file with nested sections.
//! Flags override config keys; config keys override the built-in defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::SchedulerKind;
use crate::error::{Error, Result};
use crate::fitness::SchedulerWeights;
use crate::ga::GaConfig;
use crate::model::{McsTable, UePopulation, UeProfile, DEFAULT_DEMAND_JITTER};

/// Bandwidth presets; a label that scales the RB count (5 MHz -> 25 RBs,
/// 10 MHz -> 50 RBs). An explicit `rbs` key wins over the label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bandwidth {
    #[serde(rename = "5MHz")]
    Mhz5,
    #[serde(rename = "10MHz")]
    Mhz10,
}

impl Bandwidth {
    pub fn resource_blocks(&self) -> usize {
        match self {
            Bandwidth::Mhz5 => 25,
            Bandwidth::Mhz10 => 50,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Per-TTI record CSV.
    pub csv: Option<PathBuf>,
    /// Human-readable summary document.
    pub summary: Option<PathBuf>,
    /// Demand database export (one demand vector per line).
    pub demand_db: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Number of UEs (M).
    pub ues: usize,
    /// Number of resource blocks (N); defaults from `bandwidth`.
    pub rbs: Option<usize>,
    pub bandwidth: Bandwidth,
    pub ttis: usize,
    /// Speed applied to every UE, km/h.
    pub speed_kmh: f64,
    /// Fraction of UEs that are GBR; the first round(fraction * M) UEs.
    pub gbr_fraction: f64,
    /// Demand of every GBR UE in bits/s, unless `gbr_demands` is given.
    pub gbr_demand_bps: f64,
    /// Optional per-GBR-UE demand levels, cycled over the GBR UEs.
    pub gbr_demands: Option<Vec<f64>>,
    /// Multiplicative jitter range applied to GBR demands each TTI.
    pub demand_jitter: (f64, f64),
    /// Repeat demand seeds with this period (0 = fresh seed every TTI).
    pub demand_cycle: usize,
    pub scheduler: SchedulerKind,
    pub ga: GaConfig,
    /// Number of demand clusters (K).
    pub clusters: usize,
    /// Recluster/retrain every this many TTIs once bootstrapped.
    pub recluster_period: usize,
    pub db_capacity: usize,
    pub pf_time_constant: f64,
    /// Master seeds; `simulate` uses the first, comparison ops aggregate
    /// over all of them.
    pub seeds: Vec<u64>,
    /// When set, weight adaptation is overridden with these (w1, w2).
    pub fixed_weights: Option<(f64, f64)>,
    /// Custom CQI-to-rate table; the bundled 15-level table otherwise.
    pub mcs_table: Option<PathBuf>,
    pub output: OutputConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            ues: 25,
            rbs: None,
            bandwidth: Bandwidth::Mhz5,
            ttis: 20,
            speed_kmh: 5.0,
            gbr_fraction: 0.0,
            gbr_demand_bps: 250_000.0,
            gbr_demands: None,
            demand_jitter: DEFAULT_DEMAND_JITTER,
            demand_cycle: 0,
            scheduler: SchedulerKind::GaAdaptive,
            ga: GaConfig::default(),
            clusters: 3,
            recluster_period: 10,
            db_capacity: 1000,
            pf_time_constant: 10.0,
            seeds: vec![1],
            fixed_weights: None,
            mcs_table: None,
            output: OutputConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| {
            Error::Config(format!(
                "cannot read config {}: {e}",
                path.as_ref().display()
            ))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ues == 0 {
            return Err(Error::Config("ues must be >= 1".into()));
        }
        if self.ttis == 0 {
            return Err(Error::Config("ttis must be >= 1".into()));
        }
        if let Some(rbs) = self.rbs {
            if rbs == 0 {
                return Err(Error::Config("rbs must be >= 1".into()));
            }
        }
        if !(0.0..=1.0).contains(&self.gbr_fraction) {
            return Err(Error::Config("gbr_fraction must lie in [0, 1]".into()));
        }
        if !(self.speed_kmh.is_finite() && self.speed_kmh >= 0.0) {
            return Err(Error::Config("speed_kmh must be >= 0".into()));
        }
        if !(self.gbr_demand_bps.is_finite() && self.gbr_demand_bps > 0.0) {
            return Err(Error::Config("gbr_demand_bps must be > 0".into()));
        }
        if let Some(levels) = &self.gbr_demands {
            if levels.is_empty() || levels.iter().any(|&d| !(d.is_finite() && d > 0.0)) {
                return Err(Error::Config("gbr_demands entries must be > 0".into()));
            }
        }
        if !(self.demand_jitter.0 > 0.0 && self.demand_jitter.0 <= self.demand_jitter.1) {
            return Err(Error::Config(
                "demand_jitter must satisfy 0 < lo <= hi".into(),
            ));
        }
        if self.clusters == 0 {
            return Err(Error::Config("clusters must be >= 1".into()));
        }
        if self.recluster_period == 0 {
            return Err(Error::Config("recluster_period must be >= 1".into()));
        }
        if self.db_capacity == 0 {
            return Err(Error::Config("db_capacity must be >= 1".into()));
        }
        if !(self.pf_time_constant.is_finite() && self.pf_time_constant >= 1.0) {
            return Err(Error::Config("pf_time_constant must be >= 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if let Some((w1, w2)) = self.fixed_weights {
            SchedulerWeights::new(w1, w2)
                .map_err(|e| Error::Config(format!("fixed_weights: {e}")))?;
        }
        self.ga.validate()
    }

    /// RB count after resolving the bandwidth label.
    pub fn effective_rbs(&self) -> usize {
        self.rbs.unwrap_or_else(|| self.bandwidth.resource_blocks())
    }

    /// Number of GBR UEs: round(gbr_fraction * M), clamped to M.
    pub fn gbr_count(&self) -> usize {
        ((self.gbr_fraction * self.ues as f64).round() as usize).min(self.ues)
    }

    /// Build the fixed UE population: the first `gbr_count` UEs carry GBR
    /// demands (cycling over `gbr_demands` when given), all at the
    /// scenario speed.
    pub fn build_population(&self) -> Result<UePopulation> {
        let gbr = self.gbr_count();
        let profiles = (0..self.ues)
            .map(|m| {
                let demand = if m < gbr {
                    Some(match &self.gbr_demands {
                        Some(levels) => levels[m % levels.len()],
                        None => self.gbr_demand_bps,
                    })
                } else {
                    None
                };
                UeProfile {
                    gbr_demand_bps: demand,
                    speed_kmh: self.speed_kmh,
                }
            })
            .collect();
        UePopulation::new(profiles)
    }

    /// Resolve the CQI-to-rate table (custom file or the bundled default).
    pub fn load_mcs_table(&self) -> Result<McsTable> {
        match &self.mcs_table {
            Some(path) => McsTable::from_path(path),
            None => Ok(McsTable::default_table()),
        }
    }

    /// TOML echo used in summary documents.
    pub fn echo(&self) -> String {
        toml::to_string(self).unwrap_or_else(|e| format!("# config echo failed: {e}"))
    }
}
