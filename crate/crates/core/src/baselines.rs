//! Reference schedulers: Maximum Throughput and Proportional Fair.
//!
//! Both pick per-RB winners on per-RB metrics (ignoring the same-MCS
//! coupling); achieved throughput is always computed through
//! [`crate::fitness::user_rate`] with the constraint, same as the GA.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::AllocationPattern;
use crate::model::EfficiencyMatrix;

/// Average-throughput floor that keeps the PF ratio finite for
/// never-served users.
pub const PF_AVERAGE_FLOOR: f64 = 1.0;

/// Scheduler selection exposed through the harness config.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    GaAdaptive,
    MaxTp,
    Pf,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 3] = [
        SchedulerKind::GaAdaptive,
        SchedulerKind::MaxTp,
        SchedulerKind::Pf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::GaAdaptive => "ga_adaptive",
            SchedulerKind::MaxTp => "max_tp",
            SchedulerKind::Pf => "pf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ga_adaptive" => Ok(SchedulerKind::GaAdaptive),
            "max_tp" => Ok(SchedulerKind::MaxTp),
            "pf" => Ok(SchedulerKind::Pf),
            other => Err(Error::Config(format!(
                "unknown scheduler '{other}' (expected ga_adaptive, max_tp, pf)"
            ))),
        }
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Exponentially averaged per-UE throughput driving the PF metric.
#[derive(Debug, Clone)]
pub struct PfState {
    averages: Vec<f64>,
    time_constant: f64,
}

impl PfState {
    pub fn new(ues: usize, time_constant: f64) -> Result<Self> {
        if ues == 0 {
            return Err(Error::InvalidInput("PF state needs at least one UE".into()));
        }
        if !(time_constant.is_finite() && time_constant >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "PF time constant must be >= 1 TTI, got {time_constant}"
            )));
        }
        Ok(Self {
            averages: vec![PF_AVERAGE_FLOOR; ues],
            time_constant,
        })
    }

    pub fn averages(&self) -> &[f64] {
        &self.averages
    }
}

/// Column-wise argmax of the efficiency grid; the exact maximizer of the
/// rate objective absent MCS coupling. Ties go to the lower UE index.
pub fn max_tp_schedule(efficiency: &EfficiencyMatrix) -> AllocationPattern {
    let genes = (0..efficiency.rbs())
        .map(|n| {
            let mut best = 0usize;
            for m in 1..efficiency.ues() {
                if efficiency.get(m, n) > efficiency.get(best, n) {
                    best = m;
                }
            }
            best
        })
        .collect();
    AllocationPattern::from_genes_unchecked(genes)
}

/// Per-RB winner of instantaneous rate over averaged rate.
pub fn pf_schedule(efficiency: &EfficiencyMatrix, state: &PfState) -> AllocationPattern {
    assert_eq!(
        state.averages.len(),
        efficiency.ues(),
        "PF state sized for the grid"
    );
    let genes = (0..efficiency.rbs())
        .map(|n| {
            let mut best = 0usize;
            let mut best_metric = efficiency.get(0, n) / state.averages[0];
            for m in 1..efficiency.ues() {
                let metric = efficiency.get(m, n) / state.averages[m];
                if metric > best_metric {
                    best_metric = metric;
                    best = m;
                }
            }
            best
        })
        .collect();
    AllocationPattern::from_genes_unchecked(genes)
}

/// Fold one TTI of achieved throughput into the exponential averages.
pub fn pf_update(state: &mut PfState, achieved: &[f64]) {
    assert_eq!(achieved.len(), state.averages.len(), "one rate per UE");
    let alpha = 1.0 / state.time_constant;
    for (avg, &r) in state.averages.iter_mut().zip(achieved) {
        *avg = ((1.0 - alpha) * *avg + alpha * r).max(PF_AVERAGE_FLOOR);
    }
}
