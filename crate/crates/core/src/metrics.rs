//! Evaluation metrics: Jain's fairness index, GBR satisfaction ratio, and
//! run-level throughput statistics.

use crate::baselines::SchedulerKind;
use crate::error::{Error, Result};
use crate::fitness::SchedulerWeights;

/// Everything recorded about one TTI of one run.
#[derive(Debug, Clone)]
pub struct TtiRecord {
    pub tti: usize,
    pub scheduler: SchedulerKind,
    pub weights: SchedulerWeights,
    /// Achieved bits/TTI per UE.
    pub per_ue_bits: Vec<f64>,
    /// Demand cluster the TTI classified to, once the ML loop is live.
    pub cluster: Option<usize>,
    /// GA generations consumed (GA runs only).
    pub generations_used: Option<usize>,
    /// Best combined fitness (GA runs only).
    pub combined_fitness: Option<f64>,
}

/// Jain's index: (sum r)^2 / (M * sum r^2); 1 at perfect equality.
pub fn jain_index(rates: &[f64]) -> Result<f64> {
    if rates.is_empty() {
        return Err(Error::UndefinedMetric(
            "Jain index of an empty rate vector".into(),
        ));
    }
    let sum: f64 = rates.iter().sum();
    let sum_sq: f64 = rates.iter().map(|r| r * r).sum();
    if sum_sq == 0.0 {
        return Err(Error::UndefinedMetric(
            "Jain index of all-zero rates".into(),
        ));
    }
    Ok(sum * sum / (rates.len() as f64 * sum_sq))
}

/// Mean over GBR users of min(1, achieved / demanded); rates and demands
/// must share a unit.
pub fn satisfaction(rates: &[f64], demands: &[f64], gbr_mask: &[bool]) -> Result<f64> {
    assert!(
        rates.len() == demands.len() && demands.len() == gbr_mask.len(),
        "per-UE inputs must align"
    );
    let gbr: Vec<usize> = gbr_mask
        .iter()
        .enumerate()
        .filter(|(_, &g)| g)
        .map(|(m, _)| m)
        .collect();
    if gbr.is_empty() {
        return Err(Error::UndefinedMetric(
            "satisfaction with no GBR users".into(),
        ));
    }
    let total: f64 = gbr
        .iter()
        .map(|&m| {
            if demands[m] <= 0.0 {
                1.0
            } else {
                (rates[m] / demands[m]).min(1.0)
            }
        })
        .sum();
    Ok(total / gbr.len() as f64)
}

/// Run-level throughput statistics over per-UE mean throughput.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputStats {
    pub peak: f64,
    pub average: f64,
    /// Cell-edge: 5th percentile across UEs, linearly interpolated.
    pub edge: f64,
}

/// Percentile with linear interpolation between order statistics;
/// `fraction` in [0, 1].
pub fn percentile(values: &[f64], fraction: f64) -> f64 {
    assert!(!values.is_empty(), "percentile of an empty set");
    assert!((0.0..=1.0).contains(&fraction), "fraction in [0, 1]");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = fraction * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let t = rank - lo as f64;
        sorted[lo] * (1.0 - t) + sorted[hi] * t
    }
}

/// Peak / average / cell-edge of per-UE mean throughput across a run.
pub fn throughput_stats(records: &[TtiRecord]) -> Result<ThroughputStats> {
    if records.is_empty() {
        return Err(Error::InvalidInput(
            "throughput stats of an empty run".into(),
        ));
    }
    let ues = records[0].per_ue_bits.len();
    let mut means = vec![0.0; ues];
    for r in records {
        assert_eq!(r.per_ue_bits.len(), ues, "UE count fixed for a run");
        for (m, &b) in means.iter_mut().zip(&r.per_ue_bits) {
            *m += b;
        }
    }
    for m in means.iter_mut() {
        *m /= records.len() as f64;
    }
    let peak = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let average = means.iter().sum::<f64>() / ues as f64;
    let edge = percentile(&means, 0.05);
    Ok(ThroughputStats {
        peak,
        average,
        edge,
    })
}
