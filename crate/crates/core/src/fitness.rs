//! Objective functions of the allocator: per-RB rate maximization, GBR
//! shortfall, and the weighted combination the GA maximizes.
//!
//! The shortfall term is clamped at zero (a GBR user served beyond its
//! demand contributes nothing), and both raw terms are normalized by
//! per-TTI upper bounds before weighting so the weights act on
//! commensurate quantities.

use crate::error::{Error, Result};
use crate::model::{CqiMatrix, DemandVector, EfficiencyMatrix, McsTable};

/// Chromosome of the GA: `genes[n]` is the UE index holding resource
/// block n, so each RB belongs to exactly one user by construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AllocationPattern {
    genes: Vec<usize>,
}

impl AllocationPattern {
    pub fn new(genes: Vec<usize>, ues: usize) -> Result<Self> {
        if genes.is_empty() {
            return Err(Error::InvalidInput("pattern needs at least one RB".into()));
        }
        if let Some(&bad) = genes.iter().find(|&&g| g >= ues) {
            return Err(Error::InvalidInput(format!(
                "gene {bad} outside UE range [0, {ues})"
            )));
        }
        Ok(Self { genes })
    }

    pub fn genes(&self) -> &[usize] {
        &self.genes
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// Resource blocks currently assigned to `ue`.
    pub fn rbs_of(&self, ue: usize) -> impl Iterator<Item = usize> + '_ {
        self.genes
            .iter()
            .enumerate()
            .filter(move |(_, &g)| g == ue)
            .map(|(n, _)| n)
    }

    pub(crate) fn from_genes_unchecked(genes: Vec<usize>) -> Self {
        Self { genes }
    }
}

/// Objective weights (w1, w2) with w1 + w2 = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulerWeights {
    w1: f64,
    w2: f64,
}

impl SchedulerWeights {
    pub fn new(w1: f64, w2: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) || !(0.0..=1.0).contains(&w2) {
            return Err(Error::InvalidInput(format!(
                "weights must lie in [0, 1], got ({w1}, {w2})"
            )));
        }
        if (w1 + w2 - 1.0).abs() > f64::EPSILON {
            return Err(Error::InvalidInput(format!(
                "weights must sum to 1, got {w1} + {w2}"
            )));
        }
        Ok(Self { w1, w2 })
    }

    /// Weights from the throughput weight alone: w2 = 1 - w1.
    pub fn from_w1(w1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w1) {
            return Err(Error::InvalidInput(format!(
                "w1 must lie in [0, 1], got {w1}"
            )));
        }
        Ok(Self { w1, w2: 1.0 - w1 })
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn w2(&self) -> f64 {
        self.w2
    }
}

/// Full evaluation of one pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessBreakdown {
    /// Sum of per-RB efficiencies, bits/TTI.
    pub f1_raw: f64,
    pub f1_norm: f64,
    /// Total GBR shortfall, bits/TTI; lower is better.
    pub f2_raw: f64,
    pub f2_norm: f64,
    /// w1 * f1_norm - w2 * f2_norm, in [-1, 1].
    pub combined: f64,
    /// Achieved bits/TTI per UE under the same-MCS constraint.
    pub per_ue_rate: Vec<f64>,
}

/// Everything needed to evaluate patterns for one TTI, computed once and
/// shared by all evaluations (the efficiency grid and both normalizers).
#[derive(Debug)]
pub struct FitnessContext<'a> {
    cqi: &'a CqiMatrix,
    table: &'a McsTable,
    demands: &'a DemandVector,
    efficiency: EfficiencyMatrix,
    f1_upper: f64,
    f2_upper: f64,
}

impl<'a> FitnessContext<'a> {
    pub fn new(cqi: &'a CqiMatrix, table: &'a McsTable, demands: &'a DemandVector) -> Result<Self> {
        if demands.len() != cqi.ues() {
            return Err(Error::DimensionMismatch(format!(
                "{} demands for {} UEs",
                demands.len(),
                cqi.ues()
            )));
        }
        let efficiency = crate::model::build_efficiency_matrix(cqi, table)?;
        let (f1_upper, f2_upper) = normalizers(&efficiency, demands)?;
        Ok(Self {
            cqi,
            table,
            demands,
            efficiency,
            f1_upper,
            f2_upper,
        })
    }

    pub fn ues(&self) -> usize {
        self.cqi.ues()
    }

    pub fn rbs(&self) -> usize {
        self.cqi.rbs()
    }

    pub fn cqi(&self) -> &CqiMatrix {
        self.cqi
    }

    pub fn table(&self) -> &McsTable {
        self.table
    }

    pub fn demands(&self) -> &DemandVector {
        self.demands
    }

    pub fn efficiency(&self) -> &EfficiencyMatrix {
        &self.efficiency
    }

    pub fn f1_upper(&self) -> f64 {
        self.f1_upper
    }

    pub fn f2_upper(&self) -> f64 {
        self.f2_upper
    }
}

/// Achieved bits/TTI of one UE under the same-MCS constraint: every RB of
/// a user carries the MCS its worst assigned RB supports.
pub fn user_rate(pattern: &AllocationPattern, ue: usize, cqi: &CqiMatrix, table: &McsTable) -> f64 {
    let mut count = 0usize;
    let mut min_cqi = u8::MAX;
    for n in pattern.rbs_of(ue) {
        count += 1;
        min_cqi = min_cqi.min(cqi.get(ue, n));
    }
    if count == 0 {
        return 0.0;
    }
    let mcs = table
        .mcs_for_cqi(min_cqi)
        .expect("CQI validated against table range");
    count as f64 * table.rate(mcs)
}

/// Achieved bits/TTI for every UE; entry m is [`user_rate`] of UE m.
pub fn per_ue_rates(pattern: &AllocationPattern, cqi: &CqiMatrix, table: &McsTable) -> Vec<f64> {
    // Single pass: per-UE RB count and worst CQI.
    let ues = cqi.ues();
    let mut counts = vec![0usize; ues];
    let mut worst = vec![u8::MAX; ues];
    for (n, &m) in pattern.genes().iter().enumerate() {
        counts[m] += 1;
        worst[m] = worst[m].min(cqi.get(m, n));
    }
    (0..ues)
        .map(|m| {
            if counts[m] == 0 {
                0.0
            } else {
                let mcs = table
                    .mcs_for_cqi(worst[m])
                    .expect("CQI validated against table range");
                counts[m] as f64 * table.rate(mcs)
            }
        })
        .collect()
}

/// Rate-maximization objective: sum over RBs of the owner's efficiency.
pub fn fitness_f1(pattern: &AllocationPattern, efficiency: &EfficiencyMatrix) -> f64 {
    pattern
        .genes()
        .iter()
        .enumerate()
        .map(|(n, &m)| efficiency.get(m, n))
        .sum()
}

/// GBR objective: total clamped shortfall against per-TTI demands.
pub fn fitness_f2(
    pattern: &AllocationPattern,
    demands: &DemandVector,
    cqi: &CqiMatrix,
    table: &McsTable,
) -> f64 {
    let rates = per_ue_rates(pattern, cqi, table);
    shortfall_from_rates(&rates, demands)
}

fn shortfall_from_rates(rates: &[f64], demands: &DemandVector) -> f64 {
    demands
        .gbr_mask()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g)
        .map(|(m, _)| (demands.bits_per_tti(m) - rates[m]).max(0.0))
        .sum()
}

/// Per-TTI upper bounds used to normalize the two objectives:
/// the per-RB greedy bound on f1 and the total possible shortfall on f2.
pub fn normalizers(efficiency: &EfficiencyMatrix, demands: &DemandVector) -> Result<(f64, f64)> {
    let f1_upper: f64 = (0..efficiency.rbs())
        .map(|n| {
            (0..efficiency.ues())
                .map(|m| efficiency.get(m, n))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    let f2_upper: f64 = demands
        .gbr_mask()
        .iter()
        .enumerate()
        .filter(|(_, &g)| g)
        .map(|(m, _)| demands.bits_per_tti(m))
        .sum();
    if f1_upper <= 0.0 && f2_upper <= 0.0 {
        return Err(Error::DegenerateScenario(
            "zero efficiency everywhere and no GBR demand: nothing to optimize".into(),
        ));
    }
    Ok((f1_upper, f2_upper))
}

/// Evaluate one pattern under the weighted objective.
pub fn combined_fitness(
    pattern: &AllocationPattern,
    weights: SchedulerWeights,
    ctx: &FitnessContext,
) -> FitnessBreakdown {
    debug_assert_eq!(pattern.len(), ctx.rbs());
    let per_ue_rate = per_ue_rates(pattern, ctx.cqi, ctx.table);
    let f1_raw = fitness_f1(pattern, &ctx.efficiency);
    let f2_raw = shortfall_from_rates(&per_ue_rate, ctx.demands);
    let f1_norm = if ctx.f1_upper > 0.0 {
        f1_raw / ctx.f1_upper
    } else {
        0.0
    };
    let f2_norm = if ctx.f2_upper > 0.0 {
        f2_raw / ctx.f2_upper
    } else {
        0.0
    };
    let combined = weights.w1() * f1_norm - weights.w2() * f2_norm;
    FitnessBreakdown {
        f1_raw,
        f1_norm,
        f2_raw,
        f2_norm,
        combined,
        per_ue_rate,
    }
}
