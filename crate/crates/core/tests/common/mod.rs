//! Shared oracles for the integration suites: exhaustive enumeration over
//! the pattern space, independent of the GA and of the per-RB argmax
//! schedulers they check.

#![allow(dead_code)]

use ofdma_sched::fitness::{combined_fitness, AllocationPattern, FitnessContext, SchedulerWeights};
use ofdma_sched::model::{init_cqi, CqiMatrix, DemandVector, EfficiencyMatrix, McsTable};
use ofdma_sched::rng::{derive_seed, rng_from_seed};
use rand::Rng;

/// Visit every pattern of the M^N space in odometer order.
pub fn for_each_pattern<F: FnMut(&AllocationPattern)>(ues: usize, rbs: usize, mut f: F) {
    let mut genes = vec![0usize; rbs];
    loop {
        f(&AllocationPattern::new(genes.clone(), ues).unwrap());
        let mut i = 0;
        loop {
            if i == rbs {
                return;
            }
            genes[i] += 1;
            if genes[i] < ues {
                break;
            }
            genes[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive maximizer of the combined objective.
pub fn brute_force_best(
    ctx: &FitnessContext,
    weights: SchedulerWeights,
) -> (AllocationPattern, f64) {
    let mut best: Option<(AllocationPattern, f64)> = None;
    for_each_pattern(ctx.ues(), ctx.rbs(), |p| {
        let v = combined_fitness(p, weights, ctx).combined;
        if best.as_ref().map(|(_, bv)| v > *bv).unwrap_or(true) {
            best = Some((p.clone(), v));
        }
    });
    best.unwrap()
}

/// Exhaustive maximizer of the raw rate objective (sum of owner
/// efficiencies), computed without touching the scheduler under test.
pub fn brute_force_f1_max(c: &EfficiencyMatrix) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for_each_pattern(c.ues(), c.rbs(), |p| {
        let v: f64 = p
            .genes()
            .iter()
            .enumerate()
            .map(|(n, &m)| c.get(m, n))
            .sum();
        if v > best {
            best = v;
        }
    });
    best
}

/// A random tiny instance: seeded CQI plus a demand vector whose first
/// `gbr_count` UEs carry demands in a band the grid can partially serve.
pub fn random_instance(
    ues: usize,
    rbs: usize,
    gbr_count: usize,
    seed: u64,
) -> (CqiMatrix, DemandVector) {
    let cqi = init_cqi(ues, rbs, 15, derive_seed(seed, 100)).unwrap();
    let mut rng = rng_from_seed(derive_seed(seed, 101));
    let values: Vec<f64> = (0..ues)
        .map(|m| {
            if m < gbr_count {
                rng.random_range(1e5..1.5e6)
            } else {
                0.0
            }
        })
        .collect();
    let mask: Vec<bool> = (0..ues).map(|m| m < gbr_count).collect();
    (cqi, DemandVector::new(values, mask).unwrap())
}

pub fn default_table() -> McsTable {
    McsTable::default_table()
}

pub fn median_usize(values: &[usize]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}

pub fn median_f64(values: &[f64]) -> f64 {
    assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}
