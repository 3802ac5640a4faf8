//! Radio-resource abstractions: per-(UE, RB) channel quality, the
//! CQI-to-rate table, the synthetic channel walk, and synthetic traffic
//! demand generation.

use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

/// One scheduling tick lasts 1 ms; converts bits/s demands to bits/TTI.
pub const TTI_SECONDS: f64 = 1e-3;

/// Speed at which every CQI entry is re-drawn each TTI (step probability 1).
pub const REFERENCE_SPEED_KMH: f64 = 200.0;

/// Multiplicative jitter applied to GBR demands each TTI.
pub const DEFAULT_DEMAND_JITTER: (f64, f64) = (0.9, 1.1);

/// Per-(UE, RB) channel quality indices, each in `[1, levels]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CqiMatrix {
    ues: usize,
    rbs: usize,
    levels: u8,
    values: Vec<u8>,
}

impl CqiMatrix {
    pub fn new(ues: usize, rbs: usize, levels: u8, values: Vec<u8>) -> Result<Self> {
        if ues == 0 || rbs == 0 || levels == 0 {
            return Err(Error::InvalidInput(format!(
                "CQI matrix needs ues >= 1, rbs >= 1, levels >= 1 (got {ues}x{rbs}, {levels} levels)"
            )));
        }
        if values.len() != ues * rbs {
            return Err(Error::DimensionMismatch(format!(
                "CQI matrix expects {} entries, got {}",
                ues * rbs,
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|&&v| v < 1 || v > levels) {
            return Err(Error::InvalidInput(format!(
                "CQI entry {bad} outside [1, {levels}]"
            )));
        }
        Ok(Self {
            ues,
            rbs,
            levels,
            values,
        })
    }

    pub fn ues(&self) -> usize {
        self.ues
    }

    pub fn rbs(&self) -> usize {
        self.rbs
    }

    pub fn levels(&self) -> u8 {
        self.levels
    }

    /// CQI of UE `ue` on resource block `rb`.
    pub fn get(&self, ue: usize, rb: usize) -> u8 {
        self.values[ue * self.rbs + rb]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Per-RB achievable rates derived from a [`CqiMatrix`] and an [`McsTable`];
/// row m is the efficiency of UE m over all resource blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMatrix {
    ues: usize,
    rbs: usize,
    values: Vec<f64>,
}

impl EfficiencyMatrix {
    pub fn ues(&self) -> usize {
        self.ues
    }

    pub fn rbs(&self) -> usize {
        self.rbs
    }

    pub fn get(&self, ue: usize, rb: usize) -> f64 {
        self.values[ue * self.rbs + rb]
    }

    /// Test/experiment constructor for hand-built grids.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::InvalidInput(
                "efficiency grid must be non-empty".into(),
            ));
        }
        let rbs = rows[0].len();
        if rows.iter().any(|r| r.len() != rbs) {
            return Err(Error::DimensionMismatch("ragged efficiency grid".into()));
        }
        Ok(Self {
            ues: rows.len(),
            rbs,
            values: rows.iter().flatten().copied().collect(),
        })
    }
}

/// One row of the CQI-to-rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct McsEntry {
    pub mcs_index: usize,
    /// Lowest CQI level at which this MCS is decodable.
    pub min_cqi: u8,
    pub rate_bits_per_rb_per_tti: f64,
}

/// Rate table mapping CQI levels to MCS indices and per-RB rates.
///
/// The table is data, not code: the default ships as a CSV in `data/` and
/// custom tables load through [`McsTable::from_path`].
#[derive(Debug, Clone, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
    /// cqi_to_mcs[c - 1] = highest MCS index decodable at CQI level c.
    cqi_to_mcs: Vec<usize>,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("MCS table is empty".into()));
        }
        if entries[0].min_cqi != 1 {
            return Err(Error::InvalidInput(
                "lowest MCS must be decodable at CQI 1".into(),
            ));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.mcs_index != i {
                return Err(Error::InvalidInput(format!(
                    "MCS indices must be 0..n in order, found {} at row {i}",
                    e.mcs_index
                )));
            }
            if !e.rate_bits_per_rb_per_tti.is_finite() || e.rate_bits_per_rb_per_tti < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "MCS {i} has invalid rate {}",
                    e.rate_bits_per_rb_per_tti
                )));
            }
            if i > 0 {
                if e.rate_bits_per_rb_per_tti <= entries[i - 1].rate_bits_per_rb_per_tti {
                    return Err(Error::InvalidInput(
                        "rates must be strictly increasing in MCS index".into(),
                    ));
                }
                if e.min_cqi < entries[i - 1].min_cqi {
                    return Err(Error::InvalidInput(
                        "min_cqi must be monotone non-decreasing in MCS index".into(),
                    ));
                }
            }
        }
        let levels = entries.iter().map(|e| e.min_cqi).max().unwrap();
        let mut cqi_to_mcs = vec![0usize; levels as usize];
        for c in 1..=levels {
            let mcs = entries
                .iter()
                .rev()
                .find(|e| e.min_cqi <= c)
                .map(|e| e.mcs_index)
                .unwrap();
            cqi_to_mcs[c as usize - 1] = mcs;
        }
        Ok(Self {
            entries,
            cqi_to_mcs,
        })
    }

    /// Parse the CSV form: `mcs_index,min_cqi,rate_bits_per_rb_per_tti`
    /// with an optional header line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with("mcs_index") {
                continue; // header
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 3 {
                return Err(Error::InvalidInput(format!(
                    "MCS table line {}: expected 3 columns, got {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let parse_err = |what: &str| {
                Error::InvalidInput(format!("MCS table line {}: bad {what}", lineno + 1))
            };
            entries.push(McsEntry {
                mcs_index: cols[0].parse().map_err(|_| parse_err("mcs_index"))?,
                min_cqi: cols[1].parse().map_err(|_| parse_err("min_cqi"))?,
                rate_bits_per_rb_per_tti: cols[2].parse().map_err(|_| parse_err("rate"))?,
            });
        }
        Self::new(entries)
    }

    pub fn from_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The 15-level table shipped with the crate.
    pub fn default_table() -> Self {
        Self::parse(include_str!("../data/mcs_default.csv")).expect("bundled MCS table is valid")
    }

    /// Number of CQI levels this table covers (the Q of the scenario).
    pub fn cqi_levels(&self) -> u8 {
        self.cqi_to_mcs.len() as u8
    }

    /// Highest MCS index decodable at `cqi`, or `None` outside `[1, Q]`.
    pub fn mcs_for_cqi(&self, cqi: u8) -> Option<usize> {
        if cqi < 1 || cqi as usize > self.cqi_to_mcs.len() {
            return None;
        }
        Some(self.cqi_to_mcs[cqi as usize - 1])
    }

    /// Rate in bits per RB per TTI of MCS index `mcs`.
    pub fn rate(&self, mcs: usize) -> f64 {
        self.entries[mcs].rate_bits_per_rb_per_tti
    }

    pub fn max_rate(&self) -> f64 {
        self.entries.last().unwrap().rate_bits_per_rb_per_tti
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }
}

/// One user: an optional guaranteed-bit-rate demand and a speed.
#[derive(Debug, Clone, PartialEq)]
pub struct UeProfile {
    /// `Some(bits/s)` for GBR users, `None` for best-effort users.
    pub gbr_demand_bps: Option<f64>,
    pub speed_kmh: f64,
}

/// The fixed user population of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct UePopulation {
    ues: Vec<UeProfile>,
}

impl UePopulation {
    pub fn new(ues: Vec<UeProfile>) -> Result<Self> {
        if ues.is_empty() {
            return Err(Error::InvalidInput(
                "population needs at least one UE".into(),
            ));
        }
        for (m, ue) in ues.iter().enumerate() {
            if let Some(d) = ue.gbr_demand_bps {
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::InvalidInput(format!(
                        "GBR UE {m} must demand > 0 bits/s, got {d}"
                    )));
                }
            }
            if !(ue.speed_kmh.is_finite() && ue.speed_kmh >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "UE {m} has invalid speed {}",
                    ue.speed_kmh
                )));
            }
        }
        Ok(Self { ues })
    }

    pub fn count(&self) -> usize {
        self.ues.len()
    }

    pub fn gbr_count(&self) -> usize {
        self.ues
            .iter()
            .filter(|u| u.gbr_demand_bps.is_some())
            .count()
    }

    pub fn profiles(&self) -> &[UeProfile] {
        &self.ues
    }

    pub fn speeds(&self) -> Vec<f64> {
        self.ues.iter().map(|u| u.speed_kmh).collect()
    }
}

/// Per-UE requested throughput in bits/s plus the GBR mask; the feature
/// vector of the ML loop. Best-effort users carry the 0 bits/s sentinel so
/// the mask is the sole GBR signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandVector {
    values: Vec<f64>,
    gbr_mask: Vec<bool>,
}

impl DemandVector {
    pub fn new(values: Vec<f64>, gbr_mask: Vec<bool>) -> Result<Self> {
        if values.is_empty() || values.len() != gbr_mask.len() {
            return Err(Error::DimensionMismatch(format!(
                "demand vector: {} values vs {} mask entries",
                values.len(),
                gbr_mask.len()
            )));
        }
        for (m, (&v, &g)) in values.iter().zip(&gbr_mask).enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidInput(format!("UE {m} demand {v} invalid")));
            }
            if !g && v != 0.0 {
                return Err(Error::InvalidInput(format!(
                    "non-GBR UE {m} must carry the 0 bits/s sentinel, got {v}"
                )));
            }
        }
        Ok(Self { values, gbr_mask })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gbr_mask(&self) -> &[bool] {
        &self.gbr_mask
    }

    pub fn gbr_count(&self) -> usize {
        self.gbr_mask.iter().filter(|&&g| g).count()
    }

    /// Demand of UE `m` converted to bits per TTI.
    pub fn bits_per_tti(&self, m: usize) -> f64 {
        self.values[m] * TTI_SECONDS
    }
}

/// C(m, n) = r(cqi_to_mcs(j(m, n))): the rate RB n would carry if given to
/// UE m in isolation.
pub fn build_efficiency_matrix(cqi: &CqiMatrix, table: &McsTable) -> Result<EfficiencyMatrix> {
    let mut values = Vec::with_capacity(cqi.ues() * cqi.rbs());
    for m in 0..cqi.ues() {
        for n in 0..cqi.rbs() {
            let c = cqi.get(m, n);
            let mcs = table.mcs_for_cqi(c).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "CQI {c} at ({m}, {n}) outside table range [1, {}]",
                    table.cqi_levels()
                ))
            })?;
            values.push(table.rate(mcs));
        }
    }
    Ok(EfficiencyMatrix {
        ues: cqi.ues(),
        rbs: cqi.rbs(),
        values,
    })
}

/// Bootstrap channel state: entries drawn uniformly over `[1, levels]`.
pub fn init_cqi(ues: usize, rbs: usize, levels: u8, seed: u64) -> Result<CqiMatrix> {
    if ues == 0 || rbs == 0 || levels == 0 {
        return Err(Error::InvalidInput(format!(
            "init_cqi needs ues >= 1, rbs >= 1, levels >= 1 (got {ues}x{rbs}, {levels})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let values = (0..ues * rbs)
        .map(|_| rng.random_range(1..=levels))
        .collect();
    CqiMatrix::new(ues, rbs, levels, values)
}

/// Advance the channel one TTI: each entry takes a +-1 step (clamped to
/// `[1, levels]`) with probability `speed / 200 km/h`, so faster users see
/// faster channel variation.
pub fn step_cqi(cqi: &CqiMatrix, speeds: &[f64], rng: &mut SimRng) -> CqiMatrix {
    assert_eq!(speeds.len(), cqi.ues(), "one speed per UE");
    let mut values = Vec::with_capacity(cqi.ues() * cqi.rbs());
    for (m, &speed) in speeds.iter().enumerate() {
        let p = (speed / REFERENCE_SPEED_KMH).clamp(0.0, 1.0);
        for n in 0..cqi.rbs() {
            let mut v = cqi.get(m, n);
            if p > 0.0 && rng.random::<f64>() < p {
                if rng.random::<bool>() {
                    v = (v + 1).min(cqi.levels());
                } else {
                    v = (v - 1).max(1);
                }
            }
            values.push(v);
        }
    }
    CqiMatrix {
        ues: cqi.ues(),
        rbs: cqi.rbs(),
        levels: cqi.levels(),
        values,
    }
}

/// Draw one TTI of traffic: GBR users emit their configured demand jittered
/// by a seeded factor, best-effort users emit the sentinel.
pub fn generate_demands(population: &UePopulation, seed: u64) -> DemandVector {
    generate_demands_with_jitter(population, DEFAULT_DEMAND_JITTER, seed)
}

/// As [`generate_demands`] with an explicit jitter range; a degenerate
/// range `(1.0, 1.0)` reproduces the configured demands exactly.
pub fn generate_demands_with_jitter(
    population: &UePopulation,
    jitter: (f64, f64),
    seed: u64,
) -> DemandVector {
    assert!(
        jitter.0 > 0.0 && jitter.0 <= jitter.1,
        "jitter range must satisfy 0 < lo <= hi"
    );
    let mut rng = rng_from_seed(seed);
    let mut values = Vec::with_capacity(population.count());
    let mut mask = Vec::with_capacity(population.count());
    for ue in population.profiles() {
        match ue.gbr_demand_bps {
            Some(d) => {
                let factor = if jitter.0 == jitter.1 {
                    jitter.0
                } else {
                    rng.random_range(jitter.0..jitter.1)
                };
                values.push(d * factor);
                mask.push(true);
            }
            None => {
                values.push(0.0);
                mask.push(false);
            }
        }
    }
    DemandVector {
        values,
        gbr_mask: mask,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Toy table from the hand-worked examples: rates [1, 2, 4],
    /// MCS i decodable from CQI i+1.
    pub(crate) fn toy_table() -> McsTable {
        McsTable::new(vec![
            McsEntry {
                mcs_index: 0,
                min_cqi: 1,
                rate_bits_per_rb_per_tti: 1.0,
            },
            McsEntry {
                mcs_index: 1,
                min_cqi: 2,
                rate_bits_per_rb_per_tti: 2.0,
            },
            McsEntry {
                mcs_index: 2,
                min_cqi: 3,
                rate_bits_per_rb_per_tti: 4.0,
            },
        ])
        .unwrap()
    }

    fn pop(demands: &[Option<f64>], speed: f64) -> UePopulation {
        UePopulation::new(
            demands
                .iter()
                .map(|&d| UeProfile {
                    gbr_demand_bps: d,
                    speed_kmh: speed,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn efficiency_matrix_hand_examples() {
        let table = toy_table();
        // Single row [1, 3] -> [r(0), r(2)] = [1, 4].
        let cqi = CqiMatrix::new(1, 2, 3, vec![1, 3]).unwrap();
        let c = build_efficiency_matrix(&cqi, &table).unwrap();
        assert_eq!(c.get(0, 0), 1.0);
        assert_eq!(c.get(0, 1), 4.0);

        // 2x2 case: [[1,3],[2,2]] -> [[1,4],[2,2]].
        let cqi = CqiMatrix::new(2, 2, 3, vec![1, 3, 2, 2]).unwrap();
        let c = build_efficiency_matrix(&cqi, &table).unwrap();
        assert_eq!(
            (c.get(0, 0), c.get(0, 1), c.get(1, 0), c.get(1, 1)),
            (1.0, 4.0, 2.0, 2.0)
        );
    }

    #[test]
    fn efficiency_matrix_uniform_at_min_cqi() {
        let table = toy_table();
        let cqi = CqiMatrix::new(3, 4, 3, vec![1; 12]).unwrap();
        let c = build_efficiency_matrix(&cqi, &table).unwrap();
        for m in 0..3 {
            for n in 0..4 {
                assert_eq!(c.get(m, n), 1.0);
            }
        }
    }

    #[test]
    fn efficiency_matrix_rejects_cqi_above_table_range() {
        // A 15-level matrix against the 3-level toy table.
        let table = toy_table();
        let cqi = CqiMatrix::new(1, 2, 15, vec![1, 9]).unwrap();
        let err = build_efficiency_matrix(&cqi, &table).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn efficiency_is_monotone_in_cqi() {
        let table = McsTable::default_table();
        let mut rng = rng_from_seed(11);
        for _ in 0..50 {
            let cqi = init_cqi(4, 5, 15, rng.random()).unwrap();
            let c = build_efficiency_matrix(&cqi, &table).unwrap();
            let m = rng.random_range(0..4);
            let n = rng.random_range(0..5);
            let mut bumped = cqi.values().to_vec();
            let idx = m * 5 + n;
            if bumped[idx] < 15 {
                bumped[idx] += 1;
                let cqi2 = CqiMatrix::new(4, 5, 15, bumped).unwrap();
                let c2 = build_efficiency_matrix(&cqi2, &table).unwrap();
                assert!(c2.get(m, n) >= c.get(m, n));
            }
        }
    }

    #[test]
    fn init_cqi_is_reproducible_and_seed_sensitive() {
        let a = init_cqi(5, 5, 15, 42).unwrap();
        let b = init_cqi(5, 5, 15, 42).unwrap();
        assert_eq!(a, b);
        let c = init_cqi(5, 5, 15, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn init_cqi_single_cell_in_bounds() {
        let m = init_cqi(1, 1, 15, 0).unwrap();
        assert!(m.get(0, 0) >= 1 && m.get(0, 0) <= 15);
    }

    #[test]
    fn step_cqi_speed_zero_is_identity() {
        let cqi = init_cqi(4, 4, 15, 1).unwrap();
        let mut rng = rng_from_seed(2);
        let next = step_cqi(&cqi, &[0.0; 4], &mut rng);
        assert_eq!(cqi, next);
    }

    #[test]
    fn step_cqi_full_speed_moves_every_interior_entry() {
        // Force all entries to an interior level so no clamping hides steps.
        let cqi = CqiMatrix::new(5, 5, 15, vec![8; 25]).unwrap();
        let mut rng = rng_from_seed(3);
        let next = step_cqi(&cqi, &[REFERENCE_SPEED_KMH; 5], &mut rng);
        for (a, b) in cqi.values().iter().zip(next.values()) {
            assert_eq!((*a as i16 - *b as i16).abs(), 1);
        }
    }

    #[test]
    fn step_cqi_stays_in_bounds_over_many_steps() {
        let mut cqi = init_cqi(3, 3, 15, 4).unwrap();
        let mut rng = rng_from_seed(5);
        for _ in 0..200 {
            cqi = step_cqi(&cqi, &[150.0, 200.0, 50.0], &mut rng);
            assert!(cqi.values().iter().all(|&v| (1..=15).contains(&v)));
        }
    }

    #[test]
    fn demands_all_best_effort_are_sentinels() {
        let p = pop(&[None, None, None], 5.0);
        let d = generate_demands(&p, 9);
        assert_eq!(d.values(), &[0.0, 0.0, 0.0]);
        assert!(d.gbr_mask().iter().all(|&g| !g));
    }

    #[test]
    fn demands_degenerate_jitter_is_exact() {
        let p = pop(&[Some(1e6)], 5.0);
        let d = generate_demands_with_jitter(&p, (1.0, 1.0), 9);
        assert_eq!(d.values(), &[1e6]);
        assert_eq!(d.gbr_mask(), &[true]);
    }

    #[test]
    fn demands_reproducible_and_within_jitter() {
        let p = pop(&[Some(2e6), None, Some(5e5)], 5.0);
        let a = generate_demands(&p, 77);
        let b = generate_demands(&p, 77);
        assert_eq!(a, b);
        assert!(a.values()[0] >= 0.9 * 2e6 && a.values()[0] <= 1.1 * 2e6);
        assert_eq!(a.values()[1], 0.0);
    }

    #[test]
    fn default_table_shape() {
        let t = McsTable::default_table();
        assert_eq!(t.cqi_levels(), 15);
        assert_eq!(t.entries().len(), 15);
        assert_eq!(t.mcs_for_cqi(1), Some(0));
        assert_eq!(t.mcs_for_cqi(15), Some(14));
        assert_eq!(t.mcs_for_cqi(0), None);
        assert_eq!(t.mcs_for_cqi(16), None);
        assert!((t.max_rate() - 933.1896).abs() < 1e-9);
    }

    #[test]
    fn table_rejects_non_increasing_rates() {
        let r = McsTable::new(vec![
            McsEntry {
                mcs_index: 0,
                min_cqi: 1,
                rate_bits_per_rb_per_tti: 2.0,
            },
            McsEntry {
                mcs_index: 1,
                min_cqi: 2,
                rate_bits_per_rb_per_tti: 2.0,
            },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn demand_vector_rejects_nonzero_best_effort() {
        assert!(DemandVector::new(vec![1.0], vec![false]).is_err());
        assert!(DemandVector::new(vec![1.0, 0.0], vec![true, false]).is_ok());
    }
}
