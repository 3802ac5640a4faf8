//! The closed-loop stage: demand history, periodic clustering of demand
//! patterns, classification of incoming demands, three-case weight
//! adaptation, and the per-cluster cache of optimized allocation patterns
//! used to warm-start the GA.

mod classifier;
mod kmeans;

pub use classifier::{
    build_training_matrix, classify, train_classifier, ClassifierModel, LinearSeparator,
    TrainingMatrix, DEFAULT_SVM_EPOCHS, DEFAULT_SVM_LEARNING_RATE, DEFAULT_SVM_REGULARIZATION,
};
pub use kmeans::{kmeans_fit, ClusterModel, DEFAULT_KMEANS_MAX_ITERS};

use std::collections::VecDeque;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::fitness::{AllocationPattern, SchedulerWeights};
use crate::ga::GaResult;
use crate::model::DemandVector;

/// Clustering features of one demand vector: the raw demands concatenated
/// with the GBR mask as 0/1 reals, so the three demand regimes stay
/// separable even when demand magnitudes coincide.
pub fn demand_features(d: &DemandVector) -> Vec<f64> {
    d.values()
        .iter()
        .copied()
        .chain(d.gbr_mask().iter().map(|&g| if g { 1.0 } else { 0.0 }))
        .collect()
}

/// Three-case weight rule driven by the GBR mask alone:
/// all GBR -> (0, 1); none -> (1, 0); mixed -> w2 = #GBR / M.
pub fn adapt_weights(d: &DemandVector) -> SchedulerWeights {
    let m = d.len();
    let gbr = d.gbr_count();
    let w2 = gbr as f64 / m as f64;
    SchedulerWeights::new(1.0 - w2, w2).expect("mask-derived weights are valid")
}

/// Bounded FIFO history of demand vectors, the clustering input.
#[derive(Debug, Clone)]
pub struct DemandDatabase {
    rows: VecDeque<DemandVector>,
    capacity: usize,
}

impl DemandDatabase {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(Error::InvalidInput("database capacity must be >= 1".into()));
        }
        Ok(Self {
            rows: VecDeque::new(),
            capacity,
        })
    }

    /// Append one row, evicting the oldest when at capacity.
    pub fn push(&mut self, row: DemandVector) -> Result<()> {
        if let Some(first) = self.rows.front() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch(format!(
                    "database rows have {} UEs, new row has {}",
                    first.len(),
                    row.len()
                )));
            }
        }
        if self.rows.len() == self.capacity {
            self.rows.pop_front();
        }
        self.rows.push_back(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn rows(&self) -> impl Iterator<Item = &DemandVector> {
        self.rows.iter()
    }

    /// Feature matrix of the whole database, row order preserved.
    pub fn feature_matrix(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(demand_features).collect()
    }

    /// Plain-text export: one row per line, demand values then the GBR
    /// mask as 0/1, space separated.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for row in &self.rows {
            let mut cols: Vec<String> = row.values().iter().map(|v| format!("{v}")).collect();
            cols.extend(
                row.gbr_mask()
                    .iter()
                    .map(|&g| String::from(if g { "1" } else { "0" })),
            );
            writeln!(w, "{}", cols.join(" "))?;
        }
        Ok(())
    }

    pub fn export<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn read_from<R: Read>(r: R, capacity: usize) -> Result<Self> {
        let mut db = Self::new(capacity)?;
        for (lineno, line) in BufReader::new(r).lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if !cols.len().is_multiple_of(2) {
                return Err(Error::InvalidInput(format!(
                    "demand db line {}: expected 2M columns, got {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            let m = cols.len() / 2;
            let mut values = Vec::with_capacity(m);
            let mut mask = Vec::with_capacity(m);
            for c in &cols[..m] {
                values.push(c.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("demand db line {}: bad value {c}", lineno + 1))
                })?);
            }
            for c in &cols[m..] {
                mask.push(match *c {
                    "0" => false,
                    "1" => true,
                    other => {
                        return Err(Error::InvalidInput(format!(
                            "demand db line {}: mask entry must be 0/1, got {other}",
                            lineno + 1
                        )))
                    }
                });
            }
            db.push(DemandVector::new(values, mask)?)?;
        }
        Ok(db)
    }

    pub fn import<P: AsRef<Path>>(path: P, capacity: usize) -> Result<Self> {
        Self::read_from(std::fs::File::open(path)?, capacity)
    }
}

/// One cached optimized allocation.
#[derive(Debug, Clone)]
pub struct CacheEntry {
    pub pattern: AllocationPattern,
    pub fitness: f64,
    pub tti: usize,
}

/// The RBs-to-UEs mapping store: at most one entry per demand cluster.
#[derive(Debug, Clone)]
pub struct MappingCache {
    entries: Vec<Option<CacheEntry>>,
}

impl MappingCache {
    pub fn new(clusters: usize) -> Result<Self> {
        if clusters == 0 {
            return Err(Error::InvalidInput(
                "cache needs at least one cluster".into(),
            ));
        }
        Ok(Self {
            entries: vec![None; clusters],
        })
    }

    pub fn cluster_count(&self) -> usize {
        self.entries.len()
    }

    pub fn occupied(&self) -> usize {
        self.entries.iter().filter(|e| e.is_some()).count()
    }

    /// Entry for cluster `k`; absence means "no warm start".
    pub fn lookup(&self, k: usize) -> Option<&CacheEntry> {
        assert!(k < self.entries.len(), "cluster index out of range");
        self.entries[k].as_ref()
    }

    /// Unconditionally replace entry `k` with the newest optimized pattern.
    pub fn update(&mut self, k: usize, result: &GaResult, tti: usize) {
        assert!(k < self.entries.len(), "cluster index out of range");
        self.entries[k] = Some(CacheEntry {
            pattern: result.best_pattern.clone(),
            fitness: result.best_fitness.combined,
            tti,
        });
    }
}
