//! Integer-encoded genetic algorithm over allocation patterns: tournament
//! selection, uniform crossover, per-gene mutation, elitism, and optional
//! warm-start seeding of the initial population.
//!
//! Fitness evaluation of a generation is data-parallel (rayon when the
//! `parallel` feature is on); selection always consumes the evaluations in
//! population index order, so results are identical with and without
//! parallelism.

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{
    combined_fitness, AllocationPattern, FitnessBreakdown, FitnessContext, SchedulerWeights,
};
use crate::rng::{rng_from_seed, SimRng};

/// Per-gene resample probability applied to warm-start copies.
const SEED_MUTATION_RATE: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    /// Per-gene mutation probability; `None` means 1/N.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub elite_count: usize,
    /// Stop after this many generations without best-fitness improvement.
    pub stall_limit: usize,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 200,
            crossover_rate: 0.9,
            mutation_rate: None,
            tournament_size: 2,
            elite_count: 2,
            stall_limit: 30,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be >= 2".into()));
        }
        if self.max_generations < 1 {
            return Err(Error::Config("max_generations must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(Error::Config("crossover_rate must lie in [0, 1]".into()));
        }
        if let Some(r) = self.mutation_rate {
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::Config("mutation_rate must lie in [0, 1]".into()));
            }
        }
        if self.tournament_size < 1 || self.tournament_size > self.population_size {
            return Err(Error::Config(
                "tournament_size must lie in [1, population_size]".into(),
            ));
        }
        if self.elite_count >= self.population_size {
            return Err(Error::Config(
                "elite_count must be < population_size".into(),
            ));
        }
        if self.stall_limit < 1 {
            return Err(Error::Config("stall_limit must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one evolution run.
#[derive(Debug, Clone)]
pub struct GaResult {
    pub best_pattern: AllocationPattern,
    pub best_fitness: FitnessBreakdown,
    /// Number of evolution steps taken (<= max_generations).
    pub generations_used: usize,
    /// Best combined fitness seen up to each evaluated generation;
    /// entry 0 is the initial population, so the trace is non-decreasing.
    pub fitness_trace: Vec<f64>,
}

fn random_pattern(ues: usize, rbs: usize, rng: &mut SimRng) -> AllocationPattern {
    use rand::Rng;
    AllocationPattern::from_genes_unchecked((0..rbs).map(|_| rng.random_range(0..ues)).collect())
}

/// Build the initial population. With warm-start seeds: the seeds verbatim,
/// then lightly mutated copies up to half the population, remainder random.
pub fn init_population(
    size: usize,
    ues: usize,
    rbs: usize,
    seed_patterns: &[AllocationPattern],
    rng: &mut SimRng,
) -> Result<Vec<AllocationPattern>> {
    if size < 2 {
        return Err(Error::InvalidInput("population size must be >= 2".into()));
    }
    for sp in seed_patterns {
        if sp.len() != rbs {
            return Err(Error::DimensionMismatch(format!(
                "seed pattern has {} genes, scenario has {rbs} RBs",
                sp.len()
            )));
        }
        if sp.genes().iter().any(|&g| g >= ues) {
            return Err(Error::InvalidInput(format!(
                "seed pattern references a UE outside [0, {ues})"
            )));
        }
    }
    let mut population = Vec::with_capacity(size);
    if !seed_patterns.is_empty() {
        let lineage = size.div_ceil(2);
        for sp in seed_patterns.iter().take(lineage) {
            population.push(sp.clone());
        }
        let mut i = 0usize;
        while population.len() < lineage {
            let base = &seed_patterns[i % seed_patterns.len()];
            population.push(mutate(base, SEED_MUTATION_RATE, ues, rng));
            i += 1;
        }
    }
    while population.len() < size {
        population.push(random_pattern(ues, rbs, rng));
    }
    Ok(population)
}

/// Index of the best of `k` distinct members drawn uniformly; ties and the
/// final comparison both resolve toward the lower population index.
pub fn tournament_select(fitnesses: &[f64], k: usize, rng: &mut SimRng) -> usize {
    assert!(
        k >= 1 && k <= fitnesses.len(),
        "tournament size out of range"
    );
    let mut best: Option<usize> = None;
    for idx in rand::seq::index::sample(rng, fitnesses.len(), k) {
        best = match best {
            None => Some(idx),
            Some(cur) => {
                if fitnesses[idx] > fitnesses[cur]
                    || (fitnesses[idx] == fitnesses[cur] && idx < cur)
                {
                    Some(idx)
                } else {
                    Some(cur)
                }
            }
        };
    }
    best.unwrap()
}

/// Uniform crossover: with probability `rate`, each gene of the children
/// comes from either parent on a fair coin; otherwise the children are
/// copies of the parents.
pub fn crossover(
    parent_a: &AllocationPattern,
    parent_b: &AllocationPattern,
    rate: f64,
    rng: &mut SimRng,
) -> Result<(AllocationPattern, AllocationPattern)> {
    use rand::Rng;
    if parent_a.len() != parent_b.len() {
        return Err(Error::DimensionMismatch(format!(
            "crossover parents have {} and {} genes",
            parent_a.len(),
            parent_b.len()
        )));
    }
    if rng.random::<f64>() >= rate {
        return Ok((parent_a.clone(), parent_b.clone()));
    }
    let mut a = Vec::with_capacity(parent_a.len());
    let mut b = Vec::with_capacity(parent_b.len());
    for (&ga, &gb) in parent_a.genes().iter().zip(parent_b.genes()) {
        if rng.random::<bool>() {
            a.push(ga);
            b.push(gb);
        } else {
            a.push(gb);
            b.push(ga);
        }
    }
    Ok((
        AllocationPattern::from_genes_unchecked(a),
        AllocationPattern::from_genes_unchecked(b),
    ))
}

/// Each gene independently resampled uniformly over `[0, ues)` with
/// probability `rate`.
pub fn mutate(
    pattern: &AllocationPattern,
    rate: f64,
    ues: usize,
    rng: &mut SimRng,
) -> AllocationPattern {
    use rand::Rng;
    let genes = pattern
        .genes()
        .iter()
        .map(|&g| {
            if rate > 0.0 && rng.random::<f64>() < rate {
                rng.random_range(0..ues)
            } else {
                g
            }
        })
        .collect();
    AllocationPattern::from_genes_unchecked(genes)
}

/// Evaluate a whole generation; output index i belongs to population[i].
pub fn evaluate_population(
    population: &[AllocationPattern],
    weights: SchedulerWeights,
    ctx: &FitnessContext,
) -> Vec<FitnessBreakdown> {
    #[cfg(feature = "parallel")]
    {
        // Chunked splitting: one evaluation is sub-microsecond, so
        // fine-grained work items would drown in fork-join overhead.
        population
            .par_iter()
            .with_min_len(32)
            .map(|p| combined_fitness(p, weights, ctx))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        evaluate_population_seq(population, weights, ctx)
    }
}

/// Sequential evaluation; the reference path the parallel one must match.
pub fn evaluate_population_seq(
    population: &[AllocationPattern],
    weights: SchedulerWeights,
    ctx: &FitnessContext,
) -> Vec<FitnessBreakdown> {
    population
        .iter()
        .map(|p| combined_fitness(p, weights, ctx))
        .collect()
}

/// Run the evolution loop: elitism plus select/crossover/mutate offspring,
/// until the generation cap or `stall_limit` generations without
/// improvement. Deterministic for a fixed config, context, and seeds.
pub fn evolve(
    config: &GaConfig,
    ctx: &FitnessContext,
    weights: SchedulerWeights,
    seed_patterns: &[AllocationPattern],
) -> Result<GaResult> {
    evolve_impl(config, ctx, weights, seed_patterns, evaluate_population)
}

/// [`evolve`] with strictly sequential fitness evaluation; bit-identical
/// results, used as the reference for benchmarks and wall-time scaling
/// measurements.
pub fn evolve_seq(
    config: &GaConfig,
    ctx: &FitnessContext,
    weights: SchedulerWeights,
    seed_patterns: &[AllocationPattern],
) -> Result<GaResult> {
    evolve_impl(config, ctx, weights, seed_patterns, evaluate_population_seq)
}

fn evolve_impl(
    config: &GaConfig,
    ctx: &FitnessContext,
    weights: SchedulerWeights,
    seed_patterns: &[AllocationPattern],
    evaluate: fn(&[AllocationPattern], SchedulerWeights, &FitnessContext) -> Vec<FitnessBreakdown>,
) -> Result<GaResult> {
    config.validate()?;
    let ues = ctx.ues();
    let rbs = ctx.rbs();
    let mutation_rate = config.mutation_rate.unwrap_or(1.0 / rbs as f64);
    let mut rng = rng_from_seed(config.seed);

    let mut population =
        init_population(config.population_size, ues, rbs, seed_patterns, &mut rng)?;
    let mut evaluations = evaluate(&population, weights, ctx);

    let best_of = |evals: &[FitnessBreakdown]| -> usize {
        let mut best = 0;
        for i in 1..evals.len() {
            if evals[i].combined > evals[best].combined {
                best = i;
            }
        }
        best
    };

    let first = best_of(&evaluations);
    let mut best_pattern = population[first].clone();
    let mut best_fitness = evaluations[first].clone();
    let mut trace = vec![best_fitness.combined];

    let mut generations = 0usize;
    let mut stall = 0usize;
    while generations < config.max_generations && stall < config.stall_limit {
        // Elites: best `elite_count` by combined fitness, lower index on ties.
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| {
            evaluations[b]
                .combined
                .partial_cmp(&evaluations[a].combined)
                .unwrap()
                .then(a.cmp(&b))
        });
        let mut next: Vec<AllocationPattern> = order[..config.elite_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();

        let scores: Vec<f64> = evaluations.iter().map(|e| e.combined).collect();
        while next.len() < config.population_size {
            let pa = tournament_select(&scores, config.tournament_size, &mut rng);
            let pb = tournament_select(&scores, config.tournament_size, &mut rng);
            let (child_a, child_b) = crossover(
                &population[pa],
                &population[pb],
                config.crossover_rate,
                &mut rng,
            )
            .expect("parents share chromosome length");
            next.push(mutate(&child_a, mutation_rate, ues, &mut rng));
            if next.len() < config.population_size {
                next.push(mutate(&child_b, mutation_rate, ues, &mut rng));
            }
        }

        population = next;
        evaluations = evaluate(&population, weights, ctx);
        generations += 1;

        let gen_best = best_of(&evaluations);
        if evaluations[gen_best].combined > best_fitness.combined {
            best_pattern = population[gen_best].clone();
            best_fitness = evaluations[gen_best].clone();
            stall = 0;
        } else {
            stall += 1;
        }
        trace.push(best_fitness.combined);
    }

    Ok(GaResult {
        best_pattern,
        best_fitness,
        generations_used: generations,
        fitness_trace: trace,
    })
}
