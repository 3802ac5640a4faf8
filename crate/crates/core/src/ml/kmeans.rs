//! Lloyd's algorithm with k-means++ seeding over demand features.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, SimRng};

use super::DemandDatabase;

pub const DEFAULT_KMEANS_MAX_ITERS: usize = 100;

/// Fitted clustering of the demand database.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    centroids: Vec<Vec<f64>>,
    assignments: Vec<usize>,
    inertia: f64,
}

impl ClusterModel {
    pub fn cluster_count(&self) -> usize {
        self.centroids.len()
    }

    pub fn centroids(&self) -> &[Vec<f64>] {
        &self.centroids
    }

    /// Cluster index of database row i at fit time.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Sum of squared distances of every row to its centroid.
    pub fn inertia(&self) -> f64 {
        self.inertia
    }

    /// Nearest centroid of an arbitrary feature vector, ties to the lower
    /// cluster index.
    pub fn nearest_centroid(&self, features: &[f64]) -> usize {
        nearest(&self.centroids, features).0
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_d = squared_distance(point, &centroids[0]);
    for (k, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(point, c);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    (best, best_d)
}

/// k-means++ style seeding: first centroid uniform, the rest sampled with
/// probability proportional to squared distance from the chosen set.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut SimRng) -> Vec<Vec<f64>> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.random_range(0..points.len())].clone());
    while centroids.len() < k {
        let d2: Vec<f64> = points.iter().map(|p| nearest(&centroids, p).1).collect();
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &d) in d2.iter().enumerate() {
                if target < d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            // All points coincide with a centroid; any choice is equivalent.
            rng.random_range(0..points.len())
        };
        centroids.push(points[next].clone());
    }
    centroids
}

/// Cluster the demand database into `k` groups. Deterministic per seed;
/// empty clusters are repaired by stealing the farthest point from the
/// largest cluster.
pub fn kmeans_fit(
    db: &DemandDatabase,
    k: usize,
    seed: u64,
    max_iters: usize,
) -> Result<ClusterModel> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be >= 1".into()));
    }
    if db.len() < k {
        return Err(Error::InsufficientData(format!(
            "{} rows cannot form {k} clusters",
            db.len()
        )));
    }
    let points = db.feature_matrix();
    let dim = points[0].len();
    let mut rng = rng_from_seed(seed);
    let mut centroids = seed_centroids(&points, k, &mut rng);
    let mut assignments = vec![usize::MAX; points.len()];
    let mut prev_inertia = f64::INFINITY;

    for _ in 0..max_iters.max(1) {
        // Assignment step (ties to the lower cluster index via strict <).
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (a, _) = nearest(&centroids, p);
            if assignments[i] != a {
                assignments[i] = a;
                changed = true;
            }
        }

        // Repair empty clusters before the update step.
        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for empty in 0..k {
            if sizes[empty] > 0 {
                continue;
            }
            let donor = (0..k).max_by_key(|&c| sizes[c]).unwrap();
            let steal = points
                .iter()
                .enumerate()
                .filter(|(i, _)| assignments[*i] == donor)
                .max_by(|(_, a), (_, b)| {
                    squared_distance(a, &centroids[donor])
                        .partial_cmp(&squared_distance(b, &centroids[donor]))
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            centroids[empty] = points[steal].clone();
            assignments[steal] = empty;
            sizes[donor] -= 1;
            sizes[empty] += 1;
            changed = true;
        }

        if !changed {
            break;
        }

        // Update step: each centroid becomes the mean of its members.
        let mut sums = vec![vec![0.0; dim]; k];
        for (i, p) in points.iter().enumerate() {
            for (s, v) in sums[assignments[i]].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            for s in sums[c].iter_mut() {
                *s /= sizes[c] as f64;
            }
            centroids[c] = std::mem::take(&mut sums[c]);
        }

        let inertia: f64 = points
            .iter()
            .enumerate()
            .map(|(i, p)| squared_distance(p, &centroids[assignments[i]]))
            .sum();
        debug_assert!(
            inertia <= prev_inertia + 1e-9,
            "Lloyd iteration increased inertia: {prev_inertia} -> {inertia}"
        );
        prev_inertia = inertia;
    }

    // Final assignment pass so labels match the returned centroids even
    // when the loop exits at the iteration cap.
    for (i, p) in points.iter().enumerate() {
        assignments[i] = nearest(&centroids, p).0;
    }
    let inertia = points
        .iter()
        .enumerate()
        .map(|(i, p)| squared_distance(p, &centroids[assignments[i]]))
        .sum();

    Ok(ClusterModel {
        centroids,
        assignments,
        inertia,
    })
}
