//! Spherical k-means: Lloyd iterations over unit vectors with cosine
//! assignment and k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{dot, normalized};
use crate::error::{Error, Result};

/// Cluster index per input vector, labelled in order of first appearance.
///
/// Deterministic for a given `rng_seed`. Stops when an iteration changes no
/// assignment or after `max_iters` iterations. A cluster that empties is
/// re-seeded with the point least similar to its own centroid.
pub fn kmeans<V: AsRef<[f64]>>(
    vectors: &[V],
    k: usize,
    rng_seed: u64,
    max_iters: usize,
) -> Result<Vec<usize>> {
    let n = vectors.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "k-means needs 1 <= k <= {n}, got k = {k}"
        )));
    }
    let points = vectors
        .iter()
        .map(|v| {
            normalized(v.as_ref())
                .ok_or_else(|| Error::Degenerate("zero vector in k-means input".into()))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut centroids = plus_plus(&points, k, &mut rng);
    let mut labels = vec![usize::MAX; n];

    for _ in 0..max_iters.max(1) {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let best = nearest(p, &centroids).0;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if reseed_empty(&points, &mut labels, &centroids) {
            changed = true;
        }
        if !changed {
            break;
        }
        centroids = update_centroids(&points, &labels, &centroids);
    }
    Ok(relabel(&labels))
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let sim = dot(point, centroid);
        if sim > best.1 {
            best = (c, sim);
        }
    }
    best
}

/// k-means++ with the chordal distance `|p - c|^2 = 2 (1 - cos)`.
fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first].clone()];
    let mut dist: Vec<f64> = points
        .iter()
        .map(|p| (2.0 * (1.0 - dot(p, &centroids[0]))).max(0.0))
        .collect();

    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in dist.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                acc += d;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick
        } else {
            None
        };
        // all remaining points coincide with a centroid: take the first unused one
        let pick = pick
            .filter(|&i| !chosen[i])
            .or_else(|| (0..n).find(|&i| !chosen[i]))
            .expect("k <= n leaves an unused point");
        chosen[pick] = true;
        centroids.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            let d = (2.0 * (1.0 - dot(p, &points[pick]))).max(0.0);
            if d < dist[i] {
                dist[i] = d;
            }
        }
    }
    centroids
}

/// Moves, for every empty cluster, the point farthest from its current
/// centroid into it. Points that are the sole member of a cluster stay put.
/// Returns whether any label moved.
fn reseed_empty(points: &[Vec<f64>], labels: &mut [usize], centroids: &[Vec<f64>]) -> bool {
    let k = centroids.len();
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let mut moved = false;
    for empty in 0..k {
        if sizes[empty] > 0 {
            continue;
        }
        let donor = (0..points.len())
            .filter(|&i| sizes[labels[i]] > 1)
            .min_by(|&a, &b| {
                dot(&points[a], &centroids[labels[a]])
                    .total_cmp(&dot(&points[b], &centroids[labels[b]]))
                    .then(a.cmp(&b))
            });
        if let Some(i) = donor {
            sizes[labels[i]] -= 1;
            labels[i] = empty;
            sizes[empty] = 1;
            moved = true;
        }
    }
    moved
}

fn update_centroids(points: &[Vec<f64>], labels: &[usize], previous: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let mut sums = vec![vec![0.0; dim]; previous.len()];
    for (p, &l) in points.iter().zip(labels) {
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    sums.into_iter()
        .zip(previous)
        .map(|(s, prev)| normalized(&s).unwrap_or_else(|| prev.clone()))
        .collect()
}

/// Renumbers labels by order of first appearance.
pub(crate) fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}
