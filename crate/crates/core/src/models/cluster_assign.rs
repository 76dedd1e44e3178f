//! Mapping clusters onto ontology classes by seed voting.
//!
//! Seed votes give each cluster a tentative class. Three situations leave
//! that ambiguous: a cluster with no seeds, a tied vote, and several
//! clusters claiming one class. They are resolved with the aggregate cosine
//! similarity of a cluster's members to a class vector:
//!
//! 1. tentative claims from strict-majority votes;
//! 2. a tied cluster claims the best-scoring class among its tied classes
//!    that nobody has claimed yet;
//! 3. among clusters claiming the same class, the best-scoring one keeps
//!    it and the rest drop that option;
//! 4. 2 and 3 repeat until an iteration produces no new claim;
//! 5. remaining clusters and classes are paired greedily by descending
//!    score, ties by `(cluster, class)` index.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::embeddings::{cosine, EmbeddingStore};
use crate::error::{Error, Result};
use crate::ontology::{ClassVector, Ontology};

/// How a cluster obtained its class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AssignmentOrigin {
    /// Uncontested strict-majority seed vote.
    Vote,
    /// A tied vote settled by similarity.
    TieBreak,
    /// Won a class that other clusters also claimed.
    Contest,
    /// Paired in the final greedy matching.
    Leftover,
}

/// Outcome of [`resolve_bijection`], indexed by cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolution {
    pub cluster_to_class: Vec<usize>,
    pub origins: Vec<AssignmentOrigin>,
    /// Rounds of the tie/contest loop, including the final one without
    /// new claims.
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    pub clusters: Vec<Vec<String>>,
    pub cluster_to_class: Vec<String>,
    pub origins: Vec<AssignmentOrigin>,
    pub iterations: usize,
}

impl ClusterAssignment {
    pub fn class_of_cluster(&self, cluster: usize) -> &str {
        &self.cluster_to_class[cluster]
    }
}

fn argmax(scores: &[f64], among: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for j in among {
        if best.is_none_or(|b| scores[j] > scores[b]) {
            best = Some(j);
        }
    }
    best
}

/// Resolves a cluster → class bijection from a `clusters × classes` vote
/// count matrix and a matching similarity score matrix. Class indices are
/// expected in tie-break order.
pub fn resolve_bijection(votes: &[Vec<usize>], scores: &[Vec<f64>]) -> Result<Resolution> {
    let k = votes.len();
    if scores.len() != k
        || votes.iter().any(|r| r.len() != k)
        || scores.iter().any(|r| r.len() != k)
    {
        return Err(Error::InvalidArgument(
            "vote and score matrices must both be square with one row per cluster".into(),
        ));
    }

    let mut options: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    let mut claim: Vec<Option<usize>> = vec![None; k];
    let mut origins = vec![AssignmentOrigin::Leftover; k];
    let mut fresh: Vec<usize> = Vec::new();
    for (c, row) in votes.iter().enumerate() {
        let top = row.iter().copied().max().unwrap_or(0);
        if top == 0 {
            continue;
        }
        let winners: BTreeSet<usize> = (0..k).filter(|&j| row[j] == top).collect();
        if winners.len() == 1 {
            let j = *winners.iter().next().unwrap();
            claim[c] = Some(j);
            origins[c] = AssignmentOrigin::Vote;
            fresh.push(c);
        }
        options[c] = winners;
    }

    let mut iterations = 0;
    loop {
        iterations += 1;
        // tied (or displaced) clusters pick among their remaining options
        let claimed: BTreeSet<usize> = claim.iter().flatten().copied().collect();
        for c in 0..k {
            if claim[c].is_some() || options[c].is_empty() {
                continue;
            }
            let open: Vec<usize> = options[c]
                .iter()
                .copied()
                .filter(|j| !claimed.contains(j))
                .collect();
            match argmax(&scores[c], open) {
                Some(j) => {
                    claim[c] = Some(j);
                    origins[c] = AssignmentOrigin::TieBreak;
                    fresh.push(c);
                }
                None => options[c].clear(),
            }
        }
        if fresh.is_empty() {
            break;
        }

        // contested classes: the best-scoring claimant keeps the class
        let mut claimants: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (c, j) in claim.iter().enumerate() {
            if let Some(j) = j {
                claimants.entry(*j).or_default().push(c);
            }
        }
        for (j, clusters) in claimants {
            if clusters.len() < 2 {
                continue;
            }
            let keeper = clusters
                .iter()
                .copied()
                .reduce(|a, b| if scores[b][j] > scores[a][j] { b } else { a })
                .unwrap();
            for c in clusters {
                if c == keeper {
                    origins[c] = AssignmentOrigin::Contest;
                } else {
                    claim[c] = None;
                    options[c].remove(&j);
                    origins[c] = AssignmentOrigin::Leftover;
                }
            }
        }
        fresh.clear();
    }

    // greedy pairing of whatever is left
    let claimed: BTreeSet<usize> = claim.iter().flatten().copied().collect();
    let mut free_clusters: Vec<usize> = (0..k).filter(|&c| claim[c].is_none()).collect();
    let mut free_classes: Vec<usize> = (0..k).filter(|j| !claimed.contains(j)).collect();
    while !free_clusters.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for &c in &free_clusters {
            for &j in &free_classes {
                if best.is_none_or(|(bc, bj)| scores[c][j] > scores[bc][bj]) {
                    best = Some((c, j));
                }
            }
        }
        let (c, j) =
            best.ok_or_else(|| Error::InvalidArgument("more clusters than classes".into()))?;
        claim[c] = Some(j);
        origins[c] = AssignmentOrigin::Leftover;
        free_clusters.retain(|&x| x != c);
        free_classes.retain(|&x| x != j);
    }

    Ok(Resolution {
        cluster_to_class: claim
            .into_iter()
            .map(|j| j.expect("every cluster paired"))
            .collect(),
        origins,
        iterations,
    })
}

/// Aggregate cosine similarity of every in-vocabulary cluster member to
/// each class vector, as a `clusters × classes` matrix.
pub(crate) fn similarity_matrix(
    clusters: &[Vec<String>],
    class_vectors: &[&ClassVector],
    store: &EmbeddingStore,
) -> Result<Vec<Vec<f64>>> {
    clusters
        .iter()
        .map(|members| {
            class_vectors
                .iter()
                .map(|cv| {
                    members
                        .iter()
                        .filter_map(|t| store.vector_of(t))
                        .map(|v| cosine(v, &cv.vector))
                        .sum::<Result<f64>>()
                })
                .collect()
        })
        .collect()
}

/// Maps each cluster to a distinct class. The number of clusters must
/// equal the number of class vectors.
pub fn assign_clusters(
    clusters: &[Vec<String>],
    ontology: &Ontology,
    class_vectors: &[ClassVector],
    store: &EmbeddingStore,
) -> Result<ClusterAssignment> {
    let mut classes: Vec<&ClassVector> = class_vectors.iter().collect();
    classes.sort_by(|a, b| a.class_id.cmp(&b.class_id));
    if clusters.len() != classes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} clusters for {} classes",
            clusters.len(),
            classes.len()
        )));
    }
    let mut seed_owner: HashMap<&str, Vec<usize>> = HashMap::new();
    for (j, cv) in classes.iter().enumerate() {
        let class = ontology
            .class(&cv.class_id)
            .ok_or_else(|| Error::UnknownClass(cv.class_id.clone()))?;
        if class.seeds.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "class `{}` has no seeds",
                class.id
            )));
        }
        for seed in class.seeds.iter().collect::<BTreeSet<_>>() {
            seed_owner.entry(seed).or_default().push(j);
        }
    }
    let votes: Vec<Vec<usize>> = clusters
        .iter()
        .map(|members| {
            let mut row = vec![0usize; classes.len()];
            for t in members {
                for &j in seed_owner.get(t.as_str()).into_iter().flatten() {
                    row[j] += 1;
                }
            }
            row
        })
        .collect();
    let scores = similarity_matrix(clusters, &classes, store)?;
    let resolution = resolve_bijection(&votes, &scores)?;
    Ok(ClusterAssignment {
        clusters: clusters.to_vec(),
        cluster_to_class: resolution
            .cluster_to_class
            .iter()
            .map(|&j| classes[j].class_id.clone())
            .collect(),
        origins: resolution.origins,
        iterations: resolution.iterations,
    })
}
