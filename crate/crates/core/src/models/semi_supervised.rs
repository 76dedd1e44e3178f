//! Semi-supervised clustering models: seeds and candidates are clustered
//! together into one cluster per class, clusters are mapped to classes by
//! seed voting, and every candidate inherits its cluster's class.

use std::collections::BTreeSet;

use log::warn;

use super::cluster_assign::assign_clusters;
use super::{agglomerative_cut, kmeans, ModelConfig, ModelOutput, ModelTag};
use crate::embeddings::{cosine, EmbeddingStore};
use crate::error::{Error, Result};
use crate::ontology::{ClassVector, Ontology};

enum Clustering {
    KMeans,
    Hierarchical,
}

/// Semi-supervised spherical k-means with `k` equal to the number of classes.
pub fn m4_assign(
    ontology: &Ontology,
    store: &EmbeddingStore,
    class_vectors: &[ClassVector],
    candidates: &[String],
    config: &ModelConfig,
) -> Result<ModelOutput> {
    run(
        ModelTag::M4,
        Clustering::KMeans,
        ontology,
        store,
        class_vectors,
        candidates,
        config,
    )
}

/// Semi-supervised average-linkage clustering cut at the number of classes.
pub fn m5_assign(
    ontology: &Ontology,
    store: &EmbeddingStore,
    class_vectors: &[ClassVector],
    candidates: &[String],
    config: &ModelConfig,
) -> Result<ModelOutput> {
    run(
        ModelTag::M5,
        Clustering::Hierarchical,
        ontology,
        store,
        class_vectors,
        candidates,
        config,
    )
}

fn run(
    tag: ModelTag,
    method: Clustering,
    ontology: &Ontology,
    store: &EmbeddingStore,
    class_vectors: &[ClassVector],
    candidates: &[String],
    config: &ModelConfig,
) -> Result<ModelOutput> {
    let mut out = ModelOutput::new(tag);
    if class_vectors.is_empty() {
        warn!("{tag}: no class vectors; nothing assigned");
        return Ok(out);
    }
    let seeds: BTreeSet<&str> = class_vectors
        .iter()
        .filter_map(|cv| ontology.class(&cv.class_id))
        .flat_map(|c| c.seeds.iter().map(String::as_str))
        .filter(|s| store.contains(s))
        .collect();
    let mut seen = BTreeSet::new();
    let unlabeled: Vec<&str> = candidates
        .iter()
        .map(String::as_str)
        .filter(|c| store.contains(c) && !seeds.contains(c) && seen.insert(*c))
        .collect();
    if unlabeled.is_empty() {
        warn!("{tag}: no in-vocabulary candidates; nothing assigned");
        return Ok(out);
    }

    let pool: Vec<&str> = seeds
        .iter()
        .copied()
        .chain(unlabeled.iter().copied())
        .collect();
    let vectors: Vec<&[f64]> = pool
        .iter()
        .map(|t| store.vector_of(t).expect("pool is in vocabulary"))
        .collect();
    let k = class_vectors.len();
    if pool.len() < k {
        return Err(Error::InvalidArgument(format!(
            "{tag}: {} instances cannot form {k} clusters",
            pool.len()
        )));
    }
    let labels = match method {
        Clustering::KMeans => kmeans(&vectors, k, config.kmeans.seed, config.kmeans.max_iters)?,
        Clustering::Hierarchical => agglomerative_cut(&vectors, k)?,
    };
    let mut clusters = vec![Vec::new(); k];
    for (token, &label) in pool.iter().zip(&labels) {
        clusters[label].push(token.to_string());
    }
    let assignment = assign_clusters(&clusters, ontology, class_vectors, store)?;

    for (token, &label) in pool.iter().zip(&labels).skip(seeds.len()) {
        let class_id = assignment.class_of_cluster(label);
        let cv = class_vectors
            .iter()
            .find(|cv| cv.class_id == class_id)
            .expect("assignment uses known classes");
        let score = cosine(store.vector_of(token).expect("in vocabulary"), &cv.vector)?;
        out.insert(token, class_id, score);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::{derive_class_vectors, AggregationMethod, OntologyClass};

    fn fixture() -> (Ontology, EmbeddingStore, Vec<String>) {
        let mut rows = Vec::new();
        let mut candidates = Vec::new();
        let dirs = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let mut classes = Vec::new();
        for (c, dir) in dirs.iter().enumerate() {
            let mut seeds = Vec::new();
            for i in 0..6 {
                let jitter = 0.05 * (i as f64 - 2.5);
                let mut v = dir.to_vec();
                v[(c + 1) % 3] += jitter;
                let token = if i < 2 {
                    format!("seed{c}{i}")
                } else {
                    format!("cand{c}{i}")
                };
                if i < 2 {
                    seeds.push(token.clone());
                } else {
                    candidates.push(token.clone());
                }
                rows.push((token, v));
            }
            classes.push(OntologyClass::new(format!("class{c}"), seeds));
        }
        (
            Ontology::new(classes).unwrap(),
            EmbeddingStore::from_rows(3, rows).unwrap(),
            candidates,
        )
    }

    #[test]
    fn candidates_follow_their_blob() {
        let (ontology, store, candidates) = fixture();
        let cvs = derive_class_vectors(&ontology, &store, AggregationMethod::Centroid);
        let config = ModelConfig::default();
        for out in [
            m4_assign(&ontology, &store, &cvs, &candidates, &config).unwrap(),
            m5_assign(&ontology, &store, &cvs, &candidates, &config).unwrap(),
        ] {
            assert_eq!(out.memberships.len(), candidates.len());
            for cand in &candidates {
                let blob = &cand[4..5];
                let m = out.classes_of(cand);
                assert_eq!(m.len(), 1);
                assert_eq!(
                    m[0].class_id,
                    format!("class{blob}"),
                    "{:?} {cand}",
                    out.model
                );
                assert!(m[0].score > 0.9);
            }
            assert!(out.memberships.keys().all(|k| !k.starts_with("seed")));
        }
    }

    #[test]
    fn single_class_and_oov_candidates() {
        let (_, store, candidates) = fixture();
        let ontology = Ontology::new(vec![OntologyClass::new("only", ["seed00"])]).unwrap();
        let cvs = derive_class_vectors(&ontology, &store, AggregationMethod::Centroid);
        let out = m4_assign(
            &ontology,
            &store,
            &cvs,
            &candidates,
            &ModelConfig::default(),
        )
        .unwrap();
        assert!(candidates
            .iter()
            .all(|c| out.classes_of(c)[0].class_id == "only"));

        let oov = vec!["ghost".to_string(), "phantom".to_string()];
        assert!(
            m5_assign(&ontology, &store, &cvs, &oov, &ModelConfig::default())
                .unwrap()
                .is_empty()
        );
    }
}
