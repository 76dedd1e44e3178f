use log::warn;

use super::{ModelOutput, ModelTag};
use crate::embeddings::{dot, normalized, EmbeddingStore};
use crate::error::{Error, Result};
use crate::ontology::Ontology;

/// Result of a dissimilar-exclusion query over a member list.
#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionOutcome {
    /// Position of the excluded member in the input.
    pub excluded: usize,
    /// Cosine similarity of every member to the set mean.
    pub similarities: Vec<f64>,
}

/// Cosine similarity of each vector to the mean of the unit-normalized
/// vectors. A zero mean gives every member similarity 0.
pub fn exclusion_scores<V: AsRef<[f64]>>(vectors: &[V]) -> Result<Vec<f64>> {
    let units = vectors
        .iter()
        .map(|v| {
            normalized(v.as_ref())
                .ok_or_else(|| Error::Degenerate("zero vector in exclusion set".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = units.first().map_or(0, Vec::len);
    if let Some(bad) = units.iter().find(|u| u.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.len(),
        });
    }
    let mut mean = vec![0.0; dim];
    for u in &units {
        for (m, x) in mean.iter_mut().zip(u) {
            *m += x;
        }
    }
    let mean = normalized(&mean);
    Ok(units
        .iter()
        .map(|u| mean.as_ref().map_or(0.0, |m| dot(u, m).clamp(-1.0, 1.0)))
        .collect())
}

fn exclude(tokens: &[&str], vectors: &[&[f64]]) -> Result<ExclusionOutcome> {
    if tokens.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "exclusion needs at least 3 members, got {}",
            tokens.len()
        )));
    }
    let similarities = exclusion_scores(vectors)?;
    let excluded = (0..tokens.len())
        .min_by(|&a, &b| {
            similarities[a]
                .total_cmp(&similarities[b])
                .then_with(|| tokens[a].cmp(tokens[b]))
                .then(a.cmp(&b))
        })
        .unwrap_or(0);
    Ok(ExclusionOutcome {
        excluded,
        similarities,
    })
}

/// The member whose removal most increases set cohesion: the one least
/// similar to the mean direction. Equal similarities go to the smaller token.
pub fn exclusion<'a>(members: &[(&'a str, &[f64])]) -> Result<&'a str> {
    let tokens: Vec<&str> = members.iter().map(|(t, _)| *t).collect();
    let vectors: Vec<&[f64]> = members.iter().map(|(_, v)| *v).collect();
    let outcome = exclude(&tokens, &vectors)?;
    Ok(members[outcome.excluded].0)
}

/// Classes the instance joins under dissimilar exclusion: those where, once
/// the instance is added to the class's seeds, a seed rather than the
/// instance is excluded.
///
/// The confidence is the instance's similarity to the set mean minus that
/// of the excluded seed, clamped to `[0, 1]`. Returns `Ok(None)` for an
/// out-of-vocabulary instance.
pub fn m2_memberships(
    instance: &str,
    ontology: &Ontology,
    store: &EmbeddingStore,
    min_seeds: usize,
) -> Result<Option<Vec<(String, f64)>>> {
    let Some(instance_vec) = store.vector_of(instance) else {
        return Ok(None);
    };
    let min_seeds = min_seeds.max(2);
    let mut result = Vec::new();
    let mut classes: Vec<_> = ontology.classes().iter().collect();
    classes.sort_by(|a, b| a.id.cmp(&b.id));
    for class in classes {
        let mut tokens = Vec::new();
        let mut vectors = Vec::new();
        for seed in &class.seeds {
            if seed == instance || tokens.contains(&seed.as_str()) {
                continue;
            }
            if let Some(v) = store.vector_of(seed) {
                tokens.push(seed.as_str());
                vectors.push(v);
            }
        }
        if tokens.len() < min_seeds {
            warn!(
                "M2: class `{}` has {} usable seeds (need {min_seeds}); skipped",
                class.id,
                tokens.len()
            );
            continue;
        }
        tokens.push(instance);
        vectors.push(instance_vec);
        let outcome = exclude(&tokens, &vectors)?;
        let instance_pos = tokens.len() - 1;
        if outcome.excluded != instance_pos {
            let margin =
                outcome.similarities[instance_pos] - outcome.similarities[outcome.excluded];
            result.push((class.id.clone(), margin.clamp(0.0, 1.0)));
        }
    }
    Ok(Some(result))
}

pub fn m2_run(
    candidates: &[String],
    ontology: &Ontology,
    store: &EmbeddingStore,
    min_seeds: usize,
) -> Result<ModelOutput> {
    let mut out = ModelOutput::new(ModelTag::M2);
    for instance in candidates {
        match m2_memberships(instance, ontology, store, min_seeds)? {
            Some(classes) => {
                for (class, score) in classes {
                    out.insert(instance, &class, score);
                }
            }
            None => warn!("M2: skipping out-of-vocabulary instance `{instance}`"),
        }
    }
    Ok(out)
}
