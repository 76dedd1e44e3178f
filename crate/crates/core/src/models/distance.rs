use log::warn;

use super::{ModelOutput, ModelTag};
use crate::embeddings::{cosine, EmbeddingStore};
use crate::error::{Error, Result};
use crate::ontology::ClassVector;

/// Class whose vector is most cosine-similar to `vector`. Equal scores go
/// to the smaller class id.
pub(crate) fn nearest_class<'c>(
    vector: &[f64],
    class_vectors: &'c [ClassVector],
) -> Result<(&'c str, f64)> {
    let mut best: Option<(&str, f64)> = None;
    for cv in class_vectors {
        let score = cosine(vector, &cv.vector)?;
        best = match best {
            Some((id, s)) if s > score || (s == score && id <= cv.class_id.as_str()) => {
                Some((id, s))
            }
            _ => Some((&cv.class_id, score)),
        };
    }
    best.ok_or_else(|| Error::InvalidArgument("no class vectors".into()))
}

/// Membership by distance: the class whose representative vector has the
/// highest cosine similarity to the instance. `Ok(None)` means the
/// instance is out of vocabulary.
pub fn m1_assign<'c>(
    instance: &str,
    class_vectors: &'c [ClassVector],
    store: &EmbeddingStore,
) -> Result<Option<(&'c str, f64)>> {
    match store.vector_of(instance) {
        Some(v) => nearest_class(v, class_vectors).map(Some),
        None => Ok(None),
    }
}

pub fn m1_run(
    candidates: &[String],
    class_vectors: &[ClassVector],
    store: &EmbeddingStore,
) -> Result<ModelOutput> {
    let mut out = ModelOutput::new(ModelTag::M1);
    if class_vectors.is_empty() {
        warn!("M1: no class vectors; nothing assigned");
        return Ok(out);
    }
    for instance in candidates {
        match m1_assign(instance, class_vectors, store)? {
            Some((class, score)) => out.insert(instance, class, score),
            None => warn!("M1: skipping out-of-vocabulary instance `{instance}`"),
        }
    }
    Ok(out)
}
