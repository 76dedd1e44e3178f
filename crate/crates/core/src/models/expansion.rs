//! Taxonomy set expansion.
//!
//! For each class: pick one sense per seed word (the sense whose best
//! common ancestors with the other seeds are deepest on average), take the
//! deepest ancestor shared by all chosen senses, collect the lemmas under
//! it, drop the seeds and keep what is also a candidate.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use super::{ModelOutput, ModelTag};
use crate::error::Result;
use crate::ontology::{Ontology, OntologyClass};
use crate::taxonomy::{Ancestor, TaxonomyStore};

/// Expansion sets per class id. Classes that cannot be expanded are
/// absent or map to an empty set.
pub fn m3_expand(
    ontology: &Ontology,
    taxonomy: &TaxonomyStore,
    candidates: &[String],
) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let candidates: BTreeSet<&str> = candidates.iter().map(String::as_str).collect();
    let mut result = BTreeMap::new();
    for class in ontology.classes() {
        if let Some(expansion) = expand_class(class, taxonomy, &candidates)? {
            result.insert(class.id.clone(), expansion);
        }
    }
    Ok(result)
}

fn expand_class(
    class: &OntologyClass,
    taxonomy: &TaxonomyStore,
    candidates: &BTreeSet<&str>,
) -> Result<Option<BTreeSet<String>>> {
    let mut words: Vec<(&str, Vec<&str>)> = Vec::new();
    for seed in class.seeds.iter().collect::<BTreeSet<_>>() {
        let senses = taxonomy.senses_of(seed);
        if senses.is_empty() {
            warn!(
                "M3: class `{}`: seed `{seed}` has no synset; skipped",
                class.id
            );
        } else {
            words.push((seed, senses));
        }
    }
    if words.len() < 2 {
        warn!(
            "M3: class `{}` has {} seeds with synsets (need 2); skipped",
            class.id,
            words.len()
        );
        return Ok(None);
    }

    let mut chosen = Vec::with_capacity(words.len());
    for (i, (_, senses)) in words.iter().enumerate() {
        let mut best: Option<(&str, f64)> = None;
        for &sense in senses {
            let mut total = 0i64;
            for (j, (_, others)) in words.iter().enumerate() {
                if i == j {
                    continue;
                }
                let mut deepest = i64::MIN;
                for &other in others {
                    let lca = taxonomy.lowest_common_ancestor(sense, other)?;
                    deepest = deepest.max(taxonomy.ancestor_depth(lca));
                }
                total += deepest;
            }
            let average = total as f64 / (words.len() - 1) as f64;
            // senses are visited in id order, so strict > keeps the smaller id on ties
            if best.is_none_or(|(_, b)| average > b) {
                best = Some((sense, average));
            }
        }
        chosen.push(best.map(|(s, _)| s).unwrap_or_default());
    }

    let root = match taxonomy.common_ancestor_of(chosen.iter().copied())? {
        Ancestor::Synset(id) => id,
        Ancestor::SuperRoot => {
            warn!(
                "M3: class `{}`: seed senses share no ancestor; expansion degenerated",
                class.id
            );
            return Ok(Some(BTreeSet::new()));
        }
    };
    let gazetteer = taxonomy.subtree_lemmas(root)?;
    Ok(Some(
        gazetteer
            .into_iter()
            .filter(|lemma| !class.has_seed(lemma) && candidates.contains(lemma.as_str()))
            .collect(),
    ))
}

/// Runs set expansion and reports each expanded instance with score 1.
pub fn m3_run(
    ontology: &Ontology,
    taxonomy: &TaxonomyStore,
    candidates: &[String],
) -> Result<ModelOutput> {
    let mut out = ModelOutput::new(ModelTag::M3);
    for (class, words) in m3_expand(ontology, taxonomy, candidates)? {
        for word in words {
            out.insert(&word, &class, 1.0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::Synset;

    fn syn(id: &str, lemmas: &[&str], hypernyms: &[&str]) -> Synset {
        Synset {
            id: id.into(),
            lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
            hypernyms: hypernyms.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn disjoint_components_degenerate() {
        let t = TaxonomyStore::new(vec![
            syn("animal", &["animal"], &[]),
            syn("dog", &["dog"], &["animal"]),
            syn("rock", &["rock"], &[]),
            syn("granite", &["granite"], &["rock"]),
        ])
        .unwrap();
        let o = Ontology::new(vec![OntologyClass::new("mixed", ["dog", "granite"])]).unwrap();
        let out = m3_expand(&o, &t, &strings(&["animal", "rock"])).unwrap();
        assert_eq!(out["mixed"], BTreeSet::new());
    }

    #[test]
    fn classes_without_enough_senses_are_skipped() {
        let t = TaxonomyStore::new(vec![syn("dog", &["dog"], &[])]).unwrap();
        let o = Ontology::new(vec![OntologyClass::new("k", ["dog", "unicorn"])]).unwrap();
        assert!(m3_expand(&o, &t, &strings(&["dog"])).unwrap().is_empty());
    }

    #[test]
    fn sense_choice_follows_the_other_seeds() {
        // "bass" is both a fish and an instrument; with "trout" the fish sense wins
        let t = TaxonomyStore::new(vec![
            syn("entity", &["entity"], &[]),
            syn("fish", &["fish"], &["entity"]),
            syn("bass.fish", &["bass"], &["fish"]),
            syn("trout", &["trout"], &["fish"]),
            syn("salmon", &["salmon"], &["fish"]),
            syn("instrument", &["instrument"], &["entity"]),
            syn("bass.instr", &["bass"], &["instrument"]),
            syn("cello", &["cello"], &["instrument"]),
        ])
        .unwrap();
        let o = Ontology::new(vec![
            OntologyClass::new("fishes", ["bass", "trout"]),
            OntologyClass::new("music", ["cello", "bass"]),
        ])
        .unwrap();
        let out = m3_expand(
            &o,
            &t,
            &strings(&["salmon", "cello", "instrument", "fish", "entity"]),
        )
        .unwrap();
        assert_eq!(
            out["fishes"],
            BTreeSet::from(["fish".to_string(), "salmon".to_string()])
        );
        assert_eq!(out["music"], BTreeSet::from(["instrument".to_string()]));
    }
}
