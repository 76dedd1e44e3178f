//! Synthetic, mutually consistent input sets with planted class structure.
//!
//! `noise` is a fraction in `[0, 1]`. Each class gets a random unit
//! direction `mu`, and its seeds and instances are
//! `normalize((1 - noise) * mu + noise * z)` with `z` a random direction, so
//! noise 1 erases the class signal. Instances hang under their class's
//! group synset in the taxonomy, except that with probability `noise` an
//! instance is filed under a uniformly random group.
//! Distractor tokens pad the vocabulary and occur too rarely in the corpus
//! to become candidates.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::embeddings::{normalized, EmbeddingStore};
use crate::error::{Error, Result};
use crate::ontology::{save_population, GoldStandard, Ontology, OntologyClass};
use crate::taxonomy::{Synset, TaxonomyStore};

#[derive(Clone, Debug, PartialEq)]
pub struct FixtureSpec {
    pub classes: usize,
    pub per_class: usize,
    pub noise: f64,
    pub seed: u64,
    pub seeds_per_class: usize,
    pub dim: usize,
    /// Target vocabulary size; raised if the planted tokens need more.
    pub vocab: usize,
    pub min_count: usize,
}

impl FixtureSpec {
    pub fn new(classes: usize, per_class: usize, noise: f64, seed: u64) -> Self {
        FixtureSpec {
            classes,
            per_class,
            noise,
            seed,
            seeds_per_class: 5,
            dim: 200,
            vocab: 1000,
            min_count: 5,
        }
    }
}

pub struct Fixture {
    pub store: EmbeddingStore,
    pub ontology: Ontology,
    pub documents: Vec<(String, String)>,
    pub taxonomy: TaxonomyStore,
    pub gold: GoldStandard,
}

const FILLER: &[&str] = &[
    "the", "court", "noted", "that", "and", "were", "cited", "in", "record",
];

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

fn around(rng: &mut ChaCha8Rng, center: &[f64], noise: f64) -> Vec<f64> {
    loop {
        let z = unit(rng, center.len());
        let v: Vec<f64> = center
            .iter()
            .zip(&z)
            .map(|(c, z)| (1.0 - noise) * c + noise * z)
            .collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    if spec.classes < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 classes, got {}",
            spec.classes
        )));
    }
    if spec.per_class == 0 || spec.seeds_per_class == 0 || spec.dim == 0 || spec.min_count == 0 {
        return Err(Error::InvalidArgument(
            "per_class, seeds_per_class, dim and min_count must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&spec.noise) {
        return Err(Error::InvalidArgument(format!(
            "noise must lie in [0, 1], got {}",
            spec.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    // keep clear of the stream that split and k-means draw from the same seed
    rng.set_stream(1);
    let class_ids: Vec<String> = (0..spec.classes).map(|j| format!("class{j}")).collect();
    let centers: Vec<Vec<f64>> = (0..spec.classes)
        .map(|_| unit(&mut rng, spec.dim))
        .collect();

    // instance names are handed out in shuffled order so they carry no label
    let mut labels: Vec<usize> = (0..spec.classes)
        .flat_map(|j| std::iter::repeat_n(j, spec.per_class))
        .collect();
    labels.shuffle(&mut rng);
    let width = labels.len().to_string().len().max(4);
    let instances: Vec<(String, usize)> = labels
        .iter()
        .enumerate()
        .map(|(i, &j)| (format!("w{i:0width$}"), j))
        .collect();

    let mut rows: Vec<(String, Vec<f64>)> = Vec::new();
    let mut classes = Vec::new();
    let mut synsets: Vec<Synset> = class_ids
        .iter()
        .map(|id| Synset {
            id: format!("{id}.group"),
            lemmas: vec![id.clone()],
            hypernyms: vec![],
        })
        .collect();
    for (j, id) in class_ids.iter().enumerate() {
        let seeds: Vec<String> = (0..spec.seeds_per_class)
            .map(|s| format!("s{j}x{s}"))
            .collect();
        for seed in &seeds {
            rows.push((seed.clone(), around(&mut rng, &centers[j], spec.noise)));
            synsets.push(Synset {
                id: format!("{seed}.n.01"),
                lemmas: vec![seed.clone()],
                hypernyms: vec![format!("{id}.group")],
            });
        }
        let mut class = OntologyClass::new(id.clone(), seeds);
        class.label = format!("Class {j}");
        classes.push(class);
    }

    let mut gold = GoldStandard::default();
    for (name, j) in &instances {
        rows.push((name.clone(), around(&mut rng, &centers[*j], spec.noise)));
        let filed = if rng.random::<f64>() < spec.noise {
            rng.random_range(0..spec.classes)
        } else {
            *j
        };
        synsets.push(Synset {
            id: format!("{name}.n.01"),
            lemmas: vec![name.clone()],
            hypernyms: vec![format!("{}.group", class_ids[filed])],
        });
        gold.classes
            .entry(class_ids[*j].clone())
            .or_default()
            .insert(name.clone());
    }

    let distractors = spec.vocab.saturating_sub(rows.len());
    let dwidth = distractors.to_string().len().max(4);
    let mut occurrences: Vec<String> = Vec::new();
    for d in 0..distractors {
        let name = format!("d{d:0dwidth$}");
        for _ in 0..rng.random_range(0..spec.min_count) {
            occurrences.push(name.clone());
        }
        rows.push((name, unit(&mut rng, spec.dim)));
    }
    for (name, _) in &instances {
        for _ in 0..spec.min_count + rng.random_range(0..4) {
            occurrences.push(name.clone());
        }
    }
    for class in &classes {
        for seed in &class.seeds {
            occurrences.extend(std::iter::repeat_n(seed.clone(), 2));
        }
    }
    occurrences.shuffle(&mut rng);

    let mut documents = Vec::new();
    for (d, chunk) in occurrences.chunks(60).enumerate() {
        let mut text = String::new();
        for pair in chunk.chunks(2) {
            let a = FILLER[rng.random_range(0..FILLER.len())];
            let b = FILLER[rng.random_range(0..FILLER.len())];
            let sentence = match pair {
                [x, y] => format!("The {x} and {y} were {a} {b}. "),
                [x] => format!("The {x} was {a} in the {b}. "),
                _ => unreachable!(),
            };
            text.push_str(&sentence);
        }
        text.push('\n');
        documents.push((format!("doc{d:04}"), text));
    }

    Ok(Fixture {
        store: EmbeddingStore::from_rows(spec.dim, rows)?,
        ontology: Ontology::new(classes)?,
        documents,
        taxonomy: TaxonomyStore::new(synsets)?,
        gold,
    })
}

/// Writes the fixture files and a `config.toml` that points at them.
pub fn write(fixture: &Fixture, spec: &FixtureSpec, dir: &Path) -> Result<()> {
    let corpus = dir.join("corpus");
    fs::create_dir_all(&corpus).map_err(|e| Error::io(&corpus, e))?;
    fixture.store.save_binary(dir.join("embeddings.bin"))?;
    save_population(&fixture.ontology, dir.join("ontology.json"))?;
    for (id, text) in &fixture.documents {
        let path = corpus.join(format!("{id}.txt"));
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }
    let path = dir.join("taxonomy.json");
    fs::write(&path, fixture.taxonomy.to_json_string()?).map_err(|e| Error::io(&path, e))?;
    fixture.gold.save(dir.join("gold.json"))?;

    let config = format!(
        "embeddings = \"embeddings.bin\"\n\
         embedding_format = \"binary\"\n\
         ontology = \"ontology.json\"\n\
         corpus = \"corpus\"\n\
         taxonomy = \"taxonomy.json\"\n\
         gold = \"gold.json\"\n\
         output = \"out\"\n\
         min_count = {}\n\
         kmeans_seed = {}\n\
         split_seed = {}\n\
         threshold = 0.0\n\
         class_vector_method = \"centroid\"\n",
        spec.min_count, spec.seed, spec.seed
    );
    let path = dir.join("config.toml");
    fs::write(&path, config).map_err(|e| Error::io(&path, e))
}

/// Gold class per instance, for callers that want the planted labels.
pub fn planted_labels(gold: &GoldStandard) -> BTreeMap<String, String> {
    gold.classes
        .iter()
        .flat_map(|(class, words)| words.iter().map(move |w| (w.clone(), class.clone())))
        .collect()
}

/// Instances filed under their true group in the taxonomy.
pub fn correctly_filed(fixture: &Fixture) -> BTreeSet<String> {
    planted_labels(&fixture.gold)
        .into_iter()
        .filter(|(word, class)| {
            fixture
                .taxonomy
                .synset(&format!("{word}.n.01"))
                .is_some_and(|s| s.hypernyms == [format!("{class}.group")])
        })
        .map(|(word, _)| word)
        .collect()
}
