//! Ontology classes with seed and populated instances, their JSON
//! persistence, and representative class vectors.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::embeddings::{norm, EmbeddingStore};
use crate::error::{Error, Result};

/// An instance added to a class by population, with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulatedInstance {
    pub instance: String,
    /// Tags of the models that voted for this class.
    pub models: Vec<String>,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OntologyClass {
    pub id: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub parent: Option<String>,
    #[serde(default)]
    pub seeds: Vec<String>,
    #[serde(default)]
    pub populated: Vec<PopulatedInstance>,
}

impl OntologyClass {
    pub fn new(id: impl Into<String>, seeds: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let id = id.into();
        OntologyClass {
            label: id.clone(),
            id,
            parent: None,
            seeds: seeds.into_iter().map(Into::into).collect(),
            populated: Vec::new(),
        }
    }

    pub fn has_seed(&self, token: &str) -> bool {
        self.seeds.iter().any(|s| s == token)
    }
}

/// A forest of classes. Construct through [`Ontology::new`] or
/// [`load_ontology`] so the structural invariants hold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ontology {
    classes: Vec<OntologyClass>,
}

#[derive(Deserialize)]
struct RawOntology {
    classes: Vec<OntologyClass>,
}

impl Ontology {
    /// Validates the classes, logging warnings. Empty seed sets are allowed.
    pub fn new(classes: Vec<OntologyClass>) -> Result<Self> {
        let ontology = Ontology { classes };
        for warning in ontology.validate(false)? {
            warn!("{warning}");
        }
        Ok(ontology)
    }

    /// Checks structural invariants and returns the non-fatal findings.
    ///
    /// Fatal: duplicate class ids, unknown parents, parent cycles, a
    /// populated instance that is also a seed of its class, and (when
    /// `strict`) empty seed sets.
    pub fn validate(&self, strict: bool) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        let mut ids = HashMap::new();
        for (i, class) in self.classes.iter().enumerate() {
            if class.id.is_empty() {
                return Err(Error::Ontology("class with empty id".into()));
            }
            if ids.insert(class.id.as_str(), i).is_some() {
                return Err(Error::DuplicateClass(class.id.clone()));
            }
        }
        for class in &self.classes {
            if let Some(parent) = &class.parent {
                if !ids.contains_key(parent.as_str()) {
                    return Err(Error::Ontology(format!(
                        "class `{}` has unknown parent `{parent}`",
                        class.id
                    )));
                }
            }
            if class.seeds.is_empty() {
                if strict {
                    return Err(Error::Ontology(format!(
                        "class `{}` has no seeds",
                        class.id
                    )));
                }
                warnings.push(format!("class `{}` has no seeds", class.id));
            }
            let unique: BTreeSet<_> = class.seeds.iter().collect();
            if unique.len() != class.seeds.len() {
                warnings.push(format!("class `{}` lists a seed more than once", class.id));
            }
            if let Some(p) = class.populated.iter().find(|p| class.has_seed(&p.instance)) {
                return Err(Error::Ontology(format!(
                    "class `{}` lists seed `{}` as populated",
                    class.id, p.instance
                )));
            }
        }
        if let Some(cycle) = self.find_cycle(&ids) {
            return Err(Error::ClassCycle(cycle));
        }

        let mut owners: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for class in &self.classes {
            for seed in class.seeds.iter().collect::<BTreeSet<_>>() {
                owners.entry(seed).or_default().push(&class.id);
            }
        }
        for (seed, classes) in owners {
            if classes.len() > 1 {
                warnings.push(format!(
                    "seed `{seed}` is shared by classes {}",
                    classes.join(", ")
                ));
            }
        }
        Ok(warnings)
    }

    fn find_cycle(&self, ids: &HashMap<&str, usize>) -> Option<Vec<String>> {
        // 0 = unvisited, 1 = on the current chain, 2 = done
        let mut state = vec![0u8; self.classes.len()];
        for start in 0..self.classes.len() {
            let mut chain: Vec<usize> = Vec::new();
            let mut current = Some(start);
            while let Some(i) = current {
                match state[i] {
                    2 => break,
                    1 => {
                        let from = chain.iter().position(|&c| c == i).unwrap_or(0);
                        let mut cycle: Vec<String> = chain[from..]
                            .iter()
                            .map(|&c| self.classes[c].id.clone())
                            .collect();
                        cycle.push(self.classes[i].id.clone());
                        return Some(cycle);
                    }
                    _ => {}
                }
                state[i] = 1;
                chain.push(i);
                current = self.classes[i]
                    .parent
                    .as_deref()
                    .and_then(|p| ids.get(p).copied());
            }
            for i in chain {
                state[i] = 2;
            }
        }
        None
    }

    pub fn classes(&self) -> &[OntologyClass] {
        &self.classes
    }

    pub fn class(&self, id: &str) -> Option<&OntologyClass> {
        self.classes.iter().find(|c| c.id == id)
    }

    /// Class ids in lexicographic order.
    pub fn class_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.classes.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        ids
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Union of every class's seeds.
    pub fn all_seeds(&self) -> BTreeSet<String> {
        self.classes
            .iter()
            .flat_map(|c| c.seeds.iter().cloned())
            .collect()
    }

    /// Adds `instance` to a class. Seeds of that class are never re-added,
    /// and an existing populated entry for the instance is replaced.
    pub fn populate(&mut self, class_id: &str, entry: PopulatedInstance) -> Result<bool> {
        let class = self
            .classes
            .iter_mut()
            .find(|c| c.id == class_id)
            .ok_or_else(|| Error::UnknownClass(class_id.to_string()))?;
        if class.has_seed(&entry.instance) {
            return Ok(false);
        }
        class.populated.retain(|p| p.instance != entry.instance);
        class.populated.push(entry);
        Ok(true)
    }

    pub fn clear_population(&mut self) {
        for class in &mut self.classes {
            class.populated.clear();
        }
    }

    pub fn from_json_str(json: &str, strict: bool) -> Result<Self> {
        let raw: RawOntology = serde_json::from_str(json)?;
        let ontology = Ontology {
            classes: raw.classes,
        };
        for warning in ontology.validate(strict)? {
            warn!("{warning}");
        }
        Ok(ontology)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        Ok(json)
    }
}

pub fn load_ontology(path: impl AsRef<Path>) -> Result<Ontology> {
    let path = path.as_ref();
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ontology::from_json_str(&json, false)
}

/// Writes the ontology, including populated instances, as JSON.
pub fn save_population(ontology: &Ontology, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, ontology.to_json_string()?).map_err(|e| Error::io(path, e))
}

/// Expert-curated expected members per class.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldStandard {
    pub classes: BTreeMap<String, BTreeSet<String>>,
}

impl GoldStandard {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&json)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn words(&self, class_id: &str) -> Option<&BTreeSet<String>> {
        self.classes.get(class_id)
    }
}

/// How seed vectors are folded into one class vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMethod {
    #[default]
    Centroid,
    Median,
}

impl FromStr for AggregationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "centroid" => Ok(AggregationMethod::Centroid),
            "median" => Ok(AggregationMethod::Median),
            other => Err(Error::InvalidArgument(format!(
                "unknown class-vector method `{other}` (expected centroid or median)"
            ))),
        }
    }
}

impl fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AggregationMethod::Centroid => "centroid",
            AggregationMethod::Median => "median",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassVector {
    pub class_id: String,
    pub vector: Vec<f64>,
    pub method: AggregationMethod,
}

/// Aggregates the in-vocabulary seed vectors of `class`.
pub fn derive_class_vector(
    class: &OntologyClass,
    store: &EmbeddingStore,
    method: AggregationMethod,
) -> Result<ClassVector> {
    let mut rows = Vec::with_capacity(class.seeds.len());
    for seed in &class.seeds {
        match store.vector_of(seed) {
            Some(v) => rows.push(v),
            None => warn!("class `{}`: seed `{seed}` is out of vocabulary", class.id),
        }
    }
    if rows.is_empty() {
        return Err(Error::NoSeedVectors(class.id.clone()));
    }
    let dim = store.dimension();
    let vector: Vec<f64> = match method {
        AggregationMethod::Centroid => {
            // running mean: exact when all rows are identical
            let mut mean = vec![0.0; dim];
            for (n, row) in rows.iter().enumerate() {
                let n = (n + 1) as f64;
                for (m, x) in mean.iter_mut().zip(row.iter()) {
                    *m += (x - *m) / n;
                }
            }
            mean
        }
        AggregationMethod::Median => {
            let mut column = Vec::with_capacity(rows.len());
            (0..dim)
                .map(|d| {
                    column.clear();
                    column.extend(rows.iter().map(|r| r[d]));
                    median(&mut column)
                })
                .collect()
        }
    };
    if norm(&vector) == 0.0 {
        return Err(Error::Degenerate(format!(
            "class `{}` aggregates to the zero vector",
            class.id
        )));
    }
    Ok(ClassVector {
        class_id: class.id.clone(),
        vector,
        method,
    })
}

/// Class vectors for every class that has at least one usable seed;
/// the remaining classes are reported and skipped.
pub fn derive_class_vectors(
    ontology: &Ontology,
    store: &EmbeddingStore,
    method: AggregationMethod,
) -> Vec<ClassVector> {
    let mut vectors: Vec<ClassVector> = ontology
        .classes()
        .iter()
        .filter_map(|class| match derive_class_vector(class, store, method) {
            Ok(v) => Some(v),
            Err(e) => {
                warn!("skipping class `{}`: {e}", class.id);
                None
            }
        })
        .collect();
    vectors.sort_by(|a, b| a.class_id.cmp(&b.class_id));
    vectors
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
