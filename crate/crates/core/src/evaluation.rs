//! Precision, recall and F1 against a gold standard, and the
//! train/validation/test split.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ensemble::EnsembleOutput;
use crate::error::{Error, Result};
use crate::models::{ModelOutput, ModelTag};
use crate::ontology::{GoldStandard, Ontology};

/// `(precision, recall)` of a model's words for one class. Precision is 0
/// for an empty model set and recall is 0 for an empty gold set.
pub fn class_precision_recall(model: &BTreeSet<String>, gold: &BTreeSet<String>) -> (f64, f64) {
    let hits = model.intersection(gold).count() as f64;
    let precision = if model.is_empty() {
        0.0
    } else {
        hits / model.len() as f64
    };
    let recall = if gold.is_empty() {
        warn!("empty gold set; recall taken as 0");
        0.0
    } else {
        hits / gold.len() as f64
    };
    (precision, recall)
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall <= 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSizes {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl Split {
    pub fn sizes(&self) -> SplitSizes {
        SplitSizes {
            train: self.train.len(),
            validation: self.validation.len(),
            test: self.test.len(),
        }
    }
}

/// Part sizes by largest-remainder rounding; equal remainders favour the
/// earlier part.
pub fn split_sizes(n: usize, ratios: (f64, f64, f64)) -> Result<SplitSizes> {
    let r = [ratios.0, ratios.1, ratios.2];
    if r.iter().any(|x| !x.is_finite() || *x < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "split ratios must be non-negative and sum to 1, got {ratios:?}"
        )));
    }
    let exact: Vec<f64> = r.iter().map(|x| x * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let short = n.saturating_sub(sizes.iter().sum());
    for &i in order.iter().take(short) {
        sizes[i] += 1;
    }
    Ok(SplitSizes {
        train: sizes[0],
        validation: sizes[1],
        test: sizes[2],
    })
}

/// Seeded shuffle of the candidates cut into train, validation and test.
pub fn split_corpus(
    candidates: &[String],
    ratios: (f64, f64, f64),
    rng_seed: u64,
) -> Result<Split> {
    if candidates.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot split an empty candidate set".into(),
        ));
    }
    let sizes = split_sizes(candidates.len(), ratios)?;
    let mut shuffled = candidates.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let test = shuffled.split_off(sizes.train + sizes.validation);
    let validation = shuffled.split_off(sizes.train);
    Ok(Split {
        train: shuffled,
        validation,
        test,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Where the ensemble weights came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSource {
    Explicit,
    ValidationF1,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_class: BTreeMap<ModelTag, BTreeMap<String, ClassScore>>,
    pub per_model: BTreeMap<ModelTag, ModelScore>,
    pub ensemble: Option<ModelScore>,
    pub ensemble_per_class: BTreeMap<String, ClassScore>,
    pub split_sizes: Option<SplitSizes>,
    pub weights: Option<Vec<f64>>,
    pub weight_source: Option<WeightSource>,
    pub threshold: f64,
    pub warnings: Vec<String>,
}

/// Macro-averaged scores of one word assignment. Only classes present in
/// both the ontology and the gold standard are averaged. With a
/// `universe`, model and gold sets are first restricted to it.
pub fn score_words(
    words: &BTreeMap<String, BTreeSet<String>>,
    gold: &GoldStandard,
    classes: &[String],
    universe: Option<&BTreeSet<String>>,
) -> (BTreeMap<String, ClassScore>, ModelScore) {
    let restrict = |set: &BTreeSet<String>| -> BTreeSet<String> {
        match universe {
            Some(u) => set.intersection(u).cloned().collect(),
            None => set.clone(),
        }
    };
    let empty = BTreeSet::new();
    let mut per_class = BTreeMap::new();
    for class in classes {
        let Some(gold_words) = gold.words(class) else {
            continue;
        };
        let (precision, recall) = class_precision_recall(
            &restrict(words.get(class).unwrap_or(&empty)),
            &restrict(gold_words),
        );
        per_class.insert(class.clone(), ClassScore { precision, recall });
    }
    let n = per_class.len().max(1) as f64;
    let precision = per_class.values().map(|s| s.precision).sum::<f64>() / n;
    let recall = per_class.values().map(|s| s.recall).sum::<f64>() / n;
    (
        per_class,
        ModelScore {
            precision,
            recall,
            f1: f1(precision, recall),
        },
    )
}

/// Scores every model output and, if given, the ensemble decisions.
pub fn evaluate_models(
    outputs: &[ModelOutput],
    ensemble: Option<&EnsembleOutput>,
    gold: &GoldStandard,
    ontology: &Ontology,
    universe: Option<&BTreeSet<String>>,
) -> EvalReport {
    let mut report = EvalReport::default();
    let mut classes = Vec::new();
    for id in ontology.class_ids() {
        if gold.words(&id).is_some() {
            classes.push(id);
        } else {
            let msg =
                format!("gold standard has no entry for class `{id}`; excluded from averaging");
            warn!("{msg}");
            report.warnings.push(msg);
        }
    }
    for id in gold.classes.keys() {
        if ontology.class(id).is_none() {
            report
                .warnings
                .push(format!("gold class `{id}` is not in the ontology; ignored"));
        }
    }
    for output in outputs {
        let (per_class, score) = score_words(&output.class_words(), gold, &classes, universe);
        report.per_class.insert(output.model, per_class);
        report.per_model.insert(output.model, score);
    }
    if let Some(ensemble) = ensemble {
        let (per_class, score) = score_words(&ensemble.class_words(), gold, &classes, universe);
        report.ensemble_per_class = per_class;
        report.ensemble = Some(score);
    }
    report
}

impl EvalReport {
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Plain-text table with one row per model and one for the ensemble.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10}{:>10}{:>10}{:>10}",
            "model", "precision", "recall", "f1"
        );
        let mut row = |name: &str, s: &ModelScore| {
            let _ = writeln!(
                out,
                "{name:<10}{:>10.4}{:>10.4}{:>10.4}",
                s.precision, s.recall, s.f1
            );
        };
        for (tag, score) in &self.per_model {
            row(tag.as_str(), score);
        }
        if let Some(score) = &self.ensemble {
            row("ensemble", score);
        }
        if let Some(weights) = &self.weights {
            let source = match self.weight_source {
                Some(WeightSource::Explicit) => "explicit",
                Some(WeightSource::ValidationF1) => "validation F1",
                None => "unknown",
            };
            let listed: Vec<String> = self
                .per_model
                .keys()
                .zip(weights)
                .map(|(tag, w)| format!("{tag}={w:.4}"))
                .collect();
            let _ = writeln!(out, "\nweights ({source}): {}", listed.join(" "));
        }
        let _ = writeln!(out, "threshold: {}", self.threshold);
        if let Some(s) = &self.split_sizes {
            let _ = writeln!(
                out,
                "split: train={} validation={} test={}",
                s.train, s.validation, s.test
            );
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
