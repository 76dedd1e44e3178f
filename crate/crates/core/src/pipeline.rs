//! End-to-end population run: candidates, class vectors, the five models,
//! weights, ensemble vote, evaluation and output files.

use std::collections::BTreeSet;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::thread;

use log::{info, warn};

use crate::corpus::{extract_candidates, CorpusConfig};
use crate::embeddings::EmbeddingStore;
use crate::ensemble::{
    assign, compute_weights, membership_matrix, run_ensemble, score, EnsembleOutput,
    EnsembleWeights,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    evaluate_models, score_words, split_corpus, EvalReport, Split, WeightSource,
};
use crate::models::{
    m1_run, m2_run, m3_run, m4_assign, m5_assign, ModelConfig, ModelOutput, ModelTag,
};
use crate::ontology::{
    derive_class_vectors, AggregationMethod, GoldStandard, Ontology, PopulatedInstance,
};
use crate::taxonomy::TaxonomyStore;

/// Loaded artifacts for one run.
pub struct Inputs {
    pub store: EmbeddingStore,
    pub ontology: Ontology,
    /// `(document id, text)` pairs.
    pub documents: Vec<(String, String)>,
    pub taxonomy: Option<TaxonomyStore>,
    pub gold: Option<GoldStandard>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Params {
    pub corpus: CorpusConfig,
    pub method: AggregationMethod,
    pub models: ModelConfig,
    pub split_seed: u64,
    pub split_ratios: (f64, f64, f64),
    pub threshold: f64,
    /// Pick the threshold that maximizes ensemble F1 on the validation split.
    pub tune_threshold: bool,
    pub weights: Option<Vec<f64>>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            corpus: CorpusConfig::default(),
            method: AggregationMethod::Centroid,
            models: ModelConfig::default(),
            split_seed: 13,
            split_ratios: (0.7, 0.2, 0.1),
            threshold: 0.0,
            tune_threshold: false,
            weights: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub candidates: Vec<String>,
    /// One output per model, in M1..M5 order.
    pub outputs: Vec<ModelOutput>,
    pub weights: Option<EnsembleWeights>,
    pub weight_source: Option<WeightSource>,
    pub threshold: f64,
    pub ensemble: EnsembleOutput,
    pub populated: Ontology,
    pub split: Option<Split>,
    pub report: Option<EvalReport>,
    pub warnings: Vec<String>,
}

fn note(warnings: &mut Vec<String>, message: String) {
    warn!("{message}");
    warnings.push(message);
}

/// Runs the five models over `candidates` concurrently. M3 yields an empty
/// output without a taxonomy.
pub fn run_models(
    inputs: &Inputs,
    candidates: &[String],
    params: &Params,
) -> Result<Vec<ModelOutput>> {
    let class_vectors = derive_class_vectors(&inputs.ontology, &inputs.store, params.method);
    let (store, ontology, config) = (&inputs.store, &inputs.ontology, &params.models);
    let cvs = &class_vectors;
    let results: Vec<Result<ModelOutput>> = thread::scope(|s| {
        let handles = [
            s.spawn(move || m1_run(candidates, cvs, store)),
            s.spawn(move || m2_run(candidates, ontology, store, config.min_seeds)),
            s.spawn(move || match &inputs.taxonomy {
                Some(t) => m3_run(ontology, t, candidates),
                None => Ok(ModelOutput::new(ModelTag::M3)),
            }),
            s.spawn(move || m4_assign(ontology, store, cvs, candidates, config)),
            s.spawn(move || m5_assign(ontology, store, cvs, candidates, config)),
        ];
        handles
            .into_iter()
            .map(|h| h.join().expect("model thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

/// Threshold in `{0} ∪ {top ensemble scores}` with the best validation F1;
/// ties go to the smaller threshold.
fn tune_threshold(
    outputs: &[ModelOutput],
    weights: &EnsembleWeights,
    classes: &[String],
    gold: &GoldStandard,
    validation: &BTreeSet<String>,
) -> Result<f64> {
    let mut options = vec![0.0];
    for instance in validation {
        let s = score(weights, &membership_matrix(instance, outputs, classes)?)?;
        if let Some(c) = assign(&s, classes, 0.0) {
            options.push(s[classes.iter().position(|x| x == c).unwrap_or(0)]);
        }
    }
    options.sort_by(f64::total_cmp);
    options.dedup();
    let mut best = (0.0, f64::NEG_INFINITY);
    for t in options {
        let ensemble = run_ensemble(validation, outputs, weights, classes, t)?;
        let (_, s) = score_words(&ensemble.class_words(), gold, classes, Some(validation));
        if s.f1 > best.1 {
            best = (t, s.f1);
        }
    }
    Ok(best.0)
}

pub fn run(inputs: &Inputs, params: &Params) -> Result<RunResult> {
    if !(0.0..=1.0).contains(&params.threshold) {
        return Err(Error::Config(format!(
            "threshold {} outside [0, 1]",
            params.threshold
        )));
    }
    let explicit = params
        .weights
        .as_deref()
        .map(|w| {
            if w.len() != ModelTag::ALL.len() {
                return Err(Error::Config(format!(
                    "expected 5 ensemble weights, got {}",
                    w.len()
                )));
            }
            EnsembleWeights::explicit(w)
        })
        .transpose()?;
    if explicit.is_none() && inputs.gold.is_none() {
        return Err(Error::Config(
            "no ensemble weight source: set `weights` or provide a gold standard".into(),
        ));
    }

    let mut warnings = Vec::new();
    for w in inputs.ontology.validate(false)? {
        note(&mut warnings, w);
    }
    let corpus = extract_candidates(
        inputs
            .documents
            .iter()
            .map(|(id, text)| (id.as_str(), text.as_str())),
        &inputs.store,
        &inputs.ontology,
        params.corpus,
    )?;
    let candidates = corpus.candidates;
    info!(
        "{} candidates from {} documents",
        candidates.len(),
        corpus.documents.len()
    );
    if inputs.taxonomy.is_none() {
        note(&mut warnings, "no taxonomy given; M3 skipped".into());
    }
    let classes = inputs.ontology.class_ids();

    if candidates.is_empty() {
        note(&mut warnings, "no candidates; population is empty".into());
        return Ok(RunResult {
            candidates,
            outputs: ModelTag::ALL.iter().map(|&t| ModelOutput::new(t)).collect(),
            weights: explicit.clone(),
            weight_source: explicit.map(|_| WeightSource::Explicit),
            threshold: params.threshold,
            ensemble: EnsembleOutput::default(),
            populated: inputs.ontology.clone(),
            split: None,
            report: None,
            warnings,
        });
    }

    let outputs = run_models(inputs, &candidates, params)?;

    let split = match &inputs.gold {
        Some(_) => Some(split_corpus(
            &candidates,
            params.split_ratios,
            params.split_seed,
        )?),
        None => None,
    };
    let (weights, source) = match (explicit, &split, &inputs.gold) {
        (Some(w), _, _) => (w, WeightSource::Explicit),
        (None, Some(split), Some(gold)) => {
            let validation: BTreeSet<String> = split.validation.iter().cloned().collect();
            let report = evaluate_models(&outputs, None, gold, &inputs.ontology, Some(&validation));
            let f1s: Vec<f64> = outputs
                .iter()
                .map(|o| report.per_model[&o.model].f1)
                .collect();
            (compute_weights(&f1s)?, WeightSource::ValidationF1)
        }
        _ => unreachable!("weight source checked above"),
    };

    let threshold = match (&split, &inputs.gold) {
        (Some(split), Some(gold)) if params.tune_threshold => {
            let validation: BTreeSet<String> = split.validation.iter().cloned().collect();
            tune_threshold(&outputs, &weights, &classes, gold, &validation)?
        }
        _ => params.threshold,
    };

    let ensemble = run_ensemble(&candidates, &outputs, &weights, &classes, threshold)?;
    let mut populated = inputs.ontology.clone();
    populated.clear_population();
    for (instance, a) in &ensemble.assignments {
        populated.populate(
            &a.class_id,
            PopulatedInstance {
                instance: instance.clone(),
                models: a.models.iter().map(|m| m.to_string()).collect(),
                score: a.score,
            },
        )?;
    }

    let report = match (&split, &inputs.gold) {
        (Some(split), Some(gold)) => {
            let test: BTreeSet<String> = split.test.iter().cloned().collect();
            let mut report = evaluate_models(
                &outputs,
                Some(&ensemble),
                gold,
                &inputs.ontology,
                Some(&test),
            );
            report.split_sizes = Some(split.sizes());
            report.weights = Some(weights.as_slice().to_vec());
            report.weight_source = Some(source);
            report.threshold = threshold;
            let mut all = warnings.clone();
            all.append(&mut report.warnings);
            report.warnings = all;
            Some(report)
        }
        _ => None,
    };

    Ok(RunResult {
        candidates,
        outputs,
        weights: Some(weights),
        weight_source: Some(source),
        threshold,
        ensemble,
        populated,
        split,
        report,
        warnings,
    })
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> std::io::Result<()>,
{
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    f(&mut out).map_err(|e| Error::io(path, e))
}

/// Writes `ontology.json`, `m1.tsv`..`m5.tsv`, `ensemble.tsv`, and the
/// report files when there is a report.
pub fn write_outputs(result: &RunResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    crate::ontology::save_population(&result.populated, dir.join("ontology.json"))?;
    for output in &result.outputs {
        let path = dir.join(format!("{}.tsv", output.model.as_str().to_lowercase()));
        write_with(&path, |out| output.write_tsv(out))?;
    }
    write_with(&dir.join("ensemble.tsv"), |out| {
        result.ensemble.write_tsv(out)
    })?;
    if let Some(report) = &result.report {
        write_report(report, dir)?;
    }
    Ok(())
}

pub fn write_report(report: &EvalReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = report.to_json_string()?;
    let path = dir.join("report.json");
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    let path = dir.join("report.txt");
    fs::write(&path, report.to_table()).map_err(|e| Error::io(&path, e))
}
