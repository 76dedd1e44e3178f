//! F1-weighted voting over the candidate models.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelOutput, ModelTag};

/// One non-negative weight per model, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnsembleWeights(Vec<f64>);

impl EnsembleWeights {
    /// Normalizes explicitly supplied weights.
    pub fn explicit(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config(format!(
                "ensemble weights must be finite and non-negative, got {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::Config("ensemble weights sum to zero".into()));
        }
        Ok(EnsembleWeights(weights.iter().map(|w| w / total).collect()))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Each model's share of the total F1.
pub fn compute_weights(f1_scores: &[f64]) -> Result<EnsembleWeights> {
    if let Some(bad) = f1_scores.iter().find(|f| !(0.0..=1.0).contains(*f)) {
        return Err(Error::InvalidArgument(format!(
            "F1 score {bad} outside [0, 1]"
        )));
    }
    let total: f64 = f1_scores.iter().sum();
    if total <= 0.0 {
        return Err(Error::Config(
            "every model has F1 = 0; supply explicit ensemble weights".into(),
        ));
    }
    Ok(EnsembleWeights(
        f1_scores.iter().map(|f| f / total).collect(),
    ))
}

/// Binary `models × classes` table of emitted memberships for one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl MembershipMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MembershipMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if x > 1 {
                    return Err(Error::InvalidArgument(
                        "membership entries must be 0 or 1".into(),
                    ));
                }
                m.set(i, j, x == 1);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, on: bool) {
        self.entries[row * self.cols + col] = on as u8;
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.entries[row * self.cols..(row + 1) * self.cols]
            .iter()
            .map(|&x| x as usize)
            .sum()
    }
}

/// Marks `m[i][j] = 1` when model `i` emitted class `j` for `instance`.
/// A model that skipped the instance contributes a zero row.
pub fn membership_matrix(
    instance: &str,
    outputs: &[ModelOutput],
    classes: &[String],
) -> Result<MembershipMatrix> {
    let column: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(j, c)| (c.as_str(), j))
        .collect();
    let mut m = MembershipMatrix::zeros(outputs.len(), classes.len());
    for (i, output) in outputs.iter().enumerate() {
        for membership in output.classes_of(instance) {
            let &j = column
                .get(membership.class_id.as_str())
                .ok_or_else(|| Error::UnknownClass(membership.class_id.clone()))?;
            m.set(i, j, true);
        }
    }
    Ok(m)
}

/// Per-class totals `S = weights · matrix`.
pub fn score(weights: &EnsembleWeights, matrix: &MembershipMatrix) -> Result<Vec<f64>> {
    if weights.len() != matrix.rows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.rows(),
            got: weights.len(),
        });
    }
    Ok((0..matrix.cols())
        .map(|j| {
            weights
                .as_slice()
                .iter()
                .enumerate()
                .map(|(i, w)| w * matrix.get(i, j) as f64)
                .sum()
        })
        .collect())
}

/// The highest-scoring class if its score reaches `threshold`. A zero top
/// score never assigns. Equal top scores go to the smaller class id.
pub fn assign<'c>(scores: &[f64], classes: &'c [String], threshold: f64) -> Option<&'c str> {
    let mut best: Option<usize> = None;
    for j in 0..scores.len().min(classes.len()) {
        best = match best {
            Some(b)
                if scores[b] > scores[j]
                    || (scores[b] == scores[j] && classes[b] <= classes[j]) =>
            {
                Some(b)
            }
            _ => Some(j),
        };
    }
    let b = best?;
    (scores[b] > 0.0 && scores[b] >= threshold).then(|| classes[b].as_str())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleAssignment {
    pub class_id: String,
    pub score: f64,
    /// Models that emitted the chosen class.
    pub models: Vec<ModelTag>,
}

/// Ensemble decisions for a set of instances.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EnsembleOutput {
    pub assignments: BTreeMap<String, EnsembleAssignment>,
}

impl EnsembleOutput {
    pub fn class_words(&self) -> BTreeMap<String, std::collections::BTreeSet<String>> {
        let mut words: BTreeMap<String, std::collections::BTreeSet<String>> = BTreeMap::new();
        for (instance, a) in &self.assignments {
            words
                .entry(a.class_id.clone())
                .or_default()
                .insert(instance.clone());
        }
        words
    }

    pub fn write_tsv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for (instance, a) in &self.assignments {
            writeln!(out, "{instance}\t{}\t{:.6}", a.class_id, a.score)?;
        }
        out.flush()
    }
}

/// Scores every instance against `classes` and keeps those that clear
/// `threshold`.
pub fn run_ensemble<'a>(
    instances: impl IntoIterator<Item = &'a String>,
    outputs: &[ModelOutput],
    weights: &EnsembleWeights,
    classes: &[String],
    threshold: f64,
) -> Result<EnsembleOutput> {
    let mut result = EnsembleOutput::default();
    for instance in instances {
        let matrix = membership_matrix(instance, outputs, classes)?;
        let scores = score(weights, &matrix)?;
        if let Some(class_id) = assign(&scores, classes, threshold) {
            let j = classes
                .iter()
                .position(|c| c == class_id)
                .expect("class is listed");
            let models = outputs
                .iter()
                .enumerate()
                .filter(|(i, _)| matrix.get(*i, j) == 1)
                .map(|(_, o)| o.model)
                .collect();
            result.assignments.insert(
                instance.clone(),
                EnsembleAssignment {
                    class_id: class_id.to_string(),
                    score: scores[j],
                    models,
                },
            );
        }
    }
    Ok(result)
}
