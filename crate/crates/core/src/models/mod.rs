//! The five candidate membership models.
//!
//! | tag | model                                   |
//! |-----|-----------------------------------------|
//! | M1  | nearest class vector by cosine          |
//! | M2  | dissimilar exclusion against seed sets  |
//! | M3  | taxonomy set expansion                  |
//! | M4  | semi-supervised spherical k-means       |
//! | M5  | semi-supervised average-linkage cut     |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod cluster_assign;
mod distance;
mod exclusion;
mod expansion;
mod hierarchical;
mod kmeans;
mod semi_supervised;

pub use cluster_assign::{
    assign_clusters, resolve_bijection, AssignmentOrigin, ClusterAssignment, Resolution,
};
pub use distance::{m1_assign, m1_run};
pub use exclusion::{exclusion, exclusion_scores, m2_memberships, m2_run, ExclusionOutcome};
pub use expansion::{m3_expand, m3_run};
pub use hierarchical::agglomerative_cut;
pub use kmeans::kmeans;
pub use semi_supervised::{m4_assign, m5_assign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ModelTag {
    M1,
    M2,
    M3,
    M4,
    M5,
}

impl ModelTag {
    pub const ALL: [ModelTag; 5] = [
        ModelTag::M1,
        ModelTag::M2,
        ModelTag::M3,
        ModelTag::M4,
        ModelTag::M5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::M1 => "M1",
            ModelTag::M2 => "M2",
            ModelTag::M3 => "M3",
            ModelTag::M4 => "M4",
            ModelTag::M5 => "M5",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown model tag `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub class_id: String,
    pub score: f64,
}

/// Per-instance class memberships emitted by one model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelOutput {
    pub model: ModelTag,
    pub memberships: BTreeMap<String, Vec<Membership>>,
}

impl ModelOutput {
    pub fn new(model: ModelTag) -> Self {
        ModelOutput {
            model,
            memberships: BTreeMap::new(),
        }
    }

    /// Records a membership; repeated `(instance, class)` pairs keep the
    /// higher score. Classes stay sorted by id per instance.
    pub fn insert(&mut self, instance: &str, class_id: &str, score: f64) {
        let entry = self.memberships.entry(instance.to_string()).or_default();
        match entry.binary_search_by(|m| m.class_id.as_str().cmp(class_id)) {
            Ok(i) => entry[i].score = entry[i].score.max(score),
            Err(i) => entry.insert(
                i,
                Membership {
                    class_id: class_id.to_string(),
                    score,
                },
            ),
        }
    }

    pub fn classes_of(&self, instance: &str) -> &[Membership] {
        self.memberships.get(instance).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.memberships.is_empty()
    }

    /// Instances grouped by emitted class.
    pub fn class_words(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut words: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (instance, memberships) in &self.memberships {
            for m in memberships {
                words
                    .entry(m.class_id.clone())
                    .or_default()
                    .insert(instance.clone());
            }
        }
        words
    }

    /// `instance<TAB>class<TAB>score` lines sorted by instance, then class.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (instance, memberships) in &self.memberships {
            for m in memberships {
                writeln!(out, "{instance}\t{}\t{:.6}", m.class_id, m.score)?;
            }
        }
        out.flush()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KmeansConfig {
    pub seed: u64,
    pub max_iters: usize,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        KmeansConfig {
            seed: 42,
            max_iters: 300,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub kmeans: KmeansConfig,
    /// Minimum usable seeds for a class to take part in M2.
    pub min_seeds: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kmeans: KmeansConfig::default(),
            min_seeds: 2,
        }
    }
}
