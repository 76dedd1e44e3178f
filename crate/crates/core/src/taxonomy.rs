//! WordNet-style synset graph with hypernym links.
//!
//! Disconnected components hang off an implicit super-root, so every pair
//! of synsets has a common ancestor. The super-root sits at depth `-1`;
//! real roots are at depth `0`.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub id: String,
    pub lemmas: Vec<String>,
    #[serde(default)]
    pub hypernyms: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TaxonomyFile {
    synsets: Vec<Synset>,
}

/// A common ancestor of two synsets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ancestor<'a> {
    Synset(&'a str),
    SuperRoot,
}

impl<'a> Ancestor<'a> {
    pub fn synset(self) -> Option<&'a str> {
        match self {
            Ancestor::Synset(id) => Some(id),
            Ancestor::SuperRoot => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TaxonomyStore {
    synsets: Vec<Synset>,
    by_id: HashMap<String, usize>,
    lemma_index: BTreeMap<String, BTreeSet<String>>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

impl TaxonomyStore {
    pub fn new(synsets: Vec<Synset>) -> Result<Self> {
        let mut by_id = HashMap::with_capacity(synsets.len());
        for (i, s) in synsets.iter().enumerate() {
            if s.lemmas.is_empty() {
                return Err(Error::Taxonomy(format!("synset `{}` has no lemmas", s.id)));
            }
            if by_id.insert(s.id.clone(), i).is_some() {
                return Err(Error::Taxonomy(format!("duplicate synset id `{}`", s.id)));
            }
        }
        let mut parents = vec![Vec::new(); synsets.len()];
        let mut children = vec![Vec::new(); synsets.len()];
        for (i, s) in synsets.iter().enumerate() {
            for h in &s.hypernyms {
                let &p = by_id.get(h).ok_or_else(|| Error::DanglingHypernym {
                    synset: s.id.clone(),
                    hypernym: h.clone(),
                })?;
                if !parents[i].contains(&p) {
                    parents[i].push(p);
                    children[p].push(i);
                }
            }
        }
        if let Some(cycle) = find_cycle(&parents) {
            return Err(Error::TaxonomyCycle(
                cycle.into_iter().map(|i| synsets[i].id.clone()).collect(),
            ));
        }

        // BFS from every root gives the minimum distance from any root.
        let mut depth = vec![usize::MAX; synsets.len()];
        let mut queue = VecDeque::new();
        for (i, p) in parents.iter().enumerate() {
            if p.is_empty() {
                depth[i] = 0;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            for &c in &children[i] {
                if depth[c] == usize::MAX {
                    depth[c] = depth[i] + 1;
                    queue.push_back(c);
                }
            }
        }

        let mut lemma_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for s in &synsets {
            for lemma in &s.lemmas {
                lemma_index
                    .entry(lemma.clone())
                    .or_default()
                    .insert(s.id.clone());
            }
        }
        Ok(TaxonomyStore {
            synsets,
            by_id,
            lemma_index,
            parents,
            children,
            depth,
        })
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: TaxonomyFile = serde_json::from_str(json)?;
        Self::new(file.synsets)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let file = TaxonomyFile {
            synsets: self.synsets.clone(),
        };
        let mut json = serde_json::to_string_pretty(&file)?;
        json.push('\n');
        Ok(json)
    }

    pub fn synsets(&self) -> &[Synset] {
        &self.synsets
    }

    pub fn synset(&self, id: &str) -> Option<&Synset> {
        self.by_id.get(id).map(|&i| &self.synsets[i])
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    fn index(&self, id: &str) -> Result<usize> {
        self.by_id
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSynset(id.to_string()))
    }

    /// Minimum hypernym distance from a root.
    pub fn depth(&self, id: &str) -> Result<usize> {
        Ok(self.depth[self.index(id)?])
    }

    /// Depth of an ancestor, with the super-root at `-1`.
    pub fn ancestor_depth(&self, ancestor: Ancestor<'_>) -> i64 {
        match ancestor {
            Ancestor::Synset(id) => self.by_id.get(id).map_or(-1, |&i| self.depth[i] as i64),
            Ancestor::SuperRoot => -1,
        }
    }

    /// Synsets whose lemmas include `token`, ordered by id.
    pub fn senses_of(&self, token: &str) -> Vec<&str> {
        self.lemma_index
            .get(token)
            .map(|ids| ids.iter().map(String::as_str).collect())
            .unwrap_or_default()
    }

    /// The synset and all its transitive hypernyms.
    fn ancestors(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &p in &self.parents[i] {
                if seen.insert(p) {
                    stack.push(p);
                }
            }
        }
        seen
    }

    fn deepest(&self, candidates: impl IntoIterator<Item = usize>) -> Ancestor<'_> {
        candidates
            .into_iter()
            .min_by(|&a, &b| {
                self.depth[b]
                    .cmp(&self.depth[a])
                    .then_with(|| self.synsets[a].id.cmp(&self.synsets[b].id))
            })
            .map_or(Ancestor::SuperRoot, |i| {
                Ancestor::Synset(&self.synsets[i].id)
            })
    }

    /// Deepest common ancestor of `a` and `b` (each synset counts as its
    /// own ancestor). Equal depths resolve to the smaller id.
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<Ancestor<'_>> {
        let (a, b) = (self.index(a)?, self.index(b)?);
        let left = self.ancestors(a);
        let right = self.ancestors(b);
        Ok(self.deepest(left.intersection(&right).copied()))
    }

    /// Deepest ancestor shared by every synset in `ids`.
    pub fn common_ancestor_of<'s>(
        &self,
        ids: impl IntoIterator<Item = &'s str>,
    ) -> Result<Ancestor<'_>> {
        let mut shared: Option<BTreeSet<usize>> = None;
        for id in ids {
            let ancestors = self.ancestors(self.index(id)?);
            shared = Some(match shared {
                None => ancestors,
                Some(s) => s.intersection(&ancestors).copied().collect(),
            });
        }
        Ok(self.deepest(shared.unwrap_or_default()))
    }

    /// Union of lemmas over `root` and everything below it.
    pub fn subtree_lemmas(&self, root: &str) -> Result<BTreeSet<String>> {
        let start = self.index(root)?;
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &c in &self.children[i] {
                if seen.insert(c) {
                    stack.push(c);
                }
            }
        }
        Ok(seen
            .into_iter()
            .flat_map(|i| self.synsets[i].lemmas.iter().cloned())
            .collect())
    }

    /// Every lemma in the store.
    pub fn all_lemmas(&self) -> BTreeSet<String> {
        self.lemma_index.keys().cloned().collect()
    }
}

pub fn load_taxonomy(path: impl AsRef<Path>) -> Result<TaxonomyStore> {
    let path = path.as_ref();
    let json = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TaxonomyStore::from_json_str(&json)
}

/// Returns one cycle, as node indices with the first repeated at the end.
fn find_cycle(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; parents.len()];
    for start in 0..parents.len() {
        if state[start] != 0 {
            continue;
        }
        let mut path = vec![start];
        let mut cursor = vec![0usize];
        state[start] = 1;
        while let Some(&node) = path.last() {
            let next = cursor.last_mut().unwrap();
            if let Some(&p) = parents[node].get(*next) {
                *next += 1;
                match state[p] {
                    0 => {
                        state[p] = 1;
                        path.push(p);
                        cursor.push(0);
                    }
                    1 => {
                        let from = path.iter().position(|&n| n == p).unwrap();
                        let mut cycle = path[from..].to_vec();
                        cycle.push(p);
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
                path.pop();
                cursor.pop();
            }
        }
    }
    None
}
