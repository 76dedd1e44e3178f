//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs with its own harness. The process fails on any failing criterion
//! that is not listed in `KNOWN_FAILURES`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ontopop::embeddings::EmbeddingStore;
use ontopop::ensemble::compute_weights;
use ontopop::evaluation::{f1, EvalReport};
use ontopop::models::{assign_clusters, exclusion, m1_assign, m3_expand, AssignmentOrigin};
use ontopop::ontology::{
    AggregationMethod, ClassVector, Ontology, OntologyClass, PopulatedInstance,
};
use ontopop::taxonomy::{Synset, TaxonomyStore};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria whose literal check is arithmetically out of reach; they still
/// run and print FAIL.
const KNOWN_FAILURES: &[u32] = &[2];

type Criterion<'a> = (u32, &'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cos(a: &[f64], b: &[f64]) -> f64 {
    let (mut ab, mut aa, mut bb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        ab += x * y;
        aa += x * x;
        bb += y * y;
    }
    ab / (aa.sqrt() * bb.sqrt())
}

fn random_vec(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn weights() -> Outcome {
    let published = [0.15, 0.27, 0.33, 0.13, 0.12];
    let w = match compute_weights(&[0.12, 0.21, 0.26, 0.10, 0.10]) {
        Ok(w) => w,
        Err(e) => return outcome(false, e.to_string()),
    };
    let worst = w
        .as_slice()
        .iter()
        .zip(published)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let shown: Vec<String> = w.as_slice().iter().map(|x| format!("{x:.4}")).collect();
    outcome(
        worst <= 0.015,
        format!("weights ({}), max deviation {worst:.4}", shown.join(", ")),
    )
}

fn f1_rounding() -> Outcome {
    let rows = [
        ("M1", 0.08, 0.22, 0.12),
        ("M2", 0.15, 0.36, 0.21),
        ("M3", 0.24, 0.30, 0.26),
        ("M4", 0.07, 0.20, 0.10),
        ("M5", 0.06, 0.23, 0.10),
        ("ensemble", 0.51, 0.63, 0.56),
    ];
    let mut misses = Vec::new();
    for (name, p, r, published) in rows {
        let f = f1(p, r);
        if ((f * 100.0).round() - published * 100.0).abs() > 1e-9 {
            misses.push(format!(
                "{name}: f1({p}, {r}) = {f:.4} rounds to {:.2}, published {published:.2}",
                (f * 100.0).round() / 100.0
            ));
        }
    }
    if misses.is_empty() {
        outcome(true, "all 6 rows round to the published F1")
    } else {
        outcome(
            false,
            format!("{}/6 rows match; {}", 6 - misses.len(), misses.join("; ")),
        )
    }
}

/// Member least similar to the mean of the unit vectors.
fn exclusion_oracle(members: &[(String, Vec<f64>)]) -> String {
    let dim = members[0].1.len();
    let mut mean = vec![0.0; dim];
    for (_, v) in members {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x / n;
        }
    }
    let mut best: Option<(f64, &str)> = None;
    for (t, v) in members {
        let s = cos(v, &mean);
        if best.is_none_or(|(b, bt)| s < b || (s == b && t.as_str() < bt)) {
            best = Some((s, t));
        }
    }
    best.unwrap().1.to_string()
}

fn exclusion_oracle_match() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut matched = 0;
    for case in 0..1000 {
        let size = 3 + case % 6;
        let members: Vec<(String, Vec<f64>)> = (0..size)
            .map(|i| (format!("m{case}x{i}"), random_vec(&mut rng, 10)))
            .collect();
        let borrowed: Vec<(&str, &[f64])> = members
            .iter()
            .map(|(t, v)| (t.as_str(), v.as_slice()))
            .collect();
        if exclusion(&borrowed).ok().map(str::to_string) == Some(exclusion_oracle(&members)) {
            matched += 1;
        }
    }
    outcome(matched == 1000, format!("{matched}/1000 sets match"))
}

fn m1_oracle_match() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut matched, mut scaled_same) = (0, 0);
    for _ in 0..500 {
        let mut ids: Vec<String> = (0..5).map(|j| format!("class{j}")).collect();
        ids.shuffle(&mut rng);
        let cvs: Vec<ClassVector> = ids
            .iter()
            .map(|id| ClassVector {
                class_id: id.clone(),
                vector: random_vec(&mut rng, 10),
                method: AggregationMethod::Centroid,
            })
            .collect();
        let v = random_vec(&mut rng, 10);
        let big: Vec<f64> = v.iter().map(|x| x * 1000.0).collect();
        let store =
            EmbeddingStore::from_rows(10, [("x".to_string(), v.clone()), ("big".to_string(), big)])
                .unwrap();

        let mut best = ("", f64::NEG_INFINITY);
        for cv in &cvs {
            let c = cos(&v, &cv.vector);
            if c > best.1 || (c == best.1 && cv.class_id.as_str() < best.0) {
                best = (&cv.class_id, c);
            }
        }
        let got = m1_assign("x", &cvs, &store).ok().flatten();
        if got.map(|(c, _)| c) == Some(best.0) {
            matched += 1;
        }
        if got.map(|(c, _)| c)
            == m1_assign("big", &cvs, &store)
                .ok()
                .flatten()
                .map(|(c, _)| c)
        {
            scaled_same += 1;
        }
    }
    outcome(
        matched == 500 && scaled_same == 500,
        format!("{matched}/500 match exhaustive argmax, {scaled_same}/500 unchanged under x1000"),
    )
}

#[derive(Clone, Copy, Debug)]
enum Degenerate {
    Seedless,
    Tie,
    Contest,
}

struct AssignFixture {
    clusters: Vec<Vec<String>>,
    ontology: Ontology,
    cvs: Vec<ClassVector>,
    store: EmbeddingStore,
}

/// Cluster `c` is planted around class `planted[c]`; seeds are then placed
/// so that `case` occurs.
fn assign_fixture(rng: &mut ChaCha8Rng, k: usize, case: Degenerate) -> AssignFixture {
    let dim = 16;
    let ids: Vec<String> = (0..k).map(|j| format!("class{j}")).collect();
    let centers: Vec<Vec<f64>> = (0..k).map(|_| random_vec(rng, dim)).collect();
    let mut planted: Vec<usize> = (0..k).collect();
    planted.shuffle(rng);

    let mut rows = Vec::new();
    let mut clusters: Vec<Vec<String>> = vec![Vec::new(); k];
    let near = |rng: &mut ChaCha8Rng, j: usize| -> Vec<f64> {
        centers[j]
            .iter()
            .map(|x| x + 0.15 * rng.random_range(-1.0..1.0))
            .collect()
    };
    for (c, &j) in planted.iter().enumerate() {
        for m in 0..4 {
            let name = format!("u{c}x{m}");
            rows.push((name.clone(), near(rng, j)));
            clusters[c].push(name);
        }
    }
    // seeds[j] lists the seed tokens of class j; one seed per class sits in
    // its planted cluster by default
    let mut seeds: Vec<Vec<String>> = vec![Vec::new(); k];
    let mut add_seed = |rng: &mut ChaCha8Rng,
                        rows: &mut Vec<(String, Vec<f64>)>,
                        class: usize,
                        cluster: usize,
                        vec_class: usize| {
        let name = format!("s{class}x{}", seeds[class].len());
        rows.push((name.clone(), near(rng, vec_class)));
        seeds[class].push(name.clone());
        clusters[cluster].push(name);
    };
    let victim = rng.random_range(0..k);
    for (c, &j) in planted.iter().enumerate() {
        match case {
            Degenerate::Seedless if c == victim => {}
            _ => add_seed(rng, &mut rows, j, c, j),
        }
    }
    match case {
        Degenerate::Seedless => {
            // the seedless cluster's class still needs a seed somewhere
            let j = planted[victim];
            let name = format!("s{j}x0");
            rows.push((name.clone(), near(rng, j)));
            seeds[j].push(name);
        }
        Degenerate::Tie => {
            let other = planted[(victim + 1) % k];
            add_seed(rng, &mut rows, other, victim, planted[victim]);
        }
        Degenerate::Contest => {
            let thief = (victim + 1) % k;
            let j = planted[victim];
            add_seed(rng, &mut rows, j, thief, planted[thief]);
            add_seed(rng, &mut rows, j, thief, planted[thief]);
        }
    }
    let store = EmbeddingStore::from_rows(dim, rows).unwrap();
    let ontology = Ontology::new(
        ids.iter()
            .zip(&seeds)
            .map(|(id, s)| OntologyClass::new(id.clone(), s.clone()))
            .collect(),
    )
    .unwrap();
    let cvs = ids
        .iter()
        .zip(&centers)
        .map(|(id, v)| ClassVector {
            class_id: id.clone(),
            vector: v.clone(),
            method: AggregationMethod::Centroid,
        })
        .collect();
    AssignFixture {
        clusters,
        ontology,
        cvs,
        store,
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Best total member-to-class similarity over the non-vote clusters, with
/// vote-assigned clusters held fixed.
fn bijection_oracle(f: &AssignFixture, fixed: &BTreeMap<usize, String>) -> BTreeMap<usize, String> {
    let free_clusters: Vec<usize> = (0..f.clusters.len())
        .filter(|c| !fixed.contains_key(c))
        .collect();
    let taken: BTreeSet<&String> = fixed.values().collect();
    let free_classes: Vec<usize> = (0..f.cvs.len())
        .filter(|&j| !taken.contains(&f.cvs[j].class_id))
        .collect();
    let agreement = |c: usize, j: usize| -> f64 {
        f.clusters[c]
            .iter()
            .map(|t| cos(f.store.vector_of(t).unwrap(), &f.cvs[j].vector))
            .sum()
    };
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in permutations(&free_classes) {
        let total: f64 = free_clusters
            .iter()
            .zip(&perm)
            .map(|(&c, &j)| agreement(c, j))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, perm));
        }
    }
    let perm = best.map(|(_, p)| p).unwrap_or_default();
    free_clusters
        .into_iter()
        .zip(perm)
        .map(|(c, j)| (c, f.cvs[j].class_id.clone()))
        .collect()
}

fn cluster_assignment() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let cases = [Degenerate::Seedless, Degenerate::Tie, Degenerate::Contest];
    let (mut bijective, mut oracle_checked, mut oracle_matched) = (0, 0, 0);
    let mut triggered: BTreeMap<&str, usize> = BTreeMap::new();
    let mut problems = Vec::new();
    for i in 0..50 {
        let case = cases[i % 3];
        let k = 2 + (i / 3) % 6;
        let f = assign_fixture(&mut rng, k, case);
        let result = match assign_clusters(&f.clusters, &f.ontology, &f.cvs, &f.store) {
            Ok(r) => r,
            Err(e) => {
                problems.push(format!("fixture {i}: {e}"));
                continue;
            }
        };
        let distinct: BTreeSet<&String> = result.cluster_to_class.iter().collect();
        if distinct.len() == k && result.cluster_to_class.len() == k {
            bijective += 1;
        }
        for origin in &result.origins {
            let name = match origin {
                AssignmentOrigin::Vote => continue,
                AssignmentOrigin::TieBreak => "tie",
                AssignmentOrigin::Contest => "contest",
                AssignmentOrigin::Leftover => "leftover",
            };
            *triggered.entry(name).or_default() += 1;
        }
        if k <= 5 {
            oracle_checked += 1;
            let fixed: BTreeMap<usize, String> = result
                .origins
                .iter()
                .enumerate()
                .filter(|(_, o)| **o == AssignmentOrigin::Vote)
                .map(|(c, _)| (c, result.cluster_to_class[c].clone()))
                .collect();
            let expected = bijection_oracle(&f, &fixed);
            if expected
                .iter()
                .all(|(&c, class)| &result.cluster_to_class[c] == class)
            {
                oracle_matched += 1;
            } else {
                problems.push(format!("fixture {i} ({case:?}, k={k}) differs from oracle"));
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = problems.is_empty()
        && bijective == 50
        && oracle_matched == oracle_checked
        && ["tie", "contest", "leftover"]
            .iter()
            .all(|n| triggered.get(n).copied().unwrap_or(0) > 0)
        && elapsed < Duration::from_secs(10);
    let mut detail = format!(
        "{bijective}/50 bijections, {oracle_matched}/{oracle_checked} match oracle, resolved slots {triggered:?}, {:.2}s",
        elapsed.as_secs_f64()
    );
    if !problems.is_empty() {
        detail.push_str(&format!("; {}", problems.join("; ")));
    }
    outcome(pass, detail)
}

fn m3_toy() -> Outcome {
    let syn = |id: &str, lemmas: &[&str], hypernyms: &[&str]| Synset {
        id: id.into(),
        lemmas: lemmas.iter().map(|s| s.to_string()).collect(),
        hypernyms: hypernyms.iter().map(|s| s.to_string()).collect(),
    };
    let taxonomy = TaxonomyStore::new(vec![
        syn("entity.n.01", &["entity"], &[]),
        syn("animal.n.01", &["animal"], &["entity.n.01"]),
        syn("mammal.n.01", &["mammal"], &["animal.n.01"]),
        syn("dog.n.01", &["dog"], &["mammal.n.01"]),
        syn("cat.n.01", &["cat"], &["mammal.n.01"]),
        syn("wolf.n.01", &["wolf"], &["mammal.n.01"]),
        syn("artifact.n.01", &["artifact"], &["entity.n.01"]),
        syn(
            "andiron.n.01",
            &["andiron", "firedog", "dog"],
            &["artifact.n.01"],
        ),
    ])
    .unwrap();
    let ontology = Ontology::new(vec![
        OntologyClass::new("pets", ["dog", "cat"]),
        OntologyClass::new("tools", ["andiron", "artifact"]),
        OntologyClass::new("irons", ["andiron", "firedog", "dog"]),
        OntologyClass::new("things", ["wolf", "artifact"]),
        OntologyClass::new("furniture", ["chair", "artifact"]),
    ])
    .unwrap();
    let candidates: Vec<String> = ["wolf", "chair", "firedog", "mammal"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let set = |xs: &[&str]| {
        xs.iter()
            .map(|s| s.to_string())
            .collect::<BTreeSet<String>>()
    };
    // worked out by hand on the graph above
    let expected: BTreeMap<String, BTreeSet<String>> = [
        ("pets", set(&["mammal", "wolf"])),
        ("tools", set(&["firedog"])),
        ("irons", set(&[])),
        ("things", set(&["firedog", "mammal"])),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    match m3_expand(&ontology, &taxonomy, &candidates) {
        Ok(got) if got == expected => outcome(true, format!("expansions {got:?}")),
        Ok(got) => outcome(false, format!("got {got:?}, expected {expected:?}")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ontopop"))
}

fn run_ok(cmd: &mut Command) -> Result<(), String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn fixture_report(dir: &Path, noise: f64) -> Result<EvalReport, String> {
    let fx = dir.join(format!("noise{noise}"));
    run_ok(
        bin()
            .args([
                "gen-fixture",
                "--classes",
                "3",
                "--per-class",
                "50",
                "--seed",
                "7",
            ])
            .arg("--noise")
            .arg(noise.to_string())
            .arg("--out")
            .arg(&fx),
    )?;
    run_ok(
        bin()
            .arg("evaluate")
            .arg("-c")
            .arg(fx.join("config.toml"))
            .arg("-o")
            .arg(fx.join("eval")),
    )?;
    let json = fs::read_to_string(fx.join("eval/report.json")).map_err(|e| e.to_string())?;
    serde_json::from_str(&json).map_err(|e| e.to_string())
}

fn end_to_end(dir: &Path) -> Outcome {
    let start = Instant::now();
    let (clean, noisy) = match (fixture_report(dir, 0.1), fixture_report(dir, 1.0)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    let elapsed = start.elapsed();
    let best = clean.per_model.values().map(|s| s.f1).fold(0.0, f64::max);
    let ensemble = clean.ensemble.map_or(0.0, |s| s.f1);
    let noisy_f1: Vec<f64> = noisy
        .per_model
        .values()
        .map(|s| s.f1)
        .chain(noisy.ensemble.map(|s| s.f1))
        .collect();
    let noisy_max = noisy_f1.iter().copied().fold(0.0, f64::max);
    let pass = ensemble >= best - 0.02
        && ensemble >= 0.85
        && noisy_f1.len() == 6
        && noisy_max < 0.5
        && elapsed < Duration::from_secs(30);
    let shown: Vec<String> = noisy_f1.iter().map(|f| format!("{f:.3}")).collect();
    outcome(
        pass,
        format!(
            "noise 0.1: ensemble {ensemble:.3}, best model {best:.3}; noise 1.0: M1..M5, ensemble = {}; {:.2}s",
            shown.join(", "),
            elapsed.as_secs_f64()
        ),
    )
}

fn determinism(dir: &Path) -> Outcome {
    let fx = dir.join("determinism");
    if let Err(e) = run_ok(
        bin()
            .args(["gen-fixture", "--per-class", "30", "--seed", "11"])
            .arg("--out")
            .arg(&fx),
    ) {
        return outcome(false, e);
    }
    for run in ["run1", "run2"] {
        if let Err(e) = run_ok(
            bin()
                .arg("populate")
                .arg("-c")
                .arg(fx.join("config.toml"))
                .arg("-o")
                .arg(fx.join(run)),
        ) {
            return outcome(false, e);
        }
    }
    let mut names: Vec<String> = fs::read_dir(fx.join("run1"))
        .map(|d| {
            d.filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .collect()
        })
        .unwrap_or_default();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| {
            fs::read(fx.join("run1").join(n)).ok() != fs::read(fx.join("run2").join(n)).ok()
        })
        .collect();
    outcome(
        differing.is_empty() && names.len() == 9,
        format!("{} files compared, differing: {differing:?}", names.len()),
    )
}

fn random_ontology(rng: &mut ChaCha8Rng, case: usize) -> Ontology {
    let n = rng.random_range(1..6);
    let classes = (0..n)
        .map(|i| {
            let mut c = OntologyClass::new(
                format!("c{case}_{i}"),
                (0..rng.random_range(1..4)).map(|s| format!("seed{i}_{s}")),
            );
            c.label = format!("Class \"{i}\" ü");
            if i > 0 && rng.random_bool(0.5) {
                c.parent = Some(format!("c{case}_{}", rng.random_range(0..i)));
            }
            for p in 0..rng.random_range(0..4) {
                c.populated.push(PopulatedInstance {
                    instance: format!("inst{i}_{p}"),
                    models: vec!["M1".into(), "M4".into()],
                    score: rng.random::<f64>(),
                });
            }
            c
        })
        .collect();
    Ontology::new(classes).unwrap()
}

fn random_store(rng: &mut ChaCha8Rng) -> EmbeddingStore {
    let dim = rng.random_range(1..12);
    let rows: Vec<(String, Vec<f64>)> = (0..rng.random_range(1..30))
        .map(|i| {
            (
                format!("tok{i}"),
                (0..dim)
                    .map(|_| rng.random_range(-5.0..5.0))
                    .collect::<Vec<f64>>(),
            )
        })
        .filter(|(_, v)| v.iter().any(|x| *x != 0.0))
        .collect();
    EmbeddingStore::from_rows(dim, rows).unwrap()
}

fn round_trips(dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut onto_ok, mut text_ok, mut bin_ok) = (0, 0, 0);
    for case in 0..20 {
        let o = random_ontology(&mut rng, case);
        let path = dir.join(format!("onto{case}.json"));
        if ontopop::ontology::save_population(&o, &path).is_ok()
            && ontopop::ontology::load_ontology(&path).ok() == Some(o)
        {
            onto_ok += 1;
        }

        let store = random_store(&mut rng);
        let text = dir.join(format!("vec{case}.txt"));
        if store.save_text(&text).is_ok()
            && EmbeddingStore::load_text(&text).ok() == Some(store.clone())
        {
            text_ok += 1;
        }
        let binary = dir.join(format!("vec{case}.bin"));
        let loaded = store
            .save_binary(&binary)
            .ok()
            .and_then(|_| EmbeddingStore::load_binary(&binary).ok());
        let within = loaded.as_ref().is_some_and(|l| {
            l.tokens() == store.tokens()
                && store.iter().all(|(t, v)| {
                    l.vector_of(t).is_some_and(|w| {
                        v.iter()
                            .zip(w)
                            .all(|(a, b)| (a - b).abs() <= 1e-6 * a.abs().max(1e-30))
                    })
                })
        });
        // a second pass through the binary format is exact
        let again = dir.join(format!("vec{case}b.bin"));
        let stable = loaded.as_ref().is_some_and(|l| {
            l.save_binary(&again).is_ok()
                && EmbeddingStore::load_binary(&again).ok().as_ref() == Some(l)
        });
        if within && stable {
            bin_ok += 1;
        }
    }
    outcome(
        onto_ok == 20 && text_ok == 20 && bin_ok == 20,
        format!("ontology {onto_ok}/20, text {text_ok}/20, binary {bin_ok}/20 (1e-6 relative)"),
    )
}

fn main() -> ExitCode {
    // the libtest flags cargo passes are irrelevant here
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        (1, "weight reproduction", Box::new(weights)),
        (2, "F1 arithmetic", Box::new(f1_rounding)),
        (3, "exclusion oracle", Box::new(exclusion_oracle_match)),
        (4, "M1 oracle", Box::new(m1_oracle_match)),
        (
            5,
            "cluster-assignment resolution",
            Box::new(cluster_assignment),
        ),
        (6, "M3 toy taxonomy", Box::new(m3_toy)),
        (7, "end-to-end fixture", Box::new(|| end_to_end(dir.path()))),
        (8, "determinism", Box::new(|| determinism(dir.path()))),
        (
            9,
            "format round-trips",
            Box::new(|| round_trips(dir.path())),
        ),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (n, name, check) in &criteria {
        let o = check();
        let known = KNOWN_FAILURES.contains(n);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} criterion {n} {name}: {}", o.detail);
        if o.pass {
            passed += 1;
        } else if !known {
            unexpected += 1;
        }
    }
    println!(
        "acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures",
        criteria.len()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
