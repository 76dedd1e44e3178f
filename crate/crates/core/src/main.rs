use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::warn;

use ontopop::config::RunConfig;
use ontopop::corpus::read_corpus_dir;
use ontopop::embeddings::{EmbeddingFormat, EmbeddingStore};
use ontopop::fixture::{self, FixtureSpec};
use ontopop::ontology::{load_ontology, AggregationMethod, GoldStandard};
use ontopop::pipeline::{self, Inputs};
use ontopop::taxonomy::load_taxonomy;
use ontopop::{Error, Result};

/// Populate ontology classes with corpus terms using word embeddings.
#[derive(Parser)]
#[command(name = "ontopop", version)]
struct Cli {
    /// Log more (-v info, -vv debug). RUST_LOG takes precedence.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize the embedding model and the ontology's seed coverage.
    Inspect(RunArgs),
    /// Run all models and the ensemble, and write the populated ontology.
    Populate(RunArgs),
    /// Score the models and the ensemble on the test split.
    Evaluate(RunArgs),
    /// Write a synthetic input set with planted classes.
    GenFixture(FixtureArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; flags below override its keys.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// text, binary or auto
    #[arg(long)]
    format: Option<EmbeddingFormat>,
    #[arg(long)]
    ontology: Option<PathBuf>,
    /// Directory of .txt documents.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    min_count: Option<usize>,
    #[arg(long)]
    kmeans_seed: Option<u64>,
    #[arg(long)]
    split_seed: Option<u64>,
    #[arg(long)]
    threshold: Option<f64>,
    /// Pick the ensemble threshold on the validation split.
    #[arg(long)]
    tune_threshold: bool,
    /// Five comma-separated ensemble weights for M1..M5.
    #[arg(long, value_delimiter = ',')]
    weights: Option<Vec<f64>>,
    /// centroid or median
    #[arg(long)]
    method: Option<AggregationMethod>,
}

#[derive(Args)]
struct FixtureArgs {
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    classes: usize,
    #[arg(long, default_value_t = 50)]
    per_class: usize,
    /// Fraction in [0, 1]; 1 removes all class signal.
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    seeds_per_class: usize,
    #[arg(long, default_value_t = 200)]
    dim: usize,
    #[arg(long, default_value_t = 1000)]
    vocab: usize,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => {
                if !path.is_file() {
                    return Err(Error::Config(format!(
                        "config file `{}` does not exist",
                        path.display()
                    )));
                }
                RunConfig::load(path)?
            }
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &self.$field { c.$target = Some(v.clone()); })*
            };
        }
        set!(embeddings => embeddings, ontology => ontology, corpus => corpus,
             taxonomy => taxonomy, gold => gold, output => output, weights => weights);
        if let Some(f) = self.format {
            c.embedding_format = f;
        }
        if let Some(n) = self.min_count {
            c.min_count = n;
        }
        if let Some(s) = self.kmeans_seed {
            c.kmeans_seed = s;
        }
        if let Some(s) = self.split_seed {
            c.split_seed = s;
        }
        if let Some(t) = self.threshold {
            c.threshold = t;
        }
        if let Some(m) = self.method {
            c.class_vector_method = m;
        }
        c.tune_threshold |= self.tune_threshold;
        c.check_paths()?;
        Ok(c)
    }
}

fn load_inputs(c: &RunConfig) -> Result<Inputs> {
    let store = EmbeddingStore::load(c.require("embeddings", &c.embeddings)?, c.embedding_format)?;
    let ontology = load_ontology(c.require("ontology", &c.ontology)?)?;
    let documents = read_corpus_dir(c.require("corpus", &c.corpus)?)?;
    let taxonomy = c.taxonomy.as_deref().map(load_taxonomy).transpose()?;
    let gold = c.gold.as_deref().map(GoldStandard::load).transpose()?;
    Ok(Inputs {
        store,
        ontology,
        documents,
        taxonomy,
        gold,
    })
}

fn output_dir(c: &RunConfig) -> Result<&Path> {
    let dir = c.require("output", &c.output)?;
    if let Some(input) = &c.ontology {
        let target = dir.join("ontology.json");
        if let (Ok(a), Ok(b)) = (input.canonicalize(), target.canonicalize()) {
            if a == b {
                return Err(Error::Config(format!(
                    "output directory `{}` would overwrite the input ontology",
                    dir.display()
                )));
            }
        }
    }
    Ok(dir)
}

fn inspect(c: &RunConfig) -> Result<()> {
    let store = EmbeddingStore::load(c.require("embeddings", &c.embeddings)?, c.embedding_format)?;
    let ontology = load_ontology(c.require("ontology", &c.ontology)?)?;
    println!("dim={} vocab={}", store.dimension(), store.len());
    println!("classes={}", ontology.len());
    let mut missing = Vec::new();
    for class in ontology.classes() {
        let seeds: BTreeSet<&String> = class.seeds.iter().collect();
        let known = seeds.iter().filter(|s| store.contains(s)).count();
        println!(
            "{}: {} seeds, {} in vocabulary",
            class.id,
            seeds.len(),
            known
        );
        missing.extend(
            seeds
                .into_iter()
                .filter(|s| !store.contains(s))
                .map(|s| (&class.id, s)),
        );
    }
    for (class, seed) in missing {
        warn!("class `{class}`: seed `{seed}` is out of vocabulary");
        println!("warning: class `{class}`: seed `{seed}` is out of vocabulary");
    }
    for w in ontology.validate(false)? {
        println!("warning: {w}");
    }
    Ok(())
}

fn populate(c: &RunConfig) -> Result<()> {
    let dir = output_dir(c)?;
    let params = c.params()?;
    let inputs = load_inputs(c)?;
    let result = pipeline::run(&inputs, &params)?;
    pipeline::write_outputs(&result, dir)?;
    println!(
        "populated {} of {} candidates into {}",
        result.ensemble.assignments.len(),
        result.candidates.len(),
        dir.display()
    );
    if let Some(report) = &result.report {
        print!("{}", report.to_table());
    }
    Ok(())
}

fn evaluate(c: &RunConfig) -> Result<()> {
    if c.gold.is_none() {
        return Err(Error::Config(
            "evaluate needs a gold standard (`gold` or --gold)".into(),
        ));
    }
    let dir = output_dir(c)?;
    let params = c.params()?;
    let inputs = load_inputs(c)?;
    let result = pipeline::run(&inputs, &params)?;
    match &result.report {
        Some(report) => {
            pipeline::write_report(report, dir)?;
            print!("{}", report.to_table());
        }
        None => println!("nothing to evaluate: {}", result.warnings.join("; ")),
    }
    Ok(())
}

fn gen_fixture(a: &FixtureArgs) -> Result<()> {
    let spec = FixtureSpec {
        seeds_per_class: a.seeds_per_class,
        dim: a.dim,
        vocab: a.vocab,
        ..FixtureSpec::new(a.classes, a.per_class, a.noise, a.seed)
    };
    let f = fixture::generate(&spec)?;
    fixture::write(&f, &spec, &a.out)?;
    println!("fixture written to {}", a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match &cli.command {
        Command::Inspect(args) => args.config().and_then(|c| inspect(&c)),
        Command::Populate(args) => args.config().and_then(|c| populate(&c)),
        Command::Evaluate(args) => args.config().and_then(|c| evaluate(&c)),
        Command::GenFixture(args) => gen_fixture(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
