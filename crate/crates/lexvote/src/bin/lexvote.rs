//! Command-line front end: each pipeline stage as a subcommand.
//!
//! Exit codes: 0 on success, 1 for I/O problems, 2 for parse or
//! validation problems (including bad command lines). `LEXVOTE_SEED`
//! supplies the random seed when neither a `--seed` flag nor a config
//! file sets one.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lexvote::corpus::{LexicalSample, Stoplist, load_instances, load_stoplist};
use lexvote::ensemble::{
    BaggingParams, Model, load_model, save_model, train_bagged, train_ensemble, train_majority,
    train_stump_classifier,
};
use lexvote::eval::{
    PredictionSet, kway_agreement, load_gold, load_predictions, pairwise_agreement,
    render_kway_text, render_kway_tsv, render_pairwise_text, render_pairwise_tsv,
    render_scores_text, render_scores_tsv, score, write_predictions, write_report,
};
use lexvote::experiment::{ExperimentConfig, parse_classifier_list, render_summary, run_experiment};
use lexvote::features::{FeatureExtractionConfig, View, build_feature_set, save_feature_set};
use lexvote::tree::TreeParams;
use lexvote::{Error, Result};

#[derive(Parser)]
#[command(
    name = "lexvote",
    version,
    about = "Word sense disambiguation with voting ensembles of lexical decision trees"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Feature-extraction thresholds; unset flags keep the defaults (or the
/// experiment config file's values).
#[derive(Args, Debug, Default)]
struct ExtractionFlags {
    /// Minimum corpus frequency for unigram features
    #[arg(long, value_name = "N")]
    unigram_min_freq: Option<u64>,
    /// Minimum corpus frequency for bigram candidates
    #[arg(long, value_name = "N")]
    bigram_min_freq: Option<u64>,
    /// G² threshold for bigram candidates
    #[arg(long, value_name = "X")]
    bigram_g2: Option<f64>,
    /// Minimum corpus frequency for co-occurrence candidates
    #[arg(long, value_name = "N")]
    cooc_min_freq: Option<u64>,
    /// G² threshold for co-occurrence candidates
    #[arg(long, value_name = "X")]
    cooc_g2: Option<f64>,
    /// Co-occurrence window half-width in tokens
    #[arg(long, value_name = "W")]
    cooc_window: Option<usize>,
}

impl ExtractionFlags {
    fn apply(&self, config: &mut FeatureExtractionConfig) {
        if let Some(v) = self.unigram_min_freq {
            config.unigram_min_freq = v;
        }
        if let Some(v) = self.bigram_min_freq {
            config.bigram_min_freq = v;
        }
        if let Some(v) = self.bigram_g2 {
            config.bigram_g2_threshold = v;
        }
        if let Some(v) = self.cooc_min_freq {
            config.cooc_min_freq = v;
        }
        if let Some(v) = self.cooc_g2 {
            config.cooc_g2_threshold = v;
        }
        if let Some(v) = self.cooc_window {
            config.cooc_window = v;
        }
    }

    fn build(&self) -> FeatureExtractionConfig {
        let mut config = FeatureExtractionConfig::default();
        self.apply(&mut config);
        config
    }
}

#[derive(Args, Debug, Default)]
struct TreeFlags {
    /// Grow trees to purity instead of pruning
    #[arg(long)]
    no_prune: bool,
    /// Smallest number of training instances a split may send to a child
    #[arg(long, value_name = "N")]
    min_leaf: Option<usize>,
    /// Pruning confidence level (smaller prunes harder)
    #[arg(long, value_name = "CF")]
    confidence: Option<f64>,
}

impl TreeFlags {
    fn apply(&self, params: &mut TreeParams) {
        if self.no_prune {
            params.prune = false;
        }
        if let Some(v) = self.min_leaf {
            params.min_leaf_instances = v;
        }
        if let Some(v) = self.confidence {
            params.pruning_confidence = v;
        }
    }

    fn build(&self) -> TreeParams {
        let mut params = TreeParams::default();
        self.apply(&mut params);
        params
    }
}

#[derive(Args, Debug, Default)]
struct BagFlags {
    /// Number of bagged trees per view
    #[arg(long, value_name = "N")]
    bags: Option<usize>,
    /// Master random seed (falls back to LEXVOTE_SEED, then 0)
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Train every tree on the full training set instead of bootstrap replicates
    #[arg(long)]
    no_resample: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a feature set from sense-tagged instances and write it to a file
    Extract {
        /// Tab-separated training instances
        #[arg(long, value_name = "FILE")]
        train: PathBuf,
        /// Feature view: U, B, C, or mixed
        #[arg(long, value_name = "VIEW")]
        view: String,
        /// Stoplist file (one word per line)
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        extraction: ExtractionFlags,
        /// Where to write the feature set
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Train a classifier and write a model bundle directory
    Train {
        /// Tab-separated training instances (every instance sense-tagged)
        #[arg(long, value_name = "FILE")]
        train: PathBuf,
        /// Train a bagged classifier on one view: U, B, C, or mixed
        #[arg(long, value_name = "VIEW", conflicts_with_all = ["ensemble", "baseline"])]
        view: Option<String>,
        /// Train a voting ensemble, e.g. UBC or UC
        #[arg(long, value_name = "SPEC", conflicts_with = "baseline")]
        ensemble: Option<String>,
        /// Train a baseline: stump or majority
        #[arg(long, value_name = "KIND")]
        baseline: Option<String>,
        /// Stoplist file (one word per line)
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        #[command(flatten)]
        extraction: ExtractionFlags,
        #[command(flatten)]
        tree: TreeFlags,
        #[command(flatten)]
        bagging: BagFlags,
        /// Model bundle directory to create
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Tag instances with a trained model and write a prediction file
    Classify {
        /// Model bundle directory written by `train`
        #[arg(long, value_name = "DIR")]
        model: PathBuf,
        /// Instances to tag (gold senses, if present, are ignored)
        #[arg(long, value_name = "FILE")]
        instances: PathBuf,
        /// Where to write `instance_id<TAB>sense` predictions
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Score a prediction file against a gold standard
    Score {
        /// Prediction file (`instance_id<TAB>sense` per line)
        #[arg(long, value_name = "FILE")]
        predictions: PathBuf,
        /// Gold-standard file in the same format
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// Also write the score row as TSV
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Measure agreement between two or more systems' predictions
    Agree {
        /// Gold-standard file (`instance_id<TAB>sense` per line)
        #[arg(long, value_name = "FILE")]
        gold: PathBuf,
        /// Two or more prediction files; system names come from file stems
        #[arg(required = true, num_args = 2.., value_name = "PREDICTIONS")]
        predictions: Vec<PathBuf>,
        /// Directory for the agreement tables as files
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run a multi-word experiment from a config file
    Experiment {
        /// Flat tab-separated config file
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Override the report directory
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Override the stoplist
        #[arg(long, value_name = "FILE")]
        stoplist: Option<PathBuf>,
        /// Run only this view (overrides the config's classifier list)
        #[arg(long, value_name = "VIEW", conflicts_with_all = ["ensemble", "classifiers"])]
        view: Option<String>,
        /// Run only this ensemble (overrides the config's classifier list)
        #[arg(long, value_name = "SPEC", conflicts_with = "classifiers")]
        ensemble: Option<String>,
        /// Comma-separated classifier list, e.g. U,B,C,UBC,stump
        #[arg(long, value_name = "LIST")]
        classifiers: Option<String>,
        #[command(flatten)]
        extraction: ExtractionFlags,
        #[command(flatten)]
        tree: TreeFlags,
        #[command(flatten)]
        bagging: BagFlags,
    },
}

/// Seed precedence: `--seed` flag, then config file, then `LEXVOTE_SEED`,
/// then 0.
fn resolve_seed(flag: Option<u64>, from_config: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag.or(from_config) {
        return Ok(seed);
    }
    match std::env::var("LEXVOTE_SEED") {
        Ok(raw) => raw.trim().parse().map_err(|_| {
            Error::validation(format!("LEXVOTE_SEED {raw:?} is not an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

fn load_stoplist_or_empty(path: &Option<PathBuf>) -> Result<Stoplist> {
    match path {
        Some(p) => load_stoplist(p),
        None => Ok(Stoplist::empty()),
    }
}

fn parse_view(raw: &str) -> Result<View> {
    raw.parse()
}

/// System name for a prediction file: its stem, e.g. `out/stump.tsv` →
/// `stump`.
fn system_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_extract(
    train: &Path,
    view: &str,
    stoplist: &Option<PathBuf>,
    extraction: &ExtractionFlags,
    out: &Path,
) -> Result<()> {
    let view = parse_view(view)?;
    let instances = load_instances(train)?;
    let stoplist = load_stoplist_or_empty(stoplist)?;
    let feature_set = build_feature_set(&instances, view, &stoplist, &extraction.build())?;
    save_feature_set(out, &feature_set)?;
    println!(
        "{} view: {} features from {} instances -> {}",
        feature_set.view,
        feature_set.features.len(),
        instances.len(),
        out.display()
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_train(
    train: &Path,
    view: &Option<String>,
    ensemble: &Option<String>,
    baseline: &Option<String>,
    stoplist: &Option<PathBuf>,
    extraction: &ExtractionFlags,
    tree: &TreeFlags,
    bagging: &BagFlags,
    out: &Path,
) -> Result<()> {
    let sample = LexicalSample::from_files(train, None)?;
    let stoplist = load_stoplist_or_empty(stoplist)?;
    let extraction = extraction.build();
    let tree_params = tree.build();
    let bag_params = BaggingParams {
        num_bags: bagging.bags.unwrap_or_else(|| BaggingParams::default().num_bags),
        seed: resolve_seed(bagging.seed, None)?,
        resample: !bagging.no_resample,
    };

    let model = match (view, ensemble, baseline) {
        (Some(v), None, None) => Model::Bagged(train_bagged(
            &sample,
            parse_view(v)?,
            &stoplist,
            &extraction,
            &tree_params,
            &bag_params,
        )?),
        (None, Some(spec), None) => Model::Ensemble(train_ensemble(
            &sample,
            &spec.parse()?,
            &stoplist,
            &extraction,
            &tree_params,
            &bag_params,
        )?),
        (None, None, Some(kind)) => match kind.to_ascii_lowercase().as_str() {
            "stump" => Model::Stump(train_stump_classifier(&sample, &extraction)?),
            "majority" => Model::Majority(train_majority(&sample)?),
            other => {
                return Err(Error::validation(format!(
                    "unknown baseline {other:?}; expected stump or majority"
                )));
            }
        },
        _ => {
            return Err(Error::validation(
                "pick exactly one of --view, --ensemble, or --baseline".to_string(),
            ));
        }
    };
    save_model(out, &model)?;
    println!(
        "trained on {} instances of {:?} -> {}",
        sample.train.len(),
        model.target_word(),
        out.display()
    );
    Ok(())
}

fn cmd_classify(model_dir: &Path, instances: &Path, out: &Path) -> Result<()> {
    let model = load_model(model_dir)?;
    let instances = load_instances(instances)?;
    let mut answers = BTreeMap::new();
    for inst in &instances {
        if inst.target_word != model.target_word() {
            return Err(Error::validation(format!(
                "instance {:?} targets {:?} but the model was trained for {:?}",
                inst.instance_id,
                inst.target_word,
                model.target_word()
            )));
        }
        answers.insert(inst.instance_id.clone(), model.classify(inst));
    }
    write_predictions(out, &answers)?;
    println!("tagged {} instances -> {}", answers.len(), out.display());
    Ok(())
}

fn cmd_score(predictions: &Path, gold: &Path, out: &Option<PathBuf>) -> Result<()> {
    let pred = load_predictions(predictions, &system_name(predictions))?;
    let gold = load_gold(gold)?;
    let report = score(&pred, &gold)?;
    print!("{}", render_scores_text(std::slice::from_ref(&report)));
    if report.unanswered > 0 || report.extraneous > 0 {
        println!(
            "note: {} gold instances unanswered (counted wrong), {} predictions outside the gold set",
            report.unanswered, report.extraneous
        );
    }
    if let Some(path) = out {
        write_report(path, &render_scores_tsv(std::slice::from_ref(&report)))?;
    }
    Ok(())
}

fn cmd_agree(gold: &Path, prediction_paths: &[PathBuf], out: &Option<PathBuf>) -> Result<()> {
    let gold = load_gold(gold)?;
    let preds = prediction_paths
        .iter()
        .map(|p| load_predictions(p, &system_name(p)))
        .collect::<Result<Vec<PredictionSet>>>()?;
    let mut pairwise = Vec::new();
    for i in 0..preds.len() {
        for j in i + 1..preds.len() {
            pairwise.push(pairwise_agreement(&preds[i], &preds[j], &gold)?);
        }
    }
    let kway = kway_agreement(&preds, &gold)?;
    print!("{}", render_pairwise_text(&pairwise));
    println!();
    print!("{}", render_kway_text(&kway));
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_report(&dir.join("agreement_pairwise.tsv"), &render_pairwise_tsv(&pairwise))?;
        write_report(&dir.join("agreement_pairwise.txt"), &render_pairwise_text(&pairwise))?;
        write_report(&dir.join("agreement_kway.tsv"), &render_kway_tsv(&kway))?;
        write_report(&dir.join("agreement_kway.txt"), &render_kway_text(&kway))?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    config_path: &Path,
    out: &Option<PathBuf>,
    stoplist: &Option<PathBuf>,
    view: &Option<String>,
    ensemble: &Option<String>,
    classifiers: &Option<String>,
    extraction: &ExtractionFlags,
    tree: &TreeFlags,
    bagging: &BagFlags,
) -> Result<i32> {
    let mut config = ExperimentConfig::from_file(config_path)?;
    if let Some(dir) = out {
        config.out_dir = dir.clone();
    }
    if let Some(path) = stoplist {
        config.stoplist_path = Some(path.clone());
    }
    if let Some(raw) = classifiers {
        config.classifiers = parse_classifier_list(raw)?;
    } else if let Some(v) = view {
        config.classifiers = parse_classifier_list(v)?;
    } else if let Some(spec) = ensemble {
        config.classifiers = parse_classifier_list(spec)?;
    }
    extraction.apply(&mut config.extraction);
    tree.apply(&mut config.tree_params);
    if let Some(bags) = bagging.bags {
        config.num_bags = bags;
    }
    if bagging.no_resample {
        config.resample = false;
    }
    config.seed = Some(resolve_seed(bagging.seed, config.seed)?);

    let outcome = run_experiment(&config)?;
    print!("{}", render_summary(&config, &outcome));
    println!("report written to {}", config.out_dir.display());
    if outcome.failures.is_empty() {
        Ok(0)
    } else {
        // The run itself survived, but a failed word must not look like
        // success; surface the most severe per-word code.
        Ok(outcome.failures.iter().map(|f| f.exit_code).max().unwrap_or(1))
    }
}

fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Extract { train, view, stoplist, extraction, out } => {
            cmd_extract(train, view, stoplist, extraction, out)?;
            Ok(0)
        }
        Command::Train {
            train,
            view,
            ensemble,
            baseline,
            stoplist,
            extraction,
            tree,
            bagging,
            out,
        } => {
            cmd_train(train, view, ensemble, baseline, stoplist, extraction, tree, bagging, out)?;
            Ok(0)
        }
        Command::Classify { model, instances, out } => {
            cmd_classify(model, instances, out)?;
            Ok(0)
        }
        Command::Score { predictions, gold, out } => {
            cmd_score(predictions, gold, out)?;
            Ok(0)
        }
        Command::Agree { gold, predictions, out } => {
            cmd_agree(gold, predictions, out)?;
            Ok(0)
        }
        Command::Experiment {
            config,
            out,
            stoplist,
            view,
            ensemble,
            classifiers,
            extraction,
            tree,
            bagging,
        } => cmd_experiment(
            config,
            out,
            stoplist,
            view,
            ensemble,
            classifiers,
            extraction,
            tree,
            bagging,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
