//! Multi-word experiment driver: train every requested classifier on
//! every target word, score them jointly, and write a report directory.
//!
//! An experiment is described by a flat tab-separated config file. Each
//! line is `key<TAB>value…`; `#` starts a comment. The `word` key
//! repeats, one line per target word:
//!
//! ```text
//! word        drift   data/drift.train.tsv    data/drift.test.tsv
//! word        plant   data/plant.train.tsv    data/plant.test.tsv
//! stoplist    data/stoplist_en.txt
//! classifiers U,B,C,UB,UC,BC,UBC,mixed,stump,majority
//! seed        42
//! bags        10
//! out         reports/run1
//! ```
//!
//! Every key has a command-line override; anything left unset falls back
//! to the library defaults. Words are trained independently — each gets
//! its own feature sets and trees — but scored jointly, as one pooled
//! gold standard, which is how lexical-sample systems are conventionally
//! compared. A word that fails (missing file, untagged test data, …) is
//! recorded and skipped; the run continues with the remaining words.
//!
//! The report directory is a pure function of the config contents and
//! seed: no timestamps, no absolute paths, stable ordering throughout,
//! so identical runs produce byte-identical trees of files.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{LexicalSample, Stoplist, load_stoplist};
use crate::ensemble::{
    BaggedClassifier, BaggingParams, Ensemble, EnsembleSpec, classify_ensemble, classify_majority,
    classify_stump, train_bagged, train_majority, train_stump_classifier,
};
use crate::error::{Error, Result};
use crate::eval::{
    AgreementTable, PredictionSet, ScoreReport, kway_agreement, pairwise_agreement,
    render_kway_text, render_kway_tsv, render_pairwise_text, render_pairwise_tsv,
    render_scores_text, render_scores_tsv, score, write_predictions, write_report,
};
use crate::features::FeatureExtractionConfig;
use crate::tree::TreeParams;

/// One classifier slot in an experiment: a voting ensemble over one or
/// more feature views, or one of the two baselines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifierSpec {
    Ensemble(EnsembleSpec),
    Stump,
    Majority,
}

impl ClassifierSpec {
    /// Stable label used for score rows and prediction file names.
    pub fn label(&self) -> String {
        match self {
            ClassifierSpec::Ensemble(spec) => spec.label(),
            ClassifierSpec::Stump => "stump".to_string(),
            ClassifierSpec::Majority => "majority".to_string(),
        }
    }

    /// The standard ten-classifier roster: each single view, every pair,
    /// the full triple, the mixed view, and the two baselines.
    pub fn default_roster() -> Vec<ClassifierSpec> {
        ["U", "B", "C", "UB", "UC", "BC", "UBC", "mixed", "stump", "majority"]
            .iter()
            .map(|s| s.parse().expect("roster entries parse"))
            .collect()
    }
}

impl FromStr for ClassifierSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "stump" => Ok(ClassifierSpec::Stump),
            "majority" => Ok(ClassifierSpec::Majority),
            _ => Ok(ClassifierSpec::Ensemble(s.parse()?)),
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// One target word and where its data lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordSpec {
    pub word: String,
    pub train_path: PathBuf,
    pub test_path: PathBuf,
}

/// Everything a run needs. `seed` stays optional here so the caller can
/// tell "config said 0" apart from "config said nothing" when layering
/// flag and environment overrides on top.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub words: Vec<WordSpec>,
    pub stoplist_path: Option<PathBuf>,
    pub classifiers: Vec<ClassifierSpec>,
    pub extraction: FeatureExtractionConfig,
    pub tree_params: TreeParams,
    pub num_bags: usize,
    pub resample: bool,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            words: Vec::new(),
            stoplist_path: None,
            classifiers: ClassifierSpec::default_roster(),
            extraction: FeatureExtractionConfig::default(),
            tree_params: TreeParams::default(),
            num_bags: BaggingParams::default().num_bags,
            resample: true,
            seed: None,
            out_dir: PathBuf::from("lexvote-report"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.words.is_empty() {
            return Err(Error::validation(
                "experiment config names no target words".to_string(),
            ));
        }
        let mut seen = BTreeSet::new();
        for w in &self.words {
            if !seen.insert(&w.word) {
                return Err(Error::validation(format!(
                    "target word {:?} is listed twice",
                    w.word
                )));
            }
        }
        if self.classifiers.is_empty() {
            return Err(Error::validation(
                "experiment config requests no classifiers".to_string(),
            ));
        }
        if self.num_bags == 0 {
            return Err(Error::validation("bags must be at least 1".to_string()));
        }
        self.extraction.validate()?;
        self.tree_params.validate()?;
        Ok(())
    }

    /// Parses the flat config file described in the module docs.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let key = fields[0];
            let values = &fields[1..];
            let one = |what: &str| -> Result<&str> {
                match values {
                    [v] if !v.is_empty() => Ok(v),
                    _ => Err(Error::parse(
                        path,
                        line_no,
                        format!("key {key:?} takes exactly one value ({what})"),
                    )),
                }
            };
            match key {
                "word" => match values {
                    [word, train, test] if !word.is_empty() => {
                        config.words.push(WordSpec {
                            word: word.to_string(),
                            train_path: PathBuf::from(train),
                            test_path: PathBuf::from(test),
                        });
                    }
                    _ => {
                        return Err(Error::parse(
                            path,
                            line_no,
                            "word lines need name, train path, and test path".to_string(),
                        ));
                    }
                },
                "stoplist" => config.stoplist_path = Some(PathBuf::from(one("path")?)),
                "classifiers" => config.classifiers = parse_classifier_list(one("list")?)?,
                "seed" => config.seed = Some(parse_value(path, line_no, key, one("integer")?)?),
                "bags" => config.num_bags = parse_value(path, line_no, key, one("integer")?)?,
                "resample" => config.resample = parse_value(path, line_no, key, one("bool")?)?,
                "prune" => config.tree_params.prune = parse_value(path, line_no, key, one("bool")?)?,
                "min_leaf" => {
                    config.tree_params.min_leaf_instances =
                        parse_value(path, line_no, key, one("integer")?)?;
                }
                "confidence" => {
                    config.tree_params.pruning_confidence =
                        parse_value(path, line_no, key, one("number")?)?;
                }
                "unigram_min_freq" => {
                    config.extraction.unigram_min_freq =
                        parse_value(path, line_no, key, one("integer")?)?;
                }
                "bigram_min_freq" => {
                    config.extraction.bigram_min_freq =
                        parse_value(path, line_no, key, one("integer")?)?;
                }
                "bigram_g2" => {
                    config.extraction.bigram_g2_threshold =
                        parse_value(path, line_no, key, one("number")?)?;
                }
                "cooc_min_freq" => {
                    config.extraction.cooc_min_freq =
                        parse_value(path, line_no, key, one("integer")?)?;
                }
                "cooc_g2" => {
                    config.extraction.cooc_g2_threshold =
                        parse_value(path, line_no, key, one("number")?)?;
                }
                "cooc_window" => {
                    config.extraction.cooc_window =
                        parse_value(path, line_no, key, one("integer")?)?;
                }
                "out" => config.out_dir = PathBuf::from(one("path")?),
                other => {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("unknown config key {other:?}"),
                    ));
                }
            }
        }
        Ok(config)
    }
}

fn parse_value<T>(path: &Path, line_no: usize, key: &str, raw: &str) -> Result<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e| {
        Error::parse(path, line_no, format!("bad value {raw:?} for {key}: {e}"))
    })
}

/// Parses a comma-separated classifier list, dropping duplicates (which
/// includes reorderings of the same ensemble, e.g. `BU` after `UB`).
pub fn parse_classifier_list(raw: &str) -> Result<Vec<ClassifierSpec>> {
    let mut out: Vec<ClassifierSpec> = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let spec: ClassifierSpec = part.parse()?;
        if !out.contains(&spec) {
            out.push(spec);
        }
    }
    if out.is_empty() {
        return Err(Error::validation(format!(
            "classifier list {raw:?} names no classifiers"
        )));
    }
    Ok(out)
}

/// A word that could not be trained or scored. The run keeps going; the
/// failure surfaces in the summary and the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordFailure {
    pub word: String,
    pub message: String,
    pub exit_code: i32,
}

/// What a run produced, beyond the files on disk.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub scores: Vec<ScoreReport>,
    pub pairwise: Vec<AgreementTable>,
    pub kway: Option<AgreementTable>,
    pub failures: Vec<WordFailure>,
    pub train_instances: usize,
    pub test_instances: usize,
    pub out_dir: PathBuf,
}

/// Trains and scores one word against every classifier. Returns the
/// word's gold map and one answer map per classifier, in roster order.
fn run_word(
    spec: &WordSpec,
    config: &ExperimentConfig,
    stoplist: &Stoplist,
    bag_params: &BaggingParams,
) -> Result<(LexicalSample, Vec<BTreeMap<String, String>>)> {
    let sample = LexicalSample::from_files(&spec.train_path, Some(&spec.test_path))?;
    if sample.target_word != spec.word {
        return Err(Error::validation(format!(
            "config names word {:?} but its data is for {:?}",
            spec.word, sample.target_word
        )));
    }
    if sample.test.is_empty() {
        return Err(Error::validation(format!(
            "word {:?} has no test instances to score",
            spec.word
        )));
    }
    if let Some(untagged) = sample.test.iter().find(|i| i.gold_sense.is_none()) {
        return Err(Error::validation(format!(
            "test instance {:?} has no gold sense; experiments need tagged test data",
            untagged.instance_id
        )));
    }

    // Train each needed view once; ensemble members at a given seed are
    // identical whether trained standalone or inside a combination, so
    // the UB ensemble can reuse the U and B classifiers.
    let mut by_view: BTreeMap<&'static str, BaggedClassifier> = BTreeMap::new();
    for clf in &config.classifiers {
        if let ClassifierSpec::Ensemble(ens) = clf {
            for &view in ens.members() {
                if !by_view.contains_key(view.label()) {
                    let clf = train_bagged(
                        &sample,
                        view,
                        stoplist,
                        &config.extraction,
                        &config.tree_params,
                        bag_params,
                    )?;
                    by_view.insert(view.label(), clf);
                }
            }
        }
    }

    let mut answers = Vec::with_capacity(config.classifiers.len());
    for clf in &config.classifiers {
        let mut map = BTreeMap::new();
        match clf {
            ClassifierSpec::Ensemble(ens) => {
                let members: Vec<BaggedClassifier> = ens
                    .members()
                    .iter()
                    .map(|v| by_view[v.label()].clone())
                    .collect();
                let ensemble = Ensemble {
                    target_word: sample.target_word.clone(),
                    spec: ens.clone(),
                    members,
                };
                for inst in &sample.test {
                    map.insert(inst.instance_id.clone(), classify_ensemble(&ensemble, inst));
                }
            }
            ClassifierSpec::Stump => {
                let stump = train_stump_classifier(&sample, &config.extraction)?;
                for inst in &sample.test {
                    map.insert(inst.instance_id.clone(), classify_stump(&stump, inst));
                }
            }
            ClassifierSpec::Majority => {
                let majority = train_majority(&sample)?;
                for inst in &sample.test {
                    map.insert(
                        inst.instance_id.clone(),
                        classify_majority(&majority, inst).to_string(),
                    );
                }
            }
        }
        answers.push(map);
    }
    Ok((sample, answers))
}

/// Runs the whole experiment and writes the report directory. Word-level
/// failures do not abort the run; they come back in the outcome. The
/// call itself fails only if the config is unusable or nothing at all
/// could be scored.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let stoplist = match &config.stoplist_path {
        Some(path) => load_stoplist(path)?,
        None => Stoplist::empty(),
    };
    let bag_params = BaggingParams {
        num_bags: config.num_bags,
        seed: config.seed.unwrap_or(0),
        resample: config.resample,
    };

    let mut gold: BTreeMap<String, String> = BTreeMap::new();
    let mut pooled: Vec<BTreeMap<String, String>> =
        vec![BTreeMap::new(); config.classifiers.len()];
    let mut failures = Vec::new();
    let mut train_instances = 0;
    let mut test_instances = 0;

    for word in &config.words {
        match run_word(word, config, &stoplist, &bag_params) {
            Ok((sample, answers)) => {
                train_instances += sample.train.len();
                test_instances += sample.test.len();
                for inst in &sample.test {
                    gold.insert(
                        inst.instance_id.clone(),
                        inst.gold_sense.clone().expect("checked in run_word"),
                    );
                }
                for (pool, map) in pooled.iter_mut().zip(answers) {
                    pool.extend(map);
                }
            }
            Err(err) => failures.push(WordFailure {
                word: word.word.clone(),
                message: err.to_string(),
                exit_code: err.exit_code(),
            }),
        }
    }

    if gold.is_empty() {
        return Err(Error::validation(format!(
            "no word could be scored; first failure: {}",
            failures
                .first()
                .map(|f| format!("{}: {}", f.word, f.message))
                .unwrap_or_else(|| "none recorded".to_string())
        )));
    }

    let preds: Vec<PredictionSet> = config
        .classifiers
        .iter()
        .zip(&pooled)
        .map(|(spec, answers)| PredictionSet::new(spec.label(), answers.clone()))
        .collect();
    let scores = preds
        .iter()
        .map(|p| score(p, &gold))
        .collect::<Result<Vec<_>>>()?;
    let mut pairwise = Vec::new();
    for i in 0..preds.len() {
        for j in i + 1..preds.len() {
            pairwise.push(pairwise_agreement(&preds[i], &preds[j], &gold)?);
        }
    }
    let kway = if preds.len() >= 2 {
        Some(kway_agreement(&preds, &gold)?)
    } else {
        None
    };

    let outcome = ExperimentOutcome {
        scores,
        pairwise,
        kway,
        failures,
        train_instances,
        test_instances,
        out_dir: config.out_dir.clone(),
    };
    write_outcome(config, &gold, &preds, &outcome)?;
    Ok(outcome)
}

fn write_outcome(
    config: &ExperimentConfig,
    gold: &BTreeMap<String, String>,
    preds: &[PredictionSet],
    outcome: &ExperimentOutcome,
) -> Result<()> {
    let dir = &config.out_dir;
    let pred_dir = dir.join("predictions");
    fs::create_dir_all(&pred_dir).map_err(|e| Error::io(&pred_dir, e))?;

    write_predictions(&dir.join("gold.tsv"), gold)?;
    for pred in preds {
        write_predictions(
            &pred_dir.join(format!("{}.tsv", pred.system_name)),
            &pred.answers,
        )?;
    }
    write_report(&dir.join("scores.tsv"), &render_scores_tsv(&outcome.scores))?;
    write_report(&dir.join("scores.txt"), &render_scores_text(&outcome.scores))?;
    if !outcome.pairwise.is_empty() {
        write_report(
            &dir.join("agreement_pairwise.tsv"),
            &render_pairwise_tsv(&outcome.pairwise),
        )?;
        write_report(
            &dir.join("agreement_pairwise.txt"),
            &render_pairwise_text(&outcome.pairwise),
        )?;
    }
    if let Some(kway) = &outcome.kway {
        write_report(&dir.join("agreement_kway.tsv"), &render_kway_tsv(kway))?;
        write_report(&dir.join("agreement_kway.txt"), &render_kway_text(kway))?;
    }
    write_report(&dir.join("summary.txt"), &render_summary(config, outcome))?;
    Ok(())
}

/// The human-readable run summary. Deliberately free of paths and
/// timestamps so reruns are byte-identical.
pub fn render_summary(config: &ExperimentConfig, outcome: &ExperimentOutcome) -> String {
    let mut out = String::new();
    out.push_str("lexvote experiment\n\n");
    let words: Vec<&str> = config.words.iter().map(|w| w.word.as_str()).collect();
    out.push_str(&format!("words       {}\n", words.join(", ")));
    out.push_str(&format!(
        "instances   {} train, {} test\n",
        outcome.train_instances, outcome.test_instances
    ));
    let roster: Vec<String> = config.classifiers.iter().map(|c| c.label()).collect();
    out.push_str(&format!("classifiers {}\n", roster.join(", ")));
    out.push_str(&format!("seed        {}\n", config.seed.unwrap_or(0)));
    out.push_str(&format!(
        "bagging     {} bags, {}\n",
        config.num_bags,
        if config.resample { "bootstrap resampling" } else { "full training set" }
    ));
    let t = &config.tree_params;
    if t.prune {
        out.push_str(&format!(
            "pruning     confidence {}, min leaf {}\n",
            t.pruning_confidence, t.min_leaf_instances
        ));
    } else {
        out.push_str(&format!("pruning     off, min leaf {}\n", t.min_leaf_instances));
    }
    let e = &config.extraction;
    out.push_str(&format!("unigrams    freq >= {}\n", e.unigram_min_freq));
    out.push_str(&format!(
        "bigrams     freq >= {}, G2 >= {}\n",
        e.bigram_min_freq, e.bigram_g2_threshold
    ));
    out.push_str(&format!(
        "coocs       freq >= {}, G2 >= {}, window {}\n",
        e.cooc_min_freq, e.cooc_g2_threshold, e.cooc_window
    ));
    out.push('\n');
    out.push_str(&render_scores_text(&outcome.scores));
    out.push('\n');
    if outcome.failures.is_empty() {
        out.push_str("failures    none\n");
    } else {
        for failure in &outcome.failures {
            out.push_str(&format!("failed      {}: {}\n", failure.word, failure.message));
        }
    }
    out
}
