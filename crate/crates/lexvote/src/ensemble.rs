//! Bagged tree classifiers per feature view, majority-vote ensembles of
//! views, and the baseline classifiers.
//!
//! A bagged classifier builds its view's feature set **once** from the
//! full training set, then trains each tree on a bootstrap resample
//! (uniform draws with replacement, sample size = training size). The
//! feature space therefore never depends on the seed; only the trees do.
//!
//! Every classifier that takes a vote — trees within a bag, views within
//! an ensemble — resolves ties the same way: most votes, then the sense
//! with the higher training frequency, then the lexicographically
//! smaller sense.
//!
//! Each view's bootstrap stream is seeded with `master_seed XOR
//! view.seed_tag()`, so the U member inside a UBC ensemble is exactly the
//! standalone U classifier trained at the same master seed, and adding a
//! member never perturbs another member's trees.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Instance, LexicalSample, Stoplist};
use crate::error::{Error, Result};
use crate::features::{
    build_feature_set, load_feature_set, save_feature_set, vectorize, BinaryVector,
    FeatureExtractionConfig, FeatureSet, View,
};
use crate::tree::{
    classify_tree, load_tree, save_tree, train_stump, train_tree, DecisionTree, TreeParams,
};

/// Bootstrap-aggregation settings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaggingParams {
    pub num_bags: usize,
    pub seed: u64,
    /// When false every tree trains on the full set (useful with
    /// `num_bags = 1` to recover a plain single tree).
    pub resample: bool,
}

impl Default for BaggingParams {
    fn default() -> Self {
        BaggingParams { num_bags: 10, seed: 0, resample: true }
    }
}

impl BaggingParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_bags < 1 {
            return Err(Error::validation("num_bags must be at least 1".to_string()));
        }
        Ok(())
    }
}

/// A committee of trees sharing one feature view of one target word.
#[derive(Debug, Clone, PartialEq)]
pub struct BaggedClassifier {
    pub target_word: String,
    pub view: View,
    pub feature_set: FeatureSet,
    pub trees: Vec<DecisionTree>,
    pub bag_params: BaggingParams,
    pub tree_params: TreeParams,
    /// Training counts per sense; doubles as the vote tie-breaker.
    pub sense_priors: BTreeMap<String, usize>,
}

/// Which views vote together: any non-empty subset of {U, B, C}, or the
/// single-member `mixed` spec whose one classifier is trained on the
/// union of the B and C feature sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleSpec {
    members: Vec<View>,
}

impl EnsembleSpec {
    pub fn new(mut members: Vec<View>) -> Result<Self> {
        members.sort();
        members.dedup();
        if members.is_empty() {
            return Err(Error::validation("ensemble spec needs at least one member".to_string()));
        }
        if members.contains(&View::Mixed) && members.len() > 1 {
            return Err(Error::validation(
                "the mixed view only forms a single-member ensemble".to_string(),
            ));
        }
        Ok(EnsembleSpec { members })
    }

    pub fn members(&self) -> &[View] {
        &self.members
    }

    /// Row label used in reports: member letters joined, e.g. `UBC`, or
    /// `mixed`.
    pub fn label(&self) -> String {
        self.members.iter().map(|v| v.label()).collect()
    }
}

impl fmt::Display for EnsembleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for EnsembleSpec {
    type Err = Error;

    /// Accepts `mixed` or a string of view letters such as `C`, `UB`,
    /// `UBC` (case-insensitive, order-free).
    fn from_str(s: &str) -> Result<EnsembleSpec> {
        if s.eq_ignore_ascii_case("mixed") {
            return EnsembleSpec::new(vec![View::Mixed]);
        }
        let mut members = Vec::new();
        for ch in s.chars() {
            let view = match ch.to_ascii_uppercase() {
                'U' => View::Unigram,
                'B' => View::Bigram,
                'C' => View::Cooccurrence,
                other => {
                    return Err(Error::validation(format!(
                        "unknown ensemble member {other:?} in {s:?}; expected letters U, B, C or the word mixed"
                    )))
                }
            };
            if members.contains(&view) {
                return Err(Error::validation(format!("duplicate member {view} in {s:?}")));
            }
            members.push(view);
        }
        EnsembleSpec::new(members)
    }
}

/// One bagged classifier per member view, voting jointly.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub target_word: String,
    pub spec: EnsembleSpec,
    pub members: Vec<BaggedClassifier>,
}

/// A single decision stump over the co-occurrence view.
#[derive(Debug, Clone, PartialEq)]
pub struct StumpClassifier {
    pub target_word: String,
    pub feature_set: FeatureSet,
    pub tree: DecisionTree,
}

/// Constant prediction of the most frequent training sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityClassifier {
    pub target_word: String,
    pub sense: String,
    pub sense_priors: BTreeMap<String, usize>,
}

/// Resolves a vote: most votes wins; ties go to the sense with the
/// higher prior count, then to the lexicographically smaller sense.
pub fn resolve_votes<'a>(
    votes: impl IntoIterator<Item = &'a str>,
    priors: &BTreeMap<String, usize>,
) -> String {
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    for vote in votes {
        *tally.entry(vote).or_default() += 1;
    }
    let mut best: Option<(&str, usize, usize)> = None;
    // Ascending key order + strictly-greater comparisons leave the
    // lexicographically smallest sense in place on full ties.
    for (sense, count) in tally {
        let prior = priors.get(sense).copied().unwrap_or(0);
        let wins = match best {
            None => true,
            Some((_, best_count, best_prior)) => {
                count > best_count || (count == best_count && prior > best_prior)
            }
        };
        if wins {
            best = Some((sense, count, prior));
        }
    }
    best.expect("resolve_votes requires at least one vote").0.to_string()
}

fn sense_priors(sample: &LexicalSample) -> BTreeMap<String, usize> {
    let mut priors = BTreeMap::new();
    for inst in &sample.train {
        if let Some(sense) = &inst.gold_sense {
            *priors.entry(sense.clone()).or_default() += 1;
        }
    }
    priors
}

fn training_data(
    sample: &LexicalSample,
    fs: &FeatureSet,
) -> (Vec<BinaryVector>, Vec<String>) {
    let vectors = sample.train.iter().map(|i| vectorize(i, fs)).collect();
    let labels = sample
        .train
        .iter()
        .map(|i| i.gold_sense.clone().expect("training instances carry gold senses"))
        .collect();
    (vectors, labels)
}

/// Trains one view's bagged committee. The feature set comes from the
/// full training set; each tree then sees its own bootstrap resample.
pub fn train_bagged(
    sample: &LexicalSample,
    view: View,
    stoplist: &Stoplist,
    config: &FeatureExtractionConfig,
    tree_params: &TreeParams,
    bag_params: &BaggingParams,
) -> Result<BaggedClassifier> {
    bag_params.validate()?;
    tree_params.validate()?;
    if sample.train.is_empty() {
        return Err(Error::validation(format!(
            "cannot train on an empty training set for {:?}",
            sample.target_word
        )));
    }
    let feature_set = build_feature_set(&sample.train, view, stoplist, config)?;
    let (vectors, labels) = training_data(sample, &feature_set);
    let n = vectors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(bag_params.seed ^ view.seed_tag());
    let mut trees = Vec::with_capacity(bag_params.num_bags);
    for _ in 0..bag_params.num_bags {
        let tree = if bag_params.resample {
            let mut bag_vectors = Vec::with_capacity(n);
            let mut bag_labels = Vec::with_capacity(n);
            for _ in 0..n {
                let pick = rng.gen_range(0..n);
                bag_vectors.push(vectors[pick].clone());
                bag_labels.push(labels[pick].clone());
            }
            train_tree(&bag_vectors, &bag_labels, tree_params)?
        } else {
            train_tree(&vectors, &labels, tree_params)?
        };
        trees.push(tree);
    }
    Ok(BaggedClassifier {
        target_word: sample.target_word.clone(),
        view,
        feature_set,
        trees,
        bag_params: bag_params.clone(),
        tree_params: tree_params.clone(),
        sense_priors: sense_priors(sample),
    })
}

/// One vote per tree, resolved by the shared tie-break chain.
pub fn classify_bagged(clf: &BaggedClassifier, instance: &Instance) -> String {
    let v = vectorize(instance, &clf.feature_set);
    let votes: Vec<&str> = clf
        .trees
        .iter()
        .map(|t| classify_tree(t, &v).expect("bagged trees share the feature set's width"))
        .collect();
    resolve_votes(votes, &clf.sense_priors)
}

/// Trains one bagged classifier per member view, all at the same master
/// seed.
pub fn train_ensemble(
    sample: &LexicalSample,
    spec: &EnsembleSpec,
    stoplist: &Stoplist,
    config: &FeatureExtractionConfig,
    tree_params: &TreeParams,
    bag_params: &BaggingParams,
) -> Result<Ensemble> {
    let members = spec
        .members()
        .iter()
        .map(|&view| train_bagged(sample, view, stoplist, config, tree_params, bag_params))
        .collect::<Result<Vec<_>>>()?;
    Ok(Ensemble {
        target_word: sample.target_word.clone(),
        spec: spec.clone(),
        members,
    })
}

/// One vote per member view, resolved by the shared tie-break chain.
pub fn classify_ensemble(ensemble: &Ensemble, instance: &Instance) -> String {
    let votes: Vec<String> = ensemble
        .members
        .iter()
        .map(|m| classify_bagged(m, instance))
        .collect();
    let priors = &ensemble.members[0].sense_priors;
    resolve_votes(votes.iter().map(String::as_str), priors)
}

/// Trains a one-node stump over the co-occurrence feature set.
pub fn train_stump_classifier(
    sample: &LexicalSample,
    config: &FeatureExtractionConfig,
) -> Result<StumpClassifier> {
    if sample.train.is_empty() {
        return Err(Error::validation(format!(
            "cannot train on an empty training set for {:?}",
            sample.target_word
        )));
    }
    // No stoplist: co-occurrence extraction never uses one.
    let feature_set = build_feature_set(
        &sample.train,
        View::Cooccurrence,
        &Stoplist::empty(),
        config,
    )?;
    let (vectors, labels) = training_data(sample, &feature_set);
    let tree = train_stump(&vectors, &labels)?;
    Ok(StumpClassifier {
        target_word: sample.target_word.clone(),
        feature_set,
        tree,
    })
}

pub fn classify_stump(clf: &StumpClassifier, instance: &Instance) -> String {
    let v = vectorize(instance, &clf.feature_set);
    classify_tree(&clf.tree, &v)
        .expect("stump width matches its feature set")
        .to_string()
}

/// Most frequent training sense; ties go to the lexicographically
/// smaller sense (the ascending iteration order of the priors map).
pub fn train_majority(sample: &LexicalSample) -> Result<MajorityClassifier> {
    if sample.train.is_empty() {
        return Err(Error::validation(format!(
            "cannot train on an empty training set for {:?}",
            sample.target_word
        )));
    }
    let priors = sense_priors(sample);
    let mut best: Option<(&String, usize)> = None;
    for (sense, &count) in &priors {
        // Strict > over the ascending map keeps the lexicographically
        // smallest sense on ties.
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((sense, count));
        }
    }
    let sense = best.expect("non-empty training set has at least one sense").0.clone();
    Ok(MajorityClassifier {
        target_word: sample.target_word.clone(),
        sense,
        sense_priors: priors,
    })
}

pub fn classify_majority<'a>(clf: &'a MajorityClassifier, _instance: &Instance) -> &'a str {
    &clf.sense
}

/// Any trained classifier, for uniform bundle IO and prediction.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Bagged(BaggedClassifier),
    Ensemble(Ensemble),
    Stump(StumpClassifier),
    Majority(MajorityClassifier),
}

impl Model {
    pub fn target_word(&self) -> &str {
        match self {
            Model::Bagged(c) => &c.target_word,
            Model::Ensemble(e) => &e.target_word,
            Model::Stump(s) => &s.target_word,
            Model::Majority(m) => &m.target_word,
        }
    }

    pub fn classify(&self, instance: &Instance) -> String {
        match self {
            Model::Bagged(c) => classify_bagged(c, instance),
            Model::Ensemble(e) => classify_ensemble(e, instance),
            Model::Stump(s) => classify_stump(s, instance),
            Model::Majority(m) => classify_majority(m, instance).to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Model bundles
// ---------------------------------------------------------------------------
//
// A model is a directory: `manifest.txt` (flat tab-separated key/value
// lines) plus, depending on the kind, a `features.tsv` feature set, one
// `tree_NN.txt` per bag, and per-member subdirectories for ensembles.

const MODEL_FORMAT: &str = "lexvote-model";
const MODEL_FORMAT_VERSION: &str = "1";

struct ManifestWriter {
    out: String,
}

impl ManifestWriter {
    fn new(kind: &str, target_word: &str) -> Self {
        let mut out = String::new();
        out.push_str(&format!("{MODEL_FORMAT}\t{MODEL_FORMAT_VERSION}\n"));
        out.push_str(&format!("kind\t{kind}\n"));
        out.push_str(&format!("target_word\t{target_word}\n"));
        ManifestWriter { out }
    }

    fn kv(&mut self, key: &str, value: impl fmt::Display) {
        self.out.push_str(&format!("{key}\t{value}\n"));
    }

    fn priors(&mut self, priors: &BTreeMap<String, usize>) {
        self.kv("priors", priors.len());
        for (sense, count) in priors {
            self.out.push_str(&format!("{sense}\t{count}\n"));
        }
    }

    fn write(self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.txt");
        let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        file.write_all(self.out.as_bytes()).map_err(|e| Error::io(&path, e))
    }
}

struct ManifestReader {
    lines: Vec<(usize, String)>,
    next: usize,
    path: std::path::PathBuf,
}

impl ManifestReader {
    fn open(dir: &Path) -> Result<Self> {
        let path = dir.join("manifest.txt");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.to_string()))
            .collect();
        Ok(ManifestReader { lines, next: 0, path })
    }

    fn expect(&mut self, key: &str) -> Result<String> {
        let Some((lineno, line)) = self.lines.get(self.next) else {
            return Err(Error::validation(format!(
                "{}: missing {key:?} line",
                self.path.display()
            )));
        };
        self.next += 1;
        let (k, v) = line.split_once('\t').ok_or_else(|| {
            Error::parse(&self.path, *lineno, format!("expected `{key}<TAB>value`"))
        })?;
        if k != key {
            return Err(Error::parse(
                &self.path,
                *lineno,
                format!("expected key {key:?}, found {k:?}"),
            ));
        }
        Ok(v.to_string())
    }

    fn expect_parsed<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let raw = self.expect(key)?;
        raw.parse().map_err(|_| {
            Error::validation(format!(
                "{}: malformed value {raw:?} for {key:?}",
                self.path.display()
            ))
        })
    }

    fn priors(&mut self) -> Result<BTreeMap<String, usize>> {
        let count: usize = self.expect_parsed("priors")?;
        let mut priors = BTreeMap::new();
        for _ in 0..count {
            let Some((lineno, line)) = self.lines.get(self.next) else {
                return Err(Error::validation(format!(
                    "{}: truncated priors block",
                    self.path.display()
                )));
            };
            self.next += 1;
            let (sense, count) = line.split_once('\t').ok_or_else(|| {
                Error::parse(&self.path, *lineno, "expected `sense<TAB>count`".to_string())
            })?;
            let count: usize = count.parse().map_err(|_| {
                Error::parse(&self.path, *lineno, format!("bad prior count {count:?}"))
            })?;
            priors.insert(sense.to_string(), count);
        }
        Ok(priors)
    }
}

fn tree_file_name(index: usize) -> String {
    format!("tree_{index:02}.txt")
}

fn save_bagged_parts(dir: &Path, clf: &BaggedClassifier) -> Result<()> {
    save_feature_set(&dir.join("features.tsv"), &clf.feature_set)?;
    for (i, tree) in clf.trees.iter().enumerate() {
        save_tree(&dir.join(tree_file_name(i)), tree)?;
    }
    let mut manifest = ManifestWriter::new("bagged", &clf.target_word);
    manifest.kv("view", clf.view);
    manifest.kv("num_bags", clf.bag_params.num_bags);
    manifest.kv("seed", clf.bag_params.seed);
    manifest.kv("resample", clf.bag_params.resample);
    manifest.kv("min_leaf_instances", clf.tree_params.min_leaf_instances);
    manifest.kv("pruning_confidence", clf.tree_params.pruning_confidence);
    manifest.kv("prune", clf.tree_params.prune);
    manifest.kv("trees", clf.trees.len());
    manifest.priors(&clf.sense_priors);
    manifest.write(dir)
}

fn load_bagged_parts(dir: &Path, manifest: &mut ManifestReader) -> Result<BaggedClassifier> {
    let target_word = manifest.expect("target_word")?;
    let view: View = manifest.expect_parsed("view")?;
    let num_bags: usize = manifest.expect_parsed("num_bags")?;
    let seed: u64 = manifest.expect_parsed("seed")?;
    let resample: bool = manifest.expect_parsed("resample")?;
    let min_leaf_instances: usize = manifest.expect_parsed("min_leaf_instances")?;
    let pruning_confidence: f64 = manifest.expect_parsed("pruning_confidence")?;
    let prune: bool = manifest.expect_parsed("prune")?;
    let tree_count: usize = manifest.expect_parsed("trees")?;
    let sense_priors = manifest.priors()?;
    let feature_set = load_feature_set(&dir.join("features.tsv"))?;
    let mut trees = Vec::with_capacity(tree_count);
    for i in 0..tree_count {
        trees.push(load_tree(&dir.join(tree_file_name(i)))?);
    }
    Ok(BaggedClassifier {
        target_word,
        view,
        feature_set,
        trees,
        bag_params: BaggingParams { num_bags, seed, resample },
        tree_params: TreeParams { min_leaf_instances, pruning_confidence, prune },
        sense_priors,
    })
}

/// Writes a model bundle directory; parents are created as needed.
/// Output bytes are a pure function of the model.
pub fn save_model(dir: &Path, model: &Model) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    match model {
        Model::Bagged(clf) => save_bagged_parts(dir, clf),
        Model::Ensemble(ensemble) => {
            for member in &ensemble.members {
                let subdir = dir.join(member.view.label());
                fs::create_dir_all(&subdir).map_err(|e| Error::io(&subdir, e))?;
                save_bagged_parts(&subdir, member)?;
            }
            let mut manifest = ManifestWriter::new("ensemble", &ensemble.target_word);
            manifest.kv("members", ensemble.spec.label());
            manifest.write(dir)
        }
        Model::Stump(stump) => {
            save_feature_set(&dir.join("features.tsv"), &stump.feature_set)?;
            save_tree(&dir.join(tree_file_name(0)), &stump.tree)?;
            let manifest = ManifestWriter::new("stump", &stump.target_word);
            manifest.write(dir)
        }
        Model::Majority(majority) => {
            let mut manifest = ManifestWriter::new("majority", &majority.target_word);
            manifest.kv("sense", &majority.sense);
            manifest.priors(&majority.sense_priors);
            manifest.write(dir)
        }
    }
}

/// Loads any bundle written by [`save_model`].
pub fn load_model(dir: &Path) -> Result<Model> {
    let mut manifest = ManifestReader::open(dir)?;
    let version = manifest.expect(MODEL_FORMAT)?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::validation(format!(
            "{}: unsupported model format version {version:?}",
            dir.display()
        )));
    }
    let kind = manifest.expect("kind")?;
    match kind.as_str() {
        "bagged" => Ok(Model::Bagged(load_bagged_parts(dir, &mut manifest)?)),
        "ensemble" => {
            let target_word = manifest.expect("target_word")?;
            let spec: EnsembleSpec = manifest.expect_parsed("members")?;
            let mut members = Vec::new();
            for view in spec.members() {
                let subdir = dir.join(view.label());
                let mut sub_manifest = ManifestReader::open(&subdir)?;
                let sub_version = sub_manifest.expect(MODEL_FORMAT)?;
                let sub_kind = sub_manifest.expect("kind")?;
                if sub_version != MODEL_FORMAT_VERSION || sub_kind != "bagged" {
                    return Err(Error::validation(format!(
                        "{}: ensemble member is not a bagged model bundle",
                        subdir.display()
                    )));
                }
                members.push(load_bagged_parts(&subdir, &mut sub_manifest)?);
            }
            Ok(Model::Ensemble(Ensemble { target_word, spec, members }))
        }
        "stump" => {
            let target_word = manifest.expect("target_word")?;
            let feature_set = load_feature_set(&dir.join("features.tsv"))?;
            let tree = load_tree(&dir.join(tree_file_name(0)))?;
            Ok(Model::Stump(StumpClassifier { target_word, feature_set, tree }))
        }
        "majority" => {
            let target_word = manifest.expect("target_word")?;
            let sense = manifest.expect("sense")?;
            let sense_priors = manifest.priors()?;
            Ok(Model::Majority(MajorityClassifier { target_word, sense, sense_priors }))
        }
        other => Err(Error::validation(format!(
            "{}: unknown model kind {other:?}",
            dir.display()
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Instance;

    /// A small corpus where the token right before the target decides the
    /// sense, with a little vocabulary noise around it.
    fn cue_sample(per_sense: usize) -> LexicalSample {
        let cues = [("river", "s.water"), ("money", "s.cash"), ("blood", "s.vein")];
        let noise = ["one", "two", "three", "four", "five", "six"];
        let mut train = Vec::new();
        let mut test = Vec::new();
        let mut k = 0;
        for (cue, sense) in cues {
            for i in 0..per_sense {
                let tokens = vec![
                    noise[k % noise.len()].to_string(),
                    cue.to_string(),
                    "bank".to_string(),
                    noise[(k / 2 + i) % noise.len()].to_string(),
                ];
                let inst = Instance::new(
                    format!("bank.{sense}.{i}"),
                    "bank",
                    tokens,
                    2,
                    Some(sense.to_string()),
                )
                .unwrap();
                if i % 4 == 3 {
                    test.push(inst);
                } else {
                    train.push(inst);
                }
                k += 1;
            }
        }
        LexicalSample::new(train, test).unwrap()
    }

    fn default_setup() -> (Stoplist, FeatureExtractionConfig, TreeParams) {
        let config = FeatureExtractionConfig {
            unigram_min_freq: 2,
            ..Default::default()
        };
        (Stoplist::empty(), config, TreeParams::default())
    }

    #[test]
    fn single_unsampled_bag_equals_plain_tree() {
        let sample = cue_sample(12);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { num_bags: 1, resample: false, seed: 99 };
        let clf = train_bagged(
            &sample,
            View::Cooccurrence,
            &stop,
            &config,
            &tree_params,
            &bag_params,
        )
        .unwrap();
        assert_eq!(clf.trees.len(), 1);

        let fs = build_feature_set(&sample.train, View::Cooccurrence, &stop, &config).unwrap();
        let (vectors, labels) = training_data(&sample, &fs);
        let plain = train_tree(&vectors, &labels, &tree_params).unwrap();
        assert_eq!(clf.trees[0], plain);
        for inst in sample.train.iter().chain(sample.test.iter()) {
            let v = vectorize(inst, &fs);
            assert_eq!(
                classify_bagged(&clf, inst),
                classify_tree(&plain, &v).unwrap()
            );
        }
    }

    #[test]
    fn fixed_seed_reproduces_trees_exactly() {
        let sample = cue_sample(10);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { seed: 7, ..Default::default() };
        let a = train_bagged(&sample, View::Bigram, &stop, &config, &tree_params, &bag_params)
            .unwrap();
        let b = train_bagged(&sample, View::Bigram, &stop, &config, &tree_params, &bag_params)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strong_cue_survives_every_bootstrap() {
        let sample = cue_sample(16);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { seed: 3, ..Default::default() };
        let clf = train_bagged(
            &sample,
            View::Cooccurrence,
            &stop,
            &config,
            &tree_params,
            &bag_params,
        )
        .unwrap();
        let fs = &clf.feature_set;
        for tree in &clf.trees {
            for inst in &sample.train {
                let v = vectorize(inst, fs);
                assert_eq!(
                    classify_tree(tree, &v).unwrap(),
                    inst.gold_sense.as_deref().unwrap()
                );
            }
        }
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let sample = LexicalSample::default();
        let (stop, config, tree_params) = default_setup();
        let err = train_bagged(
            &sample,
            View::Unigram,
            &stop,
            &config,
            &tree_params,
            &BaggingParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    fn leaf_tree(sense: &str) -> DecisionTree {
        DecisionTree {
            width: 0,
            root: crate::tree::Node::Leaf {
                distribution: [(sense.to_string(), 1)].into(),
                prediction: sense.to_string(),
            },
        }
    }

    fn vote_fixture(votes: &[&str], priors: &[(&str, usize)]) -> BaggedClassifier {
        BaggedClassifier {
            target_word: "w".to_string(),
            view: View::Unigram,
            feature_set: FeatureSet {
                view: View::Unigram,
                config: Default::default(),
                features: vec![],
            },
            trees: votes.iter().map(|v| leaf_tree(v)).collect(),
            bag_params: BaggingParams::default(),
            tree_params: TreeParams::default(),
            sense_priors: priors.iter().map(|(s, c)| (s.to_string(), *c)).collect(),
        }
    }

    fn any_instance() -> Instance {
        Instance::new("x.1", "w", vec!["w".to_string()], 0, None).unwrap()
    }

    #[test]
    fn bagged_vote_majority_and_tiebreaks() {
        let clf = vote_fixture(&["a", "a", "b"], &[("a", 1), ("b", 9)]);
        assert_eq!(classify_bagged(&clf, &any_instance()), "a");

        let tied = vote_fixture(&["a", "b"], &[("a", 10), ("b", 5)]);
        assert_eq!(classify_bagged(&tied, &any_instance()), "a");

        let one_tree = vote_fixture(&["b"], &[("a", 10), ("b", 5)]);
        assert_eq!(classify_bagged(&one_tree, &any_instance()), "b");
    }

    #[test]
    fn vote_resolution_falls_back_lexicographically() {
        let priors: BTreeMap<String, usize> = [("a".to_string(), 5), ("b".to_string(), 5)].into();
        assert_eq!(resolve_votes(["b", "a"], &priors), "a");
        let priors3: BTreeMap<String, usize> =
            [("a".to_string(), 5), ("b".to_string(), 5), ("c".to_string(), 9)].into();
        assert_eq!(resolve_votes(["a", "b", "c"], &priors3), "c");
    }

    #[test]
    fn ensemble_spec_parsing() {
        assert_eq!("UBC".parse::<EnsembleSpec>().unwrap().label(), "UBC");
        assert_eq!("cb".parse::<EnsembleSpec>().unwrap().label(), "BC");
        assert_eq!("mixed".parse::<EnsembleSpec>().unwrap().label(), "mixed");
        assert_eq!("U".parse::<EnsembleSpec>().unwrap().members(), [View::Unigram]);
        assert!("".parse::<EnsembleSpec>().is_err());
        assert!("UU".parse::<EnsembleSpec>().is_err());
        assert!("UX".parse::<EnsembleSpec>().is_err());
        assert!(EnsembleSpec::new(vec![View::Mixed, View::Unigram]).is_err());
    }

    #[test]
    fn singleton_ensemble_equals_bagged_member() {
        let sample = cue_sample(10);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { seed: 21, ..Default::default() };
        for view in [View::Unigram, View::Bigram, View::Cooccurrence, View::Mixed] {
            let spec = EnsembleSpec::new(vec![view]).unwrap();
            let ensemble =
                train_ensemble(&sample, &spec, &stop, &config, &tree_params, &bag_params)
                    .unwrap();
            let solo =
                train_bagged(&sample, view, &stop, &config, &tree_params, &bag_params).unwrap();
            for inst in sample.test.iter().chain(sample.train.iter()) {
                assert_eq!(
                    classify_ensemble(&ensemble, inst),
                    classify_bagged(&solo, inst)
                );
            }
        }
    }

    #[test]
    fn ensemble_members_match_standalone_training() {
        let sample = cue_sample(10);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { seed: 5, ..Default::default() };
        let spec: EnsembleSpec = "UBC".parse().unwrap();
        let ensemble =
            train_ensemble(&sample, &spec, &stop, &config, &tree_params, &bag_params).unwrap();
        for member in &ensemble.members {
            let solo = train_bagged(
                &sample,
                member.view,
                &stop,
                &config,
                &tree_params,
                &bag_params,
            )
            .unwrap();
            assert_eq!(*member, solo);
        }
    }

    #[test]
    fn majority_classifier_and_tiebreak() {
        let sample = cue_sample(8);
        let clf = train_majority(&sample).unwrap();
        let top = sample.sense_inventory.iter().next().unwrap();
        // cue_sample is balanced, so the tie resolves lexicographically.
        assert_eq!(&clf.sense, top);
        assert_eq!(classify_majority(&clf, &any_instance()), clf.sense);
        assert!(train_majority(&LexicalSample::default()).is_err());
    }

    #[test]
    fn stump_classifier_learns_a_cooc_cue() {
        let sample = cue_sample(12);
        let config = FeatureExtractionConfig::default();
        let stump = train_stump_classifier(&sample, &config).unwrap();
        assert!(stump.tree.depth() <= 1);
        let correct = sample
            .test
            .iter()
            .filter(|i| classify_stump(&stump, i) == *i.gold_sense.as_ref().unwrap())
            .count();
        // One cue feature can capture at most one sense; it must at least
        // beat random among three balanced senses.
        assert!(correct * 3 >= sample.test.len());
    }

    #[test]
    fn model_bundles_roundtrip() {
        let sample = cue_sample(10);
        let (stop, config, tree_params) = default_setup();
        let bag_params = BaggingParams { seed: 11, num_bags: 3, ..Default::default() };
        let spec: EnsembleSpec = "UC".parse().unwrap();

        let models = [
            Model::Bagged(
                train_bagged(&sample, View::Bigram, &stop, &config, &tree_params, &bag_params)
                    .unwrap(),
            ),
            Model::Ensemble(
                train_ensemble(&sample, &spec, &stop, &config, &tree_params, &bag_params)
                    .unwrap(),
            ),
            Model::Stump(train_stump_classifier(&sample, &config).unwrap()),
            Model::Majority(train_majority(&sample).unwrap()),
        ];
        let dir = tempfile::tempdir().unwrap();
        for (i, model) in models.iter().enumerate() {
            let bundle = dir.path().join(format!("model_{i}"));
            save_model(&bundle, model).unwrap();
            let reloaded = load_model(&bundle).unwrap();
            assert_eq!(*model, reloaded);
            for inst in &sample.test {
                assert_eq!(model.classify(inst), reloaded.classify(inst));
            }
        }
    }

    #[test]
    fn load_model_rejects_missing_bundle() {
        let err = load_model(Path::new("/nonexistent/bundle")).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
