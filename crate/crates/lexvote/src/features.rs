//! Lexical feature views and significance-filtered selection.
//!
//! Three views of a training corpus, each yielding binary features:
//!
//! * **U** — unigrams: single context words, stoplist-filtered, kept when
//!   they occur at least `unigram_min_freq` times.
//! * **B** — bigrams: adjacent word pairs anywhere in the context, dropped
//!   only when *both* words are stoplisted, kept when frequent enough and
//!   the pair's G² log-likelihood statistic reaches `bigram_g2_threshold`
//!   (default 6.635, the 1-df χ² critical value at p = 0.01).
//! * **C** — co-occurrences: ordered pairs of the target word and a word
//!   within `cooc_window` positions on either side, no stoplist, gated at
//!   `cooc_g2_threshold` (default 2.706, p = 0.10).
//!
//! The **mixed** view is the union of B and C. Frequency floors apply
//! before the G² gate, so a rare pair is never scored at all.
//!
//! G² is computed over a 2×2 contingency table of pair events. The event
//! spaces differ per view: bigram events are all adjacent token slots in
//! the training corpus (the stoplist filters candidates, not events);
//! co-occurrence events are the window slots around each target token,
//! with the pair written (word, target) for slots left of the target and
//! (target, word) for slots to its right.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::corpus::{Instance, Stoplist};
use crate::error::{Error, Result};

/// Which feature representation a classifier is trained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum View {
    Unigram,
    Bigram,
    Cooccurrence,
    Mixed,
}

impl View {
    pub const ALL: [View; 4] = [View::Unigram, View::Bigram, View::Cooccurrence, View::Mixed];

    /// Short label used in reports and file formats: U, B, C, or mixed.
    pub fn label(self) -> &'static str {
        match self {
            View::Unigram => "U",
            View::Bigram => "B",
            View::Cooccurrence => "C",
            View::Mixed => "mixed",
        }
    }

    /// Stable per-view constant XORed into the master seed so that each
    /// view's bootstrap stream is independent of which other views run.
    /// The values are the ASCII codes of the view labels.
    pub fn seed_tag(self) -> u64 {
        match self {
            View::Unigram => 0x55,
            View::Bigram => 0x42,
            View::Cooccurrence => 0x43,
            View::Mixed => 0x6d,
        }
    }
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for View {
    type Err = Error;

    fn from_str(s: &str) -> Result<View> {
        match s.to_lowercase().as_str() {
            "u" | "unigram" => Ok(View::Unigram),
            "b" | "bigram" => Ok(View::Bigram),
            "c" | "cooccurrence" | "cooc" => Ok(View::Cooccurrence),
            "mixed" => Ok(View::Mixed),
            other => Err(Error::validation(format!(
                "unknown view {other:?}; expected U, B, C, or mixed"
            ))),
        }
    }
}

/// Thresholds and window width controlling feature selection.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureExtractionConfig {
    pub unigram_min_freq: u64,
    pub bigram_min_freq: u64,
    pub bigram_g2_threshold: f64,
    pub cooc_min_freq: u64,
    pub cooc_g2_threshold: f64,
    pub cooc_window: usize,
}

impl Default for FeatureExtractionConfig {
    fn default() -> Self {
        FeatureExtractionConfig {
            unigram_min_freq: 5,
            bigram_min_freq: 2,
            bigram_g2_threshold: 6.635,
            cooc_min_freq: 2,
            cooc_g2_threshold: 2.706,
            cooc_window: 2,
        }
    }
}

impl FeatureExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.unigram_min_freq < 1 || self.bigram_min_freq < 1 || self.cooc_min_freq < 1 {
            return Err(Error::validation(
                "frequency floors must be at least 1".to_string(),
            ));
        }
        // `is_nan` checks keep NaN out; negative thresholds make no sense.
        if self.bigram_g2_threshold.is_nan()
            || self.bigram_g2_threshold < 0.0
            || self.cooc_g2_threshold.is_nan()
            || self.cooc_g2_threshold < 0.0
        {
            return Err(Error::validation(
                "G² thresholds must be non-negative".to_string(),
            ));
        }
        if self.cooc_window < 1 {
            return Err(Error::validation("cooc_window must be at least 1".to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureKind {
    Unigram,
    Bigram,
    Cooccurrence,
}

impl FeatureKind {
    pub fn label(self) -> &'static str {
        match self {
            FeatureKind::Unigram => "unigram",
            FeatureKind::Bigram => "bigram",
            FeatureKind::Cooccurrence => "cooccurrence",
        }
    }
}

/// For a co-occurrence pair, which element is the target word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetSide {
    First,
    Second,
}

/// One binary feature: a word, an adjacent word pair, or an ordered
/// (target, word) / (word, target) pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Feature {
    pub kind: FeatureKind,
    /// 1 word for unigrams, 2 for the pair kinds, in corpus order.
    pub words: Vec<String>,
    /// `Some` exactly for co-occurrence features.
    pub target_side: Option<TargetSide>,
}

impl Feature {
    pub fn unigram(word: impl Into<String>) -> Feature {
        Feature {
            kind: FeatureKind::Unigram,
            words: vec![word.into()],
            target_side: None,
        }
    }

    pub fn bigram(first: impl Into<String>, second: impl Into<String>) -> Feature {
        Feature {
            kind: FeatureKind::Bigram,
            words: vec![first.into(), second.into()],
            target_side: None,
        }
    }

    pub fn cooccurrence(
        first: impl Into<String>,
        second: impl Into<String>,
        target_side: TargetSide,
    ) -> Feature {
        Feature {
            kind: FeatureKind::Cooccurrence,
            words: vec![first.into(), second.into()],
            target_side: Some(target_side),
        }
    }

    /// Human-readable form: the words joined by spaces, e.g. `art of`.
    pub fn text(&self) -> String {
        self.words.join(" ")
    }
}

impl PartialOrd for Feature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Feature {
    /// Word-lexicographic first so score ties in reports read alphabetically,
    /// then kind and side to keep the order total across mixed views.
    fn cmp(&self, other: &Self) -> Ordering {
        self.words
            .cmp(&other.words)
            .then(self.kind.cmp(&other.kind))
            .then(self.target_side.cmp(&other.target_side))
    }
}

/// A feature together with the score that selected it: corpus frequency
/// for unigrams, the G² statistic for the pair kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredFeature {
    pub feature: Feature,
    pub score: f64,
}

/// An ordered, duplicate-free feature list for one view, with the config
/// that produced it. Ordering is deterministic: descending score, ties
/// broken by the features' lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub view: View,
    pub config: FeatureExtractionConfig,
    pub features: Vec<ScoredFeature>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// A 0/1 encoding of one instance against a feature set; bit *i* says
/// whether feature *i* occurs in the instance's context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryVector {
    pub bits: Vec<bool>,
}

impl BinaryVector {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// G² log-likelihood ratio statistic of a 2×2 contingency table:
/// `2·Σ O·ln(O/E)` over the four cells, with expected counts from the
/// row/column marginals and `0·ln(0/E)` taken as 0.
///
/// Always ≥ 0, and 0 exactly when every observed count equals its
/// expectation (proportional rows).
pub fn g2_statistic(n11: u64, n12: u64, n21: u64, n22: u64) -> Result<f64> {
    let r1 = n11 + n12;
    let r2 = n21 + n22;
    let c1 = n11 + n21;
    let c2 = n12 + n22;
    let n = r1 + r2;
    if n == 0 {
        return Err(Error::domain("G² is undefined on an all-zero table".to_string()));
    }
    let n = n as f64;
    let mut sum = 0.0;
    for (obs, row, col) in [
        (n11, r1, c1),
        (n12, r1, c2),
        (n21, r2, c1),
        (n22, r2, c2),
    ] {
        if obs > 0 {
            let expected = (row as f64) * (col as f64) / n;
            sum += (obs as f64) * ((obs as f64) / expected).ln();
        }
    }
    Ok((2.0 * sum).max(0.0))
}

/// Unigram candidates of one instance: every non-stoplisted token
/// (including the target token itself), duplicates collapsed, order of
/// first occurrence.
pub fn extract_unigram_candidates(instance: &Instance, stoplist: &Stoplist) -> Vec<Feature> {
    let mut seen = Vec::new();
    for token in &instance.tokens {
        if stoplist.contains(token) {
            continue;
        }
        let feat = Feature::unigram(token.clone());
        if !seen.contains(&feat) {
            seen.push(feat);
        }
    }
    seen
}

/// Bigram candidates of one instance: every adjacent token pair except
/// those whose words are *both* stoplisted, duplicates collapsed, order
/// preserved.
pub fn extract_bigram_candidates(instance: &Instance, stoplist: &Stoplist) -> Vec<Feature> {
    let mut seen = Vec::new();
    for pair in instance.tokens.windows(2) {
        if stoplist.contains(&pair[0]) && stoplist.contains(&pair[1]) {
            continue;
        }
        let feat = Feature::bigram(pair[0].clone(), pair[1].clone());
        if !seen.contains(&feat) {
            seen.push(feat);
        }
    }
    seen
}

/// Co-occurrence candidates of one instance: for each context token at
/// signed distance d with 1 ≤ |d| ≤ window, the pair (token, target) when
/// the token precedes the target and (target, token) when it follows.
/// No stoplist applies. A nearby copy of the target word itself is
/// skipped — a pair must contain the target exactly once.
pub fn extract_cooc_candidates(instance: &Instance, window: usize) -> Vec<Feature> {
    let mut seen = Vec::new();
    for (token, side) in cooc_slots(instance, window) {
        if token == instance.target_word {
            continue;
        }
        let feat = match side {
            TargetSide::First => {
                Feature::cooccurrence(instance.target_word.clone(), token, TargetSide::First)
            }
            TargetSide::Second => {
                Feature::cooccurrence(token, instance.target_word.clone(), TargetSide::Second)
            }
        };
        if !seen.contains(&feat) {
            seen.push(feat);
        }
    }
    seen
}

/// Window slots of one instance in distance order (-window … -1, +1 …
/// +window), each as (context token, which side the target sits on).
fn cooc_slots(instance: &Instance, window: usize) -> Vec<(String, TargetSide)> {
    let mut slots = Vec::new();
    let t = instance.target_index as isize;
    let len = instance.tokens.len() as isize;
    for d in -(window as isize)..=(window as isize) {
        if d == 0 {
            continue;
        }
        let pos = t + d;
        if pos < 0 || pos >= len {
            continue;
        }
        let token = instance.tokens[pos as usize].clone();
        // Left of the target the pair reads (token, target): target second.
        let side = if d < 0 { TargetSide::Second } else { TargetSide::First };
        slots.push((token, side));
    }
    slots
}

/// Builds the feature set for one view from the full training corpus.
///
/// Candidates below a view's frequency floor are never G²-scored; the
/// mixed view is the union of the B and C selections with kinds kept
/// distinct.
pub fn build_feature_set(
    train: &[Instance],
    view: View,
    stoplist: &Stoplist,
    config: &FeatureExtractionConfig,
) -> Result<FeatureSet> {
    config.validate()?;
    let mut scored = match view {
        View::Unigram => select_unigrams(train, stoplist, config),
        View::Bigram => select_bigrams(train, stoplist, config)?,
        View::Cooccurrence => select_coocs(train, config)?,
        View::Mixed => {
            let mut all = select_bigrams(train, stoplist, config)?;
            all.extend(select_coocs(train, config)?);
            all
        }
    };
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.feature.cmp(&b.feature))
    });
    Ok(FeatureSet {
        view,
        config: config.clone(),
        features: scored,
    })
}

fn select_unigrams(
    train: &[Instance],
    stoplist: &Stoplist,
    config: &FeatureExtractionConfig,
) -> Vec<ScoredFeature> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for inst in train {
        for token in &inst.tokens {
            if !stoplist.contains(token) {
                *counts.entry(token.as_str()).or_default() += 1;
            }
        }
    }
    counts
        .into_iter()
        .filter(|&(_, freq)| freq >= config.unigram_min_freq)
        .map(|(word, freq)| ScoredFeature {
            feature: Feature::unigram(word),
            score: freq as f64,
        })
        .collect()
}

fn select_bigrams(
    train: &[Instance],
    stoplist: &Stoplist,
    config: &FeatureExtractionConfig,
) -> Result<Vec<ScoredFeature>> {
    // Event space: every adjacent token slot in the corpus. The stoplist
    // narrows the candidate list but never removes events from the table.
    let mut pair_counts: HashMap<(String, String), u64> = HashMap::new();
    let mut first_counts: HashMap<&str, u64> = HashMap::new();
    let mut second_counts: HashMap<&str, u64> = HashMap::new();
    let mut total: u64 = 0;
    for inst in train {
        for pair in inst.tokens.windows(2) {
            *pair_counts
                .entry((pair[0].clone(), pair[1].clone()))
                .or_default() += 1;
            total += 1;
        }
    }
    for ((first, second), freq) in &pair_counts {
        *first_counts.entry(first).or_default() += freq;
        *second_counts.entry(second).or_default() += freq;
    }
    let mut selected = Vec::new();
    for ((first, second), &freq) in &pair_counts {
        if freq < config.bigram_min_freq {
            continue;
        }
        if stoplist.contains(first) && stoplist.contains(second) {
            continue;
        }
        let n11 = freq;
        let n12 = first_counts[first.as_str()] - n11;
        let n21 = second_counts[second.as_str()] - n11;
        let n22 = total - n11 - n12 - n21;
        let g2 = g2_statistic(n11, n12, n21, n22)?;
        if g2 >= config.bigram_g2_threshold {
            selected.push(ScoredFeature {
                feature: Feature::bigram(first.clone(), second.clone()),
                score: g2,
            });
        }
    }
    Ok(selected)
}

fn select_coocs(train: &[Instance], config: &FeatureExtractionConfig) -> Result<Vec<ScoredFeature>> {
    // Event space: each (instance, signed offset) window slot yields one
    // ordered pair. A context copy of the target word still counts as an
    // event — it only drops out of the candidate list.
    let mut pair_counts: HashMap<(String, String), (u64, TargetSide)> = HashMap::new();
    let mut first_counts: HashMap<&str, u64> = HashMap::new();
    let mut second_counts: HashMap<&str, u64> = HashMap::new();
    let mut total: u64 = 0;
    for inst in train {
        for (token, side) in cooc_slots(inst, config.cooc_window) {
            let pair = match side {
                TargetSide::First => (inst.target_word.clone(), token),
                TargetSide::Second => (token, inst.target_word.clone()),
            };
            pair_counts.entry(pair).or_insert((0, side)).0 += 1;
            total += 1;
        }
    }
    for ((first, second), (freq, _)) in &pair_counts {
        *first_counts.entry(first).or_default() += freq;
        *second_counts.entry(second).or_default() += freq;
    }
    let mut selected = Vec::new();
    for ((first, second), &(freq, side)) in &pair_counts {
        if freq < config.cooc_min_freq || first == second {
            continue;
        }
        let n11 = freq;
        let n12 = first_counts[first.as_str()] - n11;
        let n21 = second_counts[second.as_str()] - n11;
        let n22 = total - n11 - n12 - n21;
        let g2 = g2_statistic(n11, n12, n21, n22)?;
        if g2 >= config.cooc_g2_threshold {
            selected.push(ScoredFeature {
                feature: Feature::cooccurrence(first.clone(), second.clone(), side),
                score: g2,
            });
        }
    }
    Ok(selected)
}

/// Encodes an instance against a feature set: bit *i* is true iff feature
/// *i* occurs at least once in the instance.
///
/// Matching is purely positional for co-occurrences — the non-target word
/// must appear within `cooc_window` positions on the feature's side of
/// the target — so the stoplist plays no role here.
pub fn vectorize(instance: &Instance, fs: &FeatureSet) -> BinaryVector {
    let bits = fs
        .features
        .iter()
        .map(|sf| feature_fires(instance, &sf.feature, fs.config.cooc_window))
        .collect();
    BinaryVector { bits }
}

fn feature_fires(instance: &Instance, feature: &Feature, window: usize) -> bool {
    match feature.kind {
        FeatureKind::Unigram => instance.tokens.iter().any(|t| *t == feature.words[0]),
        FeatureKind::Bigram => instance
            .tokens
            .windows(2)
            .any(|pair| pair[0] == feature.words[0] && pair[1] == feature.words[1]),
        FeatureKind::Cooccurrence => {
            let (context_word, feature_side) = match feature.target_side {
                Some(TargetSide::First) => (&feature.words[1], TargetSide::First),
                Some(TargetSide::Second) => (&feature.words[0], TargetSide::Second),
                None => return false,
            };
            cooc_slots(instance, window)
                .iter()
                .any(|(token, side)| *side == feature_side && token == context_word)
        }
    }
}

const FEATURE_FORMAT: &str = "lexvote-features";
const FEATURE_FORMAT_VERSION: &str = "1";

/// Writes a feature set as structured text: a format line, the view, the
/// config, and one `feature` line per entry in selection order. Stable
/// byte-for-byte for identical inputs.
pub fn save_feature_set(path: &Path, fs: &FeatureSet) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("{FEATURE_FORMAT}\t{FEATURE_FORMAT_VERSION}\n"));
    out.push_str(&format!("view\t{}\n", fs.view));
    out.push_str(&format!("unigram_min_freq\t{}\n", fs.config.unigram_min_freq));
    out.push_str(&format!("bigram_min_freq\t{}\n", fs.config.bigram_min_freq));
    out.push_str(&format!("bigram_g2_threshold\t{}\n", fs.config.bigram_g2_threshold));
    out.push_str(&format!("cooc_min_freq\t{}\n", fs.config.cooc_min_freq));
    out.push_str(&format!("cooc_g2_threshold\t{}\n", fs.config.cooc_g2_threshold));
    out.push_str(&format!("cooc_window\t{}\n", fs.config.cooc_window));
    out.push_str(&format!("features\t{}\n", fs.features.len()));
    for sf in &fs.features {
        let side = match sf.feature.target_side {
            Some(TargetSide::First) => "first",
            Some(TargetSide::Second) => "second",
            None => "-",
        };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            sf.feature.kind.label(),
            sf.feature.text(),
            side,
            sf.score
        ));
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Reads a feature set written by [`save_feature_set`]; the round trip is
/// exact (ordering, scores, and config included).
pub fn load_feature_set(path: &Path) -> Result<FeatureSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    let mut next_kv = |expect: &str| -> Result<String> {
        match lines.next() {
            Some((idx, line)) => {
                let (key, value) = line.split_once('\t').ok_or_else(|| {
                    Error::parse(path, idx + 1, format!("expected `{expect}<TAB>value`"))
                })?;
                if key != expect {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        format!("expected key {expect:?}, found {key:?}"),
                    ));
                }
                Ok(value.to_string())
            }
            None => Err(Error::parse(path, 0, format!("missing {expect:?} line"))),
        }
    };

    let version = next_kv(FEATURE_FORMAT)?;
    if version != FEATURE_FORMAT_VERSION {
        return Err(Error::validation(format!(
            "{}: unsupported feature-set format version {version:?}",
            path.display()
        )));
    }
    let view: View = next_kv("view")?.parse()?;
    let parse_count = |v: String, key: &str| -> Result<u64> {
        v.parse().map_err(|_| {
            Error::validation(format!("{}: {key} is not a count: {v:?}", path.display()))
        })
    };
    let parse_real = |v: String, key: &str| -> Result<f64> {
        v.parse().map_err(|_| {
            Error::validation(format!("{}: {key} is not a number: {v:?}", path.display()))
        })
    };
    let config = FeatureExtractionConfig {
        unigram_min_freq: parse_count(next_kv("unigram_min_freq")?, "unigram_min_freq")?,
        bigram_min_freq: parse_count(next_kv("bigram_min_freq")?, "bigram_min_freq")?,
        bigram_g2_threshold: parse_real(next_kv("bigram_g2_threshold")?, "bigram_g2_threshold")?,
        cooc_min_freq: parse_count(next_kv("cooc_min_freq")?, "cooc_min_freq")?,
        cooc_g2_threshold: parse_real(next_kv("cooc_g2_threshold")?, "cooc_g2_threshold")?,
        cooc_window: parse_count(next_kv("cooc_window")?, "cooc_window")? as usize,
    };
    config.validate()?;
    let expected: usize = next_kv("features")?.parse().map_err(|_| {
        Error::validation(format!("{}: feature count is not a number", path.display()))
    })?;

    let mut features = Vec::with_capacity(expected);
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 4 tab-separated fields, found {}", fields.len()),
            ));
        }
        let words: Vec<&str> = fields[1].split(' ').collect();
        let score: f64 = fields[3].parse().map_err(|_| {
            Error::parse(path, idx + 1, format!("bad feature score {:?}", fields[3]))
        })?;
        let feature = match (fields[0], words.as_slice(), fields[2]) {
            ("unigram", [w], "-") => Feature::unigram(*w),
            ("bigram", [a, b], "-") => Feature::bigram(*a, *b),
            ("cooccurrence", [a, b], "first") => Feature::cooccurrence(*a, *b, TargetSide::First),
            ("cooccurrence", [a, b], "second") => Feature::cooccurrence(*a, *b, TargetSide::Second),
            _ => {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("malformed feature line {line:?}"),
                ))
            }
        };
        features.push(ScoredFeature { feature, score });
    }
    if features.len() != expected {
        return Err(Error::validation(format!(
            "{}: declared {expected} features, found {}",
            path.display(),
            features.len()
        )));
    }
    Ok(FeatureSet { view, config, features })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Instance;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(target_word: &str, tokens: &[&str], target_index: usize) -> Instance {
        Instance::new(
            format!("t.{}", tokens.join("_")),
            target_word,
            tokens.iter().map(|t| t.to_string()).collect(),
            target_index,
            Some("s1".to_string()),
        )
        .unwrap()
    }

    fn water_sentence() -> Instance {
        inst("water", &["i", "water", "the", "flowering", "flowers"], 1)
    }

    fn channel_sentence() -> Instance {
        inst("channel", &["go", "to", "the", "channel", "quickly"], 3)
    }

    fn art_sentence() -> Instance {
        inst(
            "art",
            &["he", "and", "i", "like", "art", "of", "a", "certain", "period"],
            4,
        )
    }

    #[test]
    fn unigram_candidates_drop_stoplisted_words() {
        let stop = Stoplist::from_words(["i", "the"]);
        let cands = extract_unigram_candidates(&water_sentence(), &stop);
        let words: Vec<&str> = cands.iter().map(|f| f.words[0].as_str()).collect();
        assert_eq!(words, ["water", "flowering", "flowers"]);
    }

    #[test]
    fn unigram_candidates_keep_inflections_distinct() {
        let stop = Stoplist::from_words(["i", "the"]);
        let cands = extract_unigram_candidates(&water_sentence(), &stop);
        assert!(cands.contains(&Feature::unigram("flowering")));
        assert!(cands.contains(&Feature::unigram("flowers")));
    }

    #[test]
    fn unigram_candidates_empty_when_all_stoplisted() {
        let stop = Stoplist::from_words(["a", "b"]);
        let i = inst("a", &["a", "b", "a"], 0);
        assert!(extract_unigram_candidates(&i, &stop).is_empty());
    }

    #[test]
    fn bigram_candidates_drop_double_stoplisted_pairs() {
        let stop = Stoplist::from_words(["to", "the"]);
        let cands = extract_bigram_candidates(&channel_sentence(), &stop);
        let texts: Vec<String> = cands.iter().map(Feature::text).collect();
        assert_eq!(texts, ["go to", "the channel", "channel quickly"]);
        assert!(!cands.contains(&Feature::bigram("to", "the")));
    }

    #[test]
    fn bigram_candidates_all_pairs_without_stoplist() {
        let cands = extract_bigram_candidates(&channel_sentence(), &Stoplist::empty());
        assert_eq!(cands.len(), 4);
    }

    #[test]
    fn bigram_candidates_empty_on_single_token() {
        let i = inst("x", &["x"], 0);
        assert!(extract_bigram_candidates(&i, &Stoplist::empty()).is_empty());
    }

    #[test]
    fn cooc_candidates_window_two() {
        let cands = extract_cooc_candidates(&art_sentence(), 2);
        let texts: Vec<String> = cands.iter().map(Feature::text).collect();
        assert_eq!(texts, ["i art", "like art", "art of", "art a"]);
        for f in &cands {
            assert!(f.target_side.is_some());
        }
    }

    #[test]
    fn cooc_candidates_window_one() {
        let cands = extract_cooc_candidates(&art_sentence(), 1);
        let texts: Vec<String> = cands.iter().map(Feature::text).collect();
        assert_eq!(texts, ["like art", "art of"]);
    }

    #[test]
    fn cooc_candidates_truncate_at_boundaries() {
        let i = inst("art", &["art", "of", "a"], 0);
        let cands = extract_cooc_candidates(&i, 2);
        let texts: Vec<String> = cands.iter().map(Feature::text).collect();
        assert_eq!(texts, ["art of", "art a"]);
    }

    #[test]
    fn cooc_candidates_skip_target_copies() {
        let i = inst("art", &["x", "art", "art", "y"], 1);
        let cands = extract_cooc_candidates(&i, 1);
        let texts: Vec<String> = cands.iter().map(Feature::text).collect();
        assert_eq!(texts, ["x art"]);
    }

    #[test]
    fn g2_zero_on_independent_table() {
        assert_eq!(g2_statistic(10, 10, 10, 10).unwrap(), 0.0);
    }

    #[test]
    fn g2_diagonal_table_closed_form() {
        let g2 = g2_statistic(10, 0, 0, 10).unwrap();
        assert_relative_eq!(g2, 40.0 * 2.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn g2_proportional_rows_exactly_zero() {
        // Rows (a, b) and (k·a, k·b) have integer-exact expected counts,
        // so every O/E ratio is exactly 1.0.
        assert_eq!(g2_statistic(3, 7, 6, 14).unwrap(), 0.0);
        assert_eq!(g2_statistic(5, 5, 20, 20).unwrap(), 0.0);
    }

    #[test]
    fn g2_all_zero_table_is_domain_error() {
        assert!(matches!(g2_statistic(0, 0, 0, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn g2_transpose_and_swap_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t: [u64; 4] = [
                rng.gen_range(0..50),
                rng.gen_range(0..50),
                rng.gen_range(0..50),
                rng.gen_range(0..50),
            ];
            if t.iter().sum::<u64>() == 0 {
                continue;
            }
            let g = g2_statistic(t[0], t[1], t[2], t[3]).unwrap();
            assert!(g >= 0.0);
            let transposed = g2_statistic(t[0], t[2], t[1], t[3]).unwrap();
            let rows_swapped = g2_statistic(t[2], t[3], t[0], t[1]).unwrap();
            assert_relative_eq!(g, transposed, epsilon = 1e-9);
            assert_relative_eq!(g, rows_swapped, epsilon = 1e-9);
        }
    }

    #[test]
    fn unigram_selection_honors_frequency_floor() {
        let stop = Stoplist::from_words(["i", "the"]);
        let five: Vec<Instance> = (0..5)
            .map(|k| {
                let mut i = water_sentence();
                i.instance_id = format!("w.{k}");
                i
            })
            .collect();
        let fs = build_feature_set(&five, View::Unigram, &stop, &Default::default()).unwrap();
        let texts: Vec<String> = fs.features.iter().map(|sf| sf.feature.text()).collect();
        assert_eq!(texts, ["flowering", "flowers", "water"]);
        assert!(fs.features.iter().all(|sf| sf.score == 5.0));

        let fs4 =
            build_feature_set(&five[..4], View::Unigram, &stop, &Default::default()).unwrap();
        assert!(fs4.is_empty());
    }

    #[test]
    fn bigram_selection_on_doubled_channel_corpus() {
        // Two copies of the channel sentence: each adjacent pair occurs
        // twice over 8 slots, giving the table (2,0,0,6) and G² ≈ 8.9974,
        // above the 6.635 gate.
        let stop = Stoplist::from_words(["to", "the"]);
        let train = vec![
            {
                let mut i = channel_sentence();
                i.instance_id = "c.1".into();
                i
            },
            {
                let mut i = channel_sentence();
                i.instance_id = "c.2".into();
                i
            },
        ];
        let fs = build_feature_set(&train, View::Bigram, &stop, &Default::default()).unwrap();
        let texts: Vec<String> = fs.features.iter().map(|sf| sf.feature.text()).collect();
        assert_eq!(texts, ["channel quickly", "go to", "the channel"]);
        for sf in &fs.features {
            assert_relative_eq!(sf.score, 8.99736, epsilon = 1e-4);
        }
    }

    #[test]
    fn cooc_selection_on_doubled_art_corpus() {
        // Two copies of the art sentence: 8 window slots, each candidate
        // pair counted twice, table (2,0,2,4), G² ≈ 3.4522 ≥ 2.706.
        let train = vec![
            {
                let mut i = art_sentence();
                i.instance_id = "a.1".into();
                i
            },
            {
                let mut i = art_sentence();
                i.instance_id = "a.2".into();
                i
            },
        ];
        let fs =
            build_feature_set(&train, View::Cooccurrence, &Stoplist::empty(), &Default::default())
                .unwrap();
        let texts: Vec<String> = fs.features.iter().map(|sf| sf.feature.text()).collect();
        assert_eq!(texts, ["art a", "art of", "i art", "like art"]);
        for sf in &fs.features {
            assert_relative_eq!(sf.score, 3.45218, epsilon = 1e-4);
        }
        assert_eq!(
            fs.features[0].feature.target_side,
            Some(TargetSide::First)
        );
        assert_eq!(
            fs.features[2].feature.target_side,
            Some(TargetSide::Second)
        );
    }

    #[test]
    fn mixed_view_unions_bigram_and_cooc() {
        let train = vec![
            {
                let mut i = art_sentence();
                i.instance_id = "a.1".into();
                i
            },
            {
                let mut i = art_sentence();
                i.instance_id = "a.2".into();
                i
            },
        ];
        let stop = Stoplist::empty();
        let b = build_feature_set(&train, View::Bigram, &stop, &Default::default()).unwrap();
        let c = build_feature_set(&train, View::Cooccurrence, &stop, &Default::default()).unwrap();
        let mixed = build_feature_set(&train, View::Mixed, &stop, &Default::default()).unwrap();
        assert_eq!(mixed.len(), b.len() + c.len());
        for sf in b.features.iter().chain(c.features.iter()) {
            assert!(mixed.features.iter().any(|m| m.feature == sf.feature));
        }
        // "like art" passes both gates and appears once per kind.
        assert!(mixed
            .features
            .iter()
            .any(|m| m.feature.kind == FeatureKind::Bigram && m.feature.text() == "like art"));
        assert!(mixed.features.iter().any(
            |m| m.feature.kind == FeatureKind::Cooccurrence && m.feature.text() == "like art"
        ));
    }

    #[test]
    fn raising_bigram_threshold_never_adds_features() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vocab = ["red", "blue", "green", "run", "walk", "stop", "go", "the"];
        let train: Vec<Instance> = (0..40)
            .map(|k| {
                let tokens: Vec<&str> =
                    (0..8).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
                inst_with_id(&format!("r.{k}"), "red", &tokens, 0)
            })
            .collect();
        let stop = Stoplist::from_words(["the"]);
        let mut previous: Option<Vec<Feature>> = None;
        for threshold in [0.0, 2.706, 6.635, 20.0] {
            let config = FeatureExtractionConfig {
                bigram_g2_threshold: threshold,
                ..Default::default()
            };
            let fs = build_feature_set(&train, View::Bigram, &stop, &config).unwrap();
            let feats: Vec<Feature> =
                fs.features.iter().map(|sf| sf.feature.clone()).collect();
            if let Some(prev) = &previous {
                assert!(feats.iter().all(|f| prev.contains(f)));
            }
            previous = Some(feats);
        }
    }

    fn inst_with_id(id: &str, target: &str, tokens: &[&str], target_index: usize) -> Instance {
        Instance::new(
            id,
            target,
            tokens.iter().map(|t| t.to_string()).collect(),
            target_index,
            Some("s1".to_string()),
        )
        .unwrap()
    }

    #[test]
    fn distance_one_coocs_passing_bigram_gates_appear_in_bigram_view() {
        // Cross-check the two counting paths: any selected co-occurrence
        // whose word pair also clears the adjacent-pair gates must show up
        // in the B view.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let vocab = ["oil", "well", "sea", "rig", "dig"];
        // Half the corpus has "deep" immediately before the target, so the
        // pair ("deep", "bank") is both a strong adjacent bigram and a
        // distance-1 co-occurrence; the rest is uniform noise.
        let train: Vec<Instance> = (0..60)
            .map(|k| {
                let mut tokens: Vec<&str> =
                    (0..6).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
                let idx = if k % 2 == 0 {
                    tokens[1] = "deep";
                    tokens[2] = "bank";
                    2
                } else {
                    tokens[0] = "bank";
                    0
                };
                inst_with_id(&format!("b.{k}"), "bank", &tokens, idx)
            })
            .collect();
        let stop = Stoplist::empty();
        let config = FeatureExtractionConfig::default();
        let b = build_feature_set(&train, View::Bigram, &stop, &config).unwrap();
        let c = build_feature_set(&train, View::Cooccurrence, &stop, &config).unwrap();

        // Independent adjacent-pair statistics computed directly here.
        let mut pair_counts: HashMap<(String, String), u64> = HashMap::new();
        let mut firsts: HashMap<String, u64> = HashMap::new();
        let mut seconds: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for i in &train {
            for w in i.tokens.windows(2) {
                *pair_counts.entry((w[0].clone(), w[1].clone())).or_default() += 1;
                *firsts.entry(w[0].clone()).or_default() += 1;
                *seconds.entry(w[1].clone()).or_default() += 1;
                total += 1;
            }
        }
        let mut checked = 0;
        for sf in &c.features {
            let key = (sf.feature.words[0].clone(), sf.feature.words[1].clone());
            let Some(&freq) = pair_counts.get(&key) else { continue };
            if freq < config.bigram_min_freq {
                continue;
            }
            let n11 = freq;
            let n12 = firsts[&key.0] - n11;
            let n21 = seconds[&key.1] - n11;
            let n22 = total - n11 - n12 - n21;
            if g2_statistic(n11, n12, n21, n22).unwrap() >= config.bigram_g2_threshold {
                checked += 1;
                assert!(
                    b.features
                        .iter()
                        .any(|bf| bf.feature.words == sf.feature.words),
                    "co-occurrence {:?} clears the bigram gates but is missing from B",
                    sf.feature.text()
                );
            }
        }
        assert!(checked > 0, "fixture never exercised the overlap");
    }

    #[test]
    fn vectorize_marks_present_features() {
        let fs = FeatureSet {
            view: View::Cooccurrence,
            config: Default::default(),
            features: vec![ScoredFeature {
                feature: Feature::cooccurrence("art", "of", TargetSide::First),
                score: 3.45,
            }],
        };
        let v = vectorize(&art_sentence(), &fs);
        assert_eq!(v.bits, [true]);
    }

    #[test]
    fn vectorize_respects_cooc_side() {
        // "of art" with the target second never matches "art of" slots.
        let fs = FeatureSet {
            view: View::Cooccurrence,
            config: Default::default(),
            features: vec![ScoredFeature {
                feature: Feature::cooccurrence("of", "art", TargetSide::Second),
                score: 1.0,
            }],
        };
        let v = vectorize(&art_sentence(), &fs);
        assert_eq!(v.bits, [false]);
    }

    #[test]
    fn vectorize_empty_and_disjoint() {
        let empty = FeatureSet {
            view: View::Unigram,
            config: Default::default(),
            features: vec![],
        };
        assert!(vectorize(&art_sentence(), &empty).is_empty());

        let fs = FeatureSet {
            view: View::Unigram,
            config: Default::default(),
            features: vec![
                ScoredFeature { feature: Feature::unigram("xylophone"), score: 9.0 },
                ScoredFeature { feature: Feature::bigram("deep", "sea"), score: 8.0 },
            ],
        };
        let v = vectorize(&art_sentence(), &fs);
        assert_eq!(v.bits, [false, false]);
    }

    #[test]
    fn feature_set_roundtrip_is_exact() {
        let train = vec![
            {
                let mut i = art_sentence();
                i.instance_id = "a.1".into();
                i
            },
            {
                let mut i = art_sentence();
                i.instance_id = "a.2".into();
                i
            },
        ];
        let fs =
            build_feature_set(&train, View::Mixed, &Stoplist::empty(), &Default::default())
                .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.tsv");
        save_feature_set(&path, &fs).unwrap();
        let reloaded = load_feature_set(&path).unwrap();
        assert_eq!(fs, reloaded);
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let config = FeatureExtractionConfig { unigram_min_freq: 0, ..Default::default() };
        assert!(config.validate().is_err());
        let config = FeatureExtractionConfig { cooc_window: 0, ..Default::default() };
        assert!(config.validate().is_err());
        let config = FeatureExtractionConfig { bigram_g2_threshold: -1.0, ..Default::default() };
        assert!(config.validate().is_err());
    }

    #[test]
    fn view_parsing_and_labels() {
        assert_eq!("U".parse::<View>().unwrap(), View::Unigram);
        assert_eq!("b".parse::<View>().unwrap(), View::Bigram);
        assert_eq!("cooc".parse::<View>().unwrap(), View::Cooccurrence);
        assert_eq!("MIXED".parse::<View>().unwrap(), View::Mixed);
        assert!("q".parse::<View>().is_err());
        assert_eq!(View::Mixed.label(), "mixed");
    }
}
