//! Scoring and inter-system agreement analysis.
//!
//! Scoring is fine-grained: an instance counts as correct only when the
//! predicted sense string equals the gold sense exactly. Accuracy is
//! correct / total over the *gold* set — instances a system leaves
//! unanswered count as wrong (and are flagged), answers for unknown
//! instance ids are ignored (and flagged).
//!
//! Agreement analysis buckets test instances by how many of k systems
//! got each one right. For two systems the buckets are the familiar
//! both / one / zero split; the k-way table also yields the oracle upper
//! bound on any combination of the systems: `1 − none_correct/n`, the
//! accuracy a perfect selector among the systems would reach.
//!
//! Reports render percentages half-up at one decimal; the k-way summary
//! lines (all-correct, none-correct, optimal bound) use two decimals.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One system's answers, keyed by instance id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionSet {
    pub system_name: String,
    pub answers: BTreeMap<String, String>,
}

impl PredictionSet {
    pub fn new(system_name: impl Into<String>, answers: BTreeMap<String, String>) -> Self {
        PredictionSet { system_name: system_name.into(), answers }
    }
}

/// Exact-match accuracy of one system against a gold standard.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub system_name: String,
    pub total: usize,
    pub correct: usize,
    /// correct / total.
    pub accuracy: f64,
    /// Gold instances the system answered not at all (scored wrong).
    pub unanswered: usize,
    /// Answers for instance ids absent from the gold standard (ignored).
    pub extraneous: usize,
}

/// Instances bucketed by how many of the systems answered correctly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementTable {
    pub systems: Vec<String>,
    pub n: usize,
    /// `correct_counts[j]` = instances exactly `j` systems got right;
    /// length is number-of-systems + 1 and the entries sum to `n`.
    pub correct_counts: Vec<usize>,
}

impl AgreementTable {
    pub fn k(&self) -> usize {
        self.correct_counts.len() - 1
    }

    /// Instances every system got right (the "both" bucket for k = 2).
    pub fn all_correct(&self) -> usize {
        *self.correct_counts.last().unwrap()
    }

    /// Instances no system got right (the "zero" bucket for k = 2).
    pub fn none_correct(&self) -> usize {
        self.correct_counts[0]
    }

    /// Instances exactly one system got right; only meaningful for k = 2
    /// but defined for any k.
    pub fn one_correct(&self) -> usize {
        self.correct_counts[1]
    }

    pub fn percent_of(&self, count: usize) -> f64 {
        percent(count, self.n)
    }
}

/// `100 · count / total`.
pub fn percent(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

/// Rounds half-up to one decimal place.
pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Rounds half-up to two decimal places.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn fmt_pct1(x: f64) -> String {
    format!("{:.1}", round1(x))
}

fn fmt_pct2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

/// Scores one system. The gold standard must be non-empty.
pub fn score(pred: &PredictionSet, gold: &BTreeMap<String, String>) -> Result<ScoreReport> {
    if gold.is_empty() {
        return Err(Error::domain(
            "accuracy is undefined against an empty gold standard".to_string(),
        ));
    }
    let mut correct = 0;
    let mut unanswered = 0;
    for (id, sense) in gold {
        match pred.answers.get(id) {
            Some(answer) if answer == sense => correct += 1,
            Some(_) => {}
            None => unanswered += 1,
        }
    }
    let extraneous = pred
        .answers
        .keys()
        .filter(|id| !gold.contains_key(*id))
        .count();
    let total = gold.len();
    Ok(ScoreReport {
        system_name: pred.system_name.clone(),
        total,
        correct,
        accuracy: correct as f64 / total as f64,
        unanswered,
        extraneous,
    })
}

/// Buckets gold instances by how many of the given systems answered each
/// correctly. Requires at least two systems and a non-empty gold set.
pub fn kway_agreement(
    preds: &[PredictionSet],
    gold: &BTreeMap<String, String>,
) -> Result<AgreementTable> {
    if preds.len() < 2 {
        return Err(Error::validation(format!(
            "agreement analysis needs at least 2 systems, got {}",
            preds.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::domain(
            "agreement is undefined against an empty gold standard".to_string(),
        ));
    }
    let mut correct_counts = vec![0usize; preds.len() + 1];
    for (id, sense) in gold {
        let right = preds
            .iter()
            .filter(|p| p.answers.get(id) == Some(sense))
            .count();
        correct_counts[right] += 1;
    }
    Ok(AgreementTable {
        systems: preds.iter().map(|p| p.system_name.clone()).collect(),
        n: gold.len(),
        correct_counts,
    })
}

/// The both / one / zero breakdown for two systems.
pub fn pairwise_agreement(
    a: &PredictionSet,
    b: &PredictionSet,
    gold: &BTreeMap<String, String>,
) -> Result<AgreementTable> {
    kway_agreement(&[a.clone(), b.clone()], gold)
}

/// Oracle upper bound on any combination of the systems: the fraction of
/// instances at least one system gets right, `1 − none_correct/n`.
pub fn optimal_combination_bound(
    preds: &[PredictionSet],
    gold: &BTreeMap<String, String>,
) -> Result<f64> {
    let table = kway_agreement(preds, gold)?;
    Ok(1.0 - table.none_correct() as f64 / table.n as f64)
}

// ---------------------------------------------------------------------------
// Prediction-file IO
// ---------------------------------------------------------------------------

/// Reads a prediction (or gold-standard) file: one `instance_id<TAB>sense`
/// record per line. Duplicate ids are rejected.
pub fn load_predictions(path: &Path, system_name: &str) -> Result<PredictionSet> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut answers = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, sense) = line.split_once('\t').ok_or_else(|| {
            Error::parse(path, idx + 1, "expected `instance_id<TAB>sense`".to_string())
        })?;
        if answers.insert(id.to_string(), sense.to_string()).is_some() {
            return Err(Error::validation(format!(
                "{}: duplicate answer for instance {id:?} at line {}",
                path.display(),
                idx + 1
            )));
        }
    }
    Ok(PredictionSet::new(system_name, answers))
}

/// Reads a gold standard (same line format as predictions).
pub fn load_gold(path: &Path) -> Result<BTreeMap<String, String>> {
    Ok(load_predictions(path, "gold")?.answers)
}

/// Writes answers sorted by instance id, one `id<TAB>sense` per line.
pub fn write_predictions(path: &Path, answers: &BTreeMap<String, String>) -> Result<()> {
    let mut out = String::new();
    for (id, sense) in answers {
        out.push_str(&format!("{id}\t{sense}\n"));
    }
    write_report(path, &out)
}

/// Writes a rendered report string to a file.
pub fn write_report(path: &Path, contents: &str) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

/// Accuracy table as TSV: `system, accuracy (percent), correct, total`.
pub fn render_scores_tsv(scores: &[ScoreReport]) -> String {
    let mut out = String::from("system\taccuracy\tcorrect\ttotal\n");
    for s in scores {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            s.system_name,
            fmt_pct1(100.0 * s.accuracy),
            s.correct,
            s.total
        ));
    }
    out
}

/// Accuracy table as aligned text, one row per system.
pub fn render_scores_text(scores: &[ScoreReport]) -> String {
    let name_width = scores
        .iter()
        .map(|s| s.system_name.len())
        .chain(["system".len()])
        .max()
        .unwrap();
    let mut out = format!("{:<name_width$}  {:>8}  {:>8}\n", "system", "accuracy", "correct");
    for s in scores {
        out.push_str(&format!(
            "{:<name_width$}  {:>7}%  {:>8}\n",
            s.system_name,
            fmt_pct1(100.0 * s.accuracy),
            s.correct
        ));
    }
    out
}

/// Pairwise agreement rows as TSV: percent/count pairs for the both, one
/// and zero buckets.
pub fn render_pairwise_tsv(tables: &[AgreementTable]) -> String {
    let mut out = String::from(
        "system_a\tsystem_b\tboth_pct\tboth\tone_pct\tone\tzero_pct\tzero\tn\n",
    );
    for t in tables {
        debug_assert_eq!(t.k(), 2);
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            t.systems[0],
            t.systems[1],
            fmt_pct1(t.percent_of(t.all_correct())),
            t.all_correct(),
            fmt_pct1(t.percent_of(t.one_correct())),
            t.one_correct(),
            fmt_pct1(t.percent_of(t.none_correct())),
            t.none_correct(),
            t.n
        ));
    }
    out
}

/// Pairwise agreement rows as aligned text.
pub fn render_pairwise_text(tables: &[AgreementTable]) -> String {
    let label = |t: &AgreementTable| format!("{} / {}", t.systems[0], t.systems[1]);
    let name_width = tables
        .iter()
        .map(|t| label(t).len())
        .chain(["systems".len()])
        .max()
        .unwrap();
    let mut out = format!(
        "{:<name_width$}  {:>16}  {:>16}  {:>16}\n",
        "systems", "both", "one", "zero"
    );
    for t in tables {
        let cell = |count: usize| format!("{}% ({})", fmt_pct1(t.percent_of(count)), count);
        out.push_str(&format!(
            "{:<name_width$}  {:>16}  {:>16}  {:>16}\n",
            label(t),
            cell(t.all_correct()),
            cell(t.one_correct()),
            cell(t.none_correct()),
        ));
    }
    out
}

/// K-way agreement as TSV: one `exactly` row per bucket plus summary
/// rows (two-decimal percentages) and the optimal combination bound.
pub fn render_kway_tsv(table: &AgreementTable) -> String {
    let mut out = String::new();
    out.push_str(&format!("systems\t{}\n", table.systems.join(",")));
    out.push_str(&format!("n\t{}\n", table.n));
    for (j, &count) in table.correct_counts.iter().enumerate() {
        out.push_str(&format!(
            "exactly\t{j}\t{count}\t{}\n",
            fmt_pct1(table.percent_of(count))
        ));
    }
    out.push_str(&format!(
        "all_correct\t{}\t{}\n",
        table.all_correct(),
        fmt_pct2(table.percent_of(table.all_correct()))
    ));
    out.push_str(&format!(
        "none_correct\t{}\t{}\n",
        table.none_correct(),
        fmt_pct2(table.percent_of(table.none_correct()))
    ));
    let bound = 100.0 - table.percent_of(table.none_correct());
    out.push_str(&format!("optimal_bound\t{}\n", fmt_pct2(bound)));
    out
}

/// K-way agreement as readable text.
pub fn render_kway_text(table: &AgreementTable) -> String {
    let mut out = format!(
        "agreement among {} systems: {} (n = {})\n",
        table.k(),
        table.systems.join(", "),
        table.n
    );
    for (j, &count) in table.correct_counts.iter().enumerate() {
        out.push_str(&format!(
            "  exactly {j} correct: {:>6} ({}%)\n",
            count,
            fmt_pct1(table.percent_of(count))
        ));
    }
    out.push_str(&format!(
        "all systems correct: {} ({}%)\n",
        table.all_correct(),
        fmt_pct2(table.percent_of(table.all_correct()))
    ));
    out.push_str(&format!(
        "no system correct:   {} ({}%)\n",
        table.none_correct(),
        fmt_pct2(table.percent_of(table.none_correct()))
    ));
    let bound = 100.0 - table.percent_of(table.none_correct());
    out.push_str(&format!("optimal combination bound: {}%\n", fmt_pct2(bound)));
    out
}
