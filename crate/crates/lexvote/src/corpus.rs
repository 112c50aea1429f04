//! Lexical-sample data model and on-disk formats.
//!
//! A *lexical sample* is a set of occurrences of one ambiguous target word,
//! each given as a pre-tokenized context with the target's position marked
//! and, for training data, a gold sense label.
//!
//! The instance file format is UTF-8, one record per line, tab-separated:
//!
//! ```text
//! instance_id<TAB>target_word<TAB>target_index<TAB>sense_or_-<TAB>space-joined tokens
//! ```
//!
//! `-` marks an absent gold sense. Tokens arrive pre-tokenized; loading
//! lowercases them but performs no stemming or other normalization, so
//! `flowering` and `flowers` stay distinct. A stoplist file holds one word
//! per line with `#` comments.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One occurrence of a target word: its tokenized context, the position of
/// the target token, and an optional gold sense.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub instance_id: String,
    pub target_word: String,
    pub tokens: Vec<String>,
    pub target_index: usize,
    pub gold_sense: Option<String>,
}

impl Instance {
    /// Builds an instance, lowercasing the target word and tokens.
    /// Fails when `tokens` is empty or `target_index` is out of range.
    pub fn new(
        instance_id: impl Into<String>,
        target_word: impl Into<String>,
        tokens: Vec<String>,
        target_index: usize,
        gold_sense: Option<String>,
    ) -> Result<Self> {
        let instance_id = instance_id.into();
        let tokens: Vec<String> = tokens.into_iter().map(|t| t.to_lowercase()).collect();
        if tokens.is_empty() {
            return Err(Error::validation(format!(
                "instance {instance_id}: tokens must be non-empty"
            )));
        }
        if target_index >= tokens.len() {
            return Err(Error::validation(format!(
                "instance {instance_id}: target_index {target_index} out of range for {} tokens",
                tokens.len()
            )));
        }
        Ok(Instance {
            instance_id,
            target_word: target_word.into().to_lowercase(),
            tokens,
            target_index,
            gold_sense,
        })
    }

    /// The token at the target position.
    pub fn target_token(&self) -> &str {
        &self.tokens[self.target_index]
    }
}

/// Training and test instances for one target word, plus the sense
/// inventory observed in training.
#[derive(Debug, Clone, Default)]
pub struct LexicalSample {
    pub target_word: String,
    pub train: Vec<Instance>,
    pub test: Vec<Instance>,
    pub sense_inventory: BTreeSet<String>,
}

impl LexicalSample {
    /// Assembles a sample from explicit train and test instance lists.
    ///
    /// Every training instance must carry a gold sense and all instances
    /// must share one target word. Test instances may carry gold senses
    /// (needed later for scoring) or not.
    pub fn new(train: Vec<Instance>, test: Vec<Instance>) -> Result<Self> {
        let mut sense_inventory = BTreeSet::new();
        let mut target_word = String::new();
        let mut ids = HashSet::new();
        for inst in train.iter().chain(test.iter()) {
            if target_word.is_empty() {
                target_word = inst.target_word.clone();
            } else if inst.target_word != target_word {
                return Err(Error::validation(format!(
                    "instance {}: target word {:?} differs from {:?}",
                    inst.instance_id, inst.target_word, target_word
                )));
            }
            if !ids.insert(inst.instance_id.clone()) {
                return Err(Error::validation(format!(
                    "duplicate instance_id {:?}",
                    inst.instance_id
                )));
            }
        }
        for inst in &train {
            match &inst.gold_sense {
                Some(sense) => {
                    sense_inventory.insert(sense.clone());
                }
                None => {
                    return Err(Error::validation(format!(
                        "training instance {} has no gold sense",
                        inst.instance_id
                    )))
                }
            }
        }
        Ok(LexicalSample {
            target_word,
            train,
            test,
            sense_inventory,
        })
    }

    /// Loads a sample from a training file and an optional test file.
    /// Records in the test file keep their gold senses if present.
    pub fn from_files(train_path: &Path, test_path: Option<&Path>) -> Result<Self> {
        let train = load_instances(train_path)?;
        let test = match test_path {
            Some(p) => load_instances(p)?,
            None => Vec::new(),
        };
        LexicalSample::new(train, test)
    }

    pub fn is_empty(&self) -> bool {
        self.train.is_empty() && self.test.is_empty()
    }
}

/// Case-insensitive set of high-frequency function words excluded from
/// unigram features and from both-stoplisted bigrams.
#[derive(Debug, Clone, Default)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    pub fn empty() -> Self {
        Stoplist::default()
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stoplist {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    /// Membership test; the query is lowercased before lookup.
    pub fn contains(&self, word: &str) -> bool {
        if self.words.is_empty() {
            return false;
        }
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Reads instance records from one file, preserving file order.
pub fn load_instances(path: &Path) -> Result<Vec<Instance>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut instances = Vec::new();
    let mut seen_ids = HashSet::new();
    for (lineno, line) in text.lines().enumerate() {
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let instance_id = fields[0].to_string();
        let target_word = fields[1];
        let target_index: usize = fields[2].parse().map_err(|_| {
            Error::parse(
                path,
                lineno,
                format!("target_index {:?} is not a non-negative integer", fields[2]),
            )
        })?;
        let gold_sense = match fields[3] {
            "-" => None,
            s => Some(s.to_string()),
        };
        let tokens: Vec<String> = fields[4]
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        let instance = Instance::new(instance_id, target_word, tokens, target_index, gold_sense)
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if !seen_ids.insert(instance.instance_id.clone()) {
            return Err(Error::validation(format!(
                "{}: duplicate instance_id {:?} at line {lineno}",
                path.display(),
                instance.instance_id
            )));
        }
        instances.push(instance);
    }
    Ok(instances)
}

/// Writes instance records in the line format, one per instance, in order.
pub fn write_instances(path: &Path, instances: &[Instance]) -> Result<()> {
    let mut out = String::new();
    for inst in instances {
        out.push_str(&format_instance(inst));
        out.push('\n');
    }
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

fn format_instance(inst: &Instance) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}",
        inst.instance_id,
        inst.target_word,
        inst.target_index,
        inst.gold_sense.as_deref().unwrap_or("-"),
        inst.tokens.join(" ")
    )
}

/// Loads a single mixed instance file as a lexical sample: records with a
/// gold sense become training instances, records without one become test
/// instances. Use [`LexicalSample::from_files`] when train and test live
/// in separate files (which also allows gold-labelled test data).
pub fn load_lexical_sample(path: &Path) -> Result<LexicalSample> {
    let instances = load_instances(path)?;
    let (train, test): (Vec<_>, Vec<_>) = instances
        .into_iter()
        .partition(|inst| inst.gold_sense.is_some());
    LexicalSample::new(train, test)
}

/// Loads a stoplist file: one word per line, blank lines and `#` comments
/// ignored, entries lowercased.
pub fn load_stoplist(path: &Path) -> Result<Stoplist> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let words = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase);
    Ok(Stoplist {
        words: words.collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_single_record() {
        let f = write_temp("w.1\twater\t1\ts1\ti water the flowering flowers\n");
        let sample = load_lexical_sample(f.path()).unwrap();
        assert_eq!(sample.target_word, "water");
        assert_eq!(sample.train.len(), 1);
        assert!(sample.test.is_empty());
        let inst = &sample.train[0];
        assert_eq!(inst.tokens, ["i", "water", "the", "flowering", "flowers"]);
        assert_eq!(inst.target_index, 1);
        assert_eq!(inst.gold_sense.as_deref(), Some("s1"));
        assert_eq!(sample.sense_inventory.len(), 1);
    }

    #[test]
    fn lowercases_tokens_and_target() {
        let f = write_temp("w.1\tWater\t1\ts1\tI Water THE flowering flowers\n");
        let sample = load_lexical_sample(f.path()).unwrap();
        assert_eq!(sample.target_word, "water");
        assert_eq!(
            sample.train[0].tokens,
            ["i", "water", "the", "flowering", "flowers"]
        );
    }

    #[test]
    fn empty_file_gives_empty_sample() {
        let f = write_temp("");
        let sample = load_lexical_sample(f.path()).unwrap();
        assert!(sample.is_empty());
        assert!(sample.sense_inventory.is_empty());
    }

    #[test]
    fn target_index_out_of_range_is_parse_error() {
        let f = write_temp("w.1\twater\t7\ts1\ta b c d e\n");
        let err = load_lexical_sample(f.path()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn missing_field_is_parse_error() {
        let f = write_temp("w.1\twater\t1\ts1\n");
        let err = load_instances(f.path()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn duplicate_id_is_validation_error() {
        let f = write_temp("w.1\twater\t0\ts1\twater here\nw.1\twater\t0\ts2\twater there\n");
        let err = load_instances(f.path()).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_instances(Path::new("/nonexistent/sample.tsv")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn train_without_gold_rejected() {
        let inst = Instance::new("a", "w", vec!["w".into()], 0, None).unwrap();
        let err = LexicalSample::new(vec![inst], vec![]).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn mixed_target_words_rejected() {
        let a = Instance::new("a", "w", vec!["w".into()], 0, Some("s".into())).unwrap();
        let b = Instance::new("b", "v", vec!["v".into()], 0, Some("s".into())).unwrap();
        assert!(LexicalSample::new(vec![a, b], vec![]).is_err());
    }

    #[test]
    fn stoplist_loads_and_lowercases() {
        let f = write_temp("i\nthe\nto\n");
        let stop = load_stoplist(f.path()).unwrap();
        assert_eq!(stop.len(), 3);
        assert!(stop.contains("i") && stop.contains("the") && stop.contains("to"));
        assert!(stop.contains("The"));
        assert!(!stop.contains("water"));
    }

    #[test]
    fn stoplist_skips_comments_and_blanks() {
        let f = write_temp("# comment\n\nThe\n");
        let stop = load_stoplist(f.path()).unwrap();
        assert_eq!(stop.len(), 1);
        assert!(stop.contains("the"));
    }

    #[test]
    fn empty_stoplist() {
        let f = write_temp("");
        let stop = load_stoplist(f.path()).unwrap();
        assert!(stop.is_empty());
        assert!(!stop.contains("anything"));
    }

    #[test]
    fn instance_roundtrip_preserves_fields_and_order() {
        let records = vec![
            Instance::new("a.1", "art", vec!["like".into(), "art".into()], 1, Some("s2".into()))
                .unwrap(),
            Instance::new("a.2", "art", vec!["art".into(), "now".into()], 0, None).unwrap(),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sample.tsv");
        write_instances(&path, &records).unwrap();
        let reloaded = load_instances(&path).unwrap();
        assert_eq!(records, reloaded);
    }
}
