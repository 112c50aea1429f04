//! Deterministic synthetic data: lexical samples with a planted signal,
//! and prediction sets hitting exact agreement-bucket counts.
//!
//! The generated disambiguation problem has a known structure so that
//! expected outcomes are easy to reason about: each sense owns a marker
//! word planted immediately next to the target (one position away, on a
//! random side), sense priors are skewed so the majority baseline is
//! meaningful, and the rest of the context is a mix of sense-correlated
//! topic words and shared noise. A co-occurrence classifier should
//! recover the markers almost perfectly; unigram and bigram views see
//! only the softer topical signal.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Instance, LexicalSample};
use crate::eval::PredictionSet;

/// Shape of a generated lexical sample.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub senses: usize,
    pub train_per_word: usize,
    pub test_per_word: usize,
    /// Tokens per context, including the target.
    pub context_len: usize,
    /// Probability that an instance carries its own sense's marker; the
    /// remainder get a random other sense's marker instead.
    pub cue_fidelity: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            senses: 3,
            train_per_word: 500,
            test_per_word: 200,
            context_len: 9,
            cue_fidelity: 1.0,
            seed: 0,
        }
    }
}

/// FNV-1a over the word, folded into the seed so every target word gets
/// its own stream while the whole corpus stays a pure function of the
/// config.
fn word_seed(word: &str, seed: u64) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in word.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash ^ seed
}

/// Generates one target word's sample. Senses are named `s0`, `s1`, …
/// with weights (k, k−1, …, 1), so `s0` is always the majority sense.
pub fn generate_sample(target_word: &str, config: &SynthConfig) -> LexicalSample {
    assert!(config.senses >= 2, "need at least two senses");
    assert!(config.context_len >= 3, "need room for a target and a marker");
    let mut rng = ChaCha8Rng::seed_from_u64(word_seed(target_word, config.seed));
    let weights: Vec<usize> = (1..=config.senses).rev().collect();
    let total_weight: usize = weights.iter().sum();

    let draw_sense = |rng: &mut ChaCha8Rng| {
        let mut pick = rng.gen_range(0..total_weight);
        for (sense, &w) in weights.iter().enumerate() {
            if pick < w {
                return sense;
            }
            pick -= w;
        }
        unreachable!("weights cover the draw range")
    };

    let build = |rng: &mut ChaCha8Rng, id: String| {
        let sense = draw_sense(rng);
        let len = config.context_len;
        let target_index = rng.gen_range(0..len);

        let mut tokens: Vec<String> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    format!("topic{sense}_{}", rng.gen_range(0..20))
                } else {
                    format!("noise{}", rng.gen_range(0..50))
                }
            })
            .collect();
        tokens[target_index] = target_word.to_string();

        let marker_sense = if rng.gen_bool(config.cue_fidelity) {
            sense
        } else {
            (sense + 1 + rng.gen_range(0..config.senses - 1)) % config.senses
        };
        let mut sides = Vec::new();
        if target_index > 0 {
            sides.push(target_index - 1);
        }
        if target_index + 1 < len {
            sides.push(target_index + 1);
        }
        let marker_at = sides[rng.gen_range(0..sides.len())];
        tokens[marker_at] = format!("marker{marker_sense}");

        Instance::new(id, target_word, tokens, target_index, Some(format!("s{sense}")))
            .expect("generated instances are well-formed")
    };

    let train: Vec<Instance> = (0..config.train_per_word)
        .map(|i| build(&mut rng, format!("{target_word}.train.{i:04}")))
        .collect();
    let test: Vec<Instance> = (0..config.test_per_word)
        .map(|i| build(&mut rng, format!("{target_word}.test.{i:04}")))
        .collect();
    LexicalSample::new(train, test).expect("generated samples are consistent")
}

/// Builds a gold standard and `k` prediction sets realizing exact
/// agreement buckets: `bucket_counts[j]` instances are answered
/// correctly by exactly `j` of the systems. Which systems are the
/// correct ones rotates deterministically, so no system is always right
/// or always wrong within a bucket.
pub fn bucketed_predictions(
    system_names: &[&str],
    bucket_counts: &[usize],
) -> (BTreeMap<String, String>, Vec<PredictionSet>) {
    let k = system_names.len();
    assert_eq!(
        bucket_counts.len(),
        k + 1,
        "need one bucket per possible number of correct systems"
    );
    let mut gold = BTreeMap::new();
    let mut answer_maps: Vec<BTreeMap<String, String>> = vec![BTreeMap::new(); k];
    let mut id = 0usize;
    for (right, &count) in bucket_counts.iter().enumerate() {
        for occurrence in 0..count {
            let key = format!("i.{id:06}");
            id += 1;
            gold.insert(key.clone(), "g".to_string());
            // Rotate which `right` systems answer correctly.
            let start = occurrence % k;
            for (offset, answers) in answer_maps.iter_mut().enumerate() {
                let slot = (offset + k - start) % k;
                let sense = if slot < right { "g".to_string() } else { format!("w{offset}") };
                answers.insert(key.clone(), sense);
            }
        }
    }
    let preds = system_names
        .iter()
        .zip(answer_maps)
        .map(|(name, answers)| PredictionSet::new(*name, answers))
        .collect();
    (gold, preds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::kway_agreement;
    use std::collections::HashSet;

    #[test]
    fn generation_is_deterministic() {
        let config = SynthConfig { train_per_word: 30, test_per_word: 10, ..Default::default() };
        let a = generate_sample("drift", &config);
        let b = generate_sample("drift", &config);
        assert_eq!(a.train, b.train);
        assert_eq!(a.test, b.test);
        let other = generate_sample("plant", &config);
        assert_ne!(a.train[0].tokens, other.train[0].tokens);
    }

    #[test]
    fn sample_shape_and_ids() {
        let config = SynthConfig { train_per_word: 40, test_per_word: 20, ..Default::default() };
        let sample = generate_sample("drift", &config);
        assert_eq!(sample.train.len(), 40);
        assert_eq!(sample.test.len(), 20);
        let ids: HashSet<&String> = sample
            .train
            .iter()
            .chain(sample.test.iter())
            .map(|i| &i.instance_id)
            .collect();
        assert_eq!(ids.len(), 60);
        assert!(sample.test.iter().all(|i| i.gold_sense.is_some()));
        assert_eq!(sample.sense_inventory.len(), 3);
    }

    #[test]
    fn marker_sits_next_to_target_and_matches_sense() {
        let config = SynthConfig { train_per_word: 50, test_per_word: 0, ..Default::default() };
        let sample = generate_sample("drift", &config);
        for inst in &sample.train {
            let sense = inst.gold_sense.as_ref().unwrap();
            let marker = format!("marker{}", &sense[1..]);
            let t = inst.target_index;
            let adjacent: Vec<&String> = [t.checked_sub(1), Some(t + 1)]
                .iter()
                .flatten()
                .filter_map(|&p| inst.tokens.get(p))
                .collect();
            assert!(
                adjacent.iter().any(|tok| **tok == marker),
                "instance {} lacks its marker next to the target",
                inst.instance_id
            );
        }
    }

    #[test]
    fn skewed_priors_make_s0_the_majority() {
        let config = SynthConfig { train_per_word: 600, test_per_word: 0, ..Default::default() };
        let sample = generate_sample("drift", &config);
        let mut counts = BTreeMap::new();
        for inst in &sample.train {
            *counts.entry(inst.gold_sense.clone().unwrap()).or_insert(0usize) += 1;
        }
        assert!(counts["s0"] > counts["s1"]);
        assert!(counts["s1"] > counts["s2"]);
    }

    #[test]
    fn bucketed_predictions_hit_exact_counts() {
        let (gold, preds) = bucketed_predictions(&["a", "b", "c"], &[2, 5, 3, 7]);
        assert_eq!(gold.len(), 17);
        let table = kway_agreement(&preds, &gold).unwrap();
        assert_eq!(table.correct_counts, [2, 5, 3, 7]);
    }

    #[test]
    fn bucketed_predictions_rotate_the_correct_system() {
        let (gold, preds) = bucketed_predictions(&["a", "b"], &[0, 4, 0]);
        // Four exactly-one instances alternate which system is right.
        let a_right = gold
            .iter()
            .filter(|(id, sense)| preds[0].answers[*id] == **sense)
            .count();
        let b_right = gold
            .iter()
            .filter(|(id, sense)| preds[1].answers[*id] == **sense)
            .count();
        assert_eq!(a_right, 2);
        assert_eq!(b_right, 2);
    }
}
