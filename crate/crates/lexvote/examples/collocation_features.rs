//! From raw candidates to a scored, filtered feature set.
//!
//! Run with `cargo run --example collocation_features`. Builds a little
//! corpus where one word pair really is associated and the rest is
//! noise, then shows how the G² log-likelihood statistic separates
//! them, how the frequency floor and G² threshold act as gates, and
//! what the resulting binary vectors look like.

use lexvote::corpus::{Instance, Stoplist};
use lexvote::features::{
    FeatureExtractionConfig, View, build_feature_set, g2_statistic, vectorize,
};

fn main() {
    // The 2x2 contingency table behind every score: how often the pair
    // occurred (n11), how often each word occurred without the other
    // (n12, n21), and how much corpus is left (n22). Balanced cells mean
    // independence; concentration on the diagonal means association.
    println!("g2(10,10,10,10) = {:.4}   (observed = expected, no association)",
        g2_statistic(10, 10, 10, 10).unwrap());
    println!("g2(10, 0, 0,10) = {:.4}   (perfect association, = 40 ln 2)",
        g2_statistic(10, 0, 0, 10).unwrap());
    println!("g2( 2, 0, 0, 6) = {:.4}   (clears the 6.635 bigram gate)",
        g2_statistic(2, 0, 0, 6).unwrap());
    println!("g2( 2, 2, 2, 2) = {:.4}   (proportional rows, exactly zero)",
        g2_statistic(2, 2, 2, 2).unwrap());

    // A corpus of eight contexts for the target "plant". "assembly
    // plant" shows up in half of them; everything else varies.
    let contexts: &[&[&str]] = &[
        &["the", "assembly", "plant", "hired", "new", "workers"],
        &["an", "assembly", "plant", "opened", "near", "town"],
        &["that", "assembly", "plant", "makes", "engine", "parts"],
        &["our", "assembly", "plant", "runs", "two", "shifts"],
        &["the", "green", "plant", "needs", "more", "light"],
        &["a", "leafy", "plant", "grew", "by", "the", "window"],
        &["this", "potted", "plant", "wilts", "in", "winter"],
        &["every", "garden", "plant", "was", "watered", "today"],
    ];
    let train: Vec<Instance> = contexts
        .iter()
        .enumerate()
        .map(|(i, tokens)| {
            let target = tokens.iter().position(|t| *t == "plant").unwrap();
            Instance::new(
                format!("p{i}"),
                "plant",
                tokens.iter().map(|t| t.to_string()).collect(),
                target,
                Some(if i < 4 { "s.factory" } else { "s.flora" }.to_string()),
            )
            .unwrap()
        })
        .collect();

    // Lower the frequency floors to fit the toy corpus; keep the G²
    // gates at their defaults so they do the filtering.
    let config = FeatureExtractionConfig {
        bigram_min_freq: 2,
        cooc_min_freq: 2,
        ..Default::default()
    };
    let stoplist = Stoplist::from_words(["the", "a", "an", "that", "our", "this"]);

    for view in [View::Bigram, View::Cooccurrence] {
        let fs = build_feature_set(&train, view, &stoplist, &config).unwrap();
        println!("\n{view} view ({} features pass freq + G² gates):", fs.features.len());
        for scored in &fs.features {
            println!("  {:<18} G² = {:.3}", scored.feature.text(), scored.score);
        }
    }

    // Tighten the co-occurrence gate and watch features drop out —
    // raising a threshold can only ever shrink the set.
    let strict = FeatureExtractionConfig { cooc_g2_threshold: 7.0, ..config.clone() };
    let fs = build_feature_set(&train, View::Cooccurrence, &stoplist, &strict).unwrap();
    println!("\nsame corpus, cooc gate raised 2.706 -> 7.0: {} features left", fs.features.len());

    // Vectorization: one bit per feature, set when the feature occurs in
    // the instance (same side of the target, for co-occurrences).
    let fs = build_feature_set(&train, View::Cooccurrence, &stoplist, &config).unwrap();
    println!("\nbinary vectors over the {} co-occurrence features:", fs.features.len());
    for inst in train.iter().take(3).chain(train.iter().rev().take(1)) {
        let bits: String = vectorize(inst, &fs)
            .bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        println!("  {bits}  {} ({})", inst.instance_id, inst.gold_sense.as_deref().unwrap());
    }
}
