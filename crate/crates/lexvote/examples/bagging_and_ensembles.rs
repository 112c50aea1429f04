//! Bagged trees per feature view, and views voting as an ensemble.
//!
//! Run with `cargo run --example bagging_and_ensembles`. Uses a
//! generated lexical sample whose senses are betrayed by a marker word
//! right next to the target, buried in topical noise. That makes the
//! co-occurrence view the strong one, the unigram and bigram views
//! weaker, and the ensemble combinations interesting to compare.

use lexvote::corpus::Stoplist;
use lexvote::ensemble::{
    BaggingParams, Ensemble, EnsembleSpec, classify_bagged, classify_ensemble, train_bagged,
    train_ensemble,
};
use lexvote::features::{FeatureExtractionConfig, View};
use lexvote::synth::{SynthConfig, generate_sample};
use lexvote::tree::TreeParams;

fn main() {
    // cue_fidelity 0.7: three instances in ten carry a *wrong* sense's
    // marker, so no view gets to be perfect and combining them matters.
    let sample = generate_sample(
        "drift",
        &SynthConfig { seed: 7, cue_fidelity: 0.7, ..Default::default() },
    );
    println!(
        "generated {:?}: {} train / {} test instances, senses {:?}",
        sample.target_word,
        sample.train.len(),
        sample.test.len(),
        sample.sense_inventory
    );

    let stoplist = Stoplist::empty();
    let extraction = FeatureExtractionConfig::default();
    let tree_params = TreeParams::default();
    let bag_params = BaggingParams { num_bags: 10, seed: 7, resample: true };

    let test_accuracy = |classify: &dyn Fn(&lexvote::corpus::Instance) -> String| {
        let hits = sample
            .test
            .iter()
            .filter(|i| classify(i) == *i.gold_sense.as_ref().unwrap())
            .count();
        100.0 * hits as f64 / sample.test.len() as f64
    };

    // One bagged classifier per view. Each trains ten trees, every tree
    // on its own bootstrap resample of the training set, and the trees
    // vote. Note how different the views' feature inventories are.
    println!("\nper-view bagged classifiers (10 bags each):");
    let mut members = Vec::new();
    for view in [View::Unigram, View::Bigram, View::Cooccurrence, View::Mixed] {
        let clf =
            train_bagged(&sample, view, &stoplist, &extraction, &tree_params, &bag_params)
                .unwrap();
        println!(
            "  {:<5} {:>4} features, test accuracy {:>5.1}%",
            view.label(),
            clf.feature_set.features.len(),
            test_accuracy(&|i| classify_bagged(&clf, i))
        );
        members.push(clf);
    }

    // Ensembles: the member views each cast one vote per instance; ties
    // break toward the sense that was more frequent in training, then
    // lexicographically. A combination can beat its best member when the
    // members' errors don't line up.
    println!("\nview ensembles:");
    for spec_text in ["UB", "UC", "BC", "UBC"] {
        let spec: EnsembleSpec = spec_text.parse().unwrap();
        let ensemble =
            train_ensemble(&sample, &spec, &stoplist, &extraction, &tree_params, &bag_params)
                .unwrap();
        println!(
            "  {:<5} test accuracy {:>5.1}%",
            ensemble.spec.label(),
            test_accuracy(&|i| classify_ensemble(&ensemble, i))
        );
    }

    // An ensemble member is the standalone classifier: the bag seed
    // depends only on the master seed and the view, so U inside UBC and
    // U trained alone predict identically.
    let u_alone = &members[0];
    let ubc: Ensemble = train_ensemble(
        &sample,
        &"UBC".parse().unwrap(),
        &stoplist,
        &extraction,
        &tree_params,
        &bag_params,
    )
    .unwrap();
    let agree = sample
        .test
        .iter()
        .all(|i| classify_bagged(u_alone, i) == classify_bagged(&ubc.members[0], i));
    println!("\nU standalone and U inside UBC agree on every test instance: {agree}");

    // Degenerate bagging: one bag, no resampling, is exactly one tree
    // trained on the full training set.
    let single = BaggingParams { num_bags: 1, seed: 7, resample: false };
    let one_tree =
        train_bagged(&sample, View::Cooccurrence, &stoplist, &extraction, &tree_params, &single)
            .unwrap();
    println!(
        "single-bag, no-resample C classifier holds 1 tree: {} ({} nodes)",
        one_tree.trees.len() == 1,
        one_tree.trees[0].node_count()
    );
}
