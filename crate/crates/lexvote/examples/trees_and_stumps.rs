//! Growing, reading, pruning, and shrinking decision trees.
//!
//! Run with `cargo run --example trees_and_stumps`. Works directly on
//! binary vectors so the tree mechanics are visible without the feature
//! extraction in the way: a gain-ratio split criterion, a printable
//! preorder serialization, pessimistic pruning of splits that don't earn
//! their keep, and the one-split stump used as a baseline.

use lexvote::features::BinaryVector;
use lexvote::tree::{
    DecisionTree, TreeParams, classify_tree, entropy, train_stump, train_tree, tree_to_string,
};
use std::collections::BTreeMap;

fn vectors(rows: &[&str]) -> Vec<BinaryVector> {
    rows.iter()
        .map(|row| BinaryVector { bits: row.chars().map(|c| c == '1').collect() })
        .collect()
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn accuracy(tree: &DecisionTree, vectors: &[BinaryVector], labels: &[String]) -> f64 {
    let hits = vectors
        .iter()
        .zip(labels)
        .filter(|(v, l)| classify_tree(tree, v).unwrap() == l.as_str())
        .count();
    hits as f64 / labels.len() as f64
}

fn main() {
    // Entropy in bits drives everything: how impure is a label set?
    let mut counts = BTreeMap::new();
    counts.insert("s.water".to_string(), 3usize);
    counts.insert("s.cash".to_string(), 1usize);
    println!("entropy of 3:1 split  = {:.4} bits", entropy(&counts).unwrap());
    counts.insert("s.cash".to_string(), 3);
    println!("entropy of 3:3 split  = {:.4} bits", entropy(&counts).unwrap());

    // Three binary features; feature 0 decides the sense, feature 1 is
    // weakly correlated, feature 2 is pure noise.
    let train = vectors(&[
        "110", "101", "110", "100", "111", "100", // feature 0 set -> s.cash
        "010", "001", "010", "000", "011", "001", // feature 0 clear -> s.water
    ]);
    let train_labels = labels(&[
        "s.cash", "s.cash", "s.cash", "s.cash", "s.cash", "s.cash",
        "s.water", "s.water", "s.water", "s.water", "s.water", "s.water",
    ]);

    let tree = train_tree(&train, &train_labels, &TreeParams::default()).unwrap();
    println!(
        "\ntree on clean labels ({} nodes, {:.0}% on its training data):\n{}",
        tree.node_count(),
        100.0 * accuracy(&tree, &train, &train_labels),
        tree_to_string(&tree)
    );

    // Flip one label per sense and retrain. Grown to purity, the tree
    // chases every flipped label with extra splits; pruning is
    // pessimistic — leaf and subtree error estimates are both inflated
    // by a confidence-dependent margin, and a split survives only if it
    // still wins — so the noise-chasing splits collapse back out.
    let noisy_labels = labels(&[
        "s.cash", "s.cash", "s.cash", "s.cash", "s.cash", "s.water",
        "s.water", "s.water", "s.water", "s.water", "s.water", "s.cash",
    ]);
    let overfit_params = TreeParams { prune: false, min_leaf_instances: 1, ..Default::default() };
    let grown = train_tree(&train, &noisy_labels, &overfit_params).unwrap();
    let pruned = train_tree(&train, &noisy_labels, &TreeParams::default()).unwrap();
    println!(
        "with 1-in-6 label noise: grown to purity {} nodes ({:.0}% train), pruned {} nodes ({:.0}% train)",
        grown.node_count(),
        100.0 * accuracy(&grown, &train, &noisy_labels),
        pruned.node_count(),
        100.0 * accuracy(&pruned, &train, &noisy_labels)
    );

    // The stump stops after the single best split — and refuses even
    // that when no split has positive gain.
    let stump = train_stump(&train, &train_labels).unwrap();
    println!("\nstump:\n{}", tree_to_string(&stump));
    let no_signal = train_stump(&vectors(&["10", "01", "10", "01"]), &labels(&["a", "b", "b", "a"]))
        .unwrap();
    println!("stump on uninformative features stays a leaf:\n{}", tree_to_string(&no_signal));
}
