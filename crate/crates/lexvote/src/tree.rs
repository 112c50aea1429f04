//! Decision trees and one-node stumps over binary feature vectors.
//!
//! Training follows the classic top-down induction recipe: greedy splits
//! on the highest gain-ratio feature, with recursion stopping at pure
//! nodes, at nodes too small to split under `min_leaf_instances`, or when
//! every feature is constant across the node. Grown trees can then be
//! simplified by pessimistic error-based subtree replacement.
//!
//! One deliberate difference from the textbook stopping rule: growth does
//! not stop merely because the best split has zero information gain.
//! Zero-gain splits still separate distinct vectors, which is what lets
//! an unpruned tree with `min_leaf_instances = 1` memorize any training
//! set free of contradictory duplicates (parity-style label patterns have
//! zero single-feature gain everywhere at the root). Stumps keep the
//! positive-gain requirement: with only one split available, a zero-gain
//! split can never change a prediction.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::BinaryVector;

/// Knobs for tree induction and pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    /// Minimum number of training instances each child of a split must
    /// receive.
    pub min_leaf_instances: usize,
    /// Confidence level for the pessimistic error estimate; smaller
    /// values prune harder.
    pub pruning_confidence: f64,
    pub prune: bool,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            min_leaf_instances: 2,
            pruning_confidence: 0.25,
            prune: true,
        }
    }
}

impl TreeParams {
    pub fn validate(&self) -> Result<()> {
        if self.min_leaf_instances < 1 {
            return Err(Error::validation(
                "min_leaf_instances must be at least 1".to_string(),
            ));
        }
        if !(self.pruning_confidence > 0.0 && self.pruning_confidence <= 1.0) {
            return Err(Error::validation(
                "pruning_confidence must lie in (0, 1]".to_string(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Leaf {
        /// Training instances that reached this leaf, by sense.
        distribution: BTreeMap<String, usize>,
        prediction: String,
    },
    Split {
        feature_index: usize,
        on_true: Box<Node>,
        on_false: Box<Node>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    /// Width of the feature space the tree was trained on.
    pub width: usize,
    pub root: Node,
}

impl DecisionTree {
    pub fn node_count(&self) -> usize {
        fn count(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 1,
                Node::Split { on_true, on_false, .. } => 1 + count(on_true) + count(on_false),
            }
        }
        count(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn depth(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 0,
                Node::Split { on_true, on_false, .. } => 1 + depth(on_true).max(depth(on_false)),
            }
        }
        depth(&self.root)
    }
}

/// Shannon entropy of a sense distribution, in bits. Pure distributions
/// have entropy 0; an empty or all-zero distribution is a domain error.
pub fn entropy(distribution: &BTreeMap<String, usize>) -> Result<f64> {
    let total: usize = distribution.values().sum();
    if total == 0 {
        return Err(Error::domain(
            "entropy is undefined on an empty distribution".to_string(),
        ));
    }
    Ok(entropy_counts(distribution.values().copied(), total))
}

fn entropy_counts(counts: impl IntoIterator<Item = usize>, total: usize) -> f64 {
    let total = total as f64;
    let mut h = 0.0;
    for count in counts {
        if count > 0 {
            let p = count as f64 / total;
            h -= p * p.log2();
        }
    }
    h
}

/// Information gain of splitting on one feature, divided by the split
/// information. Degenerate splits (every instance on one side) return 0.
pub fn gain_ratio(vectors: &[BinaryVector], labels: &[String], feature_index: usize) -> f64 {
    let n = vectors.len();
    let mut true_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut false_counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut n_true = 0;
    for (v, label) in vectors.iter().zip(labels) {
        if v.bits[feature_index] {
            *true_counts.entry(label).or_default() += 1;
            n_true += 1;
        } else {
            *false_counts.entry(label).or_default() += 1;
        }
    }
    let n_false = n - n_true;
    if n_true == 0 || n_false == 0 {
        return 0.0;
    }
    let mut all_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (label, count) in true_counts.iter().chain(false_counts.iter()) {
        *all_counts.entry(label).or_default() += count;
    }
    let h = entropy_counts(all_counts.into_values(), n);
    let h_true = entropy_counts(true_counts.into_values(), n_true);
    let h_false = entropy_counts(false_counts.into_values(), n_false);
    let nf = n as f64;
    let gain = h - (n_true as f64 / nf) * h_true - (n_false as f64 / nf) * h_false;
    let split_info = entropy_counts([n_true, n_false], n);
    (gain.max(0.0)) / split_info
}

/// Everything the recursive growth needs besides the per-node instance
/// subset. Senses are mapped to dense ids in lexicographic order, so an
/// ascending scan that breaks ties by *strictly* greater keys lands on
/// the lexicographically smallest sense automatically.
struct TrainContext<'a> {
    vectors: &'a [BinaryVector],
    labels: Vec<u32>,
    sense_names: Vec<String>,
    global_counts: Vec<usize>,
    width: usize,
    params: TreeParams,
}

impl<'a> TrainContext<'a> {
    fn new(vectors: &'a [BinaryVector], labels: &[String], params: TreeParams) -> Result<Self> {
        params.validate()?;
        if vectors.len() != labels.len() {
            return Err(Error::validation(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        if vectors.is_empty() {
            return Err(Error::validation("cannot train a tree on zero instances".to_string()));
        }
        let width = vectors[0].len();
        if let Some(bad) = vectors.iter().find(|v| v.len() != width) {
            return Err(Error::validation(format!(
                "vector width mismatch: expected {width}, found {}",
                bad.len()
            )));
        }
        let sense_names: Vec<String> = labels
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let id_of = |name: &str| sense_names.iter().position(|s| s == name).unwrap() as u32;
        let labels: Vec<u32> = labels.iter().map(|l| id_of(l)).collect();
        let mut global_counts = vec![0usize; sense_names.len()];
        for &id in &labels {
            global_counts[id as usize] += 1;
        }
        Ok(TrainContext {
            vectors,
            labels,
            sense_names,
            global_counts,
            width,
            params,
        })
    }

    fn count(&self, items: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.sense_names.len()];
        for &i in items {
            counts[self.labels[i] as usize] += 1;
        }
        counts
    }

    /// Majority sense of a count vector; ties go to the sense with the
    /// higher overall training frequency, then the lexicographically
    /// smaller one.
    fn majority(&self, counts: &[usize]) -> usize {
        let mut best = 0;
        for id in 1..counts.len() {
            let better = counts[id] > counts[best]
                || (counts[id] == counts[best] && self.global_counts[id] > self.global_counts[best]);
            if better {
                best = id;
            }
        }
        best
    }

    fn leaf(&self, counts: &[usize]) -> Node {
        let prediction = self.sense_names[self.majority(counts)].clone();
        let distribution = counts
            .iter()
            .enumerate()
            .filter(|&(_, c)| *c > 0)
            .map(|(id, &c)| (self.sense_names[id].clone(), c))
            .collect();
        Node::Leaf { distribution, prediction }
    }

    /// Best eligible split for the given instances: highest gain ratio,
    /// ties to the lowest feature index. A split is eligible when both
    /// children would receive at least `min_leaf_instances`. Returns the
    /// feature index, its gain ratio, and its raw information gain.
    fn best_split(&self, items: &[usize], counts: &[usize]) -> Option<(usize, f64, f64)> {
        let n = items.len();
        let node_entropy = entropy_counts(counts.iter().copied(), n);
        let mut best: Option<(usize, f64, f64)> = None;
        for f in 0..self.width {
            let mut true_counts = vec![0usize; self.sense_names.len()];
            let mut n_true = 0usize;
            for &i in items {
                if self.vectors[i].bits[f] {
                    true_counts[self.labels[i] as usize] += 1;
                    n_true += 1;
                }
            }
            let n_false = n - n_true;
            if n_true < self.params.min_leaf_instances || n_false < self.params.min_leaf_instances
            {
                continue;
            }
            let false_counts: Vec<usize> =
                counts.iter().zip(&true_counts).map(|(a, t)| a - t).collect();
            let h_true = entropy_counts(true_counts.iter().copied(), n_true);
            let h_false = entropy_counts(false_counts.iter().copied(), n_false);
            let nf = n as f64;
            let gain = (node_entropy
                - (n_true as f64 / nf) * h_true
                - (n_false as f64 / nf) * h_false)
                .max(0.0);
            let ratio = gain / entropy_counts([n_true, n_false], n);
            if best.is_none_or(|(_, best_ratio, _)| ratio > best_ratio) {
                best = Some((f, ratio, gain));
            }
        }
        best
    }

    fn grow(&self, items: Vec<usize>) -> Node {
        let counts = self.count(&items);
        if counts.iter().filter(|&&c| c > 0).count() <= 1 {
            return self.leaf(&counts);
        }
        let Some((feature, _, _)) = self.best_split(&items, &counts) else {
            return self.leaf(&counts);
        };
        let (true_items, false_items): (Vec<usize>, Vec<usize>) = items
            .into_iter()
            .partition(|&i| self.vectors[i].bits[feature]);
        Node::Split {
            feature_index: feature,
            on_true: Box::new(self.grow(true_items)),
            on_false: Box::new(self.grow(false_items)),
        }
    }
}

/// Trains a decision tree. Deterministic: identical inputs produce a
/// structurally identical tree, and instance order never matters.
pub fn train_tree(
    vectors: &[BinaryVector],
    labels: &[String],
    params: &TreeParams,
) -> Result<DecisionTree> {
    let ctx = TrainContext::new(vectors, labels, params.clone())?;
    let items: Vec<usize> = (0..vectors.len()).collect();
    let mut root = ctx.grow(items);
    if params.prune {
        prune_node(&mut root, &ctx);
    }
    Ok(DecisionTree { width: ctx.width, root })
}

/// Trains a one-node tree: a single split on the feature with the best
/// gain ratio among those with strictly positive gain (children at least
/// one instance each), or a bare majority leaf when no feature has any
/// gain.
pub fn train_stump(vectors: &[BinaryVector], labels: &[String]) -> Result<DecisionTree> {
    let params = TreeParams {
        min_leaf_instances: 1,
        prune: false,
        ..Default::default()
    };
    let ctx = TrainContext::new(vectors, labels, params)?;
    let items: Vec<usize> = (0..vectors.len()).collect();
    let counts = ctx.count(&items);
    let root = match ctx.best_split(&items, &counts) {
        Some((feature, _, gain)) if gain > 0.0 => {
            let (true_items, false_items): (Vec<usize>, Vec<usize>) =
                items.into_iter().partition(|&i| ctx.vectors[i].bits[feature]);
            Node::Split {
                feature_index: feature,
                on_true: Box::new(ctx.leaf(&ctx.count(&true_items))),
                on_false: Box::new(ctx.leaf(&ctx.count(&false_items))),
            }
        }
        _ => ctx.leaf(&counts),
    };
    Ok(DecisionTree { width: ctx.width, root })
}

/// Routes a vector from the root to a leaf and returns the prediction.
pub fn classify_tree<'t>(tree: &'t DecisionTree, v: &BinaryVector) -> Result<&'t str> {
    if v.len() != tree.width {
        return Err(Error::validation(format!(
            "vector width {} does not match tree width {}",
            v.len(),
            tree.width
        )));
    }
    let mut node = &tree.root;
    loop {
        match node {
            Node::Leaf { prediction, .. } => return Ok(prediction),
            Node::Split { feature_index, on_true, on_false } => {
                node = if v.bits[*feature_index] { on_true } else { on_false };
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Pessimistic pruning
// ---------------------------------------------------------------------------

/// Bottom-up subtree replacement: each internal node is collapsed to a
/// leaf when the collapsed leaf's pessimistic error does not exceed the
/// pruned subtree's. Children whose distributions ended up identical are
/// always merged (such a split cannot change any prediction).
fn prune_node(node: &mut Node, ctx: &TrainContext<'_>) {
    if let Node::Split { on_true, on_false, .. } = node {
        prune_node(on_true, ctx);
        prune_node(on_false, ctx);
        let distribution = merged_distribution(node);
        let counts: Vec<usize> = ctx
            .sense_names
            .iter()
            .map(|s| distribution.get(s).copied().unwrap_or(0))
            .collect();
        let leaf = ctx.leaf(&counts);
        let identical_children = matches!(
            node,
            Node::Split { on_true, on_false, .. }
                if matches!((on_true.as_ref(), on_false.as_ref()),
                    (Node::Leaf { distribution: dt, .. }, Node::Leaf { distribution: df, .. })
                        if dt == df)
        );
        if identical_children
            || leaf_pessimistic_errors(&distribution, ctx.params.pruning_confidence)
                <= subtree_pessimistic_errors(node, ctx.params.pruning_confidence)
        {
            *node = leaf;
        }
    }
}

fn merged_distribution(node: &Node) -> BTreeMap<String, usize> {
    fn add(node: &Node, acc: &mut BTreeMap<String, usize>) {
        match node {
            Node::Leaf { distribution, .. } => {
                for (sense, count) in distribution {
                    *acc.entry(sense.clone()).or_default() += count;
                }
            }
            Node::Split { on_true, on_false, .. } => {
                add(on_true, acc);
                add(on_false, acc);
            }
        }
    }
    let mut acc = BTreeMap::new();
    add(node, &mut acc);
    acc
}

fn leaf_pessimistic_errors(distribution: &BTreeMap<String, usize>, cf: f64) -> f64 {
    let n: usize = distribution.values().sum();
    let errors = n - distribution.values().max().copied().unwrap_or(0);
    errors as f64 + added_errors(n as f64, errors as f64, cf)
}

fn subtree_pessimistic_errors(node: &Node, cf: f64) -> f64 {
    match node {
        Node::Leaf { distribution, .. } => leaf_pessimistic_errors(distribution, cf),
        Node::Split { on_true, on_false, .. } => {
            subtree_pessimistic_errors(on_true, cf) + subtree_pessimistic_errors(on_false, cf)
        }
    }
}

/// Estimated extra errors at a node holding `n` instances with `e`
/// observed errors, at confidence `cf`.
///
/// This is the standard pessimistic-error scheme of C4.5-family pruners,
/// which has several published variants; the exact rules used here are:
///
/// * `e == 0`: `n·(1 − cf^(1/n))`, the exact upper bound for a
///   zero-error binomial sample;
/// * `0 < e < 1`: linear interpolation between the `e = 0` case and the
///   `e = 1` estimate;
/// * `e + 0.5 ≥ n`: no normal approximation is sensible; `max(n − e, 0)`;
/// * otherwise: the upper Wilson confidence bound with continuity
///   correction, `r = (f + z²/2n + z·√(f/n − f²/n + z²/4n²)) / (1 + z²/n)`
///   with `f = (e + 0.5)/n` and `z = Φ⁻¹(1 − cf)`, returning `r·n − e`.
///
/// `cf` is clamped to [1e-6, 0.5]: above 0.5 the one-sided bound would
/// fall below the observed error rate.
fn added_errors(n: f64, e: f64, cf: f64) -> f64 {
    let cf = cf.clamp(1e-6, 0.5);
    if e < 1.0 {
        let base = n * (1.0 - cf.powf(1.0 / n));
        if e == 0.0 {
            return base;
        }
        return base + e * (added_errors(n, 1.0, cf) - base);
    }
    if e + 0.5 >= n {
        return (n - e).max(0.0);
    }
    let z = normal_quantile(1.0 - cf);
    let f = (e + 0.5) / n;
    let r = (f + z * z / (2.0 * n) + z * (f / n - f * f / n + z * z / (4.0 * n * n)).sqrt())
        / (1.0 + z * z / n);
    r * n - e
}

/// Inverse CDF of the standard normal distribution (Acklam's rational
/// approximation, relative error below 1.15e-9). Valid for p in (0, 1).
fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    assert!(p > 0.0 && p < 1.0, "normal_quantile needs p in (0, 1), got {p}");
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        q * (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5])
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -normal_quantile(1.0 - p)
    }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

const TREE_FORMAT: &str = "lexvote-tree";
const TREE_FORMAT_VERSION: &str = "1";

/// Renders a tree as indented preorder text. Round-trips exactly through
/// [`tree_from_str`].
pub fn tree_to_string(tree: &DecisionTree) -> String {
    fn write_node(node: &Node, depth: usize, out: &mut String) {
        for _ in 0..depth {
            out.push_str("  ");
        }
        match node {
            Node::Leaf { distribution, prediction } => {
                out.push_str(&format!("leaf\t{prediction}\t{}", distribution.len()));
                for (sense, count) in distribution {
                    out.push_str(&format!("\t{sense}\t{count}"));
                }
                out.push('\n');
            }
            Node::Split { feature_index, on_true, on_false } => {
                out.push_str(&format!("split\t{feature_index}\n"));
                write_node(on_true, depth + 1, out);
                write_node(on_false, depth + 1, out);
            }
        }
    }
    let mut out = format!("{TREE_FORMAT}\t{TREE_FORMAT_VERSION}\nwidth\t{}\n", tree.width);
    write_node(&tree.root, 0, &mut out);
    out
}

/// Parses the output of [`tree_to_string`]. The `source` name is only
/// used in error messages.
pub fn tree_from_str(text: &str, source: &str) -> Result<DecisionTree> {
    let mut lines = text.lines().enumerate().peekable();
    let bad = |lineno: usize, message: String| Error::parse(Path::new(source), lineno, message);

    let (_, header) = lines
        .next()
        .ok_or_else(|| bad(0, "empty tree file".to_string()))?;
    if header != format!("{TREE_FORMAT}\t{TREE_FORMAT_VERSION}") {
        return Err(Error::validation(format!(
            "{source}: unsupported tree format header {header:?}"
        )));
    }
    let (_, width_line) = lines
        .next()
        .ok_or_else(|| bad(2, "missing width line".to_string()))?;
    let width: usize = width_line
        .strip_prefix("width\t")
        .and_then(|w| w.parse().ok())
        .ok_or_else(|| bad(2, format!("malformed width line {width_line:?}")))?;

    fn parse_node(
        lines: &mut std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'_>>>,
        bad: &dyn Fn(usize, String) -> Error,
    ) -> Result<Node> {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| bad(0, "tree text ended mid-node".to_string()))?;
        let lineno = idx + 1;
        let fields: Vec<&str> = line.trim_start().split('\t').collect();
        match fields.as_slice() {
            ["split", feature] => {
                let feature_index: usize = feature
                    .parse()
                    .map_err(|_| bad(lineno, format!("bad feature index {feature:?}")))?;
                let on_true = parse_node(lines, bad)?;
                let on_false = parse_node(lines, bad)?;
                Ok(Node::Split {
                    feature_index,
                    on_true: Box::new(on_true),
                    on_false: Box::new(on_false),
                })
            }
            ["leaf", prediction, count, rest @ ..] => {
                let expected: usize = count
                    .parse()
                    .map_err(|_| bad(lineno, format!("bad sense count {count:?}")))?;
                if rest.len() != expected * 2 {
                    return Err(bad(
                        lineno,
                        format!("leaf declares {expected} senses but lists {}", rest.len() / 2),
                    ));
                }
                let mut distribution = BTreeMap::new();
                for pair in rest.chunks(2) {
                    let count: usize = pair[1]
                        .parse()
                        .map_err(|_| bad(lineno, format!("bad leaf count {:?}", pair[1])))?;
                    distribution.insert(pair[0].to_string(), count);
                }
                Ok(Node::Leaf {
                    distribution,
                    prediction: prediction.to_string(),
                })
            }
            _ => Err(bad(lineno, format!("malformed tree node line {line:?}"))),
        }
    }

    let root = parse_node(&mut lines, &bad)?;
    if let Some((idx, line)) = lines.next() {
        return Err(bad(idx + 1, format!("trailing content after tree: {line:?}")));
    }
    Ok(DecisionTree { width, root })
}

pub fn save_tree(path: &Path, tree: &DecisionTree) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(tree_to_string(tree).as_bytes())
        .map_err(|e| Error::io(path, e))
}

pub fn load_tree(path: &Path) -> Result<DecisionTree> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    tree_from_str(&text, &path.display().to_string())
}
