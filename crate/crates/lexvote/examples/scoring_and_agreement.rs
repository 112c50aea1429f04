//! Accuracy scoring and inter-system agreement analysis.
//!
//! Run with `cargo run --example scoring_and_agreement`. Two systems
//! with similar accuracy can be nearly interchangeable or genuinely
//! complementary; accuracy alone cannot tell. The agreement tables
//! bucket the test set by *how many* systems got each instance right,
//! which also yields the ceiling any combination of the systems could
//! reach (the "optimal" bound: instances at least one system solves).

use lexvote::eval::{
    kway_agreement, optimal_combination_bound, pairwise_agreement, render_kway_text,
    render_pairwise_text, render_scores_text, score,
};
use lexvote::synth::bucketed_predictions;

fn main() {
    // A synthetic gold standard of 7,444 instances and two real-world
    // shaped systems: a frequency baseline and a one-rule learner that
    // agree on about half the set.
    //   both right 3,974   exactly one right 1,022   both wrong 2,448
    let (gold, preds) = bucketed_predictions(&["stump", "majority"], &[2448, 1022, 3974]);

    let scores: Vec<_> = preds.iter().map(|p| score(p, &gold).unwrap()).collect();
    print!("{}", render_scores_text(&scores));

    let pair = pairwise_agreement(&preds[0], &preds[1], &gold).unwrap();
    println!();
    print!("{}", render_pairwise_text(std::slice::from_ref(&pair)));
    println!(
        "\nthe two systems solve different instances: either alone tops out near 60%,\n\
         but some instance is solved by one of them {:.1}% of the time",
        100.0 * optimal_combination_bound(&preds, &gold).unwrap()
    );

    // The same machinery generalizes past two systems. Here are five,
    // with buckets chosen so most instances are solved by three or four
    // of them — a committee whose members err in different places.
    let names = ["alpha", "beta", "gamma", "delta", "stump"];
    let (gold, preds) = bucketed_predictions(&names, &[888, 490, 1273, 2113, 1862, 822]);
    let kway = kway_agreement(&preds, &gold).unwrap();
    println!();
    print!("{}", render_kway_text(&kway));

    // correct_counts always partitions the gold set, so the buckets are
    // a complete account of where every instance went.
    let n: usize = kway.correct_counts.iter().sum();
    println!("\nbucket counts sum back to n: {} = {}", n, kway.n);
}
