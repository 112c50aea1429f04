//! Candidate extraction, one view at a time, on three small sentences.
//!
//! Run with `cargo run --example worked_candidates`. Candidates are what
//! the selectors in `build_feature_set` later score and filter; this
//! example stays upstream of all that to show exactly which word
//! combinations each view even considers, and which it rules out.

use lexvote::corpus::{Instance, Stoplist};
use lexvote::features::{
    extract_bigram_candidates, extract_cooc_candidates, extract_unigram_candidates,
};

fn instance(tokens: &[&str], target_index: usize) -> Instance {
    Instance::new(
        "example",
        tokens[target_index],
        tokens.iter().map(|t| t.to_string()).collect(),
        target_index,
        None,
    )
    .expect("hand-written instances are valid")
}

fn main() {
    // Unigrams: every non-stoplisted context word, the target included.
    // No stemming or other normalization — "flowering" and "flowers"
    // stay distinct candidates.
    let water = instance(&["i", "water", "the", "flowering", "flowers"], 1);
    let stoplist = Stoplist::from_words(["i", "the"]);
    let unigrams = extract_unigram_candidates(&water, &stoplist);
    println!("tokens:   {:?}", water.tokens);
    println!("stoplist: {{i, the}}");
    println!(
        "unigram candidates: {}",
        unigrams.iter().map(|f| f.text()).collect::<Vec<_>>().join(", ")
    );

    // Bigrams: adjacent pairs anywhere in the context. A pair is dropped
    // only when BOTH of its words are stoplisted, so "go to" and
    // "the channel" survive while "to the" does not.
    let channel = instance(&["go", "to", "the", "channel", "quickly"], 3);
    let stoplist = Stoplist::from_words(["to", "the"]);
    let bigrams = extract_bigram_candidates(&channel, &stoplist);
    println!("\ntokens:   {:?}", channel.tokens);
    println!("stoplist: {{to, the}}");
    println!(
        "bigram candidates:  {}  (\"to the\" excluded)",
        bigrams.iter().map(|f| f.text()).collect::<Vec<_>>().join(", ")
    );

    // Co-occurrences: the target paired with each word up to `window`
    // positions away, keeping which side the word fell on. No stoplist
    // at all — function words like "of" and "a" are allowed because a
    // pair like "art of" can be a strong sense cue even when "of" alone
    // means nothing.
    let art = instance(&["he", "and", "i", "like", "art", "of", "a", "certain", "period"], 4);
    for window in [2, 1] {
        let coocs = extract_cooc_candidates(&art, window);
        println!(
            "\ntokens:   {:?}\nwindow {window} co-occurrence candidates: {}",
            art.tokens,
            coocs.iter().map(|f| f.text()).collect::<Vec<_>>().join(", ")
        );
    }
}
