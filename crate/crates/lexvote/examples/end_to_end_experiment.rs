//! A complete experiment: corpus files in, report directory out.
//!
//! Run with `cargo run --example end_to_end_experiment`. Generates a
//! three-word lexical sample on disk, writes the same flat config file
//! the `lexvote experiment` subcommand reads, runs the whole pipeline —
//! feature extraction, bagged tree training per view, ensemble voting,
//! baselines, scoring, agreement analysis — and walks the files it
//! produced. Rerunning with the same seed reproduces every byte.

use std::fs;

use lexvote::corpus::write_instances;
use lexvote::experiment::{ExperimentConfig, run_experiment};
use lexvote::synth::{SynthConfig, generate_sample};

fn main() -> lexvote::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let dir = scratch.path();

    // Three target words, 500 train / 200 test each. Senses hinge on a
    // marker word next to the target, with 15% of the markers lying.
    let synth = SynthConfig { seed: 11, cue_fidelity: 0.85, ..Default::default() };
    let mut config_text = String::new();
    for word in ["drift", "plant", "line"] {
        let sample = generate_sample(word, &synth);
        let train = dir.join(format!("{word}.train.tsv"));
        let test = dir.join(format!("{word}.test.tsv"));
        write_instances(&train, &sample.train)?;
        write_instances(&test, &sample.test)?;
        config_text.push_str(&format!(
            "word\t{word}\t{}\t{}\n",
            train.display(),
            test.display()
        ));
    }
    config_text.push_str("seed\t11\nbags\t10\nout\t");
    config_text.push_str(&dir.join("report").display().to_string());
    config_text.push('\n');
    let config_path = dir.join("experiment.conf");
    fs::write(&config_path, &config_text).expect("write config");
    println!("config file:\n{config_text}");

    // The library call behind `lexvote experiment --config …`. With no
    // `classifiers` line the default ten-classifier roster runs: U, B,
    // C, UB, UC, BC, UBC, mixed, stump, majority.
    let config = ExperimentConfig::from_file(&config_path)?;
    let outcome = run_experiment(&config)?;

    println!("accuracy over {} pooled test instances:", outcome.test_instances);
    for row in &outcome.scores {
        println!("  {:<9} {:>5.1}%", row.system_name, 100.0 * row.accuracy);
    }

    let kway = outcome.kway.as_ref().expect("ten systems were compared");
    println!(
        "\nall {} classifiers right on {} instances; none right on {}",
        kway.k(),
        kway.all_correct(),
        kway.none_correct()
    );

    println!("\nreport files:");
    let mut paths: Vec<_> = walk(&config.out_dir);
    paths.sort();
    for path in paths {
        let bytes = fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
        println!("  {:<32} {:>7} bytes", path.strip_prefix(dir).unwrap().display(), bytes);
    }
    Ok(())
}

fn walk(dir: &std::path::Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    if let Ok(entries) = fs::read_dir(dir) {
        for entry in entries.flatten() {
            let path = entry.path();
            if path.is_dir() {
                out.extend(walk(&path));
            } else {
                out.push(path);
            }
        }
    }
    out
}
