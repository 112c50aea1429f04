//! Word sense disambiguation with voting ensembles of lexical decision trees.
//!
//! The crate takes a *lexical sample* — many short contexts of one
//! ambiguous target word, each training context tagged with the sense it
//! uses — and learns to tag new contexts. The approach is deliberately
//! shallow: no parses, no sense inventory knowledge, only surface
//! co-occurrence statistics.
//!
//! - [`corpus`] reads and writes the tab-separated instance format and
//!   the stoplist.
//! - [`features`] turns a training set into one of three binary feature
//!   views — unigrams, adjacent bigrams, or window co-occurrences — with
//!   frequency floors and a log-likelihood (G²) association filter.
//! - [`tree`] grows decision trees over those binary features with a
//!   gain-ratio split criterion and pessimistic error-based pruning, plus
//!   single-split stumps.
//! - [`ensemble`] bags bootstrap-replicate trees per view and lets
//!   several views vote, with baselines (stump, majority sense) and an
//!   on-disk model bundle format.
//! - [`eval`] scores predictions against a gold standard and measures
//!   how much different systems agree — pairwise and k-way — including
//!   the optimal-combination upper bound.
//! - [`experiment`] drives the whole pipeline over many target words
//!   from one config file and writes a deterministic report directory.
//! - [`synth`] generates lexical samples with a planted signal, used by
//!   the examples and the test suite.
//!
//! The `lexvote` binary exposes each stage as a subcommand; the
//! `examples/` directory walks through the pipeline piece by piece.

pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod features;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
