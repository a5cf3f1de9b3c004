//! Simulated lexical semantic change.
//!
//! A sense-annotated corpus is split into two halves so that chosen target
//! lemmas shift their sense frequencies between the halves. Graded and binary
//! change scores are read off the split and serve as gold data for change
//! detection models, which are scored by [`evaluation`].

pub mod change;
pub mod corpus;
pub mod evaluation;
pub mod rng;
pub mod simulator;
pub mod synthetic;

pub use change::{ChangeScores, ProbabilityDistribution, SenseFrequencyDistribution};
pub use corpus::{AnnotatedCorpus, LemmaKey, Pos, SenseKey, Sentence, Token};
pub use simulator::{GoldRecord, GoldRow, Simulation, Split, SplitConfig, TargetPlan};
