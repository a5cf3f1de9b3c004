//! Reference change-detection models: count and PPMI matrices, SVD,
//! skip-gram with negative sampling, three ways of making two spaces
//! comparable, and two change measures.

pub mod align;
pub mod corpus;
pub mod count;
pub mod error;
pub mod grid;
pub mod measures;
pub mod sgns;
pub mod space;
pub mod sparse;
pub mod svd;

pub use align::{align_ci, align_op, word_injection, OpAlignment};
pub use corpus::{PlainCorpus, Vocabulary};
pub use count::{count_space, ppmi_space};
pub use error::EmbedError;
pub use grid::{Alignment, CellOutput, GridInputs, Job, Measure, Model, ModelGridSpec};
pub use measures::{cosine_distance, lnd};
pub use sgns::SgnsConfig;
pub use space::EmbeddingSpace;
pub use sparse::CsrMatrix;
pub use svd::svd_space;
