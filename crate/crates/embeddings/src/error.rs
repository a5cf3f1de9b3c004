use thiserror::Error;

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("corpus {0} has no tokens")]
    EmptyCorpus(String),
    #[error("no target words given")]
    NoTargets,
    #[error("target {0:?} contains the reserved marker '@'")]
    ReservedMarker(String),
    #[error("word {0:?} is not in the vocabulary")]
    UnknownWord(String),
    #[error("word {0:?} has a zero vector")]
    ZeroVector(String),
    #[error("spaces are not comparable: {0}")]
    Incompatible(String),
    #[error("only {available} neighbour candidates, need {needed}")]
    TooFewNeighbours { needed: usize, available: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
