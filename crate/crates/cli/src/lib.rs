//! Pipeline stages behind the `lscsim` binary. Stages talk to each other
//! only through files in the output directory:
//!
//! * `simulate` → `corpus1.txt`, `corpus2.txt`, `gold.tsv`, `testset.tsv`, `split.log.tsv`
//! * `models` → `predictions/<cell>.tsv` plus a `<cell>.json` provenance sidecar
//! * `evaluate` → `report.tsv`, `summary.tsv`, `iterations.tsv`

pub mod config;
pub mod pipeline;

pub use config::PipelineConfig;
pub use pipeline::{cmd_all, cmd_evaluate, cmd_models, cmd_simulate, cmd_synth};

/// A problem with the user's input (missing files, bad config, malformed
/// corpus). The binary exits with status 2 for these and 1 for anything else.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Exit status for an error returned by a stage.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.chain().any(|e| e.downcast_ref::<InputError>().is_some()) {
        2
    } else {
        1
    }
}
