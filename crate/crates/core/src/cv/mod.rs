//! Walk-forward window plans, hyperparameter time blocks, and the
//! experiment engine that orchestrates fit → forecast → score across
//! models, tenors, and windows.

mod blocks;
mod config;
mod engine;
mod windows;

pub use blocks::{assign_blocks, DateSpan, TimeBlock, TimeBlockTable};
pub use config::{
    load_config, validate_config, DataConfig, ExperimentConfig, ExternalModelConfig, ModelEntry,
    ModelKind, ProtocolConfig, RawConfig, RawModelEntry, RunConfig,
};
pub use engine::{
    load_panel, run_experiment, HyperParamRecord, ResultStatus, RunOutput, RunProvenance,
    WindowResult,
};
pub use windows::{generate_windows, Scheme, WindowPlan, WindowSpan};
