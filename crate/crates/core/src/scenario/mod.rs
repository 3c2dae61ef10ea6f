//! Scenario configuration, the closed-loop runner, ensembles and sweeps.

mod config;
mod ensemble;
mod run;

pub use config::{
    ControlConfig, DatasetSource, DiffusionConfig, Mode, ReferencePiece, ScenarioConfig, TimeAxis, TimeConfig,
};
pub use ensemble::{run_ensemble, run_many, spearman, sweep_dtc, sweep_k3, DtcRow, Ensemble, EnsembleStats, K3Row};
pub use run::{load_dataset, run, run_prepared, Prepared, SimulationResult, TimeSeries};
