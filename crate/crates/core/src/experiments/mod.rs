//! Replicated runs, summary statistics and exact small-instance laws.

pub mod config;
pub mod oracle;
pub mod replicas;
pub mod stats;
pub mod summary;

pub use config::{ExperimentConfig, Model};
pub use oracle::{exact_small_distribution, pmf_to_f64, DEFAULT_DEPTH_CAP};
pub use replicas::{
    run_model, run_replica_range, run_replicas, run_until_survivors, write_records_csv,
    ReplicaRecord, RunResult,
};
pub use stats::{
    chi_square, histogram, ks_statistic, ks_threshold, two_sample_chi_square, ChiSquare,
};
pub use summary::{attach_oracle, summarize, Summary, MIN_SURVIVORS};
