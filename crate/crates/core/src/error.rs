use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid parameters (population size, probability, law, ...).
    #[error("configuration error: {0}")]
    Config(String),
    /// A label or attempt index outside the addressable range.
    #[error("address out of range: {0}")]
    OutOfRange(String),
    /// A quantity requested outside the regime where it is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The exhaustive oracle cannot enumerate the instance.
    #[error("oracle infeasible: {0}")]
    Infeasible(String),
    /// A lazy edge scan exceeded its draw budget.
    #[error("edge scan for server {server} exceeded {cap} draws")]
    ScanCap { server: usize, cap: u64 },
    /// Not enough data for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
