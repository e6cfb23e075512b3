//! Simulation and asymptotics of a rumor-spreading process with random
//! resources on the complete graph and on Erdős–Rényi graphs.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix the
//! usual choices (`f64` for simulation, exact rationals for enumeration).

pub mod complete;
pub mod error;
pub mod experiments;
pub mod explore;
pub mod mode2;
pub mod resource;
pub mod rng;
pub mod scalar;
pub mod theory;

pub use num_rational::BigRational;

pub use error::{Error, Result};
pub use resource::{Law, LawSpec};
pub use rng::{derive_seed, Address, Family, Label, RandomSource};
pub use scalar::Scalar;
pub use theory::{predict, EmissionMode, Prediction};

pub type ResourceLaw = Law<f64>;
pub type ExactLaw = Law<BigRational>;
pub type TheoryPrediction = Prediction<f64>;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
