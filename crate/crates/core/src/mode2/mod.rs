//! Second emission mode: targets are picked among graph neighbors.

pub mod coupled;
pub mod direct;
pub mod graph;

pub use coupled::{
    incompatibility_trace, run_mode2_coupled, write_joint_trace, JointOutcome, JointRecord,
    JointStep, TriStateEdges, SCAN_CAP,
};
pub use direct::{run_mode2_direct, run_mode2_on, DirectOutcome};
pub use graph::{sample_er_graph, Adjacency};
