//! Labelled-word explorations of the rumor process.

pub mod delayed;
pub mod edges;
pub mod er;
pub mod sequential;
pub mod state;
pub mod word;

pub use delayed::{run_coupled_delayed, CoupledOutcome, CoupledStep, DelayedCoupling};
pub use edges::{
    edge_key, edge_status_total, mismatch_bound, mismatch_count, EdgeStatus, EdgeStatusTable,
};
pub use er::{run_er_mode1, BurstRecord, ErExploration, ErOutcome};
pub use sequential::{run_cg_sequential, BurstTimeMap, CgOutcome, SequentialExploration};
pub use state::{burst_attempts, Attempt, ExplorationState, StepCounts};
pub use word::{word_compare, Word};

use std::io::Write;

/// Writes `t,card_tree,card_active,card_delayed,card_exhausted` rows.
pub fn write_trace<W: Write>(mut out: W, trace: &[StepCounts]) -> std::io::Result<()> {
    writeln!(out, "t,card_tree,card_active,card_delayed,card_exhausted")?;
    for c in trace {
        writeln!(
            out,
            "{},{},{},{},{}",
            c.t, c.card_tree, c.card_active, c.card_delayed, c.card_exhausted
        )?;
    }
    Ok(())
}
