//! Mode-1 exploration of the Erdős–Rényi graph.
//!
//! The least active word emits its whole resource. Attempt `l` of server `i`
//! targets `I^i_l` over the edge mark `B^i_l`; the child is kept only if the
//! mark is open, the label is not yet in the tree, and no earlier attempt of
//! the same burst (open or closed) used that label. A closed edge therefore
//! stays closed for the rest of the burst.

use crate::rng::{Label, RandomSource};

use super::state::{burst_attempts, Attempt, ExplorationState, StepCounts};
use super::word::Word;

/// Everything one burst revealed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BurstRecord {
    /// Clock value reached by this burst (0 for the root).
    pub t: usize,
    pub emitter: Word,
    pub label: Label,
    pub attempts: Vec<Attempt>,
    /// Letters of the attempts that entered the active set.
    pub accepted: Vec<u32>,
}

/// Indices of attempts accepted under the Erdős–Rényi rule.
pub(crate) fn er_accepted(attempts: &[Attempt], informed: impl Fn(Label) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    for (idx, a) in attempts.iter().enumerate() {
        let repeated = attempts[..idx].iter().any(|b| b.label == a.label);
        if a.open && !repeated && !informed(a.label) {
            out.push(idx);
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct ErOutcome {
    pub tau: usize,
    pub final_informed: usize,
    pub state: ExplorationState,
    pub bursts: Vec<BurstRecord>,
    pub trace: Vec<StepCounts>,
}

/// Step-by-step driver of the mode-1 construction.
#[derive(Debug, Clone)]
pub struct ErExploration<'a> {
    src: &'a RandomSource,
    state: ExplorationState,
    clock: usize,
    tau: Option<usize>,
    bursts: Vec<BurstRecord>,
    trace: Vec<StepCounts>,
}

impl<'a> ErExploration<'a> {
    /// Labels the root with `I_0` and performs its burst (clock 0).
    pub fn new(src: &'a RandomSource) -> Self {
        let root_label = src.draw_initial();
        let mut run = ErExploration {
            src,
            state: ExplorationState::new(src.n(), root_label),
            clock: 0,
            tau: None,
            bursts: Vec::new(),
            trace: Vec::new(),
        };
        run.burst();
        run.trace.push(run.state.counts(0));
        run
    }

    fn burst(&mut self) {
        let v = self
            .state
            .take_least_active()
            .expect("burst needs an active word");
        let i = self.state.label(&v).expect("labelled");
        let attempts = burst_attempts(self.src, i, self.src.resource(i));
        let accepted = er_accepted(&attempts, |l| self.state.is_informed(l));
        for &idx in &accepted {
            let a = attempts[idx];
            self.state.add_active(v.child(a.letter), a.label);
        }
        self.bursts.push(BurstRecord {
            t: self.bursts.len(),
            emitter: v.clone(),
            label: i,
            accepted: accepted.iter().map(|&idx| attempts[idx].letter).collect(),
            attempts,
        });
        self.state.exhaust(v);
    }

    /// Advances one step; returns `false` once the construction has stopped.
    pub fn step(&mut self) -> bool {
        if self.tau.is_some() {
            return false;
        }
        if self.state.active().is_empty() {
            self.tau = Some(self.clock);
            return false;
        }
        self.burst();
        self.clock += 1;
        self.trace.push(self.state.counts(self.clock));
        true
    }

    pub fn clock(&self) -> usize {
        self.clock
    }

    pub fn tau(&self) -> Option<usize> {
        self.tau
    }

    pub fn state(&self) -> &ExplorationState {
        &self.state
    }

    pub fn bursts(&self) -> &[BurstRecord] {
        &self.bursts
    }

    pub fn finish(mut self) -> ErOutcome {
        while self.step() {}
        ErOutcome {
            tau: self.tau.expect("stopped"),
            final_informed: self.state.tree_len(),
            state: self.state,
            bursts: self.bursts,
            trace: self.trace,
        }
    }
}

pub fn run_er_mode1(src: &RandomSource) -> ErOutcome {
    ErExploration::new(src).finish()
}
