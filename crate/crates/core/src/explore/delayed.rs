//! Joint run of the mode-1 exploration and the delayed complete-graph
//! exploration on the same draws.
//!
//! While the ER side has active words both sides share the frontier, the
//! active set and the exhausted set. An open attempt whose label was first
//! met over a closed mark in the same burst informs a server on the complete
//! graph only; that node is parked in the delayed set. Once the ER side stops,
//! the delayed nodes are processed alone with the sequential rule.

use std::collections::BTreeSet;

use crate::rng::{Label, RandomSource};

use super::edges::{mismatch_bound, mismatch_count, EdgeStatusTable};
use super::er::{er_accepted, BurstRecord};
use super::sequential::open_accepted;
use super::state::{burst_attempts, ExplorationState, StepCounts};
use super::word::Word;

/// Coupling diagnostics after each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoupledStep {
    pub t: usize,
    pub card_c: usize,
    pub card_f: usize,
    pub card_delayed: usize,
    /// Running `sum M(LX(s))` over the joint-phase emitters so far.
    pub running_y: u64,
}

#[derive(Debug, Clone)]
pub struct CoupledOutcome {
    pub tau_er: usize,
    pub tau_cgd: usize,
    pub er_informed: usize,
    pub cgd_informed: usize,
    pub er: ExplorationState,
    pub cgd: ExplorationState,
    pub er_bursts: Vec<BurstRecord>,
    pub edge_table: EdgeStatusTable,
    pub steps: Vec<CoupledStep>,
    pub er_trace: Vec<StepCounts>,
    pub cgd_trace: Vec<StepCounts>,
    /// `Y = sum_i M(i)` over all servers.
    pub mismatch_bound: u64,
}

#[derive(Debug, Clone)]
pub struct DelayedCoupling<'a> {
    src: &'a RandomSource,
    er: ExplorationState,
    cgd: ExplorationState,
    clock: usize,
    tau_er: Option<usize>,
    tau_cgd: Option<usize>,
    running_y: u64,
    er_bursts: Vec<BurstRecord>,
    steps: Vec<CoupledStep>,
    er_trace: Vec<StepCounts>,
    cgd_trace: Vec<StepCounts>,
}

impl<'a> DelayedCoupling<'a> {
    pub fn new(src: &'a RandomSource) -> Self {
        let root_label = src.draw_initial();
        let mut run = DelayedCoupling {
            src,
            er: ExplorationState::new(src.n(), root_label),
            cgd: ExplorationState::new(src.n(), root_label),
            clock: 0,
            tau_er: None,
            tau_cgd: None,
            running_y: 0,
            er_bursts: Vec::new(),
            steps: Vec::new(),
            er_trace: Vec::new(),
            cgd_trace: Vec::new(),
        };
        let (c, f) = run.joint_burst();
        run.record(c, f);
        run
    }

    fn record(&mut self, card_c: usize, card_f: usize) {
        self.steps.push(CoupledStep {
            t: self.clock,
            card_c,
            card_f,
            card_delayed: self.cgd.delayed().len(),
            running_y: self.running_y,
        });
        self.er_trace.push(self.er.counts(self.clock));
        self.cgd_trace.push(self.cgd.counts(self.clock));
    }

    fn joint_burst(&mut self) -> (usize, usize) {
        let v = self
            .er
            .take_least_active()
            .expect("joint burst needs an active word");
        let shared = self.cgd.remove_active(&v);
        debug_assert!(shared);
        let i = self.er.label(&v).expect("labelled");
        let attempts = burst_attempts(self.src, i, self.src.resource(i));
        let accepted = er_accepted(&attempts, |l| self.er.is_informed(l));

        let mut c = Vec::new();
        for (idx, a) in attempts.iter().enumerate() {
            let before = &attempts[..idx];
            if a.open
                && !self.cgd.is_informed(a.label)
                && before.iter().any(|b| !b.open && b.label == a.label)
                && !before.iter().any(|b| b.open && b.label == a.label)
            {
                c.push(idx);
            }
        }
        let new_labels: BTreeSet<Label> = accepted.iter().map(|&idx| attempts[idx].label).collect();
        let f: Vec<Word> = self
            .cgd
            .delayed()
            .iter()
            .filter(|w| new_labels.contains(&self.cgd.label(w).unwrap()))
            .cloned()
            .collect();

        for w in &f {
            self.cgd.forget_delayed(w);
        }
        for &idx in &accepted {
            let a = attempts[idx];
            self.er.add_active(v.child(a.letter), a.label);
            self.cgd.add_active(v.child(a.letter), a.label);
        }
        for &idx in &c {
            let a = attempts[idx];
            self.cgd.add_delayed(v.child(a.letter), a.label);
        }
        self.running_y += mismatch_count(self.src, i) as u64;
        self.er_bursts.push(BurstRecord {
            t: self.er_bursts.len(),
            emitter: v.clone(),
            label: i,
            accepted: accepted.iter().map(|&idx| attempts[idx].letter).collect(),
            attempts,
        });
        self.er.exhaust(v.clone());
        self.cgd.exhaust(v);
        (c.len(), f.len())
    }

    fn delayed_burst(&mut self) -> usize {
        let v = self
            .cgd
            .take_least_delayed()
            .expect("delayed burst needs a delayed word");
        let i = self.cgd.label(&v).expect("labelled");
        let attempts = burst_attempts(self.src, i, self.src.resource(i));
        let c = open_accepted(&attempts, |l| self.cgd.is_informed(l));
        for &idx in &c {
            let a = attempts[idx];
            self.cgd.add_delayed(v.child(a.letter), a.label);
        }
        self.cgd.exhaust(v);
        c.len()
    }

    pub fn step(&mut self) -> bool {
        if self.tau_cgd.is_some() {
            return false;
        }
        if self.tau_er.is_none() {
            if self.er.active().is_empty() {
                self.tau_er = Some(self.clock);
            } else {
                let (c, f) = self.joint_burst();
                self.clock += 1;
                self.record(c, f);
                return true;
            }
        }
        if self.cgd.delayed().is_empty() {
            self.tau_cgd = Some(self.clock);
            return false;
        }
        let c = self.delayed_burst();
        self.clock += 1;
        self.record(c, 0);
        true
    }

    pub fn clock(&self) -> usize {
        self.clock
    }

    pub fn er_state(&self) -> &ExplorationState {
        &self.er
    }

    pub fn cgd_state(&self) -> &ExplorationState {
        &self.cgd
    }

    /// Structural coupling checks at the current clock.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.er.check_structure().map_err(|e| format!("er: {e}"))?;
        self.cgd
            .check_structure()
            .map_err(|e| format!("cgd: {e}"))?;
        let er_tree = self.er.tree();
        let cgd_tree = self.cgd.tree();
        if !er_tree.is_subset(&cgd_tree) {
            return Err(format!(
                "t={}: ER tree not contained in delayed tree",
                self.clock
            ));
        }
        let joint = self.tau_er.is_none_or(|tau| self.clock <= tau);
        if joint {
            if self.er.active() != self.cgd.active() || self.er.exhausted() != self.cgd.exhausted()
            {
                return Err(format!("t={}: shared sets diverged", self.clock));
            }
            let union: BTreeSet<Word> = er_tree.union(self.cgd.delayed()).cloned().collect();
            if union != cgd_tree {
                return Err(format!(
                    "t={}: delayed tree is not ER tree plus delayed set",
                    self.clock
                ));
            }
            if self.cgd.delayed().len() as u64 > self.running_y {
                return Err(format!(
                    "t={}: {} delayed nodes exceed bound {}",
                    self.clock,
                    self.cgd.delayed().len(),
                    self.running_y
                ));
            }
        }
        Ok(())
    }

    pub fn finish(mut self) -> CoupledOutcome {
        while self.step() {}
        let n = self.src.n();
        CoupledOutcome {
            tau_er: self.tau_er.expect("stopped"),
            tau_cgd: self.tau_cgd.expect("stopped"),
            er_informed: self.er.tree_len(),
            cgd_informed: self.cgd.tree_len(),
            edge_table: EdgeStatusTable::from_bursts(n, &self.er_bursts),
            mismatch_bound: mismatch_bound(self.src, 1..=n),
            er: self.er,
            cgd: self.cgd,
            er_bursts: self.er_bursts,
            steps: self.steps,
            er_trace: self.er_trace,
            cgd_trace: self.cgd_trace,
        }
    }
}

pub fn run_coupled_delayed(src: &RandomSource) -> CoupledOutcome {
    DelayedCoupling::new(src).finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::er::run_er_mode1;
    use crate::explore::sequential::run_cg_sequential;
    use crate::resource::Law;

    fn laws() -> Vec<Law<f64>> {
        vec![
            Law::constant(2),
            Law::from_pmf(vec![(0, 0.5), (3, 0.5)]).unwrap(),
        ]
    }

    #[test]
    fn degenerate_cases() {
        let src = RandomSource::new(5, 10, 0.5, Law::constant(0)).unwrap();
        let out = run_coupled_delayed(&src);
        assert_eq!((out.tau_er, out.tau_cgd), (0, 0));
        for seed in 0..50 {
            let src = RandomSource::new(seed, 20, 1.0, Law::constant(3)).unwrap();
            let out = run_coupled_delayed(&src);
            assert_eq!(out.tau_er, out.tau_cgd);
            assert!(out.steps.iter().all(|s| s.card_delayed == 0));
        }
    }

    #[test]
    fn invariants_every_step() {
        let mut seed = 0;
        for n in [2, 5, 17, 50] {
            for p in [0.3, 0.7] {
                for law in laws() {
                    for _ in 0..20 {
                        seed += 1;
                        let src = RandomSource::new(seed, n, p, law.clone()).unwrap();
                        let mut run = DelayedCoupling::new(&src);
                        loop {
                            run.check_invariants().unwrap();
                            if !run.step() {
                                break;
                            }
                        }
                        let out = run.finish();
                        assert!(out.tau_cgd >= out.tau_er);
                        assert!(out
                            .steps
                            .iter()
                            .take(out.tau_er + 1)
                            .all(|s| s.card_delayed as u64 <= out.mismatch_bound));
                    }
                }
            }
        }
    }

    #[test]
    fn er_side_matches_plain_run() {
        for seed in 0..100 {
            let src = RandomSource::new(seed, 30, 0.5, Law::constant(3)).unwrap();
            let plain = run_er_mode1(&src);
            let joint = run_coupled_delayed(&src);
            assert_eq!(plain.tau, joint.tau_er);
            assert_eq!(plain.bursts, joint.er_bursts);
        }
    }

    #[test]
    fn same_label_set_as_sequential() {
        for seed in 0..200 {
            let src = RandomSource::new(seed, 25, 0.4, Law::constant(4)).unwrap();
            let seq = run_cg_sequential(&src);
            let del = run_coupled_delayed(&src);
            assert_eq!(seq.state.tree_labels(), del.cgd.tree_labels());
        }
    }
}
