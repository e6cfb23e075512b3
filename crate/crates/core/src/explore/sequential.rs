//! Sequential complete-graph construction with the thinned resource.
//!
//! Only open attempts produce children, and the within-burst duplicate check
//! looks at open attempts only (each use of an edge draws a fresh mark).
//! Alongside the tree, the per-emission path `(S^, N^)` is rebuilt by spending
//! the open attempts of each burst one at a time.

use crate::rng::{Label, RandomSource};

use super::er::BurstRecord;
use super::state::{burst_attempts, Attempt, ExplorationState, StepCounts};

pub(crate) fn open_accepted(attempts: &[Attempt], informed: impl Fn(Label) -> bool) -> Vec<usize> {
    let mut out = Vec::new();
    for (idx, a) in attempts.iter().enumerate() {
        let repeated = attempts[..idx].iter().any(|b| b.open && b.label == a.label);
        if a.open && !repeated && !informed(a.label) {
            out.push(idx);
        }
    }
    out
}

/// Time change between bursts and single emissions.
///
/// `offsets[r]` is the number of open attempts spent by bursts `0..r`;
/// `s_path[s]`, `n_path[s]` are the available attempts and the informed
/// count after `s` emissions. `after_burst[r]` holds, right after burst `r`,
/// the summed thinned resource of the active words and the tree size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BurstTimeMap {
    pub offsets: Vec<u64>,
    pub s_path: Vec<i64>,
    pub n_path: Vec<usize>,
    pub after_burst: Vec<(i64, usize)>,
}

impl BurstTimeMap {
    /// Emission count at which the run stops.
    pub fn total_emissions(&self) -> u64 {
        *self.offsets.last().expect("offsets start at 0")
    }

    /// First emission index with no attempts left.
    pub fn first_exhaustion(&self) -> Option<u64> {
        self.s_path.iter().position(|&s| s == 0).map(|s| s as u64)
    }

    /// Checks the burst-boundary identities and the stopping identity.
    pub fn verify(&self) -> Result<(), String> {
        if self.offsets.first() != Some(&0) {
            return Err("offsets must start at 0".into());
        }
        if self.offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err("offsets decrease".into());
        }
        if self.s_path.len() as u64 != self.total_emissions() + 1 {
            return Err("path length disagrees with offsets".into());
        }
        for (r, &(active_sum, tree)) in self.after_burst.iter().enumerate() {
            let s = self.offsets[r + 1] as usize;
            if self.s_path[s] != active_sum {
                return Err(format!(
                    "burst {r}: S^ = {} but active sum = {active_sum}",
                    self.s_path[s]
                ));
            }
            if self.n_path[s] != tree {
                return Err(format!(
                    "burst {r}: N^ = {} but tree size = {tree}",
                    self.n_path[s]
                ));
            }
        }
        if self.first_exhaustion() != Some(self.total_emissions()) {
            return Err(format!(
                "first zero of S^ at {:?}, stop at {}",
                self.first_exhaustion(),
                self.total_emissions()
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub tau: usize,
    pub final_informed: usize,
    pub state: ExplorationState,
    pub bursts: Vec<BurstRecord>,
    pub time_map: BurstTimeMap,
    pub trace: Vec<StepCounts>,
}

#[derive(Debug, Clone)]
pub struct SequentialExploration<'a> {
    src: &'a RandomSource,
    state: ExplorationState,
    clock: usize,
    tau: Option<usize>,
    bursts: Vec<BurstRecord>,
    map: BurstTimeMap,
    active_sum: i64,
    trace: Vec<StepCounts>,
}

impl<'a> SequentialExploration<'a> {
    pub fn new(src: &'a RandomSource) -> Self {
        let root_label = src.draw_initial();
        let root_hat = src.thinned_resource(root_label).1 as i64;
        let mut run = SequentialExploration {
            src,
            state: ExplorationState::new(src.n(), root_label),
            clock: 0,
            tau: None,
            bursts: Vec::new(),
            map: BurstTimeMap {
                offsets: vec![0],
                s_path: vec![root_hat],
                n_path: vec![1],
                after_burst: Vec::new(),
            },
            active_sum: root_hat,
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
        let accepted = open_accepted(&attempts, |l| self.state.is_informed(l));

        let mut s = *self.map.s_path.last().unwrap();
        let mut n = *self.map.n_path.last().unwrap();
        let mut spent = 0u64;
        for (idx, a) in attempts.iter().enumerate() {
            if !a.open {
                continue;
            }
            spent += 1;
            if accepted.contains(&idx) {
                let child_hat = self.src.thinned_resource(a.label).1 as i64;
                n += 1;
                s += child_hat - 1;
                self.active_sum += child_hat;
            } else {
                s -= 1;
            }
            self.map.s_path.push(s);
            self.map.n_path.push(n);
        }
        self.active_sum -= spent as i64;
        let last = *self.map.offsets.last().unwrap();
        self.map.offsets.push(last + spent);

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
        self.map
            .after_burst
            .push((self.active_sum, self.state.tree_len()));
    }

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

    pub fn state(&self) -> &ExplorationState {
        &self.state
    }

    pub fn finish(mut self) -> CgOutcome {
        while self.step() {}
        CgOutcome {
            tau: self.tau.expect("stopped"),
            final_informed: self.state.tree_len(),
            state: self.state,
            bursts: self.bursts,
            time_map: self.map,
            trace: self.trace,
        }
    }
}

pub fn run_cg_sequential(src: &RandomSource) -> CgOutcome {
    SequentialExploration::new(src).finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::er::run_er_mode1;
    use crate::resource::Law;

    #[test]
    fn zero_resource() {
        let src = RandomSource::new(1, 5, 0.5, Law::constant(0)).unwrap();
        let out = run_cg_sequential(&src);
        assert_eq!(out.tau, 0);
        out.time_map.verify().unwrap();
    }

    #[test]
    fn duplicate_rule_ignores_closed_attempts() {
        let a = |letter, label, open| Attempt {
            letter,
            label,
            open,
        };
        let attempts = [a(1, 4, false), a(2, 4, true), a(3, 5, true), a(4, 5, true)];
        assert_eq!(open_accepted(&attempts, |_| false), vec![1, 2]);
    }

    #[test]
    fn all_open_matches_er_pathwise() {
        let law = Law::from_pmf(vec![(0, 0.2), (1, 0.3), (3, 0.5)]).unwrap();
        for seed in 0..100 {
            let src = RandomSource::new(seed, 25, 1.0, law.clone()).unwrap();
            let er = run_er_mode1(&src);
            let cg = run_cg_sequential(&src);
            assert_eq!(er.tau, cg.tau);
            assert_eq!(er.bursts, cg.bursts);
            assert_eq!(er.state.tree(), cg.state.tree());
        }
    }

    #[test]
    fn time_map_identities() {
        let law = Law::from_pmf(vec![(0, 0.4), (2, 0.2), (5, 0.4)]).unwrap();
        for seed in 0..300 {
            let src = RandomSource::new(seed, 40, 0.5, law.clone()).unwrap();
            let out = run_cg_sequential(&src);
            out.time_map.verify().unwrap();
            assert_eq!(*out.time_map.n_path.last().unwrap(), out.final_informed);
        }
    }
}
