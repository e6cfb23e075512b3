//! The complete-graph chain `(S, N)`: `S` counts the emission attempts still
//! available, `N` the informed servers, one emission per time unit.
//!
//! From `(s, m)` the next emission hits an informed server with probability
//! `m / n` (giving `(s - 1, m)`); otherwise the target joins with a fresh
//! resource `k` (giving `(s + k - 1, m + 1)`). The chain is absorbed when
//! `s = 0`.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::resource::Law;
use crate::rng::{Address, Family, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainState {
    pub s: u64,
    pub n_informed: usize,
    pub time: u64,
}

impl ChainState {
    pub fn is_absorbed(&self) -> bool {
        self.s == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainRun {
    pub absorption_time: u64,
    pub final_informed: usize,
    /// Total resource owned by the servers informed during the run.
    pub resource_drawn: u64,
    pub trace: Option<Vec<ChainState>>,
}

pub fn init_chain(n: usize, law: &Law<f64>, src: &RandomSource) -> Result<ChainState> {
    if n == 0 {
        return Err(Error::Config("population size must be at least 1".into()));
    }
    let s = law.sample(src.uniform(Address::new(Family::ChainResource, 0, 0))) as u64;
    Ok(ChainState {
        s,
        n_informed: 1,
        time: 0,
    })
}

/// One emission. Stepping an absorbed state is an error.
pub fn step_chain(
    state: ChainState,
    n: usize,
    law: &Law<f64>,
    src: &RandomSource,
) -> Result<ChainState> {
    step_with_draw(state, n, law, src).map(|(next, _)| next)
}

fn step_with_draw(
    state: ChainState,
    n: usize,
    law: &Law<f64>,
    src: &RandomSource,
) -> Result<(ChainState, Option<u32>)> {
    if state.is_absorbed() {
        return Err(Error::Domain("cannot step an absorbed chain".into()));
    }
    let time = state.time + 1;
    let target = src.uniform_index(Address::new(Family::ChainBranch, 0, time as i64), n) + 1;
    if target <= state.n_informed {
        return Ok((
            ChainState {
                s: state.s - 1,
                n_informed: state.n_informed,
                time,
            },
            None,
        ));
    }
    let k = law.sample(src.uniform(Address::new(Family::ChainResource, 0, time as i64)));
    let next = ChainState {
        s: state.s + k as u64 - 1,
        n_informed: state.n_informed + 1,
        time,
    };
    Ok((next, Some(k)))
}

/// Runs the chain to absorption.
pub fn run_chain(n: usize, law: &Law<f64>, src: &RandomSource, trace: bool) -> Result<ChainRun> {
    let mut state = init_chain(n, law, src)?;
    let mut resource_drawn = state.s;
    let mut states = trace.then(|| vec![state]);
    while !state.is_absorbed() {
        let (next, drawn) = step_with_draw(state, n, law, src)?;
        resource_drawn += drawn.unwrap_or(0) as u64;
        state = next;
        if let Some(states) = states.as_mut() {
            states.push(state);
        }
    }
    Ok(ChainRun {
        absorption_time: state.time,
        final_informed: state.n_informed,
        resource_drawn,
        trace: states,
    })
}

/// Writes a trace as CSV rows `time,s,n_informed`.
pub fn write_trace<W: Write>(out: &mut W, trace: &[ChainState]) -> io::Result<()> {
    writeln!(out, "time,s,n_informed")?;
    for st in trace {
        writeln!(out, "{},{},{}", st.time, st.s, st.n_informed)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn src(seed: u64, n: usize) -> RandomSource {
        RandomSource::new(seed, n, 1.0, Law::constant(1)).unwrap()
    }

    #[test]
    fn zero_resource_absorbs_immediately() {
        let run = run_chain(5, &Law::constant(0), &src(1, 5), false).unwrap();
        assert_eq!((run.absorption_time, run.final_informed), (0, 1));
        let st = init_chain(5, &Law::constant(0), &src(1, 5)).unwrap();
        assert!(matches!(
            step_chain(st, 5, &Law::constant(0), &src(1, 5)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn initial_state() {
        let st = init_chain(7, &Law::constant(2), &src(3, 7)).unwrap();
        assert_eq!(
            st,
            ChainState {
                s: 2,
                n_informed: 1,
                time: 0
            }
        );
        assert!(init_chain(0, &Law::constant(2), &src(3, 7)).is_err());
    }

    #[test]
    fn single_server_self_targets() {
        let run = run_chain(1, &Law::constant(1), &src(9, 1), false).unwrap();
        assert_eq!((run.absorption_time, run.final_informed), (1, 1));
    }

    #[test]
    fn fully_informed_only_decrements() {
        let law = Law::constant(3);
        for seed in 0..50 {
            let st = ChainState {
                s: 4,
                n_informed: 6,
                time: 10,
            };
            let next = step_chain(st, 6, &law, &src(seed, 6)).unwrap();
            assert_eq!(
                next,
                ChainState {
                    s: 3,
                    n_informed: 6,
                    time: 11
                }
            );
        }
    }

    #[test]
    fn zero_resource_always_decrements() {
        let law = Law::constant(0);
        for seed in 0..50 {
            let st = ChainState {
                s: 3,
                n_informed: 1,
                time: 0,
            };
            assert_eq!(step_chain(st, 2, &law, &src(seed, 2)).unwrap().s, 2);
        }
    }

    #[test]
    fn traced_runs_conserve_resource() {
        let law = Law::from_pmf(vec![(0, 0.3), (2, 0.3), (5, 0.4)]).unwrap();
        for seed in 0..200 {
            let run = run_chain(40, &law, &src(seed, 40), true).unwrap();
            let trace = run.trace.unwrap();
            let mut consumed = trace[0].s;
            for w in trace.windows(2) {
                let dn = w[1].n_informed - w[0].n_informed;
                assert!(dn <= 1 && w[1].n_informed <= 40);
                assert_eq!(w[1].time, w[0].time + 1);
                if dn == 0 {
                    assert_eq!(w[1].s + 1, w[0].s);
                } else {
                    consumed += w[1].s + 1 - w[0].s;
                }
            }
            assert_eq!(consumed, run.absorption_time);
            assert_eq!(run.resource_drawn, run.absorption_time);
            assert_eq!(trace.last().unwrap().s, 0);
            assert!(trace[..trace.len() - 1].iter().all(|s| s.s > 0));
        }
    }

    #[test]
    fn trace_csv() {
        let run = run_chain(3, &Law::constant(1), &src(2, 3), true).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, run.trace.as_ref().unwrap()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,s,n_informed\n0,1,1\n"));
    }
}
