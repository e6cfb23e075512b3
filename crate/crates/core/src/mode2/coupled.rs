//! Joint construction of the second-mode process on the Erdős–Rényi graph
//! and the process on the complete graph.
//!
//! Edge statuses are revealed lazily: the first attempt of a burst over an
//! unknown edge fixes it to its own mark. Attempts whose mark disagrees with
//! a fixed status are incompatibilities; they are delayed and replayed
//! separately on each side once the shared active set is empty.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::explore::{edge_key, Word};
use crate::rng::{Label, RandomSource};

/// Draw budget of a single edge scan.
pub const SCAN_CAP: u64 = 100_000_000;

/// Edge statuses `0`, `1` or unknown (absent).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TriStateEdges {
    n: usize,
    status: HashMap<(Label, Label), bool>,
    closed_degree: Vec<usize>,
}

impl TriStateEdges {
    pub fn new(n: usize) -> Self {
        TriStateEdges {
            n,
            status: HashMap::new(),
            closed_degree: vec![0; n + 1],
        }
    }

    pub fn get(&self, i: Label, j: Label) -> Option<bool> {
        self.status.get(&edge_key(i, j)).copied()
    }

    /// Status of `<i,j>`, fixing it to `bit` when still unknown.
    pub fn reveal(&mut self, i: Label, j: Label, bit: bool) -> bool {
        let key = edge_key(i, j);
        if let Some(&s) = self.status.get(&key) {
            return s;
        }
        self.status.insert(key, bit);
        if !bit {
            self.closed_degree[i] += 1;
            if i != j {
                self.closed_degree[j] += 1;
            }
        }
        bit
    }

    /// All `n` edges at `i` are known to be closed.
    pub fn isolated(&self, i: Label) -> bool {
        self.closed_degree[i] == self.n
    }

    pub fn known(&self) -> usize {
        self.status.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Label, Label), bool)> + '_ {
        self.status.iter().map(|(&k, &b)| (k, b))
    }
}

/// Everything revealed by one joint burst.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointRecord {
    pub t: usize,
    pub emitter: Word,
    pub label: Label,
    pub k: u32,
    pub t_i: u64,
    pub t_prime: u64,
    pub targets: Vec<Label>,
    pub marks: Vec<bool>,
    /// Edge status of each attempt once the burst is done.
    pub statuses: Vec<bool>,
    /// Attempt indices (from 1) with status 0 and mark 1.
    pub inc0: Vec<u64>,
    /// Attempt indices with status 1 and mark 0.
    pub inc1: Vec<u64>,
    pub m: usize,
}

/// Row of the joint trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointStep {
    pub t: usize,
    pub card_active: usize,
    pub card_d_er: usize,
    pub card_d_cg: usize,
    pub card_inc0: usize,
    pub card_inc1: usize,
    pub m: usize,
}

#[derive(Debug, Clone)]
pub struct JointOutcome {
    pub tilde_tau: usize,
    pub tau_cg: usize,
    pub tau_bar_er: usize,
    pub cg_informed: usize,
    pub er_informed: usize,
    pub cg_labels: BTreeSet<Label>,
    pub er_labels: BTreeSet<Label>,
    pub records: Vec<JointRecord>,
    pub trace: Vec<JointStep>,
    pub edges: TriStateEdges,
}

/// Delayed ER emissions of burst `s`, waiting to be recast.
#[derive(Debug, Clone)]
struct Pending {
    emitter: Word,
    label: Label,
    t_i: u64,
    m: usize,
}

struct Joint<'a> {
    src: &'a RandomSource,
    edges: TriStateEdges,
    labels: HashMap<Word, Label>,
    active: BTreeSet<Word>,
    exhausted: BTreeSet<Word>,
    /// Labels of `E ∪ A` during the joint phase.
    shared: Vec<bool>,
    d_cg: BTreeSet<Word>,
    pending: BTreeMap<usize, Pending>,
    records: Vec<JointRecord>,
    trace: Vec<JointStep>,
}

/// `T_i`: index of the `K_i`-th open mark, 0 when no attempt is made.
fn burst_length(src: &RandomSource, i: Label, k: u32) -> Result<u64> {
    if k == 0 || src.p() == 0.0 {
        return Ok(0);
    }
    let mut seen = 0;
    let mut l = 0u64;
    while seen < k {
        l += 1;
        if l > SCAN_CAP {
            return Err(Error::ScanCap {
                server: i,
                cap: SCAN_CAP,
            });
        }
        if src.bernoulli(i, l as i64) {
            seen += 1;
        }
    }
    Ok(l)
}

/// First `want` attempts `k >= start` of `i` over edges present in the graph,
/// revealing every unknown edge met on the way.
fn scan_present(
    src: &RandomSource,
    edges: &mut TriStateEdges,
    i: Label,
    start: u64,
    want: usize,
) -> Result<Vec<(u64, Label)>> {
    let mut found = Vec::with_capacity(want);
    if src.p() == 0.0 {
        return Ok(found);
    }
    let mut k = start;
    while found.len() < want && !edges.isolated(i) {
        if k - start >= SCAN_CAP {
            return Err(Error::ScanCap {
                server: i,
                cap: SCAN_CAP,
            });
        }
        let j = src.target(i, k);
        if edges.reveal(i, j, src.bernoulli(i, k as i64)) {
            found.push((k, j));
        }
        k += 1;
    }
    Ok(found)
}

impl<'a> Joint<'a> {
    fn card_d_er(&self) -> usize {
        self.pending.values().map(|p| p.m).sum()
    }

    fn burst(&mut self, t: usize) -> Result<()> {
        let v = self
            .active
            .pop_first()
            .expect("joint burst needs an active word");
        let i = self.labels[&v];
        let k = self.src.resource(i);
        let t_i = burst_length(self.src, i, k)?;

        let targets: Vec<Label> = (1..=t_i).map(|l| self.src.target(i, l)).collect();
        let marks: Vec<bool> = (1..=t_i).map(|l| self.src.bernoulli(i, l as i64)).collect();
        let statuses: Vec<bool> = targets
            .iter()
            .zip(&marks)
            .map(|(&j, &b)| self.edges.reveal(i, j, b))
            .collect();

        let mut inc0 = Vec::new();
        let mut inc1 = Vec::new();
        for l in 0..t_i as usize {
            match (statuses[l], marks[l]) {
                (false, true) => inc0.push(l as u64 + 1),
                (true, false) => inc1.push(l as u64 + 1),
                _ => {}
            }
        }
        let m = inc0.len().saturating_sub(inc1.len());

        // ER side uses one unit per attempt over a present edge
        let mut used = 0u64;
        let mut t_prime = 0u64;
        for (l, &present) in statuses.iter().enumerate().take(t_i as usize) {
            if present {
                used += 1;
            }
            if used > k as u64 {
                break;
            }
            t_prime = l as u64 + 1;
        }

        self.exhausted.insert(v.clone());
        let mut first_open = BTreeSet::new();
        for l in 0..t_i as usize {
            let letter = l as u32 + 1;
            let j = targets[l];
            if !marks[l] {
                continue;
            }
            let fresh_open = first_open.insert(j);
            if !statuses[l] || letter as u64 > t_prime {
                self.d_cg.insert(v.child(letter));
                self.labels.insert(v.child(letter), j);
            } else if fresh_open && !self.shared[j] {
                self.shared[j] = true;
                self.active.insert(v.child(letter));
                self.labels.insert(v.child(letter), j);
            }
        }
        if m > 0 {
            self.pending.insert(
                t,
                Pending {
                    emitter: v.clone(),
                    label: i,
                    t_i,
                    m,
                },
            );
        }

        self.trace.push(JointStep {
            t,
            card_active: self.active.len(),
            card_d_er: self.card_d_er(),
            card_d_cg: self.d_cg.len(),
            card_inc0: inc0.len(),
            card_inc1: inc1.len(),
            m,
        });
        self.records.push(JointRecord {
            t,
            emitter: v,
            label: i,
            k,
            t_i,
            t_prime,
            targets,
            marks,
            statuses,
            inc0,
            inc1,
            m,
        });
        Ok(())
    }

    /// Phase (i): complete-graph continuation. Returns the stop time and the
    /// informed labels.
    fn drain_cg(&self, tilde_tau: usize) -> Result<(usize, BTreeSet<Label>)> {
        let mut informed: BTreeSet<Label> = self.exhausted.iter().map(|w| self.labels[w]).collect();
        let mut d = self.d_cg.clone();
        let mut labels: HashMap<Word, Label> =
            d.iter().map(|w| (w.clone(), self.labels[w])).collect();
        let mut clock = tilde_tau;
        while let Some(v) = d.pop_first() {
            clock += 1;
            let i = labels.remove(&v).expect("labelled");
            if !informed.insert(i) {
                continue;
            }
            let k = self.src.resource(i);
            let mut seen = 0;
            let mut l = 0u64;
            while seen < k {
                l += 1;
                if l > SCAN_CAP {
                    return Err(Error::ScanCap {
                        server: i,
                        cap: SCAN_CAP,
                    });
                }
                if self.src.bernoulli(i, l as i64) {
                    seen += 1;
                    let w = v.child(l as u32);
                    labels.insert(w.clone(), self.src.target(i, l));
                    d.insert(w);
                }
            }
        }
        Ok((clock, informed))
    }

    /// Phase (ii): recast the delayed ER emissions, then continue the
    /// delayed servers. Returns the stop time and the informed labels.
    fn drain_er(&mut self, tilde_tau: usize) -> Result<(usize, BTreeSet<Label>)> {
        let mut informed: BTreeSet<Label> = self.exhausted.iter().map(|w| self.labels[w]).collect();
        let mut regular: BTreeSet<Word> = BTreeSet::new();
        let mut labels: HashMap<Word, Label> = HashMap::new();
        let mut clock = tilde_tau;
        let pending = std::mem::take(&mut self.pending);
        for p in pending.into_values() {
            clock += 1;
            for (k, j) in scan_present(self.src, &mut self.edges, p.label, p.t_i + 1, p.m)? {
                let w = p.emitter.child(k as u32);
                labels.insert(w.clone(), j);
                regular.insert(w);
            }
        }
        while let Some(v) = regular.pop_first() {
            clock += 1;
            let i = labels.remove(&v).expect("labelled");
            if !informed.insert(i) {
                continue;
            }
            let k = self.src.resource(i) as usize;
            for (l, j) in scan_present(self.src, &mut self.edges, i, 1, k)? {
                let w = v.child(l as u32);
                labels.insert(w.clone(), j);
                regular.insert(w);
            }
        }
        Ok((clock, informed))
    }
}

/// Word children are addressed by `u32` letters.
fn check_letters(src: &RandomSource) -> Result<()> {
    if src.law().max_value() as u64 > u32::MAX as u64 {
        return Err(Error::Config("resource values must fit in 32 bits".into()));
    }
    Ok(())
}

pub fn run_mode2_coupled(src: &RandomSource) -> Result<JointOutcome> {
    check_letters(src)?;
    let n = src.n();
    let root_label = src.draw_initial();
    let mut shared = vec![false; n + 1];
    shared[root_label] = true;
    let mut joint = Joint {
        src,
        edges: TriStateEdges::new(n),
        labels: HashMap::from([(Word::root(), root_label)]),
        active: BTreeSet::from([Word::root()]),
        exhausted: BTreeSet::new(),
        shared,
        d_cg: BTreeSet::new(),
        pending: BTreeMap::new(),
        records: Vec::new(),
        trace: Vec::new(),
    };
    let mut t = 0;
    joint.burst(t)?;
    while !joint.active.is_empty() {
        t += 1;
        joint.burst(t)?;
    }
    let tilde_tau = t;
    let (tau_cg, cg_labels) = joint.drain_cg(tilde_tau)?;
    let (tau_bar_er, er_labels) = joint.drain_er(tilde_tau)?;
    Ok(JointOutcome {
        tilde_tau,
        tau_cg,
        tau_bar_er,
        cg_informed: cg_labels.len(),
        er_informed: er_labels.len(),
        cg_labels,
        er_labels,
        records: joint.records,
        trace: joint.trace,
        edges: joint.edges,
    })
}

/// Writes `t,card_active,card_d_er,card_d_cg,card_inc0,card_inc1,m` rows.
pub fn write_joint_trace<W: std::io::Write>(
    mut out: W,
    trace: &[JointStep],
) -> std::io::Result<()> {
    writeln!(
        out,
        "t,card_active,card_d_er,card_d_cg,card_inc0,card_inc1,m"
    )?;
    for s in trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t, s.card_active, s.card_d_er, s.card_d_cg, s.card_inc0, s.card_inc1, s.m
        )?;
    }
    Ok(())
}

/// Per-burst incompatibility summary: `(|Inc0|, |Inc1|, m, T')`.
pub fn incompatibility_trace(outcome: &JointOutcome) -> Vec<(usize, usize, usize, u64)> {
    outcome
        .records
        .iter()
        .map(|r| (r.inc0.len(), r.inc1.len(), r.m, r.t_prime))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::Law;

    #[test]
    fn zero_resource() {
        let src = RandomSource::new(1, 10, 0.5, Law::constant(0)).unwrap();
        let out = run_mode2_coupled(&src).unwrap();
        assert_eq!((out.tilde_tau, out.tau_cg, out.tau_bar_er), (0, 0, 0));
        assert_eq!((out.cg_informed, out.er_informed), (1, 1));
    }

    #[test]
    fn all_open_collapses() {
        for seed in 0..100 {
            let src = RandomSource::new(seed, 20, 1.0, Law::constant(2)).unwrap();
            let out = run_mode2_coupled(&src).unwrap();
            assert_eq!(out.tilde_tau, out.tau_cg);
            assert_eq!(out.tilde_tau, out.tau_bar_er);
            assert_eq!(out.cg_labels, out.er_labels);
            assert!(incompatibility_trace(&out)
                .iter()
                .all(|&(a, b, m, _)| a + b + m == 0));
        }
    }

    #[test]
    fn closed_graph_informs_nobody_else() {
        let src = RandomSource::new(4, 10, 0.0, Law::constant(3)).unwrap();
        let out = run_mode2_coupled(&src).unwrap();
        assert_eq!((out.er_informed, out.cg_informed), (1, 1));
    }

    #[test]
    fn reveal_is_set_once() {
        let mut e = TriStateEdges::new(2);
        assert!(!e.reveal(1, 2, false));
        assert!(!e.reveal(2, 1, true));
        assert!(!e.reveal(1, 1, false));
        assert!(e.isolated(1));
        assert!(!e.isolated(2));
    }

    #[test]
    fn records_are_consistent() {
        let law = Law::from_pmf(vec![(1, 0.5), (3, 0.5)]).unwrap();
        for seed in 0..300 {
            let src = RandomSource::new(seed, 6, 0.5, law.clone()).unwrap();
            let out = run_mode2_coupled(&src).unwrap();
            for r in &out.records {
                // statuses never change after the burst that fixed them
                for (l, &j) in r.targets.iter().enumerate() {
                    assert_eq!(out.edges.get(r.label, j), Some(r.statuses[l]));
                }
                let used = r.statuses[..r.t_prime as usize]
                    .iter()
                    .filter(|&&s| s)
                    .count();
                assert!(used <= r.k as usize);
                assert_eq!(r.m, r.inc0.len().saturating_sub(r.inc1.len()));
            }
            assert!(out.tau_cg >= out.tilde_tau && out.tau_bar_er >= out.tilde_tau);
        }
    }
}
