//! Exact law of the final informed count on tiny instances.
//!
//! Each dynamic is written as a plain simulation that asks a [`Chooser`] for
//! every random outcome. The enumerator replays the simulation over all
//! choice sequences (an odometer over the decision tree) and adds up the
//! path weights. The simulations follow the verbal description of each
//! process and share no code with the tree constructions.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::resource::Law;
use crate::scalar::Scalar;

use super::config::Model;

pub const MAX_ORACLE_N: usize = 3;
pub const MAX_ORACLE_RESOURCE: u32 = 2;
pub const DEFAULT_DEPTH_CAP: usize = 64;

/// Source of choices for one replay of a simulation.
pub struct Chooser<T> {
    path: Vec<(usize, usize)>,
    pos: usize,
    weight: T,
    cap: usize,
    overflow: bool,
}

impl<T: Scalar> Chooser<T> {
    /// Picks an outcome among `weights`; zero-weight outcomes are skipped.
    pub fn pick(&mut self, weights: &[T]) -> usize {
        let live: Vec<usize> = (0..weights.len())
            .filter(|&i| !weights[i].is_zero())
            .collect();
        assert!(!live.is_empty(), "choice without positive weight");
        if self.pos >= self.cap {
            self.overflow = true;
            return live[0];
        }
        if self.pos == self.path.len() {
            self.path.push((0, live.len()));
        }
        let idx = live[self.path[self.pos].0];
        self.pos += 1;
        self.weight = self.weight.clone() * weights[idx].clone();
        idx
    }

    pub fn uniform(&mut self, m: usize) -> usize {
        let w = T::one() / T::from_count(m as u64);
        self.pick(&vec![w; m])
    }

    pub fn bernoulli(&mut self, p: &T) -> bool {
        self.pick(&[T::one() - p.clone(), p.clone()]) == 1
    }

    pub fn resource(&mut self, law: &Law<T>) -> u32 {
        law.support()[self.pick(law.probs())]
    }
}

/// Sums path weights of `sim` over every choice sequence.
pub fn enumerate<T: Scalar>(
    cap: usize,
    mut sim: impl FnMut(&mut Chooser<T>) -> usize,
) -> Result<BTreeMap<usize, T>> {
    let mut pmf: BTreeMap<usize, T> = BTreeMap::new();
    let mut path: Vec<(usize, usize)> = Vec::new();
    loop {
        let mut ch = Chooser {
            path,
            pos: 0,
            weight: T::one(),
            cap,
            overflow: false,
        };
        let value = sim(&mut ch);
        if ch.overflow {
            return Err(Error::Infeasible(format!(
                "enumeration needs more than {cap} choices"
            )));
        }
        let entry = pmf.entry(value).or_insert_with(T::zero);
        *entry = entry.clone() + ch.weight;
        path = ch.path;
        path.truncate(ch.pos);
        // advance the odometer
        while let Some(last) = path.last_mut() {
            if last.0 + 1 < last.1 {
                last.0 += 1;
                break;
            }
            path.pop();
        }
        if path.is_empty() {
            return Ok(pmf);
        }
    }
}

/// Complete graph: every informed server, once, sends `K` messages to
/// uniform servers.
fn complete_sim<T: Scalar>(n: usize, law: &Law<T>) -> impl FnMut(&mut Chooser<T>) -> usize + '_ {
    move |ch| {
        let root = ch.uniform(n);
        let mut informed = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(_i) = queue.pop_front() {
            for _ in 0..ch.resource(law) {
                let j = ch.uniform(n);
                if informed.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        informed.len()
    }
}

/// First mode: messages go to uniform servers and pass only over open
/// edges; an edge's status is drawn the first time it is used.
fn er1_sim<'a, T: Scalar>(
    n: usize,
    p: &'a T,
    law: &'a Law<T>,
) -> impl FnMut(&mut Chooser<T>) -> usize + 'a {
    move |ch| {
        let mut edges: HashMap<(usize, usize), bool> = HashMap::new();
        let root = ch.uniform(n);
        let mut informed = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for _ in 0..ch.resource(law) {
                let j = ch.uniform(n);
                let key = (i.min(j), i.max(j));
                let open = match edges.get(&key) {
                    Some(&b) => b,
                    None => {
                        let b = ch.bernoulli(p);
                        edges.insert(key, b);
                        b
                    }
                };
                if open && informed.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        informed.len()
    }
}

/// Second mode: messages go to uniform neighbors; the emitter's incident
/// edges are drawn when it first emits.
fn er2_sim<'a, T: Scalar>(
    n: usize,
    p: &'a T,
    law: &'a Law<T>,
) -> impl FnMut(&mut Chooser<T>) -> usize + 'a {
    move |ch| {
        let mut edges: HashMap<(usize, usize), bool> = HashMap::new();
        let root = ch.uniform(n);
        let mut informed = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let mut nbrs = Vec::new();
            for j in 0..n {
                let key = (i.min(j), i.max(j));
                let open = match edges.get(&key) {
                    Some(&b) => b,
                    None => {
                        let b = ch.bernoulli(p);
                        edges.insert(key, b);
                        b
                    }
                };
                if open {
                    nbrs.push(j);
                }
            }
            let k = ch.resource(law);
            if nbrs.is_empty() {
                continue;
            }
            for _ in 0..k {
                let j = nbrs[ch.uniform(nbrs.len())];
                if informed.insert(j) {
                    queue.push_back(j);
                }
            }
        }
        informed.len()
    }
}

/// Exact pmf of the final informed count of `model`.
///
/// The constructions built on the complete graph with the thinned resource
/// (`cg-seq`, `coupled`) are compared with the chain for `thin(law, p)`;
/// `er2-coupled` with the second-mode dynamics.
pub fn exact_small_distribution<T: Scalar>(
    model: Model,
    n: usize,
    p: &T,
    law: &Law<T>,
    depth_cap: usize,
) -> Result<BTreeMap<usize, T>> {
    if n == 0 || n > MAX_ORACLE_N {
        return Err(Error::Infeasible(format!(
            "oracle needs 1 <= n <= {MAX_ORACLE_N}, got {n}"
        )));
    }
    if law.max_value() > MAX_ORACLE_RESOURCE {
        return Err(Error::Infeasible(format!(
            "oracle needs resource values <= {MAX_ORACLE_RESOURCE}, got {}",
            law.max_value()
        )));
    }
    if *p < T::zero() || *p > T::one() {
        return Err(Error::Config(format!("probability {p:?} outside [0, 1]")));
    }
    let pmf = match model {
        Model::Complete => enumerate(depth_cap, complete_sim(n, law))?,
        Model::CgSeq | Model::Coupled => {
            let thinned = law.thin(p)?;
            enumerate(depth_cap, complete_sim(n, &thinned))?
        }
        Model::Er1 => enumerate(depth_cap, er1_sim(n, p, law))?,
        Model::Er2 | Model::Er2Coupled => enumerate(depth_cap, er2_sim(n, p, law))?,
    };
    Ok(pmf)
}

pub fn pmf_to_f64<T: Scalar>(pmf: &BTreeMap<usize, T>) -> BTreeMap<usize, f64> {
    pmf.iter()
        .map(|(&k, v)| (k, v.to_f64().unwrap_or(f64::NAN)))
        .collect()
}
