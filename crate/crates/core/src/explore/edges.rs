//! Edge statuses revealed by a mode-1 run and their completion.

use std::collections::{BTreeMap, HashMap};

use crate::rng::{Label, RandomSource};

use super::er::{BurstRecord, ErOutcome};
use super::state::burst_attempts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeStatus {
    Open,
    Closed,
    Unknown,
}

impl EdgeStatus {
    pub fn from_bit(open: bool) -> Self {
        if open {
            EdgeStatus::Open
        } else {
            EdgeStatus::Closed
        }
    }
}

/// First appearance of an edge: burst clock `t(e)` and attempt index `l(e)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub t: usize,
    pub letter: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeEntry {
    pub open: bool,
    pub provenance: Option<Provenance>,
}

/// Statuses of unordered pairs `<i,j>` (self-pairs included).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeStatusTable {
    n: usize,
    entries: BTreeMap<(Label, Label), EdgeEntry>,
}

pub fn edge_key(i: Label, j: Label) -> (Label, Label) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

impl EdgeStatusTable {
    pub fn new(n: usize) -> Self {
        EdgeStatusTable {
            n,
            entries: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn status(&self, i: Label, j: Label) -> EdgeStatus {
        match self.entries.get(&edge_key(i, j)) {
            Some(e) => EdgeStatus::from_bit(e.open),
            None => EdgeStatus::Unknown,
        }
    }

    pub fn entry(&self, i: Label, j: Label) -> Option<&EdgeEntry> {
        self.entries.get(&edge_key(i, j))
    }

    /// Fixes the status of `<i,j>` unless it is already known. Returns whether
    /// the entry was new.
    pub fn set_once(
        &mut self,
        i: Label,
        j: Label,
        open: bool,
        provenance: Option<Provenance>,
    ) -> bool {
        let key = edge_key(i, j);
        if self.entries.contains_key(&key) {
            return false;
        }
        self.entries.insert(key, EdgeEntry { open, provenance });
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Label, Label), &EdgeEntry)> {
        self.entries.iter().map(|(&k, e)| (k, e))
    }

    pub fn open_count(&self) -> usize {
        self.entries.values().filter(|e| e.open).count()
    }

    /// Edges that appeared during the bursts, with the mark of their first use.
    pub fn from_bursts(n: usize, bursts: &[BurstRecord]) -> Self {
        let mut table = EdgeStatusTable::new(n);
        for b in bursts {
            for a in &b.attempts {
                table.set_once(
                    b.label,
                    a.label,
                    a.open,
                    Some(Provenance {
                        t: b.t,
                        letter: a.letter,
                    }),
                );
            }
        }
        table
    }
}

/// Completes the appeared edges with the fill-in family: `<i,j>`, `i <= j`,
/// gets `B^i_{-j}` when it never appeared.
pub fn edge_status_total(outcome: &ErOutcome, src: &RandomSource) -> EdgeStatusTable {
    let n = src.n();
    let mut table = EdgeStatusTable::from_bursts(n, &outcome.bursts);
    for i in 1..=n {
        for j in i..=n {
            table.set_once(i, j, src.bernoulli(i, -(j as i64)), None);
        }
    }
    table
}

/// `M(i)`: number of labels hit first over a closed mark and later over an
/// open one within the attempts of server `i`.
pub fn mismatch_count(src: &RandomSource, i: Label) -> u32 {
    let attempts = burst_attempts(src, i, src.resource(i));
    let mut first_closed: HashMap<Label, u32> = HashMap::new();
    let mut last_open: HashMap<Label, u32> = HashMap::new();
    for a in &attempts {
        if a.open {
            last_open.insert(a.label, a.letter);
        } else {
            first_closed.entry(a.label).or_insert(a.letter);
        }
    }
    first_closed
        .iter()
        .filter(|(j, &k1)| last_open.get(j).is_some_and(|&k2| k1 < k2))
        .count() as u32
}

/// `Y = sum M(i)` over the given servers (each counted once).
pub fn mismatch_bound(src: &RandomSource, servers: impl IntoIterator<Item = Label>) -> u64 {
    let mut seen = std::collections::BTreeSet::new();
    servers
        .into_iter()
        .filter(|&i| seen.insert(i))
        .map(|i| mismatch_count(src, i) as u64)
        .sum()
}
