use std::collections::{BTreeSet, HashMap};

use crate::rng::{Label, RandomSource};

use super::word::Word;

/// One attempt of a burst: the child letter, its target label and the
/// Bernoulli mark of the attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Attempt {
    pub letter: u32,
    pub label: Label,
    pub open: bool,
}

/// Attempts `1..=count` of server `emitter`.
pub fn burst_attempts(src: &RandomSource, emitter: Label, count: u32) -> Vec<Attempt> {
    (1..=count)
        .map(|l| Attempt {
            letter: l,
            label: src.target(emitter, l as u64),
            open: src.bernoulli(emitter, l as i64),
        })
        .collect()
}

/// Per-step cardinalities written to trace files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCounts {
    pub t: usize,
    pub card_tree: usize,
    pub card_active: usize,
    pub card_delayed: usize,
    pub card_exhausted: usize,
}

/// A labelled tree partitioned into active, exhausted and delayed words.
#[derive(Debug, Clone)]
pub struct ExplorationState {
    labels: HashMap<Word, Label>,
    active: BTreeSet<Word>,
    exhausted: BTreeSet<Word>,
    delayed: BTreeSet<Word>,
    informed: Vec<bool>,
    frontier: Word,
}

impl ExplorationState {
    /// Tree `{ø}` with `ø` active and labelled `root_label`.
    pub fn new(n: usize, root_label: Label) -> Self {
        let mut informed = vec![false; n + 1];
        informed[root_label] = true;
        let root = Word::root();
        ExplorationState {
            labels: HashMap::from([(root.clone(), root_label)]),
            active: BTreeSet::from([root.clone()]),
            exhausted: BTreeSet::new(),
            delayed: BTreeSet::new(),
            informed,
            frontier: root,
        }
    }

    pub fn label(&self, w: &Word) -> Option<Label> {
        self.labels.get(w).copied()
    }

    pub fn active(&self) -> &BTreeSet<Word> {
        &self.active
    }

    pub fn exhausted(&self) -> &BTreeSet<Word> {
        &self.exhausted
    }

    pub fn delayed(&self) -> &BTreeSet<Word> {
        &self.delayed
    }

    pub fn frontier(&self) -> &Word {
        &self.frontier
    }

    pub fn is_informed(&self, label: Label) -> bool {
        self.informed[label]
    }

    pub fn tree_len(&self) -> usize {
        self.active.len() + self.exhausted.len() + self.delayed.len()
    }

    pub fn tree(&self) -> BTreeSet<Word> {
        self.active
            .iter()
            .chain(&self.exhausted)
            .chain(&self.delayed)
            .cloned()
            .collect()
    }

    pub fn tree_labels(&self) -> BTreeSet<Label> {
        self.labels_of(
            self.active
                .iter()
                .chain(&self.exhausted)
                .chain(&self.delayed),
        )
    }

    pub fn labels_of<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> BTreeSet<Label> {
        words.into_iter().map(|w| self.labels[w]).collect()
    }

    pub(crate) fn take_least_active(&mut self) -> Option<Word> {
        let v = self.active.pop_first()?;
        self.frontier = v.clone();
        Some(v)
    }

    pub(crate) fn take_least_delayed(&mut self) -> Option<Word> {
        let v = self.delayed.pop_first()?;
        self.frontier = v.clone();
        Some(v)
    }

    pub(crate) fn remove_active(&mut self, w: &Word) -> bool {
        if self.active.remove(w) {
            self.frontier = w.clone();
            true
        } else {
            false
        }
    }

    pub(crate) fn exhaust(&mut self, w: Word) {
        self.exhausted.insert(w);
    }

    pub(crate) fn add_active(&mut self, w: Word, label: Label) {
        self.informed[label] = true;
        self.labels.insert(w.clone(), label);
        self.active.insert(w);
    }

    pub(crate) fn add_delayed(&mut self, w: Word, label: Label) {
        self.informed[label] = true;
        self.labels.insert(w.clone(), label);
        self.delayed.insert(w);
    }

    /// Drops a delayed word whose label now lives elsewhere in the tree.
    pub(crate) fn forget_delayed(&mut self, w: &Word) {
        self.delayed.remove(w);
        self.labels.remove(w);
    }

    pub fn counts(&self, t: usize) -> StepCounts {
        StepCounts {
            t,
            card_tree: self.tree_len(),
            card_active: self.active.len(),
            card_delayed: self.delayed.len(),
            card_exhausted: self.exhausted.len(),
        }
    }

    /// Structural checks: disjoint partition, prefix closure, injective labels
    /// and informed flags matching the tree's labels.
    pub fn check_structure(&self) -> Result<(), String> {
        let total = self.tree_len();
        let tree = self.tree();
        if tree.len() != total {
            return Err("active, exhausted and delayed sets overlap".into());
        }
        if !tree.contains(&Word::root()) {
            return Err("root missing from tree".into());
        }
        for w in &tree {
            if let Some(parent) = w.parent() {
                if !tree.contains(&parent) {
                    return Err(format!("parent of {w} unknown"));
                }
            }
        }
        let labels = self.tree_labels();
        if labels.len() != total {
            return Err("labels not injective on the tree".into());
        }
        let flagged = self.informed.iter().filter(|&&b| b).count();
        if flagged != total || labels.iter().any(|&l| !self.informed[l]) {
            return Err("informed flags disagree with tree labels".into());
        }
        Ok(())
    }
}
