//! Second emission mode simulated on a sampled graph.
//!
//! Each informed server, in order of discovery, sends its `K_i` units to
//! neighbors picked uniformly with replacement. A server without neighbors
//! wastes its resource.

use std::collections::VecDeque;

use crate::rng::{Address, Family, Label, RandomSource};

use super::graph::{sample_er_graph, Adjacency};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectOutcome {
    /// Number of bursts minus one.
    pub tau: usize,
    pub final_informed: usize,
    /// Informed servers in discovery order.
    pub informed: Vec<Label>,
}

pub fn run_mode2_on(graph: &Adjacency, src: &RandomSource) -> DirectOutcome {
    let mut seen = vec![false; graph.n() + 1];
    let root = src.draw_initial();
    seen[root] = true;
    let mut informed = vec![root];
    let mut queue = VecDeque::from([root]);
    let mut bursts = 0;
    while let Some(i) = queue.pop_front() {
        bursts += 1;
        let nbrs = graph.neighbors(i);
        if nbrs.is_empty() {
            continue;
        }
        for k in 1..=src.resource(i) as i64 {
            let j = nbrs
                [src.uniform_index(Address::new(Family::NeighborPick, i as u64, k), nbrs.len())];
            if !seen[j] {
                seen[j] = true;
                informed.push(j);
                queue.push_back(j);
            }
        }
    }
    DirectOutcome {
        tau: bursts - 1,
        final_informed: informed.len(),
        informed,
    }
}

pub fn run_mode2_direct(src: &RandomSource) -> DirectOutcome {
    run_mode2_on(&sample_er_graph(src), src)
}
