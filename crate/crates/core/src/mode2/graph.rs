//! Sampled Erdős–Rényi graphs with self-loops.

use crate::rng::{Label, RandomSource};

/// Symmetric open/closed table over unordered pairs, self-pairs included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    bits: Vec<bool>,
    neighbors: Vec<Vec<Label>>,
}

fn pair_index(n: usize, i: Label, j: Label) -> usize {
    let (a, b) = if i <= j {
        (i - 1, j - 1)
    } else {
        (j - 1, i - 1)
    };
    // rows a = 0..n of the upper triangle, diagonal included
    a * n - a * (a + 1) / 2 + a + (b - a)
}

impl Adjacency {
    /// Builds the table from `open(i, j)` evaluated once per pair `i <= j`.
    pub fn from_fn(n: usize, mut open: impl FnMut(Label, Label) -> bool) -> Self {
        let mut bits = vec![false; n * (n + 1) / 2];
        let mut neighbors = vec![Vec::new(); n + 1];
        for i in 1..=n {
            for j in i..=n {
                if open(i, j) {
                    bits[pair_index(n, i, j)] = true;
                    neighbors[i].push(j);
                    if i != j {
                        neighbors[j].push(i);
                    }
                }
            }
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Adjacency { n, bits, neighbors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_open(&self, i: Label, j: Label) -> bool {
        self.bits[pair_index(self.n, i, j)]
    }

    /// Sorted neighbors of `i`, `i` itself included when its loop is open.
    pub fn neighbors(&self, i: Label) -> &[Label] {
        &self.neighbors[i]
    }

    pub fn open_pairs(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn pair_count(&self) -> usize {
        self.bits.len()
    }
}

/// Pair `<i,j>`, `i <= j`, is open iff `B^i_{-j} = 1`.
pub fn sample_er_graph(src: &RandomSource) -> Adjacency {
    Adjacency::from_fn(src.n(), |i, j| src.bernoulli(i, -(j as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resource::Law;

    #[test]
    fn pair_indices_are_a_bijection() {
        let n = 7;
        let mut seen = vec![false; n * (n + 1) / 2];
        for i in 1..=n {
            for j in i..=n {
                let idx = pair_index(n, i, j);
                assert!(!seen[idx]);
                seen[idx] = true;
                assert_eq!(idx, pair_index(n, j, i));
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn extremes() {
        let empty = sample_er_graph(&RandomSource::new(1, 6, 0.0, Law::constant(1)).unwrap());
        assert_eq!(empty.open_pairs(), 0);
        let full = sample_er_graph(&RandomSource::new(1, 6, 1.0, Law::constant(1)).unwrap());
        assert_eq!(full.open_pairs(), 21);
        assert_eq!(full.neighbors(3), &[1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn neighbor_lists_match_bits() {
        let g = sample_er_graph(&RandomSource::new(8, 20, 0.3, Law::constant(1)).unwrap());
        for i in 1..=20 {
            for j in 1..=20 {
                assert_eq!(g.is_open(i, j), g.neighbors(i).contains(&j));
                assert_eq!(g.is_open(i, j), g.is_open(j, i));
            }
        }
    }
}
