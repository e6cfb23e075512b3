//! Addressable random elements.
//!
//! Every random variable used by the constructions is identified by an
//! [`Address`] and computed by hashing `(master_seed, family, i, k)`. Nothing
//! is consumed from a stream, so constructions that read the same variables
//! in different orders observe identical values.

use crate::error::{Error, Result};
use crate::resource::Law;

/// Server label, `1..=n`.
pub type Label = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `K_i`.
    Resource,
    /// `I^i_k`, uniform target of attempt `k` of server `i`.
    Target,
    /// `B^i_k` for `k >= 1`; `k <= -1` addresses the fill-in family.
    Bernoulli,
    /// `I_0`.
    Initial,
    /// Branch uniforms of the complete-graph chain, `k` = step.
    ChainBranch,
    /// Resource draws of the complete-graph chain, `k` = step (0 = initial).
    ChainResource,
    /// Neighbor choices of the direct second-mode simulator.
    NeighborPick,
}

impl Family {
    fn tag(self) -> u64 {
        match self {
            Family::Resource => 0x52_45_53,
            Family::Target => 0x54_41_52,
            Family::Bernoulli => 0x42_45_52,
            Family::Initial => 0x49_4e_49,
            Family::ChainBranch => 0x43_42_52,
            Family::ChainResource => 0x43_52_45,
            Family::NeighborPick => 0x4e_42_52,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Address {
    pub family: Family,
    pub i: u64,
    pub k: i64,
}

impl Address {
    pub fn new(family: Family, i: u64, k: i64) -> Self {
        Address { family, i, k }
    }
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of replica `index` from a base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(mix64(base ^ 0x5eed_5eed_5eed_5eed).wrapping_add(index.wrapping_mul(GOLDEN)))
}

/// Read-only source of the independent families `K_i`, `I_0`, `I^i_k`,
/// `B^i_k` (plus the fill-in family `B^i_{-k}`) derived from one seed.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    n: usize,
    p: f64,
    law: Law<f64>,
    key: u64,
    // Bernoulli(p) iff word < threshold; p = 1 is handled separately.
    bernoulli_threshold: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64, n: usize, p: f64, law: Law<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "edge probability {p} outside [0, 1]"
            )));
        }
        let bernoulli_threshold = if p >= 1.0 {
            u64::MAX
        } else {
            (p * 2f64.powi(64)) as u64
        };
        Ok(RandomSource {
            seed: master_seed,
            n,
            p,
            law,
            key: mix64(master_seed.wrapping_add(GOLDEN)),
            bernoulli_threshold,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn law(&self) -> &Law<f64> {
        &self.law
    }

    /// Raw 64-bit word at an address.
    #[inline]
    pub fn word(&self, addr: Address) -> u64 {
        let mut h = mix64(self.key ^ addr.family.tag().wrapping_mul(GOLDEN));
        h = mix64(h.wrapping_add(addr.i.wrapping_mul(0xd6e8_feb8_6659_fd93)));
        mix64(h ^ (addr.k as u64).wrapping_mul(0xa076_1d64_78bd_642f))
    }

    /// Uniform in `[0, 1)` with 53 bits.
    #[inline]
    pub fn uniform(&self, addr: Address) -> f64 {
        (self.word(addr) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `0..m` by multiply-shift.
    #[inline]
    pub fn uniform_index(&self, addr: Address, m: usize) -> usize {
        ((self.word(addr) as u128 * m as u128) >> 64) as usize
    }

    fn check_label(&self, i: Label) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::OutOfRange(format!(
                "label {i} not in 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    pub fn draw_resource(&self, i: Label) -> Result<u32> {
        self.check_label(i)?;
        Ok(self.resource(i))
    }

    pub fn draw_target(&self, i: Label, k: u64) -> Result<Label> {
        self.check_label(i)?;
        if k == 0 {
            return Err(Error::OutOfRange("attempt index must be at least 1".into()));
        }
        Ok(self.target(i, k))
    }

    pub fn draw_bernoulli(&self, i: Label, k: i64) -> Result<bool> {
        self.check_label(i)?;
        if k == 0 {
            return Err(Error::OutOfRange("Bernoulli index must be non-zero".into()));
        }
        Ok(self.bernoulli(i, k))
    }

    pub fn draw_initial(&self) -> Label {
        self.uniform_index(Address::new(Family::Initial, 0, 0), self.n) + 1
    }

    // Unchecked accessors for the construction hot loops.

    #[inline]
    pub(crate) fn resource(&self, i: Label) -> u32 {
        self.law
            .sample(self.uniform(Address::new(Family::Resource, i as u64, 0)))
    }

    #[inline]
    pub(crate) fn target(&self, i: Label, k: u64) -> Label {
        self.uniform_index(Address::new(Family::Target, i as u64, k as i64), self.n) + 1
    }

    #[inline]
    pub(crate) fn bernoulli(&self, i: Label, k: i64) -> bool {
        if self.bernoulli_threshold == u64::MAX {
            return true;
        }
        self.word(Address::new(Family::Bernoulli, i as u64, k)) < self.bernoulli_threshold
    }

    /// `K_i` together with `sum_{k <= K_i} B^i_k`.
    pub fn thinned_resource(&self, i: Label) -> (u32, u32) {
        let k = self.resource(i);
        let open = (1..=k as i64).filter(|&l| self.bernoulli(i, l)).count() as u32;
        (k, open)
    }
}
