//! Finite-support resource laws and their Bernoulli thinning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Probability mass function of the resource `K` (the number of emission
/// attempts a server owns). Support is sorted, distinct and carries only
/// non-zero masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Law<T> {
    support: Vec<u32>,
    probs: Vec<T>,
}

/// Law description as it appears in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LawSpec {
    Constant { constant: u32 },
    Pmf { pmf: Vec<(u32, f64)> },
}

impl LawSpec {
    pub fn build<T: Scalar>(&self) -> Result<Law<T>> {
        match self {
            LawSpec::Constant { constant } => Ok(Law::constant(*constant)),
            LawSpec::Pmf { pmf } => {
                let pairs = pmf
                    .iter()
                    .map(|&(k, w)| {
                        T::from_f64(w)
                            .map(|w| (k, w))
                            .ok_or_else(|| Error::Config(format!("probability {w} is not finite")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Law::from_pmf(pairs)
            }
        }
    }
}

impl<T: Scalar> Law<T> {
    /// Point mass at `k`.
    pub fn constant(k: u32) -> Self {
        Law {
            support: vec![k],
            probs: vec![T::one()],
        }
    }

    /// Builds a law from `(value, probability)` pairs. Zero masses are
    /// dropped; duplicates, negative masses and bad normalization are errors.
    pub fn from_pmf(mut pairs: Vec<(u32, T)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Config("empty resource support".into()));
        }
        pairs.sort_by_key(|(k, _)| *k);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config("duplicate value in resource support".into()));
        }
        if let Some((k, w)) = pairs.iter().find(|(_, w)| w.is_negative()) {
            return Err(Error::Config(format!("negative probability {w:?} at {k}")));
        }
        let total = pairs.iter().fold(T::zero(), |acc, (_, w)| acc + w.clone());
        if (total - T::one()).abs() > T::normalization_tolerance() {
            return Err(Error::Config(
                "resource probabilities do not sum to 1".into(),
            ));
        }
        pairs.retain(|(_, w)| !w.is_zero());
        let (support, probs) = pairs.into_iter().unzip();
        Ok(Law { support, probs })
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &T)> + '_ {
        self.support.iter().copied().zip(self.probs.iter())
    }

    /// `P(K = k)`.
    pub fn prob(&self, k: u32) -> T {
        match self.support.binary_search(&k) {
            Ok(idx) => self.probs[idx].clone(),
            Err(_) => T::zero(),
        }
    }

    pub fn max_value(&self) -> u32 {
        *self.support.last().expect("non-empty support")
    }

    fn moment(&self, power: u32) -> T {
        self.iter().fold(T::zero(), |acc, (k, w)| {
            acc + T::from_count(k as u64).powu(power) * w.clone()
        })
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn second_moment(&self) -> T {
        self.moment(2)
    }

    pub fn variance(&self) -> T {
        let m = self.mean();
        self.second_moment() - m.clone() * m
    }

    /// Probability generating function `E[x^K]` for `x` in `[0, 1]`.
    pub fn pgf_at(&self, x: &T) -> Result<T> {
        if *x < T::zero() || *x > T::one() {
            return Err(Error::Domain(format!("pgf argument {x:?} outside [0, 1]")));
        }
        Ok(self.pgf_unchecked(x))
    }

    pub(crate) fn pgf_unchecked(&self, x: &T) -> T {
        self.iter()
            .fold(T::zero(), |acc, (k, w)| acc + x.powu(k) * w.clone())
    }

    /// Law of `B_1 + ... + B_K` with independent Bernoulli(`p`) marks: a
    /// mixture of Binomial(`k`, `p`) over the support.
    pub fn thin(&self, p: &T) -> Result<Self> {
        if *p < T::zero() || *p > T::one() {
            return Err(Error::Config(format!(
                "thinning probability {p:?} outside [0, 1]"
            )));
        }
        let max = self.max_value() as usize;
        let mut out = vec![T::zero(); max + 1];
        let q = T::one() - p.clone();
        for (k, w) in self.iter() {
            // C(k, j) built incrementally to stay exact for rationals.
            let mut binom = T::one();
            for j in 0..=k {
                let term = binom.clone() * p.powu(j) * q.powu(k - j) * w.clone();
                out[j as usize] = out[j as usize].clone() + term;
                binom = binom * T::from_count((k - j) as u64) / T::from_count(j as u64 + 1);
            }
        }
        let (support, probs) = out
            .into_iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(j, w)| (j as u32, w))
            .unzip();
        Ok(Law { support, probs })
    }

    /// Inverse-CDF sample: the smallest `k` with `P(K <= k) > u`.
    pub fn sample(&self, u: f64) -> u32 {
        let mut acc = 0.0;
        for (k, w) in self.iter() {
            acc += w.to_f64().unwrap_or(0.0);
            if u < acc {
                return k;
            }
        }
        self.max_value()
    }
}
