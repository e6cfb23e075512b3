//! Goodness-of-fit statistics.

use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Smallest expected count a chi-square cell may have.
pub const MIN_EXPECTED: f64 = 5.0;

pub fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    Some(xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64)
}

pub fn std_error(xs: &[f64]) -> Option<f64> {
    sample_variance(xs).map(|v| (v / xs.len() as f64).sqrt())
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the centered Gaussian with the given variance.
pub fn ks_statistic(samples: &[f64], variance: f64) -> Result<f64> {
    if variance.is_nan() || variance <= 0.0 || !variance.is_finite() {
        return Err(Error::Domain(format!(
            "variance must be positive, got {variance}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData("no samples".into()));
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let m = xs.len() as f64;
    let d = xs.iter().enumerate().fold(0.0f64, |d, (idx, &x)| {
        let f = normal.cdf(x);
        let above = (idx + 1) as f64 / m - f;
        let below = f - idx as f64 / m;
        d.max(above).max(below)
    });
    Ok(d)
}

/// Asymptotic 1% critical value of the KS distance for `m` samples.
pub fn ks_threshold(m: usize) -> f64 {
    1.63 / (m as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquare {
    fn new(statistic: f64, dof: usize) -> Self {
        let p_value = if dof == 0 {
            1.0
        } else if statistic.is_infinite() {
            0.0
        } else {
            1.0 - ChiSquared::new(dof as f64)
                .expect("positive dof")
                .cdf(statistic)
        };
        ChiSquare {
            statistic,
            dof,
            p_value,
        }
    }

    pub fn accepts(&self, level: f64) -> bool {
        self.p_value >= level
    }
}

/// Groups consecutive cells until each group reaches `MIN_EXPECTED` by
/// `weight`; a short tail joins the last group.
fn merge_cells(weights: &[f64]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut acc = 0.0;
    for (idx, &w) in weights.iter().enumerate() {
        current.push(idx);
        acc += w;
        if acc >= MIN_EXPECTED {
            groups.push(std::mem::take(&mut current));
            acc = 0.0;
        }
    }
    if !current.is_empty() {
        match groups.last_mut() {
            Some(last) => last.extend(current),
            None => groups.push(current),
        }
    }
    groups
}

/// Pearson goodness of fit of observed counts against an expected pmf.
/// Observations outside the expected support give an infinite statistic.
pub fn chi_square(
    observed: &BTreeMap<usize, u64>,
    expected: &BTreeMap<usize, f64>,
) -> Result<ChiSquare> {
    let total: u64 = observed.values().sum();
    if total == 0 {
        return Err(Error::InsufficientData("no observations".into()));
    }
    if expected.values().any(|&p| p.is_nan() || p <= 0.0) {
        return Err(Error::Domain(
            "expected pmf must be positive on its support".into(),
        ));
    }
    if observed
        .iter()
        .any(|(k, &c)| c > 0 && !expected.contains_key(k))
    {
        return Ok(ChiSquare::new(f64::INFINITY, expected.len().max(2) - 1));
    }
    let keys: Vec<usize> = expected.keys().copied().collect();
    let exp: Vec<f64> = keys.iter().map(|k| expected[k] * total as f64).collect();
    let obs: Vec<f64> = keys
        .iter()
        .map(|k| observed.get(k).copied().unwrap_or(0) as f64)
        .collect();
    let groups = merge_cells(&exp);
    let statistic = groups
        .iter()
        .map(|g| {
            let e: f64 = g.iter().map(|&i| exp[i]).sum();
            let o: f64 = g.iter().map(|&i| obs[i]).sum();
            (o - e).powi(2) / e
        })
        .sum();
    Ok(ChiSquare::new(statistic, groups.len() - 1))
}

/// Same test with the observed pmf given as probabilities of `total` draws.
pub fn chi_square_pmf(
    observed: &BTreeMap<usize, f64>,
    expected: &BTreeMap<usize, f64>,
    total: u64,
) -> Result<ChiSquare> {
    let counts = observed
        .iter()
        .map(|(&k, &p)| (k, (p * total as f64).round() as u64))
        .collect();
    chi_square(&counts, expected)
}

/// Two-sample chi-square homogeneity test on count tables.
pub fn two_sample_chi_square(
    a: &BTreeMap<usize, u64>,
    b: &BTreeMap<usize, u64>,
) -> Result<ChiSquare> {
    let na: u64 = a.values().sum();
    let nb: u64 = b.values().sum();
    if na == 0 || nb == 0 {
        return Err(Error::InsufficientData("empty sample".into()));
    }
    let keys: Vec<usize> = a
        .keys()
        .chain(b.keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let ca: Vec<f64> = keys
        .iter()
        .map(|k| a.get(k).copied().unwrap_or(0) as f64)
        .collect();
    let cb: Vec<f64> = keys
        .iter()
        .map(|k| b.get(k).copied().unwrap_or(0) as f64)
        .collect();
    let (fa, fb) = (na as f64 / (na + nb) as f64, nb as f64 / (na + nb) as f64);
    // smallest expected cell of a column is min(fa, fb) * column total
    let weights: Vec<f64> = ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| (x + y) * fa.min(fb))
        .collect();
    let groups = merge_cells(&weights);
    let statistic = groups
        .iter()
        .map(|g| {
            let oa: f64 = g.iter().map(|&i| ca[i]).sum();
            let ob: f64 = g.iter().map(|&i| cb[i]).sum();
            let (ea, eb) = ((oa + ob) * fa, (oa + ob) * fb);
            (oa - ea).powi(2) / ea + (ob - eb).powi(2) / eb
        })
        .sum();
    Ok(ChiSquare::new(statistic, groups.len() - 1))
}

/// Counts of each value.
pub fn histogram(values: impl IntoIterator<Item = usize>) -> BTreeMap<usize, u64> {
    let mut h = BTreeMap::new();
    for v in values {
        *h.entry(v).or_insert(0) += 1;
    }
    h
}
