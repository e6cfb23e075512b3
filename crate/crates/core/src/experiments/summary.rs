use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theory::Prediction;

use super::config::{ExperimentConfig, Model};
use super::replicas::ReplicaRecord;
use super::stats::{
    chi_square, histogram, ks_statistic, ks_threshold, mean, sample_variance, std_error, ChiSquare,
};

/// Survivors needed before conditional statistics are reported.
pub const MIN_SURVIVORS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub model: Model,
    pub replicas: usize,
    pub survivors: usize,
    pub epsilon: f64,
    pub survival_fraction: f64,
    pub conditional_mean_tau_over_n: Option<f64>,
    pub conditional_mean_std_error: Option<f64>,
    pub conditional_var_standardized: Option<f64>,
    pub ks_distance: Option<f64>,
    pub ks_threshold: Option<f64>,
    /// Supercritical target but fewer than [`MIN_SURVIVORS`] survivors.
    pub insufficient_data: bool,
    /// Final informed counts against the exact small-instance pmf.
    pub chi_square: Option<ChiSquare>,
    pub target_q: f64,
    pub target_sigma_gw: f64,
    pub target_var_clt: Option<f64>,
    pub theory: Prediction<f64>,
}

pub fn summarize(
    records: &[ReplicaRecord],
    prediction: &Prediction<f64>,
    cfg: &ExperimentConfig,
) -> Result<Summary> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no replica records".into()));
    }
    let target = prediction.target();
    let n = cfg.n as f64;
    let survivors: Vec<&ReplicaRecord> = records.iter().filter(|r| r.survived).collect();
    let insufficient = target.supercritical && survivors.len() < MIN_SURVIVORS;
    let enough = survivors.len() >= MIN_SURVIVORS;

    let ratios: Vec<f64> = survivors.iter().map(|r| r.tau as f64 / n).collect();
    let z: Vec<f64> = survivors.iter().filter_map(|r| r.standardized).collect();
    let (cond_mean, cond_se) = if enough {
        (mean(&ratios), std_error(&ratios))
    } else {
        (None, None)
    };
    let cond_var = if enough && target.supercritical {
        sample_variance(&z)
    } else {
        None
    };
    let (ks, threshold) = match target.var_clt {
        Some(v) if enough && !z.is_empty() => {
            (Some(ks_statistic(&z, v)?), Some(ks_threshold(z.len())))
        }
        _ => (None, None),
    };

    Ok(Summary {
        model: cfg.model,
        replicas: records.len(),
        survivors: survivors.len(),
        epsilon: cfg.epsilon()?,
        survival_fraction: survivors.len() as f64 / records.len() as f64,
        conditional_mean_tau_over_n: cond_mean,
        conditional_mean_std_error: cond_se,
        conditional_var_standardized: cond_var,
        ks_distance: ks,
        ks_threshold: threshold,
        insufficient_data: insufficient,
        chi_square: None,
        target_q: target.q,
        target_sigma_gw: target.sigma_gw,
        target_var_clt: target.var_clt,
        theory: prediction.clone(),
    })
}

/// Attaches the chi-square fit of final informed counts against `pmf`.
pub fn attach_oracle(
    summary: &mut Summary,
    records: &[ReplicaRecord],
    pmf: &BTreeMap<usize, f64>,
) -> Result<()> {
    let observed = histogram(records.iter().map(|r| r.final_informed));
    summary.chi_square = Some(chi_square(&observed, pmf)?);
    Ok(())
}
