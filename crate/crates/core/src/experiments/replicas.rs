use std::io::Write;
use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use crate::complete::run_chain;
use crate::error::{Error, Result};
use crate::explore::{run_cg_sequential, run_coupled_delayed, run_er_mode1};
use crate::mode2::{run_mode2_coupled, run_mode2_direct};
use crate::rng::{derive_seed, RandomSource};

use super::config::{ExperimentConfig, Model};

/// Stop time and informed count of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunResult {
    pub tau: u64,
    pub final_informed: usize,
}

/// Runs `model` once on `src`. The coupled models report the side that is
/// compared with theory: the delayed complete graph for `coupled`, the ER
/// graph for `er2-coupled`.
pub fn run_model(model: Model, src: &RandomSource) -> Result<RunResult> {
    let (tau, final_informed) = match model {
        Model::Complete => {
            let run = run_chain(src.n(), src.law(), src, false)?;
            (run.absorption_time, run.final_informed)
        }
        Model::Er1 => {
            let out = run_er_mode1(src);
            (out.tau as u64, out.final_informed)
        }
        Model::CgSeq => {
            let out = run_cg_sequential(src);
            (out.tau as u64, out.final_informed)
        }
        Model::Coupled => {
            let out = run_coupled_delayed(src);
            (out.tau_cgd as u64, out.cgd_informed)
        }
        Model::Er2 => {
            let out = run_mode2_direct(src);
            (out.tau as u64, out.final_informed)
        }
        Model::Er2Coupled => {
            // the joint clock also ticks on discarded duplicates; count
            // effective ER bursts instead, as in the direct simulator
            let out = run_mode2_coupled(src)?;
            (out.er_informed as u64 - 1, out.er_informed)
        }
    };
    Ok(RunResult {
        tau,
        final_informed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaRecord {
    pub replica_id: usize,
    pub seed: u64,
    pub tau: u64,
    pub final_informed: usize,
    pub survived: bool,
    /// `(x - n q*) / sqrt(n)` for survivors of a supercritical model, where
    /// `x` is `tau`, or the informed count for the complete-graph chain
    /// (whose stop time counts single emissions).
    pub standardized: Option<f64>,
}

struct Classifier {
    n: f64,
    epsilon: f64,
    q: Option<f64>,
    model: Model,
}

impl Classifier {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let target = cfg.target()?;
        Ok(Classifier {
            n: cfg.n as f64,
            epsilon: cfg.epsilon()?,
            q: target.supercritical.then_some(target.q),
            model: cfg.model,
        })
    }

    fn record(&self, replica_id: usize, seed: u64, run: RunResult) -> ReplicaRecord {
        let survived = run.tau as f64 > self.epsilon * self.n;
        let x = match self.model {
            Model::Complete => run.final_informed as f64,
            _ => run.tau as f64,
        };
        let standardized = self
            .q
            .filter(|_| survived)
            .map(|q| (x - self.n * q) / self.n.sqrt());
        ReplicaRecord {
            replica_id,
            seed,
            tau: run.tau,
            final_informed: run.final_informed,
            survived,
            standardized,
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))
}

/// Replicas with ids in `ids`, seeded by `derive_seed(base_seed, id)`.
pub fn run_replica_range(cfg: &ExperimentConfig, ids: Range<usize>) -> Result<Vec<ReplicaRecord>> {
    cfg.validate()?;
    let law = cfg.law()?;
    let classifier = Classifier::new(cfg)?;
    let one = |id: usize| -> Result<ReplicaRecord> {
        let seed = derive_seed(cfg.base_seed, id as u64);
        let src = RandomSource::new(seed, cfg.n, cfg.p, law.clone())?;
        Ok(classifier.record(id, seed, run_model(cfg.model, &src)?))
    };
    if cfg.jobs == 1 {
        return ids.map(one).collect();
    }
    // indexed parallel collect keeps replica order
    pool(cfg.jobs)?.install(|| ids.into_par_iter().map(one).collect())
}

pub fn run_replicas(cfg: &ExperimentConfig) -> Result<Vec<ReplicaRecord>> {
    run_replica_range(cfg, 0..cfg.replicas)
}

/// Adds batches of `cfg.replicas` runs until `min_survivors` survivors are
/// collected or `max_replicas` runs were made.
pub fn run_until_survivors(
    cfg: &ExperimentConfig,
    min_survivors: usize,
    max_replicas: usize,
) -> Result<Vec<ReplicaRecord>> {
    let mut records = Vec::new();
    while records
        .iter()
        .filter(|r: &&ReplicaRecord| r.survived)
        .count()
        < min_survivors
        && records.len() < max_replicas
    {
        let start = records.len();
        let end = (start + cfg.replicas).min(max_replicas);
        records.extend(run_replica_range(cfg, start..end)?);
    }
    Ok(records)
}

/// CSV with header `replica_id,seed,tau,final_informed,survived,standardized`.
pub fn write_records_csv<W: Write>(mut out: W, records: &[ReplicaRecord]) -> std::io::Result<()> {
    writeln!(
        out,
        "replica_id,seed,tau,final_informed,survived,standardized"
    )?;
    for r in records {
        let z = r.standardized.map(|z| format!("{z:?}")).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.replica_id, r.seed, r.tau, r.final_informed, r.survived, z
        )?;
    }
    Ok(())
}
