use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::resource::{Law, LawSpec};
use crate::theory::{predict, EmissionMode, Prediction, Target};

/// Fallback survival threshold when the effective resource is subcritical.
pub const SUBCRITICAL_EPSILON: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Complete-graph chain with the unthinned law.
    Complete,
    /// First mode on the Erdős–Rényi graph.
    Er1,
    /// Second mode, simulated on a sampled graph.
    Er2,
    /// Sequential complete-graph construction (thinned resource).
    CgSeq,
    /// Delayed complete-graph construction coupled with `er1`.
    Coupled,
    /// ER side of the second-mode joint construction.
    Er2Coupled,
}

impl Model {
    pub const ALL: [Model; 6] = [
        Model::Complete,
        Model::Er1,
        Model::Er2,
        Model::CgSeq,
        Model::Coupled,
        Model::Er2Coupled,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Complete => "complete",
            Model::Er1 => "er1",
            Model::Er2 => "er2",
            Model::CgSeq => "cg-seq",
            Model::Coupled => "coupled",
            Model::Er2Coupled => "er2-coupled",
        }
    }

    /// Which limit the model's statistics are compared with.
    pub fn emission_mode(self) -> EmissionMode {
        match self {
            Model::Er1 | Model::CgSeq | Model::Coupled => EmissionMode::EdgeCheck,
            Model::Complete | Model::Er2 | Model::Er2Coupled => EmissionMode::NeighborOnly,
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model `{s}`")))
    }
}

fn default_jobs() -> usize {
    1
}

/// A batch of independent replicas.
///
/// `jobs` only sizes the worker pool and is left out of serialized output so
/// results do not depend on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: Model,
    pub n: usize,
    pub p: f64,
    pub law: LawSpec,
    pub replicas: usize,
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub survival_epsilon: Option<f64>,
    #[serde(default = "default_jobs", skip_serializing)]
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(
        model: Model,
        n: usize,
        p: f64,
        law: LawSpec,
        replicas: usize,
        base_seed: u64,
    ) -> Self {
        ExperimentConfig {
            model,
            n,
            p,
            law,
            replicas,
            base_seed,
            survival_epsilon: None,
            jobs: 1,
        }
    }

    pub fn law(&self) -> Result<Law<f64>> {
        self.law.build()
    }

    pub fn prediction(&self) -> Result<Prediction<f64>> {
        predict(&self.law()?, self.p, self.model.emission_mode())
    }

    pub fn target(&self) -> Result<Target<f64>> {
        Ok(self.prediction()?.target())
    }

    /// `survival_epsilon` or its default `q*/2` (a fixed fraction when the
    /// limit is degenerate).
    pub fn epsilon(&self) -> Result<f64> {
        let target = self.target()?;
        Ok(self
            .survival_epsilon
            .unwrap_or(if target.supercritical && target.q > 0.0 {
                target.q / 2.0
            } else {
                SUBCRITICAL_EPSILON
            }))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::Config(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.replicas == 0 {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if self.jobs == 0 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let target = self.target()?;
        if let Some(eps) = self.survival_epsilon {
            let upper = if target.supercritical { target.q } else { 1.0 };
            if !(eps > 0.0 && eps < upper) {
                return Err(Error::Config(format!(
                    "survival_epsilon = {eps} outside (0, {upper})"
                )));
            }
        }
        Ok(())
    }
}
