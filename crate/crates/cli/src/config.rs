//! Configuration files and flag overrides.

use std::path::Path;

use rumorlab::experiments::{ExperimentConfig, Model};
use rumorlab::{Error, LawSpec, Result};
use serde::Deserialize;

/// Every key a configuration file may set. Flags override file values.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<Model>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub law: Option<LawSpec>,
    pub replicas: Option<usize>,
    pub base_seed: Option<u64>,
    pub seed: Option<u64>,
    pub survival_epsilon: Option<f64>,
    pub jobs: Option<usize>,
    pub mode: Option<u8>,
    pub depth_cap: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Copies every `Some` field of `flags` over `self`.
    pub fn merge(mut self, flags: FileConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if flags.$f.is_some() { self.$f = flags.$f; } )* };
        }
        take!(
            model,
            n,
            p,
            law,
            replicas,
            base_seed,
            seed,
            survival_epsilon,
            jobs,
            mode,
            depth_cap
        );
        self
    }

    pub fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
        value
            .clone()
            .ok_or_else(|| Error::Config(format!("missing `{key}` (flag or config key)")))
    }

    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(
            Self::require(&self.model, "model")?,
            Self::require(&self.n, "n")?,
            Self::require(&self.p, "p")?,
            Self::require(&self.law, "law")?,
            self.replicas.unwrap_or(100),
            self.base_seed.unwrap_or(0),
        );
        cfg.survival_epsilon = self.survival_epsilon;
        cfg.jobs = self.jobs.unwrap_or(1);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `--k-pmf 0:0.5,2:0.5`.
pub fn parse_pmf(text: &str) -> Result<LawSpec> {
    let bad = || {
        Error::Config(format!(
            "malformed pmf `{text}`; expected value:prob,value:prob,..."
        ))
    };
    let pmf = text
        .split(',')
        .map(|item| {
            let (k, w) = item.trim().split_once(':').ok_or_else(bad)?;
            Ok((
                k.trim().parse::<u32>().map_err(|_| bad())?,
                w.trim().parse::<f64>().map_err(|_| bad())?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let spec = LawSpec::Pmf { pmf };
    spec.build::<f64>()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_flag() {
        assert_eq!(
            parse_pmf("0:0.5, 2:0.5").unwrap(),
            LawSpec::Pmf {
                pmf: vec![(0, 0.5), (2, 0.5)]
            }
        );
        assert!(parse_pmf("0-0.5").is_err());
        assert!(parse_pmf("0:0.5,2:0.6").is_err());
        assert!(parse_pmf("x:1").is_err());
    }

    #[test]
    fn toml_layout_and_override() {
        let file: FileConfig = toml::from_str(
            "model = \"er1\"\nn = 2000\np = 0.5\nreplicas = 400\nbase_seed = 42\n[law]\nconstant = 4\n",
        )
        .unwrap();
        let flags = FileConfig {
            n: Some(100),
            ..Default::default()
        };
        let cfg = file.merge(flags).experiment().unwrap();
        assert_eq!(
            (cfg.model, cfg.n, cfg.replicas, cfg.base_seed),
            (Model::Er1, 100, 400, 42)
        );
        assert_eq!(cfg.law, LawSpec::Constant { constant: 4 });
        let pmf: FileConfig = toml::from_str("[law]\npmf = [[0, 0.5], [3, 0.5]]\n").unwrap();
        assert_eq!(
            pmf.law,
            Some(LawSpec::Pmf {
                pmf: vec![(0, 0.5), (3, 0.5)]
            })
        );
        assert!(toml::from_str::<FileConfig>("unknown = 1\n").is_err());
    }
}
