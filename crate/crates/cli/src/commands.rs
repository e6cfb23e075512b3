use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rumorlab::complete::{run_chain, write_trace as write_chain_trace};
use rumorlab::experiments::{
    attach_oracle, exact_small_distribution, pmf_to_f64, run_replicas, summarize,
    write_records_csv, Model, DEFAULT_DEPTH_CAP,
};
use rumorlab::explore::{run_cg_sequential, run_coupled_delayed, run_er_mode1, write_trace};
use rumorlab::mode2::{run_mode2_coupled, run_mode2_direct, write_joint_trace};
use rumorlab::{predict, BigRational, EmissionMode, Error, ExactLaw, RandomSource, ResourceLaw};
use serde_json::{json, Map, Value};

use crate::config::FileConfig;
use crate::{Common, Failure};

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn emit(path: Option<&Path>, value: &Value, pretty: bool) -> Result<(), Failure> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .expect("JSON values serialize");
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn mode_of(cfg: &FileConfig) -> Result<EmissionMode, Failure> {
    match (cfg.mode, cfg.model) {
        (Some(1), _) => Ok(EmissionMode::EdgeCheck),
        (Some(2), _) => Ok(EmissionMode::NeighborOnly),
        (Some(m), _) => Err(Error::Config(format!("mode must be 1 or 2, got {m}")).into()),
        (None, Some(model)) => Ok(model.emission_mode()),
        (None, None) => Ok(EmissionMode::EdgeCheck),
    }
}

pub fn theory(common: &Common, cfg: FileConfig) -> Result<(), Failure> {
    let spec = FileConfig::require(&cfg.law, "law")?;
    let p = FileConfig::require(&cfg.p, "p")?;
    let mode = mode_of(&cfg)?;
    let law: ResourceLaw = spec.build()?;
    let prediction = predict(&law, p, mode)?;
    let mut out = Map::new();
    out.insert("version".into(), json!(VERSION));
    out.insert(
        "config".into(),
        json!({ "law": spec, "p": p, "mode": if mode == EmissionMode::EdgeCheck { 1 } else { 2 } }),
    );
    if let Value::Object(fields) = serde_json::to_value(&prediction).expect("prediction serializes")
    {
        out.extend(fields);
    }
    emit(common.out.as_deref(), &Value::Object(out), true)
}

pub fn simulate(common: &Common, cfg: FileConfig) -> Result<(), Failure> {
    let model = FileConfig::require(&cfg.model, "model")?;
    let n = FileConfig::require(&cfg.n, "n")?;
    let p = FileConfig::require(&cfg.p, "p")?;
    let spec = FileConfig::require(&cfg.law, "law")?;
    let seed = cfg.seed.unwrap_or(0);
    let src = RandomSource::new(seed, n, p, spec.build()?)?;
    let trace = common.trace_out.as_deref();

    let (tau, informed, details) = match model {
        Model::Complete => {
            let run = run_chain(n, src.law(), &src, trace.is_some())?;
            if let (Some(path), Some(states)) = (trace, &run.trace) {
                write_chain_trace(&mut create(path)?, states)?;
            }
            (
                run.absorption_time,
                run.final_informed,
                json!({ "resource_drawn": run.resource_drawn }),
            )
        }
        Model::Er1 => {
            let out = run_er_mode1(&src);
            if let Some(path) = trace {
                write_trace(create(path)?, &out.trace)?;
            }
            (out.tau as u64, out.final_informed, json!({}))
        }
        Model::CgSeq => {
            let out = run_cg_sequential(&src);
            if let Some(path) = trace {
                write_trace(create(path)?, &out.trace)?;
            }
            let emissions = out.time_map.total_emissions();
            (
                out.tau as u64,
                out.final_informed,
                json!({ "effective_emissions": emissions }),
            )
        }
        Model::Coupled => {
            let out = run_coupled_delayed(&src);
            if let Some(path) = trace {
                write_trace(create(path)?, &out.cgd_trace)?;
            }
            let details = json!({
                "tau_er": out.tau_er,
                "tau_cgd": out.tau_cgd,
                "er_informed": out.er_informed,
                "cgd_informed": out.cgd_informed,
                "mismatch_bound": out.mismatch_bound,
            });
            (out.tau_cgd as u64, out.cgd_informed, details)
        }
        Model::Er2 => {
            let out = run_mode2_direct(&src);
            if let Some(path) = trace {
                let mut w = create(path)?;
                writeln!(w, "order,server")?;
                for (idx, server) in out.informed.iter().enumerate() {
                    writeln!(w, "{idx},{server}")?;
                }
                w.flush()?;
            }
            (out.tau as u64, out.final_informed, json!({}))
        }
        Model::Er2Coupled => {
            let out = run_mode2_coupled(&src)?;
            if let Some(path) = trace {
                write_joint_trace(create(path)?, &out.trace)?;
            }
            let details = json!({
                "tilde_tau": out.tilde_tau,
                "tau_cg": out.tau_cg,
                "tau_bar_er": out.tau_bar_er,
                "cg_informed": out.cg_informed,
                "er_informed": out.er_informed,
            });
            (out.er_informed as u64 - 1, out.er_informed, details)
        }
    };
    let value = json!({
        "version": VERSION,
        "config": { "model": model, "n": n, "p": p, "law": spec, "seed": seed },
        "tau": tau,
        "final_informed": informed,
        "details": details,
    });
    emit(common.out.as_deref(), &value, false)
}

pub fn experiment(common: &Common, cfg: FileConfig) -> Result<(), Failure> {
    let exp = cfg.experiment()?;
    let records = run_replicas(&exp)?;
    let prediction = exp.prediction()?;
    let mut summary = summarize(&records, &prediction, &exp)?;
    let law: ResourceLaw = exp.law()?;
    match exact_small_distribution(exp.model, exp.n, &exp.p, &law, DEFAULT_DEPTH_CAP) {
        Ok(pmf) => attach_oracle(&mut summary, &records, &pmf_to_f64(&pmf))?,
        Err(Error::Infeasible(_)) => {}
        Err(e) => return Err(e.into()),
    }
    if let Some(path) = common.records_out.as_deref() {
        let mut w = create(path)?;
        write_records_csv(&mut w, &records)?;
        w.flush()?;
    }
    let value = json!({ "version": VERSION, "config": exp, "summary": summary });
    emit(common.summary_out.as_deref(), &value, true)
}

pub fn oracle(common: &Common, cfg: FileConfig) -> Result<(), Failure> {
    let model = FileConfig::require(&cfg.model, "model")?;
    let n = FileConfig::require(&cfg.n, "n")?;
    let p = FileConfig::require(&cfg.p, "p")?;
    let spec = FileConfig::require(&cfg.law, "law")?;
    let cap = cfg.depth_cap.unwrap_or(DEFAULT_DEPTH_CAP);
    let pmf: Map<String, Value> = if common.exact {
        let law: ExactLaw = spec.build()?;
        let p = BigRational::from_float(p)
            .ok_or_else(|| Error::Config(format!("p = {p} is not finite")))?;
        exact_small_distribution(model, n, &p, &law, cap)?
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v.to_string())))
            .collect()
    } else {
        let law: ResourceLaw = spec.build()?;
        exact_small_distribution(model, n, &p, &law, cap)?
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect()
    };
    let value = json!({
        "version": VERSION,
        "config": { "model": model, "n": n, "p": p, "law": spec, "depth_cap": cap, "exact": common.exact },
        "pmf": pmf,
    });
    emit(common.out.as_deref(), &value, true)
}
