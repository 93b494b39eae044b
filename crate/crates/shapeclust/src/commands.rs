//! The five pipeline stages. Each reads its inputs from files and writes its
//! outputs, plus a `run.conf` manifest, into an output directory.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Result};
use rayon::prelude::*;
use shapeclust_core::curve::{simulate_gaussian_mixture, simulate_shape_classes};
use shapeclust_core::summary::{classification_rate, coclustering_mean, rand_index, summarize};
use shapeclust_core::wishart::estimate_d_eb;
use shapeclust_core::{run_chain_timed, ChainTrace, DegreesOfFreedom, GramMatrix, Partition, SummaryResult};

use crate::config::{Group, RunConfig, SimKind};
use crate::formats::{self, Dataset};
use crate::gram::{build_gram, GramTiming};
use crate::svg::histogram_svg;
use crate::StdClock;

pub const MANIFEST: &str = "run.conf";
pub const DATA: &str = "data.json";
pub const GRAM: &str = "gram.csv";
pub const TRACE: &str = "trace.jsonl";
pub const SUMMARY: &str = "summary.json";

/// Simulated data set; the seed defaults to 0 and is recorded.
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Dataset> {
    let seed = cfg.seed.unwrap_or(0);
    let data = match cfg.kind {
        SimKind::Gaussian => {
            let k = cfg.means.len();
            if k == 0 {
                bail!("means: need at least one component");
            }
            let p = cfg.means[0].len();
            let cov: Vec<f64> = (0..p * p)
                .map(|i| if i % (p + 1) == 0 { cfg.sd * cfg.sd } else { 0.0 })
                .collect();
            // one component at a time so that every class has exactly per_class points
            let mut points = Vec::new();
            let mut labels = Vec::new();
            for (c, mean) in cfg.means.iter().enumerate() {
                let part = simulate_gaussian_mixture(
                    &[1.0],
                    std::slice::from_ref(mean),
                    std::slice::from_ref(&cov),
                    cfg.per_class,
                    seed.wrapping_add(c as u64),
                )?;
                points.extend_from_slice(part.points());
                labels.extend(std::iter::repeat_n(c, cfg.per_class));
            }
            Dataset::Points(shapeclust_core::PointSet::new(p, points, Some(labels))?)
        }
        SimKind::Shapes => Dataset::Curves(simulate_shape_classes(
            &cfg.shape_classes()?,
            cfg.per_class,
            &cfg.shape_options(),
            seed,
        )?),
    };
    let mut resolved = cfg.clone();
    resolved.seed = Some(seed);
    formats::write_dataset(&data, &out.join(DATA), Some(seed))?;
    formats::write(&out.join(MANIFEST), &resolved.manifest("simulate", &[Group::Sim], &[]))?;
    Ok(data)
}

pub struct GramOutput {
    pub gram: GramMatrix,
    pub timing: GramTiming,
}

pub fn gram(cfg: &RunConfig, input: &Path, out: &Path) -> Result<GramOutput> {
    let data = formats::read_dataset(input)?;
    let (g, timing) = build_gram(&data, cfg)?;
    let mut options = BTreeMap::new();
    for key in [
        "resample",
        "smooth_bandwidth",
        "smooth_passes",
        "extend",
        "unit_length",
        "closed",
        "center",
        "max_iters",
        "tol",
        "n_seeds",
    ] {
        options.insert(key.to_string(), cfg.get(key).expect("known key"));
    }
    formats::write_gram(&g, &out.join(GRAM), options)?;
    if let Some(truth) = data.truth_labels() {
        formats::write(&out.join("truth.json"), &(serde_json::to_string(truth)? + "\n"))?;
    }
    formats::write(
        &out.join(MANIFEST),
        &cfg.manifest("gram", &[Group::Pre, Group::Align], &[]),
    )?;
    Ok(GramOutput { gram: g, timing })
}

pub struct ClusterOutput {
    pub traces: Vec<ChainTrace>,
    pub d: f64,
    pub xi: f64,
}

/// Runs `n_chains` chains with seeds `seed, seed + 1, ...`.
pub fn cluster(cfg: &RunConfig, gram_path: &Path, out: &Path) -> Result<ClusterOutput> {
    if cfg.n_chains == 0 {
        bail!("n_chains must be at least 1");
    }
    let s = formats::read_gram(gram_path)?;
    let n = s.n();
    // rejects bad settings before the spectrum or any sweep is computed
    let first = cfg.chain_config(n, 0)?;
    let d = match first.d {
        DegreesOfFreedom::Fixed(d) => d,
        DegreesOfFreedom::Auto => estimate_d_eb(&s)?,
    };
    let configs = (0..cfg.n_chains)
        .map(|c| {
            let mut cc = cfg.chain_config(n, c)?;
            cc.d = DegreesOfFreedom::Fixed(d);
            Ok(cc)
        })
        .collect::<Result<Vec<_>>>()?;
    let clock = StdClock::new();
    let traces = configs
        .par_iter()
        .map(|cc| run_chain_timed(&s, cc, &clock))
        .collect::<Result<Vec<_>, _>>()?;
    formats::write(&out.join(TRACE), &formats::traces_to_jsonl(&traces))?;
    let extra = [("resolved d", d.to_string()), ("resolved xi", first.xi.to_string())];
    let mut resolved = cfg.clone();
    resolved.seed = Some(first.seed);
    formats::write(&out.join(MANIFEST), &resolved.manifest("cluster", &[Group::Chain], &extra))?;
    Ok(ClusterOutput {
        traces,
        d,
        xi: first.xi,
    })
}

/// Mean sweep time over every chain, in seconds.
pub fn mean_sweep_seconds(traces: &[ChainTrace]) -> f64 {
    let all: Vec<u64> = traces.iter().flat_map(|t| t.sweep_nanos.iter().copied()).collect();
    all.iter().sum::<u64>() as f64 / all.len().max(1) as f64 * 1e-9
}

pub fn summarize_trace(cfg: &RunConfig, trace: &ChainTrace, out: &Path) -> Result<SummaryResult> {
    let result = summarize(trace, cfg.min_size)?;
    let bbar = coclustering_mean(trace)?;
    formats::write(&out.join(SUMMARY), &formats::summary_to_json(&result, cfg.min_size))?;
    formats::write(
        &out.join("k_histogram.csv"),
        &formats::histogram_to_csv(&result.histogram),
    )?;
    formats::write(
        &out.join("k_histogram.svg"),
        &histogram_svg(&result.histogram, "posterior of K"),
    )?;
    formats::write(&out.join("coclustering.csv"), &formats::coclustering_to_csv(&bbar))?;
    formats::write(&out.join(MANIFEST), &cfg.manifest("summarize", &[Group::Summary], &[]))?;
    Ok(result)
}

pub fn summarize_file(cfg: &RunConfig, trace_path: &Path, out: &Path) -> Result<SummaryResult> {
    let trace = formats::read_trace(trace_path)?;
    summarize_trace(cfg, &trace, out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub n: usize,
    pub classification_rate: f64,
    pub rand_index: f64,
}

pub fn eval(labels: &Path, truth: &Path) -> Result<EvalReport> {
    let est = formats::read_labels(labels)?;
    let tru = formats::read_labels(truth)?;
    if est.len() != tru.len() {
        bail!(
            "{} has {} labels but {} has {}",
            labels.display(),
            est.len(),
            truth.display(),
            tru.len()
        );
    }
    let (a, b) = (Partition::from_labels(&est), Partition::from_labels(&tru));
    Ok(EvalReport {
        n: est.len(),
        classification_rate: classification_rate(&a, &b)?,
        rand_index: rand_index(&a, &b)?,
    })
}
