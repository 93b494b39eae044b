//! Gram matrix construction with the elastic pairs spread over threads.

use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use rayon::prelude::*;
use shapeclust_core::elastic::{assemble_elastic_gram, curve_srvfs, elastic_pair, euclidean_gram, upper_pairs};
use shapeclust_core::{Curve, CurveSet, DomainKind, GramMatrix, GramMode};

use crate::config::{ModeSetting, RunConfig};
use crate::formats::Dataset;

/// Wall time per stage; alignment dominates for curves.
#[derive(Debug, Clone, Copy, Default)]
pub struct GramTiming {
    pub preprocess: Duration,
    pub alignment: Duration,
    pub assembly: Duration,
}

impl GramTiming {
    pub fn total(&self) -> Duration {
        self.preprocess + self.alignment + self.assembly
    }
}

pub fn resolve_mode(dataset: &Dataset, setting: ModeSetting) -> Result<GramMode> {
    match (dataset, setting) {
        (Dataset::Curves(_), ModeSetting::Auto | ModeSetting::Elastic) => Ok(GramMode::Elastic),
        (Dataset::Points(_), ModeSetting::Auto | ModeSetting::Euclidean) => Ok(GramMode::Euclidean),
        (Dataset::Curves(_), ModeSetting::Euclidean) => bail!("euclidean mode needs a point set"),
        (Dataset::Points(_), ModeSetting::Elastic) => bail!("elastic mode needs a curve set"),
    }
}

fn with_closed_flag(set: &CurveSet, closed: Option<bool>) -> Result<CurveSet> {
    let Some(closed) = closed else {
        return Ok(set.clone());
    };
    let kind = if closed { DomainKind::Closed } else { DomainKind::Open };
    let curves = set
        .curves()
        .iter()
        .map(|c| Curve::new(c.id(), c.dim(), c.points().to_vec(), kind))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CurveSet::new(curves, set.truth_labels().map(<[usize]>::to_vec))?)
}

/// Elastic Gram matrix of a curve set with pairs computed in parallel.
/// The result does not depend on the number of threads.
pub fn elastic_gram_parallel(set: &CurveSet, cfg: &RunConfig) -> Result<(GramMatrix, GramTiming)> {
    let mut timing = GramTiming::default();
    let start = Instant::now();
    let set = with_closed_flag(set, cfg.closed)?;
    let srvfs = curve_srvfs(&set, &cfg.preprocess_options(), cfg.unit_length)?;
    timing.preprocess = start.elapsed();

    let start = Instant::now();
    let opts = cfg.align_opts();
    let pairs: Vec<(usize, usize)> = upper_pairs(srvfs.len()).collect();
    let upper = pairs
        .par_iter()
        .map(|&(i, j)| elastic_pair(&srvfs, i, j, &opts))
        .collect::<Result<Vec<f64>, _>>()?;
    timing.alignment = start.elapsed();

    let start = Instant::now();
    let ids = set.curves().iter().map(|c| c.id().to_string()).collect();
    let g = assemble_elastic_gram(&srvfs, &upper, ids)?;
    timing.assembly = start.elapsed();
    Ok((g, timing))
}

pub fn build_gram(dataset: &Dataset, cfg: &RunConfig) -> Result<(GramMatrix, GramTiming)> {
    match (dataset, resolve_mode(dataset, cfg.mode)?) {
        (Dataset::Curves(set), GramMode::Elastic) => elastic_gram_parallel(set, cfg),
        (Dataset::Points(set), GramMode::Euclidean) => {
            let start = Instant::now();
            let g = euclidean_gram(set, cfg.center);
            let timing = GramTiming {
                assembly: start.elapsed(),
                ..GramTiming::default()
            };
            Ok((g, timing))
        }
        _ => unreachable!("resolve_mode pairs data and mode"),
    }
}
