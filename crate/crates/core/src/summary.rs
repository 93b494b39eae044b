//! Point estimate of the clustering from a chain trace, outlier clusters,
//! and agreement metrics against a reference labelling.
//!
//! The estimate follows the extrinsic-mean recipe: take the modal number of
//! clusters `k0`, average the sampled membership matrices, and threshold
//! that average at the largest `t = iter/M` whose greedy cluster extraction
//! gives exactly `k0` clusters.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::crp::ChainTrace;
use crate::error::{Error, Result};
use crate::partition::{MembershipMatrix, Partition};

/// Default minimum cluster size below which members count as outliers.
pub const DEFAULT_MIN_SIZE: usize = 3;

/// Modal `K` (ties go to the smaller `K`) and the full `K` histogram.
pub fn mode_cluster_count(trace: &ChainTrace) -> Result<(usize, BTreeMap<usize, usize>)> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let mut hist = BTreeMap::new();
    for s in &trace.samples {
        *hist.entry(s.k).or_insert(0usize) += 1;
    }
    let mut best = (0, 0);
    for (&k, &c) in &hist {
        if c > best.1 {
            best = (k, c);
        }
    }
    Ok((best.0, hist))
}

/// Entrywise mean of sampled membership matrices, `Bbar`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoClusterMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl CoClusterMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        for i in 0..n {
            for j in 0..n {
                let v = entries[i * n + j];
                if !(0.0..=1.0).contains(&v) || v != entries[j * n + i] {
                    return Err(Error::invalid("co-clustering entries must be symmetric and in [0, 1]"));
                }
            }
        }
        Ok(CoClusterMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
}

/// Fraction of samples in which each pair shares a cluster. Counts are
/// accumulated as integers from label vectors, so the result is exactly
/// symmetric.
pub fn coclustering_mean(trace: &ChainTrace) -> Result<CoClusterMatrix> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let n = trace.n();
    let mut counts = vec![0u64; n * n];
    for s in &trace.samples {
        if s.labels.len() != n {
            return Err(Error::LengthMismatch {
                left: s.labels.len(),
                right: n,
            });
        }
        for i in 0..n {
            let li = s.labels[i];
            for j in i..n {
                if s.labels[j] == li {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let m = trace.len() as f64;
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = counts[i * n + j] as f64 / m;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(CoClusterMatrix { n, entries })
}

/// Greedy extraction at threshold `t`: scanning unassigned rows in order,
/// row `j` claims every unassigned `i` with `Bbar_ji > t`.
pub fn greedy_clusters(bbar: &CoClusterMatrix, t: f64) -> Partition {
    let n = bbar.n();
    let mut raw = vec![usize::MAX; n];
    let mut next = 0;
    for j in 0..n {
        if raw[j] != usize::MAX {
            continue;
        }
        let row = bbar.row(j);
        for i in 0..n {
            if raw[i] == usize::MAX && (i == j || row[i] > t) {
                raw[i] = next;
            }
        }
        next += 1;
    }
    Partition::from_labels(&raw)
}

/// Thresholds `Bbar` back to a membership matrix with `k0` clusters. The
/// threshold walks down `{M-1, .., 1}/M` and stops at the first value that
/// yields `k0` clusters. A single-sample trace uses `t = 1/2`.
pub fn threshold_to_membership(bbar: &CoClusterMatrix, k0: usize, m: usize) -> Result<(MembershipMatrix, f64)> {
    if k0 == 0 || m == 0 {
        return Err(Error::invalid("threshold needs k0 >= 1 and M >= 1"));
    }
    let grid: Vec<f64> = if m == 1 {
        vec![0.5]
    } else {
        (1..m).rev().map(|it| it as f64 / m as f64).collect()
    };
    for t in grid {
        let p = greedy_clusters(bbar, t);
        if p.k() == k0 {
            return Ok((p.membership(), t));
        }
    }
    Err(Error::ThresholdFailed { k0 })
}

/// Members of clusters smaller than `min_size`, and the membership matrix
/// restricted to everything else (original order kept).
pub fn detect_outliers(b: &MembershipMatrix, min_size: usize) -> (Vec<usize>, MembershipMatrix) {
    let p = b.to_partition();
    let outliers: Vec<usize> = (0..p.n()).filter(|&i| p.sizes()[p.labels()[i]] < min_size).collect();
    let kept: Vec<usize> = (0..p.n()).filter(|&i| p.sizes()[p.labels()[i]] >= min_size).collect();
    let sub = Partition::from_labels(&kept.iter().map(|&i| p.labels()[i]).collect::<Vec<_>>());
    (outliers, sub.membership())
}

fn check_len(a: &Partition, b: &Partition) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::LengthMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

fn pairs(m: u64) -> u64 {
    m * m.saturating_sub(1) / 2
}

/// Fraction of pairs on which the two partitions agree. With fewer than two
/// observations there are no pairs and the index is 1.
pub fn rand_index(estimated: &Partition, truth: &Partition) -> Result<f64> {
    check_len(estimated, truth)?;
    let n = estimated.n();
    if n < 2 {
        return Ok(1.0);
    }
    let (ka, kb) = (estimated.k(), truth.k());
    let mut table = vec![0u64; ka * kb];
    for (&a, &b) in estimated.labels().iter().zip(truth.labels()) {
        table[a * kb + b] += 1;
    }
    let both: u64 = table.iter().map(|&c| pairs(c)).sum();
    let same_a: u64 = estimated.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let same_b: u64 = truth.sizes().iter().map(|&c| pairs(c as u64)).sum();
    let total = pairs(n as u64);
    // agreements = together in both + apart in both
    let agree = total + 2 * both - same_a - same_b;
    Ok(agree as f64 / total as f64)
}

/// Sum over estimated clusters of their dominant true-class count, over `n`.
pub fn classification_rate(estimated: &Partition, truth: &Partition) -> Result<f64> {
    check_len(estimated, truth)?;
    let n = estimated.n();
    if n == 0 {
        return Ok(1.0);
    }
    let kb = truth.k();
    let mut table = vec![0usize; estimated.k() * kb];
    for (&a, &b) in estimated.labels().iter().zip(truth.labels()) {
        table[a * kb + b] += 1;
    }
    let hits: usize = table.chunks(kb).map(|row| row.iter().copied().max().unwrap_or(0)).sum();
    Ok(hits as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryResult {
    pub k0: usize,
    pub b_star: MembershipMatrix,
    pub partition: Partition,
    pub t_star: f64,
    pub histogram: BTreeMap<usize, usize>,
    pub outliers: Vec<usize>,
    pub n_samples: usize,
}

/// Mode of `K`, co-clustering mean, thresholding and outlier flags.
pub fn summarize(trace: &ChainTrace, min_size: usize) -> Result<SummaryResult> {
    let (k0, histogram) = mode_cluster_count(trace)?;
    let bbar = coclustering_mean(trace)?;
    let (b_star, t_star) = threshold_to_membership(&bbar, k0, trace.len())?;
    let (outliers, _) = detect_outliers(&b_star, min_size.max(1));
    Ok(SummaryResult {
        k0,
        partition: b_star.to_partition(),
        b_star,
        t_star,
        histogram,
        outliers,
        n_samples: trace.len(),
    })
}
