//! Generalized Wishart likelihood of a Gram matrix under
//! `Sigma = alpha (I + theta B)`.
//!
//! For a partition with cluster sizes `n_j` and block sums
//! `Sbar_j = 1_j^T S 1_j`:
//!
//! ```text
//! log |Sigma^-1|      = -n log(alpha) - sum_j log(1 + theta n_j)
//! tr(Sigma^-1 S)      = (tr S - sum_j theta Sbar_j / (1 + n_j theta)) / alpha
//! ```
//!
//! All log-likelihoods drop the partition-independent terms
//! `((d - n - 1)/2) log|S|` and the Wishart normalizer, so they are exact for
//! comparisons across partitions, `alpha` and `theta`.

use alloc::vec;
use alloc::vec::Vec;

use crate::elastic::GramMatrix;
use crate::error::{Error, Result};
use crate::math::{ln, ln_1p};
use crate::partition::Partition;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WishartParams {
    pub alpha: f64,
    pub theta: f64,
    /// degrees of freedom
    pub d: f64,
    /// inverse-gamma shape constant
    pub r: f64,
    /// inverse-gamma scale constant
    pub s: f64,
}

impl WishartParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("theta", self.theta),
            ("d", self.d),
            ("r", self.r),
            ("s", self.s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(alloc::format!("{name} must be positive and finite")));
            }
        }
        Ok(())
    }
}

/// Cached `tr(S)`, per-cluster block sums `Sbar_j`, sizes `n_j`, and the
/// row/cluster sums `R[i][j] = sum_{m in P_j} S_im`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSums {
    trace_s: f64,
    sbar: Vec<f64>,
    sizes: Vec<usize>,
    // cols[j][i] = R[i][j]
    cols: Vec<Vec<f64>>,
}

impl BlockSums {
    /// Computes every sum from scratch. `labels` must be dense in `0..K`.
    pub fn from_labels(s: &GramMatrix, labels: &[usize]) -> Result<Self> {
        let n = s.n();
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: n,
            });
        }
        let k = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut sizes = vec![0usize; k];
        labels.iter().for_each(|&c| sizes[c] += 1);
        if sizes.contains(&0) {
            return Err(Error::invalid("cluster labels must be dense"));
        }
        let mut cols = vec![vec![0.0; n]; k];
        for (i, col_row) in (0..n).map(|i| (i, s.row(i))) {
            for (m, &c) in labels.iter().enumerate() {
                cols[c][i] += col_row[m];
            }
        }
        let mut sbar = vec![0.0; k];
        for (i, &c) in labels.iter().enumerate() {
            sbar[c] += cols[c][i];
        }
        Ok(BlockSums {
            trace_s: s.trace(),
            sbar,
            sizes,
            cols,
        })
    }

    pub fn new(s: &GramMatrix, partition: &Partition) -> Result<Self> {
        Self::from_labels(s, partition.labels())
    }

    pub fn trace_s(&self) -> f64 {
        self.trace_s
    }

    pub fn sbar(&self) -> &[f64] {
        &self.sbar
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    /// `R[i][j]`
    pub fn row_cluster_sum(&self, i: usize, j: usize) -> f64 {
        self.cols[j][i]
    }

    /// Largest absolute deviation from a from-scratch recomputation.
    pub fn max_deviation(&self, s: &GramMatrix, labels: &[usize]) -> Result<f64> {
        let fresh = BlockSums::from_labels(s, labels)?;
        if fresh.sizes != self.sizes {
            return Ok(f64::INFINITY);
        }
        let mut dev = libm::fabs(fresh.trace_s - self.trace_s);
        for (a, b) in fresh.sbar.iter().zip(&self.sbar) {
            dev = dev.max(libm::fabs(a - b));
        }
        for (ca, cb) in fresh.cols.iter().zip(&self.cols) {
            for (a, b) in ca.iter().zip(cb) {
                dev = dev.max(libm::fabs(a - b));
            }
        }
        Ok(dev)
    }

    /// Moves observation `i` from cluster `from` to cluster `to`, where
    /// `to == K` opens a new cluster. An emptied cluster is deleted by
    /// moving the last cluster into its slot; `labels` is updated to match.
    ///
    /// Cost is `O(n)`: the `R` columns of both clusters change.
    pub fn update(&mut self, s: &GramMatrix, labels: &mut [usize], i: usize, from: usize, to: usize) -> Result<()> {
        let k = self.k();
        if from >= k {
            return Err(Error::ClusterOutOfRange { index: from, k });
        }
        if to > k {
            return Err(Error::ClusterOutOfRange { index: to, k });
        }
        if labels.get(i) != Some(&from) {
            return Err(Error::NotInCluster {
                index: i,
                cluster: from,
            });
        }
        if from == to {
            return Ok(());
        }
        let n = s.n();
        let row = s.row(i);
        let sii = row[i];

        if to == k {
            self.sbar.push(0.0);
            self.sizes.push(0);
            self.cols.push(vec![0.0; n]);
        }
        self.sbar[to] += 2.0 * self.cols[to][i] + sii;
        self.sizes[to] += 1;
        for (r, v) in self.cols[to].iter_mut().zip(row) {
            *r += v;
        }

        self.sbar[from] -= 2.0 * self.cols[from][i] - sii;
        self.sizes[from] -= 1;
        for (r, v) in self.cols[from].iter_mut().zip(row) {
            *r -= v;
        }
        labels[i] = to;

        if self.sizes[from] == 0 {
            let last = self.k() - 1;
            self.sbar.swap_remove(from);
            self.sizes.swap_remove(from);
            self.cols.swap_remove(from);
            if last != from {
                labels.iter_mut().filter(|c| **c == last).for_each(|c| *c = from);
            }
        }
        Ok(())
    }
}

/// [`BlockSums::update`] as a free function.
pub fn update_block_sums(
    sums: &mut BlockSums,
    s: &GramMatrix,
    labels: &mut [usize],
    i: usize,
    from: usize,
    to: usize,
) -> Result<()> {
    sums.update(s, labels, i, from, to)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(alloc::format!("{name} must be positive and finite")));
    }
    Ok(())
}

fn check_sums(s: &GramMatrix, partition: &Partition, sums: &BlockSums) -> Result<()> {
    if partition.n() != s.n() || sums.sizes() != partition.sizes() {
        return Err(Error::InconsistentCache);
    }
    #[cfg(debug_assertions)]
    {
        let scale = 1.0 + s.entries().iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x))) * s.n() as f64;
        if !(sums.max_deviation(s, partition.labels())? <= 1e-9 * scale) {
            return Err(Error::InconsistentCache);
        }
    }
    Ok(())
}

/// `sum_j log(1 + theta n_j)`
pub(crate) fn log_det_term(sizes: &[usize], theta: f64) -> f64 {
    sizes.iter().map(|&nj| ln_1p(theta * nj as f64)).sum()
}

/// `tr(S) - sum_j theta Sbar_j / (1 + n_j theta)`
pub(crate) fn quadratic_term(trace_s: f64, sbar: &[f64], sizes: &[usize], theta: f64) -> f64 {
    trace_s
        - sbar
            .iter()
            .zip(sizes)
            .map(|(&sb, &nj)| theta * sb / (1.0 + nj as f64 * theta))
            .sum::<f64>()
}

/// `log |Sigma^-1| = -n log(alpha) - sum_j log(1 + theta n_j)`.
pub fn log_det_sigma_inv(partition: &Partition, alpha: f64, theta: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    check_positive("theta", theta)?;
    Ok(-(partition.n() as f64) * ln(alpha) - log_det_term(partition.sizes(), theta))
}

/// `tr(Sigma^-1 S)` from block sums.
pub fn trace_sigma_inv_s(
    s: &GramMatrix,
    partition: &Partition,
    alpha: f64,
    theta: f64,
    sums: &BlockSums,
) -> Result<f64> {
    check_positive("alpha", alpha)?;
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::invalid("theta must be nonnegative and finite"));
    }
    check_sums(s, partition, sums)?;
    Ok(quadratic_term(sums.trace_s(), sums.sbar(), sums.sizes(), theta) / alpha)
}

/// Log-likelihood `(d/2) log|Sigma^-1| - (d/2) tr(Sigma^-1 S)` up to the
/// partition-independent constant.
pub fn log_lik_full(s: &GramMatrix, partition: &Partition, params: &WishartParams, sums: &BlockSums) -> Result<f64> {
    params.validate()?;
    let half_d = 0.5 * params.d;
    let log_det = log_det_sigma_inv(partition, params.alpha, params.theta)?;
    let tr = trace_sigma_inv_s(s, partition, params.alpha, params.theta, sums)?;
    Ok(half_d * log_det - half_d * tr)
}

/// Log marginal likelihood with `alpha ~ Inv-Gamma(r d/2, s d/2)`
/// integrated out:
///
/// `-(d/2) sum_j log(1 + theta n_j) - ((n + r) d/2) log[(d/2)(Q + s)]`
///
/// where `Q = tr(S) - sum_j theta Sbar_j / (1 + n_j theta)`.
pub fn log_marg_lik(
    s: &GramMatrix,
    partition: &Partition,
    theta: f64,
    d: f64,
    r: f64,
    scale: f64,
    sums: &BlockSums,
) -> Result<f64> {
    check_positive("theta", theta)?;
    check_positive("d", d)?;
    check_positive("r", r)?;
    check_positive("s", scale)?;
    check_sums(s, partition, sums)?;
    log_marg_from_parts(s.n(), sums.trace_s(), sums.sbar(), sums.sizes(), theta, d, r, scale)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn log_marg_from_parts(
    n: usize,
    trace_s: f64,
    sbar: &[f64],
    sizes: &[usize],
    theta: f64,
    d: f64,
    r: f64,
    scale: f64,
) -> Result<f64> {
    let q = quadratic_term(trace_s, sbar, sizes, theta);
    log_marg_value(n, log_det_term(sizes, theta), q, theta, d, r, scale)
}

/// Marginal likelihood from precomputed `sum_j log(1 + theta n_j)` and `Q`.
pub(crate) fn log_marg_value(n: usize, log_det: f64, q: f64, theta: f64, d: f64, r: f64, scale: f64) -> Result<f64> {
    let half_d = 0.5 * d;
    let bracket = half_d * (q + scale);
    if !(bracket > 0.0) {
        return Err(Error::NonPositiveBracket { theta, bracket });
    }
    Ok(-half_d * log_det - (n as f64 + r) * half_d * ln(bracket))
}

/// Empirical-Bayes degrees of freedom: the smallest count of leading
/// eigenvalues holding at least 95% of the nonnegative spectral mass.
/// Negative eigenvalues are ignored.
pub fn estimate_d_eb(s: &GramMatrix) -> Result<f64> {
    let mut eig: Vec<f64> = s
        .to_dmatrix()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .filter(|&l| l > 0.0)
        .collect();
    d_eb_from_eigenvalues(&mut eig)
}

/// [`estimate_d_eb`] on a given spectrum.
pub fn d_eb_from_eigenvalues(eig: &mut [f64]) -> Result<f64> {
    eig.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = eig.iter().filter(|&&l| l > 0.0).sum();
    if !(total > 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    let mut acc = 0.0;
    for (k, &l) in eig.iter().filter(|&&l| l > 0.0).enumerate() {
        acc += l;
        if acc / total >= 0.95 {
            return Ok((k + 1) as f64);
        }
    }
    Ok(eig.iter().filter(|&&l| l > 0.0).count() as f64)
}

/// CRP precision from a preliminary cluster count: `K0 / ln(n)`.
pub fn estimate_xi(k0: usize, n: f64) -> Result<f64> {
    if k0 == 0 || !(n > 1.0) {
        return Err(Error::invalid("estimate_xi needs K0 >= 1 and n > 1"));
    }
    Ok(k0 as f64 / ln(n))
}
