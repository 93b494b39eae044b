//! Chinese-restaurant-process prior and the collapsed Gibbs sampler over
//! partitions and `theta`.
//!
//! Each sweep draws `theta` from its discrete grid given the current
//! partition, then reassigns every observation in index order among the
//! existing clusters and one new cluster. `alpha` is integrated out
//! analytically. Emptied clusters are deleted at once.
//!
//! Per-sweep cost is `O(n (n + K) + N_theta K)`: a move updates two cached
//! `R` columns in `O(n)`, and an observation that stays put costs `O(K)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::elastic::GramMatrix;
use crate::error::{Error, Result};
use crate::math::{ln, ln_1p, ln_factorial, log_sum_exp, sample_log_categorical};
use crate::partition::Partition;
use crate::wishart::{estimate_d_eb, log_marg_from_parts, log_marg_value, BlockSums};

/// Log probability of `partition` under a CRP with precision `xi`:
/// `K log xi + sum_j log (n_j - 1)! - sum_{i<n} log(xi + i)`.
pub fn crp_log_prior(partition: &Partition, xi: f64) -> f64 {
    let k = partition.k() as f64;
    let blocks: f64 = partition.sizes().iter().map(|&nj| ln_factorial(nj - 1)).sum();
    let norm: f64 = (0..partition.n()).map(|i| ln(xi + i as f64)).sum();
    k * ln(xi) + blocks - norm
}

/// `sum_{i=1}^{n} xi / (xi + i - 1)`
pub fn expected_cluster_count(xi: f64, n: usize) -> f64 {
    (1..=n).map(|i| xi / (xi + (i - 1) as f64)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreesOfFreedom {
    /// Empirical Bayes from the spectrum of `S`.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    Singletons,
    OneCluster,
    /// Uniform random labels in `0..K`; empty labels are dropped.
    KRandom(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainConfig {
    pub xi: f64,
    pub theta_grid: Vec<f64>,
    pub r: f64,
    pub s: f64,
    pub d: DegreesOfFreedom,
    pub n_sweeps: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub init: Init,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            xi: 1.0,
            theta_grid: vec![0.1, 0.2, 0.3, 0.4, 0.5],
            r: 3.0,
            s: 4.0,
            d: DegreesOfFreedom::Auto,
            n_sweeps: 8000,
            burn_in: 1000,
            seed: 0,
            init: Init::Singletons,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::invalid(alloc::format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        positive("xi", self.xi)?;
        positive("r", self.r)?;
        positive("s", self.s)?;
        if let DegreesOfFreedom::Fixed(d) = self.d {
            positive("d", d)?;
        }
        if self.theta_grid.is_empty() {
            return Err(Error::invalid("theta grid is empty"));
        }
        for &t in &self.theta_grid {
            positive("theta grid value", t)?;
        }
        if self.burn_in >= self.n_sweeps {
            return Err(Error::invalid(alloc::format!(
                "burn_in ({}) must be smaller than n_sweeps ({})",
                self.burn_in,
                self.n_sweeps
            )));
        }
        if self.init == Init::KRandom(0) {
            return Err(Error::invalid("k_random needs K >= 1"));
        }
        Ok(())
    }

    fn resolve_d(&self, s: &GramMatrix) -> Result<f64> {
        match self.d {
            DegreesOfFreedom::Fixed(d) => Ok(d),
            DegreesOfFreedom::Auto => estimate_d_eb(s),
        }
    }
}

/// Sampler state. Internal cluster indices are dense but not canonical;
/// use [`ChainState::partition`] for the canonical form.
#[derive(Debug, Clone)]
pub struct ChainState {
    labels: Vec<usize>,
    theta: f64,
    d: f64,
    sums: BlockSums,
    rng: ChaCha8Rng,
}

impl ChainState {
    pub fn new(s: &GramMatrix, config: &ChainConfig) -> Result<Self> {
        config.validate()?;
        let d = config.resolve_d(s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let n = s.n();
        let labels = match config.init {
            Init::Singletons => Partition::singletons(n),
            Init::OneCluster => Partition::one_cluster(n),
            Init::KRandom(k) => {
                use rand::Rng;
                let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
                Partition::from_labels(&raw)
            }
        }
        .labels()
        .to_vec();
        let sums = BlockSums::from_labels(s, &labels)?;
        Ok(ChainState {
            labels,
            theta: config.theta_grid[0],
            d,
            sums,
            rng,
        })
    }

    /// Starts from a given partition.
    pub fn with_partition(s: &GramMatrix, config: &ChainConfig, partition: &Partition) -> Result<Self> {
        let mut state = ChainState::new(s, config)?;
        if partition.n() != s.n() {
            return Err(Error::LengthMismatch {
                left: partition.n(),
                right: s.n(),
            });
        }
        state.labels = partition.labels().to_vec();
        state.sums = BlockSums::from_labels(s, &state.labels)?;
        Ok(state)
    }

    pub fn partition(&self) -> Partition {
        Partition::from_labels(&self.labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn sums(&self) -> &BlockSums {
        &self.sums
    }

    pub fn k(&self) -> usize {
        self.sums.k()
    }

    fn log_marg(&self, s: &GramMatrix, theta: f64, config: &ChainConfig) -> Result<f64> {
        log_marg_from_parts(
            s.n(),
            self.sums.trace_s(),
            self.sums.sbar(),
            self.sums.sizes(),
            theta,
            self.d,
            config.r,
            config.s,
        )
    }

    /// Unnormalized log posterior of the current `(partition, theta)`, with
    /// `alpha` integrated out and the uniform `theta` prior dropped.
    pub fn log_posterior(&self, s: &GramMatrix, config: &ChainConfig) -> Result<f64> {
        Ok(self.log_marg(s, self.theta, config)? + crp_log_prior(&self.partition(), config.xi))
    }
}

/// Log weights of the theta grid under the current partition.
pub fn theta_log_weights(state: &ChainState, s: &GramMatrix, config: &ChainConfig) -> Vec<f64> {
    config
        .theta_grid
        .iter()
        .map(|&t| state.log_marg(s, t, config).unwrap_or(f64::NEG_INFINITY))
        .collect()
}

/// Draws `theta` from its full conditional and stores it in `state`.
pub fn sample_theta(state: &mut ChainState, s: &GramMatrix, config: &ChainConfig) -> Result<f64> {
    let w = theta_log_weights(state, s, config);
    let g = sample_log_categorical(&w, &mut state.rng).ok_or(Error::DegenerateThetaGrid)?;
    state.theta = config.theta_grid[g];
    Ok(state.theta)
}

/// Candidate clusters for observation `i` with their unnormalized log
/// posterior weights. The last candidate is always a new cluster.
#[derive(Debug, Clone, PartialEq)]
pub struct ReassignWeights {
    /// Internal cluster index per candidate; `None` opens a new cluster.
    pub clusters: Vec<Option<usize>>,
    pub log_weights: Vec<f64>,
}

/// Computes the reassignment weights for observation `i` after removing it
/// from its cluster. Uses only cached sums, `O(K)`.
pub fn reassign_log_weights(
    state: &ChainState,
    s: &GramMatrix,
    i: usize,
    config: &ChainConfig,
) -> Result<ReassignWeights> {
    let n = s.n();
    if i >= n {
        return Err(Error::LengthMismatch { left: i, right: n });
    }
    let theta = state.theta;
    let sums = &state.sums;
    let c = state.labels[i];
    let sii = s.get(i, i);
    let k = sums.k();

    // cluster j with observation i removed
    let reduced = |j: usize| -> (usize, f64, f64) {
        let (nj, sb, rij) = (sums.sizes()[j], sums.sbar()[j], sums.row_cluster_sum(i, j));
        if j == c {
            (nj - 1, sb - 2.0 * rij + sii, rij - sii)
        } else {
            (nj, sb, rij)
        }
    };
    let frac = |sb: f64, nj: usize| theta * sb / (1.0 + nj as f64 * theta);

    let mut log_det0 = 0.0;
    let mut q0 = sums.trace_s();
    for j in 0..k {
        let (nj, sb, _) = reduced(j);
        if nj > 0 {
            log_det0 += ln_1p(theta * nj as f64);
            q0 -= frac(sb, nj);
        }
    }

    let mut clusters = Vec::with_capacity(k + 1);
    let mut log_weights = Vec::with_capacity(k + 1);
    let score = |log_det: f64, q: f64| log_marg_value(n, log_det, q, theta, state.d, config.r, config.s).ok();
    for j in 0..k {
        let (nj, sb, rij) = reduced(j);
        if nj == 0 {
            continue;
        }
        let sb_plus = sb + 2.0 * rij + sii;
        let log_det = log_det0 - ln_1p(theta * nj as f64) + ln_1p(theta * (nj + 1) as f64);
        let q = q0 + frac(sb, nj) - frac(sb_plus, nj + 1);
        clusters.push(Some(j));
        log_weights.push(score(log_det, q).map_or(f64::NEG_INFINITY, |v| v + ln(nj as f64)));
    }
    let log_det = log_det0 + ln_1p(theta);
    let q = q0 - frac(sii, 1);
    clusters.push(None);
    log_weights.push(score(log_det, q).map_or(f64::NEG_INFINITY, |v| v + ln(config.xi)));
    Ok(ReassignWeights { clusters, log_weights })
}

/// One Gibbs update of observation `i`'s cluster.
pub fn gibbs_reassign(state: &mut ChainState, s: &GramMatrix, i: usize, config: &ChainConfig) -> Result<()> {
    let w = reassign_log_weights(state, s, i, config)?;
    let pick = sample_log_categorical(&w.log_weights, &mut state.rng).ok_or(Error::NonPositiveBracket {
        theta: state.theta,
        bracket: f64::NAN,
    })?;
    let c = state.labels[i];
    let singleton = state.sums.sizes()[c] == 1;
    let to = match w.clusters[pick] {
        Some(j) if j == c => return Ok(()),
        None if singleton => return Ok(()),
        Some(j) => j,
        None => state.sums.k(),
    };
    state.sums.update(s, &mut state.labels, i, c, to)
}

/// One full sweep: `theta` draw followed by a reassignment scan.
pub fn sweep(state: &mut ChainState, s: &GramMatrix, config: &ChainConfig) -> Result<()> {
    sample_theta(state, s, config)?;
    for i in 0..s.n() {
        gibbs_reassign(state, s, i, config)?;
    }
    Ok(())
}

/// Monotonic clock used to time sweeps. The core crate has no clock of its
/// own; see [`NoClock`].
pub trait Stopwatch {
    /// Nanoseconds since some fixed origin.
    fn now_nanos(&self) -> u64;
}

/// Always reads zero.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Stopwatch for NoClock {
    fn now_nanos(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub sweep: usize,
    pub theta: f64,
    pub k: usize,
    /// canonical labels
    pub labels: Vec<usize>,
    pub log_posterior: f64,
}

impl TraceSample {
    pub fn partition(&self) -> Partition {
        Partition::from_labels(&self.labels)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrace {
    pub samples: Vec<TraceSample>,
    /// wall time of every sweep, including burn-in
    pub sweep_nanos: Vec<u64>,
    /// resolved degrees of freedom
    pub d: f64,
}

impl ChainTrace {
    /// A trace made of bare partitions, for summaries of external samples.
    pub fn from_partitions<I: IntoIterator<Item = Partition>>(parts: I) -> Self {
        let samples = parts
            .into_iter()
            .enumerate()
            .map(|(sweep, p)| TraceSample {
                sweep,
                theta: f64::NAN,
                k: p.k(),
                labels: p.labels().to_vec(),
                log_posterior: f64::NAN,
            })
            .collect();
        ChainTrace {
            samples,
            sweep_nanos: Vec::new(),
            d: f64::NAN,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of observations, or 0 for an empty trace.
    pub fn n(&self) -> usize {
        self.samples.first().map_or(0, |s| s.labels.len())
    }
}

pub fn run_chain(s: &GramMatrix, config: &ChainConfig) -> Result<ChainTrace> {
    run_chain_timed(s, config, &NoClock)
}

/// Runs the collapsed Gibbs sampler and records every post-burn-in
/// sweep. Deterministic given `config.seed`.
pub fn run_chain_timed<C: Stopwatch + ?Sized>(s: &GramMatrix, config: &ChainConfig, clock: &C) -> Result<ChainTrace> {
    let mut state = ChainState::new(s, config)?;
    let mut samples = Vec::with_capacity(config.n_sweeps - config.burn_in);
    let mut sweep_nanos = Vec::with_capacity(config.n_sweeps);
    for it in 0..config.n_sweeps {
        let t0 = clock.now_nanos();
        sweep(&mut state, s, config)?;
        sweep_nanos.push(clock.now_nanos().saturating_sub(t0));
        #[cfg(debug_assertions)]
        {
            let dev = state.sums.max_deviation(s, &state.labels)?;
            let scale = 1.0 + s.entries().iter().fold(0.0f64, |m, x| m.max(libm::fabs(*x))) * s.n() as f64;
            if !(dev <= 1e-8 * scale) {
                return Err(Error::InconsistentCache);
            }
        }
        if it >= config.burn_in {
            let p = state.partition();
            samples.push(TraceSample {
                sweep: it,
                theta: state.theta,
                k: p.k(),
                log_posterior: state.log_marg(s, state.theta, config)? + crp_log_prior(&p, config.xi),
                labels: p.labels().to_vec(),
            });
        }
    }
    Ok(ChainTrace {
        samples,
        sweep_nanos,
        d: state.d,
    })
}

/// Largest `n` accepted by [`enumerate_posterior`].
pub const MAX_ENUMERATE: usize = 10;

/// Calls `f` on every set partition of `0..n` as a restricted growth string.
pub fn for_each_partition<F: FnMut(&[usize])>(n: usize, mut f: F) {
    if n == 0 {
        f(&[]);
        return;
    }
    let mut a = vec![0usize; n];
    // max label among a[..i], per position
    let mut m = vec![0usize; n];
    loop {
        f(&a);
        // rightmost position that can be incremented
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if a[i] <= m[i - 1] {
                break;
            }
            i -= 1;
        }
        a[i] += 1;
        m[i] = m[i - 1].max(a[i]);
        for j in i + 1..n {
            a[j] = 0;
            m[j] = m[i];
        }
    }
}

/// Exact posterior over every set partition, with `theta` marginalized over
/// its uniform grid. Probabilities are normalized.
pub fn enumerate_posterior(s: &GramMatrix, config: &ChainConfig) -> Result<Vec<(Partition, f64)>> {
    let n = s.n();
    if n > MAX_ENUMERATE {
        return Err(Error::TooLargeToEnumerate(n));
    }
    positive("xi", config.xi)?;
    positive("r", config.r)?;
    positive("s", config.s)?;
    if config.theta_grid.is_empty() {
        return Err(Error::invalid("theta grid is empty"));
    }
    for &t in &config.theta_grid {
        positive("theta grid value", t)?;
    }
    let d = config.resolve_d(s)?;
    let ln_m = ln(config.theta_grid.len() as f64);
    let mut out = Vec::new();
    let mut logs = Vec::new();
    let mut err = None;
    for_each_partition(n, |labels| {
        if err.is_some() {
            return;
        }
        let p = Partition::from_labels(labels);
        let sums = match BlockSums::from_labels(s, labels) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let per_theta: Vec<f64> = config
            .theta_grid
            .iter()
            .map(|&t| {
                log_marg_from_parts(n, sums.trace_s(), sums.sbar(), sums.sizes(), t, d, config.r, config.s)
                    .unwrap_or(f64::NEG_INFINITY)
            })
            .collect();
        logs.push(log_sum_exp(&per_theta) - ln_m + crp_log_prior(&p, config.xi));
        out.push(p);
    });
    if let Some(e) = err {
        return Err(e);
    }
    let z = log_sum_exp(&logs);
    if !z.is_finite() {
        return Err(Error::DegenerateThetaGrid);
    }
    Ok(out
        .into_iter()
        .zip(logs)
        .map(|(p, l)| (p, crate::math::exp(l - z)))
        .collect())
}
