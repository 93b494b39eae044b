//! Sampler against exact enumeration, plus independent checks of the
//! spectrum-based degrees of freedom, the co-clustering mean and the
//! agreement metrics.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapeclust_core::crp::{enumerate_posterior, run_chain, ChainConfig, DegreesOfFreedom, Init};
use shapeclust_core::summary::{classification_rate, coclustering_mean, rand_index, summarize};
use shapeclust_core::wishart::estimate_d_eb;
use shapeclust_core::{ChainTrace, GramMatrix, GramMode, Partition};

fn block_gram(groups: &[usize], within: f64, between: f64) -> GramMatrix {
    let n = groups.len();
    let e = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            if i == j {
                1.0
            } else if groups[i] == groups[j] {
                within
            } else {
                between
            }
        })
        .collect();
    GramMatrix::from_entries(n, e, GramMode::Euclidean).unwrap()
}

fn total_variation(trace: &ChainTrace, exact: &[(Partition, f64)]) -> f64 {
    let mut freq: HashMap<Vec<usize>, f64> = HashMap::new();
    for s in &trace.samples {
        *freq.entry(s.labels.clone()).or_default() += 1.0 / trace.len() as f64;
    }
    0.5 * exact
        .iter()
        .map(|(p, pr)| (freq.get(p.labels()).copied().unwrap_or(0.0) - pr).abs())
        .sum::<f64>()
}

#[test]
fn chain_matches_enumeration_n5() {
    let s = block_gram(&[0, 0, 1, 1, 1], 0.8, 0.2);
    for (d, init) in [(4.0, Init::Singletons), (12.0, Init::OneCluster)] {
        let config = ChainConfig {
            xi: 1.0,
            theta_grid: vec![0.1, 0.3, 0.5],
            d: DegreesOfFreedom::Fixed(d),
            n_sweeps: 40_000,
            burn_in: 500,
            seed: 9,
            init,
            ..ChainConfig::default()
        };
        let exact = enumerate_posterior(&s, &config).unwrap();
        let trace = run_chain(&s, &config).unwrap();
        let tv = total_variation(&trace, &exact);
        assert!(tv < 0.05, "d={d}: tv={tv}");
    }
}

/// Cyclic Jacobi rotations.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let tau = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (1.0 + t * t).sqrt(), t / (1.0 + t * t).sqrt());
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (lo, hi) = a.split_at_mut(q);
                for (x, y) in lo[p].iter_mut().zip(hi[0].iter_mut()) {
                    let (apk, aqk) = (*x, *y);
                    *x = c * apk - s * aqk;
                    *y = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

#[test]
fn degrees_of_freedom_match_jacobi() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let n = rng.random_range(3..15);
        let rank = rng.random_range(1..=n);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..rank).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| x[i].iter().zip(&x[j]).map(|(a, b)| a * b).sum())
                    .collect()
            })
            .collect();
        let mut eig = jacobi_eigenvalues(rows.clone());
        eig.retain(|&l| l > 0.0);
        eig.sort_by(|a, b| b.total_cmp(a));
        let total: f64 = eig.iter().sum();
        let mut acc = 0.0;
        let mut expect = eig.len();
        for (k, l) in eig.iter().enumerate() {
            acc += l;
            if acc / total >= 0.95 {
                expect = k + 1;
                break;
            }
        }
        let s = GramMatrix::from_entries(n, rows.concat(), GramMode::Euclidean).unwrap();
        assert_eq!(estimate_d_eb(&s).unwrap(), expect as f64);
    }
}

fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Partition {
    let k = rng.random_range(1..=n);
    Partition::from_labels(&(0..n).map(|_| rng.random_range(0..k)).collect::<Vec<_>>())
}

#[test]
fn metrics_match_pair_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.random_range(2..=20);
        let (a, b) = (random_partition(n, &mut rng), random_partition(n, &mut rng));
        let mut agree = 0;
        let mut pairs = 0;
        for i in 0..n {
            for j in i + 1..n {
                pairs += 1;
                if a.same_cluster(i, j) == b.same_cluster(i, j) {
                    agree += 1;
                }
            }
        }
        assert_eq!(rand_index(&a, &b).unwrap(), agree as f64 / pairs as f64);

        let mut hits = 0;
        for c in 0..a.k() {
            let mut counts = vec![0; b.k()];
            a.members(c).for_each(|i| counts[b.labels()[i]] += 1);
            hits += counts.into_iter().max().unwrap();
        }
        assert_eq!(classification_rate(&a, &b).unwrap(), hits as f64 / n as f64);
    }
}

#[test]
fn coclustering_matches_direct_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let n = 12;
    let parts: Vec<Partition> = (0..1000).map(|_| random_partition(n, &mut rng)).collect();
    let trace = ChainTrace::from_partitions(parts.clone());
    let bbar = coclustering_mean(&trace).unwrap();
    let mut direct = vec![0.0; n * n];
    for p in &parts {
        let b = p.membership();
        for (d, &v) in direct.iter_mut().zip(b.entries()) {
            *d += v as f64;
        }
    }
    for (x, y) in direct.iter().zip(bbar.entries()) {
        assert!((x / 1000.0 - y).abs() < 1e-12);
    }
}

#[test]
fn dominant_partition_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let n = rng.random_range(3..=20);
        let b0 = random_partition(n, &mut rng);
        let mut parts = vec![b0.clone(); 900];
        parts.extend((0..100).map(|_| random_partition(n, &mut rng)));
        let result = summarize(&ChainTrace::from_partitions(parts), 1).unwrap();
        assert_eq!(result.k0, b0.k());
        assert_eq!(result.partition, b0);
    }
}
