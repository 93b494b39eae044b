//! Partitions of `{0, .., n-1}` and their membership matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Cluster labels in canonical form: dense `0..K`, numbered by first
/// appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    labels: Vec<usize>,
    sizes: Vec<usize>,
}

impl Partition {
    /// Canonicalizes arbitrary labels.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let mut labels = Vec::with_capacity(raw.len());
        let mut sizes = Vec::new();
        for &r in raw {
            let c = match map.iter().find(|(k, _)| *k == r) {
                Some(&(_, c)) => c,
                None => {
                    map.push((r, sizes.len()));
                    sizes.push(0);
                    sizes.len() - 1
                }
            };
            sizes[c] += 1;
            labels.push(c);
        }
        Partition { labels, sizes }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            sizes: vec![1; n],
        }
    }

    pub fn one_cluster(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            sizes: if n == 0 { Vec::new() } else { vec![n] },
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Number of nonempty clusters.
    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn members(&self, cluster: usize) -> impl Iterator<Item = usize> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c == cluster)
            .map(|(i, _)| i)
    }

    pub fn same_cluster(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }

    pub fn membership(&self) -> MembershipMatrix {
        let n = self.n();
        let mut entries = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = u8::from(self.labels[i] == self.labels[j]);
            }
        }
        MembershipMatrix { n, entries }
    }

    /// Relabels observations: new observation `a` is old observation `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Partition {
        let raw: Vec<usize> = perm.iter().map(|&k| self.labels[k]).collect();
        Partition::from_labels(&raw)
    }
}

/// Binary `n x n` matrix with `B_ij = 1` iff `i` and `j` share a cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipMatrix {
    n: usize,
    entries: Vec<u8>,
}

impl MembershipMatrix {
    /// Validates that `entries` is a disjoint union of all-ones blocks.
    pub fn new(n: usize, entries: Vec<u8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        let m = MembershipMatrix { n, entries };
        let p = m.to_partition_unchecked();
        if p.membership() != m {
            return Err(Error::invalid(
                "not a membership matrix (must be symmetric, unit diagonal, transitive)",
            ));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j] == 1
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    fn to_partition_unchecked(&self) -> Partition {
        let n = self.n;
        let mut raw = vec![usize::MAX; n];
        for i in 0..n {
            if raw[i] == usize::MAX {
                for j in i..n {
                    if self.entries[i * n + j] == 1 && raw[j] == usize::MAX {
                        raw[j] = i;
                    }
                }
                raw[i] = i;
            }
        }
        Partition::from_labels(&raw)
    }

    pub fn to_partition(&self) -> Partition {
        self.to_partition_unchecked()
    }

    pub fn k(&self) -> usize {
        self.to_partition_unchecked().k()
    }
}

impl From<&Partition> for MembershipMatrix {
    fn from(p: &Partition) -> Self {
        p.membership()
    }
}
