//! Bayesian clustering of curves by shape.
//!
//! Curves are compared through an elastic inner product that is invariant to
//! translation, scale, rotation and reparameterization. The resulting Gram
//! matrix is modelled with a generalized Wishart likelihood whose scale
//! matrix is `alpha (I + theta B)`, with a Chinese-restaurant-process prior
//! on the membership matrix `B`. A collapsed Gibbs sampler draws partitions
//! and the posterior is summarized by thresholding the co-clustering matrix.
//!
//! The crate is `no_std` (with `alloc`); file formats, parallel Gram
//! assembly and the command line live in the `shapeclust` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too; index loops
// read closer to the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod crp;
pub mod curve;
pub mod elastic;
pub mod error;
pub mod math;
pub mod partition;
pub mod summary;
pub mod wishart;

pub use crp::{
    crp_log_prior, enumerate_posterior, expected_cluster_count, run_chain, run_chain_timed, ChainConfig, ChainState,
    ChainTrace, DegreesOfFreedom, Init, NoClock, Stopwatch, TraceSample,
};
pub use curve::{Curve, CurveSet, DomainKind, PointSet, PreprocessOptions, ShapeClass, ShapeSimOptions, Template};
pub use elastic::{AlignOpts, GramMatrix, GramMode, Reparameterization, Rotation, Srvf};
pub use error::{Error, Result};
pub use partition::{MembershipMatrix, Partition};
pub use summary::{CoClusterMatrix, SummaryResult};
pub use wishart::{BlockSums, WishartParams};
