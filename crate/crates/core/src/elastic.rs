//! Square-root velocity functions and the elastic inner product.
//!
//! Every SRVF lives on the uniform grid `t_k = k / (T - 1)` of `[0, 1]`;
//! integrals use the trapezoidal rule on that grid.
//!
//! The elastic inner product of two curves is the supremum of
//! `<q1, O (q2 o gamma) sqrt(gamma')>` over rotations `O` and warps `gamma`.
//! It is approximated by alternating a dynamic-programming search over
//! monotone lattice paths (for `gamma`) with an SVD Procrustes step (for
//! `O`). The result is the best value found, so it is a lower bound on the
//! true supremum.
//!
//! Gram matrices built this way are not projected onto the PSD cone: the
//! Wishart model only consumes `tr(S)` and block sums, so mild
//! indefiniteness from per-pair alignment is harmless.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::curve::{preprocess, Curve, CurveSet, DomainKind, PointSet, PreprocessOptions};
use crate::error::{Error, Result};
use crate::math::sqrt;

/// Default lattice steps `(d_t, d_gamma)` for the warp search.
pub const DEFAULT_STEPS: [(usize, usize); 7] = [(1, 1), (1, 2), (2, 1), (1, 3), (3, 1), (2, 3), (3, 2)];

/// Discretized SRVF, row-major `T x p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Srvf {
    values: Vec<f64>,
    dim: usize,
    kind: DomainKind,
    unit_length: bool,
}

impl Srvf {
    pub fn new(values: Vec<f64>, dim: usize, kind: DomainKind) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) || values.len() / dim < 2 {
            return Err(Error::invalid("SRVF values must form a T x p array with T >= 2"));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(String::from("SRVF")));
        }
        Ok(Srvf {
            values,
            dim,
            kind,
            unit_length: false,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn is_unit_length(&self) -> bool {
        self.unit_length
    }

    pub fn at(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }

    fn step(&self) -> f64 {
        1.0 / (self.len() - 1) as f64
    }

    /// Linear interpolation at fractional grid index `x`.
    fn interp_into(&self, x: f64, out: &mut [f64]) {
        let last = self.len() - 1;
        let x = x.clamp(0.0, last as f64);
        let k = (libm::floor(x) as usize).min(last.saturating_sub(1));
        let u = x - k as f64;
        let (a, b) = (self.at(k), self.at((k + 1).min(last)));
        for d in 0..self.dim {
            out[d] = a[d] + u * (b[d] - a[d]);
        }
    }

    /// Cyclic shift of a closed SRVF by `shift` distinct samples.
    pub fn cyclic_shift(&self, shift: usize) -> Srvf {
        let m = self.len() - 1;
        let p = self.dim;
        let mut values = Vec::with_capacity(self.values.len());
        for k in 0..m {
            values.extend_from_slice(self.at((k + shift) % m));
        }
        values.extend_from_slice(self.at(shift % m));
        Srvf {
            values,
            dim: p,
            kind: self.kind,
            unit_length: self.unit_length,
        }
    }

    fn with_values(&self, values: Vec<f64>) -> Srvf {
        Srvf {
            values,
            dim: self.dim,
            kind: self.kind,
            unit_length: false,
        }
    }
}

fn q_map(v: &mut [f64]) {
    let norm = sqrt(v.iter().map(|x| x * x).sum());
    if norm == 0.0 {
        v.iter_mut().for_each(|x| *x = 0.0);
    } else {
        let s = sqrt(norm);
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// SRVF `q = beta' / sqrt(|beta'|)` with central differences (one-sided at
/// open endpoints, wrapped for closed curves).
pub fn srvf(curve: &Curve) -> Srvf {
    let p = curve.dim();
    let t = curve.len();
    let inv_h = (t - 1) as f64;
    let mut values = vec![0.0; t * p];
    for k in 0..t {
        let (lo, hi, span) = if k > 0 && k < t - 1 {
            (k - 1, k + 1, 2.0)
        } else {
            match curve.kind() {
                // seam sample: neighbours are 1 and T - 2
                DomainKind::Closed => (t - 2, 1, 2.0),
                DomainKind::Open if k == 0 => (0, 1, 1.0),
                DomainKind::Open => (t - 2, t - 1, 1.0),
            }
        };
        let (a, b) = (curve.point(lo), curve.point(hi));
        let row = &mut values[k * p..(k + 1) * p];
        for d in 0..p {
            row[d] = (b[d] - a[d]) * inv_h / span;
        }
        q_map(row);
    }
    Srvf {
        values,
        dim: p,
        kind: curve.kind(),
        unit_length: false,
    }
}

/// Trapezoidal `integral |q|^2 dt`.
pub fn l2_norm_sq(q: &Srvf) -> f64 {
    trapezoid(q.len(), |k| q.at(k).iter().map(|x| x * x).sum())
}

fn trapezoid(t: usize, f: impl Fn(usize) -> f64) -> f64 {
    let h = 1.0 / (t - 1) as f64;
    let mut acc = 0.5 * (f(0) + f(t - 1));
    for k in 1..t - 1 {
        acc += f(k);
    }
    acc * h
}

fn check_compatible(q1: &Srvf, q2: &Srvf) -> Result<()> {
    if q1.len() != q2.len() {
        return Err(Error::GridMismatch {
            left: q1.len(),
            right: q2.len(),
        });
    }
    if q1.dim() != q2.dim() {
        return Err(Error::DimensionMismatch {
            left: q1.dim(),
            right: q2.dim(),
        });
    }
    Ok(())
}

/// Trapezoidal `integral <q1(t), q2(t)> dt`.
pub fn l2_inner(q1: &Srvf, q2: &Srvf) -> Result<f64> {
    check_compatible(q1, q2)?;
    Ok(dot_unchecked(q1, q2))
}

fn dot_unchecked(q1: &Srvf, q2: &Srvf) -> f64 {
    trapezoid(q1.len(), |k| q1.at(k).iter().zip(q2.at(k)).map(|(a, b)| a * b).sum())
}

/// Divides `q` by its L2 norm so the underlying curve has unit length.
pub fn rescale_unit(q: &Srvf) -> Result<Srvf> {
    let norm = sqrt(l2_norm_sq(q));
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut out = q.with_values(q.values.iter().map(|x| x / norm).collect());
    out.unit_length = true;
    Ok(out)
}

/// A warping function sampled on the SRVF grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Reparameterization {
    gamma: Vec<f64>,
}

impl Reparameterization {
    pub fn new(gamma: Vec<f64>) -> Result<Self> {
        if gamma.len() < 2 {
            return Err(Error::invalid("reparameterization needs at least 2 samples"));
        }
        if gamma.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(String::from("reparameterization")));
        }
        if let Some(k) = gamma.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::NonMonotone(k + 1));
        }
        let last = gamma[gamma.len() - 1];
        if libm::fabs(gamma[0]) > 1e-12 || libm::fabs(last - 1.0) > 1e-12 {
            return Err(Error::BadBoundary);
        }
        Ok(Reparameterization { gamma })
    }

    pub fn identity(t: usize) -> Self {
        let h = 1.0 / (t - 1) as f64;
        Reparameterization {
            gamma: (0..t).map(|k| if k == t - 1 { 1.0 } else { k as f64 * h }).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn len(&self) -> usize {
        self.gamma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gamma.is_empty()
    }

    /// `(self o inner)(t) = self(inner(t))`, by linear interpolation.
    pub fn compose(&self, inner: &Reparameterization) -> Result<Reparameterization> {
        let last = (self.len() - 1) as f64;
        let gamma = inner
            .gamma
            .iter()
            .map(|&s| {
                let x = (s * last).clamp(0.0, last);
                let k = (libm::floor(x) as usize).min(self.len() - 2);
                let u = x - k as f64;
                self.gamma[k] + u * (self.gamma[k + 1] - self.gamma[k])
            })
            .collect();
        Reparameterization::new(gamma)
    }

    /// Central-difference derivative on the grid (one-sided at the ends).
    fn derivative(&self) -> Vec<f64> {
        let t = self.len();
        let inv_h = (t - 1) as f64;
        (0..t)
            .map(|k| {
                let (lo, hi, span) = if k == 0 {
                    (0, 1, 1.0)
                } else if k == t - 1 {
                    (t - 2, t - 1, 1.0)
                } else {
                    (k - 1, k + 1, 2.0)
                };
                (self.gamma[hi] - self.gamma[lo]) * inv_h / span
            })
            .collect()
    }
}

/// An element of `SO(p)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    matrix: Vec<f64>,
    dim: usize,
}

impl Rotation {
    /// Validates `O^T O = I` and `det O = +1` within `1e-10`.
    pub fn new(matrix: Vec<f64>, dim: usize) -> Result<Self> {
        if matrix.len() != dim * dim || dim == 0 {
            return Err(Error::invalid("rotation must be p x p"));
        }
        let m = DMatrix::from_row_slice(dim, dim, &matrix);
        let gram = m.transpose() * &m;
        let off = (gram - DMatrix::<f64>::identity(dim, dim)).abs().max();
        if !(off <= 1e-10) || !(libm::fabs(m.determinant() - 1.0) <= 1e-10) {
            return Err(Error::invalid("matrix is not in SO(p)"));
        }
        Ok(Rotation { matrix, dim })
    }

    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        (0..dim).for_each(|d| matrix[d * dim + d] = 1.0);
        Rotation { matrix, dim }
    }

    /// Planar rotation by `angle` radians.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        Rotation {
            matrix: vec![c, -s, s, c],
            dim: 2,
        }
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transpose(&self) -> Rotation {
        let p = self.dim;
        let mut matrix = vec![0.0; p * p];
        for r in 0..p {
            for c in 0..p {
                matrix[c * p + r] = self.matrix[r * p + c];
            }
        }
        Rotation { matrix, dim: p }
    }

    /// Matrix product `self * rhs`.
    pub fn then_after(&self, rhs: &Rotation) -> Rotation {
        let p = self.dim;
        let mut matrix = vec![0.0; p * p];
        for r in 0..p {
            for c in 0..p {
                matrix[r * p + c] = (0..p).map(|k| self.matrix[r * p + k] * rhs.matrix[k * p + c]).sum();
            }
        }
        Rotation { matrix, dim: p }
    }

    fn apply_row(&self, src: &[f64], dst: &mut [f64]) {
        let p = self.dim;
        for r in 0..p {
            dst[r] = (0..p).map(|c| self.matrix[r * p + c] * src[c]).sum();
        }
    }

    /// Rotates every sample of `q`.
    pub fn apply(&self, q: &Srvf) -> Srvf {
        let p = self.dim;
        let mut values = vec![0.0; q.values.len()];
        for (src, dst) in q.values.chunks_exact(p).zip(values.chunks_exact_mut(p)) {
            self.apply_row(src, dst);
        }
        let mut out = q.with_values(values);
        out.unit_length = q.unit_length;
        out
    }
}

/// Group action `((O, gamma), q) = O (q o gamma) sqrt(gamma')`.
///
/// `q o gamma` uses linear interpolation on the grid; `gamma'` uses central
/// differences.
pub fn apply_group(q: &Srvf, rotation: &Rotation, gamma: &Reparameterization) -> Result<Srvf> {
    if rotation.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: rotation.dim(),
            right: q.dim(),
        });
    }
    if gamma.len() != q.len() {
        return Err(Error::GridMismatch {
            left: gamma.len(),
            right: q.len(),
        });
    }
    if let Some(k) = gamma.gamma.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::NonMonotone(k + 1));
    }
    let p = q.dim();
    let last = (q.len() - 1) as f64;
    let slope = gamma.derivative();
    let mut warped = vec![0.0; q.values.len()];
    let mut tmp = vec![0.0; p];
    for (k, row) in warped.chunks_exact_mut(p).enumerate() {
        q.interp_into(gamma.gamma[k] * last, &mut tmp);
        let w = sqrt(slope[k].max(0.0));
        tmp.iter_mut().for_each(|x| *x *= w);
        rotation.apply_row(&tmp, row);
    }
    Ok(q.with_values(warped))
}

/// Contribution of one lattice edge `(k, l) -> (k + dt, l + dg)` to the
/// discretized `integral <q1(t), q2(gamma(t))> sqrt(gamma'(t)) dt`, with
/// `gamma` linear on the edge.
///
/// The edge is split into `max(dt, dg)` equal substeps so both SRVFs are
/// sampled at least once per grid cell; a `(1, 1)` edge reduces to one
/// trapezoid panel, so the identity path reproduces [`l2_inner`].
fn edge_weight(q1: &Srvf, q2: &Srvf, k: usize, l: usize, dt: usize, dg: usize, buf: &mut [f64]) -> f64 {
    let p = q1.dim();
    let m = dt.max(dg);
    let (a, b) = buf.split_at_mut(p);
    let mut acc = 0.0;
    for s in 0..=m {
        let u = s as f64 / m as f64;
        q1.interp_into(k as f64 + u * dt as f64, a);
        q2.interp_into(l as f64 + u * dg as f64, b);
        let f: f64 = a.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
        acc += if s == 0 || s == m { 0.5 * f } else { f };
    }
    let h = q1.step();
    sqrt(dg as f64 / dt as f64) * (dt as f64 * h / m as f64) * acc
}

/// Warp maximizing the discretized inner product over monotone lattice
/// paths with the default step set; returns the warp and the path value.
pub fn dp_reparam(q1: &Srvf, q2: &Srvf) -> Result<(Reparameterization, f64)> {
    dp_reparam_with_steps(q1, q2, &DEFAULT_STEPS)
}

/// [`dp_reparam`] with a caller-supplied step set.
pub fn dp_reparam_with_steps(q1: &Srvf, q2: &Srvf, steps: &[(usize, usize)]) -> Result<(Reparameterization, f64)> {
    check_compatible(q1, q2)?;
    let t = q1.len();
    if t < 3 {
        return Err(Error::invalid("dynamic programming needs T >= 3"));
    }
    if steps.is_empty() || steps.iter().any(|&(a, b)| a == 0 || b == 0) {
        return Err(Error::invalid("lattice steps must be positive"));
    }
    let p = q1.dim();
    let mut buf = vec![0.0; 2 * p];
    let mut value = vec![f64::NEG_INFINITY; t * t];
    let mut from = vec![usize::MAX; t * t];
    value[0] = 0.0;
    for i in 1..t {
        for j in 1..t {
            let mut best = f64::NEG_INFINITY;
            let mut arg = usize::MAX;
            for (s, &(dt, dg)) in steps.iter().enumerate() {
                if dt > i || dg > j {
                    continue;
                }
                let (k, l) = (i - dt, j - dg);
                let base = value[k * t + l];
                if base == f64::NEG_INFINITY {
                    continue;
                }
                let v = base + edge_weight(q1, q2, k, l, dt, dg, &mut buf);
                // strict comparison keeps the earliest step on ties
                if v > best {
                    best = v;
                    arg = s;
                }
            }
            value[i * t + j] = best;
            from[i * t + j] = arg;
        }
    }
    let total = value[t * t - 1];
    if !total.is_finite() {
        return Err(Error::invalid(
            "no monotone lattice path reaches (T, T) with these steps",
        ));
    }

    let h = 1.0 / (t - 1) as f64;
    let mut gamma = vec![0.0; t];
    let (mut i, mut j) = (t - 1, t - 1);
    while i > 0 {
        let (dt, dg) = steps[from[i * t + j]];
        let (k, l) = (i - dt, j - dg);
        for a in k..=i {
            gamma[a] = (l as f64 + (a - k) as f64 * dg as f64 / dt as f64) * h;
        }
        i = k;
        j = l;
    }
    gamma[t - 1] = 1.0;
    Ok((Reparameterization { gamma }, total))
}

/// Rotation `O in SO(p)` maximizing `<q1, O q2>`, from the SVD of
/// `A = integral q1 q2^T dt`.
pub fn procrustes_rotation(q1: &Srvf, q2: &Srvf) -> Result<Rotation> {
    check_compatible(q1, q2)?;
    let p = q1.dim();
    let mut a = DMatrix::<f64>::zeros(p, p);
    let t = q1.len();
    let h = q1.step();
    for k in 0..t {
        let w = if k == 0 || k == t - 1 { 0.5 * h } else { h };
        let (x, y) = (q1.at(k), q2.at(k));
        for r in 0..p {
            for c in 0..p {
                a[(r, c)] += w * x[r] * y[c];
            }
        }
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::SvdFailure);
    }
    let svd = a.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::SvdFailure),
    };
    let mut diag = DMatrix::<f64>::identity(p, p);
    if (&u * &v_t).determinant() < 0.0 {
        let (weakest, _) = svd
            .singular_values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, &s)| if s < acc.1 { (k, s) } else { acc });
        diag[(weakest, weakest)] = -1.0;
    }
    let o = u * diag * v_t;
    let mut matrix = Vec::with_capacity(p * p);
    for r in 0..p {
        for c in 0..p {
            matrix.push(o[(r, c)]);
        }
    }
    Ok(Rotation { matrix, dim: p })
}

/// Options for the alternating warp/rotation search.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignOpts {
    pub max_iters: usize,
    pub tol: f64,
    /// Seam candidates for closed curves; `None` means `T / 5`.
    pub n_seeds: Option<usize>,
    pub steps: Vec<(usize, usize)>,
}

impl Default for AlignOpts {
    fn default() -> Self {
        AlignOpts {
            max_iters: 5,
            tol: 1e-6,
            n_seeds: None,
            steps: DEFAULT_STEPS.to_vec(),
        }
    }
}

/// Best alignment found for a pair of SRVFs.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment {
    pub value: f64,
    pub rotation: Rotation,
    pub gamma: Reparameterization,
    /// cyclic seam shift applied to `q2` (closed curves)
    pub shift: usize,
    /// best value after the start and after each alternation round
    pub history: Vec<f64>,
}

/// Elastic inner product: the best `<q1, (O, gamma) q2>` found.
pub fn elastic_inner_product(q1: &Srvf, q2: &Srvf, opts: &AlignOpts) -> Result<f64> {
    Ok(align(q1, q2, opts)?.value)
}

/// Full alignment result behind [`elastic_inner_product`].
pub fn align(q1: &Srvf, q2: &Srvf, opts: &AlignOpts) -> Result<Alignment> {
    check_compatible(q1, q2)?;
    if q1.kind() != q2.kind() {
        return Err(Error::DomainMismatch);
    }
    match q1.kind() {
        DomainKind::Open => align_open(q1, q2, 0, opts),
        DomainKind::Closed => {
            let m = q1.len() - 1;
            let seeds = opts.n_seeds.unwrap_or(q1.len() / 5).clamp(1, m);
            let mut best: Option<Alignment> = None;
            for s in 0..seeds {
                let shift = s * m / seeds;
                let shifted = q2.cyclic_shift(shift);
                let a = align_open(q1, &shifted, shift, opts)?;
                if best.as_ref().is_none_or(|b| a.value > b.value) {
                    best = Some(a);
                }
            }
            Ok(best.expect("at least one seam seed"))
        }
    }
}

/// Alternation for a fixed seam. Starts from the identity, seeds the
/// rotation with a Procrustes step at the identity warp, then alternates DP
/// and Procrustes. Warped SRVFs are rescaled back to `|q2|`, restoring the
/// isometry that grid interpolation loses.
fn align_open(q1: &Srvf, q2: &Srvf, shift: usize, opts: &AlignOpts) -> Result<Alignment> {
    let p = q1.dim();
    let t = q1.len();
    let norm2 = sqrt(l2_norm_sq(q2));
    let mut best = Alignment {
        value: dot_unchecked(q1, q2),
        rotation: Rotation::identity(p),
        gamma: Reparameterization::identity(t),
        shift,
        history: Vec::with_capacity(opts.max_iters + 2),
    };
    let seeded = procrustes_rotation(q1, q2)?;
    let v = dot_unchecked(q1, &seeded.apply(q2));
    if v > best.value {
        best.value = v;
        best.rotation = seeded;
    }
    best.history.push(best.value);

    let mut rotation = best.rotation.clone();
    for _ in 0..opts.max_iters {
        let (gamma, _) = dp_reparam_with_steps(q1, &rotation.apply(q2), &opts.steps)?;
        let mut warped = apply_group(q2, &Rotation::identity(p), &gamma)?;
        let wn = sqrt(l2_norm_sq(&warped));
        if wn > 0.0 {
            let f = norm2 / wn;
            warped.values.iter_mut().for_each(|x| *x *= f);
        }
        rotation = procrustes_rotation(q1, &warped)?;
        let v = dot_unchecked(q1, &rotation.apply(&warped));
        let gain = v - best.value;
        if v > best.value {
            best.value = v;
            best.rotation = rotation.clone();
            best.gamma = gamma;
        }
        best.history.push(best.value);
        if gain < opts.tol {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramMode {
    Elastic,
    Euclidean,
}

/// Symmetric `n x n` matrix of pairwise inner products, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
    mode: GramMode,
    ids: Vec<String>,
}

impl GramMatrix {
    /// Validates squareness, finiteness and symmetry within `1e-9`.
    pub fn new(n: usize, entries: Vec<f64>, mode: GramMode, ids: Vec<String>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::NotSquare {
                rows: n,
                cols: entries.len().checked_div(n).unwrap_or(0),
            });
        }
        if n == 0 {
            return Err(Error::Empty);
        }
        if ids.len() != n {
            return Err(Error::LengthMismatch {
                left: ids.len(),
                right: n,
            });
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(String::from("Gram matrix")));
        }
        for i in 0..n {
            for j in i + 1..n {
                if libm::fabs(entries[i * n + j] - entries[j * n + i]) > 1e-9 {
                    return Err(Error::invalid("Gram matrix is not symmetric"));
                }
            }
        }
        Ok(GramMatrix { n, entries, mode, ids })
    }

    /// Gram matrix with generated ids `0, 1, ...`.
    pub fn from_entries(n: usize, entries: Vec<f64>, mode: GramMode) -> Result<Self> {
        let ids = (0..n).map(|i| alloc::format!("{i}")).collect();
        Self::new(n, entries, mode, ids)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn mode(&self) -> GramMode {
        self.mode
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }

    /// Rows and columns reordered so that new index `a` is old `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<GramMatrix> {
        let n = self.n;
        if perm.len() != n {
            return Err(Error::LengthMismatch {
                left: perm.len(),
                right: n,
            });
        }
        let mut entries = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                entries[a * n + b] = self.get(perm[a], perm[b]);
            }
        }
        let ids = perm.iter().map(|&k| self.ids[k].clone()).collect();
        GramMatrix::new(n, entries, self.mode, ids)
    }
}

/// Preprocesses every curve and returns its SRVF, optionally unit-length.
pub fn curve_srvfs(set: &CurveSet, pre: &PreprocessOptions, unit_length: bool) -> Result<Vec<Srvf>> {
    set.curves()
        .iter()
        .map(|c| {
            let q = srvf(&preprocess(c, pre)?);
            if unit_length {
                rescale_unit(&q)
            } else {
                Ok(q)
            }
        })
        .collect()
}

/// One off-diagonal elastic Gram entry; errors carry the pair indices.
pub fn elastic_pair(srvfs: &[Srvf], i: usize, j: usize, opts: &AlignOpts) -> Result<f64> {
    elastic_inner_product(&srvfs[i], &srvfs[j], opts).map_err(|e| Error::Pair {
        i,
        j,
        source: Box::new(e),
    })
}

/// Assembles a Gram matrix from already computed upper-triangle entries
/// (`i < j`, row-major order) and self inner products on the diagonal.
pub fn assemble_elastic_gram(srvfs: &[Srvf], upper: &[f64], ids: Vec<String>) -> Result<GramMatrix> {
    let n = srvfs.len();
    if upper.len() != n * (n.saturating_sub(1)) / 2 {
        return Err(Error::LengthMismatch {
            left: upper.len(),
            right: n * (n.saturating_sub(1)) / 2,
        });
    }
    let mut entries = vec![0.0; n * n];
    let mut it = upper.iter();
    for i in 0..n {
        entries[i * n + i] = l2_norm_sq(&srvfs[i]);
        for j in i + 1..n {
            let v = *it.next().expect("length checked");
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    GramMatrix::new(n, entries, GramMode::Elastic, ids)
}

/// Upper-triangle pairs `(i, j)`, `i < j`, in row-major order.
pub fn upper_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Sequential elastic Gram matrix over SRVFs.
pub fn elastic_gram(srvfs: &[Srvf], ids: Vec<String>, opts: &AlignOpts) -> Result<GramMatrix> {
    let upper = upper_pairs(srvfs.len())
        .map(|(i, j)| elastic_pair(srvfs, i, j, opts))
        .collect::<Result<Vec<_>>>()?;
    assemble_elastic_gram(srvfs, &upper, ids)
}

/// Euclidean Gram matrix `S_ij = <y_i, y_j>`, optionally after centering.
pub fn euclidean_gram(points: &PointSet, center: bool) -> GramMatrix {
    let n = points.len();
    let p = points.dim();
    let mean: Vec<f64> = if center {
        (0..p)
            .map(|d| (0..n).map(|i| points.point(i)[d]).sum::<f64>() / n as f64)
            .collect()
    } else {
        vec![0.0; p]
    };
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..p)
                .map(|d| (points.point(i)[d] - mean[d]) * (points.point(j)[d] - mean[d]))
                .sum();
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    let ids = (0..n).map(|i| alloc::format!("{i}")).collect();
    GramMatrix {
        n,
        entries,
        mode: GramMode::Euclidean,
        ids,
    }
}

/// Input to [`gram_matrix`].
pub enum GramInput<'a> {
    Curves {
        set: &'a CurveSet,
        preprocess: &'a PreprocessOptions,
        unit_length: bool,
    },
    Points {
        set: &'a PointSet,
        center: bool,
    },
}

/// Builds the Gram matrix for curves (elastic) or points (Euclidean).
pub fn gram_matrix(input: GramInput<'_>, opts: &AlignOpts) -> Result<GramMatrix> {
    match input {
        GramInput::Curves {
            set,
            preprocess,
            unit_length,
        } => {
            let srvfs = curve_srvfs(set, preprocess, unit_length)?;
            let ids = set.curves().iter().map(|c| String::from(c.id())).collect();
            elastic_gram(&srvfs, ids, opts)
        }
        GramInput::Points { set, center } => Ok(euclidean_gram(set, center)),
    }
}
