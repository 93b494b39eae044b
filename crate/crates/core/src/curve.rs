//! Curve and point datasets: validation, preprocessing, and simulation.
//!
//! Closed curves are stored with the first sample repeated at the end, so a
//! closed curve with `T` samples has `T - 1` distinct points.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::math::{exp, sqrt};

/// Default number of samples per curve after resampling.
pub const DEFAULT_SAMPLES: usize = 100;

const CLOSURE_SNAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainKind {
    Open,
    Closed,
}

/// A sampled curve `beta: D -> R^p`, stored row-major as `T x p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    id: String,
    dim: usize,
    points: Vec<f64>,
    kind: DomainKind,
}

impl Curve {
    /// Validates and builds a curve.
    ///
    /// For closed curves the seam is enforced: a first/last pair closer than
    /// a small fraction of the curve's extent is replaced by its midpoint,
    /// otherwise the first sample is appended.
    pub fn new(id: impl Into<String>, dim: usize, points: Vec<f64>, kind: DomainKind) -> Result<Self> {
        let id = id.into();
        if dim == 0 {
            return Err(Error::invalid(format!("curve {id}: p must be at least 1")));
        }
        if !points.len().is_multiple_of(dim) {
            return Err(Error::RaggedPoints {
                curve: id,
                len: points.len(),
                dim,
            });
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("curve {id}")));
        }
        let mut curve = Curve { id, dim, points, kind };
        if kind == DomainKind::Closed && curve.len() >= 2 {
            curve.enforce_closure();
        }
        if curve.len() < 3 {
            return Err(Error::TooFewSamples {
                curve: curve.id,
                len: curve.points.len() / dim,
            });
        }
        Ok(curve)
    }

    pub fn open(id: impl Into<String>, dim: usize, points: Vec<f64>) -> Result<Self> {
        Self::new(id, dim, points, DomainKind::Open)
    }

    pub fn closed(id: impl Into<String>, dim: usize, points: Vec<f64>) -> Result<Self> {
        Self::new(id, dim, points, DomainKind::Closed)
    }

    /// Builds a curve from a list of rows, each of length `p`.
    pub fn from_rows(id: impl Into<String>, rows: &[Vec<f64>], kind: DomainKind) -> Result<Self> {
        let id = id.into();
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::TooFewSamples {
                curve: id,
                len: rows.len(),
            });
        }
        let mut points = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::InconsistentDimension {
                    curve: id,
                    got: row.len(),
                    expected: dim,
                });
            }
            points.extend_from_slice(row);
        }
        Self::new(id, dim, points, kind)
    }

    fn enforce_closure(&mut self) {
        let p = self.dim;
        let t = self.len();
        let gap = dist(&self.points[..p], &self.points[(t - 1) * p..]);
        if gap == 0.0 {
            return;
        }
        let extent = self.extent();
        if gap <= CLOSURE_SNAP * extent {
            for d in 0..p {
                let mid = 0.5 * (self.points[d] + self.points[(t - 1) * p + d]);
                self.points[d] = mid;
                self.points[(t - 1) * p + d] = mid;
            }
        } else {
            let first = self.points[..p].to_vec();
            self.points.extend_from_slice(&first);
        }
    }

    fn extent(&self) -> f64 {
        let mut ext: f64 = 0.0;
        for d in 0..self.dim {
            let (lo, hi) = self
                .points
                .iter()
                .skip(d)
                .step_by(self.dim)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                    (lo.min(x), hi.max(x))
                });
            ext = ext.max(hi - lo);
        }
        ext
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn set_id(&mut self, id: impl Into<String>) {
        self.id = id.into();
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples `T`.
    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn is_closed(&self) -> bool {
        self.kind == DomainKind::Closed
    }

    /// Row-major `T x p` coordinates.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    pub fn arc_length(&self) -> f64 {
        self.rows().zip(self.rows().skip(1)).map(|(a, b)| dist(a, b)).sum()
    }

    /// Mean of the distinct samples (the repeated seam sample is counted once).
    pub fn centroid(&self) -> Vec<f64> {
        let t = match self.kind {
            DomainKind::Open => self.len(),
            DomainKind::Closed => self.len() - 1,
        };
        let mut c = vec![0.0; self.dim];
        for row in self.rows().take(t) {
            for (acc, x) in c.iter_mut().zip(row) {
                *acc += x;
            }
        }
        c.iter_mut().for_each(|x| *x /= t as f64);
        c
    }

    pub fn translated(&self, offset: &[f64]) -> Curve {
        let mut out = self.clone();
        for row in out.points.chunks_exact_mut(self.dim) {
            for (x, o) in row.iter_mut().zip(offset) {
                *x += o;
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Curve {
        let mut out = self.clone();
        out.points.iter_mut().for_each(|x| *x *= factor);
        out
    }

    /// Applies `x -> R x` to every sample; `rotation` is row-major `p x p`.
    pub fn rotated(&self, rotation: &[f64]) -> Curve {
        let p = self.dim;
        let mut out = self.clone();
        for (src, dst) in self.points.chunks_exact(p).zip(out.points.chunks_exact_mut(p)) {
            for (r, y) in dst.iter_mut().enumerate() {
                *y = (0..p).map(|c| rotation[r * p + c] * src[c]).sum();
            }
        }
        out
    }

    /// Subtracts the first sample from every sample.
    pub fn anchored_at_origin(&self) -> Curve {
        let first: Vec<f64> = self.point(0).iter().map(|x| -x).collect();
        self.translated(&first)
    }

    fn with_points(&self, points: Vec<f64>) -> Curve {
        Curve {
            id: self.id.clone(),
            dim: self.dim,
            points,
            kind: self.kind,
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// A list of curves sharing the same ambient dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    curves: Vec<Curve>,
    truth_labels: Option<Vec<usize>>,
}

impl CurveSet {
    pub fn new(curves: Vec<Curve>, truth_labels: Option<Vec<usize>>) -> Result<Self> {
        let first = curves.first().ok_or(Error::Empty)?;
        let p = first.dim();
        if let Some(bad) = curves.iter().find(|c| c.dim() != p) {
            return Err(Error::InconsistentDimension {
                curve: bad.id().to_string(),
                got: bad.dim(),
                expected: p,
            });
        }
        if let Some(labels) = &truth_labels {
            if labels.len() != curves.len() {
                return Err(Error::LengthMismatch {
                    left: labels.len(),
                    right: curves.len(),
                });
            }
        }
        Ok(CurveSet { curves, truth_labels })
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn truth_labels(&self) -> Option<&[usize]> {
        self.truth_labels.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.curves[0].dim()
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn into_parts(self) -> (Vec<Curve>, Option<Vec<usize>>) {
        (self.curves, self.truth_labels)
    }
}

/// Euclidean observations `y_1..y_n` in `R^p`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    points: Vec<f64>,
    truth_labels: Option<Vec<usize>>,
}

impl PointSet {
    pub fn new(dim: usize, points: Vec<f64>, truth_labels: Option<Vec<usize>>) -> Result<Self> {
        if dim == 0 || !points.len().is_multiple_of(dim) {
            return Err(Error::invalid("point array is not n x p"));
        }
        let n = points.len() / dim;
        if n < 2 {
            return Err(Error::invalid(format!("point set needs n >= 2 (got {n})")));
        }
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("point set".to_string()));
        }
        if let Some(labels) = &truth_labels {
            if labels.len() != n {
                return Err(Error::LengthMismatch {
                    left: labels.len(),
                    right: n,
                });
            }
        }
        Ok(PointSet {
            dim,
            points,
            truth_labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn truth_labels(&self) -> Option<&[usize]> {
        self.truth_labels.as_deref()
    }
}

/// Locates arc-length position `s` on the polyline starting the search at
/// segment `seg`; returns the interpolated point.
struct Walker<'a> {
    pts: &'a [f64],
    dim: usize,
}

impl Walker<'_> {
    fn segments(&self) -> usize {
        self.pts.len() / self.dim - 1
    }

    fn at(&self, seg: usize, t: f64) -> impl Iterator<Item = f64> + '_ {
        let a = &self.pts[seg * self.dim..(seg + 1) * self.dim];
        let b = &self.pts[(seg + 1) * self.dim..(seg + 2) * self.dim];
        a.iter().zip(b).map(move |(x, y)| x + t * (y - x))
    }

    /// From position `(seg, t)` at point `centre`, finds the first later
    /// position whose distance to `centre` equals `chord`.
    fn step(&self, centre: &[f64], mut seg: usize, mut t: f64, chord: f64) -> Option<(usize, f64)> {
        let c2 = chord * chord;
        while seg < self.segments() {
            let a = &self.pts[seg * self.dim..(seg + 1) * self.dim];
            let b = &self.pts[(seg + 1) * self.dim..(seg + 2) * self.dim];
            // |a + u (b - a) - centre|^2 = c2, take the larger root
            let (mut qa, mut qb, mut qc) = (0.0, 0.0, -c2);
            for d in 0..self.dim {
                let e = b[d] - a[d];
                let f = a[d] - centre[d];
                qa += e * e;
                qb += 2.0 * e * f;
                qc += f * f;
            }
            if qa > 0.0 {
                let disc = qb * qb - 4.0 * qa * qc;
                if disc >= 0.0 {
                    let u = (-qb + sqrt(disc)) / (2.0 * qa);
                    if u >= t && u <= 1.0 {
                        return Some((seg, u));
                    }
                }
            }
            seg += 1;
            t = 0.0;
        }
        None
    }

    /// Places up to `steps` points at equal chord spacing; returns how many
    /// were placed before running off the end, plus the points.
    fn walk(&self, chord: f64, steps: usize, out: &mut Vec<f64>) -> usize {
        out.clear();
        out.extend_from_slice(&self.pts[..self.dim]);
        let (mut seg, mut t) = (0usize, 0.0);
        let mut centre = self.pts[..self.dim].to_vec();
        for placed in 0..steps {
            match self.step(&centre, seg, t, chord) {
                Some((s, u)) => {
                    seg = s;
                    t = u;
                    centre.clear();
                    centre.extend(self.at(seg, t));
                    out.extend_from_slice(&centre);
                }
                None => return placed,
            }
        }
        steps
    }
}

/// Resamples a curve to `n_points` samples evenly spaced in arc length.
///
/// Samples lie on the piecewise-linear interpolant of the input and are
/// placed at equal chord spacing. Resampling the output again is a no-op
/// for smooth curves; on jagged polylines the last gap can differ from the
/// chord. Both endpoints are kept.
pub fn resample(curve: &Curve, n_points: usize) -> Result<Curve> {
    if n_points < 3 {
        return Err(Error::invalid(format!("resample needs n_points >= 3 (got {n_points})")));
    }
    let total = curve.arc_length();
    if !(total > 0.0) {
        return Err(Error::ZeroLength);
    }
    let p = curve.dim();
    // drop zero-length segments so the walker never stalls on duplicates
    let mut pts: Vec<f64> = curve.point(0).to_vec();
    for k in 1..curve.len() {
        let prev = &pts[pts.len() - p..];
        if dist(prev, curve.point(k)) > 0.0 {
            pts.extend_from_slice(curve.point(k));
        }
    }
    let walker = Walker { pts: &pts, dim: p };
    let steps = n_points - 2;
    let mut buf = Vec::with_capacity(n_points * p);

    // Largest chord that still fits `steps` interior samples; the remaining
    // gap to the endpoint then matches that chord.
    let (mut lo, mut hi) = (0.0, total / (n_points - 1) as f64 * (1.0 + 1e-12));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fits = walker.walk(mid, steps, &mut buf) == steps && last_gap(&buf, &pts, p) >= mid;
        if fits {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let placed = walker.walk(lo, steps, &mut buf);
    debug_assert_eq!(placed, steps);
    buf.truncate((steps + 1) * p);
    buf.extend_from_slice(curve.point(curve.len() - 1));
    Ok(curve.with_points(buf))
}

fn last_gap(buf: &[f64], pts: &[f64], p: usize) -> f64 {
    dist(&buf[buf.len() - p..], &pts[pts.len() - p..])
}

/// Discrete Gaussian kernel with standard deviation `bandwidth` (in samples),
/// truncated at four bandwidths and renormalized.
pub fn gaussian_kernel(bandwidth: f64) -> Vec<f64> {
    let half = libm::ceil(4.0 * bandwidth) as usize;
    let mut w: Vec<f64> = (0..=2 * half)
        .map(|k| {
            let x = k as f64 - half as f64;
            exp(-x * x / (2.0 * bandwidth * bandwidth))
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Gaussian-kernel smoothing of each coordinate, applied `passes` times.
///
/// Open curves replicate their boundary samples; closed curves wrap around.
pub fn smooth(curve: &Curve, bandwidth: f64, passes: usize) -> Result<Curve> {
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::invalid("smoothing bandwidth must be positive"));
    }
    if passes == 0 {
        return Err(Error::invalid("smoothing passes must be at least 1"));
    }
    let kernel = gaussian_kernel(bandwidth);
    let half = (kernel.len() / 2) as isize;
    let p = curve.dim();
    let t = curve.len();
    let m = match curve.kind() {
        DomainKind::Open => t,
        DomainKind::Closed => t - 1,
    };
    let mut cur = curve.points()[..m * p].to_vec();
    let mut next = vec![0.0; m * p];
    for _ in 0..passes {
        for k in 0..m {
            for d in 0..p {
                let mut acc = 0.0;
                for (w, off) in kernel.iter().zip(-half..=half) {
                    let idx = k as isize + off;
                    let src = match curve.kind() {
                        DomainKind::Open => idx.clamp(0, m as isize - 1) as usize,
                        DomainKind::Closed => idx.rem_euclid(m as isize) as usize,
                    };
                    acc += w * cur[src * p + d];
                }
                next[k * p + d] = acc;
            }
        }
        core::mem::swap(&mut cur, &mut next);
    }
    if curve.kind() == DomainKind::Closed {
        let first = cur[..p].to_vec();
        cur.extend_from_slice(&first);
    }
    Ok(curve.with_points(cur))
}

/// Prepends and appends `k` samples by linear extrapolation from the two
/// terminal samples at each end.
pub fn extend_endpoints(curve: &Curve, k: usize) -> Result<Curve> {
    if curve.is_closed() {
        return Err(Error::ClosedCurve);
    }
    if k == 0 {
        return Ok(curve.clone());
    }
    let p = curve.dim();
    let t = curve.len();
    let (a0, a1) = (curve.point(0), curve.point(1));
    let (b0, b1) = (curve.point(t - 1), curve.point(t - 2));
    let mut pts = Vec::with_capacity((t + 2 * k) * p);
    for m in (1..=k).rev() {
        pts.extend(a0.iter().zip(a1).map(|(x, y)| x + m as f64 * (x - y)));
    }
    pts.extend_from_slice(curve.points());
    for m in 1..=k {
        pts.extend(b0.iter().zip(b1).map(|(x, y)| x + m as f64 * (x - y)));
    }
    Ok(curve.with_points(pts))
}

/// Removes `k` samples from each end; inverse of [`extend_endpoints`].
pub fn trim_endpoints(curve: &Curve, k: usize) -> Result<Curve> {
    if curve.is_closed() {
        return Err(Error::ClosedCurve);
    }
    let t = curve.len();
    if t < 2 * k + 3 {
        return Err(Error::TooFewSamples {
            curve: curve.id().to_string(),
            len: t.saturating_sub(2 * k),
        });
    }
    let p = curve.dim();
    Ok(curve.with_points(curve.points()[k * p..(t - k) * p].to_vec()))
}

/// Preprocessing applied before computing SRVFs.
#[derive(Debug, Clone, PartialEq)]
pub struct PreprocessOptions {
    pub resample: Option<usize>,
    /// `(bandwidth, passes)`
    pub smooth: Option<(f64, usize)>,
    /// samples added by linear extrapolation at each end of open curves
    pub extend: usize,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            resample: Some(DEFAULT_SAMPLES),
            smooth: None,
            extend: 0,
        }
    }
}

/// Anchors the curve at the origin, then resamples, smooths and extends it.
///
/// Anchoring first makes the whole pipeline exactly translation invariant
/// whenever the translated coordinates are representable.
pub fn preprocess(curve: &Curve, opts: &PreprocessOptions) -> Result<Curve> {
    let mut c = curve.anchored_at_origin();
    if let Some(n) = opts.resample {
        c = resample(&c, n)?;
    }
    if let Some((bw, passes)) = opts.smooth {
        c = smooth(&c, bw, passes)?;
    }
    if opts.extend > 0 && !c.is_closed() {
        c = extend_endpoints(&c, opts.extend)?;
    }
    Ok(c)
}

/// Draws `n` i.i.d. samples from a Gaussian mixture, labelling each with its
/// component index.
pub fn simulate_gaussian_mixture(
    weights: &[f64],
    means: &[Vec<f64>],
    covs: &[Vec<f64>],
    n: usize,
    seed: u64,
) -> Result<PointSet> {
    if weights.is_empty() || weights.len() != means.len() || weights.len() != covs.len() {
        return Err(Error::InvalidMixture(
            "weights, means and covs must have equal nonzero length",
        ));
    }
    if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidMixture("weights must be nonnegative"));
    }
    if libm::fabs(weights.iter().sum::<f64>() - 1.0) > 1e-9 {
        return Err(Error::InvalidMixture("weights must sum to 1"));
    }
    let p = means[0].len();
    if p == 0 || means.iter().any(|m| m.len() != p) {
        return Err(Error::InvalidMixture("means must share one nonzero dimension"));
    }
    let mut factors = Vec::with_capacity(covs.len());
    for (k, cov) in covs.iter().enumerate() {
        if cov.len() != p * p {
            return Err(Error::InvalidMixture("covariance must be p x p"));
        }
        let m = DMatrix::from_row_slice(p, p, cov);
        let asym = (&m - m.transpose()).abs().max();
        if asym > 1e-12 * m.abs().max().max(1.0) {
            return Err(Error::NotSpd(k));
        }
        let chol = m.cholesky().ok_or(Error::NotSpd(k))?;
        factors.push(chol.l());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut comp = weights.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                comp = k;
                break;
            }
        }
        let z = DVector::from_fn(p, |_, _| StandardNormal.sample(&mut rng));
        let y = &factors[comp] * z;
        points.extend(y.iter().zip(&means[comp]).map(|(a, b)| a + b));
        labels.push(comp);
    }
    PointSet::new(p, points, Some(labels))
}

/// Built-in closed planar templates, each given as a radial function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Template {
    Circle,
    /// semi-axes `aspect` and 1
    Ellipse {
        aspect: f64,
    },
    /// `r = 1 + 0.6 cos(petals * phi)`
    Rose {
        petals: u32,
    },
    /// half-sides `aspect` and 1
    Rectangle {
        aspect: f64,
    },
    /// fixed mixture of low-order harmonics
    Bumpy,
}

impl Template {
    /// Parses `circle`, `ellipse[:a]`, `rose[:n]`, `rectangle[:a]`, `bumpy`.
    pub fn parse(name: &str) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let num = |default: f64| -> Result<f64> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite() && *x > 0.0)
                    .ok_or_else(|| Error::UnknownTemplate(name.to_string())),
            }
        };
        match head.trim().to_ascii_lowercase().as_str() {
            "circle" if arg.is_none() => Ok(Template::Circle),
            "ellipse" => Ok(Template::Ellipse { aspect: num(2.0)? }),
            "rose" => {
                let n = num(4.0)?;
                if libm::trunc(n) != n {
                    return Err(Error::UnknownTemplate(name.to_string()));
                }
                Ok(Template::Rose { petals: n as u32 })
            }
            "rectangle" => Ok(Template::Rectangle { aspect: num(2.0)? }),
            "bumpy" if arg.is_none() => Ok(Template::Bumpy),
            _ => Err(Error::UnknownTemplate(name.to_string())),
        }
    }

    pub fn radius(&self, phi: f64) -> f64 {
        use libm::{cos, fabs, sin};
        match *self {
            Template::Circle => 1.0,
            Template::Ellipse { aspect } => {
                let (c, s) = (cos(phi) / aspect, sin(phi));
                1.0 / sqrt(c * c + s * s)
            }
            Template::Rose { petals } => 1.0 + 0.6 * cos(petals as f64 * phi),
            Template::Rectangle { aspect } => 1.0 / (fabs(cos(phi)) / aspect).max(fabs(sin(phi))),
            Template::Bumpy => 1.0 + 0.2 * cos(3.0 * phi) + 0.15 * sin(5.0 * phi) + 0.1 * cos(7.0 * phi + 0.5),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeClass {
    pub template: Template,
    /// amplitude of the smooth random radial perturbation
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSimOptions {
    /// samples per curve, including the repeated seam sample
    pub samples: usize,
    /// random rotation, translation, scale, seam and reparameterization
    pub nuisance: bool,
}

impl Default for ShapeSimOptions {
    fn default() -> Self {
        ShapeSimOptions {
            samples: DEFAULT_SAMPLES,
            nuisance: true,
        }
    }
}

/// Simulates `per_class` closed planar curves for each class.
pub fn simulate_shape_classes(
    classes: &[ShapeClass],
    per_class: usize,
    opts: &ShapeSimOptions,
    seed: u64,
) -> Result<CurveSet> {
    use libm::{cos, sin};
    if classes.is_empty() || per_class == 0 {
        return Err(Error::Empty);
    }
    if opts.samples < 4 {
        return Err(Error::invalid("shape simulation needs at least 4 samples"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_len = opts.samples;
    let mut curves = Vec::with_capacity(classes.len() * per_class);
    let mut labels = Vec::with_capacity(classes.len() * per_class);
    for (label, class) in classes.iter().enumerate() {
        if !(class.noise >= 0.0) {
            return Err(Error::invalid("shape noise must be nonnegative"));
        }
        for inst in 0..per_class {
            let mut harmonics = [0.0f64; 6];
            for h in harmonics.iter_mut() {
                *h = StandardNormal.sample(&mut rng);
            }
            let (warp, seam, angle, scale, shift) = if opts.nuisance {
                let warp = rng.random_range(-0.5..0.5);
                let seam = rng.random_range(0.0..2.0 * PI);
                let angle = rng.random_range(0.0..2.0 * PI);
                let scale = rng.random_range(0.5..2.0);
                let shift = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
                (warp, seam, angle, scale, shift)
            } else {
                (0.0, 0.0, 0.0, 1.0, [0.0, 0.0])
            };
            let (ca, sa) = (cos(angle), sin(angle));
            let mut pts = Vec::with_capacity(t_len * 2);
            for k in 0..t_len - 1 {
                let t = k as f64 / (t_len - 1) as f64;
                let gamma = t + warp * sin(2.0 * PI * t) / (2.0 * PI);
                let phi = seam + 2.0 * PI * gamma;
                let mut bump = 0.0;
                for (j, pair) in harmonics.chunks_exact(2).enumerate() {
                    let f = (j + 1) as f64;
                    bump += (pair[0] * cos(f * phi) + pair[1] * sin(f * phi)) / f;
                }
                let r = class.template.radius(phi) * (1.0 + class.noise * bump).max(0.2);
                let (x, y) = (r * cos(phi), r * sin(phi));
                pts.push(scale * (ca * x - sa * y) + shift[0]);
                pts.push(scale * (sa * x + ca * y) + shift[1]);
            }
            pts.push(pts[0]);
            pts.push(pts[1]);
            curves.push(Curve::closed(format!("c{label}_{inst:03}"), 2, pts)?);
            labels.push(label);
        }
    }
    CurveSet::new(curves, Some(labels))
}
