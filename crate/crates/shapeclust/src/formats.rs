//! On-disk formats.
//!
//! * curve sets: a JSON document `{"p", "curves": [{"id", "closed", "points"}], "labels"?}`
//!   or a directory of per-curve CSV files listed in `manifest.csv`
//! * point sets: `{"p", "points": [[..]], "labels"?}`
//! * Gram matrices: full `n x n` CSV plus a JSON sidecar with ids, mode and options
//! * chain traces: one JSON record per line
//! * summaries: JSON, plus CSV for the `K` histogram and the co-clustering matrix

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use shapeclust_core::summary::CoClusterMatrix;
use shapeclust_core::{
    ChainTrace, Curve, CurveSet, DomainKind, GramMatrix, GramMode, PointSet, SummaryResult, TraceSample,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveRecord {
    id: String,
    closed: bool,
    points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveSetDoc {
    p: usize,
    curves: Vec<CurveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PointSetDoc {
    p: usize,
    points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

/// Either kind of input data.
#[derive(Debug, Clone)]
pub enum Dataset {
    Curves(CurveSet),
    Points(PointSet),
}

impl Dataset {
    pub fn truth_labels(&self) -> Option<&[usize]> {
        match self {
            Dataset::Curves(c) => c.truth_labels(),
            Dataset::Points(p) => p.truth_labels(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn kind_of(closed: bool) -> DomainKind {
    if closed {
        DomainKind::Closed
    } else {
        DomainKind::Open
    }
}

pub fn curves_to_json(set: &CurveSet, seed: Option<u64>) -> String {
    let doc = CurveSetDoc {
        p: set.dim(),
        curves: set
            .curves()
            .iter()
            .map(|c| CurveRecord {
                id: c.id().to_string(),
                closed: c.is_closed(),
                points: c.rows().map(|r| r.to_vec()).collect(),
            })
            .collect(),
        labels: set.truth_labels().map(|l| l.to_vec()),
        seed,
    };
    serde_json::to_string_pretty(&doc).expect("curve sets serialize") + "\n"
}

pub fn points_to_json(set: &PointSet, seed: Option<u64>) -> String {
    let doc = PointSetDoc {
        p: set.dim(),
        points: (0..set.len()).map(|i| set.point(i).to_vec()).collect(),
        labels: set.truth_labels().map(|l| l.to_vec()),
        seed,
    };
    serde_json::to_string_pretty(&doc).expect("point sets serialize") + "\n"
}

fn curve_set_from_doc(doc: CurveSetDoc) -> Result<CurveSet> {
    let curves = doc
        .curves
        .into_iter()
        .map(|r| {
            if r.points.iter().any(|row| row.len() != doc.p) {
                bail!("curve {}: every point needs {} coordinates", r.id, doc.p);
            }
            Curve::from_rows(r.id.clone(), &r.points, kind_of(r.closed)).map_err(|e| anyhow!("curve {}: {e}", r.id))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSet::new(curves, doc.labels)?)
}

fn point_set_from_doc(doc: PointSetDoc) -> Result<PointSet> {
    if doc.points.iter().any(|row| row.len() != doc.p) {
        bail!("every point needs {} coordinates", doc.p);
    }
    Ok(PointSet::new(doc.p, doc.points.concat(), doc.labels)?)
}

/// Reads a JSON curve set, a JSON point set, or a curve directory.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    if path.is_dir() {
        return Ok(Dataset::Curves(read_curve_dir(path)?));
    }
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if value.get("curves").is_some() {
        let doc: CurveSetDoc = serde_json::from_value(value)?;
        Ok(Dataset::Curves(curve_set_from_doc(doc)?))
    } else if value.get("points").is_some() {
        let doc: PointSetDoc = serde_json::from_value(value)?;
        Ok(Dataset::Points(point_set_from_doc(doc)?))
    } else {
        bail!("{}: expected a curve set or a point set", path.display())
    }
}

/// Writes `dataset` to `path`: `.json` for either kind, or a directory of
/// CSV files for curves.
pub fn write_dataset(dataset: &Dataset, path: &Path, seed: Option<u64>) -> Result<()> {
    match dataset {
        Dataset::Curves(set) if path.extension().is_none_or(|e| e != "json") => write_curve_dir(set, path),
        Dataset::Curves(set) => write(path, &curves_to_json(set, seed)),
        Dataset::Points(set) => write(path, &points_to_json(set, seed)),
    }
}

const MANIFEST: &str = "manifest.csv";

fn parse_row(line: &str) -> Option<Vec<f64>> {
    line.split(',').map(|x| x.trim().parse::<f64>().ok()).collect()
}

/// Reads a directory holding `manifest.csv` (`file,closed,label` with the
/// label column optional) and one CSV file per curve.
pub fn read_curve_dir(dir: &Path) -> Result<CurveSet> {
    let manifest = read(&dir.join(MANIFEST))?;
    let mut curves = Vec::new();
    let mut labels = Vec::new();
    for (lineno, line) in manifest.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with("file")) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        let file = cols[0];
        let closed = match cols.get(1).copied().unwrap_or("false") {
            "true" | "1" | "closed" => true,
            "false" | "0" | "open" | "" => false,
            other => bail!("{MANIFEST}:{}: bad closed flag {other:?}", lineno + 1),
        };
        let label = match cols.get(2).copied().filter(|s| !s.is_empty()) {
            Some(l) => Some(
                l.parse::<usize>()
                    .with_context(|| format!("{MANIFEST}:{}: bad label", lineno + 1))?,
            ),
            None => None,
        };
        let path = dir.join(file);
        let text = read(&path)?;
        let mut rows = Vec::new();
        for (k, row) in text.lines().enumerate() {
            let row = row.trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            match parse_row(row) {
                Some(v) => rows.push(v),
                None if k == 0 => continue, // header
                None => bail!("{}:{}: not numeric", path.display(), k + 1),
            }
        }
        let id = Path::new(file)
            .file_stem()
            .map_or(file.to_string(), |s| s.to_string_lossy().into_owned());
        curves.push(Curve::from_rows(id, &rows, kind_of(closed)).map_err(|e| anyhow!("{}: {e}", path.display()))?);
        labels.push(label);
    }
    let labels = if labels.iter().all(Option::is_some) && !labels.is_empty() {
        Some(labels.into_iter().map(Option::unwrap).collect())
    } else if labels.iter().all(Option::is_none) {
        None
    } else {
        bail!("{MANIFEST}: give a label for every curve or for none")
    };
    Ok(CurveSet::new(curves, labels)?)
}

pub fn write_curve_dir(set: &CurveSet, dir: &Path) -> Result<()> {
    let mut manifest = String::from("file,closed,label\n");
    for (i, c) in set.curves().iter().enumerate() {
        let file = format!("{}.csv", c.id());
        let mut body = String::new();
        for row in c.rows() {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            body.push_str(&cells.join(","));
            body.push('\n');
        }
        write(&dir.join(&file), &body)?;
        let label = set.truth_labels().map_or(String::new(), |l| l[i].to_string());
        writeln!(manifest, "{file},{},{label}", c.is_closed()).unwrap();
    }
    write(&dir.join(MANIFEST), &manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSidecar {
    pub n: usize,
    pub mode: String,
    pub ids: Vec<String>,
    #[serde(default)]
    pub options: BTreeMap<String, String>,
}

pub fn mode_name(mode: GramMode) -> &'static str {
    match mode {
        GramMode::Elastic => "elastic",
        GramMode::Euclidean => "euclidean",
    }
}

/// Full matrix, one row per line. `f64` display output is the shortest
/// string that parses back to the same value, so reloading is exact.
pub fn gram_to_csv(g: &GramMatrix) -> String {
    let mut out = String::new();
    for i in 0..g.n() {
        let cells: Vec<String> = g.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_gram(g: &GramMatrix, csv: &Path, options: BTreeMap<String, String>) -> Result<()> {
    write(csv, &gram_to_csv(g))?;
    let side = GramSidecar {
        n: g.n(),
        mode: mode_name(g.mode()).into(),
        ids: g.ids().to_vec(),
        options,
    };
    write(&sidecar_path(csv), &(serde_json::to_string_pretty(&side)? + "\n"))
}

/// Loads a Gram CSV; ids and mode come from the sidecar when present.
pub fn read_gram(csv: &Path) -> Result<GramMatrix> {
    let text = read(csv)?;
    let mut entries = Vec::new();
    let mut rows = 0;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line).ok_or_else(|| anyhow!("{}:{}: not numeric", csv.display(), k + 1))?;
        entries.extend(row);
        rows += 1;
    }
    if entries.len() != rows * rows {
        bail!(
            "{}: expected a square matrix, got {rows} rows and {} cells",
            csv.display(),
            entries.len()
        );
    }
    let side = sidecar_path(csv);
    let (mode, ids) = if side.exists() {
        let s: GramSidecar =
            serde_json::from_str(&read(&side)?).with_context(|| format!("parsing {}", side.display()))?;
        let mode = match s.mode.as_str() {
            "elastic" => GramMode::Elastic,
            "euclidean" => GramMode::Euclidean,
            m => bail!("{}: unknown mode {m:?}", side.display()),
        };
        (mode, s.ids)
    } else {
        (GramMode::Elastic, (0..rows).map(|i| i.to_string()).collect())
    };
    Ok(GramMatrix::new(rows, entries, mode, ids)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub chain: usize,
    pub sweep: usize,
    #[serde(with = "nan_as_null")]
    pub theta: f64,
    pub k: usize,
    pub labels: Vec<usize>,
    #[serde(with = "nan_as_null")]
    pub log_posterior: f64,
}

/// JSON has no NaN; traces built from bare partitions carry NaN for the
/// sampler state, written as `null`.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

/// One line per post-burn-in sample, chains in order.
pub fn traces_to_jsonl(traces: &[ChainTrace]) -> String {
    let mut out = String::new();
    for (chain, t) in traces.iter().enumerate() {
        for s in &t.samples {
            let rec = TraceRecord {
                chain,
                sweep: s.sweep,
                theta: s.theta,
                k: s.k,
                labels: s.labels.clone(),
                log_posterior: s.log_posterior,
            };
            out.push_str(&serde_json::to_string(&rec).expect("records serialize"));
            out.push('\n');
        }
    }
    out
}

/// Reads a trace file, pooling every chain into one trace.
pub fn read_trace(path: &Path) -> Result<ChainTrace> {
    let text = read(path)?;
    let mut samples = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: TraceRecord =
            serde_json::from_str(line).with_context(|| format!("{}:{}: bad trace record", path.display(), k + 1))?;
        samples.push(TraceSample {
            sweep: rec.sweep,
            theta: rec.theta,
            k: rec.k,
            labels: rec.labels,
            log_posterior: rec.log_posterior,
        });
    }
    if let Some(first) = samples.first() {
        let n = first.labels.len();
        if let Some(bad) = samples.iter().position(|s| s.labels.len() != n) {
            bail!(
                "{}: record {} has {} labels, expected {n}",
                path.display(),
                bad + 1,
                samples[bad].labels.len()
            );
        }
    }
    Ok(ChainTrace {
        samples,
        sweep_nanos: Vec::new(),
        d: f64::NAN,
    })
}

/// Labels from a JSON array, a JSON object with a `labels` field (summary,
/// curve set or point set), or whitespace/comma separated integers.
pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = read(path)?;
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
        let arr = match &v {
            serde_json::Value::Array(_) => v.clone(),
            serde_json::Value::Object(m) => m
                .get("labels")
                .cloned()
                .ok_or_else(|| anyhow!("{}: no labels field", path.display()))?,
            _ => bail!("{}: expected labels", path.display()),
        };
        return serde_json::from_value(arr)
            .with_context(|| format!("{}: labels must be nonnegative integers", path.display()));
    }
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .with_context(|| format!("{}: bad label {s:?}", path.display()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub k0: usize,
    pub t_star: f64,
    pub labels: Vec<usize>,
    pub outliers: Vec<usize>,
    pub n_samples: usize,
    pub min_size: usize,
}

pub fn summary_to_json(s: &SummaryResult, min_size: usize) -> String {
    let doc = SummaryDoc {
        k0: s.k0,
        t_star: s.t_star,
        labels: s.partition.labels().to_vec(),
        outliers: s.outliers.clone(),
        n_samples: s.n_samples,
        min_size,
    };
    serde_json::to_string_pretty(&doc).expect("summaries serialize") + "\n"
}

pub fn histogram_to_csv(hist: &BTreeMap<usize, usize>) -> String {
    let total: usize = hist.values().sum();
    let mut out = String::from("k,count,frequency\n");
    for (k, c) in hist {
        writeln!(out, "{k},{c},{}", *c as f64 / total as f64).unwrap();
    }
    out
}

pub fn coclustering_to_csv(b: &CoClusterMatrix) -> String {
    let mut out = String::new();
    for i in 0..b.n() {
        let cells: Vec<String> = b.row(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
