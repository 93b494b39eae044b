//! Run configuration: `key = value` files, command-line overrides and the
//! resolved manifest written next to every output.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use shapeclust_core::{
    AlignOpts, ChainConfig, DegreesOfFreedom, Init, PreprocessOptions, ShapeClass, ShapeSimOptions, Template,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimKind {
    Gaussian,
    Shapes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DSetting {
    Auto,
    /// `d = n`
    N,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSetting {
    Auto,
    Elastic,
    Euclidean,
}

/// Field groups, used to decide which keys a command's manifest records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Sim,
    Pre,
    Align,
    Chain,
    Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: Option<u64>,

    pub kind: SimKind,
    pub per_class: usize,
    pub means: Vec<Vec<f64>>,
    pub sd: f64,
    pub classes: Vec<String>,
    pub noise: f64,
    pub samples: usize,
    pub nuisance: bool,

    pub mode: ModeSetting,
    pub resample: Option<usize>,
    pub smooth_bandwidth: Option<f64>,
    pub smooth_passes: usize,
    pub extend: usize,
    pub unit_length: bool,
    /// overrides the closed flag stored with each curve
    pub closed: Option<bool>,
    pub center: bool,

    pub max_iters: usize,
    pub tol: f64,
    pub n_seeds: Option<usize>,

    /// `None` means `k_tilde / ln n`, or 1 without `k_tilde`
    pub xi: Option<f64>,
    pub k_tilde: Option<usize>,
    pub theta_grid: Vec<f64>,
    pub r: f64,
    pub s: f64,
    pub d: DSetting,
    pub n_sweeps: usize,
    pub burn_in: usize,
    pub init: Init,
    pub n_chains: usize,

    pub min_size: usize,
}

fn default_means() -> Vec<Vec<f64>> {
    (0..3)
        .map(|k| {
            let a = k as f64 * 2.0 * std::f64::consts::PI / 3.0;
            vec![5.0 * a.cos(), 5.0 * a.sin()]
        })
        .collect()
}

impl Default for RunConfig {
    fn default() -> Self {
        let chain = ChainConfig::default();
        let align = AlignOpts::default();
        RunConfig {
            seed: None,
            kind: SimKind::Gaussian,
            per_class: 20,
            means: default_means(),
            sd: 0.5f64.sqrt(),
            classes: vec!["circle".into(), "rose:3".into(), "rectangle:2".into()],
            noise: 0.1,
            samples: 100,
            nuisance: true,
            mode: ModeSetting::Auto,
            resample: PreprocessOptions::default().resample,
            smooth_bandwidth: None,
            smooth_passes: 1,
            extend: 0,
            unit_length: true,
            closed: None,
            center: false,
            max_iters: align.max_iters,
            tol: align.tol,
            n_seeds: align.n_seeds,
            xi: None,
            k_tilde: None,
            theta_grid: chain.theta_grid,
            r: chain.r,
            s: chain.s,
            d: DSetting::Auto,
            n_sweeps: chain.n_sweeps,
            burn_in: chain.burn_in,
            init: Init::Singletons,
            n_chains: 1,
            min_size: shapeclust_core::summary::DEFAULT_MIN_SIZE,
        }
    }
}

const KEYS: &[(&str, Group)] = &[
    ("kind", Group::Sim),
    ("per_class", Group::Sim),
    ("means", Group::Sim),
    ("sd", Group::Sim),
    ("classes", Group::Sim),
    ("noise", Group::Sim),
    ("samples", Group::Sim),
    ("nuisance", Group::Sim),
    ("mode", Group::Pre),
    ("resample", Group::Pre),
    ("smooth_bandwidth", Group::Pre),
    ("smooth_passes", Group::Pre),
    ("extend", Group::Pre),
    ("unit_length", Group::Pre),
    ("closed", Group::Pre),
    ("center", Group::Pre),
    ("max_iters", Group::Align),
    ("tol", Group::Align),
    ("n_seeds", Group::Align),
    ("xi", Group::Chain),
    ("k_tilde", Group::Chain),
    ("theta_grid", Group::Chain),
    ("r", Group::Chain),
    ("s", Group::Chain),
    ("d", Group::Chain),
    ("n_sweeps", Group::Chain),
    ("burn_in", Group::Chain),
    ("init", Group::Chain),
    ("n_chains", Group::Chain),
    ("min_size", Group::Summary),
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>().map_err(|_| anyhow!("{key}: cannot parse {v:?}"))
}

fn boolean(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("{key}: expected true or false, got {v:?}"),
    }
}

fn optional<T: std::str::FromStr>(key: &str, v: &str) -> Result<Option<T>> {
    match v {
        "none" | "auto" => Ok(None),
        _ => num(key, v).map(Some),
    }
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| num(key, x.trim())).collect()
}

fn show_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn show_opt<T: ToString>(v: &Option<T>, none: &str) -> String {
    v.as_ref().map_or(none.to_string(), T::to_string)
}

impl RunConfig {
    /// Sets one field from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "seed" => self.seed = optional(key, v)?,
            "kind" => {
                self.kind = match v {
                    "gaussian" => SimKind::Gaussian,
                    "shapes" => SimKind::Shapes,
                    _ => bail!("kind: expected gaussian or shapes, got {v:?}"),
                }
            }
            "per_class" => self.per_class = num(key, v)?,
            "means" => self.means = v.split(';').map(|m| list(key, m)).collect::<Result<_>>()?,
            "sd" => self.sd = num(key, v)?,
            "classes" => {
                self.classes = v.split(',').map(|c| c.trim().to_string()).collect();
                for c in &self.classes {
                    Template::parse(c)?;
                }
            }
            "noise" => self.noise = num(key, v)?,
            "samples" => self.samples = num(key, v)?,
            "nuisance" => self.nuisance = boolean(key, v)?,
            "mode" => {
                self.mode = match v {
                    "auto" => ModeSetting::Auto,
                    "elastic" => ModeSetting::Elastic,
                    "euclidean" => ModeSetting::Euclidean,
                    _ => bail!("mode: expected auto, elastic or euclidean, got {v:?}"),
                }
            }
            "resample" => self.resample = optional(key, v)?,
            "smooth_bandwidth" => self.smooth_bandwidth = optional(key, v)?,
            "smooth_passes" => self.smooth_passes = num(key, v)?,
            "extend" => self.extend = num(key, v)?,
            "unit_length" => self.unit_length = boolean(key, v)?,
            "closed" => self.closed = if v == "auto" { None } else { Some(boolean(key, v)?) },
            "center" => self.center = boolean(key, v)?,
            "max_iters" => self.max_iters = num(key, v)?,
            "tol" => self.tol = num(key, v)?,
            "n_seeds" => self.n_seeds = optional(key, v)?,
            "xi" => self.xi = optional(key, v)?,
            "k_tilde" => self.k_tilde = optional(key, v)?,
            "theta_grid" => self.theta_grid = list(key, v)?,
            "r" => self.r = num(key, v)?,
            "s" => self.s = num(key, v)?,
            "d" => {
                self.d = match v {
                    "auto" => DSetting::Auto,
                    "n" => DSetting::N,
                    _ => DSetting::Fixed(num(key, v)?),
                }
            }
            "n_sweeps" => self.n_sweeps = num(key, v)?,
            "burn_in" => self.burn_in = num(key, v)?,
            "init" => {
                self.init = match v {
                    "singletons" => Init::Singletons,
                    "one" => Init::OneCluster,
                    _ => match v.strip_prefix("random:") {
                        Some(k) => Init::KRandom(num(key, k)?),
                        None => bail!("init: expected singletons, one or random:K, got {v:?}"),
                    },
                }
            }
            "n_chains" => self.n_chains = num(key, v)?,
            "min_size" => self.min_size = num(key, v)?,
            _ => bail!("unknown configuration key {key:?}"),
        }
        Ok(())
    }

    /// Current value of a key, in the form [`RunConfig::set`] accepts.
    pub fn get(&self, key: &str) -> Option<String> {
        let v = match key {
            "seed" => show_opt(&self.seed, "none"),
            "kind" => match self.kind {
                SimKind::Gaussian => "gaussian".into(),
                SimKind::Shapes => "shapes".into(),
            },
            "per_class" => self.per_class.to_string(),
            "means" => self.means.iter().map(|m| show_list(m)).collect::<Vec<_>>().join(";"),
            "sd" => self.sd.to_string(),
            "classes" => self.classes.join(","),
            "noise" => self.noise.to_string(),
            "samples" => self.samples.to_string(),
            "nuisance" => self.nuisance.to_string(),
            "mode" => match self.mode {
                ModeSetting::Auto => "auto".into(),
                ModeSetting::Elastic => "elastic".into(),
                ModeSetting::Euclidean => "euclidean".into(),
            },
            "resample" => show_opt(&self.resample, "none"),
            "smooth_bandwidth" => show_opt(&self.smooth_bandwidth, "none"),
            "smooth_passes" => self.smooth_passes.to_string(),
            "extend" => self.extend.to_string(),
            "unit_length" => self.unit_length.to_string(),
            "closed" => show_opt(&self.closed, "auto"),
            "center" => self.center.to_string(),
            "max_iters" => self.max_iters.to_string(),
            "tol" => self.tol.to_string(),
            "n_seeds" => show_opt(&self.n_seeds, "auto"),
            "xi" => show_opt(&self.xi, "auto"),
            "k_tilde" => show_opt(&self.k_tilde, "none"),
            "theta_grid" => show_list(&self.theta_grid),
            "r" => self.r.to_string(),
            "s" => self.s.to_string(),
            "d" => match self.d {
                DSetting::Auto => "auto".into(),
                DSetting::N => "n".into(),
                DSetting::Fixed(x) => x.to_string(),
            },
            "n_sweeps" => self.n_sweeps.to_string(),
            "burn_in" => self.burn_in.to_string(),
            "init" => match self.init {
                Init::Singletons => "singletons".into(),
                Init::OneCluster => "one".into(),
                Init::KRandom(k) => format!("random:{k}"),
            },
            "n_chains" => self.n_chains.to_string(),
            "min_size" => self.min_size.to_string(),
            _ => return None,
        };
        Some(v)
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", lineno + 1))?;
            let v = v.trim().trim_matches('"');
            self.set(k.trim(), v).with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Resolved settings for one command, readable back by [`RunConfig::apply_text`].
    pub fn manifest(&self, command: &str, groups: &[Group], extra: &[(&str, String)]) -> String {
        let mut out = format!("# shapeclust {command}\n");
        for (k, v) in extra {
            writeln!(out, "# {k}: {v}").unwrap();
        }
        writeln!(out, "seed = {}", show_opt(&self.seed, "none")).unwrap();
        for (key, group) in KEYS {
            if groups.contains(group) {
                writeln!(out, "{key} = {}", self.get(key).expect("listed keys exist")).unwrap();
            }
        }
        out
    }

    pub fn preprocess_options(&self) -> PreprocessOptions {
        PreprocessOptions {
            resample: self.resample,
            smooth: self.smooth_bandwidth.map(|bw| (bw, self.smooth_passes)),
            extend: self.extend,
        }
    }

    pub fn align_opts(&self) -> AlignOpts {
        AlignOpts {
            max_iters: self.max_iters,
            tol: self.tol,
            n_seeds: self.n_seeds,
            ..AlignOpts::default()
        }
    }

    /// Concentration for `n` observations.
    pub fn resolved_xi(&self, n: usize) -> Result<f64> {
        match (self.xi, self.k_tilde) {
            (Some(xi), _) => Ok(xi),
            (None, Some(k)) => Ok(shapeclust_core::wishart::estimate_xi(k, n as f64)?),
            (None, None) => Ok(1.0),
        }
    }

    /// Chain settings for `n` observations and chain index `chain`.
    pub fn chain_config(&self, n: usize, chain: usize) -> Result<ChainConfig> {
        let cfg = ChainConfig {
            xi: self.resolved_xi(n)?,
            theta_grid: self.theta_grid.clone(),
            r: self.r,
            s: self.s,
            d: match self.d {
                DSetting::Auto => DegreesOfFreedom::Auto,
                DSetting::N => DegreesOfFreedom::Fixed(n as f64),
                DSetting::Fixed(x) => DegreesOfFreedom::Fixed(x),
            },
            n_sweeps: self.n_sweeps,
            burn_in: self.burn_in,
            seed: self.seed.unwrap_or(0).wrapping_add(chain as u64),
            init: self.init,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn shape_classes(&self) -> Result<Vec<ShapeClass>> {
        self.classes
            .iter()
            .map(|c| {
                Ok(ShapeClass {
                    template: Template::parse(c)?,
                    noise: self.noise,
                })
            })
            .collect()
    }

    pub fn shape_options(&self) -> ShapeSimOptions {
        ShapeSimOptions {
            samples: self.samples,
            nuisance: self.nuisance,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_key_round_trips() {
        let cfg = RunConfig::default();
        for (key, _) in KEYS {
            let mut other = RunConfig::default();
            other.set(key, &cfg.get(key).unwrap()).unwrap();
            assert_eq!(other, cfg, "{key}");
        }
    }

    #[test]
    fn manifest_reloads() {
        let mut cfg = RunConfig::default();
        cfg.apply_text("xi = 0.2 # comment\ntheta_grid = 100,200\nd = n\ninit = random:3\nseed = 5\n")
            .unwrap();
        let all = [Group::Sim, Group::Pre, Group::Align, Group::Chain, Group::Summary];
        let text = cfg.manifest("cluster", &all, &[]);
        let mut back = RunConfig::default();
        back.apply_text(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("nope", "1").is_err());
        assert!(cfg.set("theta_grid", "0.1,x").is_err());
        assert!(cfg.set("classes", "hexagon").is_err());
        cfg.set("theta_grid", "0,0.1").unwrap();
        assert!(cfg.chain_config(10, 0).is_err());
    }

    #[test]
    fn xi_resolution() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.resolved_xi(30).unwrap(), 1.0);
        cfg.k_tilde = Some(3);
        assert!((cfg.resolved_xi(30).unwrap() - 3.0 / 30f64.ln()).abs() < 1e-15);
        cfg.xi = Some(0.2);
        assert_eq!(cfg.resolved_xi(30).unwrap(), 0.2);
    }
}
