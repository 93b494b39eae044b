use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use shapeclust::commands::{self, mean_sweep_seconds};
use shapeclust::RunConfig;

/// One optional string flag per configuration key; values are parsed by
/// `RunConfig::set` so that files and flags accept the same syntax.
macro_rules! flag_group {
    ($name:ident { $( $(#[$doc:meta])* $field:ident ),* $(,)? }) => {
        #[derive(Debug, Default, Args)]
        struct $name {
            $( $(#[$doc])* #[arg(long, value_name = "VALUE")] $field: Option<String>, )*
        }
        impl $name {
            fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut v = Vec::new();
                $( if let Some(x) = &self.$field { v.push((stringify!($field), x.as_str())); } )*
                v
            }
        }
    };
}

flag_group!(SimFlags {
    /// gaussian | shapes
    kind,
    per_class,
    /// component means, `x,y;x,y;...`
    means,
    /// per-coordinate standard deviation of each component
    sd,
    /// shape templates, e.g. `circle,rose:3,rectangle:2`
    classes,
    noise,
    /// samples per simulated curve
    samples,
    /// random rotation, scale, translation, seam and warp (true | false)
    nuisance,
});

flag_group!(PreFlags {
    /// auto | elastic | euclidean
    mode,
    /// resample to this many points (or none)
    resample,
    /// Gaussian smoothing bandwidth in samples (or none)
    smooth_bandwidth,
    smooth_passes,
    /// extrapolated samples added at each end of open curves
    extend,
    /// rescale SRVFs to unit norm (true | false)
    unit_length,
    /// treat curves as closed or open (auto keeps the stored flag)
    closed,
    /// center points before the Euclidean Gram matrix
    center,
});

flag_group!(AlignFlags {
    max_iters,
    tol,
    /// seam candidates for closed curves (auto = T/5)
    n_seeds,
});

flag_group!(ChainFlags {
    /// CRP concentration (auto = k_tilde / ln n, or 1)
    xi,
    /// prior guess of the number of clusters
    k_tilde,
    /// comma separated theta values
    theta_grid,
    r,
    s,
    /// degrees of freedom: auto | n | number
    d,
    n_sweeps,
    burn_in,
    /// singletons | one | random:K
    init,
    n_chains,
});

flag_group!(SummaryFlags {
    /// clusters smaller than this are reported as outliers
    min_size,
});

#[derive(Debug, Args)]
struct Common {
    /// `key = value` configuration file; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// random seed (required when CI is set)
    #[arg(long)]
    seed: Option<u64>,
    /// output directory
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Debug, Parser)]
#[command(name = "shapeclust", version, about = "Bayesian clustering of curves by shape")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate Gaussian point clouds or shape classes
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Compute the Gram matrix of a curve set or point set
    Gram {
        /// curve set JSON, point set JSON or curve directory
        input: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        pre: PreFlags,
        #[command(flatten)]
        align: AlignFlags,
    },
    /// Sample partitions given a Gram matrix
    Cluster {
        gram: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        chain: ChainFlags,
    },
    /// Summarize a trace into one clustering
    Summarize {
        trace: PathBuf,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        summary: SummaryFlags,
    },
    /// Compare labels against the truth
    Eval { labels: PathBuf, truth: PathBuf },
}

fn build_config(common: &Common, pairs: Vec<(&'static str, &str)>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    for (k, v) in pairs {
        cfg.set(k, v)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = Some(seed);
    }
    if cfg.seed.is_none() && std::env::var_os("CI").is_some() {
        bail!("--seed is required when CI is set");
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common, sim } => {
            let cfg = build_config(&common, sim.pairs())?;
            let data = commands::simulate(&cfg, &common.out)?;
            let n = match &data {
                shapeclust::Dataset::Curves(c) => c.len(),
                shapeclust::Dataset::Points(p) => p.len(),
            };
            eprintln!(
                "wrote {n} observations to {}",
                common.out.join(commands::DATA).display()
            );
        }
        Command::Gram {
            input,
            common,
            pre,
            align,
        } => {
            let mut pairs = pre.pairs();
            pairs.extend(align.pairs());
            let cfg = build_config(&common, pairs)?;
            let out = commands::gram(&cfg, &input, &common.out)?;
            let t = out.timing;
            eprintln!(
                "gram {n}x{n}: preprocessing {:.3}s, alignment {:.3}s, assembly {:.3}s, total {:.3}s",
                t.preprocess.as_secs_f64(),
                t.alignment.as_secs_f64(),
                t.assembly.as_secs_f64(),
                t.total().as_secs_f64(),
                n = out.gram.n()
            );
        }
        Command::Cluster { gram, common, chain } => {
            let cfg = build_config(&common, chain.pairs())?;
            let out = commands::cluster(&cfg, &gram, &common.out)?;
            let kept: usize = out.traces.iter().map(|t| t.len()).sum();
            eprintln!(
                "{} chain(s), d = {}, xi = {}, {kept} samples kept, {:.3} ms per sweep",
                out.traces.len(),
                out.d,
                out.xi,
                mean_sweep_seconds(&out.traces) * 1e3
            );
        }
        Command::Summarize { trace, common, summary } => {
            let cfg = build_config(&common, summary.pairs())?;
            let r = commands::summarize_file(&cfg, &trace, &common.out)?;
            println!("k0 = {}", r.k0);
            println!("t_star = {}", r.t_star);
            println!("outliers = {:?}", r.outliers);
        }
        Command::Eval { labels, truth } => {
            let r = commands::eval(&labels, &truth)?;
            println!("n = {}", r.n);
            println!("classification_rate = {}", r.classification_rate);
            println!("rand_index = {}", r.rand_index);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
