//! Batch front-end: build models, compute reference standard deviations,
//! rescale hyperpriors, reproduce the published tables, run Monte Carlo
//! verification and demonstrate the scaled prior on a smoothing problem.
//!
//! Exit codes: 0 success, 1 numerical or verification failure, 2 usage or
//! configuration error.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use igmrf_cli::commands::{
    self, demo, parse_model_specs, parse_null_dim, scale, sref, sweep, tables, verify, FileConfig,
};
use igmrf_cli::output::OutputOptions;

#[derive(Parser)]
#[command(
    name = "igmrf",
    version,
    about = "Structure matrices, reference standard deviations and hyperprior scaling for intrinsic Gaussian Markov random fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory for artifacts (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file providing defaults for flags not given on the command line
    #[arg(long)]
    config: Option<PathBuf>,
    /// Omit the timestamp field from artifacts (byte-identical reruns)
    #[arg(long)]
    no_timestamp: bool,
    /// Emit full-precision values instead of six significant digits
    #[arg(long)]
    full_precision: bool,
    /// Allow decompositions beyond 2500 nodes (and lift the dimension cap)
    #[arg(long)]
    long_running: bool,
    /// Exit 0 even when reproduced tables deviate beyond tolerance
    #[arg(long)]
    soft_fail: bool,
    /// Seed for commands that draw random numbers
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Per-node marginal standard deviations at unit precision, plus sigma_ref
    Sref {
        #[command(flatten)]
        common: CommonArgs,
        /// Model class: rw1, rw2, torus1, torus2, bound1 (alias rw2d), bound2
        #[arg(long)]
        model: Option<String>,
        /// Nodes along the first axis (chain length for 1D models)
        #[arg(long)]
        n1: Option<usize>,
        /// Nodes along the second axis (defaults to n1 for 2D models)
        #[arg(long)]
        n2: Option<usize>,
        /// Eigenvalues to drop: an integer or 'auto' (numeric rank)
        #[arg(long)]
        null_dim: Option<String>,
        /// Also write the structure matrix as an i,j,value coordinate list
        #[arg(long)]
        dump_matrix: bool,
    },
    /// sigma_ref across node counts for several models (long-format CSV)
    SrefSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated model names
        #[arg(long)]
        models: Option<String>,
        /// Comma-separated node counts (grid side for 2D models)
        #[arg(long)]
        nodes: Option<String>,
    },
    /// Hyperprior rescaling: upper limits, median aggregate and new b values
    Scale {
        #[command(flatten)]
        common: CommonArgs,
        /// Adjusted standard-deviation parameter of the hyperprior
        #[arg(long)]
        b: Option<f64>,
        /// Location parameter of the hyperprior
        #[arg(long)]
        mu: Option<f64>,
        /// Tail probability for the upper limit
        #[arg(long)]
        alpha: Option<f64>,
        /// Comma-separated models: 'label=sigma_ref' or 'class:n1[xn2]'
        #[arg(long)]
        models: Option<String>,
    },
    /// Recompute a published table and diff it against expected values
    ReproduceTables {
        #[command(flatten)]
        common: CommonArgs,
        /// Table number (1-4); table 1's 100-node row needs --long-running
        #[arg(long)]
        table: Option<u8>,
    },
    /// Monte Carlo verification of sigma_lambda = sigma_ref / sqrt(lambda)
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        /// Precision at which to sample
        #[arg(long)]
        lambda: Option<f64>,
        /// Number of draws
        #[arg(long)]
        count: Option<usize>,
        /// Relative tolerance on the geometric-mean comparison
        #[arg(long)]
        tol: Option<f64>,
        /// Override the dropped eigenvalue count
        #[arg(long)]
        null_dim: Option<usize>,
        /// Also export the sampled batch, one draw per CSV row
        #[arg(long)]
        export_draws: bool,
    },
    /// Posterior-mean smoothing of a noisy synthetic surface
    DemoSmooth {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        noise_sd: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Prior precision (defaults to the hyperprior location mu)
        #[arg(long)]
        lambda: Option<f64>,
    },
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .with_context(|| format!("bad node count '{s}'"))
        })
        .collect()
}

fn parse_name_list(text: &str) -> Vec<String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

struct Resolved<'a> {
    cfg: &'a FileConfig,
}

impl<'a> Resolved<'a> {
    fn require_str(&self, flag: Option<String>, key: &str) -> Result<String> {
        flag.or_else(|| self.cfg.str_field(key))
            .with_context(|| format!("missing --{}", key.replace('_', "-")))
    }

    fn require_usize(&self, flag: Option<usize>, key: &str) -> Result<usize> {
        flag.or_else(|| self.cfg.usize_field(key))
            .with_context(|| format!("missing --{}", key.replace('_', "-")))
    }

    fn require_f64(&self, flag: Option<f64>, key: &str) -> Result<f64> {
        flag.or_else(|| self.cfg.f64_field(key))
            .with_context(|| format!("missing --{}", key.replace('_', "-")))
    }

    fn opt_usize(&self, flag: Option<usize>, key: &str) -> Option<usize> {
        flag.or_else(|| self.cfg.usize_field(key))
    }

    fn opt_f64(&self, flag: Option<f64>, key: &str) -> Option<f64> {
        flag.or_else(|| self.cfg.f64_field(key))
    }

    fn opt_str(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.cfg.str_field(key))
    }
}

fn run(cli: Cli) -> Result<i32> {
    let common = match &cli.command {
        Command::Sref { common, .. }
        | Command::SrefSweep { common, .. }
        | Command::Scale { common, .. }
        | Command::ReproduceTables { common, .. }
        | Command::Verify { common, .. }
        | Command::DemoSmooth { common, .. } => common,
    };
    let cfg = FileConfig::load(common.config.as_deref())?;
    let resolved = Resolved { cfg: &cfg };
    let out_dir = common
        .out
        .clone()
        .or_else(|| cfg.str_field("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let opts = OutputOptions {
        no_timestamp: common.no_timestamp,
        full_precision: common.full_precision,
    };
    let seed = common
        .seed
        .or_else(|| cfg.u64_field("seed"))
        .unwrap_or(commands::DEFAULT_SEED);
    let long_running = common.long_running;
    let soft_fail = common.soft_fail;

    match cli.command {
        Command::Sref {
            model,
            n1,
            n2,
            null_dim,
            dump_matrix,
            ..
        } => {
            let null_dim = match resolved.opt_str(null_dim, "null_dim") {
                Some(text) => Some(parse_null_dim(&text)?),
                None => None,
            };
            let params = sref::SrefParams {
                model: resolved.require_str(model, "model")?,
                n1: resolved.require_usize(n1, "n1")?,
                n2: resolved.opt_usize(n2, "n2"),
                null_dim,
                dump_matrix,
                long_running,
            };
            sref::run(&params, &out_dir, &opts)
        }
        Command::SrefSweep { models, nodes, .. } => {
            let params = sweep::SweepParams {
                models: parse_name_list(&resolved.require_str(models, "models")?),
                nodes: parse_usize_list(&resolved.require_str(nodes, "nodes")?)?,
                long_running,
            };
            sweep::run(&params, &out_dir, &opts)
        }
        Command::Scale {
            b,
            mu,
            alpha,
            models,
            ..
        } => {
            let params = scale::ScaleParams {
                b: resolved.require_f64(b, "b")?,
                mu: resolved.require_f64(mu, "mu")?,
                alpha: resolved.require_f64(alpha, "alpha")?,
                models: parse_model_specs(&resolved.require_str(models, "models")?)?,
                long_running,
            };
            scale::run(&params, &out_dir, &opts)
        }
        Command::ReproduceTables { table, .. } => {
            let table = table
                .or_else(|| resolved.cfg.usize_field("table").map(|t| t as u8))
                .context("missing --table")?;
            let params = tables::TablesParams {
                table,
                long_running,
                soft_fail,
            };
            tables::run(&params, &out_dir, &opts)
        }
        Command::Verify {
            model,
            n1,
            n2,
            lambda,
            count,
            tol,
            null_dim,
            export_draws,
            ..
        } => {
            let params = verify::VerifyParams {
                model: resolved.require_str(model, "model")?,
                n1: resolved.require_usize(n1, "n1")?,
                n2: resolved.opt_usize(n2, "n2"),
                null_dim: resolved.opt_usize(null_dim, "null_dim"),
                lambda: resolved.opt_f64(lambda, "lambda").unwrap_or(1.0),
                count: resolved.opt_usize(count, "count").unwrap_or(20_000),
                tol: resolved.opt_f64(tol, "tol").unwrap_or(0.02),
                seed,
                export_draws,
                long_running,
            };
            verify::run(&params, &out_dir, &opts)
        }
        Command::DemoSmooth {
            n1,
            n2,
            noise_sd,
            b,
            mu,
            alpha,
            lambda,
            ..
        } => {
            let n1 = resolved.require_usize(n1, "n1")?;
            let params = demo::DemoParams {
                n1,
                n2: resolved.opt_usize(n2, "n2").unwrap_or(n1),
                noise_sd: resolved.opt_f64(noise_sd, "noise_sd").unwrap_or(1.0),
                b: resolved.opt_f64(b, "b").unwrap_or(2.0),
                mu: resolved.opt_f64(mu, "mu").unwrap_or(7.0),
                alpha: resolved.opt_f64(alpha, "alpha").unwrap_or(0.001),
                lambda: resolved.opt_f64(lambda, "lambda"),
                seed,
                long_running,
            };
            demo::run(&params, &out_dir, &opts)
        }
    }
}

fn classify_error(error: &anyhow::Error) -> i32 {
    if let Some(core) = error.downcast_ref::<igmrf_core::Error>() {
        if core.is_config_error() {
            2
        } else {
            1
        }
    } else if error.chain().any(|c| c.is::<std::io::Error>()) {
        1
    } else {
        2
    }
}

fn main() {
    // IGMRF_THREADS caps the linear-algebra thread pool; must be set before
    // the first BLAS call.
    if let Ok(threads) = std::env::var("IGMRF_THREADS") {
        if threads.parse::<usize>().is_ok() {
            std::env::set_var("OPENBLAS_NUM_THREADS", &threads);
            std::env::set_var("OMP_NUM_THREADS", &threads);
        } else {
            eprintln!("warning: ignoring non-numeric IGMRF_THREADS='{threads}'");
        }
    }
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            classify_error(&error)
        }
    };
    std::process::exit(code);
}
