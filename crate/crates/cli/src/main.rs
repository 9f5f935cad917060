//! Command-line explorer for the nested-orders index: exact values with
//! traces and a direct-search oracle, freedom-index brackets, family
//! sweeps, verification suites, open-problem harnesses, and a persistent
//! memo cache.

mod commands;
mod explore;
mod output;
mod pool;
mod sweep;
mod verify;

use clap::{Parser, Subcommand};
use nestedorders::cache::{self, LoadStats};
use nestedorders::orders::GuardError;
use nestedorders::Memo;
use output::{Doc, Format};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
}

impl From<GuardError> for CliError {
    fn from(e: GuardError) -> CliError {
        CliError::Resource(e.to_string())
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Flags shared by every command.
pub struct Ctx {
    pub jobs: usize,
    pub seed: u64,
    pub witness: bool,
    pub oracle: bool,
    pub preloaded: Option<LoadStats>,
}

#[derive(Parser)]
#[command(
    name = "nestedorders",
    version,
    about = "Exact nested-orders index of finite set families, with freedom-index brackets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "md")]
    format: Format,

    /// Memo cache file (JSON lines), loaded before and saved after.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Worker threads for sweeps and verification scans.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Seed for every sampled computation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Attach witnesses (traces, order trees, selectors) to reports.
    #[arg(long, global = true)]
    witness: bool,

    /// Cross-check index values with the direct search.
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the nested-orders index of a family.
    No {
        /// Family as "m: set,set,..." with sets as element digit strings
        /// ("0" is the empty set, "m:" the empty family).
        family: String,
    },
    /// Bracket the freedom index of a family with certificates.
    Bracket {
        family: String,
        /// Widest intersection-of-initial-segments search (at most 3).
        #[arg(long, default_value_t = 2)]
        max_orders: u8,
    },
    /// Classify a family on four points and compare with its index.
    Classify4 {
        family: String,
        /// Classify the intersection closure of the family instead.
        #[arg(long)]
        close: bool,
    },
    /// Build the two-stage prefix family of an order given as digits.
    Fprec {
        /// Second-stage order on {1..m-1} as digits, e.g. "53241"; the
        /// ground set is one element larger.
        prec: String,
    },
    /// Search for k orders whose initial-segment intersections cover a
    /// family.
    OrdersSearch {
        family: String,
        /// Number of orders to search for (at most 3).
        #[arg(short = 'k', long = "orders", default_value_t = 2)]
        k: u8,
    },
    /// Sweep all (or sampled) families on a ground set.
    Sweep {
        /// Ground-set size; 1..=4 exhaustive, 5 needs --sample.
        #[arg(long)]
        m: u8,
        /// Restrict the sweep to intersection-closed families containing
        /// the ground set.
        #[arg(long, value_enum, default_value = "all")]
        filter: sweep::SweepFilter,
        /// Sample this many families instead of enumerating.
        #[arg(long)]
        sample: Option<u64>,
        /// Write the full per-family record list as JSON to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite (or "all").
    Verify {
        #[arg(default_value = "all")]
        case: String,
    },
    /// Explore one of the three open problems (1, 2, or 3).
    Explore {
        problem: u8,
        /// Problem 1: largest ground set; 2: widest order search;
        /// 3: number of sampled families.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Inspect or clear the memo cache given by --cache.
    Cache {
        #[command(subcommand)]
        op: CacheOp,
    },
}

#[derive(Subcommand)]
enum CacheOp {
    /// Report entry counts of the cache file.
    Stats,
    /// Delete the cache file.
    Clear,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                CliError::Usage(_) => 2,
                CliError::Resource(_) => 3,
            })
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut memo = Memo::new();
    let preloaded = match &cli.cache {
        Some(path) => Some(
            cache::load(path, &mut memo)
                .map_err(|e| usage(format!("cache {}: {e}", path.display())))?,
        ),
        None => None,
    };
    memo.reset_expansions();
    let ctx = Ctx {
        jobs: cli.jobs.max(1),
        seed: cli.seed,
        witness: cli.witness,
        oracle: cli.oracle,
        preloaded,
    };

    let (mut doc, code, save_cache) = match &cli.command {
        Command::No { family } => with_save(commands::cmd_no(&ctx, &mut memo, family)?),
        Command::Bracket { family, max_orders } => {
            with_save(commands::cmd_bracket(&ctx, &mut memo, family, *max_orders)?)
        }
        Command::Classify4 { family, close } => {
            with_save(commands::cmd_classify4(&ctx, &mut memo, family, *close)?)
        }
        Command::Fprec { prec } => with_save(commands::cmd_fprec(&ctx, &mut memo, prec)?),
        Command::OrdersSearch { family, k } => {
            with_save(commands::cmd_orders_search(&ctx, &mut memo, family, *k)?)
        }
        Command::Sweep { m, filter, sample, out } => {
            let args = sweep::SweepArgs {
                m: *m,
                filter: *filter,
                sample: *sample,
                out: out.clone(),
            };
            with_save(sweep::cmd_sweep(&ctx, &mut memo, &args)?)
        }
        Command::Verify { case } => with_save(verify::cmd_verify(&ctx, &mut memo, case)?),
        Command::Explore { problem, budget } => {
            with_save(explore::cmd_explore(&ctx, &mut memo, *problem, *budget)?)
        }
        Command::Cache { op } => match op {
            CacheOp::Stats => {
                let path = require_cache_path(cli)?;
                let (doc, code) = commands::cmd_cache_stats(&ctx, &memo, &path);
                (doc, code, true)
            }
            CacheOp::Clear => {
                let path = require_cache_path(cli)?;
                let (doc, code) = commands::cmd_cache_clear(&path)?;
                (doc, code, false)
            }
        },
    };

    doc.json["memo"] = serde_json::json!({
        "entries": memo.len(),
        "expansions": memo.expansions(),
        "cache_preloaded": ctx.preloaded.map(|s| s.loaded),
    });
    doc.para(format!(
        "memo: {} entries, {} expansions{}",
        memo.len(),
        memo.expansions(),
        match ctx.preloaded {
            Some(s) => format!(", {} preloaded from cache", s.loaded),
            None => String::new(),
        }
    ));

    if save_cache {
        if let Some(path) = &cli.cache {
            cache::save(path, &memo)
                .map_err(|e| usage(format!("cache {}: {e}", path.display())))?;
        }
    }

    print!("{}", doc.render(cli.format));
    Ok(code)
}

fn with_save((doc, code): (Doc, u8)) -> (Doc, u8, bool) {
    (doc, code, true)
}

fn require_cache_path(cli: &Cli) -> Result<PathBuf, CliError> {
    cli.cache.clone().ok_or_else(|| usage("cache subcommands need --cache PATH"))
}
