mod cache;
mod commands;
mod scan;
mod spec;

use std::io::Write;
use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use cache::Cache;
use commands::{IndexInput, Report};
use qmpolar::Result;

#[derive(Parser, Debug)]
#[command(name = "qmpolar", version, about = "Principal polarizations on abelian varieties with quaternionic multiplication")]
struct Cli {
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Keep the class-number cache in memory only
    #[arg(long, global = true)]
    no_cache: bool,

    /// Cache file (overrides QMPOLAR_CACHE)
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// The abelian variety: base field, discriminant of the quaternion algebra,
/// level of the order, n(I) and signs of Im(tau).
#[derive(Args, Debug, Clone)]
pub struct ContextArgs {
    /// Q or Q(sqrtM)
    #[arg(long, default_value = "Q")]
    pub field: String,

    /// Generator of the discriminant, e.g. 6 or 3+sqrt2
    #[arg(long, allow_hyphen_values = true)]
    pub disc: String,

    /// Level N of an Eichler order (1 = maximal)
    #[arg(long, default_value_t = 1)]
    pub level: u64,

    /// Generator of n(I)
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub ideal_norm: String,

    /// Signs of Im(tau_i), e.g. +,-
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of principal polarizations pi_0
    Pi0 {
        #[command(flatten)]
        ctx: ContextArgs,
        /// Value only, served from the cache when present
        #[arg(long)]
        brief: bool,
    },
    /// Number of principal line bundles up to isomorphism
    Pitotal {
        #[command(flatten)]
        ctx: ContextArgs,
        #[arg(long)]
        brief: bool,
    },
    /// Counts pi_0, ..., pi_2n by index
    Profile {
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Existence of a principal line bundle and of a principal polarization
    Polarizable {
        #[command(flatten)]
        ctx: ContextArgs,
    },
    /// Class number of a quadratic order over Q, or of F(sqrt(-delta)) with its orders
    Classnum {
        /// Discriminant of an order over Q
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<String>,
        #[arg(long, default_value = "Q")]
        field: String,
        /// delta for the CM extension F(sqrt(-delta))
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
    },
    /// Hilbert symbol (a, b)_v, or the discriminant of (a, b / Q) when no place is given
    Hilbert {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// A prime p or inf
        #[arg(long)]
        place: Option<String>,
    },
    /// Index of the line bundle with Chern class mu = x i + y j + z ij
    Index {
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// x,y,z
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, allow_hyphen_values = true)]
        tau: Option<String>,
        /// Generator of the algebra discriminant (real quadratic fields)
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        algebra_disc: String,
    },
    /// CSV of pi_0 and log pi_0 / log sqrt(|N(D)| D_F) over many D
    Scan {
        #[arg(long, default_value = "Q")]
        field: String,
        /// Comma-separated discriminants
        #[arg(long)]
        discs: Option<String>,
        /// D_k = product of the first 2k primes for k = 1..K (over Q)
        #[arg(long, value_name = "K")]
        primorial_pairs: Option<u32>,
        /// Rows with |N(D)| D_F above this are marked skipped
        #[arg(long, default_value_t = 1e9)]
        max_norm: f64,
        /// Fill the seconds column
        #[arg(long)]
        timing: bool,
        /// Also write gnuplot-ready data here
        #[arg(long, value_name = "PATH")]
        plot: Option<PathBuf>,
    },
}

fn run(cli: &Cli, cache: &Cache) -> Result<Report> {
    match &cli.command {
        Command::Pi0 { ctx, brief } => commands::pi0(ctx, *brief, cache),
        Command::Pitotal { ctx, brief } => commands::pitotal(ctx, *brief, cache),
        Command::Profile { ctx } => commands::profile(ctx, cache),
        Command::Polarizable { ctx } => commands::polarizable_cmd(ctx),
        Command::Classnum { disc, field, delta } => commands::classnum(disc.as_deref(), field, delta.as_deref(), cache),
        Command::Hilbert { a, b, place } => commands::hilbert(a, b, place.as_deref()),
        Command::Index { field, a, b, mu, tau, algebra_disc } => commands::index(&IndexInput {
            field,
            a,
            b,
            mu,
            tau: tau.as_deref(),
            algebra_disc,
        }),
        Command::Scan { field, discs, primorial_pairs, max_norm, timing, plot } => scan::scan(
            &scan::ScanPlan {
                field,
                discs: discs.as_deref(),
                primorial_pairs: *primorial_pairs,
                max_norm: *max_norm,
                timing: *timing,
                plot: plot.as_deref(),
            },
            cache,
        ),
    }
}

fn open_cache(cli: &Cli) -> Cache {
    if cli.no_cache {
        return Cache::memory();
    }
    match cli.cache.clone().or_else(Cache::default_path) {
        Some(p) => Cache::open(&p),
        None => {
            log::warn!("no cache location; memory-only mode");
            Cache::memory()
        }
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cache = open_cache(&cli);
    let outcome = run(&cli, &cache);
    log::info!(
        "cache {} ({}): {} values computed",
        cache.path().map_or("-".into(), |p| p.display().to_string()),
        if cache.is_persistent() { "persistent" } else { "memory-only" },
        cache.computed()
    );
    match outcome {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let written = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("reports serialize"))
            } else {
                out.write_all(report.text.as_bytes())
            };
            if written.is_err() {
                process::exit(1);
            }
        }
        Err(e) => {
            let args: Vec<String> = std::env::args().skip(1).collect();
            let body = json!({
                "error_kind": e.kind(),
                "message": e.to_string(),
                "context": {"args": args},
            });
            eprintln!("{body}");
            process::exit(e.exit_code());
        }
    }
}
