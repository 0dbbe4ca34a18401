//! Command-line interface for the verification pipelines, plus small query
//! commands for characters, level series and Weyl orbits.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use kr_core::qsystem::{f4_node1_series, f4_node2_series};
use kr_core::weylgrp::{orbit, stabilizer_nodes};
use kr_core::{
    charformula, run_pipeline, CartanType, CharCache, CharCombo, CheckStatus, Family, Mode,
    QEngine, QSeries, RootSystem, VerifierConfig, Weight,
};

#[derive(Parser)]
#[command(
    name = "krv",
    version,
    about = "Exact verification of polyhedral branching formulas for Kirillov-Reshetikhin modules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification pipeline and print one line per check.
    Verify(VerifyArgs),
    /// Print an irreducible character's dimension and dominant multiplicities.
    Char(CharArgs),
    /// Print the decomposed terms of one node's level series.
    Qtable(QtableArgs),
    /// Print a weight's Weyl orbit and stabilizer.
    Orbits(OrbitArgs),
}

#[derive(Args)]
struct TypeArg {
    /// Cartan type, for example F4, C2, A3.
    #[arg(long = "type", value_name = "TYPE")]
    cartan_type: String,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    cartan: TypeArg,
    /// 1-based node index.
    #[arg(long)]
    node: usize,
    /// exact proves the checks; prob samples random points as a fast preflight.
    #[arg(long, default_value = "exact")]
    mode: String,
    /// Upper bound on summands per normalized chunk in the row-sum route.
    #[arg(long, default_value_t = 96)]
    chunk_size: usize,
    /// Rayon worker threads; 0 keeps the default pool.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Highest level for the term-by-term consistency checks.
    #[arg(long, default_value_t = 3)]
    term_check: usize,
    /// Random points per probabilistic comparison.
    #[arg(long, default_value_t = 3)]
    points: u32,
    /// Base seed for probabilistic evaluation points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the self-test controls that must detect corrupted inputs.
    #[arg(long)]
    negative_controls: bool,
    /// Character cache directory; defaults to KRV_CHAR_CACHE_DIR or a
    /// directory under the system temp dir.
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Keep the character cache in memory only.
    #[arg(long)]
    no_cache: bool,
    /// Write the full JSON report here.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Print per-check progress to stderr while running.
    #[arg(long)]
    progress: bool,
}

#[derive(Args)]
struct CharArgs {
    #[command(flatten)]
    cartan: TypeArg,
    /// Highest weight as comma-separated fundamental-weight coefficients.
    #[arg(long, value_name = "C1,C2,...")]
    weight: String,
}

#[derive(Args)]
struct QtableArgs {
    #[command(flatten)]
    cartan: TypeArg,
    /// 1-based node index.
    #[arg(long)]
    node: usize,
    /// Highest level to print.
    #[arg(long, default_value_t = 5)]
    max_m: usize,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    cartan: TypeArg,
    /// Weight as comma-separated fundamental-weight coefficients.
    #[arg(long, value_name = "C1,C2,...")]
    weight: String,
    /// Print every orbit element instead of a summary.
    #[arg(long)]
    list: bool,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Char(args) => cmd_char(args),
        Command::Qtable(args) => cmd_qtable(args),
        Command::Orbits(args) => cmd_orbits(args),
    }
}

fn root_system(name: &str) -> Result<RootSystem> {
    let ct = CartanType::parse(name).with_context(|| format!("bad Cartan type `{name}`"))?;
    Ok(RootSystem::new(ct)?)
}

fn parse_weight(s: &str, rank: usize) -> Result<Weight> {
    let coords: Vec<i32> = s
        .split(',')
        .map(|p| p.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad weight `{s}`, expected comma-separated integers"))?;
    if coords.len() != rank {
        bail!("weight `{s}` has {} entries, rank is {rank}", coords.len());
    }
    Ok(Weight::from_coords(coords))
}

fn default_cache_dir() -> PathBuf {
    std::env::var_os("KRV_CHAR_CACHE_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("krv-char-cache"))
}

fn cmd_verify(args: VerifyArgs) -> Result<()> {
    let mode: Mode = args.mode.parse().map_err(anyhow::Error::msg)?;
    if args.progress {
        std::env::set_var("KRV_PROGRESS", "1");
    }
    let cache_dir = if args.no_cache {
        None
    } else {
        Some(args.cache_dir.unwrap_or_else(default_cache_dir))
    };
    let config = VerifierConfig {
        cartan_type: args.cartan.cartan_type,
        node: args.node,
        mode,
        max_term_check: args.term_check,
        chunk_size: args.chunk_size,
        worker_count: args.workers,
        points: args.points,
        seed: args.seed,
        cache_dir,
        negative_controls: args.negative_controls,
    };
    let report = run_pipeline(&config).context("verification pipeline could not run")?;
    for check in &report.checks {
        let tag = match check.status {
            CheckStatus::Proved => "proved",
            CheckStatus::Consistent => "consistent",
            CheckStatus::Failed => "FAILED",
        };
        println!(
            "{tag:10} {:32} {:>9.2}s  {}",
            check.name, check.seconds, check.detail
        );
        if let Some(witness) = &check.witness {
            println!("{:10} {:32} {:>10}  witness: {witness}", "", "", "");
        }
    }
    let overall = if !report.verified {
        "FAILED"
    } else if report.config.mode == Mode::Exact {
        "proved"
    } else {
        "consistent"
    };
    println!(
        "overall: {overall} ({} checks in {:.2}s)",
        report.checks.len(),
        report.total_seconds
    );
    if let Some(path) = &args.report {
        report.write_to(path)?;
        println!("report written to {}", path.display());
    }
    if !report.verified {
        std::process::exit(1);
    }
    Ok(())
}

fn cmd_char(args: CharArgs) -> Result<()> {
    let rs = root_system(&args.cartan.cartan_type)?;
    let lambda = parse_weight(&args.weight, rs.rank)?;
    if lambda.scale != 1 || lambda.coords.iter().any(|&c| c < 0) {
        bail!("highest weight must be dominant integral");
    }
    let cache = CharCache::new(rs.clone());
    let chi = cache.character(&lambda)?;
    let dim = charformula::dimension(&rs, &lambda);
    println!(
        "character of highest weight {lambda}: dimension {dim}, {} distinct weights",
        chi.num_terms()
    );
    let mut dominant: Vec<(Weight, String)> = chi
        .iter_weights()
        .filter(|(w, _)| w.coords.iter().all(|&c| c >= 0))
        .map(|(w, c)| (w, c.to_string()))
        .collect();
    dominant.sort_by(|a, b| b.0.coords.cmp(&a.0.coords));
    println!("dominant weights:");
    for (w, mult) in dominant {
        println!("  {w}  multiplicity {mult}");
    }
    Ok(())
}

fn node_series(rs: &RootSystem, cache: &CharCache, node: usize, max_m: usize) -> Result<QSeries> {
    if rs.cartan_type.family == Family::F && rs.rank == 4 {
        match node {
            1 => return Ok(f4_node1_series(rs, max_m)?),
            2 => return Ok(f4_node2_series(cache, max_m)?),
            _ => bail!("no seed data for F4 node {node}"),
        }
    }
    let engine = QEngine::new(cache);
    Ok(engine.series(node, max_m)?)
}

fn cmd_qtable(args: QtableArgs) -> Result<()> {
    let rs = root_system(&args.cartan.cartan_type)?;
    let cache = CharCache::new(rs.clone());
    let series = node_series(&rs, &cache, args.node, args.max_m)?;
    for m in 0..=args.max_m {
        let term = series.term(m);
        println!("m={m} dim={}: {}", term.dimension(&rs), combo_line(term));
    }
    Ok(())
}

fn combo_line(combo: &CharCombo) -> String {
    let mut parts: Vec<(Weight, String)> =
        combo.iter().map(|(w, c)| (w, c.to_string())).collect();
    parts.sort_by(|a, b| a.0.coords.cmp(&b.0.coords));
    let rendered: Vec<String> = parts
        .iter()
        .map(|(w, c)| {
            if c == "1" {
                format!("chi({w})")
            } else {
                format!("{c} chi({w})")
            }
        })
        .collect();
    if rendered.is_empty() {
        "0".to_string()
    } else {
        rendered.join(" + ")
    }
}

fn cmd_orbits(args: OrbitArgs) -> Result<()> {
    let rs = root_system(&args.cartan.cartan_type)?;
    let w = parse_weight(&args.weight, rs.rank)?;
    let orb = orbit(&rs, &w);
    let stab: Vec<usize> = stabilizer_nodes(&rs, &w).iter().map(|n| n + 1).collect();
    println!(
        "orbit of {w}: {} elements, stabilized by the simple reflections at nodes {stab:?}",
        orb.len()
    );
    if args.list {
        for v in &orb {
            println!("  {v}");
        }
    }
    Ok(())
}
