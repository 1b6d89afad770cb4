//! `girylab`: run law suites, evaluate expressions, build refinement trees.
//!
//! Exit codes: 0 when everything passed, 1 when a law failed, 2 on usage,
//! parse or domain errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use girylab::error::{Error, Result};
use girylab::eval::eval_value;
use girylab::stdspace::{refinement_reports, RefinementTree, Split};
use girylab::suites::{run_suites, SuiteConfig};

#[derive(Parser)]
#[command(name = "girylab", version, about = "Exact law checks for the Giry monad and super convex spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run law suites and print a JSON report.
    Check {
        /// Suite to run; repeat for several. Default: all.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Denominator bound of the weight grid.
        #[arg(long)]
        grid: Option<u64>,
        /// Random cases per law.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, env = "GIRYLAB_SEED")]
        seed: Option<u64>,
        /// Enumeration cap for tail-backed measures.
        #[arg(long)]
        cap: Option<u64>,
        /// Size for the exhaustive endofunction suites (at most 5).
        #[arg(long)]
        n: Option<usize>,
        /// Also write the report to this file.
        #[arg(long)]
        json: Option<PathBuf>,
        /// JSON config file; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Evaluate a JSON expression file.
    Eval { file: PathBuf },
    /// Apply a split script to a tree and check every refinement square.
    Refine {
        tree: PathBuf,
        /// JSON list of splits `{"atom", "left", "right"}`.
        #[arg(long)]
        script: Option<PathBuf>,
    },
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { suites, grid, random, seed, cap, n, json, config } => {
            let mut cfg = match &config {
                Some(path) => serde_json::from_value::<SuiteConfig>(read_json(path)?)
                    .map_err(|e| Error::BadConfig(e.to_string()))?,
                None => SuiteConfig::default(),
            };
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            cfg.grid = grid.unwrap_or(cfg.grid);
            cfg.random_cases = random.unwrap_or(cfg.random_cases);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.enumeration_cap = cap.unwrap_or(cfg.enumeration_cap);
            cfg.n = n.unwrap_or(cfg.n);
            let reports = run_suites(&cfg)?;
            for r in &reports {
                let status = if r.passed() { "pass" } else { "FAIL" };
                eprintln!("{status} {:<16} cases={:<8} failures={:<4} {}ms", r.suite, r.cases, r.failures, r.wall_ms);
            }
            let passed = reports.iter().all(|r| r.passed());
            let doc = json!({ "config": cfg, "passed": passed, "suites": reports });
            if let Some(path) = json {
                fs::write(&path, pretty(&doc)).map_err(|e| Error::BadConfig(format!("{}: {e}", path.display())))?;
            }
            println!("{}", pretty(&doc));
            Ok(passed)
        }
        Command::Eval { file } => {
            println!("{}", eval_value(&read_json(&file)?)?);
            Ok(true)
        }
        Command::Refine { tree, script } => {
            let mut t = RefinementTree::from_json(&read_json(&tree)?)?;
            if let Some(path) = script {
                let splits: Vec<Split> = serde_json::from_value(read_json(&path)?)?;
                for s in &splits {
                    t = t.apply(s)?;
                }
            }
            let reports = refinement_reports(&t);
            let passed = reports.iter().all(|r| r.passed());
            let collapses: Vec<_> = (1..t.depth()).map(|n| t.collapse(n).expect("level exists").to_vec()).collect();
            let levels: Vec<_> = (1..=t.depth()).map(|n| t.level(n).expect("level exists").to_vec()).collect();
            let doc = json!({
                "tree": t.to_json(),
                "depth": t.depth(),
                "levels": levels,
                "collapses": collapses,
                "passed": passed,
                "laws": reports,
            });
            println!("{}", pretty(&doc));
            Ok(passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
