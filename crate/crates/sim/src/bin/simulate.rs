//! Runs a seeded tournament between baseline agents.
//!
//! Every flag can also be set through an environment variable named
//! `CHEFSHAT_SIM_` plus the flag in upper snake case, e.g.
//! `CHEFSHAT_SIM_MATCHES=100`. Flags win over the environment.
//!
//! Exit status: 0 on success, 1 on a configuration or I/O error, 2 when any
//! agent fault was logged or a match could not be completed.

use std::path::PathBuf;
use std::process::ExitCode;

use chefs_hat::RuleConfig;
use chefs_hat_sim::{run_tournament, Format, TournamentConfig};
use clap::Parser;

#[derive(Debug, Parser)]
#[command(name = "simulate", version, about = "Seeded Chef's Hat tournaments")]
struct Args {
    /// Number of matches to play.
    #[arg(long, env = "CHEFSHAT_SIM_MATCHES", default_value_t = 100)]
    matches: usize,

    /// Master seed; match i uses derive_seed(seed, i).
    #[arg(long, env = "CHEFSHAT_SIM_SEED", default_value_t = 0)]
    seed: u64,

    /// Four agent names, comma separated (random, greedy, conservative).
    #[arg(long, env = "CHEFSHAT_SIM_AGENTS", value_delimiter = ',', default_value = "random,random,random,random")]
    agents: Vec<String>,

    /// JSON rule config file; omitted fields take their defaults.
    #[arg(long, env = "CHEFSHAT_SIM_RULES")]
    rules: Option<PathBuf>,

    /// Output directory for logs, matches.csv and stats.json.
    #[arg(long, env = "CHEFSHAT_SIM_OUT")]
    out: Option<PathBuf>,

    /// Output formats, comma separated: jsonl, csv.
    #[arg(long, env = "CHEFSHAT_SIM_FORMAT", value_delimiter = ',', default_value = "jsonl,csv")]
    format: Vec<Format>,

    /// Move the lineup one seat clockwise per match.
    #[arg(long, env = "CHEFSHAT_SIM_ROTATE_SEATS")]
    rotate_seats: bool,

    /// Override the rule config's shift cap.
    #[arg(long, env = "CHEFSHAT_SIM_MAX_SHIFTS")]
    max_shifts: Option<u32>,

    /// Worker threads (0 = one per core).
    #[arg(long, env = "CHEFSHAT_SIM_PARALLEL", default_value_t = 0)]
    parallel: usize,
}

fn config_from(args: Args) -> Result<TournamentConfig, String> {
    let lineup: [String; 4] = args
        .agents
        .try_into()
        .map_err(|v: Vec<String>| format!("--agents needs exactly 4 names, got {}", v.len()))?;
    let mut rule_config = match &args.rules {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RuleConfig::from_json(&text).map_err(|e| e.to_string())?
        }
        None => RuleConfig::default(),
    };
    if let Some(k) = args.max_shifts {
        rule_config.max_shifts = k;
    }
    let mut config = TournamentConfig::new(lineup, args.matches, args.seed);
    config.rule_config = rule_config;
    config.rotate_seats = args.rotate_seats;
    config.output_dir = args.out;
    config.formats = args.format;
    config.parallel = args.parallel;
    Ok(config)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match config_from(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(1);
        }
    };
    let report = match run_tournament(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("simulate: {e}");
            return ExitCode::from(1);
        }
    };
    let stats = &report.stats;
    println!(
        "{} matches in {:.2}s, mean {:.2} shifts, {} cutoffs",
        stats.matches,
        report.runtime.as_secs_f64(),
        stats.mean_shifts,
        stats.cutoffs
    );
    for a in &stats.agents {
        println!(
            "  slot {} {:<13} wins {:>6}  win rate {:.4}  mean score {:.2}",
            a.slot, a.agent, a.wins, a.win_rate, a.mean_final_score
        );
    }
    for (index, reason) in &report.failed {
        eprintln!("match {index} failed: {reason}");
    }
    if !report.faulted.is_empty() {
        eprintln!("agent faults in {} matches: {:?}", report.faulted.len(), report.faulted);
    }
    if report.faulted.is_empty() && report.failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
