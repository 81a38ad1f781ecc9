use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chefs_hat::agents::agent_from_name;
use chefs_hat::event::EndReason;
use chefs_hat::log::write_log;
use chefs_hat::rng::derive_seed;
use chefs_hat::RuleConfig;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::output::{write_csv, write_stats_json};
use crate::{run_match, MatchSummary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Jsonl,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "jsonl" => Ok(Format::Jsonl),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format {other:?}; expected jsonl or csv")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TournamentConfig {
    pub matches: usize,
    pub master_seed: u64,
    /// Agent names; entry `j` is lineup slot `j`.
    pub lineup: [String; 4],
    pub rule_config: RuleConfig,
    /// Shift the lineup one seat clockwise per match.
    pub rotate_seats: bool,
    /// Where to write logs and stats; nothing is written when `None`.
    pub output_dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// Worker threads; 0 lets rayon decide.
    pub parallel: usize,
}

impl TournamentConfig {
    pub fn new(lineup: [String; 4], matches: usize, master_seed: u64) -> Self {
        Self {
            matches,
            master_seed,
            lineup,
            rule_config: RuleConfig::default(),
            rotate_seats: false,
            output_dir: None,
            formats: vec![Format::Jsonl, Format::Csv],
            parallel: 0,
        }
    }

    pub fn validate(&self) -> Result<(), TournamentError> {
        if self.matches == 0 {
            return Err(TournamentError::InvalidConfig("matches must be at least 1".into()));
        }
        for name in &self.lineup {
            agent_from_name(name, 0).map_err(|e| TournamentError::InvalidConfig(e.to_string()))?;
        }
        self.rule_config
            .validate()
            .map_err(|e| TournamentError::InvalidConfig(e.to_string()))
    }

    pub fn match_seed(&self, index: usize) -> u64 {
        derive_seed(self.master_seed, index as u64)
    }
}

#[derive(Debug, Error)]
pub enum TournamentError {
    #[error("invalid tournament config: {0}")]
    InvalidConfig(String),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
    #[error("cannot write csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Agent names by seat for match `index`, and the lineup slot in each seat.
pub fn seat_lineup(lineup: &[String; 4], index: usize, rotate: bool) -> ([String; 4], [usize; 4]) {
    let shift = if rotate { index % 4 } else { 0 };
    let slots = [0, 1, 2, 3].map(|seat| (seat + 4 - shift) % 4);
    (slots.map(|j| lineup[j].clone()), slots)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentStats {
    pub slot: usize,
    pub agent: String,
    pub wins: u64,
    pub win_rate: f64,
    pub mean_final_score: f64,
    pub mean_shifts: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TournamentStats {
    pub matches: u64,
    pub master_seed: u64,
    pub rotate_seats: bool,
    pub agents: Vec<AgentStats>,
    pub cutoffs: u64,
    pub faults: u64,
    pub mean_shifts: f64,
    pub mean_pizzas: f64,
    pub pass_rate: f64,
    pub food_fights: u64,
    pub dinners_served: u64,
}

#[derive(Clone, Debug)]
pub struct TournamentReport {
    pub stats: TournamentStats,
    /// Summary of every completed match, by index.
    pub summaries: Vec<(usize, MatchSummary)>,
    /// Indices of matches in which an agent fault was logged.
    pub faulted: Vec<usize>,
    /// Matches that could not be completed, with the reason.
    pub failed: Vec<(usize, String)>,
    pub runtime: Duration,
}

pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentReport, TournamentError> {
    config.validate()?;
    let started = Instant::now();
    let log_dir = match &config.output_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            config.formats.contains(&Format::Jsonl).then_some(dir.as_path())
        }
        None => None,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallel)
        .build()
        .map_err(|e| TournamentError::InvalidConfig(e.to_string()))?;
    let outcomes: Vec<Result<MatchSummary, String>> = pool.install(|| {
        (0..config.matches)
            .into_par_iter()
            .map(|index| play_one(config, index, log_dir))
            .collect()
    });

    let mut summaries = Vec::new();
    let mut failed = Vec::new();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(summary) => summaries.push((index, summary)),
            Err(reason) => failed.push((index, reason)),
        }
    }
    let faulted = summaries
        .iter()
        .filter(|(_, s)| s.faults > 0)
        .map(|(i, _)| *i)
        .collect();
    let stats = aggregate(config, &summaries);
    let report = TournamentReport {
        stats,
        summaries,
        faulted,
        failed,
        runtime: started.elapsed(),
    };
    if let Some(dir) = &config.output_dir {
        if config.formats.contains(&Format::Csv) {
            write_csv(&dir.join("matches.csv"), config, &report)?;
        }
        write_stats_json(&dir.join("stats.json"), &report.stats)?;
    }
    Ok(report)
}

fn play_one(config: &TournamentConfig, index: usize, log_dir: Option<&Path>) -> Result<MatchSummary, String> {
    let (seats, _) = seat_lineup(&config.lineup, index, config.rotate_seats);
    let seed = config.match_seed(index);
    let (log, summary) = run_match(&config.rule_config, &seats, seed).map_err(|e| e.to_string())?;
    if let Some(dir) = log_dir {
        let path = dir.join(format!("match_{index:06}.jsonl"));
        fs::write(&path, write_log(&log)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(summary)
}

/// Folds match summaries in index order.
fn aggregate(config: &TournamentConfig, summaries: &[(usize, MatchSummary)]) -> TournamentStats {
    let n = summaries.len() as u64;
    let mean = |total: u64| if n == 0 { 0.0 } else { total as f64 / n as f64 };
    let mut wins = [0u64; 4];
    let mut score_totals = [0u64; 4];
    let (mut shifts, mut pizzas, mut plays, mut passes) = (0u64, 0u64, 0u64, 0u64);
    let (mut cutoffs, mut faults, mut food, mut dinners) = (0u64, 0u64, 0u64, 0u64);
    for (index, s) in summaries {
        let (_, slots) = seat_lineup(&config.lineup, *index, config.rotate_seats);
        wins[slots[s.winner.index()]] += 1;
        for seat in 0..4 {
            score_totals[slots[seat]] += u64::from(s.scores[seat]);
        }
        shifts += u64::from(s.shifts);
        pizzas += u64::from(s.pizzas);
        plays += u64::from(s.plays);
        passes += u64::from(s.passes);
        cutoffs += u64::from(s.end_reason == EndReason::Cutoff);
        faults += u64::from(s.faults);
        food += u64::from(s.food_fights);
        dinners += u64::from(s.dinners_served);
    }
    let agents = (0..4)
        .map(|slot| AgentStats {
            slot,
            agent: config.lineup[slot].clone(),
            wins: wins[slot],
            win_rate: mean(wins[slot]),
            mean_final_score: mean(score_totals[slot]),
            mean_shifts: mean(shifts),
        })
        .collect();
    TournamentStats {
        matches: n,
        master_seed: config.master_seed,
        rotate_seats: config.rotate_seats,
        agents,
        cutoffs,
        faults,
        mean_shifts: mean(shifts),
        mean_pizzas: mean(pizzas),
        pass_rate: if plays + passes == 0 {
            0.0
        } else {
            passes as f64 / (plays + passes) as f64
        },
        food_fights: food,
        dinners_served: dinners,
    }
}
