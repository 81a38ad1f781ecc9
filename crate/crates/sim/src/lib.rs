//! Seeded tournaments between Chef's Hat agents.
//!
//! [`run_match`] plays one match to the end and summarizes it;
//! [`run_tournament`] plays a batch in parallel, writes one JSONL log per
//! match plus CSV and JSON statistics, and aggregates in match-index order so
//! results never depend on scheduling.
//!
//! Seeds: match `i` of a tournament uses `derive_seed(master_seed, i)`, and
//! the agent in seat `s` of a match with seed `m` uses `derive_seed(m, 1 + s)`.
//! `derive_seed` is output number `i` of a SplitMix64 stream started at the
//! master seed.

mod output;
mod tournament;

pub use output::{write_csv, write_stats_json, CSV_HEADER};
pub use tournament::{
    run_tournament, seat_lineup, AgentStats, Format, TournamentConfig, TournamentError,
    TournamentReport, TournamentStats,
};

use chefs_hat::agents::{agent_from_name, seat_seed, AgentPolicy, UnknownAgent};
use chefs_hat::driver::MatchDriver;
use chefs_hat::event::{EndReason, Event, EventKind, SpecialActionKind};
use chefs_hat::{EngineError, MatchState, RuleConfig, Seat};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    UnknownAgent(#[from] UnknownAgent),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Per-match figures, derived from the log alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatchSummary {
    pub seed: u64,
    /// Agent name in each seat.
    pub seats: [String; 4],
    pub winner: Seat,
    pub end_reason: EndReason,
    pub scores: [u32; 4],
    pub shifts: u32,
    pub pizzas: u32,
    pub plays: u32,
    pub passes: u32,
    pub food_fights: u32,
    pub dinners_served: u32,
    pub faults: u32,
}

impl MatchSummary {
    pub fn from_log(seats: [String; 4], log: &[Event]) -> Option<Self> {
        let EventKind::MatchStarted { seed, .. } = log.first()?.kind else {
            return None;
        };
        let EventKind::MatchEnded {
            winner,
            reason,
            scores,
        } = log.last()?.kind
        else {
            return None;
        };
        let mut summary = MatchSummary {
            seed,
            seats,
            winner,
            end_reason: reason,
            scores,
            shifts: log.last()?.shift,
            pizzas: 0,
            plays: 0,
            passes: 0,
            food_fights: 0,
            dinners_served: 0,
            faults: 0,
        };
        for event in log {
            match event.kind {
                EventKind::PizzaOpened { .. } => summary.pizzas += 1,
                EventKind::CardsPlayed { .. } => summary.plays += 1,
                EventKind::Passed { .. } => summary.passes += 1,
                EventKind::SpecialActionDeclared {
                    action: Some(SpecialActionKind::FoodFight),
                    ..
                } => summary.food_fights += 1,
                EventKind::SpecialActionDeclared {
                    action: Some(SpecialActionKind::DinnerIsServed),
                    ..
                } => summary.dinners_served += 1,
                EventKind::AgentFault { .. } => summary.faults += 1,
                _ => {}
            }
        }
        Some(summary)
    }

    /// Passes over all pizza actions taken.
    pub fn pass_rate(&self) -> f64 {
        let actions = self.plays + self.passes;
        if actions == 0 {
            0.0
        } else {
            f64::from(self.passes) / f64::from(actions)
        }
    }
}

pub fn build_agents(seats: &[String; 4], match_seed: u64) -> Result<[Box<dyn AgentPolicy>; 4], SimError> {
    let mut agents = Vec::with_capacity(4);
    for (i, name) in seats.iter().enumerate() {
        agents.push(agent_from_name(name, seat_seed(match_seed, Seat(i as u8)))?);
    }
    Ok(agents.try_into().unwrap_or_else(|_| unreachable!()))
}

/// Plays one match with `seats[s]` in seat `s`.
pub fn run_match(
    rule_config: &RuleConfig,
    seats: &[String; 4],
    seed: u64,
) -> Result<(Vec<Event>, MatchSummary), SimError> {
    run_match_observed(rule_config, seats, seed, |_, _| {})
}

/// [`run_match`], calling `observe` with the state and log after every
/// change.
pub fn run_match_observed(
    rule_config: &RuleConfig,
    seats: &[String; 4],
    seed: u64,
    observe: impl FnMut(&MatchState, &[Event]),
) -> Result<(Vec<Event>, MatchSummary), SimError> {
    let mut agents = build_agents(seats, seed)?;
    let mut driver = MatchDriver::new(rule_config.clone(), seed)?;
    driver.run_to_end(&mut agents, observe)?;
    let log = driver.into_log();
    let summary = MatchSummary::from_log(seats.clone(), &log)
        .ok_or_else(|| EngineError::Internal("match ended without MatchEnded".into()))?;
    Ok((log, summary))
}
