//! One table: seats, the live match and its turn timer.
//!
//! [`Table`] is synchronous and clock-free. Every input carries `now`, and
//! every output is a list of frames addressed to sessions, so the same code
//! runs inside the network actor and in plain unit tests.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use chefs_hat::agents::{agent_from_name, seat_seed, AgentPolicy};
use chefs_hat::driver::{MatchDriver, Prompt};
use chefs_hat::event::Event;
use chefs_hat::log::write_log;
use chefs_hat::rules::PlayAction;
use chefs_hat::{Action, EngineError, RuleConfig, Seat};
use log::{error, info};
use thiserror::Error;

use crate::protocol::{
    codes, ActionAcceptedBody, ActionRejectedBody, ExchangePromptBody, Frame, MatchEndedBody,
    MessageType, SeatAssignedBody, SeatInfo, SpecialActionPromptBody, SubmittedAction,
    TableStateBody, TableStatus, ViewUpdateBody, YourTurnBody,
};

pub type SessionId = String;

/// A frame for one session.
#[derive(Clone, Debug, PartialEq)]
pub struct Outbound {
    pub to: SessionId,
    pub frame: Frame,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("{0}")]
    InvalidConfig(String),
    #[error("{0}")]
    UnknownAgent(String),
}

impl TableError {
    pub fn code(&self) -> &'static str {
        match self {
            TableError::InvalidConfig(_) => codes::INVALID_CONFIG,
            TableError::UnknownAgent(_) => codes::UNKNOWN_AGENT,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TableSettings {
    pub rule_config: RuleConfig,
    /// Agent name per seat; `None` leaves the seat open for a human.
    pub bots: [Option<String>; 4],
    /// `None` disables the timer.
    pub turn_timer: Option<Duration>,
    pub seed: u64,
    /// How long a disconnected human keeps the seat.
    pub reconnect_grace: Duration,
    /// Agent that takes over a seat abandoned for longer than the grace.
    pub fallback_agent: String,
    /// Where the finished log is written, as `{table_id}.jsonl`.
    pub log_dir: Option<PathBuf>,
}

enum SeatSlot {
    Open,
    Bot {
        agent: String,
        policy: Box<dyn AgentPolicy>,
    },
    Human {
        session: SessionId,
        name: String,
        disconnected_since: Option<Instant>,
    },
}

impl SeatSlot {
    fn session(&self) -> Option<&str> {
        match self {
            SeatSlot::Human { session, .. } => Some(session),
            _ => None,
        }
    }
}

pub struct Table {
    id: String,
    settings: TableSettings,
    seats: [SeatSlot; 4],
    /// Sessions told about the end of the match without holding a seat.
    watchers: Vec<SessionId>,
    driver: Option<MatchDriver>,
    status: TableStatus,
    /// Whether the seat's current prompt has been sent.
    prompted: [bool; 4],
    deadlines: [Option<Instant>; 4],
    log_path: Option<PathBuf>,
}

impl Table {
    pub fn new(id: String, settings: TableSettings) -> Result<Self, TableError> {
        settings
            .rule_config
            .validate()
            .map_err(|e| TableError::InvalidConfig(e.to_string()))?;
        agent_from_name(&settings.fallback_agent, 0)
            .map_err(|e| TableError::UnknownAgent(e.to_string()))?;
        let mut seats = [
            SeatSlot::Open,
            SeatSlot::Open,
            SeatSlot::Open,
            SeatSlot::Open,
        ];
        for seat in Seat::ALL {
            if let Some(agent) = &settings.bots[seat.index()] {
                let policy = agent_from_name(agent, seat_seed(settings.seed, seat))
                    .map_err(|e| TableError::UnknownAgent(e.to_string()))?;
                seats[seat.index()] = SeatSlot::Bot {
                    agent: agent.clone(),
                    policy,
                };
            }
        }
        Ok(Self {
            id,
            settings,
            seats,
            watchers: Vec::new(),
            driver: None,
            status: TableStatus::Lobby,
            prompted: [false; 4],
            deadlines: [None; 4],
            log_path: None,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> TableStatus {
        self.status
    }

    pub fn log(&self) -> Option<&[Event]> {
        self.driver.as_ref().map(|d| d.log())
    }

    /// Path of the written log once the match has finished.
    pub fn log_path(&self) -> Option<&PathBuf> {
        self.log_path.as_ref()
    }

    pub fn seat_of(&self, session: &str) -> Option<Seat> {
        Seat::ALL
            .into_iter()
            .find(|s| self.seats[s.index()].session() == Some(session))
    }

    pub fn state_body(&self) -> TableStateBody {
        TableStateBody {
            table_id: self.id.clone(),
            status: self.status,
            seats: self
                .seats
                .iter()
                .map(|slot| match slot {
                    SeatSlot::Open => SeatInfo::Open,
                    SeatSlot::Bot { agent, .. } => SeatInfo::Bot {
                        agent: agent.clone(),
                    },
                    SeatSlot::Human {
                        name,
                        disconnected_since,
                        ..
                    } => SeatInfo::Human {
                        name: name.clone(),
                        connected: disconnected_since.is_none(),
                    },
                })
                .collect(),
            turn_timer_ms: self.settings.turn_timer.map_or(0, |t| t.as_millis() as u64),
            rule_config: self.settings.rule_config.clone(),
        }
    }

    /// Announces the table to its creator and starts it if bots fill every seat.
    pub fn open(&mut self, creator: &str, now: Instant) -> Vec<Outbound> {
        self.watchers.push(creator.to_string());
        let mut out = vec![Outbound {
            to: creator.to_string(),
            frame: Frame::new(MessageType::TableState, &self.state_body()),
        }];
        self.start_if_full(now, &mut out);
        out
    }

    /// Seats `session`, or re-sends its seat and view if it already has one.
    pub fn join(
        &mut self,
        session: &str,
        name: &str,
        now: Instant,
    ) -> Result<Vec<Outbound>, (&'static str, String)> {
        let mut out = Vec::new();
        if let Some(seat) = self.seat_of(session) {
            self.resync(seat, now, &mut out);
            return Ok(out);
        }
        let open = Seat::ALL
            .into_iter()
            .find(|s| matches!(self.seats[s.index()], SeatSlot::Open));
        let (TableStatus::Lobby, Some(seat)) = (self.status, open) else {
            return Err((
                codes::TABLE_FULL,
                format!("table {} has no open seat", self.id),
            ));
        };
        self.seats[seat.index()] = SeatSlot::Human {
            session: session.to_string(),
            name: name.to_string(),
            disconnected_since: None,
        };
        out.push(self.seat_assigned(session, seat));
        self.broadcast_state(&mut out);
        self.start_if_full(now, &mut out);
        Ok(out)
    }

    /// Marks the session's seat disconnected. The seat is kept for the grace
    /// period; `timeout_tick` hands it to a bot after that.
    pub fn disconnect(&mut self, session: &str, now: Instant) -> Vec<Outbound> {
        let mut out = Vec::new();
        let Some(seat) = self.seat_of(session) else {
            return out;
        };
        if let SeatSlot::Human {
            disconnected_since, ..
        } = &mut self.seats[seat.index()]
        {
            disconnected_since.get_or_insert(now);
        }
        self.broadcast_state(&mut out);
        out
    }

    /// Rebinds a reconnected session and re-sends what it missed.
    pub fn reconnect(&mut self, session: &str, now: Instant) -> Vec<Outbound> {
        let mut out = Vec::new();
        let Some(seat) = self.seat_of(session) else {
            return out;
        };
        if let SeatSlot::Human {
            disconnected_since, ..
        } = &mut self.seats[seat.index()]
        {
            *disconnected_since = None;
        }
        self.resync(seat, now, &mut out);
        self.broadcast_state(&mut out);
        out
    }

    pub fn submit(
        &mut self,
        session: &str,
        action: SubmittedAction,
        now: Instant,
    ) -> Vec<Outbound> {
        let mut out = Vec::new();
        let Some(seat) = self.seat_of(session) else {
            out.push(self.rejected(
                session,
                codes::NOT_SEATED,
                "you hold no seat at this table".into(),
            ));
            return out;
        };
        let Some(driver) = self
            .driver
            .as_mut()
            .filter(|_| self.status == TableStatus::Playing)
        else {
            out.push(self.rejected(
                session,
                codes::NOT_YOUR_TURN,
                "the match is not running".into(),
            ));
            return out;
        };
        if driver.prompt_for(seat).is_none() {
            out.push(self.rejected(
                session,
                codes::NOT_YOUR_TURN,
                format!("{seat} has nothing to answer"),
            ));
            return out;
        }
        let result = match action {
            SubmittedAction::Play {
                face,
                count,
                card_uids,
            } => driver.play(
                seat,
                &Action::Play(PlayAction {
                    face,
                    count,
                    card_uids,
                }),
            ),
            SubmittedAction::Pass => driver.play(seat, &Action::Pass),
            SubmittedAction::ExchangeReturn { cards } => driver.exchange_return(seat, &cards),
            SubmittedAction::SpecialAction { declare } => driver.special_action(seat, declare),
        };
        match result {
            Err(e) => out.push(self.rejected(session, e.code(), e.to_string())),
            Ok(range) => {
                out.push(Outbound {
                    to: session.to_string(),
                    frame: Frame::new(
                        MessageType::ActionAccepted,
                        &ActionAcceptedBody {
                            table_id: self.id.clone(),
                            last_seq: self.last_seq(),
                        },
                    ),
                });
                self.prompted[seat.index()] = false;
                self.deadlines[seat.index()] = None;
                if !range.is_empty() {
                    self.progress(None, now, &mut out);
                }
            }
        }
        out
    }

    /// Moves for every seat whose turn timer expired and hands seats
    /// abandoned past the grace period to the fallback bot.
    pub fn timeout_tick(&mut self, now: Instant) -> Vec<Outbound> {
        let mut out = Vec::new();
        let abandoned: Vec<Seat> = Seat::ALL
            .into_iter()
            .filter(|s| match &self.seats[s.index()] {
                SeatSlot::Human {
                    disconnected_since: Some(t),
                    ..
                } => now.duration_since(*t) >= self.settings.reconnect_grace,
                _ => false,
            })
            .collect();
        for &seat in &abandoned {
            self.abandon(seat);
        }
        if self.status != TableStatus::Playing {
            if !abandoned.is_empty() {
                self.broadcast_state(&mut out);
            }
            return out;
        }
        let mut auto_seat = None;
        for seat in Seat::ALL {
            let expired = self.deadlines[seat.index()].is_some_and(|d| d <= now);
            if !expired {
                continue;
            }
            self.deadlines[seat.index()] = None;
            self.prompted[seat.index()] = false;
            let driver = self.driver.as_mut().expect("playing tables have a match");
            if let Err(e) = driver.auto_move(seat) {
                self.fail(e, &mut out);
                return out;
            }
            info!("table {}: {seat} timed out", self.id);
            auto_seat = Some(seat);
        }
        if !abandoned.is_empty() {
            self.broadcast_state(&mut out);
        }
        if auto_seat.is_some() || !abandoned.is_empty() {
            self.progress(auto_seat, now, &mut out);
        }
        out
    }

    /// The earliest instant at which `timeout_tick` has work to do.
    pub fn next_wakeup(&self) -> Option<Instant> {
        let grace = self.seats.iter().filter_map(|slot| match slot {
            SeatSlot::Human {
                disconnected_since: Some(t),
                ..
            } => Some(*t + self.settings.reconnect_grace),
            _ => None,
        });
        self.deadlines.iter().flatten().copied().chain(grace).min()
    }

    fn abandon(&mut self, seat: Seat) {
        if self.status == TableStatus::Lobby {
            self.seats[seat.index()] = SeatSlot::Open;
            return;
        }
        let agent = self.settings.fallback_agent.clone();
        let policy = agent_from_name(&agent, seat_seed(self.settings.seed, seat))
            .expect("checked at creation");
        info!("table {}: {seat} abandoned, {agent} takes over", self.id);
        self.seats[seat.index()] = SeatSlot::Bot { agent, policy };
        self.prompted[seat.index()] = false;
        self.deadlines[seat.index()] = None;
    }

    fn start_if_full(&mut self, now: Instant, out: &mut Vec<Outbound>) {
        if self.status != TableStatus::Lobby
            || self.seats.iter().any(|s| matches!(s, SeatSlot::Open))
        {
            return;
        }
        match MatchDriver::new(self.settings.rule_config.clone(), self.settings.seed) {
            Ok(driver) => self.driver = Some(driver),
            Err(e) => return self.fail(e, out),
        }
        self.status = TableStatus::Playing;
        info!(
            "table {}: match started with seed {}",
            self.id, self.settings.seed
        );
        self.broadcast_state(out);
        self.progress(None, now, out);
    }

    /// Lets the bots answer, then tells every human what changed and what
    /// they are now being asked.
    fn progress(&mut self, auto_seat: Option<Seat>, now: Instant, out: &mut Vec<Outbound>) {
        if let Err(e) = self.run_bots() {
            return self.fail(e, out);
        }
        for seat in Seat::ALL {
            if let Some(session) = self.seats[seat.index()].session() {
                out.push(self.view_update(session, seat, auto_seat));
            }
        }
        if self.driver.as_ref().is_some_and(|d| d.is_over()) {
            return self.finish(out);
        }
        self.send_prompts(now, out);
    }

    fn run_bots(&mut self) -> Result<(), EngineError> {
        let driver = self.driver.as_mut().expect("running tables have a match");
        loop {
            driver.advance()?;
            if driver.is_over() {
                return Ok(());
            }
            let bots: Vec<Seat> = driver
                .awaiting()
                .into_iter()
                .filter(|s| matches!(self.seats[s.index()], SeatSlot::Bot { .. }))
                .collect();
            if bots.is_empty() {
                return Ok(());
            }
            for seat in bots {
                let SeatSlot::Bot { policy, .. } = &mut self.seats[seat.index()] else {
                    unreachable!("filtered to bots");
                };
                driver.act_with(seat, policy.as_mut())?;
            }
        }
    }

    fn send_prompts(&mut self, now: Instant, out: &mut Vec<Outbound>) {
        let driver = self.driver.as_ref().expect("running tables have a match");
        for seat in Seat::ALL {
            let i = seat.index();
            let Some(session) = self.seats[i].session() else {
                continue;
            };
            let Some(prompt) = driver.prompt_for(seat) else {
                self.prompted[i] = false;
                self.deadlines[i] = None;
                continue;
            };
            if self.prompted[i] {
                continue;
            }
            self.prompted[i] = true;
            self.deadlines[i] = self.settings.turn_timer.map(|t| now + t);
            let frame = self.prompt_frame(seat, prompt, now);
            out.push(Outbound {
                to: session.to_string(),
                frame,
            });
        }
    }

    fn prompt_frame(&self, seat: Seat, prompt: Prompt, now: Instant) -> Frame {
        let driver = self.driver.as_ref().expect("running tables have a match");
        let deadline_ms = self.deadlines[seat.index()]
            .map(|d| d.saturating_duration_since(now).as_millis() as u64);
        let table_id = self.id.clone();
        let last_seq = self.last_seq();
        match prompt {
            Prompt::Turn => Frame::new(
                MessageType::YourTurn,
                &YourTurnBody {
                    table_id,
                    seat,
                    legal: driver.state().legal_for(seat),
                    deadline_ms,
                    last_seq,
                },
            ),
            Prompt::ExchangeReturn { count, received } => Frame::new(
                MessageType::ExchangePrompt,
                &ExchangePromptBody {
                    table_id,
                    seat,
                    count,
                    received,
                    deadline_ms,
                    last_seq,
                },
            ),
            Prompt::SpecialAction(offered) => Frame::new(
                MessageType::SpecialActionPrompt,
                &SpecialActionPromptBody {
                    table_id,
                    seat,
                    offered,
                    deadline_ms,
                    last_seq,
                },
            ),
        }
    }

    fn resync(&mut self, seat: Seat, now: Instant, out: &mut Vec<Outbound>) {
        let session = self.seats[seat.index()]
            .session()
            .expect("resync is for seated humans")
            .to_string();
        out.push(self.seat_assigned(&session, seat));
        out.push(Outbound {
            to: session.clone(),
            frame: Frame::new(MessageType::TableState, &self.state_body()),
        });
        let Some(driver) = &self.driver else {
            return;
        };
        out.push(self.view_update(&session, seat, None));
        if self.status == TableStatus::Finished {
            out.push(self.match_ended(&session));
            return;
        }
        if let Some(prompt) = driver.prompt_for(seat) {
            self.prompted[seat.index()] = true;
            if self.deadlines[seat.index()].is_none() {
                self.deadlines[seat.index()] = self.settings.turn_timer.map(|t| now + t);
            }
            let frame = self.prompt_frame(seat, prompt, now);
            out.push(Outbound { to: session, frame });
        }
    }

    fn finish(&mut self, out: &mut Vec<Outbound>) {
        self.status = TableStatus::Finished;
        self.deadlines = [None; 4];
        let driver = self.driver.as_ref().expect("finished tables had a match");
        if let Some(dir) = &self.settings.log_dir {
            let path = dir.join(format!("{}.jsonl", self.id));
            match fs::create_dir_all(dir).and_then(|_| fs::write(&path, write_log(driver.log()))) {
                Ok(()) => self.log_path = Some(path),
                Err(e) => error!("table {}: cannot write {}: {e}", self.id, path.display()),
            }
        }
        info!(
            "table {}: match ended, winner {:?}",
            self.id,
            driver.state().winner
        );
        for session in self.recipients() {
            out.push(self.match_ended(&session));
        }
        self.broadcast_state(out);
    }

    fn fail(&mut self, e: EngineError, out: &mut Vec<Outbound>) {
        error!("table {}: engine failure: {e}", self.id);
        self.status = TableStatus::Finished;
        self.deadlines = [None; 4];
        for session in self.recipients() {
            out.push(Outbound {
                to: session,
                frame: Frame::error(e.code(), e.to_string()),
            });
        }
    }

    /// Seated humans first, then watchers that hold no seat.
    fn recipients(&self) -> Vec<SessionId> {
        let mut all: Vec<SessionId> = self
            .seats
            .iter()
            .filter_map(|s| s.session().map(str::to_string))
            .collect();
        for watcher in &self.watchers {
            if !all.contains(watcher) {
                all.push(watcher.clone());
            }
        }
        all
    }

    fn broadcast_state(&self, out: &mut Vec<Outbound>) {
        let body = self.state_body();
        for seat in Seat::ALL {
            if let Some(session) = self.seats[seat.index()].session() {
                out.push(Outbound {
                    to: session.to_string(),
                    frame: Frame::new(MessageType::TableState, &body),
                });
            }
        }
    }

    fn last_seq(&self) -> u64 {
        self.driver
            .as_ref()
            .map_or(0, |d| d.log().len().saturating_sub(1) as u64)
    }

    fn view_update(&self, session: &str, seat: Seat, auto_seat: Option<Seat>) -> Outbound {
        let driver = self.driver.as_ref().expect("views need a match");
        Outbound {
            to: session.to_string(),
            frame: Frame::new(
                MessageType::ViewUpdate,
                &ViewUpdateBody {
                    table_id: &self.id,
                    view: driver.view(seat),
                    auto_move: auto_seat.is_some(),
                    auto_seat,
                },
            ),
        }
    }

    fn seat_assigned(&self, session: &str, seat: Seat) -> Outbound {
        Outbound {
            to: session.to_string(),
            frame: Frame::new(
                MessageType::SeatAssigned,
                &SeatAssignedBody {
                    table_id: self.id.clone(),
                    seat,
                },
            ),
        }
    }

    fn match_ended(&self, session: &str) -> Outbound {
        let state = self
            .driver
            .as_ref()
            .expect("ended tables had a match")
            .state();
        Outbound {
            to: session.to_string(),
            frame: Frame::new(
                MessageType::MatchEnded,
                &MatchEndedBody {
                    table_id: self.id.clone(),
                    winner: state.winner,
                    reason: state.end_reason,
                    scores: state.scores,
                    last_seq: self.last_seq(),
                },
            ),
        }
    }

    fn rejected(&self, session: &str, reason: &str, detail: String) -> Outbound {
        Outbound {
            to: session.to_string(),
            frame: Frame::new(
                MessageType::ActionRejected,
                &ActionRejectedBody {
                    table_id: self.id.clone(),
                    reason: reason.to_string(),
                    detail,
                },
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chefs_hat::rules::PlayAction;

    fn settings(bots: [Option<&str>; 4], timer_ms: u64) -> TableSettings {
        TableSettings {
            rule_config: RuleConfig::default(),
            bots: bots.map(|b| b.map(str::to_string)),
            turn_timer: (timer_ms > 0).then(|| Duration::from_millis(timer_ms)),
            seed: 11,
            reconnect_grace: Duration::from_secs(60),
            fallback_agent: "random".into(),
            log_dir: None,
        }
    }

    fn kinds(out: &[Outbound], to: &str) -> Vec<MessageType> {
        out.iter()
            .filter(|o| o.to == to)
            .map(|o| o.frame.kind)
            .collect()
    }

    fn human_table(timer_ms: u64) -> (Table, Vec<Outbound>, Instant) {
        let now = Instant::now();
        let mut table = Table::new(
            "t".into(),
            settings(
                [Some("random"), Some("greedy"), Some("random"), None],
                timer_ms,
            ),
        )
        .unwrap();
        table.open("c", now);
        let out = table.join("h", "hana", now).unwrap();
        (table, out, now)
    }

    /// Submits a legal answer for `seat` whatever it is being asked.
    fn answer(table: &mut Table, session: &str, now: Instant) -> Vec<Outbound> {
        let seat = table.seat_of(session).unwrap();
        let driver = table.driver.as_ref().unwrap();
        let action = match driver.prompt_for(seat).unwrap() {
            Prompt::Turn => SubmittedAction::from(driver.state().legal_for(seat).pop().unwrap()),
            Prompt::ExchangeReturn { count, .. } => SubmittedAction::ExchangeReturn {
                cards: driver.fallback_return(seat, count),
            },
            Prompt::SpecialAction(_) => SubmittedAction::SpecialAction { declare: false },
        };
        table.submit(session, action, now)
    }

    #[test]
    fn three_bots_leave_one_open_seat() {
        let table = Table::new(
            "t".into(),
            settings([Some("random"), None, Some("greedy"), Some("random")], 0),
        )
        .unwrap();
        let open = table
            .state_body()
            .seats
            .iter()
            .filter(|s| **s == SeatInfo::Open)
            .count();
        assert_eq!(open, 1);
        assert_eq!(table.status(), TableStatus::Lobby);
    }

    #[test]
    fn unknown_agents_and_bad_rules_are_refused() {
        let err = Table::new("t".into(), settings([Some("oracle"), None, None, None], 0))
            .err()
            .unwrap();
        assert_eq!(err.code(), codes::UNKNOWN_AGENT);
        let mut bad = settings([None; 4], 0);
        bad.rule_config.target_score = 0;
        assert_eq!(
            Table::new("t".into(), bad).err().unwrap().code(),
            codes::INVALID_CONFIG
        );
    }

    #[test]
    fn last_join_starts_the_match_with_one_view_per_human() {
        let now = Instant::now();
        let mut table = Table::new(
            "t".into(),
            settings([None, None, Some("random"), Some("random")], 0),
        )
        .unwrap();
        let first = table.join("a", "ann", now).unwrap();
        assert_eq!(
            kinds(&first, "a"),
            vec![MessageType::SeatAssigned, MessageType::TableState]
        );
        let second = table.join("b", "bo", now).unwrap();
        assert_eq!(table.status(), TableStatus::Playing);
        for session in ["a", "b"] {
            let views: Vec<_> = second
                .iter()
                .filter(|o| o.to == session && o.frame.kind == MessageType::ViewUpdate)
                .collect();
            assert_eq!(views.len(), 1);
            let seat = table.seat_of(session).unwrap();
            assert_eq!(views[0].frame.body["view"]["seat"], seat.0);
        }
    }

    #[test]
    fn joining_a_running_table_is_refused() {
        let (mut table, _, now) = human_table(0);
        assert_eq!(
            table.join("late", "lee", now).unwrap_err().0,
            codes::TABLE_FULL
        );
    }

    #[test]
    fn rejoin_returns_the_same_seat_and_a_fresh_view() {
        let (mut table, _, now) = human_table(0);
        let seat = table.seat_of("h").unwrap();
        table.disconnect("h", now);
        let out = table.reconnect("h", now + Duration::from_secs(5));
        let assigned = out
            .iter()
            .find(|o| o.frame.kind == MessageType::SeatAssigned)
            .unwrap();
        assert_eq!(assigned.frame.body["seat"], seat.0);
        assert!(out.iter().any(|o| o.frame.kind == MessageType::ViewUpdate));
        let again = table.join("h", "hana", now).unwrap();
        assert!(again
            .iter()
            .any(|o| o.frame.kind == MessageType::ViewUpdate));
    }

    #[test]
    fn a_human_is_prompted_once_per_question() {
        let (mut table, out, now) = human_table(0);
        let prompts = |out: &[Outbound]| {
            out.iter()
                .filter(|o| {
                    matches!(
                        o.frame.kind,
                        MessageType::YourTurn
                            | MessageType::ExchangePrompt
                            | MessageType::SpecialActionPrompt
                    )
                })
                .count()
        };
        assert!(prompts(&out) <= 1);
        let mut out = out;
        let mut rounds = 0;
        while table.status() == TableStatus::Playing {
            assert_eq!(prompts(&out), 1, "round {rounds}: {:?}", kinds(&out, "h"));
            out = answer(&mut table, "h", now);
            rounds += 1;
        }
        assert!(out.iter().any(|o| o.frame.kind == MessageType::MatchEnded));
    }

    #[test]
    fn every_submit_gets_exactly_one_verdict() {
        let (mut table, _, now) = human_table(0);
        let verdicts = |out: &[Outbound]| {
            out.iter()
                .filter(|o| {
                    matches!(
                        o.frame.kind,
                        MessageType::ActionAccepted | MessageType::ActionRejected
                    )
                })
                .count()
        };
        let bogus = SubmittedAction::Play {
            face: 1,
            count: 9,
            card_uids: vec![],
        };
        assert_eq!(verdicts(&table.submit("h", bogus, now)), 1);
        assert_eq!(verdicts(&answer(&mut table, "h", now)), 1);
        assert_eq!(
            verdicts(&table.submit("nobody", SubmittedAction::Pass, now)),
            1
        );
    }

    #[test]
    fn a_play_that_is_not_rarer_is_rejected() {
        let (mut table, mut out, now) = human_table(0);
        let seat = table.seat_of("h").unwrap();
        // Wait for a turn on a pizza that already has cards on it.
        loop {
            let driver = table.driver.as_ref().unwrap();
            if driver.prompt_for(seat) == Some(Prompt::Turn) && !driver.state().pizza.is_empty() {
                let pizza = &driver.state().pizza;
                let top = pizza.top_face.unwrap();
                let higher = driver
                    .state()
                    .hand(seat)
                    .cards
                    .iter()
                    .find(|c| c.face >= top && c.face != chefs_hat::cards::JOKER_FACE);
                if let (Some(card), 1) = (higher, pizza.top_count) {
                    let action = SubmittedAction::Play {
                        face: card.face,
                        count: 1,
                        card_uids: vec![card.uid],
                    };
                    let out = table.submit("h", action, now);
                    assert_eq!(out[0].frame.kind, MessageType::ActionRejected);
                    assert_eq!(out[0].frame.body["reason"], "NOT_RARER");
                    return;
                }
            }
            assert_eq!(
                table.status(),
                TableStatus::Playing,
                "no chance to test: {out:?}"
            );
            out = answer(&mut table, "h", now);
        }
    }

    #[test]
    fn expired_turn_moves_for_the_seat_and_flags_it() {
        let (mut table, _, now) = human_table(1000);
        let seat = table.seat_of("h").unwrap();
        let mut now = now;
        while table.driver.as_ref().unwrap().prompt_for(seat) != Some(Prompt::Turn) {
            answer(&mut table, "h", now);
            now += Duration::from_millis(10);
        }
        let before = table.log().unwrap().len();
        assert!(table
            .timeout_tick(now + Duration::from_millis(999))
            .is_empty());
        let driver = table.driver.as_ref().unwrap();
        let expected = driver.fallback_play(seat);
        let out = table.timeout_tick(now + Duration::from_millis(1000));
        let log = table.log().unwrap();
        assert!(log.len() > before);
        match (&log[before].kind, &expected) {
            (chefs_hat::EventKind::Passed { seat: s }, Action::Pass) => assert_eq!(*s, seat),
            (chefs_hat::EventKind::CardsPlayed { seat: s, cards, .. }, Action::Play(p)) => {
                assert_eq!(*s, seat);
                assert_eq!(cards.iter().map(|c| c.uid).collect::<Vec<_>>(), p.card_uids);
            }
            other => panic!("unexpected fallback {other:?}"),
        }
        let update = out
            .iter()
            .find(|o| o.frame.kind == MessageType::ViewUpdate)
            .unwrap();
        assert_eq!(update.frame.body["auto_move"], true);
        assert_eq!(update.frame.body["auto_seat"], seat.0);
        let late = table.submit(
            "h",
            SubmittedAction::Pass,
            now + Duration::from_millis(1001),
        );
        if table.driver.as_ref().unwrap().prompt_for(seat).is_none() {
            assert_eq!(late[0].frame.body["reason"], codes::NOT_YOUR_TURN);
        }
    }

    #[test]
    fn fallback_opens_with_the_first_canonical_play() {
        let (mut table, _, mut now) = human_table(1000);
        let seat = table.seat_of("h").unwrap();
        loop {
            let driver = table.driver.as_ref().unwrap();
            if driver.prompt_for(seat) == Some(Prompt::Turn) && driver.state().pizza.is_empty() {
                break;
            }
            assert_eq!(table.status(), TableStatus::Playing);
            answer(&mut table, "h", now);
            now += Duration::from_millis(10);
        }
        let legal = table.driver.as_ref().unwrap().state().legal_for(seat);
        assert!(!legal.contains(&Action::Pass));
        let before = table.log().unwrap().len();
        table.timeout_tick(now + Duration::from_secs(1));
        let first: &PlayAction = legal[0].as_play().unwrap();
        match &table.log().unwrap()[before].kind {
            chefs_hat::EventKind::CardsPlayed { cards, .. } => {
                assert_eq!(
                    cards.iter().map(|c| c.uid).collect::<Vec<_>>(),
                    first.card_uids
                )
            }
            other => panic!("expected an opening play, got {other:?}"),
        }
    }

    #[test]
    fn disabled_timer_never_fires() {
        let (mut table, _, now) = human_table(0);
        assert_eq!(table.next_wakeup(), None);
        let before = table.log().unwrap().len();
        assert!(table
            .timeout_tick(now + Duration::from_secs(3600))
            .is_empty());
        assert_eq!(table.log().unwrap().len(), before);
    }

    #[test]
    fn abandoned_seat_goes_to_a_bot_after_the_grace() {
        let (mut table, _, now) = human_table(0);
        table.disconnect("h", now);
        assert_eq!(table.next_wakeup(), Some(now + Duration::from_secs(60)));
        table.timeout_tick(now + Duration::from_secs(59));
        assert!(table.seat_of("h").is_some());
        table.timeout_tick(now + Duration::from_secs(60));
        assert!(table.seat_of("h").is_none());
        assert_eq!(table.status(), TableStatus::Finished);
    }

    #[test]
    fn four_bots_play_out_on_open() {
        let mut table = Table::new("t".into(), settings([Some("random"); 4], 0)).unwrap();
        let out = table.open("c", Instant::now());
        assert_eq!(table.status(), TableStatus::Finished);
        assert_eq!(
            kinds(&out, "c"),
            vec![MessageType::TableState, MessageType::MatchEnded]
        );
    }
}
