//! Runs a match on behalf of its seats.
//!
//! [`MatchDriver`] owns the state and the log, answers "who must act now",
//! builds views, and turns policy answers into engine commands. An illegal
//! answer is logged as an `AgentFault` event and replaced by a fallback, so a
//! buggy policy cannot stall a match. The simulator and the server both run
//! matches through this type, which is what makes their logs identical.

use std::ops::Range;

use crate::agents::AgentPolicy;
use crate::cards::{Card, CardId, Seat, SEATS};
use crate::config::RuleConfig;
use crate::engine::{self, MatchState, Pending};
use crate::error::EngineError;
use crate::event::{Event, EventKind, SpecialAction};
use crate::rules::Action;
use crate::view::{PlayerView, PublicHistory};

/// A question the match is waiting on one seat to answer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prompt {
    Turn,
    SpecialAction(crate::event::SpecialActionKind),
    /// Return `count` cards; `received` came from the forced give.
    ExchangeReturn { count: usize, received: Vec<Card> },
}

#[derive(Clone, Debug)]
pub struct MatchDriver {
    state: MatchState,
    log: Vec<Event>,
    history: PublicHistory,
    /// Exchange returns chosen so far, by Chef and Sous-Chef.
    returns: [Option<Vec<CardId>>; 2],
    faults: usize,
}

impl MatchDriver {
    pub fn new(rule_config: RuleConfig, seed: u64) -> Result<Self, EngineError> {
        let (state, log) = engine::new_match(rule_config, seed)?;
        let mut history = PublicHistory::new();
        history.extend(&log);
        Ok(Self {
            state,
            log,
            history,
            returns: [None, None],
            faults: 0,
        })
    }

    pub fn state(&self) -> &MatchState {
        &self.state
    }

    pub fn log(&self) -> &[Event] {
        &self.log
    }

    pub fn into_log(self) -> Vec<Event> {
        self.log
    }

    /// Number of `AgentFault` events recorded.
    pub fn faults(&self) -> usize {
        self.faults
    }

    pub fn is_over(&self) -> bool {
        self.state.is_over()
    }

    pub fn view(&self, seat: Seat) -> PlayerView<'_> {
        PlayerView::new(&self.state, seat, self.history.events())
    }

    /// What `seat` is being asked, if anything.
    pub fn prompt_for(&self, seat: Seat) -> Option<Prompt> {
        match self.state.pending() {
            Pending::Turn(s) if s == seat => Some(Prompt::Turn),
            Pending::SpecialAction { seat: s, offered } if s == seat => {
                Some(Prompt::SpecialAction(offered))
            }
            Pending::ExchangeReturns { chef, sous_chef } => {
                let slot = [chef, sous_chef].iter().position(|s| *s == seat)?;
                if self.returns[slot].is_some() {
                    return None;
                }
                Some(Prompt::ExchangeReturn {
                    count: 2 - slot,
                    received: self.received_in_exchange(seat),
                })
            }
            _ => None,
        }
    }

    /// Seats with an open prompt, in seat order.
    pub fn awaiting(&self) -> Vec<Seat> {
        Seat::ALL
            .into_iter()
            .filter(|s| self.prompt_for(*s).is_some())
            .collect()
    }

    fn received_in_exchange(&self, seat: Seat) -> Vec<Card> {
        self.log
            .iter()
            .rev()
            .take_while(|e| !matches!(e.kind, EventKind::ShiftStarted { .. }))
            .filter_map(|e| match &e.kind {
                EventKind::ExchangeForced { to, cards, .. } if *to == seat => Some(cards.clone()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    fn absorb(&mut self, (state, events): (MatchState, Vec<Event>)) -> Range<usize> {
        let start = self.log.len();
        self.history.extend(&events);
        self.log.extend(events);
        self.state = state;
        start..self.log.len()
    }

    /// Emits automatic events and starts the next shift when one is due.
    /// Returns the range of new log entries.
    pub fn advance(&mut self) -> Result<Range<usize>, EngineError> {
        let start = self.log.len();
        loop {
            let next = match self.state.pending() {
                Pending::Continue => engine::advance(&self.state)?,
                Pending::StartShift => {
                    self.returns = [None, None];
                    engine::start_shift(&self.state)?
                }
                _ => break,
            };
            self.absorb(next);
        }
        Ok(start..self.log.len())
    }

    pub fn play(&mut self, seat: Seat, action: &Action) -> Result<Range<usize>, EngineError> {
        let next = engine::step(&self.state, seat, action)?;
        let range = self.absorb(next);
        Ok(range.start..self.advance()?.end)
    }

    pub fn special_action(&mut self, seat: Seat, declare: bool) -> Result<Range<usize>, EngineError> {
        let Some(Prompt::SpecialAction(kind)) = self.prompt_for(seat) else {
            return Err(EngineError::WrongPhase(format!("{seat} has no special action to declare")));
        };
        let declaration = declare.then_some(SpecialAction {
            kind,
            declarer: seat,
        });
        let next = engine::resolve_special_action(&self.state, declaration)?;
        let range = self.absorb(next);
        Ok(range.start..self.advance()?.end)
    }

    /// Records one side of the exchange. The engine runs the exchange once
    /// both the Chef and the Sous-Chef have answered; until then the returned
    /// range is empty.
    pub fn exchange_return(&mut self, seat: Seat, cards: &[CardId]) -> Result<Range<usize>, EngineError> {
        let Pending::ExchangeReturns { chef, sous_chef } = self.state.pending() else {
            return Err(EngineError::WrongPhase(format!("{seat} owes no exchange return")));
        };
        let slot = if seat == chef {
            0
        } else if seat == sous_chef {
            1
        } else {
            return Err(EngineError::WrongPhase(format!("{seat} owes no exchange return")));
        };
        if self.returns[slot].is_some() {
            return Err(EngineError::WrongPhase(format!("{seat} already answered the exchange")));
        }
        self.state.validate_exchange_return(seat, cards)?;
        let mut distinct = cards.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != cards.len() {
            return Err(EngineError::CardsNotHeld);
        }
        self.returns[slot] = Some(cards.to_vec());
        let [Some(chef_back), Some(sous_back)] = &self.returns else {
            return Ok(self.log.len()..self.log.len());
        };
        let next = engine::perform_exchange(&self.state, chef_back, sous_back)?;
        self.returns = [None, None];
        let range = self.absorb(next);
        Ok(range.start..self.advance()?.end)
    }

    /// Logs an `AgentFault` for `seat`.
    pub fn record_fault(&mut self, seat: Seat, detail: String) -> Result<(), EngineError> {
        let next = engine::record_fault(&self.state, seat, detail)?;
        self.absorb(next);
        self.faults += 1;
        Ok(())
    }

    /// The move made for a seat that did not answer properly: pass when
    /// allowed, otherwise the first play in canonical order.
    pub fn fallback_play(&self, seat: Seat) -> Action {
        let legal = self.state.legal_for(seat);
        if legal.contains(&Action::Pass) {
            Action::Pass
        } else {
            legal.into_iter().next().unwrap_or(Action::Pass)
        }
    }

    /// The `count` highest-face cards of `seat`.
    pub fn fallback_return(&self, seat: Seat, count: usize) -> Vec<CardId> {
        engine::highest_faces(self.state.hand(seat), count)
            .iter()
            .map(|c| c.uid)
            .collect()
    }

    /// Answers whatever `seat` is being asked using `fallback_*`, with no
    /// fault logged. Used for turn timeouts.
    pub fn auto_move(&mut self, seat: Seat) -> Result<Range<usize>, EngineError> {
        match self.prompt_for(seat) {
            Some(Prompt::Turn) => {
                let action = self.fallback_play(seat);
                self.play(seat, &action)
            }
            Some(Prompt::SpecialAction(_)) => self.special_action(seat, false),
            Some(Prompt::ExchangeReturn { count, .. }) => {
                let cards = self.fallback_return(seat, count);
                self.exchange_return(seat, &cards)
            }
            None => Ok(self.log.len()..self.log.len()),
        }
    }

    /// Lets `agent` answer `seat`'s prompt. An illegal answer is logged as a
    /// fault and replaced by the fallback.
    pub fn act_with(&mut self, seat: Seat, agent: &mut dyn AgentPolicy) -> Result<Range<usize>, EngineError> {
        let start = self.log.len();
        let Some(prompt) = self.prompt_for(seat) else {
            return Ok(start..start);
        };
        let outcome = match &prompt {
            Prompt::Turn => {
                let action = agent.decide_play(&self.view(seat));
                self.play(seat, &action).map_err(|e| format!("{}: {action}", e.code()))
            }
            Prompt::SpecialAction(kind) => {
                let declare = agent.decide_special_action(&self.view(seat), *kind);
                self.special_action(seat, declare).map_err(|e| e.code().to_string())
            }
            Prompt::ExchangeReturn { count, received } => {
                let cards = agent.decide_exchange_return(&self.view(seat), received, *count);
                self.exchange_return(seat, &cards).map_err(|e| e.code().to_string())
            }
        };
        if let Err(detail) = outcome {
            self.record_fault(seat, format!("{}: {detail}", agent.name()))?;
            self.auto_move(seat)?;
        }
        Ok(start..self.log.len())
    }

    /// Plays the match to the end with one policy per seat.
    pub fn run_to_end(
        &mut self,
        agents: &mut [Box<dyn AgentPolicy>; SEATS],
        mut observe: impl FnMut(&MatchState, &[Event]),
    ) -> Result<(), EngineError> {
        self.advance()?;
        observe(&self.state, &self.log);
        while !self.is_over() {
            let waiting = self.awaiting();
            if waiting.is_empty() {
                return Err(EngineError::Internal(format!(
                    "match stalled at {:?}",
                    self.state.pending()
                )));
            }
            for seat in waiting {
                let range = self.act_with(seat, agents[seat.index()].as_mut())?;
                if !range.is_empty() {
                    observe(&self.state, &self.log[..range.end]);
                }
            }
        }
        Ok(())
    }
}
