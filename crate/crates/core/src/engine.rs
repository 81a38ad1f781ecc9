//! Full-match state machine.
//!
//! A match is a sequence of shifts. Each shift deals the deck, optionally
//! resolves a special action and the forced card exchange, then runs pizzas
//! until three seats have emptied their hands; finishing order decides the
//! roles and points for the next shift.
//!
//! The engine is event-sourced. Each command below validates its input,
//! produces events, and applies them one at a time through
//! [`MatchState::apply`], the single reducer that also drives [`replay`].
//! The reducer checks every event against the rules, so a log that replays
//! without error is a legal match.

use serde::{Deserialize, Serialize};

use crate::cards::{
    deal_with, standard_deck, Card, CardId, Hand, Seat, SeatSet, DECK_SIZE, SEATS,
};
use crate::config::{DishwasherGives, RuleConfig};
use crate::error::EngineError;
use crate::event::{EndReason, Event, EventKind, SpecialAction, SpecialActionKind};
use crate::rng::GameRng;
use crate::roles::RoleKind;
use crate::rules::{
    is_pizza_done, legal_actions, next_to_act, validate_play, Action, PizzaState, PlayAction,
    BOARD_SLOTS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftPhase {
    SpecialActionWindow,
    Exchange,
    MakingPizzas,
    ShiftEnded,
}

/// How far the end-of-shift bookkeeping has progressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Settlement {
    Open,
    RolesAssigned,
    Scored,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeProgress {
    pub forced: u8,
    pub returned: u8,
}

/// What the match is waiting for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pending {
    SpecialAction {
        seat: Seat,
        offered: SpecialActionKind,
    },
    ExchangeReturns {
        chef: Seat,
        sous_chef: Seat,
    },
    Turn(Seat),
    /// The engine has automatic events to emit; call [`advance`].
    Continue,
    StartShift,
    MatchOver,
}

/// One forced give of the exchange, computed by the engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedGive {
    pub from: Seat,
    pub to: Seat,
    pub cards: Vec<Card>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchState {
    pub rule_config: RuleConfig,
    pub seed: u64,
    pub shift_number: u32,
    pub scores: [u32; SEATS],
    /// Roles in force for the current shift, after any Food Fight inversion.
    pub roles: Option<[RoleKind; SEATS]>,
    pub hands: [Hand; SEATS],
    pub pizza: PizzaState,
    pub discard: Vec<Card>,
    pub finishing_order: Vec<Seat>,
    pub phase: ShiftPhase,
    pub settlement: Settlement,
    /// Seat whose turn it is while a pizza is open.
    pub turn: Option<Seat>,
    pub special_action: Option<SpecialAction>,
    pub exchange: ExchangeProgress,
    pub dealt: u8,
    pub pizzas_this_shift: u32,
    pub next_opener: Option<Seat>,
    pub rng_state: GameRng,
    pub winner: Option<Seat>,
    pub end_reason: Option<EndReason>,
    pub next_seq: u64,
}

impl MatchState {
    /// State right after `MatchStarted`, before the first deal.
    fn genesis(rule_config: RuleConfig, seed: u64) -> Self {
        Self {
            rule_config,
            seed,
            shift_number: 0,
            scores: [0; SEATS],
            roles: None,
            hands: Seat::ALL.map(Hand::empty),
            pizza: PizzaState::new(Seat(0)),
            discard: Vec::new(),
            finishing_order: Vec::new(),
            phase: ShiftPhase::ShiftEnded,
            settlement: Settlement::Scored,
            turn: None,
            special_action: None,
            exchange: ExchangeProgress::default(),
            dealt: 0,
            pizzas_this_shift: 0,
            next_opener: None,
            rng_state: GameRng::from_seed(seed),
            winner: None,
            end_reason: None,
            next_seq: 1,
        }
    }

    pub fn hand(&self, seat: Seat) -> &Hand {
        &self.hands[seat.index()]
    }

    pub fn is_over(&self) -> bool {
        self.winner.is_some()
    }

    /// Seats still holding cards.
    pub fn active_seats(&self) -> SeatSet {
        Seat::ALL
            .into_iter()
            .filter(|s| !self.hand(*s).is_empty())
            .collect()
    }

    pub fn role_of(&self, seat: Seat) -> Option<RoleKind> {
        self.roles.map(|r| r[seat.index()])
    }

    pub fn seat_with_role(&self, kind: RoleKind) -> Option<Seat> {
        let roles = self.roles?;
        Seat::ALL.into_iter().find(|s| roles[s.index()] == kind)
    }

    pub fn golden_holder(&self) -> Option<Seat> {
        Seat::ALL.into_iter().find(|s| self.hand(*s).holds_golden())
    }

    pub fn joker_pair_holder(&self) -> Option<Seat> {
        Seat::ALL.into_iter().find(|s| self.hand(*s).holds_both_jokers())
    }

    /// The special action the Joker pair unlocks for `seat`'s current role.
    pub fn offered_special_action(&self, seat: Seat) -> Option<SpecialActionKind> {
        match self.role_of(seat)? {
            RoleKind::Dishwasher => Some(SpecialActionKind::FoodFight),
            _ => Some(SpecialActionKind::DinnerIsServed),
        }
    }

    pub fn pending(&self) -> Pending {
        if self.is_over() {
            return Pending::MatchOver;
        }
        if self.next_automatic().is_some() {
            return Pending::Continue;
        }
        match self.phase {
            ShiftPhase::SpecialActionWindow => {
                let seat = self.joker_pair_holder().expect("window open without a Joker pair");
                Pending::SpecialAction {
                    seat,
                    offered: self.offered_special_action(seat).expect("roles assigned"),
                }
            }
            ShiftPhase::Exchange => Pending::ExchangeReturns {
                chef: self.seat_with_role(RoleKind::Chef).expect("roles assigned"),
                sous_chef: self.seat_with_role(RoleKind::SousChef).expect("roles assigned"),
            },
            ShiftPhase::MakingPizzas => Pending::Turn(self.turn.expect("open pizza has a turn")),
            ShiftPhase::ShiftEnded => Pending::StartShift,
        }
    }

    /// The event the engine emits on its own from this state, if any: the
    /// deal, forced gives, seats running out of cards, pizzas closing and
    /// opening, and end-of-shift scoring. Everything else waits for a seat.
    pub fn next_automatic(&self) -> Option<EventKind> {
        if self.is_over() || self.shift_number == 0 {
            return None;
        }
        if let Some(seat) = self.phase_just_dealt_expects() {
            let cards = self.hand(seat).cards.clone();
            return Some(EventKind::Dealt { seat, cards });
        }
        match self.phase {
            ShiftPhase::SpecialActionWindow => None,
            ShiftPhase::Exchange if self.exchange.forced < 2 => {
                let gives = self.forced_gives()?;
                let give = gives[usize::from(self.exchange.forced)].clone();
                Some(EventKind::ExchangeForced {
                    from: give.from,
                    to: give.to,
                    cards: give.cards,
                })
            }
            ShiftPhase::Exchange => None,
            ShiftPhase::MakingPizzas => {
                let position = self.finishing_order.len() as u8;
                let unfinished = |s: &Seat| !self.finishing_order.contains(s);
                if let Some(seat) = Seat::ALL
                    .into_iter()
                    .filter(unfinished)
                    .find(|s| self.hand(*s).is_empty())
                {
                    return Some(EventKind::PlayerFinished { seat, position });
                }
                match self.finishing_order.len() {
                    3 => {
                        let seat = Seat::ALL.into_iter().find(unfinished)?;
                        Some(EventKind::PlayerFinished { seat, position })
                    }
                    4 => Some(EventKind::ShiftEnded {
                        finishing_order: self.finishing_order.clone(),
                    }),
                    _ if self.turn.is_some() => None,
                    _ if !self.pizza.is_empty() => Some(EventKind::PizzaDone {
                        last_player: self.pizza.last_player_to_play?,
                        slots_used: self.pizza.slots_used,
                    }),
                    _ => Some(EventKind::PizzaOpened {
                        opener: self.opener_for_next_pizza()?,
                    }),
                }
            }
            ShiftPhase::ShiftEnded => match self.settlement {
                Settlement::Open => Some(EventKind::RolesAssigned {
                    roles: roles_from_finishing(&self.finishing_order),
                }),
                Settlement::RolesAssigned => {
                    let roles = self.roles?;
                    let gained = roles.map(|r| self.rule_config.role_points.for_role(r));
                    let mut scores = self.scores;
                    for (s, g) in scores.iter_mut().zip(gained) {
                        *s += g;
                    }
                    Some(EventKind::ScoresUpdated { gained, scores })
                }
                Settlement::Scored => {
                    let (winner, reason) = self.match_end()?;
                    Some(EventKind::MatchEnded {
                        winner,
                        reason,
                        scores: self.scores,
                    })
                }
            },
        }
    }

    /// Legal pizza actions for the seat whose turn it is.
    pub fn legal_for(&self, seat: Seat) -> Vec<Action> {
        if self.phase != ShiftPhase::MakingPizzas || self.turn != Some(seat) {
            return Vec::new();
        }
        legal_actions(&self.pizza, self.hand(seat), seat)
    }

    /// Forced gives for the current roles, in the order they are applied:
    /// Dishwasher to Chef, then Waiter to Sous-Chef.
    pub fn forced_gives(&self) -> Option<[ForcedGive; 2]> {
        let chef = self.seat_with_role(RoleKind::Chef)?;
        let sous = self.seat_with_role(RoleKind::SousChef)?;
        let waiter = self.seat_with_role(RoleKind::Waiter)?;
        let dish = self.seat_with_role(RoleKind::Dishwasher)?;
        let dish_cards = match self.rule_config.exchange_dishwasher_gives {
            DishwasherGives::Highest => highest_faces(self.hand(dish), 2),
            DishwasherGives::Lowest => lowest_faces(self.hand(dish), 2),
        };
        Some([
            ForcedGive {
                from: dish,
                to: chef,
                cards: dish_cards,
            },
            ForcedGive {
                from: waiter,
                to: sous,
                cards: lowest_faces(self.hand(waiter), 1),
            },
        ])
    }

    /// Checks that `seat` may return `cards` in the exchange now.
    pub fn validate_exchange_return(&self, seat: Seat, cards: &[CardId]) -> Result<(), EngineError> {
        if self.is_over() {
            return Err(EngineError::MatchAlreadyOver);
        }
        if self.phase != ShiftPhase::Exchange || self.exchange.forced < 2 {
            return Err(EngineError::WrongPhase(format!("no exchange open ({:?})", self.phase)));
        }
        let expected = match self.role_of(seat) {
            Some(RoleKind::Chef) => 2,
            Some(RoleKind::SousChef) => 1,
            _ => {
                return Err(EngineError::WrongPhase(format!("{seat} owes no exchange return")));
            }
        };
        if cards.len() != expected {
            return Err(EngineError::WrongCardCount {
                expected,
                got: cards.len(),
            });
        }
        if !self.hand(seat).holds_all(cards) {
            return Err(EngineError::CardsNotHeld);
        }
        Ok(())
    }

    /// Winner and reason if the match ends at this shift boundary. Ties on
    /// score go to the better role earned this shift.
    fn match_end(&self) -> Option<(Seat, EndReason)> {
        let reason = if self.scores.iter().any(|s| *s >= self.rule_config.target_score) {
            EndReason::Target
        } else if self.shift_number >= self.rule_config.max_shifts {
            EndReason::Cutoff
        } else {
            return None;
        };
        let rank = |seat: Seat| self.role_of(seat).map_or(SEATS, RoleKind::rank);
        let winner = Seat::ALL
            .into_iter()
            .max_by(|a, b| {
                self.scores[a.index()]
                    .cmp(&self.scores[b.index()])
                    .then(rank(*b).cmp(&rank(*a)))
            })
            .expect("four seats");
        Some((winner, reason))
    }

    fn opener_for_next_pizza(&self) -> Option<Seat> {
        if self.pizzas_this_shift == 0 {
            self.golden_holder()
        } else {
            self.next_opener
        }
    }

    /// Every card of the deck is in exactly one place, the board holds at most
    /// eleven cards, and the bookkeeping fields agree with each other.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = [false; DECK_SIZE];
        let places = self
            .hands
            .iter()
            .flat_map(|h| h.cards.iter())
            .chain(self.pizza.cards.iter())
            .chain(self.discard.iter());
        let mut total = 0;
        for card in places {
            let idx = usize::from(card.uid.0);
            if idx >= DECK_SIZE || seen[idx] {
                return Err(format!("card {} duplicated or out of range", card.uid));
            }
            if crate::cards::card_by_uid(card.uid) != Some(*card) {
                return Err(format!("card {} has altered attributes", card.uid));
            }
            seen[idx] = true;
            total += 1;
        }
        if self.shift_number > 0 && total != DECK_SIZE {
            return Err(format!("{total} cards accounted for, expected {DECK_SIZE}"));
        }
        if self.pizza.slots_used > BOARD_SLOTS {
            return Err(format!("{} slots used", self.pizza.slots_used));
        }
        if usize::from(self.pizza.slots_used) != self.pizza.cards.len() {
            return Err("slot count disagrees with board cards".into());
        }
        if self.pizza.top_face.is_some() != (self.pizza.slots_used > 0) {
            return Err("top face present iff board non-empty".into());
        }
        let finished: SeatSet = self.finishing_order.iter().copied().collect();
        if finished.len() != self.finishing_order.len() || self.finishing_order.len() > SEATS {
            return Err("finishing order has duplicates".into());
        }
        if let Some(roles) = self.roles {
            for kind in RoleKind::ORDER {
                if roles.iter().filter(|r| **r == kind).count() != 1 {
                    return Err(format!("role {kind:?} not held exactly once"));
                }
            }
        }
        for (i, hand) in self.hands.iter().enumerate() {
            if hand.owner.index() != i {
                return Err(format!("hand {i} owned by {}", hand.owner));
            }
        }
        Ok(())
    }

    // ---------------------------------------------------------------------
    // Reducer
    // ---------------------------------------------------------------------

    /// Applies one event, rejecting anything the rules do not allow at this
    /// point. On error the state is unchanged.
    pub fn apply(&mut self, event: &Event) -> Result<(), EngineError> {
        let corrupt = |reason: String| EngineError::CorruptLog {
            seq: event.seq,
            reason,
        };
        if event.seq != self.next_seq {
            return Err(corrupt(format!("expected seq {}", self.next_seq)));
        }
        let expected_shift = match event.kind {
            EventKind::ShiftStarted { .. } => self.shift_number + 1,
            _ => self.shift_number,
        };
        if event.shift != expected_shift {
            return Err(corrupt(format!("event tagged shift {}, expected {expected_shift}", event.shift)));
        }
        if event.redaction_class != event.kind.redaction() {
            return Err(corrupt("wrong redaction class".into()));
        }
        if self.is_over() {
            return Err(corrupt("event after MatchEnded".into()));
        }
        let mut next = self.clone();
        next.reduce(&event.kind).map_err(corrupt)?;
        next.next_seq += 1;
        *self = next;
        Ok(())
    }

    /// Like [`apply`](Self::apply) but mutates in place, trusting that the
    /// caller discards the state if it fails. Used on the live path, where
    /// the first event of a command has already been validated.
    fn apply_in_place(&mut self, event: &Event) -> Result<(), String> {
        if event.seq != self.next_seq || self.is_over() {
            return Err("out-of-order event".into());
        }
        self.reduce(&event.kind)?;
        self.next_seq += 1;
        Ok(())
    }

    fn reduce(&mut self, kind: &EventKind) -> Result<(), String> {
        match kind {
            EventKind::MatchStarted { .. } => Err("MatchStarted may only open the log".into()),
            EventKind::ShiftStarted { shift } => self.on_shift_started(*shift),
            EventKind::Dealt { seat, cards } => {
                if self.phase_just_dealt_expects() != Some(*seat) {
                    return Err(format!("unexpected Dealt for {seat}"));
                }
                if self.hand(*seat).cards != *cards {
                    return Err(format!("Dealt cards for {seat} disagree with the shuffle"));
                }
                self.dealt += 1;
                Ok(())
            }
            EventKind::SpecialActionDeclared { seat, action } => {
                self.on_special_action(*seat, *action)
            }
            EventKind::ExchangeForced { from, to, cards } => self.on_forced(*from, *to, cards),
            EventKind::ExchangeReturned { from, to, cards } => self.on_returned(*from, *to, cards),
            EventKind::PizzaOpened { opener } => {
                self.require_dealt()?;
                if self.phase != ShiftPhase::MakingPizzas || self.turn.is_some() {
                    return Err("no pizza can be opened now".into());
                }
                if self.opener_for_next_pizza() != Some(*opener) {
                    return Err(format!("{opener} may not open this pizza"));
                }
                self.pizza = PizzaState::new(*opener);
                self.turn = Some(*opener);
                Ok(())
            }
            EventKind::CardsPlayed { seat, face, cards } => self.on_played(*seat, *face, cards),
            EventKind::Passed { seat } => self.on_passed(*seat),
            EventKind::PizzaDone {
                last_player,
                slots_used,
            } => self.on_pizza_done(*last_player, *slots_used),
            EventKind::PlayerFinished { seat, position } => self.on_finished(*seat, *position),
            EventKind::ShiftEnded { finishing_order } => {
                if self.phase != ShiftPhase::MakingPizzas
                    || self.finishing_order.len() != SEATS
                    || *finishing_order != self.finishing_order
                {
                    return Err("shift cannot end here".into());
                }
                self.discard.append(&mut self.pizza.cards);
                self.pizza = PizzaState::new(Seat(0));
                self.turn = None;
                self.phase = ShiftPhase::ShiftEnded;
                self.settlement = Settlement::Open;
                Ok(())
            }
            EventKind::RolesAssigned { roles } => {
                if self.phase != ShiftPhase::ShiftEnded || self.settlement != Settlement::Open {
                    return Err("roles are not being assigned now".into());
                }
                if *roles != roles_from_finishing(&self.finishing_order) {
                    return Err("roles disagree with finishing order".into());
                }
                self.roles = Some(*roles);
                self.settlement = Settlement::RolesAssigned;
                Ok(())
            }
            EventKind::ScoresUpdated { gained, scores } => {
                if self.settlement != Settlement::RolesAssigned {
                    return Err("scores are not being updated now".into());
                }
                let roles = self.roles.ok_or("no roles")?;
                let expect_gain = roles.map(|r| self.rule_config.role_points.for_role(r));
                let mut expect_scores = self.scores;
                for (s, g) in expect_scores.iter_mut().zip(expect_gain) {
                    *s += g;
                }
                if *gained != expect_gain || *scores != expect_scores {
                    return Err("score update disagrees with roles".into());
                }
                self.scores = expect_scores;
                self.settlement = Settlement::Scored;
                Ok(())
            }
            EventKind::MatchEnded {
                winner,
                reason,
                scores,
            } => {
                if self.settlement != Settlement::Scored || self.phase != ShiftPhase::ShiftEnded {
                    return Err("match can only end at a shift boundary".into());
                }
                if self.match_end() != Some((*winner, *reason)) || *scores != self.scores {
                    return Err("MatchEnded disagrees with scores".into());
                }
                self.winner = Some(*winner);
                self.end_reason = Some(*reason);
                Ok(())
            }
            EventKind::AgentFault { .. } => Ok(()),
        }
    }

    fn phase_just_dealt_expects(&self) -> Option<Seat> {
        (self.shift_number > 0 && usize::from(self.dealt) < SEATS).then_some(Seat(self.dealt))
    }

    fn require_dealt(&self) -> Result<(), String> {
        if usize::from(self.dealt) == SEATS {
            Ok(())
        } else {
            Err("hands not yet announced".into())
        }
    }

    fn on_shift_started(&mut self, shift: u32) -> Result<(), String> {
        if self.phase != ShiftPhase::ShiftEnded || self.settlement != Settlement::Scored {
            return Err("previous shift not settled".into());
        }
        if shift != self.shift_number + 1 {
            return Err(format!("shift {shift} does not follow {}", self.shift_number));
        }
        if self.shift_number > 0 && self.match_end().is_some() {
            return Err("match should have ended".into());
        }
        let hands = deal_with(&standard_deck(), &mut self.rng_state, SEATS).map_err(|e| e.to_string())?;
        self.shift_number = shift;
        self.hands = hands;
        self.pizza = PizzaState::new(Seat(0));
        self.discard.clear();
        self.finishing_order.clear();
        self.turn = None;
        self.special_action = None;
        self.exchange = ExchangeProgress::default();
        self.dealt = 0;
        self.pizzas_this_shift = 0;
        self.next_opener = None;
        self.settlement = Settlement::Open;
        self.phase = if self.roles.is_none() {
            ShiftPhase::MakingPizzas
        } else if self.joker_pair_holder().is_some() {
            ShiftPhase::SpecialActionWindow
        } else {
            ShiftPhase::Exchange
        };
        Ok(())
    }

    fn on_special_action(
        &mut self,
        seat: Seat,
        action: Option<SpecialActionKind>,
    ) -> Result<(), String> {
        self.require_dealt()?;
        if self.phase != ShiftPhase::SpecialActionWindow {
            return Err("no special action window".into());
        }
        if self.joker_pair_holder() != Some(seat) {
            return Err(format!("{seat} does not hold both Jokers"));
        }
        if let Some(kind) = action {
            if self.offered_special_action(seat) != Some(kind) {
                return Err(format!("{kind:?} not available to {seat}"));
            }
            self.special_action = Some(SpecialAction {
                kind,
                declarer: seat,
            });
        }
        self.phase = match action {
            Some(SpecialActionKind::FoodFight) => {
                self.roles = self.roles.map(|r| r.map(RoleKind::inverted));
                ShiftPhase::Exchange
            }
            Some(SpecialActionKind::DinnerIsServed) => ShiftPhase::MakingPizzas,
            None => ShiftPhase::Exchange,
        };
        Ok(())
    }

    fn on_forced(&mut self, from: Seat, to: Seat, cards: &[Card]) -> Result<(), String> {
        self.require_dealt()?;
        if self.phase != ShiftPhase::Exchange || self.exchange.forced >= 2 {
            return Err("no forced give expected".into());
        }
        let gives = self.forced_gives().ok_or("no roles for exchange")?;
        let give = &gives[usize::from(self.exchange.forced)];
        if give.from != from || give.to != to || give.cards != cards {
            return Err("forced give disagrees with the exchange rule".into());
        }
        self.transfer(from, to, cards)?;
        self.exchange.forced += 1;
        Ok(())
    }

    fn on_returned(&mut self, from: Seat, to: Seat, cards: &[Card]) -> Result<(), String> {
        if self.phase != ShiftPhase::Exchange || self.exchange.forced < 2 {
            return Err("no return expected".into());
        }
        let (giver, receiver, count) = match self.exchange.returned {
            0 => (RoleKind::Chef, RoleKind::Dishwasher, 2),
            1 => (RoleKind::SousChef, RoleKind::Waiter, 1),
            _ => return Err("exchange already complete".into()),
        };
        if self.seat_with_role(giver) != Some(from)
            || self.seat_with_role(receiver) != Some(to)
            || cards.len() != count
        {
            return Err("return does not match the exchange roles".into());
        }
        self.transfer(from, to, cards)?;
        self.exchange.returned += 1;
        if self.exchange.returned == 2 {
            self.phase = ShiftPhase::MakingPizzas;
        }
        Ok(())
    }

    fn transfer(&mut self, from: Seat, to: Seat, cards: &[Card]) -> Result<(), String> {
        let hand = self.hand(from);
        if cards.iter().any(|c| hand.get(c.uid) != Some(c)) {
            return Err(format!("{from} does not hold the transferred cards"));
        }
        let uids: Vec<CardId> = cards.iter().map(|c| c.uid).collect();
        let moved = self.hands[from.index()].take(&uids).map_err(|e| e.to_string())?;
        for card in moved {
            self.hands[to.index()].insert(card);
        }
        Ok(())
    }

    fn on_played(&mut self, seat: Seat, face: u8, cards: &[Card]) -> Result<(), String> {
        let turn = self.turn.ok_or("no pizza open")?;
        if self.phase != ShiftPhase::MakingPizzas {
            return Err("not making pizzas".into());
        }
        let hand = self.hand(seat);
        if cards.iter().any(|c| hand.get(c.uid) != Some(c)) {
            return Err(format!("{seat} does not hold the played cards"));
        }
        let action = PlayAction {
            face,
            count: u8::try_from(cards.len()).map_err(|_| "too many cards")?,
            card_uids: cards.iter().map(|c| c.uid).collect(),
        };
        let verdict = validate_play(&self.pizza, hand, &Action::Play(action.clone()), seat, turn);
        if !verdict.legal {
            return Err(format!("illegal play: {}", verdict.reason));
        }
        let spent = self.hands[seat.index()]
            .take(&action.card_uids)
            .map_err(|e| e.to_string())?;
        let pizza = &mut self.pizza;
        pizza.slots_used += action.count;
        pizza.top_face = Some(face);
        pizza.top_count = action.count;
        pizza.last_player_to_play = Some(seat);
        pizza.cards.extend(spent);
        self.advance_turn(seat);
        Ok(())
    }

    fn on_passed(&mut self, seat: Seat) -> Result<(), String> {
        let turn = self.turn.ok_or("no pizza open")?;
        let verdict = validate_play(&self.pizza, self.hand(seat), &Action::Pass, seat, turn);
        if !verdict.legal {
            return Err(format!("illegal pass: {}", verdict.reason));
        }
        self.pizza.passed.insert(seat);
        self.advance_turn(seat);
        Ok(())
    }

    fn advance_turn(&mut self, actor: Seat) {
        let active = self.active_seats();
        self.turn = if is_pizza_done(&self.pizza, active) {
            None
        } else {
            next_to_act(&self.pizza, active, actor)
        };
    }

    fn on_pizza_done(&mut self, last_player: Seat, slots_used: u8) -> Result<(), String> {
        if self.phase != ShiftPhase::MakingPizzas || self.turn.is_some() || self.pizza.is_empty() {
            return Err("pizza is not done".into());
        }
        if !is_pizza_done(&self.pizza, self.active_seats()) {
            return Err("pizza is not done".into());
        }
        if self.pizza.last_player_to_play != Some(last_player) || self.pizza.slots_used != slots_used {
            return Err("PizzaDone payload disagrees with the board".into());
        }
        self.discard.append(&mut self.pizza.cards);
        self.pizzas_this_shift += 1;
        self.next_opener = if self.hand(last_player).is_empty() {
            (1..4)
                .map(|step| last_player.clockwise(step))
                .find(|s| !self.hand(*s).is_empty())
        } else {
            Some(last_player)
        };
        self.pizza = PizzaState::new(self.next_opener.unwrap_or(Seat(0)));
        Ok(())
    }

    fn on_finished(&mut self, seat: Seat, position: u8) -> Result<(), String> {
        if self.phase != ShiftPhase::MakingPizzas {
            return Err("not making pizzas".into());
        }
        if usize::from(position) != self.finishing_order.len() || self.finishing_order.contains(&seat) {
            return Err(format!("{seat} cannot finish in position {position}"));
        }
        let last_one = self.finishing_order.len() == SEATS - 1;
        if !last_one && !self.hand(seat).is_empty() {
            return Err(format!("{seat} still holds cards"));
        }
        self.finishing_order.push(seat);
        if self.finishing_order.len() == SEATS - 1 {
            self.turn = None;
        }
        Ok(())
    }
}

/// Roles earned by finishing order: Chef, Sous-Chef, Waiter, Dishwasher.
pub fn roles_from_finishing(order: &[Seat]) -> [RoleKind; SEATS] {
    let mut roles = [RoleKind::Dishwasher; SEATS];
    for (position, seat) in order.iter().enumerate() {
        roles[seat.index()] = RoleKind::for_finish_position(position);
    }
    roles
}

/// `count` cards with the highest faces; Jokers rank as face 0, ties go to the
/// lower uid.
pub fn highest_faces(hand: &Hand, count: usize) -> Vec<Card> {
    let mut cards = hand.cards.clone();
    cards.sort_by(|a, b| b.face.cmp(&a.face).then(a.uid.cmp(&b.uid)));
    cards.truncate(count);
    cards
}

/// `count` cards with the lowest faces (Jokers first), ties to the lower uid.
pub fn lowest_faces(hand: &Hand, count: usize) -> Vec<Card> {
    let mut cards = hand.cards.clone();
    cards.sort_by(|a, b| a.face.cmp(&b.face).then(a.uid.cmp(&b.uid)));
    cards.truncate(count);
    cards
}

// -------------------------------------------------------------------------
// Commands
// -------------------------------------------------------------------------

/// Appends events to a working state, applying each as it is created.
struct Transition {
    state: MatchState,
    events: Vec<Event>,
}

impl Transition {
    fn new(state: MatchState) -> Self {
        Self {
            state,
            events: Vec::new(),
        }
    }

    fn emit(&mut self, kind: EventKind) -> Result<(), EngineError> {
        let shift = match kind {
            EventKind::ShiftStarted { shift } => shift,
            _ => self.state.shift_number,
        };
        let event = Event {
            seq: self.state.next_seq,
            shift,
            redaction_class: kind.redaction(),
            kind,
        };
        self.state
            .apply_in_place(&event)
            .map_err(|reason| EngineError::Internal(format!("{}: {reason}", event.kind.name())))?;
        self.events.push(event);
        Ok(())
    }

    /// Emits automatic events until the match waits on a seat again.
    fn drain(&mut self) -> Result<(), EngineError> {
        while let Some(kind) = self.state.next_automatic() {
            self.emit(kind)?;
        }
        Ok(())
    }

    fn finish(self) -> (MatchState, Vec<Event>) {
        (self.state, self.events)
    }
}

fn genesis_event(rule_config: &RuleConfig, seed: u64) -> Event {
    let kind = EventKind::MatchStarted {
        rule_config: rule_config.clone(),
        seed,
    };
    Event {
        seq: 0,
        shift: 0,
        redaction_class: kind.redaction(),
        kind,
    }
}

/// Starts a match: deals shift 1 and opens the first pizza for the holder of
/// the golden 11. Shift 1 has no roles, so no special actions or exchange.
pub fn new_match(rule_config: RuleConfig, seed: u64) -> Result<(MatchState, Vec<Event>), EngineError> {
    rule_config.validate()?;
    let genesis = genesis_event(&rule_config, seed);
    let mut tx = Transition::new(MatchState::genesis(rule_config, seed));
    tx.events.push(genesis);
    tx.emit(EventKind::ShiftStarted { shift: 1 })?;
    tx.drain()?;
    Ok(tx.finish())
}

/// Deals the next shift after the previous one was settled. Opens the special
/// action window if a seat holds both Jokers, otherwise applies the forced
/// gives of the exchange and waits for the free returns.
pub fn start_shift(state: &MatchState) -> Result<(MatchState, Vec<Event>), EngineError> {
    if state.is_over() {
        return Err(EngineError::MatchAlreadyOver);
    }
    if state.pending() != Pending::StartShift {
        return Err(EngineError::WrongPhase(format!(
            "cannot start a shift during {:?}",
            state.phase
        )));
    }
    let mut tx = Transition::new(state.clone());
    tx.emit(EventKind::ShiftStarted {
        shift: state.shift_number + 1,
    })?;
    tx.drain()?;
    Ok(tx.finish())
}

/// Closes the special action window. `None` means the Joker holder declined.
pub fn resolve_special_action(
    state: &MatchState,
    declaration: Option<SpecialAction>,
) -> Result<(MatchState, Vec<Event>), EngineError> {
    if state.is_over() {
        return Err(EngineError::MatchAlreadyOver);
    }
    let Pending::SpecialAction { seat: holder, offered } = state.pending() else {
        return Err(EngineError::WrongPhase(format!(
            "no special action window during {:?}",
            state.phase
        )));
    };
    if let Some(decl) = declaration {
        if decl.declarer != holder {
            return Err(EngineError::InvalidDeclaration(format!(
                "{} does not hold both Jokers",
                decl.declarer
            )));
        }
        if decl.kind != offered {
            return Err(EngineError::InvalidDeclaration(format!(
                "{:?} is not available to the {:?}",
                decl.kind,
                state.role_of(holder)
            )));
        }
    }
    let mut tx = Transition::new(state.clone());
    tx.emit(EventKind::SpecialActionDeclared {
        seat: holder,
        action: declaration.map(|d| d.kind),
    })?;
    tx.drain()?;
    Ok(tx.finish())
}

/// Applies the free returns of the exchange: the Chef gives back two cards of
/// its choosing, the Sous-Chef one. The forced gives were already applied when
/// the exchange opened, so returns may include cards just received.
pub fn perform_exchange(
    state: &MatchState,
    chef_return: &[CardId],
    souschef_return: &[CardId],
) -> Result<(MatchState, Vec<Event>), EngineError> {
    let Pending::ExchangeReturns { chef, sous_chef } = state.pending() else {
        if state.is_over() {
            return Err(EngineError::MatchAlreadyOver);
        }
        return Err(EngineError::WrongPhase(format!("no exchange open ({:?})", state.phase)));
    };
    state.validate_exchange_return(chef, chef_return)?;
    state.validate_exchange_return(sous_chef, souschef_return)?;
    let dish = state.seat_with_role(RoleKind::Dishwasher).expect("roles are a bijection");
    let waiter = state.seat_with_role(RoleKind::Waiter).expect("roles are a bijection");
    let pick = |seat: Seat, uids: &[CardId]| -> Vec<Card> {
        uids.iter()
            .map(|u| *state.hand(seat).get(*u).expect("validated"))
            .collect()
    };
    let mut tx = Transition::new(state.clone());
    tx.emit(EventKind::ExchangeReturned {
        from: chef,
        to: dish,
        cards: pick(chef, chef_return),
    })?;
    tx.emit(EventKind::ExchangeReturned {
        from: sous_chef,
        to: waiter,
        cards: pick(sous_chef, souschef_return),
    })?;
    tx.drain()?;
    Ok(tx.finish())
}

/// Plays or passes for `seat`. Handles everything that follows automatically:
/// seats running out of cards, the pizza completing and the next one opening,
/// and, when the third seat finishes, the end of the shift with its scoring.
pub fn step(state: &MatchState, seat: Seat, action: &Action) -> Result<(MatchState, Vec<Event>), EngineError> {
    if state.is_over() {
        return Err(EngineError::MatchAlreadyOver);
    }
    let Pending::Turn(turn) = state.pending() else {
        return Err(EngineError::WrongPhase(format!("cannot play during {:?}", state.phase)));
    };
    validate_play(&state.pizza, state.hand(seat), action, seat, turn).into_result()?;
    let kind = match action {
        Action::Pass => EventKind::Passed { seat },
        Action::Play(play) => EventKind::CardsPlayed {
            seat,
            face: play.face,
            cards: play
                .card_uids
                .iter()
                .map(|u| *state.hand(seat).get(*u).expect("validated"))
                .collect(),
        },
    };
    let mut tx = Transition::new(state.clone());
    tx.emit(kind)?;
    tx.drain()?;
    Ok(tx.finish())
}

/// Emits whatever the engine does on its own from `state`. Commands already
/// do this, so it only matters for states rebuilt from a log that was cut
/// between two automatic events.
pub fn advance(state: &MatchState) -> Result<(MatchState, Vec<Event>), EngineError> {
    let mut tx = Transition::new(state.clone());
    tx.drain()?;
    Ok(tx.finish())
}

/// Settles a finished shift: assigns roles by finishing order, awards points
/// and ends the match if a seat reached the target (or the shift cap was hit).
/// [`step`] already does this when the last card is played; this entry point
/// serves states rebuilt from a log cut right after `ShiftEnded`.
pub fn end_shift(state: &MatchState) -> Result<(MatchState, Vec<Event>), EngineError> {
    if state.is_over() {
        return Err(EngineError::MatchAlreadyOver);
    }
    if state.phase != ShiftPhase::ShiftEnded || state.settlement == Settlement::Scored {
        return Err(EngineError::WrongPhase("shift is not awaiting settlement".into()));
    }
    advance(state)
}

/// Records that `seat`'s agent answered with something illegal and a
/// fallback was substituted. Changes nothing but the seq.
pub fn record_fault(state: &MatchState, seat: Seat, detail: String) -> Result<(MatchState, Vec<Event>), EngineError> {
    if state.is_over() {
        return Err(EngineError::MatchAlreadyOver);
    }
    let mut tx = Transition::new(state.clone());
    tx.emit(EventKind::AgentFault { seat, detail })?;
    Ok(tx.finish())
}

/// Rebuilds the match state from its log. The log must start with
/// `MatchStarted` at seq 0 and be dense; every event is re-validated.
pub fn replay(events: &[Event]) -> Result<MatchState, EngineError> {
    let first = events.first().ok_or(EngineError::CorruptLog {
        seq: 0,
        reason: "empty log".into(),
    })?;
    let EventKind::MatchStarted { rule_config, seed } = &first.kind else {
        return Err(EngineError::CorruptLog {
            seq: first.seq,
            reason: "log does not start with MatchStarted".into(),
        });
    };
    if first.seq != 0 || first.shift != 0 || *first != genesis_event(rule_config, *seed) {
        return Err(EngineError::CorruptLog {
            seq: first.seq,
            reason: "malformed MatchStarted".into(),
        });
    }
    rule_config.validate().map_err(|e| EngineError::CorruptLog {
        seq: 0,
        reason: e.to_string(),
    })?;
    let mut state = MatchState::genesis(rule_config.clone(), *seed);
    for event in &events[1..] {
        state.apply(event)?;
    }
    Ok(state)
}
