//! Legality and transitions for a single pizza.
//!
//! Everything here is a pure function over plain values. A pizza is the
//! trick-like unit of play: seats take turns laying down sets of identical
//! faces, each play strictly rarer (a lower face) than the one before and with
//! at least as many copies, until the eleven slots of the board are full or
//! everyone but the last player has passed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cards::{Card, CardId, Hand, Seat, SeatSet, JOKER_FACE, MAX_FACE};
use crate::error::EngineError;

/// Marked places on the pizza board.
pub const BOARD_SLOTS: u8 = 11;

/// Lay down `count` cards of one face. Jokers are played as face 0 and only
/// together with other Jokers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayAction {
    pub face: u8,
    pub count: u8,
    pub card_uids: Vec<CardId>,
}

impl PlayAction {
    /// The play of `count` cards of `face` spending the lowest uids held, or
    /// `None` when the hand holds fewer than `count` such cards.
    pub fn canonical(hand: &Hand, face: u8, count: u8) -> Option<PlayAction> {
        let card_uids: Vec<CardId> = hand
            .cards_of_face(face)
            .take(usize::from(count))
            .map(|c| c.uid)
            .collect();
        (count > 0 && card_uids.len() == usize::from(count)).then_some(PlayAction {
            face,
            count,
            card_uids,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Action {
    Play(PlayAction),
    Pass,
}

impl Action {
    pub fn is_pass(&self) -> bool {
        matches!(self, Action::Pass)
    }

    pub fn as_play(&self) -> Option<&PlayAction> {
        match self {
            Action::Play(p) => Some(p),
            Action::Pass => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Play(p) => write!(f, "play {}x{}", p.count, p.face),
            Action::Pass => f.write_str("pass"),
        }
    }
}

/// Why an action was refused. `Ok` marks an accepted action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rejection {
    NotRarer,
    TooFewCopies,
    BoardFull,
    CardsNotHeld,
    AlreadyPassed,
    NotYourTurn,
    OpenerMustPlay,
    Ok,
}

impl Rejection {
    pub fn code(self) -> &'static str {
        match self {
            Rejection::NotRarer => "NOT_RARER",
            Rejection::TooFewCopies => "TOO_FEW_COPIES",
            Rejection::BoardFull => "BOARD_FULL",
            Rejection::CardsNotHeld => "CARDS_NOT_HELD",
            Rejection::AlreadyPassed => "ALREADY_PASSED",
            Rejection::NotYourTurn => "NOT_YOUR_TURN",
            Rejection::OpenerMustPlay => "OPENER_MUST_PLAY",
            Rejection::Ok => "OK",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegalityResult {
    pub legal: bool,
    pub reason: Rejection,
}

impl LegalityResult {
    pub const OK: LegalityResult = LegalityResult {
        legal: true,
        reason: Rejection::Ok,
    };

    pub fn reject(reason: Rejection) -> Self {
        Self {
            legal: reason == Rejection::Ok,
            reason,
        }
    }

    pub fn into_result(self) -> Result<(), EngineError> {
        if self.legal {
            Ok(())
        } else {
            Err(EngineError::Illegal(self.reason))
        }
    }
}

/// The board of the pizza currently being made.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PizzaState {
    pub slots_used: u8,
    pub top_face: Option<u8>,
    pub top_count: u8,
    pub passed: SeatSet,
    pub last_player_to_play: Option<Seat>,
    pub opener: Seat,
    /// Cards on the board in placement order.
    pub cards: Vec<Card>,
}

impl PizzaState {
    pub fn new(opener: Seat) -> Self {
        Self {
            slots_used: 0,
            top_face: None,
            top_count: 0,
            passed: SeatSet::EMPTY,
            last_player_to_play: None,
            opener,
            cards: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.slots_used == 0
    }
}

/// Checks whether `seat` may take `action` now. `to_act` is the seat whose turn
/// it is. Never fails; a refused action carries its rejection code.
pub fn validate_play(
    pizza: &PizzaState,
    hand: &Hand,
    action: &Action,
    seat: Seat,
    to_act: Seat,
) -> LegalityResult {
    if seat != to_act {
        return LegalityResult::reject(Rejection::NotYourTurn);
    }
    if pizza.passed.contains(seat) {
        return LegalityResult::reject(Rejection::AlreadyPassed);
    }
    let play = match action {
        Action::Pass => {
            if pizza.is_empty() && seat == pizza.opener {
                return LegalityResult::reject(Rejection::OpenerMustPlay);
            }
            return LegalityResult::OK;
        }
        Action::Play(play) => play,
    };
    if !holds_play(hand, seat, play) {
        return LegalityResult::reject(Rejection::CardsNotHeld);
    }
    if u16::from(pizza.slots_used) + u16::from(play.count) > u16::from(BOARD_SLOTS) {
        return LegalityResult::reject(Rejection::BoardFull);
    }
    if let Some(top) = pizza.top_face {
        if play.face >= top {
            return LegalityResult::reject(Rejection::NotRarer);
        }
        if play.count < pizza.top_count {
            return LegalityResult::reject(Rejection::TooFewCopies);
        }
    }
    LegalityResult::OK
}

fn holds_play(hand: &Hand, seat: Seat, play: &PlayAction) -> bool {
    hand.owner == seat
        && play.face <= MAX_FACE
        && play.count > 0
        && usize::from(play.count) == play.card_uids.len()
        && hand.holds_all(&play.card_uids)
        && play
            .card_uids
            .iter()
            .all(|uid| hand.get(*uid).is_some_and(|c| c.face == play.face))
}

/// Every legal action for `seat`, assuming it is that seat's turn.
///
/// Plays are listed face descending (Jokers last), then by count ascending,
/// each spending the lowest uids of its face; `Pass` comes last when allowed.
/// A seat that already passed gets nothing: it is skipped, not asked.
pub fn legal_actions(pizza: &PizzaState, hand: &Hand, seat: Seat) -> Vec<Action> {
    let mut actions = Vec::new();
    if pizza.passed.contains(seat) || hand.owner != seat {
        return actions;
    }
    let free = BOARD_SLOTS - pizza.slots_used;
    for face in (JOKER_FACE..=MAX_FACE).rev() {
        if pizza.top_face.is_some_and(|top| face >= top) {
            continue;
        }
        let held = hand.count_face(face).min(usize::from(free)) as u8;
        let min_count = pizza.top_count.max(1);
        for count in min_count..=held {
            if let Some(play) = PlayAction::canonical(hand, face, count) {
                actions.push(Action::Play(play));
            }
        }
    }
    if !(pizza.is_empty() && seat == pizza.opener) {
        actions.push(Action::Pass);
    }
    actions
}

/// Puts a validated play on the board. Inputs are left untouched.
pub fn apply_play(
    pizza: &PizzaState,
    hand: &Hand,
    action: &PlayAction,
    seat: Seat,
) -> Result<(PizzaState, Hand), EngineError> {
    let wrapped = Action::Play(action.clone());
    if !validate_play(pizza, hand, &wrapped, seat, seat).legal {
        return Err(EngineError::IllegalAction);
    }
    let mut hand = hand.clone();
    let mut pizza = pizza.clone();
    let spent = hand.take(&action.card_uids)?;
    pizza.slots_used += action.count;
    pizza.top_face = Some(action.face);
    pizza.top_count = action.count;
    pizza.last_player_to_play = Some(seat);
    pizza.cards.extend(spent);
    Ok((pizza, hand))
}

/// Records a pass. A pass is sticky: the seat sits out until the next pizza.
pub fn apply_pass(pizza: &PizzaState, seat: Seat) -> Result<PizzaState, EngineError> {
    if pizza.passed.contains(seat) || (pizza.is_empty() && seat == pizza.opener) {
        return Err(EngineError::IllegalAction);
    }
    let mut pizza = pizza.clone();
    pizza.passed.insert(seat);
    Ok(pizza)
}

/// A pizza is done when the board is full, when every active seat other than
/// the last one to play has passed, or when at most one seat still holds cards.
pub fn is_pizza_done(pizza: &PizzaState, active_seats: SeatSet) -> bool {
    if pizza.slots_used >= BOARD_SLOTS || active_seats.len() <= 1 {
        return true;
    }
    active_seats
        .iter()
        .filter(|s| Some(*s) != pizza.last_player_to_play)
        .all(|s| pizza.passed.contains(s))
}

/// The next seat clockwise after `previous_actor` that still holds cards and
/// has not passed. `previous_actor` itself is never returned.
pub fn next_to_act(pizza: &PizzaState, active_seats: SeatSet, previous_actor: Seat) -> Option<Seat> {
    (1..4)
        .map(|step| previous_actor.clockwise(step))
        .find(|s| active_seats.contains(*s) && !pizza.passed.contains(*s))
}
