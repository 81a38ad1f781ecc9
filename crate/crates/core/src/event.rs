//! The append-only record of a match.
//!
//! Every state change is an [`Event`]; the match state is a fold of its log.
//! Events that reveal concealed cards are tagged with the one seat allowed to
//! see them.

use serde::{Deserialize, Serialize};

use crate::cards::{Card, Seat};
use crate::config::RuleConfig;
use crate::roles::RoleKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Redaction {
    Public,
    PrivateToSeat(Seat),
}

impl Redaction {
    pub fn visible_to(self, seat: Seat) -> bool {
        match self {
            Redaction::Public => true,
            Redaction::PrivateToSeat(owner) => owner == seat,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpecialActionKind {
    /// Dishwasher only: the role hierarchy is inverted for the shift.
    FoodFight,
    /// Any other role: the shift skips the card exchange.
    DinnerIsServed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpecialAction {
    pub kind: SpecialActionKind,
    pub declarer: Seat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EndReason {
    Target,
    Cutoff,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum EventKind {
    MatchStarted {
        rule_config: RuleConfig,
        seed: u64,
    },
    ShiftStarted {
        shift: u32,
    },
    Dealt {
        seat: Seat,
        cards: Vec<Card>,
    },
    /// `action` is `None` when the holder of both Jokers declined.
    SpecialActionDeclared {
        seat: Seat,
        action: Option<SpecialActionKind>,
    },
    ExchangeForced {
        from: Seat,
        to: Seat,
        cards: Vec<Card>,
    },
    ExchangeReturned {
        from: Seat,
        to: Seat,
        cards: Vec<Card>,
    },
    PizzaOpened {
        opener: Seat,
    },
    CardsPlayed {
        seat: Seat,
        face: u8,
        cards: Vec<Card>,
    },
    Passed {
        seat: Seat,
    },
    PizzaDone {
        last_player: Seat,
        slots_used: u8,
    },
    PlayerFinished {
        seat: Seat,
        position: u8,
    },
    ShiftEnded {
        finishing_order: Vec<Seat>,
    },
    RolesAssigned {
        roles: [RoleKind; 4],
    },
    ScoresUpdated {
        gained: [u32; 4],
        scores: [u32; 4],
    },
    MatchEnded {
        winner: Seat,
        reason: EndReason,
        scores: [u32; 4],
    },
    /// An agent submitted something illegal and the runner substituted a
    /// fallback. Carries no state change.
    AgentFault {
        seat: Seat,
        detail: String,
    },
}

impl EventKind {
    pub fn redaction(&self) -> Redaction {
        match self {
            EventKind::Dealt { seat, .. } => Redaction::PrivateToSeat(*seat),
            EventKind::ExchangeForced { to, .. } | EventKind::ExchangeReturned { to, .. } => {
                Redaction::PrivateToSeat(*to)
            }
            _ => Redaction::Public,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            EventKind::MatchStarted { .. } => "MatchStarted",
            EventKind::ShiftStarted { .. } => "ShiftStarted",
            EventKind::Dealt { .. } => "Dealt",
            EventKind::SpecialActionDeclared { .. } => "SpecialActionDeclared",
            EventKind::ExchangeForced { .. } => "ExchangeForced",
            EventKind::ExchangeReturned { .. } => "ExchangeReturned",
            EventKind::PizzaOpened { .. } => "PizzaOpened",
            EventKind::CardsPlayed { .. } => "CardsPlayed",
            EventKind::Passed { .. } => "Passed",
            EventKind::PizzaDone { .. } => "PizzaDone",
            EventKind::PlayerFinished { .. } => "PlayerFinished",
            EventKind::ShiftEnded { .. } => "ShiftEnded",
            EventKind::RolesAssigned { .. } => "RolesAssigned",
            EventKind::ScoresUpdated { .. } => "ScoresUpdated",
            EventKind::MatchEnded { .. } => "MatchEnded",
            EventKind::AgentFault { .. } => "AgentFault",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub shift: u32,
    #[serde(flatten)]
    pub kind: EventKind,
    pub redaction_class: Redaction,
}

impl Event {
    pub fn is_public(&self) -> bool {
        self.redaction_class == Redaction::Public
    }
}
