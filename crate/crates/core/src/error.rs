use thiserror::Error;

use crate::rules::Rejection;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid rule config: {0}")]
    InvalidConfig(String),
    #[error("{0} players are not supported; the table seats exactly 4")]
    PlayerCountUnsupported(usize),
    #[error("illegal action: {0}")]
    Illegal(Rejection),
    #[error("action violates the rules of the current pizza")]
    IllegalAction,
    #[error("cards not held by the acting seat")]
    CardsNotHeld,
    #[error("wrong phase: {0}")]
    WrongPhase(String),
    #[error("expected {expected} cards, got {got}")]
    WrongCardCount { expected: usize, got: usize },
    #[error("invalid special action declaration: {0}")]
    InvalidDeclaration(String),
    #[error("the match is already over")]
    MatchAlreadyOver,
    #[error("corrupt event log at seq {seq}: {reason}")]
    CorruptLog { seq: u64, reason: String },
    #[error("engine produced an event its own reducer rejected: {0}")]
    Internal(String),
}

impl EngineError {
    /// Stable machine-readable code, as used on the wire.
    pub fn code(&self) -> &'static str {
        match self {
            EngineError::InvalidConfig(_) => "INVALID_CONFIG",
            EngineError::PlayerCountUnsupported(_) => "PLAYER_COUNT_UNSUPPORTED",
            EngineError::Illegal(r) => r.code(),
            EngineError::IllegalAction => "ILLEGAL_ACTION",
            EngineError::CardsNotHeld => "CARDS_NOT_HELD",
            EngineError::WrongPhase(_) => "WRONG_PHASE",
            EngineError::WrongCardCount { .. } => "WRONG_CARD_COUNT",
            EngineError::InvalidDeclaration(_) => "INVALID_DECLARATION",
            EngineError::MatchAlreadyOver => "MATCH_ALREADY_OVER",
            EngineError::CorruptLog { .. } => "CORRUPT_LOG",
            EngineError::Internal(_) => "INTERNAL",
        }
    }
}
