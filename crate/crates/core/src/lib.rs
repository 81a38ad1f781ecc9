//! Rules engine for the Chef's Hat card game.
//!
//! The crate is layered bottom-up:
//!
//! * [`cards`], [`rules`]: the deck, hands, and the pure legality and
//!   transition functions of a single pizza.
//! * [`engine`]: the event-sourced match state machine (shifts, exchange,
//!   special actions, scoring) and [`engine::replay`].
//! * [`view`], [`agents`]: the redacted per-seat view and the policy seam with
//!   three baseline bots.
//! * [`driver`]: runs a match against a set of policies, the loop shared by
//!   the simulator and the server.
//!
//! Everything is deterministic given a seed; see [`rng`] for the generator.

pub mod agents;
pub mod canonical;
pub mod cards;
pub mod config;
pub mod driver;
pub mod engine;
pub mod error;
pub mod event;
pub mod log;
pub mod roles;
pub mod rng;
pub mod rules;
pub mod view;

pub use cards::{Card, CardId, Deck, Hand, Seat, SeatSet};
pub use config::RuleConfig;
pub use engine::{MatchState, Pending, ShiftPhase};
pub use error::EngineError;
pub use event::{Event, EventKind, Redaction};
pub use rules::{Action, PizzaState, PlayAction};
pub use view::PlayerView;
