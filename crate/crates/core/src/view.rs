//! What one seat is allowed to know.
//!
//! Agents and network clients only ever receive a [`PlayerView`]. It is built
//! from the match state by copying public fields and the seat's own hand;
//! other hands appear only as card counts.

use serde::Serialize;

use crate::cards::{Card, Seat, SEATS};
use crate::engine::{MatchState, Pending, ShiftPhase};
use crate::event::{Event, SpecialAction};
use crate::roles::RoleKind;
use crate::rules::{Action, PizzaState};

#[derive(Clone, Debug, Serialize)]
pub struct PlayerView<'a> {
    pub seat: Seat,
    pub own_hand: &'a [Card],
    pub hand_sizes: [usize; SEATS],
    pub pizza: &'a PizzaState,
    pub roles: Option<[RoleKind; SEATS]>,
    pub scores: [u32; SEATS],
    pub shift_number: u32,
    pub phase: ShiftPhase,
    pub to_act: Option<Seat>,
    pub finishing_order: &'a [Seat],
    pub special_action: Option<SpecialAction>,
    /// Public events of the current shift, oldest first.
    pub public_history: &'a [Event],
    /// Legal pizza actions when it is this seat's turn, otherwise empty.
    pub legal: Vec<Action>,
    /// Seq of the last event applied to the state this view was cut from.
    pub last_seq: u64,
}

impl<'a> PlayerView<'a> {
    /// `public_history` must hold only public events; [`PublicHistory`] keeps
    /// the right slice.
    pub fn new(state: &'a MatchState, seat: Seat, public_history: &'a [Event]) -> Self {
        debug_assert!(public_history.iter().all(Event::is_public));
        let to_act = match state.pending() {
            Pending::Turn(s) => Some(s),
            _ => None,
        };
        let legal = if to_act == Some(seat) {
            state.legal_for(seat)
        } else {
            Vec::new()
        };
        Self {
            seat,
            own_hand: &state.hand(seat).cards,
            hand_sizes: Seat::ALL.map(|s| state.hand(s).len()),
            pizza: &state.pizza,
            roles: state.roles,
            scores: state.scores,
            shift_number: state.shift_number,
            phase: state.phase,
            to_act,
            finishing_order: &state.finishing_order,
            special_action: state.special_action,
            public_history,
            legal,
            last_seq: state.next_seq.saturating_sub(1),
        }
    }

    pub fn role(&self) -> Option<RoleKind> {
        self.roles.map(|r| r[self.seat.index()])
    }
}

/// The public events of the shift in progress.
#[derive(Clone, Debug, Default)]
pub struct PublicHistory {
    events: Vec<Event>,
}

impl PublicHistory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, event: &Event) {
        if !event.is_public() {
            return;
        }
        if matches!(event.kind, crate::event::EventKind::ShiftStarted { .. }) {
            self.events.clear();
        }
        self.events.push(event.clone());
    }

    pub fn extend<'e>(&mut self, events: impl IntoIterator<Item = &'e Event>) {
        for event in events {
            self.record(event);
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }
}
