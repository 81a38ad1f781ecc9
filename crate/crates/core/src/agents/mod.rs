//! The policy seam and the baseline bots.
//!
//! A policy sees only a [`PlayerView`] and answers three kinds of question:
//! which pizza action to take, which cards to hand back in the exchange, and
//! whether to use a special action. The engine re-validates every answer.

mod conservative;
mod greedy;
mod random;

pub use conservative::ConservativeAgent;
pub use greedy::GreedyAgent;
pub use random::RandomAgent;

use thiserror::Error;

use crate::cards::{Card, CardId, Seat};
use crate::rng::derive_seed;
use crate::event::SpecialActionKind;
use crate::rules::{Action, PlayAction};
use crate::view::PlayerView;

pub trait AgentPolicy: Send {
    fn name(&self) -> &str;

    /// Picks a pizza action. Should be a member of `view.legal`.
    fn decide_play(&mut self, view: &PlayerView<'_>) -> Action;

    /// Picks the `k` cards to return in the exchange. `received` are the
    /// cards just handed over by the forced give, already in `view.own_hand`.
    fn decide_exchange_return(
        &mut self,
        view: &PlayerView<'_>,
        received: &[Card],
        k: usize,
    ) -> Vec<CardId>;

    /// Whether to declare the special action the Joker pair offers.
    fn decide_special_action(&mut self, view: &PlayerView<'_>, offered: SpecialActionKind) -> bool;
}

pub const AGENT_NAMES: [&str; 3] = ["random", "greedy", "conservative"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown agent {0:?}; expected one of random, greedy, conservative")]
pub struct UnknownAgent(pub String);

/// Seed of the agent in `seat` for a match seeded with `match_seed`.
pub fn seat_seed(match_seed: u64, seat: Seat) -> u64 {
    derive_seed(match_seed, 1 + seat.0 as u64)
}

/// Builds a baseline agent by name.
pub fn agent_from_name(name: &str, seed: u64) -> Result<Box<dyn AgentPolicy>, UnknownAgent> {
    match name {
        "random" => Ok(Box::new(RandomAgent::new(seed))),
        "greedy" => Ok(Box::new(GreedyAgent::new(seed))),
        "conservative" => Ok(Box::new(ConservativeAgent::new(seed))),
        other => Err(UnknownAgent(other.to_string())),
    }
}

fn plays<'v>(view: &'v PlayerView<'_>) -> impl Iterator<Item = &'v PlayAction> + 'v {
    view.legal.iter().filter_map(Action::as_play)
}

/// `k` uids from `cards` ranked by face descending, lower uid first on ties.
fn highest_of<'c>(cards: impl IntoIterator<Item = &'c Card>, k: usize) -> Vec<CardId> {
    let mut ranked: Vec<&Card> = cards.into_iter().collect();
    ranked.sort_by(|a, b| b.face.cmp(&a.face).then(a.uid.cmp(&b.uid)));
    ranked.into_iter().take(k).map(|c| c.uid).collect()
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::cards::{card_by_uid, Card, CardId, Hand, Seat, JOKER_FACE};
    use crate::engine::MatchState;
    use crate::rules::PizzaState;

    /// The `nth` copy of `face` in the standard deck.
    pub fn card(face: u8, nth: u8) -> Card {
        let base = if face == JOKER_FACE { 66 } else { (face - 1) * face / 2 };
        card_by_uid(CardId(base + nth)).unwrap()
    }

    pub fn hand_of(seat: Seat, faces: &[u8]) -> Hand {
        let mut used = [0u8; 12];
        let cards = faces
            .iter()
            .map(|&f| {
                let c = card(f, used[usize::from(f)]);
                used[usize::from(f)] += 1;
                c
            })
            .collect();
        Hand::new(seat, cards)
    }

    /// A mid-pizza state where seat 0 is to act holding `faces`.
    pub fn state_with(faces: &[u8], pizza: PizzaState) -> MatchState {
        let (mut state, _) =
            crate::engine::new_match(crate::config::RuleConfig::default(), 5).unwrap();
        state.hands[0] = hand_of(Seat(0), faces);
        state.pizza = pizza;
        state.turn = Some(Seat(0));
        state
    }
}
