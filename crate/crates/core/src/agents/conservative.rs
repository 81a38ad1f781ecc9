use crate::agents::{highest_of, plays, AgentPolicy};
use crate::cards::{Card, CardId};
use crate::event::SpecialActionKind;
use crate::rules::Action;
use crate::view::PlayerView;

/// Spends as little as possible and hoards Jokers.
///
/// Plays the fewest copies the board allows, choosing the highest (most
/// common) face among those. Jokers are played only when nothing else is
/// legal, including passing. Keeps Jokers out of exchange returns and accepts
/// every special action.
#[derive(Clone, Debug)]
pub struct ConservativeAgent {
    _seed: u64,
}

impl ConservativeAgent {
    pub fn new(seed: u64) -> Self {
        Self { _seed: seed }
    }
}

impl AgentPolicy for ConservativeAgent {
    fn name(&self) -> &str {
        "conservative"
    }

    fn decide_play(&mut self, view: &PlayerView<'_>) -> Action {
        let pick = |joker: bool| {
            plays(view)
                .filter(|p| (p.face == 0) == joker)
                .min_by(|a, b| a.count.cmp(&b.count).then(b.face.cmp(&a.face)))
                .map(|p| Action::Play(p.clone()))
        };
        if let Some(action) = pick(false) {
            return action;
        }
        if view.legal.contains(&Action::Pass) {
            return Action::Pass;
        }
        pick(true).unwrap_or(Action::Pass)
    }

    fn decide_exchange_return(
        &mut self,
        view: &PlayerView<'_>,
        _received: &[Card],
        k: usize,
    ) -> Vec<CardId> {
        let mut back = highest_of(view.own_hand.iter().filter(|c| !c.is_joker()), k);
        if back.len() < k {
            back.extend(highest_of(view.own_hand.iter().filter(|c| c.is_joker()), k - back.len()));
        }
        back
    }

    fn decide_special_action(&mut self, _view: &PlayerView<'_>, _offered: SpecialActionKind) -> bool {
        true
    }
}
