use crate::agents::{highest_of, plays, AgentPolicy};
use crate::cards::{Card, CardId};
use crate::event::SpecialActionKind;
use crate::rules::Action;
use crate::view::PlayerView;

/// Sheds as many cards as it can each turn.
///
/// Plays the legal play with the most copies, breaking ties toward the
/// highest face so rare cards are kept; passes only when nothing can be
/// played. Returns its highest faces in the exchange and only ever declares
/// Food Fight.
#[derive(Clone, Debug)]
pub struct GreedyAgent {
    _seed: u64,
}

impl GreedyAgent {
    pub fn new(seed: u64) -> Self {
        Self { _seed: seed }
    }
}

impl AgentPolicy for GreedyAgent {
    fn name(&self) -> &str {
        "greedy"
    }

    fn decide_play(&mut self, view: &PlayerView<'_>) -> Action {
        plays(view)
            .max_by(|a, b| a.count.cmp(&b.count).then(a.face.cmp(&b.face)))
            .map_or(Action::Pass, |p| Action::Play(p.clone()))
    }

    fn decide_exchange_return(
        &mut self,
        view: &PlayerView<'_>,
        _received: &[Card],
        k: usize,
    ) -> Vec<CardId> {
        highest_of(view.own_hand, k)
    }

    fn decide_special_action(&mut self, _view: &PlayerView<'_>, offered: SpecialActionKind) -> bool {
        offered == SpecialActionKind::FoodFight
    }
}
