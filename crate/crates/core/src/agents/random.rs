use crate::agents::AgentPolicy;
use crate::cards::{Card, CardId};
use crate::event::SpecialActionKind;
use crate::rng::GameRng;
use crate::rules::Action;
use crate::view::PlayerView;

/// Uniform over the legal actions, drawing from its own seeded generator.
#[derive(Clone, Debug)]
pub struct RandomAgent {
    rng: GameRng,
}

impl RandomAgent {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: GameRng::from_seed(seed),
        }
    }
}

impl AgentPolicy for RandomAgent {
    fn name(&self) -> &str {
        "random"
    }

    fn decide_play(&mut self, view: &PlayerView<'_>) -> Action {
        if view.legal.is_empty() {
            return Action::Pass;
        }
        view.legal[self.rng.index(view.legal.len())].clone()
    }

    fn decide_exchange_return(
        &mut self,
        view: &PlayerView<'_>,
        _received: &[Card],
        k: usize,
    ) -> Vec<CardId> {
        let mut uids: Vec<CardId> = view.own_hand.iter().map(|c| c.uid).collect();
        self.rng.shuffle(&mut uids);
        uids.truncate(k);
        uids
    }

    fn decide_special_action(&mut self, _view: &PlayerView<'_>, _offered: SpecialActionKind) -> bool {
        self.rng.below(2) == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::test_support::state_with;
    use crate::cards::Seat;
    use crate::rules::PizzaState;
    use crate::view::PlayerView;

    #[test]
    fn singleton_legal_set_is_chosen() {
        let mut pizza = PizzaState::new(Seat(1));
        pizza.slots_used = 1;
        pizza.top_face = Some(3);
        pizza.top_count = 1;
        pizza.last_player_to_play = Some(Seat(1));
        let state = state_with(&[11, 11], pizza);
        let view = PlayerView::new(&state, Seat(0), &[]);
        assert_eq!(view.legal, vec![Action::Pass]);
        let mut agent = RandomAgent::new(1);
        for _ in 0..20 {
            assert_eq!(agent.decide_play(&view), Action::Pass);
        }
    }

    #[test]
    fn uniform_over_four_actions() {
        let state = state_with(&[11, 11, 10, 0], PizzaState::new(Seat(0)));
        let view = PlayerView::new(&state, Seat(0), &[]);
        assert_eq!(view.legal.len(), 4);
        let mut agent = RandomAgent::new(2024);
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let choice = agent.decide_play(&view);
            let i = view.legal.iter().position(|a| *a == choice).unwrap();
            counts[i] += 1;
        }
        for c in counts {
            assert!((2300..=2700).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn same_seed_same_choices() {
        let state = state_with(&[11, 11, 10, 0], PizzaState::new(Seat(0)));
        let view = PlayerView::new(&state, Seat(0), &[]);
        let mut a = RandomAgent::new(9);
        let mut b = RandomAgent::new(9);
        for _ in 0..100 {
            assert_eq!(a.decide_play(&view), b.decide_play(&view));
        }
    }
}
