#![allow(dead_code)]

use chefs_hat::agents::{agent_from_name, AgentPolicy};
use chefs_hat::cards::{deal_with, standard_deck, Seat};
use chefs_hat::driver::MatchDriver;
use chefs_hat::engine::{replay, Pending};
use chefs_hat::event::{Event, EventKind};
use chefs_hat::rng::{derive_seed, GameRng};
use chefs_hat::roles::RoleKind;
use chefs_hat::{MatchState, RuleConfig};

pub fn lineup(names: [&str; 4], seed: u64) -> [Box<dyn AgentPolicy>; 4] {
    let mut i = 0;
    names.map(|n| {
        i += 1;
        agent_from_name(n, derive_seed(seed, i)).unwrap()
    })
}

pub fn play_match(names: [&str; 4], seed: u64) -> MatchDriver {
    let mut driver = MatchDriver::new(RuleConfig::default(), seed).unwrap();
    driver.run_to_end(&mut lineup(names, seed), |_, _| {}).unwrap();
    driver
}

/// State right after shift 1 was scored, waiting to deal shift 2.
pub fn after_first_shift(seed: u64) -> MatchState {
    let driver = play_match(["random"; 4], seed);
    let log = driver.log();
    let cut = log
        .iter()
        .position(|e| matches!(e.kind, EventKind::ShiftStarted { shift: 2 }))
        .expect("match lasts beyond one shift");
    let state = replay(&log[..cut]).unwrap();
    assert_eq!(state.pending(), Pending::StartShift);
    state
}

/// Rigs the next deal so the seat holding `role` gets both Jokers.
pub fn rig_joker_pair(state: &mut MatchState, role: RoleKind) -> Seat {
    let target = state.seat_with_role(role).unwrap();
    for s in 0.. {
        let mut rng = GameRng::from_seed(s);
        let hands = deal_with(&standard_deck(), &mut rng, 4).unwrap();
        if hands[target.index()].holds_both_jokers() {
            state.rng_state = GameRng::from_seed(s);
            return target;
        }
    }
    unreachable!()
}

/// Rigs the next deal so nobody holds both Jokers.
pub fn rig_no_pair(state: &mut MatchState) {
    for s in 0.. {
        let mut rng = GameRng::from_seed(s);
        let hands = deal_with(&standard_deck(), &mut rng, 4).unwrap();
        if hands.iter().all(|h| !h.holds_both_jokers()) {
            state.rng_state = GameRng::from_seed(s);
            return;
        }
    }
}

pub fn kinds(events: &[Event]) -> Vec<&'static str> {
    events.iter().map(|e| e.kind.name()).collect()
}
