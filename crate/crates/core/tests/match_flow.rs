use chefs_hat::agents::{agent_from_name, AgentPolicy};
use chefs_hat::driver::MatchDriver;
use chefs_hat::engine::{replay, ShiftPhase};
use chefs_hat::event::{EndReason, EventKind};
use chefs_hat::log::{read_log, state_fingerprint, write_log};
use chefs_hat::rng::derive_seed;
use chefs_hat::{MatchState, RuleConfig, Seat};

fn lineup(names: [&str; 4], seed: u64) -> [Box<dyn AgentPolicy>; 4] {
    let mut i = 0;
    names.map(|n| {
        i += 1;
        agent_from_name(n, derive_seed(seed, i)).unwrap()
    })
}

fn play_match(names: [&str; 4], seed: u64) -> MatchDriver {
    let mut driver = MatchDriver::new(RuleConfig::default(), seed).unwrap();
    let mut agents = lineup(names, seed);
    driver
        .run_to_end(&mut agents, |state: &MatchState, _| {
            state.check_invariants().unwrap();
        })
        .unwrap();
    driver
}

#[test]
fn random_match_reaches_target() {
    let driver = play_match(["random"; 4], 1);
    let state = driver.state();
    assert!(state.is_over());
    assert_eq!(state.end_reason, Some(EndReason::Target));
    let winner = state.winner.unwrap();
    assert!(state.scores[winner.index()] >= 15);
    assert_eq!(driver.faults(), 0);
    assert!(matches!(
        driver.log().last().unwrap().kind,
        EventKind::MatchEnded { .. }
    ));
}

#[test]
fn replay_reconstructs_final_state() {
    for seed in 0..20 {
        let driver = play_match(["random", "greedy", "conservative", "random"], seed);
        let text = write_log(driver.log());
        let rebuilt = replay(&read_log(&text).unwrap()).unwrap();
        assert_eq!(state_fingerprint(&rebuilt), state_fingerprint(driver.state()));
    }
}

#[test]
fn every_prefix_replays_and_resumes() {
    let driver = play_match(["random"; 4], 77);
    let log = driver.log();
    for cut in 1..log.len() {
        let state = replay(&log[..cut]).unwrap();
        state.check_invariants().unwrap();
        let _ = state.pending();
    }
}

#[test]
fn same_seed_same_log() {
    let a = play_match(["random", "greedy", "random", "conservative"], 9);
    let b = play_match(["random", "greedy", "random", "conservative"], 9);
    assert_eq!(write_log(a.log()), write_log(b.log()));
}

#[test]
fn shift_one_opener_holds_golden_eleven() {
    let driver = MatchDriver::new(RuleConfig::default(), 7).unwrap();
    let state = driver.state();
    assert_eq!(state.phase, ShiftPhase::MakingPizzas);
    assert_eq!(state.golden_holder(), Some(Seat(3)));
    assert_eq!(state.turn, Some(Seat(3)));
    assert_eq!(state.scores, [0; 4]);
    assert!(state.roles.is_none());
}
