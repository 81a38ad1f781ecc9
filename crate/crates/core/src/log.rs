//! JSON Lines event logs.
//!
//! One event per line in canonical JSON, LF-terminated. The first line is
//! always `MatchStarted`, which carries the rule config and seed, so a log
//! file is enough to replay its match.

use crate::canonical::to_canonical_string;
use crate::engine::{replay, MatchState};
use crate::error::EngineError;
use crate::event::Event;

/// Canonical encoding of one event, without the trailing newline.
pub fn event_line(event: &Event) -> String {
    to_canonical_string(event).expect("events contain no floats")
}

pub fn write_log(events: &[Event]) -> String {
    let mut out = String::new();
    for event in events {
        out.push_str(&event_line(event));
        out.push('\n');
    }
    out
}

/// Parses a log. Blank lines are skipped; anything unparseable is reported as
/// a corrupt log at the seq it should have had.
pub fn read_log(text: &str) -> Result<Vec<Event>, EngineError> {
    let mut events = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let event = serde_json::from_str(line).map_err(|e| EngineError::CorruptLog {
            seq: events.len() as u64,
            reason: e.to_string(),
        })?;
        events.push(event);
    }
    Ok(events)
}

pub fn replay_text(text: &str) -> Result<MatchState, EngineError> {
    replay(&read_log(text)?)
}

/// Canonical encoding of a state, for byte-level comparisons.
pub fn state_fingerprint(state: &MatchState) -> String {
    to_canonical_string(state).expect("state contains no floats")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RuleConfig;
    use crate::engine::new_match;

    #[test]
    fn log_round_trips() {
        let (state, events) = new_match(RuleConfig::default(), 42).unwrap();
        let text = write_log(&events);
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
        let parsed = read_log(&text).unwrap();
        assert_eq!(parsed, events);
        assert_eq!(write_log(&parsed), text);
        assert_eq!(state_fingerprint(&replay(&parsed).unwrap()), state_fingerprint(&state));
    }

    #[test]
    fn garbage_line_is_corrupt() {
        let (_, events) = new_match(RuleConfig::default(), 1).unwrap();
        let mut text = write_log(&events[..3]);
        text.push_str("{not json}\n");
        assert!(matches!(
            read_log(&text),
            Err(EngineError::CorruptLog { seq: 3, .. })
        ));
    }
}
