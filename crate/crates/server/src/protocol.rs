//! Wire protocol, version 1.
//!
//! Every frame is one canonical JSON object
//! `{"body":{..},"protocol_version":1,"type":"<MessageType>"}`, sent as one
//! line over plain TCP or as one text message over a WebSocket.

use chefs_hat::canonical::to_canonical_string;
use chefs_hat::event::{EndReason, SpecialActionKind};
use chefs_hat::{Action, Card, CardId, PlayerView, RuleConfig, Seat};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MessageType {
    Hello,
    CreateTable,
    JoinTable,
    SeatAssigned,
    TableState,
    YourTurn,
    SubmitAction,
    ActionAccepted,
    ActionRejected,
    ViewUpdate,
    ExchangePrompt,
    SpecialActionPrompt,
    MatchEnded,
    Error,
    Ping,
    Pong,
}

/// A frame as read off the wire, before its body is interpreted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    #[serde(rename = "type")]
    pub kind: MessageType,
    #[serde(default)]
    pub body: Value,
    pub protocol_version: u32,
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u32),
    #[error("bad {kind:?} body: {detail}")]
    BadBody { kind: MessageType, detail: String },
}

impl FrameError {
    pub fn code(&self) -> &'static str {
        match self {
            FrameError::Malformed(_) => codes::BAD_FRAME,
            FrameError::UnsupportedVersion(_) => codes::UNSUPPORTED_VERSION,
            FrameError::BadBody { .. } => codes::BAD_FRAME,
        }
    }
}

/// Error codes the server adds to the engine's legality codes.
pub mod codes {
    pub const UNSUPPORTED_VERSION: &str = "UNSUPPORTED_VERSION";
    pub const BAD_FRAME: &str = "BAD_FRAME";
    pub const EXPECTED_HELLO: &str = "EXPECTED_HELLO";
    pub const UNEXPECTED_MESSAGE: &str = "UNEXPECTED_MESSAGE";
    pub const INVALID_CONFIG: &str = "INVALID_CONFIG";
    pub const UNKNOWN_AGENT: &str = "UNKNOWN_AGENT";
    pub const UNKNOWN_TABLE: &str = "UNKNOWN_TABLE";
    pub const TABLE_FULL: &str = "TABLE_FULL";
    pub const NOT_SEATED: &str = "NOT_SEATED";
    pub const NOT_YOUR_TURN: &str = "NOT_YOUR_TURN";
}

impl Frame {
    pub fn new<T: Serialize>(kind: MessageType, body: &T) -> Self {
        Self {
            kind,
            body: serde_json::to_value(body).expect("protocol bodies serialize"),
            protocol_version: PROTOCOL_VERSION,
        }
    }

    pub fn error(code: &str, detail: impl Into<String>) -> Self {
        Self::new(
            MessageType::Error,
            &ErrorBody {
                code: code.to_string(),
                detail: detail.into(),
            },
        )
    }

    /// Canonical text of the frame, without a trailing newline.
    pub fn encode(&self) -> String {
        to_canonical_string(self).expect("protocol frames hold no floats")
    }

    /// Parses a frame and checks its version.
    pub fn decode(text: &str) -> Result<Self, FrameError> {
        let frame: Frame =
            serde_json::from_str(text).map_err(|e| FrameError::Malformed(e.to_string()))?;
        if frame.protocol_version != PROTOCOL_VERSION {
            return Err(FrameError::UnsupportedVersion(frame.protocol_version));
        }
        Ok(frame)
    }

    pub fn body<T: DeserializeOwned>(&self) -> Result<T, FrameError> {
        let body = if self.body.is_null() {
            Value::Object(Default::default())
        } else {
            self.body.clone()
        };
        serde_json::from_value(body).map_err(|e| FrameError::BadBody {
            kind: self.kind,
            detail: e.to_string(),
        })
    }
}

// Client to server.

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HelloRequest {
    /// A token from an earlier Hello, to resume that session.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session_token: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateTableRequest {
    /// Defaults to the server's rules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule_config: Option<RuleConfig>,
    /// One entry per seat: an agent name seats a bot, `null` leaves it open.
    #[serde(default)]
    pub bots: [Option<String>; 4],
    /// 0 disables the timer. Defaults to the server's timer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub turn_timer_ms: Option<u64>,
    /// Match seed. Random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JoinTableRequest {
    pub table_id: String,
}

/// What a seat can submit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SubmittedAction {
    Play {
        face: u8,
        count: u8,
        card_uids: Vec<CardId>,
    },
    Pass,
    ExchangeReturn {
        cards: Vec<CardId>,
    },
    SpecialAction {
        declare: bool,
    },
}

impl From<Action> for SubmittedAction {
    fn from(action: Action) -> Self {
        match action {
            Action::Play(p) => SubmittedAction::Play {
                face: p.face,
                count: p.count,
                card_uids: p.card_uids,
            },
            Action::Pass => SubmittedAction::Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmitActionRequest {
    pub table_id: String,
    pub action: SubmittedAction,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PingBody {
    #[serde(default)]
    pub nonce: u64,
}

// Server to client.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelloReply {
    pub session_token: String,
    pub resumed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeatAssignedBody {
    pub table_id: String,
    pub seat: Seat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableStatus {
    Lobby,
    Playing,
    Finished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeatInfo {
    Open,
    Bot { agent: String },
    Human { name: String, connected: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableStateBody {
    pub table_id: String,
    pub status: TableStatus,
    pub seats: Vec<SeatInfo>,
    pub turn_timer_ms: u64,
    pub rule_config: RuleConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YourTurnBody {
    pub table_id: String,
    pub seat: Seat,
    pub legal: Vec<Action>,
    /// Milliseconds left before the server moves for the seat.
    pub deadline_ms: Option<u64>,
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangePromptBody {
    pub table_id: String,
    pub seat: Seat,
    pub count: usize,
    pub received: Vec<Card>,
    pub deadline_ms: Option<u64>,
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialActionPromptBody {
    pub table_id: String,
    pub seat: Seat,
    pub offered: SpecialActionKind,
    pub deadline_ms: Option<u64>,
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionAcceptedBody {
    pub table_id: String,
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionRejectedBody {
    pub table_id: String,
    pub reason: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ViewUpdateBody<'a> {
    pub table_id: &'a str,
    pub view: PlayerView<'a>,
    /// Set when the update follows a move the server made for a timed-out seat.
    pub auto_move: bool,
    pub auto_seat: Option<Seat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchEndedBody {
    pub table_id: String,
    pub winner: Option<Seat>,
    pub reason: Option<EndReason>,
    pub scores: [u32; 4],
    pub last_seq: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub detail: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frames_encode_with_sorted_keys() {
        let frame = Frame::new(MessageType::Ping, &PingBody { nonce: 7 });
        assert_eq!(
            frame.encode(),
            r#"{"body":{"nonce":7},"protocol_version":1,"type":"Ping"}"#
        );
    }

    #[test]
    fn decode_rejects_other_versions() {
        let err = Frame::decode(r#"{"type":"Hello","body":{},"protocol_version":2}"#).unwrap_err();
        assert_eq!(err.code(), codes::UNSUPPORTED_VERSION);
    }

    #[test]
    fn decode_rejects_unknown_types_and_junk() {
        assert!(Frame::decode(r#"{"type":"Shout","body":{},"protocol_version":1}"#).is_err());
        assert!(Frame::decode("not json").is_err());
    }

    #[test]
    fn missing_body_reads_as_empty() {
        let frame = Frame::decode(r#"{"type":"Hello","protocol_version":1}"#).unwrap();
        assert_eq!(
            frame.body::<HelloRequest>().unwrap(),
            HelloRequest::default()
        );
    }

    #[test]
    fn submitted_actions_round_trip() {
        for action in [
            SubmittedAction::Pass,
            SubmittedAction::Play {
                face: 5,
                count: 2,
                card_uids: vec![CardId(3), CardId(4)],
            },
            SubmittedAction::ExchangeReturn {
                cards: vec![CardId(1)],
            },
            SubmittedAction::SpecialAction { declare: true },
        ] {
            let text = serde_json::to_string(&action).unwrap();
            assert_eq!(
                serde_json::from_str::<SubmittedAction>(&text).unwrap(),
                action
            );
        }
    }
}
