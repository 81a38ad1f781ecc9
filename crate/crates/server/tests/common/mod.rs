//! Scripted clients and a redaction sniffer for wire-level tests.
#![allow(dead_code)]

use std::collections::HashSet;
use std::net::SocketAddr;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use chefs_hat::engine::replay;
use chefs_hat::event::Event;
use chefs_hat::{CardId, Seat};
use chefs_hat_server::client::Client;
use chefs_hat_server::protocol::{CreateTableRequest, JoinTableRequest, SubmitActionRequest, SubmittedAction};
use chefs_hat_server::{Frame, Hub, MessageType, ServerConfig};
use serde_json::Value;

pub const PATIENCE: Duration = Duration::from_secs(60);

pub async fn start_server(turn_timer: Option<Duration>, log_dir: &Path) -> (SocketAddr, Arc<Hub>) {
    let config = ServerConfig {
        turn_timer,
        log_dir: Some(log_dir.to_path_buf()),
        ..ServerConfig::default()
    };
    let (addr, hub, _task) = chefs_hat_server::spawn("127.0.0.1:0", config).await.expect("bind");
    (addr, hub)
}

pub async fn recv(client: &mut Client) -> Frame {
    tokio::time::timeout(PATIENCE, client.recv())
        .await
        .expect("server went quiet")
        .expect("read failed")
        .expect("server closed the connection")
}

/// Receives until a frame of `kind` arrives, returning it and what came before.
pub async fn recv_until(client: &mut Client, kind: MessageType) -> (Frame, Vec<Frame>) {
    let mut skipped = Vec::new();
    loop {
        let frame = recv(client).await;
        if frame.kind == kind {
            return (frame, skipped);
        }
        skipped.push(frame);
    }
}

/// Opens a session, creates a table and returns the session and table id.
pub async fn create_table(addr: SocketAddr, request: &CreateTableRequest) -> (Client, String) {
    let (mut client, _) = Client::hello(addr, None, "host").await.expect("hello");
    client.send(MessageType::CreateTable, request).await.unwrap();
    let (state, _) = recv_until(&mut client, MessageType::TableState).await;
    let id = state.body["table_id"].as_str().unwrap().to_string();
    (client, id)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Script {
    /// Let the first turn time out, then submit the stale answer anyway.
    pub sleep_through_first_turn: bool,
    pub declare_special_actions: bool,
}

/// Everything one scripted player saw.
#[derive(Debug, Default)]
pub struct Transcript {
    pub seat: Option<Seat>,
    pub frames: Vec<Frame>,
    pub submits: usize,
    pub verdicts: usize,
    pub stale_verdict: Option<Frame>,
}

impl Transcript {
    pub fn count(&self, kind: MessageType) -> usize {
        self.frames.iter().filter(|f| f.kind == kind).count()
    }
}

/// Joins `table_id` and answers every prompt until the match ends.
pub async fn scripted_player(addr: SocketAddr, table_id: String, name: String, script: Script) -> Transcript {
    let (mut client, _) = Client::hello(addr, None, &name).await.expect("hello");
    client
        .send(MessageType::JoinTable, &JoinTableRequest { table_id: table_id.clone() })
        .await
        .unwrap();
    let mut t = Transcript::default();
    let mut own_hand: Vec<(u8, CardId)> = Vec::new();
    let mut turns = 0usize;
    let mut stale: Option<SubmittedAction> = None;
    let mut awaiting_stale = false;
    loop {
        let frame = recv(&mut client).await;
        t.frames.push(frame.clone());
        let body = &frame.body;
        let answer = match frame.kind {
            MessageType::SeatAssigned => {
                t.seat = Some(Seat(body["seat"].as_u64().unwrap() as u8));
                None
            }
            MessageType::ViewUpdate => {
                own_hand = body["view"]["own_hand"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|c| (c["face"].as_u64().unwrap() as u8, CardId(c["uid"].as_u64().unwrap() as u8)))
                    .collect();
                if body["auto_move"] == true && body["auto_seat"].as_u64() == t.seat.map(|s| u64::from(s.0)) {
                    let stale = stale.take();
                    awaiting_stale = stale.is_some();
                    stale
                } else {
                    None
                }
            }
            MessageType::YourTurn => {
                let legal = body["legal"].as_array().unwrap();
                turns += 1;
                let pick = legal[(turns * 7 + t.seat.unwrap().index()) % legal.len()].clone();
                let action: SubmittedAction = serde_json::from_value(pick).unwrap();
                if script.sleep_through_first_turn && turns == 1 {
                    stale = Some(action);
                    None
                } else {
                    Some(action)
                }
            }
            MessageType::ExchangePrompt => {
                let count = body["count"].as_u64().unwrap() as usize;
                let mut by_face = own_hand.clone();
                by_face.sort_by_key(|(face, uid)| (std::cmp::Reverse(*face), *uid));
                Some(SubmittedAction::ExchangeReturn {
                    cards: by_face.iter().take(count).map(|(_, uid)| *uid).collect(),
                })
            }
            MessageType::SpecialActionPrompt => Some(SubmittedAction::SpecialAction {
                declare: script.declare_special_actions,
            }),
            MessageType::ActionAccepted | MessageType::ActionRejected => {
                t.verdicts += 1;
                if awaiting_stale {
                    awaiting_stale = false;
                    t.stale_verdict = Some(frame.clone());
                }
                None
            }
            MessageType::MatchEnded => return t,
            MessageType::Error => panic!("server error: {}", frame.encode()),
            _ => None,
        };
        if let Some(action) = answer {
            t.submits += 1;
            let request = SubmitActionRequest {
                table_id: table_id.clone(),
                action,
            };
            client.send(MessageType::SubmitAction, &request).await.unwrap();
        }
    }
}

/// Four scripted players at a fresh all-human table.
pub async fn play_four(addr: SocketAddr, seed: u64, turn_timer_ms: u64, scripts: [Script; 4]) -> (String, Vec<Transcript>) {
    let request = CreateTableRequest {
        seed: Some(seed),
        turn_timer_ms: Some(turn_timer_ms),
        ..CreateTableRequest::default()
    };
    let (_host, table_id) = create_table(addr, &request).await;
    let players: Vec<_> = scripts
        .into_iter()
        .enumerate()
        .map(|(i, script)| tokio::spawn(scripted_player(addr, table_id.clone(), format!("p{i}"), script)))
        .collect();
    let mut transcripts = Vec::new();
    for p in players {
        transcripts.push(p.await.expect("player task panicked"));
    }
    (table_id, transcripts)
}

/// The seq a frame was cut at, if it says.
fn frame_seq(frame: &Frame) -> Option<u64> {
    frame.body["last_seq"]
        .as_u64()
        .or_else(|| frame.body["view"]["last_seq"].as_u64())
}

/// Every card uid mentioned anywhere in a JSON value.
pub fn card_uids(value: &Value, out: &mut Vec<u8>) {
    match value {
        Value::Object(map) => {
            if let (Some(uid), Some(_)) = (map.get("uid").and_then(Value::as_u64), map.get("face")) {
                out.push(uid as u8);
            }
            for (key, v) in map {
                if key == "card_uids" || key == "cards" {
                    out.extend(v.as_array().into_iter().flatten().filter_map(Value::as_u64).map(|u| u as u8));
                }
                card_uids(v, out);
            }
        }
        Value::Array(items) => items.iter().for_each(|v| card_uids(v, out)),
        _ => {}
    }
}

/// Checks that no frame sent to a seat names a card concealed in another
/// seat's hand at the seq the frame was cut at, and that each view shows
/// exactly the seat's own hand. Returns the number of frames checked.
pub fn check_redaction(log: &[Event], transcripts: &[Transcript]) -> Result<usize, String> {
    let mut state = replay(&log[..1]).map_err(|e| e.to_string())?;
    let mut hands_at: Vec<[HashSet<u8>; 4]> = Vec::with_capacity(log.len());
    let snapshot = |state: &chefs_hat::MatchState| Seat::ALL.map(|s| state.hand(s).cards.iter().map(|c| c.uid.0).collect());
    hands_at.push(snapshot(&state));
    for event in &log[1..] {
        state.apply(event).map_err(|e| e.to_string())?;
        hands_at.push(snapshot(&state));
    }
    let mut checked = 0;
    for t in transcripts {
        let seat = t.seat.ok_or("player never got a seat")?;
        let mut seq = None;
        for frame in &t.frames {
            seq = frame_seq(frame).or(seq);
            let mut uids = Vec::new();
            card_uids(&frame.body, &mut uids);
            if uids.is_empty() {
                continue;
            }
            let at = seq.ok_or_else(|| format!("{seat}: cards before any seq: {}", frame.encode()))? as usize;
            let hands = hands_at.get(at).ok_or_else(|| format!("{seat}: seq {at} beyond the log"))?;
            for other in Seat::ALL.into_iter().filter(|s| *s != seat) {
                if let Some(uid) = uids.iter().find(|u| hands[other.index()].contains(u)) {
                    return Err(format!(
                        "{seat} was shown card #{uid} held by {other} at seq {at}: {}",
                        frame.encode()
                    ));
                }
            }
            if frame.kind == MessageType::ViewUpdate {
                if frame.body["view"]["seat"].as_u64() != Some(u64::from(seat.0)) {
                    return Err(format!("{seat} received another seat's view"));
                }
                let shown: HashSet<u8> = frame.body["view"]["own_hand"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|c| c["uid"].as_u64().unwrap() as u8)
                    .collect();
                if shown != hands[seat.index()] {
                    return Err(format!("{seat}: view at seq {at} does not show its own hand"));
                }
            }
            checked += 1;
        }
    }
    Ok(checked)
}
