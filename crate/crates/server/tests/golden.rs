//! Frozen transcripts of protocol version 1. Regenerate with
//! `CHEFSHAT_UPDATE_GOLDEN=1 cargo test -p chefs-hat-server --test golden`
//! only when the protocol version changes.

mod common;

use std::path::PathBuf;

use chefs_hat::RuleConfig;
use chefs_hat_server::client::Client;
use chefs_hat_server::protocol::{CreateTableRequest, JoinTableRequest, PingBody};
use chefs_hat_server::{Frame, MessageType};
use common::*;

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Replaces run-specific ids so transcripts compare across runs.
fn normalize(frames: &[Frame], ids: &[(&str, &str)]) -> String {
    let mut text = String::new();
    for frame in frames {
        let mut line = frame.encode();
        for (id, placeholder) in ids {
            line = line.replace(id, placeholder);
        }
        text.push_str(&line);
        text.push('\n');
    }
    text
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("CHEFSHAT_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return;
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    if expected != actual {
        let first = expected
            .lines()
            .zip(actual.lines())
            .position(|(e, a)| e != a)
            .unwrap_or(expected.lines().count().min(actual.lines().count()));
        panic!(
            "{name} differs at line {}:\nexpected {:?}\nactual   {:?}",
            first + 1,
            expected.lines().nth(first),
            actual.lines().nth(first)
        );
    }
}

#[tokio::test]
async fn handshake_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let (addr, _) = start_server(None, dir.path()).await;
    let mut client = Client::connect(addr).await.unwrap();
    let mut frames = Vec::new();
    client
        .send_raw(r#"{"body":{"name":"gus"},"protocol_version":1,"type":"Hello"}"#.into())
        .await
        .unwrap();
    let hello = recv(&mut client).await;
    let token = hello.body["session_token"].as_str().unwrap().to_string();
    frames.push(hello);
    client.send(MessageType::Ping, &PingBody { nonce: 3 }).await.unwrap();
    frames.push(recv(&mut client).await);
    client.send(MessageType::JoinTable, &JoinTableRequest { table_id: "missing".into() }).await.unwrap();
    frames.push(recv(&mut client).await);
    client.send_raw(r#"{"body":{},"protocol_version":1,"type":"Hello"}"#.into()).await.unwrap();
    frames.push(recv(&mut client).await);
    check_golden("handshake.ndjson", &normalize(&frames, &[(&token, "<session>")]));

    let mut stranger = Client::connect(addr).await.unwrap();
    stranger
        .send_raw(r#"{"body":{},"protocol_version":0,"type":"Hello"}"#.into())
        .await
        .unwrap();
    let refused = vec![recv(&mut stranger).await];
    check_golden("version_mismatch.ndjson", &normalize(&refused, &[]));
}

#[tokio::test]
async fn one_human_and_three_bots_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let (addr, _) = start_server(None, dir.path()).await;
    let request = CreateTableRequest {
        rule_config: Some(RuleConfig {
            target_score: 4,
            ..RuleConfig::default()
        }),
        bots: [None, Some("greedy".into()), Some("conservative".into()), Some("random".into())],
        turn_timer_ms: Some(0),
        seed: Some(2024),
    };
    let (_host, table_id) = create_table(addr, &request).await;
    let script = Script {
        sleep_through_first_turn: false,
        declare_special_actions: true,
    };
    let transcript = scripted_player(addr, table_id.clone(), "gus".into(), script).await;
    assert_eq!(transcript.submits, transcript.verdicts);
    check_golden(
        "one_human_three_bots.ndjson",
        &normalize(&transcript.frames, &[(&table_id, "<table>")]),
    );
}
