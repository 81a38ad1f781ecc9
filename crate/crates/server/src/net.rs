//! Transports. One listening port serves three kinds of client, told apart
//! by their first bytes:
//!
//! - a line starting with `{`: newline-delimited JSON frames over plain TCP;
//! - `GET /health`: a one-shot HTTP response with table counts;
//! - any other `GET`: a WebSocket upgrade carrying one frame per text message.

use std::fmt::Display;
use std::io;
use std::sync::Arc;
use std::time::Duration;

use chefs_hat::canonical::to_canonical_string;
use futures_util::{future, Sink, SinkExt, Stream, StreamExt};
use log::{debug, warn};
use tokio::io::{AsyncReadExt, AsyncWriteExt};
use tokio::net::{TcpListener, TcpStream};
use tokio_tungstenite::tungstenite::Message;
use tokio_util::codec::{Framed, LinesCodec};

use crate::hub::Hub;
use crate::protocol::{
    codes, ActionRejectedBody, CreateTableRequest, Frame, FrameError, HelloReply, HelloRequest,
    JoinTableRequest, MessageType, PingBody, SubmitActionRequest,
};

const MAX_FRAME_BYTES: usize = 1 << 20;
const MAX_REQUEST_HEAD: usize = 8192;

/// Accepts connections until the listener fails.
pub async fn serve(listener: TcpListener, hub: Arc<Hub>) -> io::Result<()> {
    loop {
        let (stream, peer) = listener.accept().await?;
        debug!("connection from {peer}");
        let hub = hub.clone();
        tokio::spawn(async move {
            if let Err(e) = route(stream, hub).await {
                debug!("connection from {peer} ended: {e}");
            }
        });
    }
}

async fn route(stream: TcpStream, hub: Arc<Hub>) -> io::Result<()> {
    let _ = stream.set_nodelay(true);
    let Some(path) = http_path(&stream).await? else {
        let (sink, source) =
            Framed::new(stream, LinesCodec::new_with_max_length(MAX_FRAME_BYTES)).split();
        run_session(hub, source, sink).await;
        return Ok(());
    };
    if path == "/health" {
        return health(stream, &hub).await;
    }
    let ws = tokio_tungstenite::accept_async(stream)
        .await
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    let (sink, source) = ws.split();
    let source = source.filter_map(|msg| {
        future::ready(match msg {
            Ok(Message::Text(text)) => Some(Ok(text.to_string())),
            Ok(Message::Binary(bytes)) => {
                Some(String::from_utf8(bytes.to_vec()).map_err(|e| e.to_string()))
            }
            Ok(Message::Close(_)) => Some(Err("closed".to_string())),
            Ok(_) => None,
            Err(e) => Some(Err(e.to_string())),
        })
    });
    let sink = sink.with(|text: String| {
        future::ready(Ok::<_, tokio_tungstenite::tungstenite::Error>(
            Message::Text(text),
        ))
    });
    run_session(hub, Box::pin(source), Box::pin(sink)).await;
    Ok(())
}

/// The request path when the client opened with an HTTP `GET`, `None` when
/// it speaks NDJSON. Only peeks, so the bytes stay in the socket.
async fn http_path(stream: &TcpStream) -> io::Result<Option<String>> {
    let mut buf = vec![0u8; MAX_REQUEST_HEAD];
    for _ in 0..400 {
        let n = stream.peek(&mut buf).await?;
        if n == 0 {
            return Ok(None);
        }
        if !b"GET ".starts_with(&buf[..n.min(4)]) {
            return Ok(None);
        }
        if let Some(end) = buf[..n].windows(2).position(|w| w == b"\r\n") {
            let line = String::from_utf8_lossy(&buf[..end]);
            return Ok(line.split_whitespace().nth(1).map(str::to_string));
        }
        if n == buf.len() {
            break;
        }
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
    Err(io::Error::new(
        io::ErrorKind::InvalidData,
        "unreadable request line",
    ))
}

async fn health(mut stream: TcpStream, hub: &Hub) -> io::Result<()> {
    let mut head = Vec::new();
    let mut byte = [0u8; 1];
    while !head.ends_with(b"\r\n\r\n") && head.len() < MAX_REQUEST_HEAD {
        if stream.read(&mut byte).await? == 0 {
            break;
        }
        head.push(byte[0]);
    }
    let body = to_canonical_string(&hub.health()).expect("health holds integers only");
    let response = format!(
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    );
    stream.write_all(response.as_bytes()).await?;
    stream.shutdown().await
}

/// Speaks the protocol over any text stream: Hello first, then requests.
async fn run_session<I, E, O>(hub: Arc<Hub>, mut incoming: I, mut outgoing: O)
where
    I: Stream<Item = Result<String, E>> + Unpin,
    E: Display,
    O: Sink<String> + Unpin,
    O::Error: Display,
{
    let Some(Ok(first)) = incoming.next().await else {
        return;
    };
    let hello = match Frame::decode(&first) {
        Ok(frame) if frame.kind == MessageType::Hello => frame.body::<HelloRequest>(),
        Ok(_) => {
            let _ = outgoing
                .send(Frame::error(codes::EXPECTED_HELLO, "the first frame must be Hello").encode())
                .await;
            return;
        }
        Err(e) => Err(e),
    };
    let hello = match hello {
        Ok(hello) => hello,
        Err(e) => {
            let _ = outgoing
                .send(Frame::error(e.code(), e.to_string()).encode())
                .await;
            return;
        }
    };
    let attached = hub.attach(hello.session_token.as_deref(), hello.name);
    let session = attached.session.clone();
    let mut outbox = attached.outbox;
    let reply = Frame::new(
        MessageType::Hello,
        &HelloReply {
            session_token: session.clone(),
            resumed: attached.resumed,
        },
    );
    if outgoing.send(reply.encode()).await.is_err() {
        hub.detach(&session, attached.connection);
        return;
    }
    loop {
        tokio::select! {
            line = incoming.next() => match line {
                Some(Ok(text)) => {
                    if let Some(frame) = handle(&hub, &session, &text) {
                        hub.deliver([crate::table::Outbound { to: session.clone(), frame }]);
                    }
                }
                Some(Err(e)) => {
                    debug!("session {session}: read failed: {e}");
                    break;
                }
                None => break,
            },
            text = outbox.recv() => match text {
                Some(text) => {
                    if let Err(e) = outgoing.send(text).await {
                        warn!("session {session}: write failed: {e}");
                        break;
                    }
                }
                None => break,
            },
        }
    }
    hub.detach(&session, attached.connection);
}

/// Acts on one client frame. Returns the direct reply, if any; everything
/// else reaches the client through the session outbox.
fn handle(hub: &Arc<Hub>, session: &str, text: &str) -> Option<Frame> {
    let frame = match Frame::decode(text) {
        Ok(frame) => frame,
        Err(e) => return Some(Frame::error(e.code(), e.to_string())),
    };
    let result: Result<Option<Frame>, FrameError> = (|| {
        match frame.kind {
            MessageType::CreateTable => {
                hub.create_table(session, frame.body::<CreateTableRequest>()?)
            }
            MessageType::JoinTable => {
                hub.join_table(session, &frame.body::<JoinTableRequest>()?.table_id)
            }
            MessageType::SubmitAction => match frame.body::<SubmitActionRequest>() {
                Ok(request) => hub.submit(session, &request.table_id, request.action),
                Err(e) => {
                    let body = ActionRejectedBody {
                        table_id: frame.body["table_id"]
                            .as_str()
                            .unwrap_or_default()
                            .to_string(),
                        reason: e.code().to_string(),
                        detail: e.to_string(),
                    };
                    return Ok(Some(Frame::new(MessageType::ActionRejected, &body)));
                }
            },
            MessageType::Ping => {
                return Ok(Some(Frame::new(
                    MessageType::Pong,
                    &frame.body::<PingBody>()?,
                )))
            }
            other => {
                return Ok(Some(Frame::error(
                    codes::UNEXPECTED_MESSAGE,
                    format!("clients do not send {other:?}"),
                )))
            }
        }
        Ok(None)
    })();
    result.unwrap_or_else(|e| Some(Frame::error(e.code(), e.to_string())))
}
