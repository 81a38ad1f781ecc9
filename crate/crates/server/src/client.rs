//! A minimal NDJSON client, for bots and tooling that talk to a server.

use std::io;

use futures_util::{SinkExt, StreamExt};
use serde::Serialize;
use tokio::net::{TcpStream, ToSocketAddrs};
use tokio_util::codec::{Framed, LinesCodec};

use crate::protocol::{Frame, HelloReply, HelloRequest, MessageType};

pub struct Client {
    lines: Framed<TcpStream, LinesCodec>,
}

impl Client {
    pub async fn connect(addr: impl ToSocketAddrs) -> io::Result<Self> {
        let stream = TcpStream::connect(addr).await?;
        stream.set_nodelay(true)?;
        Ok(Self {
            lines: Framed::new(stream, LinesCodec::new()),
        })
    }

    /// Connects and says Hello, resuming `token` when given.
    pub async fn hello(addr: impl ToSocketAddrs, token: Option<String>, name: &str) -> io::Result<(Self, HelloReply)> {
        let mut client = Self::connect(addr).await?;
        let request = HelloRequest {
            session_token: token,
            name: Some(name.to_string()),
        };
        client.send(MessageType::Hello, &request).await?;
        let frame = client.recv().await?.ok_or_else(|| invalid("closed before Hello"))?;
        if frame.kind != MessageType::Hello {
            return Err(invalid(&format!("expected Hello, got {}", frame.encode())));
        }
        let reply = frame.body().map_err(|e| invalid(&e.to_string()))?;
        Ok((client, reply))
    }

    pub async fn send<T: Serialize>(&mut self, kind: MessageType, body: &T) -> io::Result<()> {
        self.send_raw(Frame::new(kind, body).encode()).await
    }

    /// Sends one line as is, valid frame or not.
    pub async fn send_raw(&mut self, line: String) -> io::Result<()> {
        self.lines.send(line).await.map_err(|e| invalid(&e.to_string()))
    }

    /// The next frame, or `None` once the server closes the connection.
    pub async fn recv(&mut self) -> io::Result<Option<Frame>> {
        match self.lines.next().await {
            None => Ok(None),
            Some(Err(e)) => Err(invalid(&e.to_string())),
            Some(Ok(line)) => serde_json::from_str(&line).map(Some).map_err(|e| invalid(&e.to_string())),
        }
    }
}

fn invalid(detail: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, detail.to_string())
}
