//! Networked Chef's Hat tables.
//!
//! Humans and bots share tables; every match runs through the same
//! [`MatchDriver`](chefs_hat::driver::MatchDriver) as the simulator, so a
//! table of four bots produces the simulator's log byte for byte. Each client
//! only ever receives the view of its own seat.

pub mod client;
pub mod hub;
pub mod net;
pub mod protocol;
pub mod table;

use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use tokio::net::TcpListener;
use tokio::task::JoinHandle;

pub use hub::{Health, Hub, ServerConfig};
pub use protocol::{Frame, MessageType, PROTOCOL_VERSION};

/// Binds `addr` and serves in the background. Returns the bound address,
/// which matters when `addr` asks for port 0.
pub async fn spawn(
    addr: &str,
    config: ServerConfig,
) -> io::Result<(SocketAddr, Arc<Hub>, JoinHandle<io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let hub = Hub::new(config);
    let task = tokio::spawn(net::serve(listener, hub.clone()));
    Ok((local, hub, task))
}
