//! Sessions, table actors and frame routing.
//!
//! Each table runs in its own task that owns the [`Table`] and reads one
//! mailbox. Client requests and timer ticks both arrive through that mailbox,
//! so table state is only ever touched from one place. Connections hold an
//! outbox per session; tables address frames to sessions, never to sockets,
//! which is what lets a reconnecting client pick up where it left off.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use chefs_hat::RuleConfig;
use log::{debug, info};
use serde::Serialize;
use tokio::sync::mpsc;
use uuid::Uuid;

use crate::protocol::{
    codes, ActionRejectedBody, CreateTableRequest, Frame, MessageType, SubmittedAction, TableStatus,
};
use crate::table::{Outbound, SessionId, Table, TableSettings};

#[derive(Clone, Debug)]
pub struct ServerConfig {
    /// Rules for tables that do not bring their own.
    pub rule_config: RuleConfig,
    /// Turn timer for tables that do not set one; `None` disables it.
    pub turn_timer: Option<Duration>,
    pub log_dir: Option<PathBuf>,
    pub reconnect_grace: Duration,
    pub fallback_agent: String,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            rule_config: RuleConfig::default(),
            turn_timer: Some(Duration::from_secs(30)),
            log_dir: None,
            reconnect_grace: Duration::from_secs(60),
            fallback_agent: "random".into(),
        }
    }
}

enum TableMsg {
    Open {
        creator: SessionId,
    },
    Join {
        session: SessionId,
        name: String,
    },
    Submit {
        session: SessionId,
        action: SubmittedAction,
    },
    Disconnect {
        session: SessionId,
    },
    Reconnect {
        session: SessionId,
    },
    Tick,
}

struct TableHandle {
    mailbox: mpsc::UnboundedSender<TableMsg>,
    status: Arc<Mutex<TableStatus>>,
}

struct Session {
    name: String,
    /// Outbox of the live connection, with that connection's id.
    outbox: Option<(u64, mpsc::UnboundedSender<String>)>,
    tables: Vec<String>,
}

/// Table counts reported by the health endpoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Health {
    pub lobby: usize,
    pub playing: usize,
    pub finished: usize,
    pub tables: usize,
    pub sessions: usize,
}

pub struct Hub {
    config: ServerConfig,
    sessions: Mutex<HashMap<SessionId, Session>>,
    tables: Mutex<HashMap<String, TableHandle>>,
    next_connection: Mutex<u64>,
}

/// A connection's hold on a session.
pub struct Attached {
    pub session: SessionId,
    pub resumed: bool,
    pub connection: u64,
    pub outbox: mpsc::UnboundedReceiver<String>,
}

impl Hub {
    pub fn new(config: ServerConfig) -> Arc<Self> {
        Arc::new(Self {
            config,
            sessions: Mutex::new(HashMap::new()),
            tables: Mutex::new(HashMap::new()),
            next_connection: Mutex::new(0),
        })
    }

    pub fn config(&self) -> &ServerConfig {
        &self.config
    }

    pub fn health(&self) -> Health {
        let mut health = Health {
            sessions: self.sessions.lock().unwrap().len(),
            ..Health::default()
        };
        for handle in self.tables.lock().unwrap().values() {
            health.tables += 1;
            match *handle.status.lock().unwrap() {
                TableStatus::Lobby => health.lobby += 1,
                TableStatus::Playing => health.playing += 1,
                TableStatus::Finished => health.finished += 1,
            }
        }
        health
    }

    /// Binds a connection to a session, resuming `token` when it is known.
    /// A previous connection of the same session loses its outbox.
    pub fn attach(self: &Arc<Self>, token: Option<&str>, name: Option<String>) -> Attached {
        let connection = {
            let mut next = self.next_connection.lock().unwrap();
            *next += 1;
            *next
        };
        let (tx, rx) = mpsc::unbounded_channel();
        let mut sessions = self.sessions.lock().unwrap();
        let known = token
            .filter(|t| sessions.contains_key(*t))
            .map(str::to_string);
        let resumed = known.is_some();
        let session = known.unwrap_or_else(|| Uuid::new_v4().simple().to_string());
        let entry = sessions.entry(session.clone()).or_insert_with(|| Session {
            name: name.clone().unwrap_or_else(|| "player".into()),
            outbox: None,
            tables: Vec::new(),
        });
        if let Some(name) = name {
            entry.name = name;
        }
        entry.outbox = Some((connection, tx));
        let tables = entry.tables.clone();
        drop(sessions);
        if resumed {
            info!("session {session} resumed");
            for table in tables {
                self.send_to_table(
                    &table,
                    TableMsg::Reconnect {
                        session: session.clone(),
                    },
                );
            }
        }
        Attached {
            session,
            resumed,
            connection,
            outbox: rx,
        }
    }

    /// Releases the session's outbox if `connection` still holds it and
    /// tells its tables the player is gone.
    pub fn detach(&self, session: &str, connection: u64) {
        let tables = {
            let mut sessions = self.sessions.lock().unwrap();
            let Some(entry) = sessions.get_mut(session) else {
                return;
            };
            if entry.outbox.as_ref().map(|(c, _)| *c) != Some(connection) {
                return;
            }
            entry.outbox = None;
            entry.tables.clone()
        };
        debug!("session {session} disconnected");
        for table in tables {
            self.send_to_table(
                &table,
                TableMsg::Disconnect {
                    session: session.to_string(),
                },
            );
        }
    }

    /// Queues a frame for a session; dropped when it has no live connection.
    pub fn deliver(&self, outbound: impl IntoIterator<Item = Outbound>) {
        let sessions = self.sessions.lock().unwrap();
        for Outbound { to, frame } in outbound {
            if let Some((_, tx)) = sessions.get(&to).and_then(|s| s.outbox.as_ref()) {
                let _ = tx.send(frame.encode());
            }
        }
    }

    fn reply(&self, session: &str, frame: Frame) {
        self.deliver([Outbound {
            to: session.to_string(),
            frame,
        }]);
    }

    pub fn create_table(self: &Arc<Self>, session: &str, request: CreateTableRequest) {
        let turn_timer = match request.turn_timer_ms {
            Some(0) => None,
            Some(ms) => Some(Duration::from_millis(ms)),
            None => self.config.turn_timer,
        };
        let settings = TableSettings {
            rule_config: request
                .rule_config
                .unwrap_or_else(|| self.config.rule_config.clone()),
            bots: request.bots,
            turn_timer,
            seed: request
                .seed
                .unwrap_or_else(|| Uuid::new_v4().as_u64_pair().0),
            reconnect_grace: self.config.reconnect_grace,
            fallback_agent: self.config.fallback_agent.clone(),
            log_dir: self.config.log_dir.clone(),
        };
        let id = Uuid::new_v4().simple().to_string();
        let table = match Table::new(id.clone(), settings) {
            Ok(table) => table,
            Err(e) => return self.reply(session, Frame::error(e.code(), e.to_string())),
        };
        info!("table {id} created by {session}");
        let (tx, rx) = mpsc::unbounded_channel();
        let status = Arc::new(Mutex::new(TableStatus::Lobby));
        self.tables.lock().unwrap().insert(
            id.clone(),
            TableHandle {
                mailbox: tx,
                status: status.clone(),
            },
        );
        tokio::spawn(run_table(self.clone(), table, rx, status));
        self.send_to_table(
            &id,
            TableMsg::Open {
                creator: session.to_string(),
            },
        );
    }

    pub fn join_table(&self, session: &str, table_id: &str) {
        let name = self
            .sessions
            .lock()
            .unwrap()
            .get(session)
            .map_or_else(|| "player".into(), |s| s.name.clone());
        let msg = TableMsg::Join {
            session: session.to_string(),
            name,
        };
        if !self.send_to_table(table_id, msg) {
            self.reply(
                session,
                Frame::error(codes::UNKNOWN_TABLE, format!("no table {table_id}")),
            );
        }
    }

    pub fn submit(&self, session: &str, table_id: &str, action: SubmittedAction) {
        let msg = TableMsg::Submit {
            session: session.to_string(),
            action,
        };
        if !self.send_to_table(table_id, msg) {
            let body = ActionRejectedBody {
                table_id: table_id.to_string(),
                reason: codes::UNKNOWN_TABLE.into(),
                detail: format!("no table {table_id}"),
            };
            self.reply(session, Frame::new(MessageType::ActionRejected, &body));
        }
    }

    fn send_to_table(&self, table_id: &str, msg: TableMsg) -> bool {
        self.tables
            .lock()
            .unwrap()
            .get(table_id)
            .is_some_and(|h| h.mailbox.send(msg).is_ok())
    }

    fn remember_seat(&self, session: &str, table_id: &str) {
        if let Some(entry) = self.sessions.lock().unwrap().get_mut(session) {
            if !entry.tables.iter().any(|t| t == table_id) {
                entry.tables.push(table_id.to_string());
            }
        }
    }
}

async fn run_table(
    hub: Arc<Hub>,
    mut table: Table,
    mut mailbox: mpsc::UnboundedReceiver<TableMsg>,
    status: Arc<Mutex<TableStatus>>,
) {
    loop {
        let msg = match table.next_wakeup() {
            Some(at) => tokio::select! {
                msg = mailbox.recv() => msg,
                _ = tokio::time::sleep_until(at.into()) => Some(TableMsg::Tick),
            },
            None => mailbox.recv().await,
        };
        let Some(msg) = msg else { break };
        let now = Instant::now();
        let out = match msg {
            TableMsg::Open { creator } => table.open(&creator, now),
            TableMsg::Join { session, name } => match table.join(&session, &name, now) {
                Ok(out) => {
                    hub.remember_seat(&session, table.id());
                    out
                }
                Err((code, detail)) => vec![Outbound {
                    to: session,
                    frame: Frame::error(code, detail),
                }],
            },
            TableMsg::Submit { session, action } => table.submit(&session, action, now),
            TableMsg::Disconnect { session } => table.disconnect(&session, now),
            TableMsg::Reconnect { session } => table.reconnect(&session, now),
            TableMsg::Tick => table.timeout_tick(now),
        };
        *status.lock().unwrap() = table.status();
        hub.deliver(out);
    }
}
