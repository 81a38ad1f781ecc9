use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use chefs_hat::agents::AGENT_NAMES;
use chefs_hat::RuleConfig;
use chefs_hat_server::{net, Hub, ServerConfig};
use clap::Parser;
use log::{error, info};
use tokio::net::TcpListener;

/// Hosts Chef's Hat tables over NDJSON/TCP and WebSocket on one port.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "CHEFSHAT_SERVE_BIND", default_value = "127.0.0.1:7878")]
    bind: String,
    /// Directory for finished match logs.
    #[arg(long, env = "CHEFSHAT_SERVE_LOGS", default_value = "logs")]
    logs: PathBuf,
    /// Default seconds per turn; 0 disables the timer.
    #[arg(long, env = "CHEFSHAT_SERVE_TURN_TIMER", default_value_t = 30)]
    turn_timer: u64,
    /// JSON rules file used by tables that bring no rules of their own.
    #[arg(long, env = "CHEFSHAT_SERVE_RULES")]
    rules: Option<PathBuf>,
    /// Seconds a disconnected player keeps the seat.
    #[arg(long, env = "CHEFSHAT_SERVE_RECONNECT_GRACE", default_value_t = 60)]
    reconnect_grace: u64,
    /// Bot that takes over abandoned seats.
    #[arg(long, env = "CHEFSHAT_SERVE_FALLBACK_AGENT", default_value = "random",
          value_parser = clap::builder::PossibleValuesParser::new(AGENT_NAMES))]
    fallback_agent: String,
}

#[tokio::main]
async fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = Args::parse();
    let rule_config = match &args.rules {
        None => RuleConfig::default(),
        Some(path) => match std::fs::read_to_string(path)
            .map_err(|e| e.to_string())
            .and_then(|text| RuleConfig::from_json(&text).map_err(|e| e.to_string()))
        {
            Ok(rules) => rules,
            Err(e) => {
                error!("cannot load rules from {}: {e}", path.display());
                return ExitCode::from(1);
            }
        },
    };
    let config = ServerConfig {
        rule_config,
        turn_timer: (args.turn_timer > 0).then(|| Duration::from_secs(args.turn_timer)),
        log_dir: Some(args.logs),
        reconnect_grace: Duration::from_secs(args.reconnect_grace),
        fallback_agent: args.fallback_agent,
    };
    let listener = match TcpListener::bind(&args.bind).await {
        Ok(listener) => listener,
        Err(e) => {
            error!("cannot bind {}: {e}", args.bind);
            return ExitCode::from(1);
        }
    };
    info!("listening on {}", args.bind);
    match net::serve(listener, Hub::new(config)).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("server stopped: {e}");
            ExitCode::from(1)
        }
    }
}
