use std::net::SocketAddr;
use std::path::PathBuf;

use clap::Parser;

/// Every option can also be set through the environment variable shown.
#[derive(Debug, Clone, Parser)]
#[command(name = "tlx-server", version, about = "NASA-TLX experiment service")]
pub struct Config {
    /// Address to listen on.
    #[arg(long, env = "TLX_LISTEN", default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,

    /// Directory holding experiment files; created if missing.
    #[arg(long, env = "TLX_DATA_DIR", default_value = "data")]
    pub data_dir: PathBuf,

    /// Bearer token for experimenter routes. Required.
    #[arg(long, env = "TLX_ADMIN_TOKEN", hide_env_values = true, value_parser = non_empty)]
    pub admin_token: String,

    /// Built web UI assets served at `/`.
    #[arg(long, env = "TLX_STATIC_DIR", default_value = "web/dist")]
    pub static_dir: PathBuf,
}

fn non_empty(s: &str) -> Result<String, String> {
    if s.trim().is_empty() {
        Err("admin token must not be empty".into())
    } else {
        Ok(s.to_owned())
    }
}
