use clap::Parser;
use tlx_core::store::Store;
use tlx_server::{app, AppState, Config};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();

    let config = Config::parse();
    let store = Store::open(&config.data_dir)?;
    tracing::info!(
        data_dir = %config.data_dir.display(),
        experiments = store.list_experiments().len(),
        "store opened"
    );

    let state = AppState::new(store, config.admin_token.as_str());
    let router = app(state, Some(&config.static_dir));
    let listener = tokio::net::TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
