//! HTTP/JSON facade over the projection engine.
//!
//! Routes, all under `/api/v1`:
//!
//! - `POST /project`: a [`pensionlab_core::ProjectionRequest`] in, a
//!   [`pensionlab_core::ProjectionResult`] out.
//! - `POST /sweep[?format=csv]`: a [`pensionlab_core::SweepSpec`] in, a
//!   sweep table out as JSON or RFC 4180 CSV.
//! - `GET|POST /scenarios`, `GET|PUT|DELETE /scenarios/{id}`: saved
//!   scenarios with optimistic concurrency on `updated_at`.
//!
//! Validation failures answer 400, model failures 422, unknown scenarios
//! 404 and stale updates 409.

pub mod api;
pub mod store;

use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;

pub use api::{router, AppState, ErrorBody};
pub use store::{NewScenario, SavedScenario, ScenarioStore, ScenarioUpdate, StoreError};

pub const ADDR_ENV: &str = "PENSIONLAB_ADDR";
pub const DATA_ENV: &str = "PENSIONLAB_DATA";
pub const DEFAULT_ADDR: &str = "127.0.0.1:8080";
pub const DEFAULT_DATA: &str = "pensionlab-scenarios.jsonl";

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub addr: SocketAddr,
    pub data_path: PathBuf,
}

impl ServiceConfig {
    pub fn from_env() -> Result<Self, String> {
        let addr = std::env::var(ADDR_ENV).unwrap_or_else(|_| DEFAULT_ADDR.to_string());
        let addr = addr
            .parse()
            .map_err(|e| format!("{ADDR_ENV}=`{addr}`: {e}"))?;
        let data_path = std::env::var_os(DATA_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA));
        Ok(ServiceConfig { addr, data_path })
    }
}

/// Serves on an already-bound listener until the future is dropped.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> io::Result<()> {
    axum::serve(listener, router(state)).await
}

pub async fn run(config: ServiceConfig) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let store = ScenarioStore::open(&config.data_path)?;
    let listener = tokio::net::TcpListener::bind(config.addr).await?;
    eprintln!(
        "pensionlab service listening on http://{} (data: {})",
        listener.local_addr()?,
        config.data_path.display()
    );
    serve(listener, AppState::new(store)).await?;
    Ok(())
}
