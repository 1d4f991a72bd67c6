//! HTTP/JSON service over a quill store: form schemas, validated entity
//! writes with provenance, history, diff and restore, and sign-in.

pub mod api;
pub mod auth;
pub mod config;
pub mod document;
pub mod problem;
pub mod service;
pub mod session;

use std::future::Future;
use std::net::SocketAddr;
use std::sync::Arc;

use quill_core::profile::{load_profile, ProfileError};
use quill_core::store::{QuadStore, StoreError};
use quill_core::versioning::{Clock, SystemClock, VersionError};

pub use api::{router, AppState, Shared};
pub use config::Config;
pub use service::Curator;

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("cannot open store: {0}")]
    Store(#[from] StoreError),
    #[error("cannot rebuild histories: {0}")]
    Version(#[from] VersionError),
    #[error("cannot listen: {0}")]
    Io(#[from] std::io::Error),
}

/// Loads the profile and opens the store named by `config`.
pub fn open_curator(config: &Config, clock: Arc<dyn Clock>) -> Result<Curator, StartupError> {
    let profile = Arc::new(load_profile(&config.profile)?);
    let store = match &config.data {
        Some(dir) => QuadStore::open(dir)?,
        None => QuadStore::in_memory(),
    };
    Ok(Curator::new(profile, Arc::new(store), clock, config.base())?.with_compaction(config.compact_every))
}

pub fn build_state(config: &Config, curator: Arc<Curator>) -> Shared {
    Arc::new(AppState {
        curator,
        provider: auth::provider_for(&config.auth),
        allow: auth::AllowList::new(config.auth.allow_list.iter().cloned()),
        keys: session::SessionKeys::new(&config.auth.session_secret),
    })
}

/// Serves until `shutdown` resolves, then compacts the journal.
pub async fn serve(config: Config, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), StartupError> {
    let curator = Arc::new(open_curator(&config, Arc::new(SystemClock))?);
    let app = router(build_state(&config, curator.clone()));
    let addr = SocketAddr::from(([0, 0, 0, 0], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    curator.persist()?;
    Ok(())
}
