//! Stateless HTTP service over trained networks.
//!
//! Clients hold all game state; every request is answered from the immutable
//! models loaded at startup.

mod api;

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::Router;
use mcnn::nn::{load_model, Network};
use serde::Deserialize;
use tower_http::cors::CorsLayer;
use tower_http::services::ServeDir;

pub use api::ApiError;

pub const TICTACTOE_MODEL: &str = "tictactoe";
pub const TEXT_MODEL: &str = "text";

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("model {name:?}: {source}")]
    Model { name: String, source: mcnn::Error },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind_address: String,
    #[serde(default)]
    pub model_paths: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub static_dir: Option<PathBuf>,
    #[serde(default)]
    pub allow_cross_origin: bool,
}

impl ServiceConfig {
    /// Reads a JSON config. Relative model and static paths are resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let bytes = std::fs::read(path).map_err(|source| ServiceError::Io { path: path.into(), source })?;
        let mut cfg: Self = serde_json::from_slice(&bytes).map_err(|e| ServiceError::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in cfg.model_paths.values_mut() {
            *p = base.join(&*p);
        }
        if let Some(dir) = cfg.static_dir.as_mut() {
            *dir = base.join(&*dir);
        }
        Ok(cfg)
    }
}

/// Models shared by all requests.
#[derive(Debug, Default)]
pub struct AppState {
    models: BTreeMap<String, Network>,
}

impl AppState {
    pub fn new(models: BTreeMap<String, Network>) -> Self {
        Self { models }
    }

    pub fn load(paths: &BTreeMap<String, PathBuf>) -> Result<Self, ServiceError> {
        let mut models = BTreeMap::new();
        for (name, path) in paths {
            let bytes = std::fs::read(path).map_err(|source| ServiceError::Io { path: path.clone(), source })?;
            let net = load_model(&bytes).map_err(|source| ServiceError::Model { name: name.clone(), source })?;
            models.insert(name.clone(), net);
        }
        Ok(Self { models })
    }

    pub fn model_names(&self) -> Vec<String> {
        self.models.keys().cloned().collect()
    }

    pub fn model(&self, name: &str) -> Option<&Network> {
        self.models.get(name)
    }
}

pub fn router(state: Arc<AppState>, static_dir: Option<&Path>, allow_cross_origin: bool) -> Router {
    let mut app = api::routes().with_state(state);
    if let Some(dir) = static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }
    if allow_cross_origin {
        app = app.layer(CorsLayer::permissive());
    }
    app
}

pub fn build(config: &ServiceConfig) -> Result<Router, ServiceError> {
    if let Some(dir) = &config.static_dir {
        if !dir.is_dir() {
            return Err(ServiceError::Config(format!("static_dir {} is not a directory", dir.display())));
        }
    }
    let state = Arc::new(AppState::load(&config.model_paths)?);
    Ok(router(state, config.static_dir.as_deref(), config.allow_cross_origin))
}

/// Binds and serves until the process is interrupted.
pub async fn serve(config: &ServiceConfig) -> Result<(), ServiceError> {
    let app = build(config)?;
    let addr: SocketAddr = config
        .bind_address
        .parse()
        .map_err(|e| ServiceError::Config(format!("bind_address {:?}: {e}", config.bind_address)))?;
    let io = |source| ServiceError::Io { path: PathBuf::from(&config.bind_address), source };
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(io)?;
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(io)
}
