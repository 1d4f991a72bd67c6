//! Service configuration: a TOML file, then `QUILL_*` environment
//! variables on top.
//!
//! ```toml
//! profile = "profiles/ocdm-paratext"
//! data = "data"
//! port = 8080
//! base_iri = "https://w3id.org/quill/data"
//!
//! [auth]
//! mode = "stub"                 # or "orcid"
//! provider_url = "https://orcid.org"
//! client_id = "APP-..."
//! client_secret = "..."
//! redirect_uri = "http://localhost:8080/auth/callback"
//! allow_list = ["https://orcid.org/0000-0002-1825-0097"]
//! session_secret = "..."
//!
//! [[auth.users]]                # stub mode only
//! id = "https://orcid.org/0000-0002-1825-0097"
//! name = "Josiah Carberry"
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid value for {key}: {value:?}")]
    Value { key: &'static str, value: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuthMode {
    Stub,
    Orcid,
}

impl FromStr for AuthMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stub" => Ok(AuthMode::Stub),
            "orcid" => Ok(AuthMode::Orcid),
            other => Err(format!("unknown auth mode {other:?} (expected stub or orcid)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct StubUser {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuthConfig {
    pub mode: AuthMode,
    pub provider_url: String,
    pub client_id: String,
    pub client_secret: String,
    pub redirect_uri: String,
    /// Principal IRIs allowed to sign in. Empty means nobody.
    pub allow_list: Vec<String>,
    /// HMAC key for session cookies; a random key is generated when empty,
    /// which invalidates sessions on restart.
    pub session_secret: String,
    pub users: Vec<StubUser>,
}

impl Default for AuthConfig {
    fn default() -> Self {
        Self {
            mode: AuthMode::Stub,
            provider_url: "https://orcid.org".into(),
            client_id: String::new(),
            client_secret: String::new(),
            redirect_uri: "http://localhost:8080/auth/callback".into(),
            allow_list: Vec::new(),
            session_secret: String::new(),
            users: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub profile: PathBuf,
    /// Store directory; `None` keeps everything in memory.
    pub data: Option<PathBuf>,
    pub port: u16,
    pub base_iri: String,
    /// Compact the journal into the data file after this many writes.
    pub compact_every: u64,
    pub auth: AuthConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            profile: PathBuf::from("profiles/ocdm-paratext"),
            data: Some(PathBuf::from("data")),
            port: 8080,
            base_iri: "https://w3id.org/quill/data".into(),
            compact_every: 200,
            auth: AuthConfig::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// Applies `QUILL_*` overrides read through `lookup`.
    pub fn apply_env(&mut self, lookup: impl Fn(&str) -> Option<String>) -> Result<(), ConfigError> {
        if let Some(v) = lookup("QUILL_PROFILE") {
            self.profile = v.into();
        }
        if let Some(v) = lookup("QUILL_DATA") {
            self.data = (!v.is_empty()).then(|| v.into());
        }
        if let Some(v) = lookup("QUILL_PORT") {
            self.port = v.parse().map_err(|_| ConfigError::Value { key: "QUILL_PORT", value: v })?;
        }
        if let Some(v) = lookup("QUILL_BASE_IRI") {
            self.base_iri = v;
        }
        if let Some(v) = lookup("QUILL_AUTH_MODE") {
            self.auth.mode = v.parse().map_err(|_| ConfigError::Value { key: "QUILL_AUTH_MODE", value: v })?;
        }
        if let Some(v) = lookup("QUILL_PROVIDER_URL") {
            self.auth.provider_url = v;
        }
        if let Some(v) = lookup("QUILL_CLIENT_ID") {
            self.auth.client_id = v;
        }
        if let Some(v) = lookup("QUILL_CLIENT_SECRET") {
            self.auth.client_secret = v;
        }
        if let Some(v) = lookup("QUILL_REDIRECT_URI") {
            self.auth.redirect_uri = v;
        }
        if let Some(v) = lookup("QUILL_ALLOW_LIST") {
            self.auth.allow_list = v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_owned).collect();
        }
        if let Some(v) = lookup("QUILL_SESSION_SECRET") {
            self.auth.session_secret = v;
        }
        Ok(())
    }

    pub fn apply_process_env(&mut self) -> Result<(), ConfigError> {
        self.apply_env(|k| std::env::var(k).ok())
    }

    pub fn base(&self) -> &str {
        self.base_iri.trim_end_matches('/')
    }
}
