//! Identity providers for the authorization-code sign-in flow.

use std::collections::BTreeSet;
use std::future::Future;
use std::pin::Pin;

use quill_core::rdf::is_absolute_iri;
use serde::{Deserialize, Serialize};

use crate::config::{AuthConfig, AuthMode, StubUser};

pub const ORCID_IRI_PREFIX: &str = "https://orcid.org/";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Principal {
    pub id: String,
    pub display_name: String,
}

#[derive(Debug, thiserror::Error)]
pub enum AuthError {
    #[error("invalid authorization code")]
    InvalidCode,
    #[error("identity provider error: {0}")]
    Provider(String),
    #[error("{0} is not a valid identity")]
    InvalidIdentity(String),
    #[error("{0} is not allowed to sign in")]
    NotAllowed(String),
}

pub type BoxFuture<'a, T> = Pin<Box<dyn Future<Output = T> + Send + 'a>>;

/// One sign-in backend. `authorize_url` is where the browser is sent;
/// the provider later redirects back with a code for `exchange`.
pub trait IdentityProvider: Send + Sync {
    fn mode(&self) -> AuthMode;
    fn authorize_url(&self, state: &str, hint: Option<&str>) -> String;
    fn exchange<'a>(&'a self, code: &'a str) -> BoxFuture<'a, Result<Principal, AuthError>>;
}

/// `XXXX-XXXX-XXXX-XXXX` with a valid ISO 7064 11-2 check character.
pub fn is_orcid_id(id: &str) -> bool {
    let b = id.as_bytes();
    let shaped = b.len() == 19
        && b.iter().enumerate().all(|(i, &c)| match i {
            4 | 9 | 14 => c == b'-',
            18 => c.is_ascii_digit() || c == b'X',
            _ => c.is_ascii_digit(),
        });
    if !shaped {
        return false;
    }
    let total = b[..18]
        .iter()
        .filter(|c| c.is_ascii_digit())
        .fold(0u32, |acc, c| (acc + u32::from(c - b'0')) * 2);
    let check = (12 - total % 11) % 11;
    let expected = if check == 10 { b'X' } else { b'0' + check as u8 };
    b[18] == expected
}

pub fn is_orcid_iri(iri: &str) -> bool {
    iri.strip_prefix(ORCID_IRI_PREFIX).is_some_and(is_orcid_id)
}

fn query_escape(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

/// Local user table for development and tests. The code handed to the
/// callback is the user's id.
#[derive(Debug, Clone)]
pub struct StubProvider {
    users: Vec<StubUser>,
}

impl StubProvider {
    pub fn new(users: Vec<StubUser>) -> Self {
        Self { users }
    }
}

impl IdentityProvider for StubProvider {
    fn mode(&self) -> AuthMode {
        AuthMode::Stub
    }

    fn authorize_url(&self, state: &str, hint: Option<&str>) -> String {
        let user = hint.or(self.users.first().map(|u| u.id.as_str())).unwrap_or("");
        format!("/auth/callback?code={}&state={}", query_escape(user), query_escape(state))
    }

    fn exchange<'a>(&'a self, code: &'a str) -> BoxFuture<'a, Result<Principal, AuthError>> {
        Box::pin(async move {
            let user = self.users.iter().find(|u| u.id == code).ok_or(AuthError::InvalidCode)?;
            if !is_absolute_iri(&user.id) {
                return Err(AuthError::InvalidIdentity(user.id.clone()));
            }
            Ok(Principal {
                id: user.id.clone(),
                display_name: user.name.clone(),
            })
        })
    }
}

/// ORCID OAuth client: `/oauth/authorize` and `/oauth/token` under the
/// configured provider URL.
#[derive(Debug, Clone)]
pub struct OrcidProvider {
    http: reqwest::Client,
    base: String,
    client_id: String,
    client_secret: String,
    redirect_uri: String,
}

#[derive(Deserialize)]
struct TokenResponse {
    orcid: String,
    #[serde(default)]
    name: Option<String>,
}

impl OrcidProvider {
    pub fn new(config: &AuthConfig) -> Self {
        Self {
            http: reqwest::Client::new(),
            base: config.provider_url.trim_end_matches('/').to_owned(),
            client_id: config.client_id.clone(),
            client_secret: config.client_secret.clone(),
            redirect_uri: config.redirect_uri.clone(),
        }
    }
}

impl IdentityProvider for OrcidProvider {
    fn mode(&self) -> AuthMode {
        AuthMode::Orcid
    }

    fn authorize_url(&self, state: &str, _hint: Option<&str>) -> String {
        format!(
            "{}/oauth/authorize?client_id={}&response_type=code&scope=%2Fauthenticate&redirect_uri={}&state={}",
            self.base,
            query_escape(&self.client_id),
            query_escape(&self.redirect_uri),
            query_escape(state)
        )
    }

    fn exchange<'a>(&'a self, code: &'a str) -> BoxFuture<'a, Result<Principal, AuthError>> {
        Box::pin(async move {
            let response = self
                .http
                .post(format!("{}/oauth/token", self.base))
                .header(reqwest::header::ACCEPT, "application/json")
                .form(&[
                    ("client_id", self.client_id.as_str()),
                    ("client_secret", self.client_secret.as_str()),
                    ("grant_type", "authorization_code"),
                    ("code", code),
                    ("redirect_uri", self.redirect_uri.as_str()),
                ])
                .send()
                .await
                .map_err(|e| AuthError::Provider(e.to_string()))?;
            let status = response.status();
            if status.is_client_error() {
                return Err(AuthError::InvalidCode);
            }
            if !status.is_success() {
                return Err(AuthError::Provider(format!("token endpoint returned {status}")));
            }
            let token: TokenResponse = response.json().await.map_err(|e| AuthError::Provider(e.to_string()))?;
            if !is_orcid_id(&token.orcid) {
                return Err(AuthError::InvalidIdentity(token.orcid));
            }
            Ok(Principal {
                id: format!("{ORCID_IRI_PREFIX}{}", token.orcid),
                display_name: token.name.unwrap_or_else(|| token.orcid.clone()),
            })
        })
    }
}

pub fn provider_for(config: &AuthConfig) -> Box<dyn IdentityProvider> {
    match config.mode {
        AuthMode::Stub => Box::new(StubProvider::new(config.users.clone())),
        AuthMode::Orcid => Box::new(OrcidProvider::new(config)),
    }
}

#[derive(Debug, Clone, Default)]
pub struct AllowList(BTreeSet<String>);

impl AllowList {
    pub fn new(ids: impl IntoIterator<Item = String>) -> Self {
        Self(ids.into_iter().collect())
    }

    pub fn check(&self, principal: &Principal) -> Result<(), AuthError> {
        if self.0.contains(&principal.id) {
            Ok(())
        } else {
            Err(AuthError::NotAllowed(principal.id.clone()))
        }
    }
}
