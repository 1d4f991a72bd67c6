//! HMAC-signed cookies carrying the session principal and the OAuth state.
//!
//! A cookie value is `base64url(json payload) "." base64url(hmac-sha256)`.

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use chrono::{DateTime, Duration, Utc};
use hmac::{Hmac, Mac};
use rand::Rng;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::Sha256;

use crate::auth::Principal;

pub const SESSION_COOKIE: &str = "quill_session";
pub const STATE_COOKIE: &str = "quill_oauth_state";

const SESSION_TTL_HOURS: i64 = 12;
const STATE_TTL_MINUTES: i64 = 10;

#[derive(Clone)]
pub struct SessionKeys {
    key: Vec<u8>,
}

impl std::fmt::Debug for SessionKeys {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SessionKeys(..)")
    }
}

#[derive(Serialize, Deserialize)]
struct Signed<T> {
    exp: i64,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize, Deserialize)]
struct State {
    state: String,
}

impl SessionKeys {
    /// Uses `secret` as the key, or 32 random bytes when it is empty.
    pub fn new(secret: &str) -> Self {
        let key = if secret.is_empty() {
            tracing::warn!("no session secret configured; sessions will not survive a restart");
            rand::rng().random::<[u8; 32]>().to_vec()
        } else {
            secret.as_bytes().to_vec()
        };
        Self { key }
    }

    fn mac(&self) -> Hmac<Sha256> {
        Hmac::<Sha256>::new_from_slice(&self.key).expect("hmac accepts any key length")
    }

    fn sign<T: Serialize>(&self, body: T, expires: DateTime<Utc>) -> String {
        let payload = serde_json::to_vec(&Signed { exp: expires.timestamp(), body }).expect("serializable");
        let payload = URL_SAFE_NO_PAD.encode(payload);
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        format!("{payload}.{}", URL_SAFE_NO_PAD.encode(mac.finalize().into_bytes()))
    }

    fn verify<T: DeserializeOwned>(&self, value: &str, now: DateTime<Utc>) -> Option<T> {
        let (payload, sig) = value.split_once('.')?;
        let sig = URL_SAFE_NO_PAD.decode(sig).ok()?;
        let mut mac = self.mac();
        mac.update(payload.as_bytes());
        mac.verify_slice(&sig).ok()?;
        let signed: Signed<T> = serde_json::from_slice(&URL_SAFE_NO_PAD.decode(payload).ok()?).ok()?;
        (signed.exp > now.timestamp()).then_some(signed.body)
    }

    pub fn issue_session(&self, principal: &Principal, now: DateTime<Utc>) -> String {
        self.sign(principal, now + Duration::hours(SESSION_TTL_HOURS))
    }

    pub fn read_session(&self, value: &str, now: DateTime<Utc>) -> Option<Principal> {
        self.verify(value, now)
    }

    /// A fresh random state value and its signed cookie.
    pub fn issue_state(&self, now: DateTime<Utc>) -> (String, String) {
        let state = URL_SAFE_NO_PAD.encode(rand::rng().random::<[u8; 16]>());
        let cookie = self.sign(State { state: state.clone() }, now + Duration::minutes(STATE_TTL_MINUTES));
        (state, cookie)
    }

    pub fn check_state(&self, cookie: &str, state: &str, now: DateTime<Utc>) -> bool {
        self.verify::<State>(cookie, now).is_some_and(|s| s.state == state)
    }
}

/// `Set-Cookie` value for a session-scoped, HTTP-only cookie.
pub fn set_cookie(name: &str, value: &str, max_age_secs: i64) -> String {
    format!("{name}={value}; Path=/; HttpOnly; SameSite=Lax; Max-Age={max_age_secs}")
}

pub fn session_max_age() -> i64 {
    SESSION_TTL_HOURS * 3600
}

pub fn state_max_age() -> i64 {
    STATE_TTL_MINUTES * 60
}

/// Finds a cookie in a `Cookie` request header.
pub fn cookie_value<'a>(header: &'a str, name: &str) -> Option<&'a str> {
    header
        .split(';')
        .filter_map(|c| c.trim().split_once('='))
        .find(|(k, _)| *k == name)
        .map(|(_, v)| v)
}
