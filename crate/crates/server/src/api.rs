//! Route table and handlers.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::Utc;
use quill_core::rdf::is_absolute_iri;
use quill_core::versioning::{delta_json, SnapshotRecord, Source};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::auth::{AllowList, IdentityProvider, Principal};
use crate::document::{EntityDocument, Fields};
use crate::problem::Problem;
use crate::service::Curator;
use crate::session::{
    cookie_value, session_max_age, set_cookie, state_max_age, SessionKeys, SESSION_COOKIE, STATE_COOKIE,
};

pub struct AppState {
    pub curator: Arc<Curator>,
    pub provider: Box<dyn IdentityProvider>,
    pub allow: AllowList,
    pub keys: SessionKeys,
}

pub type Shared = Arc<AppState>;

/// Every route the service answers, as (method, path) pairs.
pub const ROUTES: &[(&str, &str)] = &[
    ("GET", "/api/schema"),
    ("GET", "/api/vocabulary"),
    ("GET", "/api/entities"),
    ("POST", "/api/entities"),
    ("GET", "/api/entities/{id}"),
    ("PUT", "/api/entities/{id}"),
    ("DELETE", "/api/entities/{id}"),
    ("GET", "/api/entities/{id}/history"),
    ("GET", "/api/entities/{id}/version/{n}"),
    ("GET", "/api/entities/{id}/diff/{i}/{j}"),
    ("POST", "/api/entities/{id}/restore/{n}"),
    ("GET", "/auth/login"),
    ("GET", "/auth/callback"),
    ("POST", "/auth/logout"),
    ("GET", "/auth/session"),
];

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/schema", get(schema))
        .route("/api/vocabulary", get(vocabulary))
        .route("/api/entities", get(search).post(create))
        .route("/api/entities/{id}", get(read).put(update).delete(remove))
        .route("/api/entities/{id}/history", get(history))
        .route("/api/entities/{id}/version/{n}", get(version))
        .route("/api/entities/{id}/diff/{i}/{j}", get(diff))
        .route("/api/entities/{id}/restore/{n}", post(restore))
        .route("/auth/login", get(login))
        .route("/auth/callback", get(callback))
        .route("/auth/logout", post(logout))
        .route("/auth/session", get(session))
        .fallback(|| async { Problem::new(StatusCode::NOT_FOUND, "no-route", "no such route") })
        .with_state(state)
}

/// Path parameters with a JSON problem on rejection.
pub struct Params<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned + Send> FromRequestParts<S> for Params<T> {
    type Rejection = Problem;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        Path::<T>::from_request_parts(parts, state)
            .await
            .map(|Path(v)| Params(v))
            .map_err(|e| Problem::bad_request(e.body_text()))
    }
}

impl FromRequestParts<Shared> for Principal {
    type Rejection = Problem;

    async fn from_request_parts(parts: &mut Parts, state: &Shared) -> Result<Self, Self::Rejection> {
        parts
            .headers
            .get_all(header::COOKIE)
            .iter()
            .filter_map(|v| v.to_str().ok())
            .find_map(|h| cookie_value(h, SESSION_COOKIE))
            .and_then(|v| state.keys.read_session(v, Utc::now()))
            .ok_or_else(Problem::unauthenticated)
    }
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, Problem> {
    payload.map(|Json(v)| v).map_err(|e| Problem::bad_request(e.body_text()))
}

/// Runs a store operation off the async workers; commits may wait for
/// another writer's entity claim.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, Problem> + Send + 'static) -> Result<T, Problem> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| Problem::internal(e.to_string()))?
}

async fn schema(State(s): State<Shared>) -> Response {
    Json(&s.curator.profile().form_schema).into_response()
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VocabularyView<'a> {
    categories: &'a std::collections::BTreeMap<String, std::collections::BTreeSet<String>>,
    keyword_predicate: &'a str,
    link_types: &'a std::collections::BTreeSet<String>,
    labels: &'a std::collections::BTreeMap<String, String>,
}

async fn vocabulary(State(s): State<Shared>) -> Response {
    let p = s.curator.profile();
    Json(VocabularyView {
        categories: p.vocabulary.categories(),
        keyword_predicate: p.keyword_predicate(),
        link_types: &p.link_types,
        labels: &p.display,
    })
    .into_response()
}

#[derive(Deserialize)]
struct SearchQuery {
    #[serde(rename = "type")]
    class: Option<String>,
    q: Option<String>,
}

async fn search(State(s): State<Shared>, query: Result<Query<SearchQuery>, axum::extract::rejection::QueryRejection>) -> Result<Response, Problem> {
    let Query(query) = query.map_err(|e| Problem::bad_request(e.body_text()))?;
    Ok(Json(s.curator.search(query.class.as_deref(), query.q.as_deref())).into_response())
}

/// An entity document plus optional provenance notes for the snapshot.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WriteBody {
    #[serde(default)]
    iri: Option<String>,
    #[serde(rename = "type")]
    class: String,
    #[serde(default)]
    fields: Fields,
    #[serde(default)]
    keywords: std::collections::BTreeSet<String>,
    /// An IRI is recorded as the primary source, anything else as a note.
    #[serde(default)]
    source: Option<String>,
    #[serde(default)]
    description: Option<String>,
}

impl WriteBody {
    fn split(self) -> (EntityDocument, Option<Source>, Option<String>) {
        let source = self.source.filter(|s| !s.trim().is_empty()).map(|s| {
            if is_absolute_iri(&s) {
                Source::Iri(s)
            } else {
                Source::Text(s)
            }
        });
        let doc = EntityDocument {
            iri: self.iri,
            class: self.class,
            fields: self.fields,
            keywords: self.keywords,
        };
        (doc, source, self.description)
    }
}

#[derive(Serialize)]
struct WriteResponse {
    iri: String,
    snapshot: SnapshotRecord,
}

fn written(status: StatusCode, iri: String, snapshot: SnapshotRecord) -> Response {
    (status, Json(WriteResponse { iri, snapshot })).into_response()
}

async fn create(
    State(s): State<Shared>,
    principal: Principal,
    payload: Result<Json<WriteBody>, JsonRejection>,
) -> Result<Response, Problem> {
    let (doc, source, description) = body(payload)?.split();
    let curator = s.curator.clone();
    let (iri, record) = blocking(move || Ok(curator.create(&doc, &principal.id, source, description)?)).await?;
    Ok(written(StatusCode::CREATED, iri, record))
}

async fn read(State(s): State<Shared>, Params(id): Params<String>) -> Result<Response, Problem> {
    let iri = s.curator.resolve_id(&id);
    Ok(Json(s.curator.document(&iri)?).into_response())
}

async fn update(
    State(s): State<Shared>,
    principal: Principal,
    Params(id): Params<String>,
    payload: Result<Json<WriteBody>, JsonRejection>,
) -> Result<Response, Problem> {
    let (doc, source, description) = body(payload)?.split();
    let curator = s.curator.clone();
    let iri = curator.resolve_id(&id);
    let target = iri.clone();
    let record = blocking(move || Ok(curator.update(&target, &doc, &principal.id, source, description)?)).await?;
    Ok(written(StatusCode::OK, iri, record))
}

async fn remove(State(s): State<Shared>, principal: Principal, Params(id): Params<String>) -> Result<Response, Problem> {
    let curator = s.curator.clone();
    let iri = curator.resolve_id(&id);
    let target = iri.clone();
    let record = blocking(move || Ok(curator.delete(&target, &principal.id)?)).await?;
    Ok(written(StatusCode::OK, iri, record))
}

async fn history(State(s): State<Shared>, Params(id): Params<String>) -> Result<Response, Problem> {
    let iri = s.curator.resolve_id(&id);
    Ok(Json(s.curator.history(&iri)?).into_response())
}

async fn version(State(s): State<Shared>, Params((id, n)): Params<(String, u64)>) -> Result<Response, Problem> {
    let iri = s.curator.resolve_id(&id);
    Ok(Json(s.curator.version_document(&iri, n)?).into_response())
}

async fn diff(State(s): State<Shared>, Params((id, i, j)): Params<(String, u64, u64)>) -> Result<Response, Problem> {
    let iri = s.curator.resolve_id(&id);
    Ok(Json(delta_json(&s.curator.diff(&iri, i, j)?)).into_response())
}

async fn restore(
    State(s): State<Shared>,
    principal: Principal,
    Params((id, n)): Params<(String, u64)>,
) -> Result<Response, Problem> {
    let curator = s.curator.clone();
    let iri = curator.resolve_id(&id);
    let target = iri.clone();
    let record = blocking(move || Ok(curator.restore(&target, n, &principal.id)?)).await?;
    Ok(written(StatusCode::OK, iri, record))
}

#[derive(Deserialize)]
struct LoginQuery {
    /// Stub mode only: which configured user to sign in as.
    user: Option<String>,
}

async fn login(State(s): State<Shared>, Query(q): Query<LoginQuery>) -> Response {
    let (state, cookie) = s.keys.issue_state(Utc::now());
    let location = s.provider.authorize_url(&state, q.user.as_deref());
    let mut headers = HeaderMap::new();
    headers.insert(header::LOCATION, HeaderValue::from_str(&location).expect("url-encoded location"));
    headers.insert(
        header::SET_COOKIE,
        HeaderValue::from_str(&set_cookie(STATE_COOKIE, &cookie, state_max_age())).expect("cookie is ascii"),
    );
    (StatusCode::FOUND, headers).into_response()
}

#[derive(Deserialize)]
struct CallbackQuery {
    code: Option<String>,
    state: Option<String>,
}

async fn callback(State(s): State<Shared>, headers: HeaderMap, Query(q): Query<CallbackQuery>) -> Result<Response, Problem> {
    let (Some(code), Some(state)) = (q.code, q.state) else {
        return Err(Problem::new(StatusCode::UNAUTHORIZED, "invalid-callback", "missing code or state"));
    };
    let now = Utc::now();
    let bound = headers
        .get_all(header::COOKIE)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .find_map(|h| cookie_value(h, STATE_COOKIE))
        .is_some_and(|c| s.keys.check_state(c, &state, now));
    if !bound {
        return Err(Problem::new(StatusCode::UNAUTHORIZED, "state-mismatch", "state does not match this browser"));
    }
    let principal = s.provider.exchange(&code).await?;
    s.allow.check(&principal)?;
    tracing::info!(principal = %principal.id, "signed in");
    let session = s.keys.issue_session(&principal, now);
    let mut response = Json(&principal).into_response();
    let h = response.headers_mut();
    for cookie in [set_cookie(SESSION_COOKIE, &session, session_max_age()), set_cookie(STATE_COOKIE, "", 0)] {
        h.append(header::SET_COOKIE, HeaderValue::from_str(&cookie).expect("cookie is ascii"));
    }
    Ok(response)
}

async fn logout() -> Response {
    let mut headers = HeaderMap::new();
    headers.insert(
        header::SET_COOKIE,
        HeaderValue::from_str(&set_cookie(SESSION_COOKIE, "", 0)).expect("cookie is ascii"),
    );
    (StatusCode::NO_CONTENT, headers).into_response()
}

async fn session(principal: Principal) -> Json<Principal> {
    Json(principal)
}
