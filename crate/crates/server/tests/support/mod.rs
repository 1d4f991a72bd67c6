//! In-process app under stub sign-in, request helpers and the Martis
//! record documents.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, HeaderMap, Method, Request, StatusCode};
use axum::Router;
use chrono::{Duration, TimeZone, Utc};
use http_body_util::BodyExt;
use quill_core::versioning::ManualClock;
use quill_core::vocab::{datacite, dcterms, fabio, foaf, frbr, literal, prism, pro, quill, rdf, xsd};
use quill_server::config::{AuthMode, Config, StubUser};
use quill_server::{build_state, open_curator, Curator};
use serde_json::{json, Value};
use tower::ServiceExt;

pub const EDITOR: &str = "https://orcid.org/0000-0002-1825-0097";
pub const SECOND_EDITOR: &str = "https://orcid.org/0000-0002-9079-593X";
pub const OUTSIDER: &str = "https://orcid.org/0000-0001-5109-3700";

pub const TITLE: &str = "L'enigma del PLouvre inv. 7733 verso: l'epigramma dell'ostrica";
pub const ABSTRACT_V1: &str = "P. Louvre 7733 is a commented edition which contains paragraphoi enhanced by vacua to mark pause or transition to another topic, expunction marks and interlinear emendations; the text of the poem, an epigram preferably dated between the 1st century BC and the 1st century AD, is examined together with the commentary of which are available the text and the Italian translation";
pub const ABSTRACT_V2: &str = "P. Louvre 7733 is a commented edition which contains paragraphoi enhanced by vacua to mark pause or transition to another topic, expunction marks and interlinear emendations; the text of the poem, an epigram rather than an elegy, is preferably dated between the 1st century BC and the 1st century AD and examined together with the commentary of which are available the text and the Italian translation";
pub const KEYWORDS_V1: [&str; 4] = ["ancient tradition", "commented edition", "epigram", "exegetical products"];

pub fn profile_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../profiles/ocdm-paratext")
}

pub fn config(data: Option<&Path>) -> Config {
    let mut c = Config {
        profile: profile_dir(),
        data: data.map(Path::to_owned),
        ..Config::default()
    };
    c.auth.mode = AuthMode::Stub;
    c.auth.session_secret = "test-secret".into();
    c.auth.allow_list = vec![EDITOR.into(), SECOND_EDITOR.into()];
    c.auth.users = [(EDITOR, "Josiah Carberry"), (SECOND_EDITOR, "Second Editor"), (OUTSIDER, "Outside Reader")]
        .into_iter()
        .map(|(id, name)| StubUser { id: id.into(), name: name.into() })
        .collect();
    c
}

pub struct TestApp {
    pub app: Router,
    pub curator: Arc<Curator>,
    pub clock: Arc<ManualClock>,
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Value,
    pub raw: Vec<u8>,
}

impl TestApp {
    pub fn new() -> Self {
        Self::with_config(config(None))
    }

    pub fn with_config(config: Config) -> Self {
        let clock = Arc::new(ManualClock::new(Utc.with_ymd_and_hms(2025, 3, 1, 10, 0, 0).unwrap()));
        let curator = Arc::new(open_curator(&config, clock.clone()).unwrap());
        let app = quill_server::router(build_state(&config, curator.clone()));
        Self { app, curator, clock }
    }

    pub async fn send(&self, method: Method, uri: &str, body: Option<&Value>, cookie: Option<&str>) -> Reply {
        self.clock.advance(Duration::seconds(1));
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(c) = cookie {
            req = req.header(header::COOKIE, c);
        }
        let req = match body {
            Some(v) => req
                .header(header::CONTENT_TYPE, "application/json")
                .body(Body::from(serde_json::to_vec(v).unwrap())),
            None => req.body(Body::empty()),
        }
        .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status();
        let headers = res.headers().clone();
        let raw = res.into_body().collect().await.unwrap().to_bytes().to_vec();
        let body = serde_json::from_slice(&raw).unwrap_or(Value::Null);
        Reply { status, headers, body, raw }
    }

    pub async fn get(&self, uri: &str) -> Reply {
        self.send(Method::GET, uri, None, None).await
    }

    /// Runs the stub sign-in flow; returns the session cookie pair or the
    /// failing callback reply.
    pub async fn try_login(&self, user: &str) -> Result<String, Reply> {
        let login = self.get(&format!("/auth/login?user={}", enc(user))).await;
        assert_eq!(login.status, StatusCode::FOUND);
        let location = login.headers[header::LOCATION].to_str().unwrap().to_owned();
        let state_cookie = set_cookie_pair(&login.headers, "quill_oauth_state").unwrap();
        let cb = self.send(Method::GET, &location, None, Some(&state_cookie)).await;
        if cb.status != StatusCode::OK {
            return Err(cb);
        }
        Ok(set_cookie_pair(&cb.headers, "quill_session").unwrap())
    }

    pub async fn login(&self, user: &str) -> String {
        self.try_login(user).await.unwrap_or_else(|r| panic!("login failed: {} {}", r.status, r.body))
    }

    pub async fn create(&self, cookie: &str, doc: &Value) -> Reply {
        self.send(Method::POST, "/api/entities", Some(doc), Some(cookie)).await
    }

    pub async fn put(&self, cookie: &str, iri: &str, doc: &Value) -> Reply {
        self.send(Method::PUT, &entity_path(iri), Some(doc), Some(cookie)).await
    }
}

/// `name=value` from a `Set-Cookie` header with that name.
pub fn set_cookie_pair(headers: &HeaderMap, name: &str) -> Option<String> {
    headers
        .get_all(header::SET_COOKIE)
        .iter()
        .filter_map(|v| v.to_str().ok())
        .map(|v| v.split(';').next().unwrap().to_owned())
        .find(|pair| pair.starts_with(&format!("{name}=")) && pair.len() > name.len() + 1)
}

pub fn enc(s: &str) -> String {
    url::form_urlencoded::byte_serialize(s.as_bytes()).collect()
}

pub fn entity_path(iri: &str) -> String {
    format!("/api/entities/{}", enc(iri))
}

fn lit(v: &str) -> Value {
    json!({"type": "literal", "value": v})
}

fn typed(v: &str, dt: &str) -> Value {
    json!({"type": "literal", "value": v, "datatype": dt})
}

fn iri(v: &str) -> Value {
    json!({"type": "iri", "value": v})
}

fn identifier(scheme: &str, value: &str) -> Value {
    json!({"type": "node", "fields": {
        rdf::TYPE: [iri(datacite::IDENTIFIER)],
        datacite::USES_IDENTIFIER_SCHEME: [iri(scheme)],
        literal::HAS_LITERAL_VALUE: [lit(value)],
    }})
}

pub fn journal_doc() -> Value {
    json!({
        "type": fabio::JOURNAL,
        "fields": {
            dcterms::TITLE: [lit("Studi di Egittologia e di Papirologia: Rivista Internazionale")],
            datacite::HAS_IDENTIFIER: [identifier(datacite::ISSN, "1724-6156"), identifier(datacite::EISSN, "1824-7326")],
        }
    })
}

pub fn volume_doc(journal: &str) -> Value {
    json!({
        "type": fabio::JOURNAL_VOLUME,
        "fields": {
            fabio::HAS_SEQUENCE_IDENTIFIER: [lit("10")],
            prism::PUBLICATION_DATE: [typed("2013", xsd::G_YEAR)],
            frbr::PART_OF: [iri(journal)],
        }
    })
}

pub fn agent_doc(family: &str, given: &str) -> Value {
    json!({
        "type": foaf::AGENT,
        "fields": {
            foaf::FAMILY_NAME: [lit(family)],
            foaf::GIVEN_NAME: [lit(given)],
        }
    })
}

pub fn article_doc(volume: &str, author: &str) -> Value {
    json!({
        "type": fabio::JOURNAL_ARTICLE,
        "fields": {
            dcterms::TITLE: [lit(TITLE)],
            dcterms::ABSTRACT: [lit(ABSTRACT_V1)],
            prism::PUBLICATION_DATE: [typed("2013", xsd::G_YEAR)],
            prism::PAGE_RANGE: [lit("117-150")],
            frbr::PART_OF: [iri(volume)],
            datacite::HAS_IDENTIFIER: [identifier(datacite::DOI, "10.1400/213891")],
            pro::IS_DOCUMENT_CONTEXT_FOR: [{"type": "node", "fields": {
                rdf::TYPE: [iri(pro::ROLE_IN_TIME)],
                pro::WITH_ROLE: [iri(pro::AUTHOR)],
                pro::IS_HELD_BY: [iri(author)],
                quill::POSITION: [typed("1", xsd::POSITIVE_INTEGER)],
            }}],
        },
        "keywords": KEYWORDS_V1,
    })
}

pub struct Martis {
    pub journal: String,
    pub volume: String,
    pub agent: String,
    pub article: String,
    pub created: Value,
}

/// Creates the journal, volume, author and article; panics on any failure.
pub async fn create_martis(app: &TestApp, cookie: &str) -> Martis {
    let mut iris: Vec<String> = Vec::new();
    let mut last = Value::Null;
    for step in 0..4 {
        let doc = match step {
            0 => journal_doc(),
            1 => volume_doc(&iris[0]),
            2 => agent_doc("Martis", "Chiara"),
            _ => article_doc(&iris[1], &iris[2]),
        };
        let r = app.create(cookie, &doc).await;
        assert_eq!(r.status, StatusCode::CREATED, "step {step}: {}", r.body);
        iris.push(r.body["iri"].as_str().unwrap().to_owned());
        last = r.body;
    }
    Martis {
        journal: iris[0].clone(),
        volume: iris[1].clone(),
        agent: iris[2].clone(),
        article: iris[3].clone(),
        created: last,
    }
}

/// The stored article document with the revised abstract and `elegy`.
pub fn revised(current: &Value) -> Value {
    let mut doc = current.clone();
    doc["fields"][dcterms::ABSTRACT] = json!([lit(ABSTRACT_V2)]);
    doc["keywords"].as_array_mut().unwrap().push(json!("elegy"));
    doc
}
