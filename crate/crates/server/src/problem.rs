//! JSON error bodies: `{"code", "message", "report"?, "keywordViolations"?}`.

use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use quill_core::profile::KeywordViolation;
use quill_core::shacl::ValidationReport;
use quill_core::store::StoreError;
use quill_core::versioning::VersionError;
use serde::Serialize;

use crate::auth::AuthError;
use crate::service::ServiceError;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Problem {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ValidationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keyword_violations: Option<Vec<KeywordViolation>>,
}

impl Problem {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            report: None,
            keyword_violations: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad-request", message)
    }

    pub fn unauthenticated() -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthenticated", "sign in first")
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for Problem {
    fn into_response(self) -> Response {
        let body = serde_json::to_vec(&self).expect("problem is serializable");
        (self.status, [(header::CONTENT_TYPE, "application/problem+json")], body).into_response()
    }
}

impl From<ServiceError> for Problem {
    fn from(e: ServiceError) -> Self {
        use StatusCode as S;
        let message = e.to_string();
        let (status, code) = match &e {
            ServiceError::UnknownType(_) => (S::UNPROCESSABLE_ENTITY, "unknown-type"),
            ServiceError::NotFound(_) => (S::NOT_FOUND, "not-found"),
            ServiceError::Deleted(_) => (S::NOT_FOUND, "deleted"),
            ServiceError::EmptyVersion { .. } => (S::NOT_FOUND, "empty-version"),
            ServiceError::Collision(_) => (S::CONFLICT, "iri-collision"),
            ServiceError::IriMismatch { .. } => (S::BAD_REQUEST, "iri-mismatch"),
            ServiceError::Document(_) => (S::BAD_REQUEST, "bad-document"),
            ServiceError::Invalid(_) => (S::UNPROCESSABLE_ENTITY, "validation-failed"),
            ServiceError::KeywordClosure(_) => (S::UNPROCESSABLE_ENTITY, "keyword-closure"),
            ServiceError::UnknownKeywords(_) => (S::UNPROCESSABLE_ENTITY, "unknown-keywords"),
            ServiceError::Version(v) => match v {
                VersionError::NoChange(_) => (S::CONFLICT, "no-change"),
                VersionError::Stale { .. } | VersionError::Store(StoreError::Conflict(_)) => (S::CONFLICT, "conflict"),
                VersionError::UnknownEntity(_) => (S::NOT_FOUND, "not-found"),
                VersionError::IndexOutOfRange { .. } | VersionError::TimestampBeforeCreation { .. } => {
                    (S::NOT_FOUND, "version-not-found")
                }
                VersionError::InvalidState { .. } => (S::UNPROCESSABLE_ENTITY, "invalid-state"),
                VersionError::MissingAgent | VersionError::InvalidAgent(_) => (S::UNAUTHORIZED, "unauthenticated"),
                _ => (S::INTERNAL_SERVER_ERROR, "internal"),
            },
        };
        let mut p = Problem::new(status, code, message);
        match e {
            ServiceError::Invalid(report) => p.report = Some(report),
            ServiceError::KeywordClosure(v) => p.keyword_violations = Some(v),
            _ => {}
        }
        if p.status.is_server_error() {
            tracing::error!("{}", p.message);
        }
        p
    }
}

impl From<AuthError> for Problem {
    fn from(e: AuthError) -> Self {
        let (status, code) = match &e {
            AuthError::InvalidCode => (StatusCode::UNAUTHORIZED, "invalid-code"),
            AuthError::InvalidIdentity(_) => (StatusCode::UNAUTHORIZED, "invalid-identity"),
            AuthError::NotAllowed(_) => (StatusCode::FORBIDDEN, "not-allowed"),
            AuthError::Provider(_) => (StatusCode::BAD_GATEWAY, "provider-error"),
        };
        Problem::new(status, code, e.to_string())
    }
}
