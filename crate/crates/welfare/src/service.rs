//! HTTP JSON service under `/v1`.
//!
//! Stateless apart from elicitation sessions, which live in memory until
//! they go unused for the configured TTL. A restart loses every session.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Deserialize;
use welfare_core::elicitation::{ElicitationAnswer, Session, SessionError, Step};
use welfare_core::{Error, SwfFamily};

use crate::config::ServiceConfig;
use crate::curve::{protection_curve, to_csv, Spacing};
use crate::wire::{self, AnswerOutcome, Malformed, SessionCreated, SessionView};

struct Slot {
    session: Session,
    touched: Instant,
}

pub struct AppState {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Slot>>,
}

impl AppState {
    fn evict_expired(&self, sessions: &mut HashMap<String, Slot>, now: Instant) {
        let ttl = self.config.session_ttl;
        sessions.retain(|_, slot| now.duration_since(slot.touched) < ttl);
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session lock").len()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    kind: &'static str,
    message: String,
    bound: Option<&'static str>,
}

impl ApiError {
    fn new(status: StatusCode, kind: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            kind,
            message: message.into(),
            bound: None,
        }
    }

    fn not_found(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id:?}"))
    }
}

impl From<Malformed> for ApiError {
    fn from(m: Malformed) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "malformed", m.0)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Session(SessionError::Completed) => ApiError::new(StatusCode::CONFLICT, "completed", e.to_string()),
            Error::Session(SessionError::UnexpectedAnswer { .. }) => {
                ApiError::new(StatusCode::BAD_REQUEST, "unexpected_answer", e.to_string())
            }
            Error::DomainExceeded { bound, .. } => ApiError {
                bound: Some(bound),
                ..ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "domain", e.to_string())
            },
            _ => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "domain", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = serde_json::json!({ "error": self.kind, "message": self.message });
        if let Some(bound) = self.bound {
            body["bound"] = bound.into();
        }
        (
            self.status,
            [(header::CONTENT_TYPE, "application/json")],
            body.to_string(),
        )
            .into_response()
    }
}

fn json_ok(status: StatusCode, text: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], text).into_response()
}

fn body_text(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, "malformed", "body is not utf-8"))
}

async fn evaluate(body: Bytes) -> Result<Response, ApiError> {
    let req: wire::EvaluateRequest = wire::parse("evaluate request", body_text(&body)?)?;
    Ok(json_ok(StatusCode::OK, wire::to_json(&wire::evaluate(&req)?)))
}

async fn protect(body: Bytes) -> Result<Response, ApiError> {
    let req: wire::ProtectRequest = wire::parse("protect request", body_text(&body)?)?;
    Ok(json_ok(StatusCode::OK, wire::to_json(&wire::protect(&req)?)))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum CurveFormat {
    Json,
    Csv,
}

#[derive(Debug, Deserialize)]
struct CurveQuery {
    family: String,
    ymin: f64,
    ymax: f64,
    points: Option<usize>,
    #[serde(default)]
    spacing: Spacing,
    format: Option<CurveFormat>,
}

#[derive(serde::Serialize)]
struct CurveBody<'a> {
    points: &'a [crate::curve::CurvePoint],
}

async fn curve(
    State(state): State<Arc<AppState>>,
    query: Result<Query<CurveQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "malformed", e.body_text()))?;
    let family: SwfFamily = wire::parse("family", &q.family)?;
    let points = protection_curve(
        &family,
        q.ymin,
        q.ymax,
        q.points.unwrap_or(state.config.default_grid),
        q.spacing,
    )?;
    Ok(match q.format.unwrap_or(CurveFormat::Json) {
        CurveFormat::Csv => (StatusCode::OK, [(header::CONTENT_TYPE, "text/csv")], to_csv(&points)).into_response(),
        CurveFormat::Json => json_ok(StatusCode::OK, wire::to_json(&CurveBody { points: &points })),
    })
}

#[derive(Debug, Default, Deserialize)]
struct CreateSession {
    incomes: Option<[f64; 2]>,
}

async fn create_session(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let text = body_text(&body)?;
    let req: CreateSession = if text.trim().is_empty() {
        CreateSession::default()
    } else {
        wire::parse("session request", text)?
    };
    let id = uuid::Uuid::new_v4().to_string();
    let session = match req.incomes {
        Some(incomes) => Session::with_incomes(id.clone(), incomes)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "malformed", e.to_string()))?,
        None => Session::new(id.clone()),
    };
    let created = SessionCreated {
        id: id.clone(),
        state: session.state(),
        first_question: session.next_question().map_err(Error::from)?,
    };
    let now = Instant::now();
    let mut sessions = state.sessions.lock().expect("session lock");
    state.evict_expired(&mut sessions, now);
    sessions.insert(id, Slot { session, touched: now });
    Ok(json_ok(StatusCode::CREATED, wire::to_json(&created)))
}

#[derive(Debug, Deserialize)]
struct AnswerBody {
    answer: ElicitationAnswer,
}

async fn answer(State(state): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let AnswerBody { answer } = wire::parse("answer", body_text(&body)?)?;
    let now = Instant::now();
    let mut sessions = state.sessions.lock().expect("session lock");
    state.evict_expired(&mut sessions, now);
    let slot = sessions.get_mut(&id).ok_or_else(|| ApiError::not_found(&id))?;
    slot.touched = now;
    let step = slot.session.answer(answer).map_err(|e| match e {
        Error::InvalidParameter { .. } => ApiError::new(StatusCode::BAD_REQUEST, "malformed", e.to_string()),
        other => other.into(),
    })?;
    let (next_question, inferred_preference) = match step {
        Step::Next(q) => (Some(q), None),
        Step::Complete(p) => (None, Some(p)),
    };
    let outcome = AnswerOutcome {
        session_id: id.clone(),
        state: slot.session.state(),
        next_question,
        inferred_preference,
    };
    Ok(json_ok(StatusCode::OK, wire::to_json(&outcome)))
}

async fn get_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let now = Instant::now();
    let mut sessions = state.sessions.lock().expect("session lock");
    state.evict_expired(&mut sessions, now);
    let slot = sessions.get_mut(&id).ok_or_else(|| ApiError::not_found(&id))?;
    slot.touched = now;
    Ok(json_ok(StatusCode::OK, wire::to_json(&SessionView::of(&slot.session))))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

pub fn state(config: ServiceConfig) -> Arc<AppState> {
    Arc::new(AppState {
        config,
        sessions: Mutex::new(HashMap::new()),
    })
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/v1/evaluate", post(evaluate))
        .route("/v1/protect", post(protect))
        .route("/v1/curve", get(curve))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(get_session))
        .route("/v1/sessions/{id}/answers", post(answer))
        .fallback(fallback)
        .with_state(state)
}

/// Binds `config.bind_address` and serves until the process exits.
pub async fn serve(config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(&config.bind_address).await?;
    let sweep_every = (config.session_ttl / 4).max(std::time::Duration::from_secs(1));
    let app_state = state(config);
    let sweeper = Arc::clone(&app_state);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(sweep_every);
        loop {
            tick.tick().await;
            let mut sessions = sweeper.sessions.lock().expect("session lock");
            sweeper.evict_expired(&mut sessions, Instant::now());
        }
    });
    axum::serve(listener, router(app_state)).await
}
