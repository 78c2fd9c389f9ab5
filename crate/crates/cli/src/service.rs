//! JSON-over-HTTP API backing the annotation console.
//!
//! Sessions are event sourced: every accepted mutation is appended to
//! `<journal_dir>/<id>.jsonl` before the response is sent, and the journals
//! are replayed at startup. Mutations on one session are serialized by a
//! per-session lock.

use std::collections::BTreeMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

use genderlex_core::annotate::{concordance, event_line, parse_journal, Rating, Resolution};
use genderlex_core::{Candidate, Category, Corpus, Error, Pipeline, Session, TermStatus};

/// Milliseconds since the Unix epoch.
pub type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64)
    })
}

pub const DEFAULT_CONCORDANCE_WINDOW: usize = 5;

pub struct AppState {
    corpora: Vec<Corpus>,
    pipeline: Pipeline,
    category: Category,
    candidates: Vec<Candidate>,
    journal_dir: Option<PathBuf>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
    clock: Clock,
}

impl AppState {
    /// Builds the state and replays any journals found in `journal_dir`.
    pub fn new(
        corpora: Vec<Corpus>,
        pipeline: Pipeline,
        category: Category,
        candidates: Vec<Candidate>,
        journal_dir: Option<PathBuf>,
        clock: Clock,
    ) -> genderlex_core::Result<Self> {
        let mut sessions = BTreeMap::new();
        let mut max_seq = 0;
        if let Some(dir) = &journal_dir {
            fs::create_dir_all(dir)?;
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            paths.sort();
            for p in paths {
                let s = Session::replay(&parse_journal(&fs::read_to_string(&p)?)?)?;
                if let Some(n) = s.id.strip_prefix('s').and_then(|n| n.parse::<u64>().ok()) {
                    max_seq = max_seq.max(n);
                }
                sessions.insert(s.id.clone(), Arc::new(Mutex::new(s)));
            }
        }
        Ok(AppState {
            corpora,
            pipeline,
            category,
            candidates,
            journal_dir,
            sessions: RwLock::new(sessions),
            next_id: AtomicU64::new(max_seq + 1),
            clock,
        })
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| {
                ApiError(Error::NotFound {
                    kind: "session",
                    name: id.to_string(),
                })
            })
    }

    fn journal_path(&self, id: &str) -> Option<PathBuf> {
        self.journal_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")))
    }

    fn append(&self, id: &str, line: &str) -> genderlex_core::Result<()> {
        if let Some(p) = self.journal_path(id) {
            let mut f = OpenOptions::new().append(true).create(true).open(p)?;
            f.write_all(line.as_bytes())?;
            f.sync_data()?;
        }
        Ok(())
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/candidates", get(candidates))
        .route("/concordance", get(concordance_lines))
        .route("/sessions", get(list_sessions).post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/next", get(next_term))
        .route("/sessions/{id}/ratings", post(submit_rating))
        .route("/sessions/{id}/resolutions", post(resolve))
        .route("/sessions/{id}/alpha", get(alpha))
        .route("/sessions/{id}/export", get(export))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// Error body: `{"error": message, "field": name-or-null}`.
pub struct ApiError(pub Error);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            Error::Validation { .. } | Error::Parse { .. } | Error::Config(_) => {
                StatusCode::BAD_REQUEST
            }
            Error::NotFound { .. } => StatusCode::NOT_FOUND,
            Error::Conflict(_) => StatusCode::CONFLICT,
            Error::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = json!({ "error": self.0.to_string(), "field": self.0.field() });
        (status, Json(body)).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError(Error::Validation {
            field: "body".into(),
            message: e.body_text(),
        })
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        ApiError(Error::Validation {
            field: "query".into(),
            message: e.body_text(),
        })
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn missing(field: &str) -> ApiError {
    ApiError(Error::Validation {
        field: field.into(),
        message: "is required".into(),
    })
}

async fn candidates(State(s): State<Arc<AppState>>) -> Json<Vec<Candidate>> {
    Json(s.candidates.clone())
}

#[derive(Deserialize)]
struct ConcordanceQuery {
    term: Option<String>,
    corpus: Option<String>,
    window: Option<usize>,
}

#[derive(Serialize)]
struct ConcordanceBody {
    term: String,
    window: usize,
    lines: Vec<genderlex_core::ConcordanceLine>,
}

async fn concordance_lines(
    State(s): State<Arc<AppState>>,
    q: Result<Query<ConcordanceQuery>, QueryRejection>,
) -> ApiResult<Json<ConcordanceBody>> {
    let Query(q) = q?;
    let term = q.term.filter(|t| !t.trim().is_empty()).ok_or_else(|| missing("term"))?;
    let window = q.window.unwrap_or(DEFAULT_CONCORDANCE_WINDOW);
    let corpora: Vec<&Corpus> = match &q.corpus {
        Some(name) => {
            let c = s.corpora.iter().find(|c| &c.name == name).ok_or_else(|| {
                ApiError(Error::NotFound {
                    kind: "corpus",
                    name: name.clone(),
                })
            })?;
            vec![c]
        }
        None => s.corpora.iter().collect(),
    };
    let mut lines = Vec::new();
    for c in corpora {
        lines.extend(concordance(c, &term, window, &s.pipeline, s.category)?);
    }
    Ok(Json(ConcordanceBody { term, window, lines }))
}

#[derive(Serialize)]
struct TermView<'a> {
    term: &'a str,
    pattern: &'a str,
    original_gender: genderlex_core::GenderClass,
    corpora_found: &'a [genderlex_core::annotate::CorpusFrequency],
    status: TermStatus,
    ratings: BTreeMap<String, Rating>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<&'a Resolution>,
}

#[derive(Serialize)]
struct SessionView<'a> {
    id: &'a str,
    raters: &'a [String],
    status_counts: BTreeMap<TermStatus, usize>,
    terms: Vec<TermView<'a>>,
}

fn view(s: &Session) -> serde_json::Value {
    let mut status_counts: BTreeMap<TermStatus, usize> = [
        TermStatus::Pending,
        TermStatus::Agreed,
        TermStatus::NeedsDiscussion,
        TermStatus::Resolved,
    ]
    .into_iter()
    .map(|t| (t, 0))
    .collect();
    let terms = s
        .candidates
        .iter()
        .map(|c| {
            let status = s.term_status[&c.term];
            *status_counts.entry(status).or_insert(0) += 1;
            TermView {
                term: &c.term,
                pattern: &c.pattern,
                original_gender: c.original_gender,
                corpora_found: &c.corpora_found,
                status,
                ratings: s.ratings.get(&c.term).cloned().unwrap_or_default(),
                resolution: s.resolutions.get(&c.term),
            }
        })
        .collect();
    serde_json::to_value(SessionView {
        id: &s.id,
        raters: &s.raters,
        status_counts,
        terms,
    })
    .expect("session view serializes")
}

#[derive(Serialize)]
struct SessionSummary {
    id: String,
    raters: Vec<String>,
    terms: usize,
}

async fn list_sessions(State(s): State<Arc<AppState>>) -> Json<Vec<SessionSummary>> {
    let handles: Vec<Arc<Mutex<Session>>> = s
        .sessions
        .read()
        .expect("session map lock")
        .values()
        .cloned()
        .collect();
    let mut out = Vec::new();
    for h in handles {
        let sess = h.lock().await;
        out.push(SessionSummary {
            id: sess.id.clone(),
            raters: sess.raters.clone(),
            terms: sess.candidates.len(),
        });
    }
    Json(out)
}

#[derive(Deserialize)]
struct CreateSession {
    raters: Vec<String>,
    /// Subset of candidate terms; all candidates when absent.
    terms: Option<Vec<String>>,
    id: Option<String>,
}

async fn create_session(
    State(s): State<Arc<AppState>>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let Json(body) = body?;
    let candidates = match &body.terms {
        None => s.candidates.clone(),
        Some(terms) => terms
            .iter()
            .map(|t| {
                s.candidates
                    .iter()
                    .find(|c| &c.term == t)
                    .cloned()
                    .ok_or_else(|| Error::NotFound {
                        kind: "term",
                        name: t.clone(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?,
    };
    if let Some(id) = &body.id {
        if id.is_empty()
            || !id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(ApiError(Error::Validation {
                field: "id".into(),
                message: "session ids use letters, digits, `-` and `_`".into(),
            }));
        }
    }
    let mut map = s.sessions.write().expect("session map lock");
    let id = match body.id {
        Some(id) => id,
        None => loop {
            let id = format!("s{}", s.next_id.fetch_add(1, Ordering::SeqCst));
            if !map.contains_key(&id) {
                break id;
            }
        },
    };
    if map.contains_key(&id) || s.journal_path(&id).is_some_and(|p| p.exists()) {
        return Err(ApiError(Error::Conflict(format!("session `{id}` already exists"))));
    }
    let session = Session::create(id.clone(), candidates, body.raters, (s.clock)())?;
    s.append(&id, &session.journal_jsonl())?;
    let v = view(&session);
    map.insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(v)))
}

async fn get_session(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let h = s.session(&id)?;
    let sess = h.lock().await;
    Ok(Json(view(&sess)))
}

#[derive(Deserialize)]
struct NextQuery {
    rater: Option<String>,
}

async fn next_term(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    q: Result<Query<NextQuery>, QueryRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let Query(q) = q?;
    let rater = q.rater.ok_or_else(|| missing("rater"))?;
    let h = s.session(&id)?;
    let sess = h.lock().await;
    let next = sess.next_for(&rater)?;
    let remaining = sess
        .candidates
        .iter()
        .filter(|c| {
            sess.term_status[&c.term] != TermStatus::Resolved
                && !sess
                    .ratings
                    .get(&c.term)
                    .is_some_and(|r| r.contains_key(&rater))
        })
        .count();
    Ok(Json(json!({ "rater": rater, "candidate": next, "remaining": remaining })))
}

#[derive(Deserialize)]
struct RatingBody {
    rater: String,
    term: String,
    ambiguous: bool,
    note: Option<String>,
    example_ref: Option<String>,
}

async fn submit_rating(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<RatingBody>, JsonRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let Json(b) = body?;
    let h = s.session(&id)?;
    let mut sess = h.lock().await;
    let mut next = sess.clone();
    let status = next.submit_rating(
        &b.rater,
        &b.term,
        Rating {
            ambiguous: b.ambiguous,
            note: b.note,
            example_ref: b.example_ref,
        },
        (s.clock)(),
    )?;
    s.append(&id, &event_line(next.journal().last().expect("event recorded")))?;
    *sess = next;
    Ok(Json(json!({ "term": b.term, "status": status })))
}

#[derive(Deserialize)]
struct ResolutionBody {
    term: String,
    decision: bool,
    note: Option<String>,
}

async fn resolve(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<ResolutionBody>, JsonRejection>,
) -> ApiResult<Json<serde_json::Value>> {
    let Json(b) = body?;
    let h = s.session(&id)?;
    let mut sess = h.lock().await;
    let mut next = sess.clone();
    let status = next.resolve(&b.term, b.decision, b.note, (s.clock)())?;
    s.append(&id, &event_line(next.journal().last().expect("event recorded")))?;
    *sess = next;
    Ok(Json(json!({ "term": b.term, "status": status })))
}

async fn alpha(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Json<serde_json::Value>> {
    let h = s.session(&id)?;
    let sess = h.lock().await;
    let alpha = sess.session_alpha().map_err(|e| match e {
        Error::Validation { message, .. } => Error::Conflict(format!("alpha undefined: {message}")),
        other => other,
    })?;
    Ok(Json(json!({ "alpha": alpha, "per_term": sess.term_alpha() })))
}

async fn export(
    State(s): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
) -> ApiResult<Response> {
    let h = s.session(&id)?;
    let sess = h.lock().await;
    let body = sess.export_ava()?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

/// Journal file for `id` under `dir`.
pub fn journal_file(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.jsonl"))
}
