//! HTTP and WebSocket front end.
//!
//! - `GET /api/snapshot`: current [`Snapshot`].
//! - `POST /api/command`: a [`CommandRequest`]; answers a [`CommandReply`]
//!   with 200, 409 on a driver conflict or 422 when the command cannot be
//!   encoded.
//! - `GET /api/events`: WebSocket. The server sends a snapshot, then every
//!   later event in order. Clients may send [`CommandRequest`]s on the same
//!   socket and get `{"type":"command_reply", ...}` back.

use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use tokio::sync::broadcast;

use crate::events::{CommandReply, CommandRequest, Event, Snapshot};
use crate::{CommandError, Headless, StationError};

pub struct AppState {
    station: Mutex<Headless>,
    feed: broadcast::Sender<Event>,
    published: Mutex<u64>,
}

pub type Shared = Arc<AppState>;

impl AppState {
    pub fn new(station: Headless) -> Shared {
        let (feed, _) = broadcast::channel(1024);
        Arc::new(Self { station: Mutex::new(station), feed, published: Mutex::new(0) })
    }

    fn lock(&self) -> MutexGuard<'_, Headless> {
        self.station.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Advances the station one service period and publishes new events.
    pub fn service_step(&self) -> Result<(), StationError> {
        let mut st = self.lock();
        st.service_step()?;
        let mut published = self.published.lock().unwrap_or_else(|p| p.into_inner());
        for e in st.session().events_since(*published) {
            // no subscribers is fine
            let _ = self.feed.send(e.clone());
        }
        *published = st.session().snapshot().last_event;
        Ok(())
    }

    pub fn snapshot(&self) -> Snapshot {
        self.lock().session().snapshot().clone()
    }

    /// Snapshot and a receiver positioned right after it. Publishing happens
    /// under the station lock, so nothing falls between the two.
    fn attach(&self) -> (Snapshot, broadcast::Receiver<Event>) {
        let st = self.lock();
        (st.session().snapshot().clone(), self.feed.subscribe())
    }

    pub fn submit(&self, req: &CommandRequest) -> Result<usize, CommandError> {
        self.lock().session_mut().submit_command(&req.client, req.command)
    }
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/api/snapshot", get(get_snapshot))
        .route("/api/command", post(post_command))
        .route("/api/events", get(events))
        .with_state(state)
}

/// Steps the station in real time scaled by `speed` until the task is dropped.
pub async fn run_clock(state: Shared, speed: f64) -> Result<(), StationError> {
    let period = state.lock().service_period();
    let mut every = tokio::time::interval(Duration::from_secs_f64(period / speed));
    every.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    loop {
        every.tick().await;
        state.service_step()?;
    }
}

async fn get_snapshot(State(state): State<Shared>) -> Json<Snapshot> {
    Json(state.snapshot())
}

fn reply_for(result: Result<usize, CommandError>) -> (StatusCode, CommandReply) {
    match result {
        Ok(queued) => (StatusCode::OK, CommandReply::Accepted { queued }),
        Err(e) => {
            let status = match e {
                CommandError::Conflict { .. } => StatusCode::CONFLICT,
                CommandError::Encoding(_) => StatusCode::UNPROCESSABLE_ENTITY,
            };
            (status, CommandReply::Rejected { error: e.code().into(), message: e.to_string() })
        }
    }
}

async fn post_command(State(state): State<Shared>, Json(req): Json<CommandRequest>) -> Response {
    let (status, body) = reply_for(state.submit(&req));
    (status, Json(body)).into_response()
}

async fn events(ws: WebSocketUpgrade, State(state): State<Shared>) -> Response {
    ws.on_upgrade(move |socket| stream(socket, state))
}

#[derive(Serialize)]
struct SocketReply {
    #[serde(rename = "type")]
    kind: &'static str,
    #[serde(flatten)]
    reply: CommandReply,
}

async fn send_json<T: Serialize>(socket: &mut WebSocket, value: &T) -> bool {
    let text = serde_json::to_string(value).expect("messages always serialize");
    socket.send(Message::Text(text.into())).await.is_ok()
}

async fn stream(mut socket: WebSocket, state: Shared) {
    let (snap, mut rx) = state.attach();
    let mut last = snap.last_event;
    if !send_json(&mut socket, &Event::Snapshot(snap)).await {
        return;
    }
    loop {
        tokio::select! {
            got = rx.recv() => match got {
                Ok(e) => {
                    if e.id() > last {
                        last = e.id();
                        if !send_json(&mut socket, &e).await {
                            return;
                        }
                    }
                }
                Err(broadcast::error::RecvError::Lagged(_)) => {
                    // too slow: start over from a fresh snapshot
                    let (snap, fresh) = state.attach();
                    last = snap.last_event;
                    rx = fresh;
                    if !send_json(&mut socket, &Event::Snapshot(snap)).await {
                        return;
                    }
                }
                Err(broadcast::error::RecvError::Closed) => return,
            },
            msg = socket.recv() => match msg {
                Some(Ok(Message::Text(text))) => {
                    let reply = match serde_json::from_str::<CommandRequest>(&text) {
                        Ok(req) => reply_for(state.submit(&req)).1,
                        Err(e) => CommandReply::Rejected { error: "malformed".into(), message: e.to_string() },
                    };
                    if !send_json(&mut socket, &SocketReply { kind: "command_reply", reply }).await {
                        return;
                    }
                }
                Some(Ok(Message::Close(_))) | None | Some(Err(_)) => return,
                Some(Ok(_)) => {}
            },
        }
    }
}
