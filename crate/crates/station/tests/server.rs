use std::time::Duration;

use explore_core::sim::builtin;
use explore_station::server::{router, AppState, Shared};
use explore_station::{CommandReply, CommandRequest, Event, Headless, HeadlessConfig, OperatorCommand, Snapshot};
use futures_util::{SinkExt, StreamExt};
use serde_json::Value;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

type Socket = WebSocketStream<MaybeTlsStream<TcpStream>>;

/// Serves a fresh tunnel-open station on an ephemeral port. The test drives
/// the clock itself through [`AppState::service_step`].
async fn serve() -> (Shared, String) {
    let state = AppState::new(Headless::new(HeadlessConfig::new(builtin("tunnel-open").unwrap())).unwrap());
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(state.clone());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (state, addr.to_string())
}

fn advance(state: &Shared, steps: usize) {
    for _ in 0..steps {
        state.service_step().unwrap();
    }
}

async fn next_json(ws: &mut Socket) -> Value {
    loop {
        let msg = tokio::time::timeout(Duration::from_secs(10), ws.next()).await.expect("message in time");
        match msg.expect("socket open").unwrap() {
            Message::Text(t) => return serde_json::from_str(&t).unwrap(),
            Message::Close(_) => panic!("closed"),
            _ => {}
        }
    }
}

async fn next_event(ws: &mut Socket) -> Event {
    serde_json::from_value(next_json(ws).await).unwrap()
}

async fn attach(addr: &str) -> (Socket, Snapshot) {
    let (mut ws, _) = connect_async(format!("ws://{addr}/api/events")).await.unwrap();
    match next_event(&mut ws).await {
        Event::Snapshot(s) => (ws, s),
        other => panic!("expected snapshot first, got {other:?}"),
    }
}

async fn post(addr: &str, client: &str, command: OperatorCommand) -> (u16, CommandReply) {
    let resp = reqwest::Client::new()
        .post(format!("http://{addr}/api/command"))
        .json(&CommandRequest { client: client.into(), command })
        .send()
        .await
        .unwrap();
    (resp.status().as_u16(), resp.json().await.unwrap())
}

#[tokio::test(flavor = "multi_thread")]
async fn snapshot_endpoint_reflects_station_state() {
    let (state, addr) = serve().await;
    advance(&state, 50);
    let snap: Snapshot = reqwest::get(format!("http://{addr}/api/snapshot")).await.unwrap().json().await.unwrap();
    assert_eq!(snap, state.snapshot());
    assert_eq!(snap.session, "tunnel-open");
    assert!(snap.pose.is_some());
    assert!((snap.t - 5.0).abs() < 1e-9);
}

#[tokio::test(flavor = "multi_thread")]
async fn command_endpoint_status_codes() {
    let (_state, addr) = serve().await;
    let (code, reply) = post(&addr, "alice", OperatorCommand::Drive { vx: 0.5, vy: 0.0 }).await;
    assert_eq!((code, reply), (200, CommandReply::Accepted { queued: 1 }));
    let (code, reply) = post(&addr, "bob", OperatorCommand::Drive { vx: 0.0, vy: 0.5 }).await;
    assert_eq!(code, 409);
    assert!(matches!(reply, CommandReply::Rejected { ref error, .. } if error == "conflict"), "{reply:?}");
    let (code, reply) = post(&addr, "alice", OperatorCommand::Goto { x: 5.0e6, y: 0.0 }).await;
    assert_eq!(code, 422);
    assert!(matches!(reply, CommandReply::Rejected { ref error, .. } if error == "encoding"), "{reply:?}");

    let resp = reqwest::Client::new()
        .post(format!("http://{addr}/api/command"))
        .header("content-type", "application/json")
        .body(r#"{"client":"alice","command":{"kind":"fly"}}"#)
        .send()
        .await
        .unwrap();
    assert!(resp.status().is_client_error());
}

#[tokio::test(flavor = "multi_thread")]
async fn event_socket_sends_snapshot_then_consecutive_events() {
    let (state, addr) = serve().await;
    advance(&state, 20);
    let (mut ws, snap) = attach(&addr).await;
    assert_eq!(snap, state.snapshot());
    advance(&state, 100);
    let newest = state.snapshot().last_event;
    assert!(newest > snap.last_event);
    let mut expect = snap.last_event + 1;
    while expect <= newest {
        let e = next_event(&mut ws).await;
        assert_eq!(e.id(), expect, "{e:?}");
        expect += 1;
    }
}

#[tokio::test(flavor = "multi_thread")]
async fn reconnect_replays_snapshot_before_increments() {
    let (state, addr) = serve().await;
    let (mut ws, first) = attach(&addr).await;
    advance(&state, 30);
    let e = next_event(&mut ws).await;
    assert_eq!(e.id(), first.last_event + 1);
    ws.close(None).await.unwrap();
    drop(ws);

    // events produced while nobody listens are folded into the next snapshot
    advance(&state, 100);
    let (mut ws, snap) = attach(&addr).await;
    assert_eq!(snap, state.snapshot());
    assert!(snap.trajectory.len() > 1);
    advance(&state, 30);
    let e = next_event(&mut ws).await;
    assert_eq!(e.id(), snap.last_event + 1);
    assert!(e.t() >= snap.t);
}

#[tokio::test(flavor = "multi_thread")]
async fn commands_over_the_socket_are_answered_in_band() {
    let (state, addr) = serve().await;
    let (mut ws, _) = attach(&addr).await;
    let (mut other, _) = attach(&addr).await;
    let send = |client: &str, command| {
        Message::Text(serde_json::to_string(&CommandRequest { client: client.into(), command }).unwrap().into())
    };
    ws.send(send("alice", OperatorCommand::Goto { x: 3.0, y: 2.0 })).await.unwrap();
    let reply = next_json(&mut ws).await;
    assert_eq!(reply["type"], "command_reply");
    assert_eq!(reply["status"], "accepted");

    other.send(send("bob", OperatorCommand::Stop)).await.unwrap();
    let reply = next_json(&mut other).await;
    assert_eq!(reply["status"], "rejected");
    assert_eq!(reply["error"], "conflict");

    other.send(Message::Text("not json".into())).await.unwrap();
    assert_eq!(next_json(&mut other).await["error"], "malformed");

    advance(&state, 10);
    let sent = loop {
        if let Event::CommandSent { client, kind, .. } = next_event(&mut ws).await {
            break (client, kind);
        }
    };
    assert_eq!(sent, ("alice".to_string(), "goto".to_string()));
}
