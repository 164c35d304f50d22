use explore_core::link::LinkConfig;
use explore_core::sim::{builtin, TeleopInput, TickKind};
use explore_station::{CommandError, Event, Headless, HeadlessConfig, OperatorCommand};

fn station(name: &str) -> Headless {
    Headless::new(HeadlessConfig::new(builtin(name).unwrap())).unwrap()
}

/// Runs until the station has raised a stuck alert, or panics after `limit` s.
fn run_to_alert(h: &mut Headless, limit: f64) -> f64 {
    while h.time() < limit {
        h.service_step().unwrap();
        if let Some(Event::StuckAlert { t, .. }) =
            h.session().events().iter().rev().find(|e| matches!(e, Event::StuckAlert { .. }))
        {
            return *t;
        }
    }
    panic!("no stuck alert by {limit} s");
}

#[test]
fn tunnel_stuck_raises_alert_within_latency_bound() {
    let mut h = station("tunnel-open");
    let alert_t = run_to_alert(&mut h, 90.0);
    let sent = h.robot().stuck_sent()[0];
    let bound = LinkConfig::default().latency + 2.0 * h.service_period();
    assert!(alert_t - sent <= bound + 1e-9, "alert {alert_t} sent {sent} bound {bound}");
    let snap = h.session().snapshot();
    let [x, _] = snap.stuck.expect("open alert");
    assert!((x - 50.0).abs() <= 5.0, "stuck at x = {x}");
    assert_eq!(snap.mode.as_deref(), Some("stuck"));
    assert!(snap.explored.len() > 3);
    assert!(snap.coverage > 0.0);
}

#[test]
fn operator_drive_moves_a_stuck_robot() {
    let mut h = station("tunnel-open");
    run_to_alert(&mut h, 90.0);
    let before = h.robot().sim().state().pose.position;
    h.session_mut().submit_command("op", OperatorCommand::Drive { vx: 0.4, vy: 0.0 }).unwrap();
    let t0 = h.time();
    h.run_until(t0 + 4.0).unwrap();
    let after = h.robot().sim().state().pose.position;
    assert!(after.x - before.x > 0.3, "{before:?} -> {after:?}");
    assert!(h.robot().sim().outcome().is_none());
    assert_eq!(h.session().snapshot().stuck, None);
    assert!(matches!(h.robot().inputs()[0].1, TeleopInput::Drive(_)));
}

#[test]
fn resume_hands_control_back_within_one_plan_tick() {
    let mut h = station("tunnel-open");
    run_to_alert(&mut h, 90.0);
    let session = h.session_mut();
    session.submit_command("op", OperatorCommand::Drive { vx: -0.4, vy: 0.0 }).unwrap();
    h.run_until(h.time() + 3.0).unwrap();
    h.session_mut().submit_command("op", OperatorCommand::ResumeAutonomy).unwrap();
    h.run_until(h.time() + 40.0).unwrap();

    let (resumed_at, input) = *h.robot().inputs().last().unwrap();
    assert_eq!(input, TeleopInput::Resume);
    let dt = h.robot().sim().dt();
    let plan_period = dt * h.robot().sim().plan_period() as f64;
    let after: Vec<_> = h.robot().sim().trace().ticks.iter().filter(|r| r.t - dt >= resumed_at - 1e-9).collect();
    assert!(after.iter().all(|r| r.kind != TickKind::Teleop));
    let first_plan = after
        .iter()
        .find(|r| matches!(r.kind, TickKind::NewPath | TickKind::Continue | TickKind::Stuck | TickKind::Complete))
        .expect("planner ran after resume");
    assert!(first_plan.t - dt - resumed_at <= plan_period + 1e-9);
    let decisions: Vec<_> = h
        .session()
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::Decision { mode, .. } => Some(mode.as_str()),
            _ => None,
        })
        .collect();
    let stuck = decisions.iter().position(|m| *m == "stuck").expect("stuck reported");
    assert!(decisions[stuck + 1..].iter().any(|m| matches!(*m, "new_path" | "tracking")), "{decisions:?}");
}

#[test]
fn holding_robot_yields_heartbeat_only_feed() {
    let mut h = station("tunnel-open");
    run_to_alert(&mut h, 90.0);
    // telemetry is duty-cycle bound; one full window flushes the last report
    h.run_until(h.time() + 60.0).unwrap();
    let mark = h.session().snapshot().last_event;
    h.run_until(h.time() + 20.0).unwrap();
    let tail = h.session().events_since(mark);
    assert!(tail.len() >= 10, "{}", tail.len());
    assert!(tail.iter().all(|e| matches!(e, Event::Heartbeat { .. })), "{tail:?}");
}

#[test]
fn command_frames_leave_in_submission_order() {
    let mut h = station("tunnel-open");
    run_to_alert(&mut h, 90.0);
    let script = [
        OperatorCommand::Goto { x: 48.0, y: 2.0 },
        OperatorCommand::Stop,
        OperatorCommand::Drive { vx: -0.2, vy: 0.0 },
        OperatorCommand::Stop,
        OperatorCommand::ResumeAutonomy,
    ];
    for _ in 0..20 {
        for cmd in script {
            h.session_mut().submit_command("op", cmd).unwrap();
        }
        h.run_until(h.time() + 1.0).unwrap();
    }
    h.run_until(h.time() + 180.0).unwrap();
    let sent: Vec<_> = h
        .session()
        .events()
        .iter()
        .filter_map(|e| match e {
            Event::CommandSent { seq, kind, .. } => Some((*seq, kind.clone())),
            _ => None,
        })
        .collect();
    // stop, drive, stop collapse into the last control while they wait
    assert_eq!(sent.len(), 60);
    assert!(sent.windows(2).all(|w| w[1].0 == w[0].0.wrapping_add(1)));
    let kinds: Vec<_> = sent.iter().map(|s| s.1.as_str()).collect();
    assert!(kinds.chunks(3).all(|c| c == ["goto", "stop", "resume_autonomy"]));
}

#[test]
fn two_clients_conflict_while_one_drives() {
    let mut h = station("tunnel-open");
    h.run_until(2.0).unwrap();
    h.session_mut().submit_command("alice", OperatorCommand::Drive { vx: 0.3, vy: 0.0 }).unwrap();
    let err = h.session_mut().submit_command("bob", OperatorCommand::Goto { x: 3.0, y: 2.0 }).unwrap_err();
    assert_eq!(err, CommandError::Conflict { driver: "alice".into() });
    h.session_mut().submit_command("alice", OperatorCommand::ResumeAutonomy).unwrap();
    h.session_mut().submit_command("bob", OperatorCommand::Goto { x: 3.0, y: 2.0 }).unwrap();
}

#[test]
fn goto_outside_encodable_range_is_rejected() {
    let mut h = station("open-field");
    let err = h.session_mut().submit_command("op", OperatorCommand::Goto { x: 1.0, y: -3.0e6 }).unwrap_err();
    assert_eq!(err.code(), "encoding");
    assert_eq!(h.session().pending(), 0);
}

#[test]
fn headless_runs_are_deterministic() {
    let run = || {
        let mut h = station("tunnel-open");
        h.run_until(20.0).unwrap();
        h.session_mut().submit_command("op", OperatorCommand::Drive { vx: 0.1, vy: 0.2 }).unwrap();
        h.run_until(24.0).unwrap();
        h.session_mut().submit_command("op", OperatorCommand::ResumeAutonomy).unwrap();
        h.run_until(40.0).unwrap();
        (h.session().events().to_vec(), h.robot().sim().trace().clone())
    };
    assert_eq!(run(), run());
}

#[test]
fn snapshot_time_is_monotone() {
    let mut h = station("hallway-circuit");
    let mut last = 0.0;
    for _ in 0..300 {
        h.service_step().unwrap();
        let t = h.session().snapshot().t;
        assert!(t >= last);
        last = t;
    }
    assert!(h.session().events().windows(2).all(|w| w[1].t() >= w[0].t() && w[1].id() == w[0].id() + 1));
}
