use explore_core::exploration::{
    cluster_partition, plan_step, select_middle, update_coverage, CoverageStack, Decision, ExplorationState,
    PlannerConfig, PointCloud, RangeReturn,
};
use explore_core::geometry::{OrbitDirection, PathFunction, SplineCoeffs};
use explore_core::link::{
    decode_frame, encode_frame, AckPayload, ControlPayload, Frame, LinkConfig, LinkError, LinkSim, Payload,
    PositionPayload, RobotMode, StuckPayload, TelemetryPayload, MAX_TELEMETRY_VERTICES,
};
use explore_core::polygon::ConvexPolygon;
use explore_core::sim::{RobotPose, RobotState};
use explore_core::{Point2, Region2};
use proptest::prelude::*;

fn arb_cloud() -> impl Strategy<Value = (PointCloud, f64)> {
    (1usize..=200, 0.05f64..1.5).prop_flat_map(|(n, eps)| {
        let max_range = 6.0;
        (
            prop::collection::vec((0.0f64..max_range, prop::bool::weighted(0.15)), n),
            Just(eps),
        )
            .prop_map(move |(pts, eps)| {
                let span = 1.5;
                let returns = pts
                    .iter()
                    .enumerate()
                    .map(|(i, &(r, free))| {
                        let b = -span / 2.0 + span * i as f64 / n.max(2) as f64;
                        if free { RangeReturn::free(max_range, b) } else { RangeReturn::hit(r, b) }
                    })
                    .collect();
                (PointCloud::new(returns, 1.0, max_range).unwrap(), eps)
            })
    })
}

// union-find over the hit indices, joining consecutive hits within eps
fn union_find_partition(cloud: &PointCloud, eps: f64) -> Vec<Vec<usize>> {
    let rs = cloud.returns();
    let mut parent: Vec<usize> = (0..rs.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 1..rs.len() {
        if rs[i].free || rs[i - 1].free {
            continue;
        }
        let (a, b) = (rs[i - 1].local(), rs[i].local());
        if ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt() <= eps {
            let (ra, rb) = (find(&mut parent, i - 1), find(&mut parent, i));
            parent[ra] = rb;
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in (0..rs.len()).filter(|&i| !rs[i].free) {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn clustering_matches_union_find((cloud, eps) in arb_cloud()) {
        let mut got: Vec<Vec<usize>> = cluster_partition(&cloud, eps).unwrap().into_iter().map(|r| r.collect()).collect();
        got.sort();
        prop_assert_eq!(got, union_find_partition(&cloud, eps));
    }

    #[test]
    fn middle_of_equal_run(n in 1usize..=15, before in 0usize..6, after in 0usize..6, w in 0.1f64..20.0, lower in prop::bool::ANY) {
        let filler = if lower { Some(w * 0.5) } else { None };
        let mut scores = vec![filler; before];
        scores.extend(std::iter::repeat_n(Some(w), n));
        scores.extend(std::iter::repeat_n(filler, after));
        prop_assert_eq!(select_middle(&scores), Some(before + n.div_ceil(2) - 1));
    }

    #[test]
    fn selection_is_scale_invariant(levels in prop::collection::vec(prop::option::weighted(0.8, 1u32..5), 1..25), c in 0.01f64..100.0) {
        let scores: Vec<Option<f64>> = levels.iter().map(|l| l.map(f64::from)).collect();
        let scaled: Vec<Option<f64>> = scores.iter().map(|s| s.map(|v| v * c)).collect();
        prop_assert_eq!(select_middle(&scores), select_middle(&scaled));
    }

    #[test]
    fn open_scene_selects_exact_line(x in -50.0f64..50.0, y in -50.0f64..50.0, h in -std::f64::consts::PI..std::f64::consts::PI) {
        let cfg = PlannerConfig::default();
        let robot = RobotState::at_rest(RobotPose::new(x, y, h));
        let free = Region2::from_convex(ConvexPolygon::rect(Point2::new(-100.0, -100.0), Point2::new(100.0, 100.0)));
        let cloud = PointCloud::empty(0.1, cfg.fov.max_range);
        let (out, _) = plan_step(&robot, &cloud, ExplorationState::default(), &cfg, &free).unwrap();
        match out.decision {
            Decision::NewPath(phi) => prop_assert!(phi.coeffs.is_zero(), "{:?}", phi.coeffs),
            d => prop_assert!(false, "unexpected {:?}", d),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coverage_is_monotone(steps in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0, 0.5f64..3.0, 0.01f64..1.0), 1..25)) {
        let mut stack = CoverageStack::new();
        let mut t = 0.0;
        let mut last = 0.0;
        for (cx, cy, half, dt) in steps {
            t += dt;
            let region = Region2::from_convex(ConvexPolygon::rect(Point2::new(cx - half, cy - half), Point2::new(cx + half, cy + half)));
            let phi = PathFunction::line(Point2::new(cx, cy), 0.0, 0.1).unwrap();
            stack = update_coverage(stack, phi, t, &region).unwrap();
            prop_assert!(stack.explored().area() >= last - 1e-9);
            last = stack.explored().area();
        }
        prop_assert!(stack.entries().windows(2).all(|w| w[1].t > w[0].t));
        // stale stamp is refused and leaves the stack untouched
        let before = stack.len();
        let phi = PathFunction::new(Point2::new(0.0, 0.0), 0.0, SplineCoeffs::ZERO, OrbitDirection::Clockwise, 0.1).unwrap();
        prop_assert!(stack.clone().push(phi, t, &Region2::new()).is_err());
        prop_assert_eq!(stack.len(), before);
    }
}

fn arb_payload() -> impl Strategy<Value = Payload> {
    prop_oneof![
        (any::<i16>(), any::<i16>()).prop_map(|(vx, vy)| Payload::Control(ControlPayload { vx, vy })),
        (any::<i32>(), any::<i32>()).prop_map(|(x, y)| Payload::Position(PositionPayload { x, y })),
        (any::<i32>(), any::<i32>()).prop_map(|(x, y)| Payload::Stuck(StuckPayload { x, y })),
        (
            any::<i32>(),
            any::<i32>(),
            any::<i16>(),
            any::<u16>(),
            0u8..6,
            prop::collection::vec((any::<i16>(), any::<i16>()), 0..=MAX_TELEMETRY_VERTICES)
        )
            .prop_map(|(x, y, heading, coverage, m, vertices)| {
                Payload::Telemetry(TelemetryPayload { x, y, heading, coverage, mode: RobotMode::from_u8(m).unwrap(), vertices })
            }),
        (any::<u8>(), any::<u8>()).prop_map(|(seq, status)| Payload::Ack(AckPayload { seq, status })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn codec_round_trip(seq in any::<u8>(), payload in arb_payload()) {
        let f = Frame::new(seq, payload);
        let bytes = encode_frame(&f).unwrap();
        prop_assert!(bytes.len() <= 222);
        prop_assert_eq!(decode_frame(&bytes).unwrap(), f);
    }

    #[test]
    fn decode_is_total(bytes in prop::collection::vec(any::<u8>(), 0..300)) {
        match decode_frame(&bytes) {
            Ok(f) => prop_assert_eq!(encode_frame(&f).unwrap(), bytes),
            Err(e) => {
                let classified = matches!(e,
                    LinkError::TooShort(_) | LinkError::Oversize(_) | LinkError::BadCrc { .. }
                    | LinkError::UnsupportedVersion(_) | LinkError::UnknownKind(_)
                    | LinkError::TrailingBytes(_) | LinkError::InvalidField(_));
                prop_assert!(classified, "{:?}", e);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn single_bit_flips_are_rejected(seq in any::<u8>(), payload in arb_payload()) {
        let bytes = encode_frame(&Frame::new(seq, payload)).unwrap();
        for bit in 0..bytes.len() * 8 {
            let mut b = bytes.clone();
            b[bit / 8] ^= 1 << (bit % 8);
            prop_assert!(matches!(decode_frame(&b), Err(LinkError::BadCrc { .. })), "bit {}", bit);
        }
    }

    #[test]
    fn duty_cycle_holds_on_random_schedules(
        sends in prop::collection::vec((0.0f64..30.0, 4usize..=222), 1..120),
        duty in 0.01f64..0.2,
        window in 35.0f64..120.0,
    ) {
        let cfg = LinkConfig { duty_cycle_max: duty, window, ..LinkConfig::default() };
        let mut link = LinkSim::new(cfg).unwrap();
        let mut now = 0.0;
        let mut tx = Vec::new();
        for (gap, len) in sends {
            now += gap;
            let t = link.send(vec![0u8; len], now).unwrap();
            prop_assert!(t.tx_start >= now);
            tx.push((t.tx_start, t.tx_end));
        }
        prop_assert!(tx.windows(2).all(|w| w[1].0 >= w[0].1 - 1e-12));
        let load = |end: f64| -> f64 { tx.iter().map(|&(s, e)| (e.min(end) - s.max(end - window)).max(0.0)).sum() };
        for &(s, e) in &tx {
            for end in [e, s + window, e + window] {
                prop_assert!(load(end) <= cfg.budget() + 1e-9, "window ending {} carries {}", end, load(end));
            }
        }
    }
}
