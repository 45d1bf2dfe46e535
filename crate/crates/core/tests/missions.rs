use std::f64::consts::PI;

use cpguide::geom::Vec2;
use cpguide::metrics::{summarize, PhaseKind};
use cpguide::path::ReferencePath;
use cpguide::scenario::{sweep, PathSpec, ScenarioConfig};
use cpguide::supervisor::{run_mission, Controller, MissionConfig};
use cpguide::vehicle::VehicleState;
use cpguide::Error;
use proptest::prelude::*;

fn rank(p: PhaseKind) -> u8 {
    match p {
        PhaseKind::Midcourse => 0,
        PhaseKind::CircleFollow => 1,
        PhaseKind::CloseRange => 2,
        PhaseKind::Done => 3,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn phases_never_regress(bearing in -PI..PI, dist in 35.0..80.0f64, dpsi in -1.2..1.2f64) {
        let path = ReferencePath::sinusoid(0.0, 150.0).unwrap();
        let start = path.start().position;
        let p = start + Vec2::from_angle(bearing) * dist;
        let heading = (start - p).angle() + dpsi;
        let config = MissionConfig::new(5.0, 10.0).with_controller(Controller::Baseline);
        match run_mission(&path, &config, VehicleState::new(p, heading, 5.0)) {
            Ok(run) => {
                prop_assert!(run.samples.windows(2).all(|w| rank(w[0].phase) <= rank(w[1].phase)));
                prop_assert_eq!(run.samples.last().map(|s| s.phase), Some(PhaseKind::Done));
                prop_assert!(!run.truncated);
            }
            Err(e) => prop_assert!(matches!(e, Error::NoFeasibleGeometry(_)), "{e}"),
        }
    }
}

#[test]
fn sweep_rows_follow_heading_order() {
    let mut config = ScenarioConfig::default();
    config.guidance.optimize = false;
    config.guidance.gains = [1.0, 2.0];
    config.sweep.headings_deg = vec![60.0, -10.0, 20.0];
    let path = config.path.build().unwrap();
    let rows = sweep(&path, &config).unwrap();
    let headings: Vec<f64> = rows.iter().map(|r| r.heading_deg).collect();
    assert_eq!(headings, config.sweep.headings_deg);
    assert_eq!(rows, sweep(&path, &config).unwrap());
    for r in &rows {
        let run = run_mission(
            &path,
            &config.mission_config(Controller::Proposed),
            config.initial_state(r.heading_deg),
        )
        .unwrap();
        assert_eq!(r.proposed, Some(summarize(&run).unwrap()));
    }
}

#[test]
fn polyline_scenario_tracks_its_samples() {
    let mut config = ScenarioConfig::default();
    config.path = PathSpec::Polyline {
        points: (0..30)
            .map(|k| [k as f64 * 4.0, 6.0 * (k as f64 * 0.2).sin()])
            .collect(),
        file: None,
    };
    config.vehicle.position = [0.0, -2.0];
    config.vehicle.heading_deg = 20.0;
    config.guidance.optimize = false;
    config.validate().unwrap();
    let path = config.path.build().unwrap();
    for c in [Controller::Baseline, Controller::Proposed] {
        let run = run_mission(&path, &config.mission_config(c), config.initial_state(20.0)).unwrap();
        let s = summarize(&run).unwrap();
        assert!(s.d_rms < 1.0, "{c:?}: {s:?}");
        assert!(!run.truncated);
    }
}
