#![allow(dead_code)]

use vsense_core::scene::{BodyMotion, Mover, Target, Waypoint};
use vsense_core::{PipelineParams, ScenarioSpec, Scene, VitalParams};

pub fn target(rr: f64, hr: f64) -> Target {
    Target {
        range_m: 2.0,
        angle_deg: 30.0,
        amplitude: 1.0,
        vitals: VitalParams::from_rates(rr, hr),
    }
}

pub fn spec(name: &str, scene: Scene, seed: u64) -> ScenarioSpec {
    ScenarioSpec {
        name: name.into(),
        radar: Default::default(),
        scene,
        camera: Default::default(),
        pipeline: PipelineParams::default(),
        snr_db: 20.0,
        seed,
        repetitions: 1,
    }
}

pub fn clean(seed: u64) -> ScenarioSpec {
    spec(
        "clean",
        Scene {
            duration_s: 30.0,
            targets: vec![target(15.0, 72.0)],
            ..Scene::default()
        },
        seed,
    )
}

/// A person pacing slowly between 1.8 m and 2.2 m around -45°, crossing the
/// target's range every 5 s with 2.5× its echo amplitude.
pub fn pacing_mover() -> Mover {
    let waypoints = (0..=6)
        .map(|i| Waypoint {
            t_s: 5.0 * i as f64,
            range_m: if i % 2 == 0 { 1.8 } else { 2.2 },
            angle_deg: if i % 2 == 0 { -50.0 } else { -40.0 },
            amplitude: 2.5,
        })
        .collect();
    Mover {
        waypoints,
        body_motion: vec![],
    }
}

pub fn range_overlap(seed: u64, beamforming: bool) -> ScenarioSpec {
    let mut s = spec(
        "range_overlap",
        Scene {
            duration_s: 30.0,
            targets: vec![target(15.0, 72.0)],
            movers: vec![pacing_mover()],
            ..Scene::default()
        },
        seed,
    );
    s.pipeline.beamforming = beamforming;
    s
}

pub fn body_motion(seed: u64) -> ScenarioSpec {
    let mut t = target(18.0, 80.0);
    t.vitals.body_motion = vec![BodyMotion {
        freq_hz: 1.0,
        amp_m: 4e-4,
        start_s: 12.0,
        stop_s: 18.0,
    }];
    spec(
        "body_motion",
        Scene {
            duration_s: 30.0,
            targets: vec![t],
            ..Scene::default()
        },
        seed,
    )
}
