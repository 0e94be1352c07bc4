//! Frame-by-frame localization with a strong mover in view.

mod common;

use vsense_core::aoa::range_angle_heatmap;
use vsense_core::frontend::{range_bin_of, range_fft};
use vsense_core::fusion::{localize, pixel_to_angle_window};
use vsense_core::scene::{synthesize_detections, target_id, Mover, Waypoint};
use vsense_core::sim::synthesize_cube;
use vsense_core::{AngleGrid, Scene, Window};

struct FrameStats {
    frames: usize,
    fused_hits: usize,
    argmax_hits: usize,
    mover_dominant: usize,
}

fn walker() -> Mover {
    Mover {
        waypoints: vec![
            Waypoint {
                t_s: 0.0,
                range_m: 1.2,
                angle_deg: -25.0,
                amplitude: 3.0,
            },
            Waypoint {
                t_s: 10.0,
                range_m: 4.5,
                angle_deg: -10.0,
                amplitude: 3.0,
            },
        ],
        body_motion: vec![],
    }
}

fn run(seed: u64) -> FrameStats {
    let spec = common::spec(
        "fusion_frames",
        Scene {
            duration_s: 10.0,
            targets: vec![common::target(15.0, 72.0)],
            movers: vec![walker()],
            ..Scene::default()
        },
        seed,
    );
    let cfg = &spec.radar;
    let mut cube = synthesize_cube(&spec.scene, cfg, None).unwrap();
    cube.add_noise(spec.snr_db, 1.0, seed);
    let n_fft = 512;
    let profiles = range_fft(&cube, n_fft, Window::Hann).unwrap();
    let grid = AngleGrid::default();
    let truth = (range_bin_of(2.0, cfg, n_fft).unwrap(), grid.bin_of(30.0).unwrap());
    let detections = synthesize_detections(&spec.scene, &spec.camera, seed + 1);
    let width = spec.camera.image_width_px;

    let mut stats = FrameStats {
        frames: 0,
        fused_hits: 0,
        argmax_hits: 0,
        mover_dominant: 0,
    };
    let near = |a: (usize, usize)| a.0.abs_diff(truth.0) <= 1 && a.1.abs_diff(truth.1) <= 1;
    for (f, m) in profiles.frame_chirps().enumerate() {
        let t = f as f64 / cfg.frame_rate_hz;
        let cam = ((t * spec.camera.fps).floor() as usize).min(detections.len() - 1);
        let b = detections[cam]
            .boxes
            .iter()
            .find(|b| b.true_id == target_id(0))
            .unwrap();
        let heatmap = range_angle_heatmap(&profiles, &grid, 1e-3, m, cfg.chirps_per_frame).unwrap();
        let window = pixel_to_angle_window(b.x, b.w, width, grid.bins).unwrap();
        let loc = localize(&heatmap, window).unwrap();
        let peak = heatmap.argmax();
        stats.frames += 1;
        stats.fused_hits += near((loc.range_bin, loc.angle_bin)) as usize;
        stats.argmax_hits += near(peak) as usize;
        let target_power = heatmap.power[[truth.0, truth.1]];
        if heatmap.power[peak] > target_power && !near(peak) {
            stats.mover_dominant += 1;
        }
    }
    stats
}

#[test]
fn box_constraint_keeps_the_target_when_the_mover_dominates() {
    let s = run(11);
    assert!(s.frames >= 190);
    assert!(
        s.fused_hits as f64 >= 0.95 * s.frames as f64,
        "fused {} of {}",
        s.fused_hits,
        s.frames
    );
    assert!(s.mover_dominant > 0);
    assert!(s.argmax_hits + s.mover_dominant <= s.frames);
    assert!(
        s.fused_hits > s.argmax_hits,
        "fused {} argmax {}",
        s.fused_hits,
        s.argmax_hits
    );
}
