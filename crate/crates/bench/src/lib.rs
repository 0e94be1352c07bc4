//! Shared fixtures for the criterion benchmarks.

use vsense_core::frontend::{range_bin_of, range_fft};
use vsense_core::pipeline::ScenarioSpec;
use vsense_core::scene::Target;
use vsense_core::sim::synthesize_cube;
use vsense_core::vital::{analytic_spectrum, extract_phase, AnalyticSpectra, PhaseMatrix};
use vsense_core::{Complex64, RadarConfig, RadarCube, RangeProfileCube, Scene, VitalParams, Window};

pub const N_FFT: usize = 512;

/// One person at 2 m / 30° breathing at 15 RPM with a 72 BPM heartbeat.
pub fn scene(duration_s: f64) -> Scene {
    Scene {
        duration_s,
        targets: vec![Target {
            range_m: 2.0,
            angle_deg: 30.0,
            amplitude: 1.0,
            vitals: VitalParams::from_rates(15.0, 72.0),
        }],
        ..Scene::default()
    }
}

pub fn spec(duration_s: f64) -> ScenarioSpec {
    ScenarioSpec {
        name: "bench".into(),
        radar: RadarConfig::default(),
        scene: scene(duration_s),
        camera: Default::default(),
        pipeline: Default::default(),
        snr_db: 20.0,
        seed: 1,
        repetitions: 1,
    }
}

pub fn cube(duration_s: f64) -> RadarCube {
    let cfg = RadarConfig::default();
    let mut cube = synthesize_cube(&scene(duration_s), &cfg, None).expect("valid scene");
    cube.add_noise(20.0, 1.0, 1);
    cube
}

pub fn profiles(duration_s: f64) -> RangeProfileCube {
    range_fft(&cube(duration_s), N_FFT, Window::Hann).expect("n_fft covers the chirp")
}

/// Five-bin phase matrix around the target from the first Rx element.
pub fn phase(duration_s: f64) -> PhaseMatrix {
    let p = profiles(duration_s);
    let bin = range_bin_of(2.0, &p.config, N_FFT).expect("in range");
    let mut combiner = vec![Complex64::new(0.0, 0.0); p.channels()];
    combiner[0] = Complex64::new(1.0, 0.0);
    extract_phase(&p, &combiner, bin, 5).expect("bin window inside the profile")
}

pub fn spectra(duration_s: f64) -> AnalyticSpectra {
    analytic_spectrum(&phase(duration_s)).expect("long enough")
}
