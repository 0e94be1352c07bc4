//! Contact-free vital-sign sensing with an FMCW MIMO radar assisted by a camera.
//!
//! The crate is organised along the processing chain:
//!
//! * [`scene`] and [`sim`] generate synthetic radar cubes and camera detections
//!   with known ground truth.
//! * [`frontend`] turns raw cubes into complex range profiles.
//! * [`aoa`] builds MVDR range-angle heatmaps.
//! * [`fusion`] selects stationary people from the detection stream and
//!   localizes them on the heatmap.
//! * [`beamform`] computes transmit/receive steering weights and patterns.
//! * [`vital`] extracts multi-bin phase sequences and decomposes them with a
//!   weighted multi-channel VMD to estimate respiration and heart rate.
//! * [`pipeline`] wires everything into reproducible scenario runs.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aoa;
pub mod beamform;
pub mod config;
pub mod error;
pub mod frontend;
pub mod fusion;
pub mod pipeline;
pub mod scene;
pub mod sim;
pub mod vital;

pub use aoa::{AngleGrid, Heatmap};
pub use beamform::{BeamRole, BeamWeights};
pub use config::{RadarConfig, SPEED_OF_LIGHT};
pub use error::{Error, Result};
pub use frontend::{RangeProfileCube, Window};
pub use fusion::{AngleWindow, TargetLocation, TrackStore, TrackedBox};
pub use pipeline::{PipelineParams, RunOutput, RunReport, ScenarioSpec};
pub use scene::{CameraConfig, DetectionBox, DetectionFrame, Scene, VitalParams};
pub use sim::RadarCube;
pub use vital::{ChannelWeights, ModeSet, PhaseMatrix, VitalRates};

pub use num_complex::Complex64;
