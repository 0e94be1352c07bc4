//! Vital-sign extraction: multi-bin phase sequences decomposed by weighted
//! multi-channel VMD into respiration and heartbeat modes.

pub mod phase;
pub mod rates;
pub mod spectrum;
pub mod ssa;
pub mod vmd;
pub mod weights;

pub use phase::{extract_phase, unwrap_phase, PhaseMatrix};
pub use rates::{estimate_rates, Band, VitalRates};
pub use spectrum::{analytic_spectrum, pse, truncate_spectrum, AnalyticSpectra};
pub use ssa::select_mode_count;
pub use vmd::{wmc_vmd, Denominator, ModeSet, VmdParams};
pub use weights::{adaptive_weights, ChannelWeights};
