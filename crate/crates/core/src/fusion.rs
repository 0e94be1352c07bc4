//! Camera-radar fusion: stationary-person filtering and box-constrained
//! heatmap search.
//!
//! Boxes are associated across frames by the simulator's ground-truth id.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aoa::Heatmap;
use crate::error::{Error, Result};
use crate::scene::DetectionFrame;

/// Upper bound of the range search (m).
pub const MAX_SEARCH_RANGE_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSample {
    pub timestamp: f64,
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedBox {
    pub id: String,
    pub history: Vec<BoxSample>,
    pub stationary: bool,
}

impl TrackedBox {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            history: Vec::new(),
            stationary: false,
        }
    }

    /// Appends a sample; timestamps must strictly increase.
    pub fn push(&mut self, sample: BoxSample) -> Result<()> {
        if let Some(last) = self.history.last() {
            if !(sample.timestamp > last.timestamp) {
                return Err(Error::InvalidArgument(format!(
                    "track {}: timestamp {} not after {}",
                    self.id, sample.timestamp, last.timestamp
                )));
            }
        }
        self.history.push(sample);
        Ok(())
    }

    fn window(&self, window_s: f64) -> &[BoxSample] {
        let Some(last) = self.history.last() else {
            return &[];
        };
        let from = self
            .history
            .iter()
            .position(|s| s.timestamp >= last.timestamp - window_s)
            .unwrap_or(self.history.len());
        &self.history[from..]
    }

    /// Mean `(x, w)` over the trailing window.
    pub fn mean_extent(&self, window_s: f64) -> Option<(f64, f64)> {
        let win = self.window(window_s);
        if win.is_empty() {
            return None;
        }
        let n = win.len() as f64;
        Some((
            win.iter().map(|s| s.x).sum::<f64>() / n,
            win.iter().map(|s| s.w).sum::<f64>() / n,
        ))
    }
}

/// Tracks keyed by id, built by a single writer from a detection stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrackStore {
    pub tracks: BTreeMap<String, TrackedBox>,
}

impl TrackStore {
    pub fn from_frames(frames: &[DetectionFrame]) -> Result<Self> {
        let mut store = Self::default();
        for f in frames {
            store.ingest(f)?;
        }
        Ok(store)
    }

    pub fn ingest(&mut self, frame: &DetectionFrame) -> Result<()> {
        for b in &frame.boxes {
            self.tracks
                .entry(b.true_id.clone())
                .or_insert_with(|| TrackedBox::new(b.true_id.clone()))
                .push(BoxSample {
                    timestamp: frame.timestamp,
                    x: b.x,
                    y: b.y,
                    w: b.w,
                    h: b.h,
                })?;
        }
        Ok(())
    }

    pub fn tracks(&self) -> Vec<TrackedBox> {
        self.tracks.values().cloned().collect()
    }
}

fn spread(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Keeps tracks whose x and width each vary by at most the thresholds over
/// the trailing `window_s` seconds. Tracks with fewer than two samples in the
/// window are excluded.
pub fn filter_stationary(tracks: &[TrackedBox], x_threshold: f64, w_threshold: f64, window_s: f64) -> Vec<TrackedBox> {
    tracks
        .iter()
        .filter_map(|t| {
            let win = t.window(window_s);
            if win.len() < 2 {
                return None;
            }
            let keep = spread(win.iter().map(|s| s.x)) <= x_threshold && spread(win.iter().map(|s| s.w)) <= w_threshold;
            keep.then(|| TrackedBox {
                stationary: true,
                ..t.clone()
            })
        })
        .collect()
}

/// Half-open interval `[start, end)` of angle bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngleWindow {
    pub start: usize,
    pub end: usize,
}

impl AngleWindow {
    pub fn len(&self) -> usize {
        self.end.saturating_sub(self.start)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, bin: usize) -> bool {
        bin >= self.start && bin < self.end
    }
}

/// Maps pixel span `[x, x + w]` onto angle bins:
/// `[floor(x·P_ang/P_img), ceil((x+w)·P_ang/P_img))`, clamped to `P_ang`.
pub fn pixel_to_angle_window(x: f64, w: f64, p_img: f64, p_ang: usize) -> Result<AngleWindow> {
    if !(w > 0.0) {
        return Err(Error::EmptyWindow);
    }
    let tol = 1e-9 * p_img;
    if !(x >= -tol && x + w <= p_img + tol) || !(p_img > 0.0) || p_ang == 0 {
        return Err(Error::InvalidArgument(format!(
            "box [{x}, {}] outside image width {p_img}",
            x + w
        )));
    }
    let scale = p_ang as f64 / p_img;
    let start = ((x * scale).floor().max(0.0) as usize).min(p_ang - 1);
    let end = (((x + w) * scale).ceil() as usize).clamp(start + 1, p_ang);
    Ok(AngleWindow { start, end })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetLocation {
    pub range_m: f64,
    pub angle_deg: f64,
    pub range_bin: usize,
    pub angle_bin: usize,
    pub source_id: Option<String>,
}

/// Maximum of the heatmap over ranges up to 10 m and the angle window. Ties go
/// to the smaller range bin, then the smaller angle bin.
pub fn localize(heatmap: &Heatmap, window: AngleWindow) -> Result<TargetLocation> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    if window.start >= heatmap.angle_bins() {
        return Err(Error::OutOfRange {
            index: window.start,
            limit: heatmap.angle_bins(),
        });
    }
    let end = window.end.min(heatmap.angle_bins());
    let mut best: Option<(usize, usize, f64)> = None;
    for (r, &range) in heatmap.range_axis.iter().enumerate().take(heatmap.range_bins()) {
        if range > MAX_SEARCH_RANGE_M {
            break;
        }
        for a in window.start..end {
            let p = heatmap.power[[r, a]];
            if best.is_none_or(|(_, _, b)| p > b) {
                best = Some((r, a, p));
            }
        }
    }
    let (range_bin, angle_bin, _) = best.ok_or(Error::EmptyWindow)?;
    Ok(TargetLocation {
        range_m: heatmap.range_axis[range_bin],
        angle_deg: heatmap.angle_axis[angle_bin],
        range_bin,
        angle_bin,
        source_id: None,
    })
}

/// One [`DetectionFrame`] per line.
pub fn write_detections_jsonl(path: &Path, frames: &[DetectionFrame]) -> Result<()> {
    let mut out = BufWriter::new(std::fs::File::create(path)?);
    for f in frames {
        serde_json::to_writer(&mut out, f)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_detections_jsonl(path: &Path) -> Result<Vec<DetectionFrame>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut frames = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        frames.push(serde_json::from_str(&line)?);
    }
    Ok(frames)
}
