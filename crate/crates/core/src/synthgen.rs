//! Synthetic videos with known ground truth.
//!
//! Each frame carries a mask-rendered timestamp strip, a solid-colour class
//! marker and a low-contrast background pattern. The output byte stream is in
//! the ingest wire format, so the generator can stand in for a real decoder.

use std::collections::BTreeSet;
use std::io::{self, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digitmask::{DigitMaskSet, GrayBinaryImage, BLACK, WHITE};
use crate::geometry::{Rect, Size};
use crate::ingest::Frame;

/// 8x8 numeral glyphs, one byte per row, most significant bit leftmost.
const GLYPHS: [[u8; 8]; 10] = [
    [0x3C, 0x66, 0x6E, 0x76, 0x66, 0x66, 0x3C, 0x00],
    [0x18, 0x38, 0x18, 0x18, 0x18, 0x18, 0x7E, 0x00],
    [0x3C, 0x66, 0x06, 0x0C, 0x30, 0x60, 0x7E, 0x00],
    [0x3C, 0x66, 0x06, 0x1C, 0x06, 0x66, 0x3C, 0x00],
    [0x0C, 0x1C, 0x3C, 0x6C, 0x7E, 0x0C, 0x0C, 0x00],
    [0x7E, 0x60, 0x7C, 0x06, 0x06, 0x66, 0x3C, 0x00],
    [0x3C, 0x66, 0x60, 0x7C, 0x66, 0x66, 0x3C, 0x00],
    [0x7E, 0x66, 0x0C, 0x18, 0x18, 0x18, 0x18, 0x00],
    [0x3C, 0x66, 0x66, 0x3C, 0x66, 0x66, 0x3C, 0x00],
    [0x3C, 0x66, 0x66, 0x3E, 0x06, 0x66, 0x3C, 0x00],
];

/// Marker colour for each class index.
pub const MARKER_PALETTE: [[u8; 3]; 8] = [
    [20, 160, 20],
    [255, 140, 0],
    [30, 60, 220],
    [200, 30, 200],
    [0, 200, 200],
    [230, 230, 40],
    [140, 70, 20],
    [250, 250, 250],
];

/// Marker colour for frames the probe classifier should find ambiguous.
pub const AMBIGUITY_COLOR: [u8; 3] = [0, 0, 0];

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic video spec: {0}")]
    Spec(String),
    #[error("value {value} needs more than {max_digits} digits")]
    TooWide { value: u64, max_digits: usize },
    #[error("corruption plan: {0}")]
    Plan(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// The bundled numeral masks, scaled to `h x h` (`h >= 8`).
pub fn builtin_masks(h: usize) -> DigitMaskSet {
    assert!(h >= 8, "builtin masks need at least 8 pixels");
    let masks = GLYPHS
        .iter()
        .map(|glyph| {
            let mut px = vec![BLACK; h * h];
            for y in 0..h {
                let row = glyph[y * 8 / h];
                for x in 0..h {
                    if row & (0x80 >> (x * 8 / h)) != 0 {
                        px[y * h + x] = WHITE;
                    }
                }
            }
            GrayBinaryImage::from_pixels(h, h, px).expect("glyph pixels are binary")
        })
        .collect();
    DigitMaskSet::new(masks).expect("builtin glyphs are distinct")
}

fn decimal_digits(value: u64) -> Vec<u8> {
    value.to_string().bytes().map(|b| b - b'0').collect()
}

/// Renders `value` left-aligned into an `h x n*h` strip; unused slots are black.
pub fn render_timestamp_strip(value: u64, n: usize, masks: &DigitMaskSet) -> Result<GrayBinaryImage, SynthError> {
    let digits = decimal_digits(value);
    if digits.len() > n {
        return Err(SynthError::TooWide { value, max_digits: n });
    }
    let h = masks.digit_height();
    let w = n * h;
    let mut px = vec![BLACK; h * w];
    for (slot, &d) in digits.iter().enumerate() {
        let mask = masks.mask(d as usize);
        for y in 0..h {
            px[y * w + slot * h..y * w + slot * h + h].copy_from_slice(mask.row_span(y, 0, h));
        }
    }
    Ok(GrayBinaryImage::from_pixels(h, w, px).expect("mask pixels are binary"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedEvent {
    pub class: usize,
    pub start: usize,
    /// Inclusive.
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CorruptionKind {
    /// Zeroes the whole strip.
    BlankTimestamp,
    /// Inverts one pixel inside digit slot `position`.
    CorruptDigit { position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corruption {
    pub frame: usize,
    #[serde(flatten)]
    pub kind: CorruptionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticVideoSpec {
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub start_timestamp: u64,
    pub period: u64,
    pub events: Vec<PlannedEvent>,
    pub ambiguous: BTreeSet<usize>,
    pub corruptions: Vec<Corruption>,
    pub timestamp_rect: Rect,
    pub marker_rect: Rect,
    /// Varies the background pattern between videos.
    pub seed: u8,
}

impl Default for SyntheticVideoSpec {
    fn default() -> Self {
        Self {
            frame_count: 0,
            width: 480,
            height: 360,
            start_timestamp: 0,
            period: 66,
            events: Vec::new(),
            ambiguous: BTreeSet::new(),
            corruptions: Vec::new(),
            timestamp_rect: Rect::new(0, 0, 112, 16),
            marker_rect: Rect::new(392, 312, 32, 32),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub timestamps: Vec<u64>,
    pub labels: Vec<usize>,
}

impl SyntheticVideoSpec {
    pub fn frame_size(&self) -> Size {
        Size::new(self.width, self.height)
    }

    pub fn timestamp(&self, frame: usize) -> u64 {
        self.start_timestamp + frame as u64 * self.period
    }

    pub fn label(&self, frame: usize) -> usize {
        self.events
            .iter()
            .find(|e| (e.start..=e.end).contains(&frame))
            .map_or(0, |e| e.class)
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth {
            timestamps: (0..self.frame_count).map(|i| self.timestamp(i)).collect(),
            labels: (0..self.frame_count).map(|i| self.label(i)).collect(),
        }
    }

    pub fn validate(&self, masks: &DigitMaskSet) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Spec(m));
        let size = self.frame_size();
        let h = masks.digit_height();
        let ts = self.timestamp_rect;
        if ts.height != h || ts.width == 0 || !ts.width.is_multiple_of(h) {
            return bad(format!("timestamp rect {ts} does not hold whole {h}px digits"));
        }
        if !ts.fits_within(size) || !self.marker_rect.fits_within(size) {
            return bad(format!("timestamp or marker rect exceeds {size} frame"));
        }
        if self.marker_rect.area() == 0 || ts.intersects(&self.marker_rect) {
            return bad("marker must be non-empty and clear of the timestamp strip".into());
        }
        if self.period == 0 {
            return bad("period must be positive so timestamps strictly increase".into());
        }
        if self.frame_count > 0 {
            let last = self.timestamp(self.frame_count - 1);
            if decimal_digits(last).len() > ts.width / h {
                return bad(format!("timestamp {last} does not fit {} digits", ts.width / h));
            }
        }
        let mut events = self.events.clone();
        events.sort_by_key(|e| e.start);
        for e in &events {
            if e.start > e.end || e.end >= self.frame_count || e.class >= MARKER_PALETTE.len() {
                return bad(format!("event {e:?} is out of range"));
            }
        }
        if events.windows(2).any(|w| w[1].start <= w[0].end) {
            return bad("events overlap".into());
        }
        if self.ambiguous.iter().any(|&f| f >= self.frame_count) {
            return bad("ambiguous frame out of range".into());
        }
        Ok(())
    }

    fn check_plan(&self, masks: &DigitMaskSet) -> Result<(), SynthError> {
        let n = self.timestamp_rect.width / masks.digit_height();
        for c in &self.corruptions {
            check_corruption(c, self.frame_count, n)?;
            if let CorruptionKind::CorruptDigit { position } = c.kind {
                let digits = decimal_digits(self.timestamp(c.frame)).len();
                if position >= digits {
                    return Err(SynthError::Plan(format!(
                        "frame {} has {digits} digits, cannot corrupt position {position}",
                        c.frame
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_corruption(c: &Corruption, frame_count: usize, n: usize) -> Result<(), SynthError> {
    if c.frame >= frame_count {
        return Err(SynthError::Plan(format!("frame {} outside {frame_count} frames", c.frame)));
    }
    if let CorruptionKind::CorruptDigit { position } = c.kind {
        if position >= n {
            return Err(SynthError::Plan(format!("position {position} outside {n} slots")));
        }
    }
    Ok(())
}

/// Renders one uncorrupted frame.
pub fn render_frame(spec: &SyntheticVideoSpec, masks: &DigitMaskSet, index: usize, video_id: &Arc<str>) -> Frame {
    let (w, h) = (spec.width, spec.height);
    let mut px = Vec::with_capacity(w * h * 3);
    let s = spec.seed as usize;
    for y in 0..h {
        for x in 0..w {
            px.push((60 + (x * 3 + y + s) % 40) as u8);
            px.push((70 + (y * 2 + index % 7 + s) % 30) as u8);
            px.push((80 + (x + y * 5) % 20) as u8);
        }
    }
    let ts = spec.timestamp_rect;
    let strip = render_timestamp_strip(spec.timestamp(index), ts.width / masks.digit_height(), masks)
        .expect("validated spec timestamps fit the strip");
    for y in 0..ts.height {
        for x in 0..ts.width {
            let v = strip.get(y, x);
            let i = ((ts.y + y) * w + ts.x + x) * 3;
            px[i..i + 3].copy_from_slice(&[v, v, v]);
        }
    }
    let color = if spec.ambiguous.contains(&index) { AMBIGUITY_COLOR } else { MARKER_PALETTE[spec.label(index)] };
    let m = spec.marker_rect;
    for y in m.y..m.bottom() {
        for x in m.x..m.right() {
            let i = (y * w + x) * 3;
            px[i..i + 3].copy_from_slice(&color);
        }
    }
    Frame { index, width: w, height: h, pixels: px, video_id: Arc::clone(video_id) }
}

/// Applies corruptions to already-rendered frames, addressed by frame index.
pub fn inject_corruption(
    frames: &mut [Frame],
    plan: &[Corruption],
    timestamp_rect: Rect,
    digit_height: usize,
) -> Result<(), SynthError> {
    let n = timestamp_rect.width / digit_height;
    for c in plan {
        check_corruption(c, frames.len(), n)?;
    }
    for c in plan {
        corrupt_frame(&mut frames[c.frame], c.kind, timestamp_rect, digit_height);
    }
    Ok(())
}

fn corrupt_frame(frame: &mut Frame, kind: CorruptionKind, ts: Rect, h: usize) {
    let w = frame.width;
    match kind {
        CorruptionKind::BlankTimestamp => {
            for y in ts.y..ts.bottom() {
                frame.pixels[(y * w + ts.x) * 3..(y * w + ts.right()) * 3].fill(0);
            }
        }
        CorruptionKind::CorruptDigit { position } => {
            let (x, y) = (ts.x + position * h + h / 2, ts.y + h / 2);
            let i = (y * w + x) * 3;
            for v in &mut frame.pixels[i..i + 3] {
                *v = 255 - *v;
            }
        }
    }
}

/// Generates the full video in memory.
pub fn generate_synthetic_video(spec: &SyntheticVideoSpec, masks: &DigitMaskSet) -> Result<(Vec<u8>, GroundTruth), SynthError> {
    let mut bytes = Vec::with_capacity(spec.frame_count * spec.width * spec.height * 3);
    let truth = write_synthetic_video(spec, masks, &mut bytes)?;
    Ok((bytes, truth))
}

/// Streams the video frame by frame to `out` in the raw RGB wire format.
pub fn write_synthetic_video<W: Write>(
    spec: &SyntheticVideoSpec,
    masks: &DigitMaskSet,
    out: &mut W,
) -> Result<GroundTruth, SynthError> {
    for frame in synthetic_frames(spec, masks)? {
        out.write_all(&frame.pixels)?;
    }
    out.flush()?;
    Ok(spec.ground_truth())
}

/// Lazily rendered frames with the corruption plan applied.
pub fn synthetic_frames<'a>(
    spec: &'a SyntheticVideoSpec,
    masks: &'a DigitMaskSet,
) -> Result<impl Iterator<Item = Frame> + 'a, SynthError> {
    spec.validate(masks)?;
    spec.check_plan(masks)?;
    let video_id: Arc<str> = Arc::from("synthetic");
    let h = masks.digit_height();
    Ok((0..spec.frame_count).map(move |i| {
        let mut f = render_frame(spec, masks, i, &video_id);
        for c in spec.corruptions.iter().filter(|c| c.frame == i) {
            corrupt_frame(&mut f, c.kind, spec.timestamp_rect, h);
        }
        f
    }))
}
