//! Frame classifier contract and the bundled implementations.
//!
//! Real models live behind [`FrameClassifier`]; out-of-process runners are
//! reached through [`IpcClassifier`], which speaks a length-prefixed binary
//! protocol over the runner's stdin/stdout:
//!
//! ```text
//! request:  u32 frames, u32 height, u32 width, u32 channels, frames*height*width*channels bytes
//! response: u32 frames, u32 k, frames*k f32 (row-major)
//! ```
//!
//! All integers and floats are little-endian.

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{Rect, Size};
use crate::ingest::{Frame, FrameBatch};
use crate::synthgen::{AMBIGUITY_COLOR, MARKER_PALETTE};

/// Rows must sum to one within this tolerance.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("inference failed for frames {first}..={last}: {reason}")]
    Inference { first: usize, last: usize, reason: String },
    #[error("classifier configuration: {0}")]
    Config(String),
    #[error("model runner protocol: {0}")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassCatalog {
    names: Vec<String>,
    target_class: usize,
}

impl Default for ClassCatalog {
    fn default() -> Self {
        Self { names: vec!["not_work_zone".into(), "work_zone".into()], target_class: 1 }
    }
}

impl ClassCatalog {
    pub fn new(names: Vec<String>, target_class: usize) -> Result<Self, ClassifyError> {
        if names.len() < 2 {
            return Err(ClassifyError::Config("at least two classes are required".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ClassifyError::Config(format!("duplicate class name {n:?}")));
            }
        }
        if target_class >= names.len() {
            return Err(ClassifyError::Config(format!("target class {target_class} out of range")));
        }
        Ok(Self { names, target_class })
    }

    /// Builds a catalog whose target is given by name.
    pub fn with_target_name(names: Vec<String>, target: &str) -> Result<Self, ClassifyError> {
        let idx = names
            .iter()
            .position(|n| n == target)
            .ok_or_else(|| ClassifyError::Config(format!("target class {target:?} not in catalog")))?;
        Self::new(names, idx)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, class: usize) -> &str {
        &self.names[class]
    }

    pub fn target_class(&self) -> usize {
        self.target_class
    }

    pub fn target_name(&self) -> &str {
        &self.names[self.target_class]
    }
}

/// `l` probability distributions over `k` classes, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    k: usize,
    data: Vec<f64>,
}

fn check_row(row: &[f64], k: usize) -> Result<(), String> {
    if row.len() != k {
        return Err(format!("row has {} entries, expected {k}", row.len()));
    }
    if row.iter().any(|p| !p.is_finite() || *p < -SIMPLEX_TOLERANCE || *p > 1.0 + SIMPLEX_TOLERANCE) {
        return Err(format!("row {row:?} has values outside [0, 1]"));
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
        return Err(format!("row {row:?} sums to {sum}"));
    }
    Ok(())
}

impl ProbabilityMatrix {
    pub fn empty(k: usize) -> Self {
        Self { k, data: Vec::new() }
    }

    pub fn from_rows<R: AsRef<[f64]>>(k: usize, rows: &[R]) -> Result<Self, ClassifyError> {
        let mut m = Self::empty(k);
        for (i, r) in rows.iter().enumerate() {
            check_row(r.as_ref(), k).map_err(|reason| ClassifyError::Inference { first: i, last: i, reason })?;
            m.data.extend_from_slice(r.as_ref());
        }
        Ok(m)
    }

    /// Appends rows without validation; callers guarantee the simplex.
    pub(crate) fn push_row_unchecked(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.k);
        self.data.extend_from_slice(row);
    }

    pub fn append(&mut self, other: &ProbabilityMatrix) {
        assert_eq!(self.k, other.k, "class count mismatch");
        self.data.extend_from_slice(&other.data);
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        if self.k == 0 {
            0
        } else {
            self.data.len() / self.k
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k.max(1))
    }

    pub fn column(&self, class: usize) -> Vec<f64> {
        self.rows().map(|r| r[class]).collect()
    }
}

pub trait FrameClassifier: Send {
    fn num_classes(&self) -> usize;

    /// One distribution per frame, in batch order.
    fn classify(&mut self, batch: &FrameBatch) -> Result<Vec<Vec<f64>>, ClassifyError>;
}

impl<C: FrameClassifier + ?Sized> FrameClassifier for Box<C> {
    fn num_classes(&self) -> usize {
        (**self).num_classes()
    }

    fn classify(&mut self, batch: &FrameBatch) -> Result<Vec<Vec<f64>>, ClassifyError> {
        (**self).classify(batch)
    }
}

/// Runs `classifier` on `batch` and checks the result against the contract.
pub fn classify_batch<C: FrameClassifier + ?Sized>(
    classifier: &mut C,
    batch: &FrameBatch,
) -> Result<ProbabilityMatrix, ClassifyError> {
    let (first, last) = (batch.first_index(), batch.last_index());
    let fail = |reason: String| ClassifyError::Inference { first, last, reason };
    let rows = classifier.classify(batch).map_err(|e| match e {
        ClassifyError::Inference { .. } => e,
        other => fail(other.to_string()),
    })?;
    if rows.len() != batch.len() {
        return Err(fail(format!("{} rows for {} frames", rows.len(), batch.len())));
    }
    let k = classifier.num_classes();
    let mut m = ProbabilityMatrix::empty(k);
    for (i, r) in rows.iter().enumerate() {
        check_row(r, k).map_err(|reason| ClassifyError::Inference { first: first + i, last: first + i, reason })?;
        m.push_row_unchecked(r);
    }
    Ok(m)
}

/// Maps a marker rectangle given in raw-frame pixels into classifier-input
/// pixels after cropping to `crop` and rescaling to `input`, keeping only
/// the inner half so resampling at the edges does not blend in background.
pub fn project_marker(marker: Rect, crop: Rect, input: Size) -> Option<Rect> {
    let x0 = marker.x.max(crop.x);
    let y0 = marker.y.max(crop.y);
    let x1 = marker.right().min(crop.right());
    let y1 = marker.bottom().min(crop.bottom());
    if x0 >= x1 || y0 >= y1 {
        return None;
    }
    let sx = input.width as f64 / crop.width as f64;
    let sy = input.height as f64 / crop.height as f64;
    let map = |v: usize, o: usize, s: f64| (v - o) as f64 * s;
    let (fx0, fx1) = (map(x0, crop.x, sx), map(x1, crop.x, sx));
    let (fy0, fy1) = (map(y0, crop.y, sy), map(y1, crop.y, sy));
    let (qw, qh) = ((fx1 - fx0) / 4.0, (fy1 - fy0) / 4.0);
    let (ix0, ix1) = ((fx0 + qw).ceil() as usize, (fx1 - qw).floor() as usize);
    let (iy0, iy1) = ((fy0 + qh).ceil() as usize, (fy1 - qh).floor() as usize);
    if ix0 >= ix1 || iy0 >= iy1 {
        return None;
    }
    Some(Rect::new(ix0, iy0, ix1 - ix0, iy1 - iy0))
}

/// Distance under which a marker's mean colour is taken to be a palette entry.
const MARKER_COLOR_TOLERANCE: f64 = 40.0;

/// Reads the synthetic scene marker and reports a fixed confidence for the
/// class it encodes.
#[derive(Debug, Clone)]
pub struct ProbeClassifier {
    k: usize,
    confidence: f64,
    marker: Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkerReading {
    Class(usize),
    Ambiguous,
    Unreadable,
}

/// Builds a probe classifier that reads its marker from `marker`, given in
/// classifier-input pixels.
pub fn probe_classifier(catalog: &ClassCatalog, confidence: f64, marker: Rect) -> Result<ProbeClassifier, ClassifyError> {
    let k = catalog.len();
    if k > MARKER_PALETTE.len() {
        return Err(ClassifyError::Config(format!("probe supports at most {} classes", MARKER_PALETTE.len())));
    }
    if !(confidence > 1.0 / k as f64 && confidence <= 1.0) {
        return Err(ClassifyError::Config(format!("confidence {confidence} must be in (1/{k}, 1]")));
    }
    if marker.area() == 0 {
        return Err(ClassifyError::Config("empty marker region".into()));
    }
    Ok(ProbeClassifier { k, confidence, marker })
}

impl ProbeClassifier {
    pub fn read_marker(&self, frame: &Frame) -> MarkerReading {
        let m = self.marker;
        if !m.fits_within(frame.size()) {
            return MarkerReading::Unreadable;
        }
        let mut sum = [0f64; 3];
        for y in m.y..m.bottom() {
            for x in m.x..m.right() {
                let p = frame.pixel(x, y);
                for c in 0..3 {
                    sum[c] += p[c] as f64;
                }
            }
        }
        let n = m.area() as f64;
        let mean = sum.map(|s| s / n);
        let dist = |c: &[u8; 3]| (0..3).map(|i| (mean[i] - c[i] as f64).powi(2)).sum::<f64>().sqrt();
        if dist(&AMBIGUITY_COLOR) < MARKER_COLOR_TOLERANCE {
            return MarkerReading::Ambiguous;
        }
        MARKER_PALETTE[..self.k]
            .iter()
            .enumerate()
            .map(|(i, c)| (i, dist(c)))
            .filter(|(_, d)| *d < MARKER_COLOR_TOLERANCE)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map_or(MarkerReading::Unreadable, |(i, _)| MarkerReading::Class(i))
    }

    fn row_for(&self, reading: MarkerReading) -> Vec<f64> {
        let class = match reading {
            MarkerReading::Ambiguous => return vec![1.0 / self.k as f64; self.k],
            MarkerReading::Class(c) => c,
            MarkerReading::Unreadable => 0,
        };
        let rest = (1.0 - self.confidence) / (self.k - 1) as f64;
        (0..self.k).map(|i| if i == class { self.confidence } else { rest }).collect()
    }
}

impl FrameClassifier for ProbeClassifier {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn classify(&mut self, batch: &FrameBatch) -> Result<Vec<Vec<f64>>, ClassifyError> {
        Ok(batch.frames().iter().map(|f| self.row_for(self.read_marker(f))).collect())
    }
}

/// Returns preloaded rows, looked up by frame index.
#[derive(Debug, Clone)]
pub struct ScriptedClassifier {
    k: usize,
    rows: Arc<Vec<Vec<f64>>>,
}

impl ScriptedClassifier {
    pub fn new(k: usize, rows: Vec<Vec<f64>>) -> Self {
        Self { k, rows: Arc::new(rows) }
    }

    /// Reads one comma-separated row of `k` probabilities per line.
    pub fn from_file(path: &Path, k: usize) -> Result<Self, ClassifyError> {
        let text = std::fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| ClassifyError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
            if row.len() != k {
                return Err(ClassifyError::Config(format!("{}:{}: expected {k} values", path.display(), n + 1)));
            }
            rows.push(row);
        }
        Ok(Self::new(k, rows))
    }
}

impl FrameClassifier for ScriptedClassifier {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn classify(&mut self, batch: &FrameBatch) -> Result<Vec<Vec<f64>>, ClassifyError> {
        batch
            .frames()
            .iter()
            .map(|f| {
                self.rows.get(f.index).cloned().ok_or_else(|| ClassifyError::Inference {
                    first: f.index,
                    last: f.index,
                    reason: format!("no scripted row for frame {}", f.index),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceRequest {
    pub frames: u32,
    pub height: u32,
    pub width: u32,
    pub channels: u32,
    pub data: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResponse {
    pub frames: u32,
    pub k: u32,
    pub probabilities: Vec<f32>,
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn dim(v: usize, what: &str) -> Result<u32, ClassifyError> {
    u32::try_from(v).map_err(|_| ClassifyError::Protocol(format!("{what} {v} exceeds u32")))
}

impl InferenceRequest {
    pub fn from_batch(batch: &FrameBatch) -> Result<Self, ClassifyError> {
        let first = &batch.frames()[0];
        if batch.frames().iter().any(|f| f.width != first.width || f.height != first.height) {
            return Err(ClassifyError::Protocol("frames in a batch must share one size".into()));
        }
        let mut data = Vec::with_capacity(batch.len() * first.pixels.len());
        for f in batch.frames() {
            data.extend_from_slice(&f.pixels);
        }
        Ok(Self {
            frames: dim(batch.len(), "frame count")?,
            height: dim(first.height, "height")?,
            width: dim(first.width, "width")?,
            channels: 3,
            data,
        })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for v in [self.frames, self.height, self.width, self.channels] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&self.data)?;
        w.flush()
    }

    /// `Ok(None)` on a clean end of stream before a new request.
    pub fn read_from<R: Read>(r: &mut R) -> Result<Option<Self>, ClassifyError> {
        let mut first = [0u8; 4];
        match r.read(&mut first[..1])? {
            0 => return Ok(None),
            _ => r.read_exact(&mut first[1..])?,
        }
        let frames = u32::from_le_bytes(first);
        let height = read_u32(r)?;
        let width = read_u32(r)?;
        let channels = read_u32(r)?;
        let len = frames as u64 * height as u64 * width as u64 * channels as u64;
        let len = usize::try_from(len).map_err(|_| ClassifyError::Protocol("request too large".into()))?;
        let mut data = vec![0u8; len];
        r.read_exact(&mut data)?;
        Ok(Some(Self { frames, height, width, channels, data }))
    }

    /// Rebuilds frames numbered from zero.
    pub fn to_batch(&self) -> Result<FrameBatch, ClassifyError> {
        if self.channels != 3 {
            return Err(ClassifyError::Protocol(format!("expected 3 channels, got {}", self.channels)));
        }
        let size = Size::new(self.width as usize, self.height as usize);
        let per = size.width * size.height * 3;
        let id: Arc<str> = Arc::from("ipc");
        let frames = self
            .data
            .chunks_exact(per.max(1))
            .enumerate()
            .map(|(i, px)| Frame { index: i, width: size.width, height: size.height, pixels: px.to_vec(), video_id: Arc::clone(&id) })
            .collect();
        FrameBatch::new(frames).map_err(|e| ClassifyError::Protocol(e.to_string()))
    }
}

impl InferenceResponse {
    pub fn from_rows(rows: &[Vec<f64>], k: usize) -> Result<Self, ClassifyError> {
        Ok(Self {
            frames: dim(rows.len(), "frame count")?,
            k: dim(k, "class count")?,
            probabilities: rows.iter().flatten().map(|&p| p as f32).collect(),
        })
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&self.frames.to_le_bytes())?;
        w.write_all(&self.k.to_le_bytes())?;
        for p in &self.probabilities {
            w.write_all(&p.to_le_bytes())?;
        }
        w.flush()
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self, ClassifyError> {
        let frames = read_u32(r)?;
        let k = read_u32(r)?;
        let n = frames as usize * k as usize;
        let mut bytes = vec![0u8; n * 4];
        r.read_exact(&mut bytes)?;
        let probabilities = bytes.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
        Ok(Self { frames, k, probabilities })
    }

    /// Rows widened to f64 and renormalized to absorb f32 rounding.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.probabilities
            .chunks_exact(self.k.max(1) as usize)
            .map(|r| {
                let row: Vec<f64> = r.iter().map(|&p| p as f64).collect();
                let sum: f64 = row.iter().sum();
                if sum > 0.0 {
                    row.iter().map(|p| p / sum).collect()
                } else {
                    row
                }
            })
            .collect()
    }
}

/// Answers requests from `input` with `classifier` until end of stream.
pub fn serve_model_runner<R: Read, W: Write, C: FrameClassifier + ?Sized>(
    input: &mut R,
    output: &mut W,
    classifier: &mut C,
) -> Result<usize, ClassifyError> {
    let mut served = 0;
    while let Some(req) = InferenceRequest::read_from(input)? {
        let batch = req.to_batch()?;
        let rows = classifier.classify(&batch)?;
        InferenceResponse::from_rows(&rows, classifier.num_classes())?.write_to(output)?;
        served += 1;
    }
    Ok(served)
}

/// Classifier backed by an external model-runner process.
pub struct IpcClassifier {
    k: usize,
    child: Child,
    stdin: Option<BufWriter<ChildStdin>>,
    stdout: BufReader<ChildStdout>,
}

impl IpcClassifier {
    /// Spawns `argv` and expects it to serve `k`-class responses.
    pub fn spawn(argv: &[String], k: usize) -> Result<Self, ClassifyError> {
        let (program, args) = argv
            .split_first()
            .ok_or_else(|| ClassifyError::Config("empty model runner command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| ClassifyError::Config(format!("cannot start model runner {program}: {e}")))?;
        let stdin = BufWriter::new(child.stdin.take().expect("stdin is piped"));
        let stdout = BufReader::new(child.stdout.take().expect("stdout is piped"));
        Ok(Self { k, child, stdin: Some(stdin), stdout })
    }
}

impl FrameClassifier for IpcClassifier {
    fn num_classes(&self) -> usize {
        self.k
    }

    fn classify(&mut self, batch: &FrameBatch) -> Result<Vec<Vec<f64>>, ClassifyError> {
        let req = InferenceRequest::from_batch(batch)?;
        let stdin = self.stdin.as_mut().ok_or_else(|| ClassifyError::Protocol("runner input closed".into()))?;
        req.write_to(stdin)?;
        let resp = InferenceResponse::read_from(&mut self.stdout)?;
        if resp.frames as usize != batch.len() || resp.k as usize != self.k {
            return Err(ClassifyError::Protocol(format!(
                "response shape {}x{}, expected {}x{}",
                resp.frames,
                resp.k,
                batch.len(),
                self.k
            )));
        }
        Ok(resp.rows())
    }
}

impl Drop for IpcClassifier {
    fn drop(&mut self) {
        drop(self.stdin.take());
        let _ = self.child.wait();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn marker_frame(index: usize, color: [u8; 3]) -> Frame {
        let size = Size::new(8, 8);
        let pixels = (0..64).flat_map(|_| color).collect();
        Frame::new(index, size, pixels, Arc::from("t")).unwrap()
    }

    fn batch(frames: Vec<Frame>) -> FrameBatch {
        FrameBatch::new(frames).unwrap()
    }

    fn probe(k: usize, c: f64) -> ProbeClassifier {
        let names = (0..k).map(|i| format!("c{i}")).collect();
        probe_classifier(&ClassCatalog::new(names, 1).unwrap(), c, Rect::new(2, 2, 4, 4)).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn catalog_invariants() {
        let c = ClassCatalog::default();
        assert_eq!((c.len(), c.target_name()), (2, "work_zone"));
        assert!(ClassCatalog::new(vec!["a".into()], 0).is_err());
        assert!(ClassCatalog::new(vec!["a".into(), "a".into()], 0).is_err());
        assert!(ClassCatalog::new(vec!["a".into(), "b".into()], 2).is_err());
        assert_eq!(ClassCatalog::with_target_name(vec!["a".into(), "b".into()], "a").unwrap().target_class(), 0);
    }

    #[test]
    fn probe_rows() {
        let mut p = probe(2, 0.9);
        let rows = p.classify(&batch(vec![marker_frame(0, MARKER_PALETTE[0])])).unwrap();
        assert!(close(&rows[0], &[0.9, 0.1]));
        let rows = p.classify(&batch(vec![marker_frame(0, AMBIGUITY_COLOR)])).unwrap();
        assert!(close(&rows[0], &[0.5, 0.5]));
        let mut p3 = probe(3, 0.6);
        let rows = p3.classify(&batch(vec![marker_frame(0, MARKER_PALETTE[1])])).unwrap();
        assert!(close(&rows[0], &[0.2, 0.6, 0.2]));
        let mut p95 = probe(2, 0.95);
        let rows = classify_batch(&mut p95, &batch(vec![marker_frame(0, MARKER_PALETTE[1])])).unwrap();
        assert!(close(rows.row(0), &[0.05, 0.95]));
    }

    #[test]
    fn unreadable_marker_falls_back_to_class_zero() {
        let mut p = probe(2, 0.8);
        // palette entry 2 is not a valid class when k = 2
        let rows = p.classify(&batch(vec![marker_frame(0, MARKER_PALETTE[2])])).unwrap();
        assert!(close(&rows[0], &[0.8, 0.2]));
    }

    #[test]
    fn probe_confidence_bounds() {
        let cat = ClassCatalog::default();
        assert!(probe_classifier(&cat, 0.5, Rect::new(0, 0, 1, 1)).is_err());
        assert!(probe_classifier(&cat, 1.01, Rect::new(0, 0, 1, 1)).is_err());
        assert!(probe_classifier(&cat, 1.0, Rect::new(0, 0, 1, 1)).is_ok());
    }

    #[test]
    fn scripted_rows_verbatim_by_index() {
        let rows = vec![vec![0.3, 0.7], vec![1.0, 0.0], vec![0.25, 0.75]];
        let mut s = ScriptedClassifier::new(2, rows.clone());
        let m = classify_batch(&mut s, &batch(vec![marker_frame(1, [0; 3]), marker_frame(2, [0; 3])])).unwrap();
        assert_eq!(m.row(0), rows[1].as_slice());
        assert_eq!(m.row(1), rows[2].as_slice());
        let err = classify_batch(&mut s, &batch(vec![marker_frame(3, [0; 3])])).unwrap_err();
        assert!(matches!(err, ClassifyError::Inference { first: 3, last: 3, .. }));
    }

    #[test]
    fn contract_violations_name_the_frame() {
        let mut s = ScriptedClassifier::new(2, vec![vec![0.5, 0.5], vec![0.6, 0.6]]);
        let err = classify_batch(&mut s, &batch(vec![marker_frame(0, [0; 3]), marker_frame(1, [0; 3])])).unwrap_err();
        assert!(matches!(err, ClassifyError::Inference { first: 1, last: 1, .. }));
    }

    #[test]
    fn marker_projection_stays_inside() {
        let r = project_marker(Rect::new(392, 312, 32, 32), Rect::new(40, 0, 400, 360), Size::new(224, 224)).unwrap();
        // marker spans x 197.12..215.04, y 194.13..214.04 in input pixels
        assert_eq!(r, Rect::new(202, 200, 8, 9));
        assert!(project_marker(Rect::new(0, 0, 10, 10), Rect::new(40, 0, 400, 360), Size::new(224, 224)).is_none());
    }

    #[test]
    fn ipc_wire_format() {
        let b = batch(vec![marker_frame(0, MARKER_PALETTE[1]), marker_frame(1, AMBIGUITY_COLOR)]);
        let req = InferenceRequest::from_batch(&b).unwrap();
        let mut wire = Vec::new();
        req.write_to(&mut wire).unwrap();
        assert_eq!(&wire[..16], &[2, 0, 0, 0, 8, 0, 0, 0, 8, 0, 0, 0, 3, 0, 0, 0]);
        assert_eq!(wire.len(), 16 + 2 * 8 * 8 * 3);

        let mut out = Vec::new();
        let mut p = probe(2, 0.9);
        let served = serve_model_runner(&mut Cursor::new(wire), &mut out, &mut p).unwrap();
        assert_eq!(served, 1);
        assert_eq!(&out[..8], &[2, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(out.len(), 8 + 4 * 4);
        assert_eq!(&out[8..12], &0.1f32.to_le_bytes());
        let resp = InferenceResponse::read_from(&mut Cursor::new(out)).unwrap();
        let rows = resp.rows();
        assert!((rows[0][1] - 0.9).abs() < 1e-6 && (rows[1][0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn truncated_request_is_an_error() {
        let mut wire = Vec::new();
        InferenceRequest { frames: 1, height: 2, width: 2, channels: 3, data: vec![0; 12] }.write_to(&mut wire).unwrap();
        wire.truncate(20);
        assert!(InferenceRequest::read_from(&mut Cursor::new(wire)).is_err());
        assert!(InferenceRequest::read_from(&mut Cursor::new(Vec::new())).unwrap().is_none());
    }
}
