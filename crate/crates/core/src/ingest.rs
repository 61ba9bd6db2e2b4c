//! Decoder subprocess ingestion, strip extraction, preprocessing and batching.
//!
//! The decoder contract is raw 8-bit interleaved RGB frames written
//! back-to-back on standard output. Frame geometry comes from configuration;
//! nothing is probed from the stream.

use std::io::{self, Read};
use std::path::Path;
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::Arc;
use std::thread;

use crossbeam_channel::Receiver;
use thiserror::Error;

use crate::buffer::{gauged_channel, BufferGauge, BufferStats, GaugedSender};
use crate::digitmask::ColorImage;
use crate::geometry::{Rect, Size};

pub const DEFAULT_DECODER_COMMAND: &str =
    "ffmpeg -nostdin -loglevel error -i {input} -f rawvideo -pix_fmt {pixfmt} -s {width}x{height} pipe:1";
pub const PIXEL_FORMAT: &str = "rgb24";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("geometry: {0}")]
    Geometry(String),
    #[error("could not start decoder `{command}`: {source}")]
    Environment { command: String, source: io::Error },
    #[error("decoder exited with {status}: {stderr}")]
    Decoder { status: ExitStatus, stderr: String },
    #[error("stream ended {bytes} bytes into frame {frame} ({expected} bytes per frame)")]
    StreamCorruption { frame: usize, bytes: usize, expected: usize },
    #[error("reading decoder output: {0}")]
    Io(#[from] io::Error),
    #[error("invalid ingest configuration: {0}")]
    Config(String),
}

/// One decoded RGB frame.
#[derive(Clone, PartialEq, Eq)]
pub struct Frame {
    pub index: usize,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub video_id: Arc<str>,
}

impl std::fmt::Debug for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Frame({}#{} {}x{})", self.video_id, self.index, self.width, self.height)
    }
}

impl Frame {
    pub fn new(index: usize, size: Size, pixels: Vec<u8>, video_id: Arc<str>) -> Result<Self, IngestError> {
        if pixels.len() != size.width * size.height * 3 {
            return Err(IngestError::Geometry(format!(
                "{} bytes do not form a {size} RGB frame",
                pixels.len()
            )));
        }
        Ok(Self { index, width: size.width, height: size.height, pixels, video_id })
    }

    pub fn size(&self) -> Size {
        Size::new(self.width, self.height)
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Copies the pixels inside `rect` out as a three-channel image.
    pub fn crop(&self, rect: Rect) -> Result<ColorImage, IngestError> {
        if !rect.fits_within(self.size()) {
            return Err(IngestError::Geometry(format!("rect {rect} exceeds {} frame", self.size())));
        }
        let mut data = Vec::with_capacity(rect.area() * 3);
        for y in rect.y..rect.bottom() {
            let start = (y * self.width + rect.x) * 3;
            data.extend_from_slice(&self.pixels[start..start + rect.width * 3]);
        }
        Ok(ColorImage { height: rect.height, width: rect.width, channels: 3, data })
    }
}

/// Consecutive preprocessed frames.
#[derive(Debug, Clone)]
pub struct FrameBatch {
    frames: Vec<Frame>,
}

impl FrameBatch {
    pub fn new(frames: Vec<Frame>) -> Result<Self, IngestError> {
        if frames.is_empty() {
            return Err(IngestError::Geometry("empty frame batch".into()));
        }
        if frames.windows(2).any(|w| w[1].index != w[0].index + 1) {
            return Err(IngestError::Geometry("batch frame indices are not contiguous".into()));
        }
        Ok(Self { frames })
    }

    pub fn first_index(&self) -> usize {
        self.frames[0].index
    }

    pub fn last_index(&self) -> usize {
        self.frames[self.frames.len() - 1].index
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Frame> {
        self.frames
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestConfig {
    /// Whitespace-separated command with `{input}`, `{width}`, `{height}` and
    /// `{pixfmt}` slots.
    pub decoder_command: String,
    pub frame_size: Size,
    /// Timestamp strip; its height is the digit height.
    pub timestamp_rect: Rect,
    pub crop_rect: Rect,
    /// Classifier input resolution.
    pub input_size: Size,
    pub batch_size: usize,
    /// Capacity of each inter-stage buffer, in frames.
    pub buffer_capacity: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            decoder_command: DEFAULT_DECODER_COMMAND.to_string(),
            frame_size: Size::new(480, 360),
            timestamp_rect: Rect::new(0, 0, 112, 16),
            crop_rect: Rect::new(40, 0, 400, 360),
            input_size: Size::new(224, 224),
            batch_size: 64,
            buffer_capacity: 16,
        }
    }
}

impl IngestConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |m: String| Err(IngestError::Config(m));
        if self.frame_size.width == 0 || self.frame_size.height == 0 {
            return bad("frame size must be positive".into());
        }
        if !self.timestamp_rect.fits_within(self.frame_size) {
            return bad(format!("timestamp rect {} exceeds frame {}", self.timestamp_rect, self.frame_size));
        }
        let ts = self.timestamp_rect;
        if ts.height == 0 || ts.width == 0 || !ts.width.is_multiple_of(ts.height) {
            return bad(format!("timestamp width {} is not a multiple of height {}", ts.width, ts.height));
        }
        if !self.crop_rect.fits_within(self.frame_size) {
            return bad(format!("crop rect {} exceeds frame {}", self.crop_rect, self.frame_size));
        }
        if self.crop_rect.area() == 0 || self.input_size.width == 0 || self.input_size.height == 0 {
            return bad("crop and classifier input must have positive area".into());
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1".into());
        }
        Ok(())
    }

    pub fn frame_bytes(&self) -> usize {
        self.frame_size.width * self.frame_size.height * 3
    }

    /// Expands the decoder template for `input` into program and arguments.
    pub fn decoder_argv(&self, input: &Path) -> Result<Vec<String>, IngestError> {
        let tokens = shlex::split(&self.decoder_command)
            .filter(|t| !t.is_empty())
            .ok_or_else(|| IngestError::Config(format!("cannot parse decoder command {:?}", self.decoder_command)))?;
        let input = input.to_string_lossy();
        Ok(tokens
            .into_iter()
            .map(|t| {
                t.replace("{input}", &input)
                    .replace("{width}", &self.frame_size.width.to_string())
                    .replace("{height}", &self.frame_size.height.to_string())
                    .replace("{pixfmt}", PIXEL_FORMAT)
            })
            .collect())
    }
}

/// Ordered frames decoded from one video, fed through a bounded buffer by a
/// dedicated reader thread.
pub struct FrameStream {
    rx: Receiver<Result<Frame, IngestError>>,
    gauge: Arc<BufferGauge>,
    reader: Option<thread::JoinHandle<()>>,
    done: bool,
}

impl FrameStream {
    /// Frames from any byte source that follows the raw RGB contract.
    pub fn from_reader<R: Read + Send + 'static>(reader: R, frame_size: Size, video_id: &str, capacity: usize) -> Self {
        let gauge = BufferGauge::new("decoded", capacity);
        let (tx, rx) = gauged_channel(&gauge);
        let video_id: Arc<str> = Arc::from(video_id);
        let handle = thread::spawn(move || {
            if let Err(e) = pump_frames(reader, frame_size, &video_id, &tx) {
                let _ = tx.send(Err(e));
            }
        });
        Self { rx, gauge, reader: Some(handle), done: false }
    }

    pub fn buffer_stats(&self) -> BufferStats {
        self.gauge.snapshot()
    }
}

impl Iterator for FrameStream {
    type Item = Result<Frame, IngestError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.rx.recv() {
            Ok(item) => {
                if item.is_err() {
                    self.done = true;
                }
                Some(item)
            }
            Err(_) => {
                self.done = true;
                if let Some(h) = self.reader.take() {
                    let _ = h.join();
                }
                None
            }
        }
    }
}

enum PumpEnd {
    Clean,
    /// Receiver hung up.
    Abandoned,
}

/// Reads whole frames into the channel. Errors on a partial trailing frame.
fn pump_frames<R: Read>(
    mut reader: R,
    size: Size,
    video_id: &Arc<str>,
    tx: &GaugedSender<Result<Frame, IngestError>>,
) -> Result<PumpEnd, IngestError> {
    let frame_bytes = size.width * size.height * 3;
    let mut index = 0usize;
    loop {
        let mut buf = vec![0u8; frame_bytes];
        let mut filled = 0;
        while filled < frame_bytes {
            match reader.read(&mut buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            }
        }
        if filled == 0 {
            return Ok(PumpEnd::Clean);
        }
        if filled < frame_bytes {
            return Err(IngestError::StreamCorruption { frame: index, bytes: filled, expected: frame_bytes });
        }
        let frame = Frame { index, width: size.width, height: size.height, pixels: buf, video_id: Arc::clone(video_id) };
        if tx.send(Ok(frame)).is_err() {
            return Ok(PumpEnd::Abandoned);
        }
        index += 1;
    }
}

/// Spawns the configured decoder on `video_path` and streams its frames.
pub fn open_frame_stream(video_path: &Path, config: &IngestConfig) -> Result<FrameStream, IngestError> {
    config.validate()?;
    let argv = config.decoder_argv(video_path)?;
    let (program, args) = argv.split_first().ok_or_else(|| IngestError::Config("empty decoder command".into()))?;
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| IngestError::Environment { command: argv.join(" "), source })?;
    let video_id: Arc<str> = Arc::from(video_id_for(video_path).as_str());
    let stdout = child.stdout.take().expect("stdout is piped");
    let mut stderr = child.stderr.take().expect("stderr is piped");
    let stderr_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let gauge = BufferGauge::new("decoded", config.buffer_capacity);
    let (tx, rx) = gauged_channel(&gauge);
    let size = config.frame_size;
    let handle = thread::spawn(move || {
        let outcome = pump_frames(stdout, size, &video_id, &tx);
        let end = finish_decoder(child, outcome, stderr_reader);
        if let Err(e) = end {
            let _ = tx.send(Err(e));
        }
    });
    Ok(FrameStream { rx, gauge, reader: Some(handle), done: false })
}

fn finish_decoder(
    mut child: Child,
    outcome: Result<PumpEnd, IngestError>,
    stderr_reader: thread::JoinHandle<String>,
) -> Result<(), IngestError> {
    if matches!(outcome, Ok(PumpEnd::Abandoned)) {
        let _ = child.kill();
    }
    let status = child.wait()?;
    let stderr = stderr_reader.join().unwrap_or_default();
    match outcome {
        Ok(PumpEnd::Abandoned) => Ok(()),
        _ if !status.success() => Err(IngestError::Decoder { status, stderr: stderr.trim().to_string() }),
        Ok(PumpEnd::Clean) => Ok(()),
        Err(e) => Err(e),
    }
}

/// The identifier used for a video in reports and CSV output: its file stem.
pub fn video_id_for(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

/// Cuts the timestamp strip out of a raw (not yet preprocessed) frame.
pub fn extract_timestamp_strip(frame: &Frame, rect: Rect) -> Result<ColorImage, IngestError> {
    frame.crop(rect)
}

/// Crops to `crop` and rescales bilinearly to `input_size`.
pub fn preprocess_frame(frame: &Frame, crop: Rect, input_size: Size) -> Result<Frame, IngestError> {
    if crop.area() == 0 || input_size.width == 0 || input_size.height == 0 {
        return Err(IngestError::Geometry("zero-area crop or output".into()));
    }
    let cropped = frame.crop(crop)?;
    let pixels = resize_bilinear(&cropped, input_size);
    Ok(Frame {
        index: frame.index,
        width: input_size.width,
        height: input_size.height,
        pixels,
        video_id: Arc::clone(&frame.video_id),
    })
}

struct Tap {
    lo: usize,
    hi: usize,
    frac: f32,
}

fn taps(src: usize, dst: usize) -> Vec<Tap> {
    let scale = src as f32 / dst as f32;
    (0..dst)
        .map(|d| {
            // pixel-centre alignment
            let s = ((d as f32 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f32);
            let lo = s.floor() as usize;
            Tap { lo, hi: (lo + 1).min(src - 1), frac: s - lo as f32 }
        })
        .collect()
}

/// Bilinear resampling with pixel-centre alignment and edge clamping.
/// Same-size resampling is the identity.
pub fn resize_bilinear(img: &ColorImage, out: Size) -> Vec<u8> {
    let c = img.channels;
    let xs = taps(img.width, out.width);
    let ys = taps(img.height, out.height);
    let at = |x: usize, y: usize, ch: usize| img.data[(y * img.width + x) * c + ch] as f32;
    let mut data = Vec::with_capacity(out.width * out.height * c);
    for ty in &ys {
        for tx in &xs {
            for ch in 0..c {
                let top = at(tx.lo, ty.lo, ch) * (1.0 - tx.frac) + at(tx.hi, ty.lo, ch) * tx.frac;
                let bottom = at(tx.lo, ty.hi, ch) * (1.0 - tx.frac) + at(tx.hi, ty.hi, ch) * tx.frac;
                let v = top * (1.0 - ty.frac) + bottom * ty.frac;
                data.push((v + 0.5).floor().clamp(0.0, 255.0) as u8);
            }
        }
    }
    data
}

/// Groups consecutive frames into batches of `batch_size`; only the last
/// batch may be short.
pub fn batch_frames<I: IntoIterator<Item = Frame>>(frames: I, batch_size: usize) -> Batches<I::IntoIter> {
    assert!(batch_size >= 1, "batch size must be at least 1");
    Batches { inner: frames.into_iter(), batch_size }
}

pub struct Batches<I> {
    inner: I,
    batch_size: usize,
}

impl<I: Iterator<Item = Frame>> Iterator for Batches<I> {
    type Item = FrameBatch;

    fn next(&mut self) -> Option<FrameBatch> {
        let frames: Vec<Frame> = self.inner.by_ref().take(self.batch_size).collect();
        if frames.is_empty() {
            None
        } else {
            Some(FrameBatch { frames })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn frame(index: usize, size: Size, seed: u8) -> Frame {
        let pixels = (0..size.width * size.height * 3).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed)).collect();
        Frame::new(index, size, pixels, Arc::from("v")).unwrap()
    }

    #[test]
    fn exact_byte_count_yields_frames() {
        let size = Size::new(4, 3);
        let bytes = vec![7u8; 2 * 36];
        let frames: Vec<_> = FrameStream::from_reader(Cursor::new(bytes), size, "v", 2)
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(frames.iter().map(|f| f.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn truncated_stream_errors_after_whole_frames() {
        let size = Size::new(4, 3);
        let items: Vec<_> = FrameStream::from_reader(Cursor::new(vec![1u8; 54]), size, "v", 2).collect();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].as_ref().unwrap().index, 0);
        assert!(matches!(items[1], Err(IngestError::StreamCorruption { frame: 1, bytes: 18, expected: 36 })));
    }

    #[test]
    fn strip_shape_and_bounds() {
        let f = frame(0, Size::new(480, 360), 0);
        let strip = extract_timestamp_strip(&f, Rect::new(0, 0, 112, 16)).unwrap();
        assert_eq!((strip.height, strip.width, strip.channels), (16, 112, 3));
        assert_eq!(&strip.data[..3], &f.pixels[..3]);
        assert!(matches!(extract_timestamp_strip(&f, Rect::new(400, 0, 112, 16)), Err(IngestError::Geometry(_))));
    }

    #[test]
    fn preprocess_identity_and_shape() {
        let size = Size::new(48, 36);
        let f = frame(3, size, 9);
        let same = preprocess_frame(&f, size.full_rect(), size).unwrap();
        assert_eq!(same.pixels, f.pixels);

        let big = frame(0, Size::new(480, 360), 1);
        let out = preprocess_frame(&big, Rect::new(40, 0, 400, 360), Size::new(224, 224)).unwrap();
        assert_eq!((out.width, out.height, out.pixels.len()), (224, 224, 224 * 224 * 3));
        let again = preprocess_frame(&big, Rect::new(40, 0, 400, 360), Size::new(224, 224)).unwrap();
        assert_eq!(out.pixels, again.pixels);
        assert!(preprocess_frame(&big, Rect::new(0, 0, 0, 10), Size::new(8, 8)).is_err());
    }

    #[test]
    fn bilinear_midpoint() {
        // Two pixels 0 and 100 upscaled to four: centres at -0.25, 0.25, 0.75, 1.25.
        let img = ColorImage::new(1, 2, 1, vec![0, 100]).unwrap();
        assert_eq!(resize_bilinear(&img, Size::new(4, 1)), vec![0, 25, 75, 100]);
    }

    #[test]
    fn batching_sizes_and_order() {
        let size = Size::new(2, 2);
        let frames: Vec<_> = (0..10).map(|i| frame(i, size, 0)).collect();
        let batches: Vec<_> = batch_frames(frames, 4).collect();
        assert_eq!(batches.iter().map(FrameBatch::len).collect::<Vec<_>>(), vec![4, 4, 2]);
        let flat: Vec<_> = batches.into_iter().flat_map(|b| b.into_frames()).map(|f| f.index).collect();
        assert_eq!(flat, (0..10).collect::<Vec<_>>());
        assert_eq!(batch_frames(Vec::<Frame>::new(), 4).count(), 0);
    }

    #[test]
    fn config_validation() {
        let mut c = IngestConfig::default();
        c.validate().unwrap();
        c.timestamp_rect = Rect::new(0, 0, 100, 16);
        assert!(c.validate().is_err());
        c = IngestConfig { crop_rect: Rect::new(100, 0, 400, 360), ..IngestConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn decoder_template_substitution() {
        let c = IngestConfig { decoder_command: "dec --in {input} -s {width}x{height} -p {pixfmt}".into(), ..Default::default() };
        let argv = c.decoder_argv(Path::new("/tmp/a b.mp4")).unwrap();
        assert_eq!(argv, vec!["dec", "--in", "/tmp/a b.mp4", "-s", "480x360", "-p", "rgb24"]);
    }

    #[test]
    fn spawn_failure_is_environment_error() {
        let c = IngestConfig { decoder_command: "/nonexistent/decoder {input}".into(), ..Default::default() };
        assert!(matches!(open_frame_stream(Path::new("x"), &c), Err(IngestError::Environment { .. })));
    }

    #[test]
    fn nonzero_exit_carries_stderr() {
        let c = IngestConfig {
            decoder_command: "sh -c 'echo broken >&2; exit 3'".into(),
            frame_size: Size::new(16, 16),
            timestamp_rect: Rect::new(0, 0, 16, 16),
            crop_rect: Rect::new(0, 0, 16, 16),
            ..Default::default()
        };
        let items: Vec<_> = open_frame_stream(Path::new("x"), &c).unwrap().collect();
        match items.as_slice() {
            [Err(IngestError::Decoder { stderr, .. })] => assert_eq!(stderr, "broken"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subprocess_frames_arrive_in_order() {
        let c = IngestConfig {
            decoder_command: "head -c 3072 /dev/zero".into(),
            frame_size: Size::new(16, 16),
            timestamp_rect: Rect::new(0, 0, 16, 16),
            crop_rect: Rect::new(0, 0, 16, 16),
            buffer_capacity: 1,
            ..Default::default()
        };
        let stream = open_frame_stream(Path::new("x"), &c).unwrap();
        let idx: Vec<_> = stream.map(|f| f.unwrap().index).collect();
        assert_eq!(idx, vec![0, 1, 2, 3]);
    }
}
