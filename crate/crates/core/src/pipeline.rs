//! Per-video processing and the multi-video scheduler.
//!
//! Each video runs through its own chain of stages connected by bounded
//! channels:
//!
//! ```text
//! decoder -> feeder -> preprocess workers (fan-out) -> reorder -> batch -> classify
//! ```
//!
//! Timestamp strips are cut from raw frames by the preprocess workers and
//! kept until the stream ends, when they are converted in one batch. Frame
//! pixels are dropped as soon as their batch has been classified.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Instant;

use log::{info, warn};
use serde::Serialize;
use thiserror::Error;

use crate::buffer::{gauged_channel, BufferGauge, BufferStats};
use crate::classify::{
    classify_batch, probe_classifier, project_marker, ClassCatalog, ClassifyError, FrameClassifier, IpcClassifier,
    ProbabilityMatrix, ScriptedClassifier,
};
use crate::digitmask::{load_digit_masks, ColorImage, DigitMaskSet, MaskError};
use crate::events::{
    extract_events, labels_from_probabilities, smooth_probabilities, write_events_csv, Event, EventError, SmoothingConfig,
};
use crate::geometry::Rect;
use crate::ingest::{
    extract_timestamp_strip, open_frame_stream, preprocess_frame, video_id_for, Frame, FrameBatch, IngestConfig, IngestError,
};
use crate::synthgen::builtin_masks;
use crate::tsocr::{convert_timestamps_per_frame, convert_timestamps_with, OcrError, OcrOptions, TimestampBatch, TimestampResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARTIAL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Ocr(#[from] OcrError),
    #[error(transparent)]
    Events(#[from] EventError),
    #[error(transparent)]
    Masks(#[from] MaskError),
    #[error("video contains no frames")]
    EmptyVideo,
    #[error("writing summary: {0}")]
    Summary(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierChoice {
    /// Reads the synthetic scene marker; `confidence` goes to the marked class.
    Probe { confidence: f64 },
    /// Rows preloaded from a file, one per frame index.
    Scripted { rows: PathBuf },
    /// External model runner speaking the binary request/response protocol.
    Ipc { command: String },
}

#[derive(Debug, Clone)]
pub struct AppConfig {
    pub inputs: Vec<PathBuf>,
    pub output_dir: PathBuf,
    /// Directory of `0.pgm` … `9.pgm`; the bundled masks when absent.
    pub masks_dir: Option<PathBuf>,
    pub ingest: IngestConfig,
    pub catalog: ClassCatalog,
    pub classifier: ClassifierChoice,
    /// Where the probe classifier finds its marker, in raw-frame pixels.
    pub marker_rect: Rect,
    pub smoothing: SmoothingConfig,
    pub min_event_len: usize,
    pub processors: usize,
    pub preprocess_workers: usize,
    pub strict_timestamps: bool,
    /// Run summary location; `<output_dir>/summary.json` when absent.
    pub summary_path: Option<PathBuf>,
}

impl Default for AppConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            output_dir: PathBuf::from("."),
            masks_dir: None,
            ingest: IngestConfig::default(),
            catalog: ClassCatalog::default(),
            classifier: ClassifierChoice::Probe { confidence: 0.9 },
            marker_rect: Rect::new(392, 312, 32, 32),
            smoothing: SmoothingConfig::default(),
            min_event_len: 1,
            processors: 2,
            preprocess_workers: 2,
            strict_timestamps: false,
            summary_path: None,
        }
    }
}

impl AppConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let usage = |m: String| Err(PipelineError::Usage(m));
        if self.inputs.is_empty() {
            return usage("at least one input video is required".into());
        }
        if self.processors == 0 || self.preprocess_workers == 0 {
            return usage("processor and worker counts must be at least 1".into());
        }
        if self.min_event_len == 0 {
            return usage("minimum event length must be at least 1".into());
        }
        self.ingest.validate().map_err(|e| PipelineError::Usage(e.to_string()))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.summary_path.clone().unwrap_or_else(|| self.output_dir.join("summary.json"))
    }

    pub fn load_masks(&self) -> Result<DigitMaskSet, PipelineError> {
        let masks = match &self.masks_dir {
            Some(dir) => load_digit_masks(dir)?,
            None => builtin_masks(self.ingest.timestamp_rect.height.max(8)),
        };
        if masks.digit_height() != self.ingest.timestamp_rect.height {
            return Err(PipelineError::Usage(format!(
                "mask height {} does not match timestamp rect height {}",
                masks.digit_height(),
                self.ingest.timestamp_rect.height
            )));
        }
        Ok(masks)
    }

    /// A fresh classifier instance for one video processor.
    pub fn build_classifier(&self) -> Result<Box<dyn FrameClassifier>, PipelineError> {
        let k = self.catalog.len();
        Ok(match &self.classifier {
            ClassifierChoice::Probe { confidence } => {
                let marker = project_marker(self.marker_rect, self.ingest.crop_rect, self.ingest.input_size)
                    .ok_or_else(|| PipelineError::Usage("probe marker falls outside the crop".into()))?;
                Box::new(probe_classifier(&self.catalog, *confidence, marker)?)
            }
            ClassifierChoice::Scripted { rows } => Box::new(ScriptedClassifier::from_file(rows, k)?),
            ClassifierChoice::Ipc { command } => {
                let argv = shlex::split(command)
                    .ok_or_else(|| PipelineError::Usage(format!("cannot parse model command {command:?}")))?;
                Box::new(IpcClassifier::spawn(&argv, k)?)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VideoReport {
    pub video_id: String,
    pub frame_count: usize,
    pub events: Vec<Event>,
    #[serde(skip)]
    pub timestamps: TimestampResult,
    #[serde(skip)]
    pub probabilities: Option<ProbabilityMatrix>,
    pub wall_seconds: f64,
    pub fps: f64,
    /// The batch-path error that triggered the per-frame fallback.
    pub qc_fallback: Option<String>,
    pub synthesized: usize,
    pub buffers: Vec<BufferStats>,
    pub csv_path: PathBuf,
}

struct Preprocessed {
    index: usize,
    strip: ColorImage,
    frame: Frame,
}

/// Classified rows, strips and buffer stats from one pass over a stream.
struct StageOutput {
    probabilities: ProbabilityMatrix,
    strips: Vec<ColorImage>,
    buffers: Vec<BufferStats>,
}

fn run_stages(
    path: &Path,
    config: &AppConfig,
    classifier: &mut dyn FrameClassifier,
) -> Result<StageOutput, PipelineError> {
    let ingest = &config.ingest;
    let capacity = ingest.buffer_capacity.max(1);
    let workers = config.preprocess_workers.max(1);
    let mut stream = open_frame_stream(path, ingest)?;

    let to_workers = BufferGauge::new("preprocess_in", capacity);
    let from_workers = BufferGauge::new("preprocess_out", capacity);
    // Out-of-order items waiting for a predecessor can only be those in
    // flight between the feeder and the reorder stage.
    let reorder = BufferGauge::new("reorder", 2 * capacity + workers);

    let ts_rect = ingest.timestamp_rect;
    let (crop, input_size) = (ingest.crop_rect, ingest.input_size);
    let k = classifier.num_classes();

    thread::scope(|s| -> Result<StageOutput, PipelineError> {
        let (work_tx, work_rx) = gauged_channel::<Frame>(&to_workers);
        let (done_tx, done_rx) = gauged_channel::<Result<Preprocessed, IngestError>>(&from_workers);

        let feeder = s.spawn(move || -> Result<BufferStats, IngestError> {
            for item in stream.by_ref() {
                if work_tx.send(item?).is_err() {
                    break;
                }
            }
            Ok(stream.buffer_stats())
        });

        for _ in 0..workers {
            let (rx, tx) = (work_rx.clone(), done_tx.clone());
            s.spawn(move || {
                for frame in rx {
                    let out = extract_timestamp_strip(&frame, ts_rect).and_then(|strip| {
                        let pre = preprocess_frame(&frame, crop, input_size)?;
                        Ok(Preprocessed { index: frame.index, strip, frame: pre })
                    });
                    if tx.send(out).is_err() {
                        break;
                    }
                }
            });
        }
        drop((work_rx, done_tx));

        let mut probabilities = ProbabilityMatrix::empty(k);
        let mut strips = Vec::new();
        let mut pending: BTreeMap<usize, Preprocessed> = BTreeMap::new();
        let mut batch: Vec<Frame> = Vec::with_capacity(ingest.batch_size);
        let mut classify_pending = |batch: &mut Vec<Frame>| -> Result<(), PipelineError> {
            if batch.is_empty() {
                return Ok(());
            }
            let b = FrameBatch::new(std::mem::take(batch))?;
            probabilities.append(&classify_batch(classifier, &b)?);
            Ok(())
        };

        let mut stage_result = Ok(());
        for item in done_rx.iter() {
            let item = match item {
                Ok(p) => p,
                Err(e) => {
                    stage_result = Err(e.into());
                    break;
                }
            };
            pending.insert(item.index, item);
            reorder.observe(pending.len());
            while let Some(next) = pending.remove(&strips.len()) {
                strips.push(next.strip);
                batch.push(next.frame);
                if batch.len() == ingest.batch_size {
                    if let Err(e) = classify_pending(&mut batch) {
                        stage_result = Err(e);
                        break;
                    }
                }
            }
            if stage_result.is_err() {
                break;
            }
        }
        drop(done_rx);
        let decoded = feeder.join().expect("feeder thread panicked");
        stage_result?;
        let decoded = decoded?;
        classify_pending(&mut batch)?;
        debug_assert!(pending.is_empty());

        Ok(StageOutput {
            probabilities,
            strips,
            buffers: vec![decoded, to_workers.snapshot(), from_workers.snapshot(), reorder.snapshot()],
        })
    })
}

/// Batch OCR, falling back to per-frame reading on a quality-control error.
pub fn extract_timestamps(
    strips: Vec<ColorImage>,
    masks: &DigitMaskSet,
    options: OcrOptions,
) -> Result<(TimestampResult, Option<String>), OcrError> {
    let (h, w) = match strips.first() {
        Some(s) => (s.height, s.width),
        None => return Err(OcrError::Unsynthesizable),
    };
    let batch = TimestampBatch::new(strips, h, w)?;
    match convert_timestamps_with(&batch, masks, options) {
        Ok(r) => Ok((r, None)),
        Err(e) if e.is_quality_control() => {
            warn!("batch timestamp conversion failed ({e}); rerunning per frame");
            let r = convert_timestamps_per_frame(&batch, masks)?;
            info!("per-frame conversion synthesized {} timestamps", r.synthesized_count());
            Ok((r, Some(e.to_string())))
        }
        Err(e) => Err(e),
    }
}

/// Runs one video end to end and writes `<output_dir>/<video_id>.csv`.
pub fn process_video(
    path: &Path,
    config: &AppConfig,
    masks: &DigitMaskSet,
    classifier: &mut dyn FrameClassifier,
) -> Result<VideoReport, PipelineError> {
    let started = Instant::now();
    let video_id = video_id_for(path);
    let out = run_stages(path, config, classifier)?;
    let frame_count = out.strips.len();
    if frame_count == 0 {
        return Err(PipelineError::EmptyVideo);
    }
    let (timestamps, qc_fallback) =
        extract_timestamps(out.strips, masks, OcrOptions { strict_monotonic: config.strict_timestamps })?;

    let smoothed = smooth_probabilities(&out.probabilities, &config.smoothing);
    let labels = labels_from_probabilities(&smoothed);
    let events = extract_events(&labels, &smoothed, &timestamps, &config.catalog, config.min_event_len)?;
    let csv_path = config.output_dir.join(format!("{video_id}.csv"));
    write_events_csv(&events, &video_id, &csv_path)?;

    let wall_seconds = started.elapsed().as_secs_f64();
    Ok(VideoReport {
        video_id,
        frame_count,
        events,
        synthesized: timestamps.synthesized_count(),
        timestamps,
        probabilities: Some(out.probabilities),
        wall_seconds,
        fps: frame_count as f64 / wall_seconds.max(f64::EPSILON),
        qc_fallback,
        buffers: out.buffers,
        csv_path,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct VideoStatus {
    pub path: PathBuf,
    pub video_id: String,
    pub ok: bool,
    pub error: Option<String>,
    #[serde(flatten)]
    pub report: Option<VideoReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub total_frames: usize,
    pub wall_seconds: f64,
    pub aggregate_fps: f64,
    pub succeeded: usize,
    pub failed: usize,
    pub videos: Vec<VideoStatus>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub summary: RunSummary,
}

/// Processes every input across `config.processors` concurrent processors,
/// then writes the run summary.
pub fn run_app(config: &AppConfig) -> Result<RunOutcome, PipelineError> {
    config.validate()?;
    let masks = config.load_masks()?;
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| PipelineError::Usage(format!("output directory {}: {e}", config.output_dir.display())))?;

    let started = Instant::now();
    let n = config.inputs.len();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<VideoReport, String>>>> = Mutex::new(vec![None; n]);
    let masks = Arc::new(masks);

    thread::scope(|s| {
        for p in 0..config.processors.min(n) {
            let (next, results, masks) = (&next, &results, Arc::clone(&masks));
            s.spawn(move || {
                let mut classifier: Option<Box<dyn FrameClassifier>> = None;
                loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let path = &config.inputs[i];
                    info!("processor {p}: {}", path.display());
                    let outcome = (|| {
                        if classifier.is_none() {
                            classifier = Some(config.build_classifier()?);
                        }
                        let c = classifier.as_mut().expect("classifier built");
                        process_video(path, config, &masks, c.as_mut())
                    })();
                    if let Err(e) = &outcome {
                        warn!("{}: {e}", path.display());
                        if matches!(e, PipelineError::Classify(_)) {
                            // a failed runner may be wedged; start a new one next time
                            classifier = None;
                        }
                    }
                    results.lock().unwrap()[i] = Some(outcome.map_err(|e| e.to_string()));
                }
            });
        }
    });

    let wall_seconds = started.elapsed().as_secs_f64();
    let videos: Vec<VideoStatus> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .zip(&config.inputs)
        .map(|(r, path)| {
            let video_id = video_id_for(path);
            match r.expect("every input was processed") {
                Ok(report) => VideoStatus { path: path.clone(), video_id, ok: true, error: None, report: Some(report) },
                Err(e) => VideoStatus { path: path.clone(), video_id, ok: false, error: Some(e), report: None },
            }
        })
        .collect();
    let succeeded = videos.iter().filter(|v| v.ok).count();
    let total_frames = videos.iter().filter_map(|v| v.report.as_ref()).map(|r| r.frame_count).sum();
    let summary = RunSummary {
        total_frames,
        wall_seconds,
        aggregate_fps: total_frames as f64 / wall_seconds.max(f64::EPSILON),
        succeeded,
        failed: n - succeeded,
        videos,
    };
    let json = serde_json::to_vec_pretty(&summary).map_err(|e| PipelineError::Summary(e.to_string()))?;
    std::fs::write(config.summary_path(), json).map_err(|e| PipelineError::Summary(e.to_string()))?;

    let exit_code = match (succeeded, n - succeeded) {
        (_, 0) => EXIT_OK,
        (0, _) => EXIT_FAILURE,
        _ => EXIT_PARTIAL,
    };
    Ok(RunOutcome { exit_code, summary })
}
