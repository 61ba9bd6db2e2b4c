use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use log::error;

use wzp_core::classify::ClassCatalog;
use wzp_core::events::{SmoothingConfig, WeightProfile};
use wzp_core::geometry::{Rect, Size};
use wzp_core::ingest::{IngestConfig, DEFAULT_DECODER_COMMAND};
use wzp_core::pipeline::{run_app, AppConfig, ClassifierChoice, PipelineError, EXIT_FAILURE, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClassifierKind {
    Probe,
    Scripted,
    Ipc,
}

/// Finds target-class events in videos and reports them with each frame's
/// burned-in timestamp.
#[derive(Debug, Parser)]
#[command(name = "wzp", version)]
struct Args {
    /// Video file or directory of videos; repeatable.
    #[arg(long = "inputpath", env = "WZP_INPUTPATH", required = true, value_delimiter = ',')]
    inputs: Vec<PathBuf>,

    /// Directory for per-video CSVs and the run summary.
    #[arg(long = "outputpath", env = "WZP_OUTPUTPATH")]
    output: PathBuf,

    /// Directory holding 0.pgm … 9.pgm digit masks; bundled masks otherwise.
    #[arg(long = "masksdir", env = "WZP_MASKSDIR")]
    masks_dir: Option<PathBuf>,

    #[arg(long, env = "WZP_CLASSIFIER", value_enum, default_value = "probe")]
    classifier: ClassifierKind,

    #[arg(long = "batchsize", env = "WZP_BATCHSIZE", default_value_t = 64)]
    batch_size: usize,

    /// Videos processed concurrently.
    #[arg(long, env = "WZP_PROCESSORS", default_value_t = 2)]
    processors: usize,

    /// Preprocessing threads per video.
    #[arg(long = "workers", env = "WZP_WORKERS", default_value_t = 2)]
    workers: usize,

    #[arg(long = "smoothradius", env = "WZP_SMOOTHRADIUS", default_value_t = 7)]
    smooth_radius: usize,

    #[arg(long, env = "WZP_WEIGHTS", default_value = "triangular")]
    weights: WeightProfile,

    #[arg(long = "mineventlen", env = "WZP_MINEVENTLEN", default_value_t = 1)]
    min_event_len: usize,

    #[arg(long = "tsrect", env = "WZP_TSRECT", default_value = "0,0,112,16")]
    ts_rect: Rect,

    #[arg(long = "croprect", env = "WZP_CROPRECT", default_value = "40,0,400,360")]
    crop_rect: Rect,

    #[arg(long = "framesize", env = "WZP_FRAMESIZE", default_value = "480x360")]
    frame_size: Size,

    /// Classifier input resolution.
    #[arg(long = "inputsize", env = "WZP_INPUTSIZE", default_value = "224x224")]
    input_size: Size,

    /// Decoder command with {input}, {width}, {height} and {pixfmt} slots.
    #[arg(long = "decodercmd", env = "WZP_DECODERCMD", default_value = DEFAULT_DECODER_COMMAND)]
    decoder_command: String,

    /// Capacity of each inter-stage buffer, in frames.
    #[arg(long = "buffercap", env = "WZP_BUFFERCAP", default_value_t = 16)]
    buffer_capacity: usize,

    #[arg(long = "classnames", env = "WZP_CLASSNAMES", value_delimiter = ',', default_value = "not_work_zone,work_zone")]
    class_names: Vec<String>,

    #[arg(long = "targetclass", env = "WZP_TARGETCLASS", default_value = "work_zone")]
    target_class: String,

    /// Run summary JSON; defaults to summary.json in the output directory.
    #[arg(long, env = "WZP_SUMMARY")]
    summary: Option<PathBuf>,

    /// Probe classifier: marker square location in raw-frame pixels.
    #[arg(long = "markerrect", env = "WZP_MARKERRECT", default_value = "392,312,32,32")]
    marker_rect: Rect,

    /// Probe classifier: probability assigned to the marked class.
    #[arg(long, env = "WZP_CONFIDENCE", default_value_t = 0.9)]
    confidence: f64,

    /// Scripted classifier: CSV of probability rows, one per frame.
    #[arg(long = "scriptedrows", env = "WZP_SCRIPTEDROWS")]
    scripted_rows: Option<PathBuf>,

    /// IPC classifier: model runner command line.
    #[arg(long = "modelcmd", env = "WZP_MODELCMD")]
    model_command: Option<String>,

    /// Reject timestamps that fail to increase and fall back to per-frame reading.
    #[arg(long = "strict-timestamps", env = "WZP_STRICT_TIMESTAMPS")]
    strict_timestamps: bool,
}

/// Directories expand to their non-hidden regular files, sorted by name.
fn expand_inputs(inputs: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(p)?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|f| f.is_file() && !is_hidden(f))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn is_hidden(p: &Path) -> bool {
    p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with('.'))
}

fn build_config(args: Args) -> Result<AppConfig, PipelineError> {
    let usage = |m: String| PipelineError::Usage(m);
    let catalog = ClassCatalog::with_target_name(args.class_names, &args.target_class).map_err(|e| usage(e.to_string()))?;
    let classifier = match args.classifier {
        ClassifierKind::Probe => ClassifierChoice::Probe { confidence: args.confidence },
        ClassifierKind::Scripted => ClassifierChoice::Scripted {
            rows: args.scripted_rows.ok_or_else(|| usage("--classifier scripted needs --scriptedrows".into()))?,
        },
        ClassifierKind::Ipc => ClassifierChoice::Ipc {
            command: args.model_command.ok_or_else(|| usage("--classifier ipc needs --modelcmd".into()))?,
        },
    };
    let inputs = expand_inputs(&args.inputs).map_err(|e| usage(format!("listing inputs: {e}")))?;
    Ok(AppConfig {
        inputs,
        output_dir: args.output,
        masks_dir: args.masks_dir,
        ingest: IngestConfig {
            decoder_command: args.decoder_command,
            frame_size: args.frame_size,
            timestamp_rect: args.ts_rect,
            crop_rect: args.crop_rect,
            input_size: args.input_size,
            batch_size: args.batch_size,
            buffer_capacity: args.buffer_capacity,
        },
        catalog,
        classifier,
        marker_rect: args.marker_rect,
        smoothing: SmoothingConfig { radius: args.smooth_radius, weights: args.weights },
        min_event_len: args.min_event_len,
        processors: args.processors,
        preprocess_workers: args.workers,
        strict_timestamps: args.strict_timestamps,
        summary_path: args.summary,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE as u8);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let outcome = build_config(args).and_then(|c| run_app(&c));
    match outcome {
        Ok(o) => {
            let s = &o.summary;
            println!(
                "{} of {} videos ok, {} frames in {:.2}s ({:.1} fps)",
                s.succeeded,
                s.videos.len(),
                s.total_frames,
                s.wall_seconds,
                s.aggregate_fps
            );
            ExitCode::from(o.exit_code as u8)
        }
        Err(e @ PipelineError::Usage(_)) => {
            error!("{e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(EXIT_FAILURE as u8)
        }
    }
}
