//! Synthetic fixture tool. `stream` doubles as a decoder command so that
//! spec files can be fed to `wzp` in place of real videos.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wzp_core::digitmask::{load_digit_masks, DigitMaskSet, DEFAULT_DIGIT_HEIGHT};
use wzp_core::geometry::Size;
use wzp_core::synthgen::{builtin_masks, write_synthetic_video, SyntheticVideoSpec};

#[derive(Debug, Parser)]
#[command(name = "wzp-synth", version)]
struct Args {
    /// Digit masks to render with; the bundled set otherwise.
    #[arg(long = "masksdir", global = true)]
    masks_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write raw RGB frames for SPEC to stdout.
    Stream {
        spec: PathBuf,
        /// Fail unless the spec's frame size is exactly this.
        #[arg(long)]
        size: Option<Size>,
    },
    /// Write raw RGB frames to a file and the ground truth as JSON.
    Render {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Write the bundled digit masks as PGM files.
    Masks {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DIGIT_HEIGHT)]
        height: usize,
    },
}

fn read_spec(path: &Path) -> Result<SyntheticVideoSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn masks_for(dir: &Option<PathBuf>, spec: &SyntheticVideoSpec) -> Result<DigitMaskSet, String> {
    match dir {
        Some(d) => load_digit_masks(d).map_err(|e| e.to_string()),
        None => Ok(builtin_masks(spec.timestamp_rect.height.max(8))),
    }
}

fn run(args: Args) -> Result<(), String> {
    match args.command {
        Command::Stream { spec, size } => {
            let spec = read_spec(&spec)?;
            if let Some(size) = size {
                if size != spec.frame_size() {
                    return Err(format!("requested {size} frames but the spec renders {}", spec.frame_size()));
                }
            }
            let masks = masks_for(&args.masks_dir, &spec)?;
            let mut out = BufWriter::with_capacity(1 << 20, io::stdout().lock());
            match write_synthetic_video(&spec, &masks, &mut out) {
                Ok(_) => Ok(()),
                // reader went away; not our failure
                Err(wzp_core::synthgen::SynthError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(e.to_string()),
            }
        }
        Command::Render { spec, out, truth } => {
            let spec = read_spec(&spec)?;
            let masks = masks_for(&args.masks_dir, &spec)?;
            let file = File::create(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            let mut w = BufWriter::new(file);
            let gt = write_synthetic_video(&spec, &masks, &mut w).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            if let Some(path) = truth {
                let json = serde_json::to_vec_pretty(&gt).map_err(|e| e.to_string())?;
                std::fs::write(&path, json).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            Ok(())
        }
        Command::Masks { out, height } => {
            if height < 8 {
                return Err("mask height must be at least 8".into());
            }
            std::fs::create_dir_all(&out).map_err(|e| format!("{}: {e}", out.display()))?;
            builtin_masks(height).write_to_dir(&out).map_err(|e| e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wzp-synth: {e}");
            ExitCode::FAILURE
        }
    }
}
