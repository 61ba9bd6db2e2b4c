//! Model runner serving the probe classifier over stdin/stdout.

use std::io::{self, BufReader, BufWriter};
use std::process::ExitCode;

use clap::Parser;

use wzp_core::classify::{probe_classifier, project_marker, serve_model_runner, ClassCatalog};
use wzp_core::geometry::{Rect, Size};

#[derive(Debug, Parser)]
#[command(name = "wzp-probe-runner", version)]
struct Args {
    #[arg(long = "classnames", value_delimiter = ',', default_value = "not_work_zone,work_zone")]
    class_names: Vec<String>,
    #[arg(long = "targetclass", default_value = "work_zone")]
    target_class: String,
    #[arg(long, default_value_t = 0.9)]
    confidence: f64,
    /// Marker location in raw-frame pixels.
    #[arg(long = "markerrect", default_value = "392,312,32,32")]
    marker_rect: Rect,
    #[arg(long = "croprect", default_value = "40,0,400,360")]
    crop_rect: Rect,
    #[arg(long = "inputsize", default_value = "224x224")]
    input_size: Size,
}

fn run(args: Args) -> Result<usize, String> {
    let catalog = ClassCatalog::with_target_name(args.class_names, &args.target_class).map_err(|e| e.to_string())?;
    let marker = project_marker(args.marker_rect, args.crop_rect, args.input_size)
        .ok_or_else(|| "marker falls outside the crop".to_string())?;
    let mut probe = probe_classifier(&catalog, args.confidence, marker).map_err(|e| e.to_string())?;
    let mut input = BufReader::new(io::stdin().lock());
    let mut output = BufWriter::new(io::stdout().lock());
    serve_model_runner(&mut input, &mut output, &mut probe).map_err(|e| e.to_string())
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
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wzp-probe-runner: {e}");
            ExitCode::FAILURE
        }
    }
}
