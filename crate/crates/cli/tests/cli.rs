use std::path::{Path, PathBuf};
use std::process::Command;

use wzp_core::events::read_events_csv;
use wzp_core::geometry::Rect;
use wzp_core::synthgen::{Corruption, CorruptionKind, PlannedEvent, SyntheticVideoSpec};

const SYNTH: &str = env!("CARGO_BIN_EXE_wzp-synth");
const RUNNER: &str = env!("CARGO_BIN_EXE_wzp-probe-runner");
const WZP: &str = env!("CARGO_BIN_EXE_wzp");

fn spec(frames: usize, events: Vec<PlannedEvent>) -> SyntheticVideoSpec {
    SyntheticVideoSpec {
        frame_count: frames,
        width: 160,
        height: 96,
        start_timestamp: 999_900,
        period: 66,
        events,
        timestamp_rect: Rect::new(0, 0, 64, 8),
        marker_rect: Rect::new(128, 64, 16, 16),
        ..Default::default()
    }
}

fn write_spec(dir: &Path, name: &str, s: &SyntheticVideoSpec) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    std::fs::write(&p, serde_json::to_vec(s).unwrap()).unwrap();
    p
}

fn wzp(dir: &Path, out: &Path, extra: &[&str]) -> Command {
    let masks = dir.join("masks");
    if !masks.exists() {
        let st = Command::new(SYNTH).args(["masks", "--height", "8", "--out"]).arg(&masks).status().unwrap();
        assert!(st.success());
    }
    let mut c = Command::new(WZP);
    c.arg("--outputpath").arg(out).arg("--masksdir").arg(&masks).args([
        "--framesize",
        "160x96",
        "--tsrect",
        "0,0,64,8",
        "--croprect",
        "16,0,144,96",
        "--inputsize",
        "72x48",
        "--markerrect",
        "128,64,16,16",
        "--smoothradius",
        "0",
        "--batchsize",
        "16",
    ]);
    c.arg("--decodercmd").arg(format!("'{SYNTH}' stream {{input}} --size {{width}}x{{height}}"));
    c.args(extra).env("RUST_LOG", "warn");
    c
}

#[test]
fn synthetic_decoder_loopback() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(80, vec![PlannedEvent { class: 1, start: 10, end: 29 }, PlannedEvent { class: 1, start: 50, end: 52 }]);
    let input = write_spec(dir.path(), "drive", &s);
    let out = dir.path().join("out");
    let status = wzp(dir.path(), &out, &["--inputpath", input.to_str().unwrap()]).status().unwrap();
    assert_eq!(status.code(), Some(0));

    let rows = read_events_csv(&out.join("drive.csv")).unwrap();
    let gt = s.ground_truth().timestamps;
    let bounds: Vec<(usize, usize, String, String)> = rows
        .iter()
        .map(|r| (r.event.start_frame, r.event.end_frame, r.event.start_timestamp.clone(), r.event.end_timestamp.clone()))
        .collect();
    assert_eq!(
        bounds,
        vec![
            (10, 29, gt[10].to_string(), gt[29].to_string()),
            (50, 52, gt[50].to_string(), gt[52].to_string()),
        ]
    );
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["total_frames"], 80);
    assert_eq!(summary["videos"][0]["ok"], true);
}

#[test]
fn ipc_runner_matches_in_process_probe() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = spec(45, vec![PlannedEvent { class: 1, start: 7, end: 30 }]);
    s.ambiguous.insert(18);
    let input = write_spec(dir.path(), "ipc", &s);
    let runner = format!("'{RUNNER}' --markerrect 128,64,16,16 --croprect 16,0,144,96 --inputsize 72x48");

    let probe_out = dir.path().join("probe");
    let st = wzp(dir.path(), &probe_out, &["--inputpath", input.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let ipc_out = dir.path().join("ipc_out");
    let st = wzp(dir.path(), &ipc_out, &["--inputpath", input.to_str().unwrap(), "--classifier", "ipc", "--modelcmd", &runner])
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));

    let a = std::fs::read(probe_out.join("ipc.csv")).unwrap();
    let b = std::fs::read(ipc_out.join("ipc.csv")).unwrap();
    assert_eq!(a, b);
    // the ambiguous frame splits the event at radius 0
    assert_eq!(read_events_csv(&probe_out.join("ipc.csv")).unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");

    let st = Command::new(WZP).arg("--outputpath").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(64));
    let st = wzp(dir.path(), &out, &["--inputpath", "x.json", "--processors", "0"]).status().unwrap();
    assert_eq!(st.code(), Some(64));
    let st = wzp(dir.path(), &out, &["--inputpath", "x.json", "--classifier", "scripted"]).status().unwrap();
    assert_eq!(st.code(), Some(64));

    let mut broken = spec(20, vec![]);
    broken.corruptions = (0..20).map(|frame| Corruption { frame, kind: CorruptionKind::BlankTimestamp }).collect();
    let videos = dir.path().join("videos");
    std::fs::create_dir(&videos).unwrap();
    write_spec(&videos, "a", &spec(20, vec![]));
    write_spec(&videos, "b", &broken);
    write_spec(&videos, "c", &spec(25, vec![]));
    let st = wzp(dir.path(), &out, &["--inputpath", videos.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(2));
    assert!(out.join("a.csv").exists() && out.join("c.csv").exists() && !out.join("b.csv").exists());

    let only_broken = write_spec(dir.path(), "only", &broken);
    let st = wzp(dir.path(), &out, &["--inputpath", only_broken.to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(1));
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_spec(dir.path(), "env", &spec(10, vec![]));
    let out = dir.path().join("out");
    let st = wzp(dir.path(), &out, &[]).env("WZP_INPUTPATH", &input).env("WZP_SUMMARY", dir.path().join("s.json")).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(dir.path().join("s.json").exists());
    assert!(out.join("env.csv").exists());
}

#[test]
fn render_writes_frames_and_truth() {
    let dir = tempfile::tempdir().unwrap();
    let s = spec(6, vec![PlannedEvent { class: 1, start: 2, end: 3 }]);
    let p = write_spec(dir.path(), "r", &s);
    let (raw, truth) = (dir.path().join("r.rgb"), dir.path().join("r.truth.json"));
    let st = Command::new(SYNTH).arg("render").arg(&p).arg("--out").arg(&raw).arg("--truth").arg(&truth).status().unwrap();
    assert!(st.success());
    assert_eq!(std::fs::metadata(&raw).unwrap().len(), 6 * 160 * 96 * 3);
    let gt: serde_json::Value = serde_json::from_slice(&std::fs::read(&truth).unwrap()).unwrap();
    assert_eq!(gt["labels"], serde_json::json!([0, 0, 1, 1, 0, 0]));
}
