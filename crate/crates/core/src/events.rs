//! Probability smoothing, argmax labelling, event extraction and CSV export.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::{ClassCatalog, ProbabilityMatrix};
use crate::tsocr::TimestampResult;

pub const CSV_HEADER: [&str; 9] = [
    "video_id",
    "event_id",
    "class_name",
    "start_frame",
    "end_frame",
    "start_timestamp",
    "end_timestamp",
    "frame_count",
    "mean_confidence",
];

#[derive(Debug, Error)]
pub enum EventError {
    #[error("input mismatch: {0}")]
    Input(String),
    #[error("export to {path}: {source}")]
    Export { path: String, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightProfile {
    Uniform,
    Triangular,
}

impl std::str::FromStr for WeightProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "triangular" => Ok(Self::Triangular),
            _ => Err(format!("unknown weight profile {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    pub radius: usize,
    pub weights: WeightProfile,
}

impl Default for SmoothingConfig {
    /// Triangular, radius 7: about half a second at 15 fps.
    fn default() -> Self {
        Self { radius: 7, weights: WeightProfile::Triangular }
    }
}

impl SmoothingConfig {
    /// Weight for an offset of `d` frames from the centre, `d <= radius`.
    fn weight(&self, d: usize) -> f64 {
        match self.weights {
            WeightProfile::Uniform => 1.0,
            WeightProfile::Triangular => (self.radius + 1 - d) as f64,
        }
    }
}

/// Weighted moving average over `2r + 1` rows. The window is truncated at
/// the sequence ends and its weights renormalized.
pub fn smooth_probabilities(p: &ProbabilityMatrix, cfg: &SmoothingConfig) -> ProbabilityMatrix {
    let (l, k, r) = (p.len(), p.num_classes(), cfg.radius);
    if r == 0 || l == 0 {
        return p.clone();
    }
    let mut out = ProbabilityMatrix::empty(k);
    let mut acc = vec![0.0; k];
    for i in 0..l {
        acc.fill(0.0);
        let mut total = 0.0;
        for j in i.saturating_sub(r)..=(i + r).min(l - 1) {
            let w = cfg.weight(i.abs_diff(j));
            total += w;
            for (a, v) in acc.iter_mut().zip(p.row(j)) {
                *a += w * v;
            }
        }
        for a in &mut acc {
            *a /= total;
        }
        out.push_row_unchecked(&acc);
    }
    out
}

/// Per-row argmax; ties go to the lowest class index.
pub fn labels_from_probabilities(p: &ProbabilityMatrix) -> Vec<usize> {
    p.rows()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, &v)| if v > best.1 { (i, v) } else { best })
                .0
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub event_id: usize,
    pub class_name: String,
    pub start_frame: usize,
    pub end_frame: usize,
    pub start_timestamp: String,
    pub end_timestamp: String,
    pub frame_count: usize,
    /// Mean smoothed probability of the target class over the event.
    pub mean_confidence: f64,
}

/// Maximal runs of the target class at least `min_len` frames long.
///
/// `probabilities` supplies the per-frame confidence averaged into each
/// event; event ids count up from 1 in frame order.
pub fn extract_events(
    labels: &[usize],
    probabilities: &ProbabilityMatrix,
    timestamps: &TimestampResult,
    catalog: &ClassCatalog,
    min_len: usize,
) -> Result<Vec<Event>, EventError> {
    let l = labels.len();
    if timestamps.len() != l || probabilities.len() != l {
        return Err(EventError::Input(format!(
            "{l} labels, {} timestamps, {} probability rows",
            timestamps.len(),
            probabilities.len()
        )));
    }
    if min_len == 0 {
        return Err(EventError::Input("minimum event length must be at least 1".into()));
    }
    let target = catalog.target_class();
    let mut events = Vec::new();
    let mut i = 0;
    while i < l {
        if labels[i] != target {
            i += 1;
            continue;
        }
        let start = i;
        while i < l && labels[i] == target {
            i += 1;
        }
        let end = i - 1;
        let len = end - start + 1;
        if len >= min_len {
            let mean = (start..=end).map(|f| probabilities.row(f)[target]).sum::<f64>() / len as f64;
            events.push(Event {
                event_id: events.len() + 1,
                class_name: catalog.target_name().to_string(),
                start_frame: start,
                end_frame: end,
                start_timestamp: timestamps.values[start].clone(),
                end_timestamp: timestamps.values[end].clone(),
                frame_count: len,
                mean_confidence: mean.clamp(0.0, 1.0),
            });
        }
    }
    Ok(events)
}

fn csv_writer<W: io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Renders the CSV document for one video.
pub fn events_csv_bytes(events: &[Event], video_id: &str) -> Result<Vec<u8>, EventError> {
    let mut w = csv_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for e in events {
        w.write_record([
            video_id.to_string(),
            e.event_id.to_string(),
            e.class_name.clone(),
            e.start_frame.to_string(),
            e.end_frame.to_string(),
            e.start_timestamp.clone(),
            e.end_timestamp.clone(),
            e.frame_count.to_string(),
            format!("{:.6}", e.mean_confidence),
        ])?;
    }
    w.into_inner().map_err(|e| EventError::Csv(e.into_error().into()))
}

/// Writes the CSV next to `out_path` and renames it into place.
pub fn write_events_csv(events: &[Event], video_id: &str, out_path: &Path) -> Result<(), EventError> {
    let export_err = |source: io::Error| EventError::Export { path: out_path.display().to_string(), source };
    let bytes = events_csv_bytes(events, video_id)?;
    let dir = match out_path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(export_err)?;
    io::Write::write_all(&mut tmp, &bytes).map_err(export_err)?;
    tmp.as_file().sync_all().map_err(export_err)?;
    tmp.persist(out_path).map_err(|e| export_err(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub video_id: String,
    pub event: Event,
}

/// Parses a file written by [`write_events_csv`].
pub fn read_events_csv(path: &Path) -> Result<Vec<EventRecord>, EventError> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(EventError::Input(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let field = |i: usize| rec.get(i).unwrap_or_default();
        let num = |i: usize| {
            field(i)
                .parse::<usize>()
                .map_err(|e| EventError::Input(format!("column {}: {e}", CSV_HEADER[i])))
        };
        out.push(EventRecord {
            video_id: field(0).to_string(),
            event: Event {
                event_id: num(1)?,
                class_name: field(2).to_string(),
                start_frame: num(3)?,
                end_frame: num(4)?,
                start_timestamp: field(5).to_string(),
                end_timestamp: field(6).to_string(),
                frame_count: num(7)?,
                mean_confidence: field(8)
                    .parse()
                    .map_err(|e| EventError::Input(format!("mean_confidence: {e}")))?,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(rows: &[[f64; 2]]) -> ProbabilityMatrix {
        ProbabilityMatrix::from_rows(2, rows).unwrap()
    }

    fn ts(n: usize) -> TimestampResult {
        TimestampResult { values: (0..n).map(|i| (1000 + 66 * i).to_string()).collect(), synthesized: vec![false; n] }
    }

    fn uniform(radius: usize) -> SmoothingConfig {
        SmoothingConfig { radius, weights: WeightProfile::Uniform }
    }

    #[test]
    fn constant_input_is_a_fixed_point() {
        let p = pm(&[[0.3, 0.7]; 6]);
        let s = smooth_probabilities(&p, &SmoothingConfig::default());
        for row in s.rows() {
            assert!((row[0] - 0.3).abs() < 1e-12 && (row[1] - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_three_row_mean() {
        let s = smooth_probabilities(&pm(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]), &uniform(1));
        assert!((s.row(1)[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.row(1)[1] - 1.0 / 3.0).abs() < 1e-12);
        // truncated window at the edge: rows 0 and 1 only
        assert!((s.row(0)[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn triangular_weights() {
        let cfg = SmoothingConfig { radius: 1, weights: WeightProfile::Triangular };
        let s = smooth_probabilities(&pm(&[[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]]), &cfg);
        // weights 1,2,1
        assert!((s.row(1)[1] - 0.5).abs() < 1e-12);
        // edge: weights 2 (self), 1 (neighbour)
        assert!((s.row(0)[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn radius_zero_is_identity() {
        let p = pm(&[[0.1, 0.9], [0.8, 0.2]]);
        assert_eq!(smooth_probabilities(&p, &uniform(0)), p);
    }

    #[test]
    fn argmax_and_tie_break() {
        assert_eq!(labels_from_probabilities(&pm(&[[0.2, 0.8], [0.5, 0.5], [0.9, 0.1]])), vec![1, 0, 0]);
    }

    #[test]
    fn event_runs() {
        let cat = ClassCatalog::default();
        let p = pm(&[[0.1, 0.9]; 4]);
        let ev = extract_events(&[0, 1, 1, 0], &p, &ts(4), &cat, 1).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].start_frame, ev[0].end_frame, ev[0].frame_count), (1, 2, 2));
        assert_eq!((ev[0].start_timestamp.as_str(), ev[0].end_timestamp.as_str()), ("1066", "1132"));
        assert!((ev[0].mean_confidence - 0.9).abs() < 1e-12);
        assert!(extract_events(&[0; 4], &p, &ts(4), &cat, 1).unwrap().is_empty());
        let ev = extract_events(&[1, 1, 0, 1], &p, &ts(4), &cat, 2).unwrap();
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].start_frame, ev[0].end_frame), (0, 1));
        assert!(matches!(extract_events(&[0; 3], &p, &ts(4), &cat, 1), Err(EventError::Input(_))));
    }

    #[test]
    fn csv_layout() {
        let cat = ClassCatalog::default();
        let p = pm(&[[0.1, 0.9], [0.2, 0.8], [0.9, 0.1]]);
        let ev = extract_events(&[1, 1, 0], &p, &ts(3), &cat, 1).unwrap();
        let text = String::from_utf8(events_csv_bytes(&ev, "vid").unwrap()).unwrap();
        assert_eq!(
            text,
            "video_id,event_id,class_name,start_frame,end_frame,start_timestamp,end_timestamp,frame_count,mean_confidence\n\
             vid,1,work_zone,0,1,1000,1066,2,0.850000\n"
        );
        let empty = String::from_utf8(events_csv_bytes(&[], "vid").unwrap()).unwrap();
        assert_eq!(empty.lines().count(), 1);
    }

    #[test]
    fn csv_quotes_awkward_names() {
        let cat = ClassCatalog::new(vec!["a".into(), "cone, \"orange\"".into()], 1).unwrap();
        let p = pm(&[[0.0, 1.0]]);
        let ev = extract_events(&[1], &p, &ts(1), &cat, 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        write_events_csv(&ev, "v", &path).unwrap();
        let back = read_events_csv(&path).unwrap();
        assert_eq!(back[0].event.class_name, "cone, \"orange\"");
    }

    #[test]
    fn export_to_missing_directory_fails() {
        let err = write_events_csv(&[], "v", Path::new("/nonexistent/dir/out.csv")).unwrap_err();
        assert!(matches!(err, EventError::Export { .. }));
    }
}
