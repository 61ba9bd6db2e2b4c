//! Uncertainty-sampling active learning.
//!
//! Unlabeled samples are scored by their top-class confidence and binned
//! into `[0, 0.5]` and five 0.1-wide bins above it. The lowest bin is always
//! sent for hand labeling; higher bins are added one whole bin at a time
//! while the labeling budget allows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

pub type SampleId = u64;

/// Inclusive upper edge of each bin.
pub const BIN_UPPER_EDGES: [f64; 6] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const NUM_BINS: usize = BIN_UPPER_EDGES.len();

#[derive(Debug, Error)]
pub enum ActiveError {
    #[error("confidence {value} for sample {id} is outside [0, 1]")]
    Input { id: SampleId, value: f64 },
    #[error("label oracle: {0}")]
    Oracle(String),
    #[error("{path}: {reason}")]
    File { path: String, reason: String },
}

/// Bin index for a top-class confidence.
pub fn bin_index(confidence: f64) -> Option<usize> {
    if !(0.0..=1.0).contains(&confidence) {
        return None;
    }
    BIN_UPPER_EDGES.iter().position(|&edge| confidence <= edge)
}

pub fn bin_label(bin: usize) -> String {
    if bin == 0 {
        format!("[0.0, {:.1}]", BIN_UPPER_EDGES[0])
    } else {
        format!("({:.1}, {:.1}]", BIN_UPPER_EDGES[bin - 1], BIN_UPPER_EDGES[bin])
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfidenceBins {
    members: [Vec<SampleId>; NUM_BINS],
}

impl ConfidenceBins {
    pub fn members(&self, bin: usize) -> &[SampleId] {
        &self.members[bin]
    }

    pub fn counts(&self) -> [usize; NUM_BINS] {
        std::array::from_fn(|b| self.members[b].len())
    }

    pub fn total(&self) -> usize {
        self.members.iter().map(Vec::len).sum()
    }
}

pub fn bin_confidences(scores: &[(SampleId, f64)]) -> Result<ConfidenceBins, ActiveError> {
    let mut bins = ConfidenceBins::default();
    for &(id, value) in scores {
        let b = bin_index(value).ok_or(ActiveError::Input { id, value })?;
        bins.members[b].push(id);
    }
    Ok(bins)
}

/// The whole lowest bin, then each next bin in ascending order for as long
/// as it fits entirely within what is left of `budget`.
pub fn select_for_labeling(bins: &ConfidenceBins, budget: usize) -> BTreeSet<SampleId> {
    let mut selected: BTreeSet<SampleId> = bins.members[0].iter().copied().collect();
    let mut remaining = budget;
    for bin in &bins.members[1..] {
        if bin.len() > remaining {
            break;
        }
        remaining -= bin.len();
        selected.extend(bin.iter().copied());
    }
    selected
}

/// A model that can be scored and retrained; the toy stand-in for a CNN.
pub trait Learner {
    /// Top-class confidence for each sample.
    fn confidences(&self, ids: &[SampleId]) -> Vec<f64>;

    fn retrain(&mut self, labeled: &BTreeMap<SampleId, usize>);
}

pub trait LabelOracle {
    fn label(&mut self, ids: &[SampleId]) -> Result<Vec<(SampleId, usize)>, ActiveError>;
}

/// Answers from a `sample_id,label` CSV file.
#[derive(Debug, Clone, Default)]
pub struct FileOracle {
    labels: HashMap<SampleId, usize>,
}

impl FileOracle {
    pub fn from_labels(labels: HashMap<SampleId, usize>) -> Self {
        Self { labels }
    }

    pub fn load(path: &Path) -> Result<Self, ActiveError> {
        let file_err = |reason: String| ActiveError::File { path: path.display().to_string(), reason };
        let mut r = csv::Reader::from_path(path).map_err(|e| file_err(e.to_string()))?;
        let mut labels = HashMap::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| file_err(e.to_string()))?;
            let (Some(id), Some(label)) = (rec.get(0), rec.get(1)) else {
                return Err(file_err("expected sample_id,label".into()));
            };
            let id = id.trim().parse().map_err(|e| file_err(format!("sample_id {id:?}: {e}")))?;
            let label = label.trim().parse().map_err(|e| file_err(format!("label {label:?}: {e}")))?;
            labels.insert(id, label);
        }
        Ok(Self { labels })
    }
}

impl LabelOracle for FileOracle {
    fn label(&mut self, ids: &[SampleId]) -> Result<Vec<(SampleId, usize)>, ActiveError> {
        ids.iter()
            .map(|&id| {
                self.labels
                    .get(&id)
                    .map(|&l| (id, l))
                    .ok_or_else(|| ActiveError::Oracle(format!("no label for sample {id}")))
            })
            .collect()
    }
}

/// Writes one sample id per line.
pub fn write_selection_request(path: &Path, ids: &BTreeSet<SampleId>) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    for id in ids {
        writeln!(f, "{id}")?;
    }
    f.flush()
}

pub fn read_selection_request(path: &Path) -> Result<BTreeSet<SampleId>, ActiveError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ActiveError::File { path: path.display().to_string(), reason: e.to_string() })?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim().parse().map_err(|e| ActiveError::File {
                path: path.display().to_string(),
                reason: format!("{l:?}: {e}"),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub bin_counts: [usize; NUM_BINS],
    pub min_confidence: f64,
    /// Unlabeled samples at or below the convergence threshold when scored.
    pub uncertain: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveConfig {
    /// Samples beyond the mandatory lowest bin that may be sent per round.
    pub budget: usize,
    /// Converged once every unlabeled sample is more confident than this.
    pub confidence_threshold: f64,
}

impl Default for ActiveConfig {
    fn default() -> Self {
        Self { budget: 0, confidence_threshold: 0.9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundState {
    pub round: usize,
    pub labeled: BTreeMap<SampleId, usize>,
    pub unlabeled: BTreeSet<SampleId>,
    pub history: Vec<RoundRecord>,
    pub converged: bool,
}

impl RoundState {
    /// Starts from a hand-labeled seed set. Seed ids are removed from the pool.
    pub fn new(seed: BTreeMap<SampleId, usize>, pool: impl IntoIterator<Item = SampleId>) -> Self {
        let unlabeled = pool.into_iter().filter(|id| !seed.contains_key(id)).collect();
        Self { round: 0, labeled: seed, unlabeled, history: Vec::new(), converged: false }
    }
}

/// One score, bin, select, label, retrain cycle. On oracle failure the input
/// state is left as it was and the error returned.
pub fn run_active_learning_round<L: Learner + ?Sized, O: LabelOracle + ?Sized>(
    state: &RoundState,
    learner: &mut L,
    oracle: &mut O,
    config: &ActiveConfig,
) -> Result<RoundState, ActiveError> {
    let mut next = state.clone();
    if state.unlabeled.is_empty() {
        next.converged = true;
        return Ok(next);
    }
    next.round += 1;
    let ids: Vec<SampleId> = state.unlabeled.iter().copied().collect();
    let conf = learner.confidences(&ids);
    let scores: Vec<(SampleId, f64)> = ids.iter().copied().zip(conf.iter().copied()).collect();
    let bins = bin_confidences(&scores)?;
    let min_confidence = conf.iter().copied().fold(f64::INFINITY, f64::min);
    let uncertain = conf.iter().filter(|&&c| c <= config.confidence_threshold).count();

    let mut record = RoundRecord { round: next.round, bin_counts: bins.counts(), min_confidence, uncertain, selected: 0 };
    let plateaued = state.history.last().is_some_and(|prev| uncertain >= prev.uncertain);

    if min_confidence > config.confidence_threshold {
        next.converged = true;
        next.history.push(record);
        return Ok(next);
    }

    let selected: Vec<SampleId> = select_for_labeling(&bins, config.budget).into_iter().collect();
    if !selected.is_empty() {
        let answers = oracle.label(&selected)?;
        let got: BTreeSet<SampleId> = answers.iter().map(|a| a.0).collect();
        if got.len() != selected.len() || !selected.iter().all(|id| got.contains(id)) {
            return Err(ActiveError::Oracle("answers do not cover the requested samples".into()));
        }
        for (id, label) in answers {
            next.unlabeled.remove(&id);
            next.labeled.insert(id, label);
        }
        learner.retrain(&next.labeled);
    }
    record.selected = selected.len();
    next.history.push(record);
    next.converged = plateaued;
    Ok(next)
}

/// One-dimensional threshold learner for separable toy data.
///
/// The decision boundary sits midway between the largest labeled class-0
/// point and the smallest labeled class-1 point. Confidence rises linearly
/// from 0.5 at the boundary to 1.0 at the nearest labeled point.
#[derive(Debug, Clone)]
pub struct ThresholdLearner {
    points: Vec<f64>,
    threshold: f64,
    margin: f64,
}

impl ThresholdLearner {
    /// `points[id]` is the feature value of sample `id`.
    pub fn new(points: Vec<f64>) -> Self {
        let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { points, threshold: (lo + hi) / 2.0, margin: (hi - lo) / 2.0 }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn predict(&self, id: SampleId) -> usize {
        usize::from(self.points[id as usize] > self.threshold)
    }
}

impl Learner for ThresholdLearner {
    fn confidences(&self, ids: &[SampleId]) -> Vec<f64> {
        ids.iter()
            .map(|&id| {
                if self.margin <= 0.0 {
                    return 1.0;
                }
                let d = (self.points[id as usize] - self.threshold).abs();
                (0.5 + 0.5 * d / self.margin).min(1.0)
            })
            .collect()
    }

    fn retrain(&mut self, labeled: &BTreeMap<SampleId, usize>) {
        let x = |id: &SampleId| self.points[*id as usize];
        let lo = labeled.iter().filter(|(_, &l)| l == 0).map(|(id, _)| x(id)).fold(f64::NEG_INFINITY, f64::max);
        let hi = labeled.iter().filter(|(_, &l)| l != 0).map(|(id, _)| x(id)).fold(f64::INFINITY, f64::min);
        if lo.is_finite() && hi.is_finite() && lo < hi {
            self.threshold = (lo + hi) / 2.0;
            self.margin = (hi - lo) / 2.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_edges() {
        assert_eq!(bin_index(0.5), Some(0));
        assert_eq!(bin_index(0.0), Some(0));
        assert_eq!(bin_index(0.61), Some(2));
        assert_eq!(bin_index(0.6), Some(1));
        assert_eq!(bin_index(1.0), Some(5));
        assert_eq!(bin_index(1.01), None);
        assert_eq!(bin_index(f64::NAN), None);
        assert_eq!(bin_label(0), "[0.0, 0.5]");
        assert_eq!(bin_label(3), "(0.7, 0.8]");
    }

    #[test]
    fn direct_binning() {
        let bins = bin_confidences(&[(1, 0.3), (2, 0.55), (3, 0.95)]).unwrap();
        assert_eq!(bins.counts(), [1, 1, 0, 0, 0, 1]);
        assert!(matches!(bin_confidences(&[(9, -0.1)]), Err(ActiveError::Input { id: 9, .. })));
    }

    fn bins_with(counts: [usize; NUM_BINS]) -> ConfidenceBins {
        let mut bins = ConfidenceBins::default();
        let mut id = 0;
        for (b, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                bins.members[b].push(id);
                id += 1;
            }
        }
        bins
    }

    #[test]
    fn selection_policy() {
        let s = select_for_labeling(&bins_with([10, 0, 0, 0, 0, 0]), 0);
        assert_eq!(s, (0..10).collect());
        let s = select_for_labeling(&bins_with([50, 30, 20, 0, 0, 0]), 30);
        assert_eq!(s.len(), 80);
        let s = select_for_labeling(&bins_with([0, 5, 4, 0, 0, 0]), 5);
        assert_eq!(s, (0..5).collect());
        // empty bins cost nothing, bins are never split
        let s = select_for_labeling(&bins_with([1, 0, 3, 10, 1, 0]), 12);
        assert_eq!(s.len(), 4);
    }

    struct Fixed(Vec<f64>);

    impl Learner for Fixed {
        fn confidences(&self, ids: &[SampleId]) -> Vec<f64> {
            ids.iter().map(|&i| self.0[i as usize]).collect()
        }
        fn retrain(&mut self, _: &BTreeMap<SampleId, usize>) {}
    }

    struct Failing;

    impl LabelOracle for Failing {
        fn label(&mut self, _: &[SampleId]) -> Result<Vec<(SampleId, usize)>, ActiveError> {
            Err(ActiveError::Oracle("unavailable".into()))
        }
    }

    #[test]
    fn empty_pool_converges_without_change() {
        let state = RoundState::new(BTreeMap::from([(0, 1)]), [0]);
        let next = run_active_learning_round(&state, &mut Fixed(vec![]), &mut Failing, &ActiveConfig::default()).unwrap();
        assert!(next.converged);
        assert_eq!((next.round, next.labeled.clone(), next.history.len()), (0, state.labeled.clone(), 0));
    }

    #[test]
    fn confident_pool_converges_with_nothing_selected() {
        let state = RoundState::new(BTreeMap::new(), 0..3);
        let mut learner = Fixed(vec![0.95, 0.99, 0.91]);
        let next = run_active_learning_round(&state, &mut learner, &mut Failing, &ActiveConfig { budget: 10, confidence_threshold: 0.9 }).unwrap();
        assert!(next.converged);
        assert_eq!(next.history[0].selected, 0);
        assert!(next.labeled.is_empty());
    }

    #[test]
    fn oracle_failure_leaves_state_unchanged() {
        let state = RoundState::new(BTreeMap::new(), 0..3);
        let mut learner = Fixed(vec![0.4, 0.99, 0.91]);
        let err = run_active_learning_round(&state, &mut learner, &mut Failing, &ActiveConfig::default());
        assert!(err.is_err());
        assert_eq!(state.round, 0);
    }

    #[test]
    fn file_oracle_and_selection_files() {
        let dir = tempfile::tempdir().unwrap();
        let labels = dir.path().join("labels.csv");
        std::fs::write(&labels, "sample_id,label\n3,1\n7,0\n").unwrap();
        let mut oracle = FileOracle::load(&labels).unwrap();
        assert_eq!(oracle.label(&[7, 3]).unwrap(), vec![(7, 0), (3, 1)]);
        assert!(oracle.label(&[4]).is_err());

        let req = dir.path().join("request.txt");
        let ids = BTreeSet::from([5, 1, 9]);
        write_selection_request(&req, &ids).unwrap();
        assert_eq!(std::fs::read_to_string(&req).unwrap(), "1\n5\n9\n");
        assert_eq!(read_selection_request(&req).unwrap(), ids);
    }

    #[test]
    fn threshold_learner_confidence_shape() {
        let mut l = ThresholdLearner::new(vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0]);
        l.retrain(&BTreeMap::from([(1, 0), (4, 1)]));
        assert!((l.threshold() - 0.5).abs() < 1e-12);
        let c = l.confidences(&[2, 3, 0]);
        assert!((c[0] - (0.5 + 0.5 * 0.1 / 0.3)).abs() < 1e-12);
        assert_eq!(c[2], 1.0);
        assert_eq!((l.predict(2), l.predict(3)), (0, 1));
    }
}
