//! Burned-in timestamp extraction by exact digit-mask matching.
//!
//! A timestamp strip is `h` pixels tall and `w = n * h` pixels wide; it is
//! read as `n` square slots, each compared pixel-for-pixel against the ten
//! numeral masks. The batch path ([`convert_timestamps`]) works on the whole
//! match list at once by grouping frames that share a digit count; it runs
//! two quality checks and fails if either trips. The per-frame path
//! ([`convert_timestamps_per_frame`]) reads each strip on its own and fills
//! unreadable frames by interpolation.

use thiserror::Error;

use crate::digitmask::{binarize, ColorImage, DigitMaskSet, GrayBinaryImage, MaskError, BLACK};

#[derive(Debug, Error)]
pub enum OcrError {
    #[error("timestamp geometry: {0}")]
    Geometry(String),
    #[error(transparent)]
    Mask(#[from] MaskError),
    /// At least one frame yielded no digit matches.
    #[error("detected timestamps in {detected} of {expected} frames")]
    TimestampDetectionCount { detected: usize, expected: usize },
    /// A timestamp lost one or more digits.
    #[error("timestamp digit count decreased at frame {frame}")]
    NonDecreasingTimestampLen { frame: usize },
    #[error("timestamp value decreased at frame {frame}")]
    StrictMonotonicity { frame: usize },
    #[error("no readable timestamps to synthesize from")]
    Unsynthesizable,
    #[error("readable timestamps are not strictly increasing at frame {frame}")]
    Monotonicity { frame: usize },
}

impl OcrError {
    /// True for batch-path quality-control failures, which the per-frame
    /// fallback is meant to recover from.
    pub fn is_quality_control(&self) -> bool {
        matches!(
            self,
            OcrError::TimestampDetectionCount { .. }
                | OcrError::NonDecreasingTimestampLen { .. }
                | OcrError::StrictMonotonicity { .. }
        )
    }
}

/// Timestamp strips cut from `l` frames, in frame order.
#[derive(Debug, Clone)]
pub struct TimestampBatch {
    strips: Vec<ColorImage>,
    digit_height: usize,
    width: usize,
}

impl TimestampBatch {
    pub fn new(strips: Vec<ColorImage>, digit_height: usize, width: usize) -> Result<Self, OcrError> {
        if digit_height == 0 || width == 0 || !width.is_multiple_of(digit_height) {
            return Err(OcrError::Geometry(format!(
                "strip width {width} is not a positive multiple of digit height {digit_height}"
            )));
        }
        if let Some((i, s)) = strips
            .iter()
            .enumerate()
            .find(|(_, s)| s.height != digit_height || s.width != width)
        {
            return Err(OcrError::Geometry(format!(
                "strip {i} is {}x{}, expected {digit_height}x{width}",
                s.height, s.width
            )));
        }
        Ok(Self { strips, digit_height, width })
    }

    /// Wraps already-binarized strips.
    pub fn from_binary(strips: &[GrayBinaryImage], digit_height: usize, width: usize) -> Result<Self, OcrError> {
        Self::new(strips.iter().map(GrayBinaryImage::to_color).collect(), digit_height, width)
    }

    pub fn len(&self) -> usize {
        self.strips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strips.is_empty()
    }

    pub fn digit_height(&self) -> usize {
        self.digit_height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Maximum digit count per timestamp.
    pub fn max_digits(&self) -> usize {
        self.width / self.digit_height
    }

    pub fn strips(&self) -> &[ColorImage] {
        &self.strips
    }
}

/// Matches as three parallel sequences, ordered by (frame, digit, position).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSet {
    pub frames: Vec<usize>,
    pub digits: Vec<u8>,
    pub positions: Vec<usize>,
}

impl MatchSet {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Extracted timestamps plus the frames whose value was fabricated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimestampResult {
    pub values: Vec<String>,
    pub synthesized: Vec<bool>,
}

impl TimestampResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn synthesized_count(&self) -> usize {
        self.synthesized.iter().filter(|&&s| s).count()
    }

    pub fn to_integers(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.parse().expect("timestamps are decimal integers")).collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OcrOptions {
    /// After a successful batch conversion, also require the numeric values
    /// to be non-decreasing in frame order.
    pub strict_monotonic: bool,
}

fn check_mask_height(masks: &DigitMaskSet, h: usize) -> Result<(), OcrError> {
    if masks.digit_height() != h {
        return Err(OcrError::Geometry(format!(
            "digit height {h} does not match mask height {}",
            masks.digit_height()
        )));
    }
    Ok(())
}

fn tile_matches(strip: &GrayBinaryImage, slot: usize, mask: &GrayBinaryImage) -> bool {
    let h = mask.height();
    (0..h).all(|y| strip.row_span(y, slot * h, h) == mask.row_span(y, 0, h))
}

/// Appends the matches of one frame, digit-major within the frame.
fn push_frame_matches(out: &mut MatchSet, f: usize, slot_hit: &[Option<u8>]) {
    for d in 0..10u8 {
        for (p, hit) in slot_hit.iter().enumerate() {
            if *hit == Some(d) {
                out.frames.push(f);
                out.digits.push(d);
                out.positions.push(p);
            }
        }
    }
}

/// Matches every slot of one binarized strip and appends the hits.
fn match_strip_into(out: &mut MatchSet, f: usize, strip: &GrayBinaryImage, masks: &DigitMaskSet, slot_hit: &mut [Option<u8>]) {
    for (p, hit) in slot_hit.iter_mut().enumerate() {
        // Distinct masks: a tile equals at most one of them.
        *hit = (0..10u8).find(|&d| tile_matches(strip, p, masks.mask(d as usize)));
    }
    push_frame_matches(out, f, slot_hit);
}

/// Compares every slot of every binarized strip against every mask.
pub fn match_digits(strips: &[GrayBinaryImage], masks: &DigitMaskSet) -> Result<MatchSet, OcrError> {
    let h = masks.digit_height();
    let mut out = MatchSet::default();
    let Some(first) = strips.first() else {
        return Ok(out);
    };
    let width = first.width();
    if width % h != 0 {
        return Err(OcrError::Geometry(format!("strip width {width} is not a multiple of {h}")));
    }
    let mut slot_hit: Vec<Option<u8>> = vec![None; width / h];
    for (f, strip) in strips.iter().enumerate() {
        if strip.height() != h || strip.width() != width {
            return Err(OcrError::Geometry(format!("strip {f} has shape {}x{}", strip.height(), strip.width())));
        }
        match_strip_into(&mut out, f, strip, masks, &mut slot_hit);
    }
    Ok(out)
}

/// Run-length encodes a sorted sequence into (values, counts).
fn unique_with_counts(sorted: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut values = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for &v in sorted {
        if values.last() == Some(&v) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(v);
            counts.push(1);
        }
    }
    (values, counts)
}

/// Sorted unique values of `xs`, each with its first index and count.
fn unique_with_indices_and_counts(xs: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut uniq: Vec<usize> = xs.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    let mut first = vec![usize::MAX; uniq.len()];
    let mut counts = vec![0; uniq.len()];
    for (i, x) in xs.iter().enumerate() {
        let k = uniq.binary_search(x).expect("value is present");
        first[k] = first[k].min(i);
        counts[k] += 1;
    }
    (uniq, first, counts)
}

fn digit_char(d: u8) -> char {
    (b'0' + d) as char
}

/// Batch conversion of timestamp strips to strings.
pub fn convert_timestamps(batch: &TimestampBatch, masks: &DigitMaskSet) -> Result<TimestampResult, OcrError> {
    convert_timestamps_with(batch, masks, OcrOptions::default())
}

pub fn convert_timestamps_with(
    batch: &TimestampBatch,
    masks: &DigitMaskSet,
    options: OcrOptions,
) -> Result<TimestampResult, OcrError> {
    check_mask_height(masks, batch.digit_height)?;
    let l = batch.len();
    if l == 0 {
        return Err(OcrError::Geometry("empty timestamp batch".into()));
    }
    // Binarized one strip at a time; the match list is the only per-batch
    // intermediate kept.
    let mut matches = MatchSet::default();
    let mut slot_hit: Vec<Option<u8>> = vec![None; batch.max_digits()];
    for (f, strip) in batch.strips.iter().enumerate() {
        match_strip_into(&mut matches, f, &binarize(strip), masks, &mut slot_hit);
    }

    // Digit count per frame, then the distinct digit counts in ascending
    // order with where each first occurs and how often.
    let (_frames, frame_counts) = unique_with_counts(&matches.frames);
    let (lengths, first_index, length_counts) = unique_with_indices_and_counts(&frame_counts);

    let detected: usize = length_counts.iter().sum();
    if detected != l {
        return Err(OcrError::TimestampDetectionCount { detected, expected: l });
    }
    for i in 1..first_index.len() {
        if first_index[i] < first_index[i - 1] {
            return Err(OcrError::NonDecreasingTimestampLen { frame: first_index[i - 1] });
        }
    }

    let mut values = vec![String::new(); l];
    let mut right = 0usize;
    for g in 0..lengths.len() {
        let len = lengths[g];
        let count = length_counts[g];
        let left = right;
        right = left + len * count;
        let first_frame = first_index[g];
        let positions = &matches.positions[left..right];
        let digits = &matches.digits[left..right];
        let frames = &matches.frames[left..right];
        let mut order: Vec<usize> = Vec::with_capacity(len);
        for t in 0..count {
            let frame = first_frame + t;
            let offset = t * len;
            // Same-length frames are contiguous only when lengths never drop
            // back; anything else means a timestamp lost digits.
            if frames[offset..offset + len].iter().any(|&f| f != frame) {
                return Err(OcrError::NonDecreasingTimestampLen { frame });
            }
            order.clear();
            order.extend(0..len);
            order.sort_by_key(|&j| positions[offset + j]);
            let mut s = String::with_capacity(len);
            for (slot, &j) in order.iter().enumerate() {
                let p = positions[offset + j];
                assert!(
                    slot == 0 || positions[offset + order[slot - 1]] != p,
                    "two masks matched frame {frame} slot {p}"
                );
                if p != slot {
                    return Err(OcrError::NonDecreasingTimestampLen { frame });
                }
                s.push(digit_char(digits[offset + j]));
            }
            values[frame] = s;
        }
    }

    if options.strict_monotonic {
        let mut prev = 0u64;
        for (frame, v) in values.iter().enumerate() {
            let x: u64 = v.parse().map_err(|_| OcrError::StrictMonotonicity { frame })?;
            if x < prev {
                return Err(OcrError::StrictMonotonicity { frame });
            }
            prev = x;
        }
    }

    Ok(TimestampResult { synthesized: vec![false; l], values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Blank,
    Digit(u8),
    Unmatched,
    Ambiguous,
}

fn classify_slot(strip: &GrayBinaryImage, p: usize, masks: &DigitMaskSet) -> Slot {
    let mut hits = (0..10u8).filter(|&d| tile_matches(strip, p, masks.mask(d as usize)));
    match (hits.next(), hits.next()) {
        (Some(d), None) => Slot::Digit(d),
        (Some(_), Some(_)) => Slot::Ambiguous,
        (None, _) => {
            let h = masks.digit_height();
            let blank = (0..h).all(|y| strip.row_span(y, p * h, h).iter().all(|&v| v == BLACK));
            if blank {
                Slot::Blank
            } else {
                Slot::Unmatched
            }
        }
    }
}

/// Reads one binarized strip. `None` when any non-blank slot fails to match
/// exactly one mask, when a digit follows a blank slot, or when no digit is
/// present.
fn read_strip(strip: &GrayBinaryImage, masks: &DigitMaskSet) -> Option<String> {
    let n = strip.width() / masks.digit_height();
    let mut s = String::new();
    let mut ended = false;
    for p in 0..n {
        match classify_slot(strip, p, masks) {
            Slot::Digit(d) if !ended => s.push(digit_char(d)),
            Slot::Blank => ended = true,
            _ => return None,
        }
    }
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

/// Per-strip conversion that never raises the batch quality-control errors;
/// unreadable frames are filled by [`synthesize_missing`] and flagged.
pub fn convert_timestamps_per_frame(batch: &TimestampBatch, masks: &DigitMaskSet) -> Result<TimestampResult, OcrError> {
    check_mask_height(masks, batch.digit_height)?;
    let l = batch.len();
    let read: Vec<Option<String>> = batch
        .strips
        .iter()
        .map(|strip| read_strip(&binarize(strip), masks))
        .collect();

    if read.iter().all(Option::is_some) {
        if l == 0 {
            return Err(OcrError::Unsynthesizable);
        }
        return Ok(TimestampResult { values: read.into_iter().flatten().collect(), synthesized: vec![false; l] });
    }

    let anchors: Vec<(usize, u64)> = read
        .iter()
        .enumerate()
        .filter_map(|(f, v)| v.as_ref().and_then(|s| s.parse().ok()).map(|x| (f, x)))
        .collect();
    if anchors.is_empty() {
        return Err(OcrError::Unsynthesizable);
    }
    let filled = synthesize_missing(&anchors, l)?;
    let mut synthesized = vec![false; l];
    let values = read
        .into_iter()
        .zip(filled)
        .enumerate()
        .map(|(f, (r, x))| match r {
            Some(s) if anchors.binary_search_by_key(&f, |a| a.0).is_ok() => s,
            _ => {
                synthesized[f] = true;
                x.to_string()
            }
        })
        .collect();
    Ok(TimestampResult { values, synthesized })
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Fills a length-`l` sequence from sparse `(frame, value)` anchors.
///
/// Gaps between anchors are linearly interpolated and rounded half up. Frames
/// before the first or after the last anchor are extrapolated at the median
/// per-frame period of the anchors, rounded to an integer (0 becomes 1) and
/// clamped at zero. A single anchor is repeated.
pub fn synthesize_missing(readable: &[(usize, u64)], l: usize) -> Result<Vec<u64>, OcrError> {
    if readable.is_empty() {
        return Err(OcrError::Unsynthesizable);
    }
    for w in readable.windows(2) {
        if w[1].0 <= w[0].0 {
            return Err(OcrError::Geometry(format!("anchor frames out of order at {}", w[1].0)));
        }
        if w[1].1 <= w[0].1 {
            return Err(OcrError::Monotonicity { frame: w[1].0 });
        }
    }
    let last = *readable.last().unwrap();
    if last.0 >= l {
        return Err(OcrError::Geometry(format!("anchor frame {} outside {l} frames", last.0)));
    }

    let mut out = vec![0u64; l];
    for w in readable.windows(2) {
        let ((fa, va), (fb, vb)) = (w[0], w[1]);
        let span = (fb - fa) as u128;
        let rise = (vb - va) as u128;
        for f in fa..=fb {
            let k = (f - fa) as u128;
            out[f] = va + ((2 * rise * k + span) / (2 * span)) as u64;
        }
    }

    let first = readable[0];
    out[first.0] = first.1;
    let period = if readable.len() < 2 {
        0
    } else {
        let mut rates: Vec<f64> = readable
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) as f64 / (w[1].0 - w[0].0) as f64)
            .collect();
        rates.sort_by(f64::total_cmp);
        (median(&rates).round() as u64).max(1)
    };
    for f in 0..first.0 {
        out[f] = first.1.saturating_sub((first.0 - f) as u64 * period);
    }
    for f in last.0 + 1..l {
        out[f] = last.1 + (f - last.0) as u64 * period;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digitmask::binarize_images;
    use crate::synthgen::{builtin_masks, render_timestamp_strip};

    fn batch_of(values: &[u64], n: usize) -> (TimestampBatch, DigitMaskSet) {
        let masks = builtin_masks(16);
        let strips: Vec<_> = values.iter().map(|&v| render_timestamp_strip(v, n, &masks).unwrap()).collect();
        (TimestampBatch::from_binary(&strips, 16, n * 16).unwrap(), masks)
    }

    fn corrupt(strip: &mut ColorImage, slot: usize) {
        let h = strip.height;
        let i = (h / 2) * strip.width + slot * h + h / 2;
        strip.data[i] = 255 - strip.data[i];
    }

    #[test]
    fn single_digit_match() {
        let (b, m) = batch_of(&[3], 4);
        let bin = binarize_images(b.strips()).unwrap();
        let ms = match_digits(&bin, &m).unwrap();
        assert_eq!((ms.frames, ms.digits, ms.positions), (vec![0], vec![3], vec![0]));
    }

    #[test]
    fn ten_enumerates_digit_before_position() {
        let (b, m) = batch_of(&[10], 4);
        let bin = binarize_images(b.strips()).unwrap();
        let ms = match_digits(&bin, &m).unwrap();
        assert_eq!((ms.frames, ms.digits, ms.positions), (vec![0, 0], vec![0, 1], vec![1, 0]));
    }

    #[test]
    fn background_matches_nothing() {
        let m = builtin_masks(16);
        let ms = match_digits(&[GrayBinaryImage::blank(16, 64)], &m).unwrap();
        assert!(ms.is_empty());
    }

    #[test]
    fn digit_count_transition_is_accepted() {
        let (b, m) = batch_of(&[999965, 1000031], 7);
        let r = convert_timestamps(&b, &m).unwrap();
        assert_eq!(r.values, vec!["999965", "1000031"]);
        assert_eq!(r.synthesized, vec![false, false]);
    }

    #[test]
    fn shorter_after_longer_is_rejected() {
        let (b, m) = batch_of(&[12, 5], 4);
        assert!(matches!(convert_timestamps(&b, &m), Err(OcrError::NonDecreasingTimestampLen { frame: 1 })));
    }

    #[test]
    fn blank_strip_fails_detection_count() {
        let m = builtin_masks(16);
        let strips = vec![render_timestamp_strip(7, 4, &m).unwrap(), GrayBinaryImage::blank(16, 64)];
        let b = TimestampBatch::from_binary(&strips, 16, 64).unwrap();
        assert!(matches!(
            convert_timestamps(&b, &m),
            Err(OcrError::TimestampDetectionCount { detected: 1, expected: 2 })
        ));
    }

    #[test]
    fn interleaved_lengths_are_rejected_not_garbled() {
        // Lengths 2,3,2,3: the first-occurrence check alone passes.
        let (b, m) = batch_of(&[10, 100, 20, 200], 4);
        assert!(matches!(convert_timestamps(&b, &m), Err(OcrError::NonDecreasingTimestampLen { .. })));
    }

    #[test]
    fn gap_inside_a_timestamp_is_rejected() {
        let (mut b, m) = batch_of(&[1234, 1235], 4);
        corrupt(&mut b.strips[0], 1);
        corrupt(&mut b.strips[1], 1);
        assert!(matches!(convert_timestamps(&b, &m), Err(OcrError::NonDecreasingTimestampLen { .. })));
    }

    #[test]
    fn leading_short_frame_passes_batch_checks() {
        let (mut b, m) = batch_of(&[1234, 1300, 1366], 4);
        corrupt(&mut b.strips[0], 3);
        let r = convert_timestamps(&b, &m).unwrap();
        assert_eq!(r.values, vec!["123", "1300", "1366"]);
        let strict = convert_timestamps_with(&b, &m, OcrOptions { strict_monotonic: true });
        assert!(strict.is_ok(), "123 < 1300 is still monotone");
        let per_frame = convert_timestamps_per_frame(&b, &m).unwrap();
        assert_eq!(per_frame.synthesized, vec![true, false, false]);
        assert_eq!(per_frame.values, vec!["1234", "1300", "1366"]);
    }

    #[test]
    fn strict_pass_catches_decreasing_values() {
        let (b, m) = batch_of(&[500, 400], 3);
        assert!(convert_timestamps(&b, &m).is_ok());
        assert!(matches!(
            convert_timestamps_with(&b, &m, OcrOptions { strict_monotonic: true }),
            Err(OcrError::StrictMonotonicity { frame: 1 })
        ));
    }

    #[test]
    fn per_frame_matches_batch_on_clean_input() {
        let (b, m) = batch_of(&[98, 164, 230, 296], 4);
        assert_eq!(convert_timestamps(&b, &m).unwrap(), convert_timestamps_per_frame(&b, &m).unwrap());
    }

    #[test]
    fn per_frame_interpolates_a_corrupted_frame() {
        let (mut b, m) = batch_of(&[100, 166, 232], 4);
        corrupt(&mut b.strips[1], 0);
        let r = convert_timestamps_per_frame(&b, &m).unwrap();
        assert_eq!(r.values, vec!["100", "166", "232"]);
        assert_eq!(r.synthesized, vec![false, true, false]);
    }

    #[test]
    fn per_frame_all_corrupt_is_unsynthesizable() {
        let (mut b, m) = batch_of(&[100, 166], 4);
        corrupt(&mut b.strips[0], 0);
        corrupt(&mut b.strips[1], 2);
        assert!(matches!(convert_timestamps_per_frame(&b, &m), Err(OcrError::Unsynthesizable)));
    }

    #[test]
    fn synthesis_examples() {
        assert_eq!(synthesize_missing(&[(0, 100), (2, 232)], 3).unwrap(), vec![100, 166, 232]);
        assert_eq!(synthesize_missing(&[(1, 66)], 3).unwrap(), vec![66, 66, 66]);
        assert_eq!(synthesize_missing(&[(0, 0), (1, 66), (3, 198)], 4).unwrap(), vec![0, 66, 132, 198]);
    }

    #[test]
    fn synthesis_extrapolates_edges_at_median_period() {
        // periods 66, 66, 70 -> median 66
        let got = synthesize_missing(&[(2, 200), (3, 266), (4, 332), (5, 402)], 8).unwrap();
        assert_eq!(got, vec![68, 134, 200, 266, 332, 402, 468, 534]);
        // clamped at zero
        assert_eq!(synthesize_missing(&[(2, 10), (3, 76)], 4).unwrap(), vec![0, 0, 10, 76]);
        // sub-unit period rounds to 0 and is treated as 1
        assert_eq!(synthesize_missing(&[(1, 5), (5, 6)], 7).unwrap()[6], 7);
    }

    #[test]
    fn synthesis_rejects_non_increasing_anchors() {
        assert!(matches!(synthesize_missing(&[(0, 5), (1, 5)], 2), Err(OcrError::Monotonicity { frame: 1 })));
        assert!(matches!(synthesize_missing(&[], 2), Err(OcrError::Unsynthesizable)));
    }

    #[test]
    fn synthesis_is_identity_when_complete() {
        let anchors: Vec<_> = (0..5).map(|i| (i, 10 + 3 * i as u64)).collect();
        assert_eq!(synthesize_missing(&anchors, 5).unwrap(), vec![10, 13, 16, 19, 22]);
    }

    #[test]
    fn grouping_helpers() {
        assert_eq!(unique_with_counts(&[0, 0, 1, 2, 2, 2]), (vec![0, 1, 2], vec![2, 1, 3]));
        assert_eq!(
            unique_with_indices_and_counts(&[7, 6, 7, 6]),
            (vec![6, 7], vec![1, 0], vec![2, 2])
        );
    }

    #[test]
    fn mask_height_mismatch() {
        let m = builtin_masks(16);
        let b = TimestampBatch::new(vec![ColorImage::filled(8, 32, 1, 0)], 8, 32).unwrap();
        assert!(matches!(convert_timestamps(&b, &m), Err(OcrError::Geometry(_))));
        assert!(TimestampBatch::new(vec![], 16, 40).is_err());
    }
}
