//! Peak picking and conversion of a pulse curve into tempo conditions.
//!
//! Peaks are strict local maxima filtered by height, a minimum spacing
//! enforced highest-first, and topographic prominence. A pulse curve plus
//! its peaks yields two piecewise-constant functions sharing breakpoints at
//! the peaks' right-side anchors: the estimated inter-beat interval (the
//! enclosing inter-peak interval, in frames) and a confidence (average
//! height of the two bounding peaks).

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{bpm_to_frames, FrameGrid};
use crate::plp::PlpCurve;
use crate::Error;

/// Threshold below which the curve counts as "low" when anchoring.
pub const ANCHOR_EPSILON: f64 = 0.01;

/// Tempo prior used when a curve yields fewer than two peaks.
pub const FALLBACK_BPM: f64 = 120.0;

/// Confidence used when a curve yields no peaks at all.
pub const FALLBACK_CONFIDENCE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakPickConfig {
    pub min_height: f64,
    pub min_distance_frames: usize,
    pub min_prominence: f64,
}

impl Default for PeakPickConfig {
    fn default() -> Self {
        PeakPickConfig {
            min_height: 0.1,
            // seven frames at 100 fps matches the 70 ms evaluation tolerance
            min_distance_frames: 7,
            min_prominence: 0.1,
        }
    }
}

/// Topographic prominence of a strict local maximum: height above the higher
/// of the two lowest points on the paths to the nearest higher samples (or
/// the array edges).
fn prominence(curve: &[f64], peak: usize) -> f64 {
    let h = curve[peak];
    let mut left_min = h;
    let mut i = peak;
    while i > 0 {
        i -= 1;
        if curve[i] > h {
            break;
        }
        if curve[i] < left_min {
            left_min = curve[i];
        }
    }
    let mut right_min = h;
    let mut i = peak;
    while i + 1 < curve.len() {
        i += 1;
        if curve[i] > h {
            break;
        }
        if curve[i] < right_min {
            right_min = curve[i];
        }
    }
    h - left_min.max(right_min)
}

/// Strict local maxima of `curve` filtered by height, spacing, and
/// prominence, returned in increasing frame order.
///
/// Spacing works highest-first: peaks are visited in decreasing height
/// (ties: earlier frame) and dropped when closer than
/// `min_distance_frames` to an already-kept peak.
pub fn pick_peaks(curve: &[f64], config: &PeakPickConfig) -> Vec<usize> {
    if curve.len() < 3 {
        return Vec::new();
    }
    let mut candidates: Vec<usize> = (1..curve.len() - 1)
        .filter(|&i| {
            curve[i] > curve[i - 1] && curve[i] > curve[i + 1] && curve[i] >= config.min_height
        })
        .collect();

    if config.min_distance_frames > 1 {
        let mut order = candidates.clone();
        order.sort_by(|&a, &b| {
            curve[b]
                .partial_cmp(&curve[a])
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let mut kept = vec![false; curve.len()];
        let d = config.min_distance_frames;
        for &i in &order {
            let lo = i.saturating_sub(d - 1);
            let hi = (i + d - 1).min(curve.len() - 1);
            if !kept[lo..=hi].iter().any(|&k| k) {
                kept[i] = true;
            }
        }
        candidates.retain(|&i| kept[i]);
    }

    candidates.retain(|&i| prominence(curve, i) >= config.min_prominence);
    candidates
}

/// Frame-wise confidence and estimated inter-beat interval.
#[derive(Clone, Debug, PartialEq)]
pub struct TempoCondition {
    grid: FrameGrid,
    confidence: Vec<f64>,
    est_ibi_frames: Vec<f64>,
}

impl TempoCondition {
    pub fn new(
        grid: FrameGrid,
        confidence: Vec<f64>,
        est_ibi_frames: Vec<f64>,
    ) -> Result<Self, Error> {
        if confidence.len() != grid.n_frames() || est_ibi_frames.len() != grid.n_frames() {
            return Err(Error::GridMismatch);
        }
        if confidence
            .iter()
            .any(|&x| !x.is_finite() || !(0.0..=1.0).contains(&x))
        {
            return Err(Error::Domain("confidence must be finite in [0, 1]"));
        }
        if est_ibi_frames.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::Domain("estimated IBI must be positive"));
        }
        Ok(TempoCondition {
            grid,
            confidence,
            est_ibi_frames,
        })
    }

    /// Constant condition from the 120 BPM prior; used when a pulse curve is
    /// too degenerate to segment.
    pub fn fallback(grid: FrameGrid, confidence: f64) -> Self {
        let ibi = bpm_to_frames(FALLBACK_BPM, grid.fps() as f64).unwrap();
        TempoCondition {
            grid,
            confidence: vec![confidence; grid.n_frames()],
            est_ibi_frames: vec![ibi; grid.n_frames()],
        }
    }

    #[inline]
    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    #[inline]
    pub fn confidence(&self) -> &[f64] {
        &self.confidence
    }

    #[inline]
    pub fn est_ibi_frames(&self) -> &[f64] {
        &self.est_ibi_frames
    }
}

/// Right-side anchor of a peak: the first frame after it where the curve
/// either drops below [`ANCHOR_EPSILON`] or reaches a local minimum.
fn right_anchor(curve: &[f64], peak: usize) -> usize {
    let n = curve.len();
    let mut r = peak + 1;
    while r < n {
        if curve[r] < ANCHOR_EPSILON {
            return r;
        }
        let falling = curve[r] < curve[r - 1];
        let turning = r + 1 >= n || curve[r] <= curve[r + 1];
        if falling && turning {
            return r;
        }
        r += 1;
    }
    n - 1
}

/// Converts a pulse curve and its picked peaks into a [`TempoCondition`].
///
/// Segment boundaries are the peaks' right-side anchors; within the segment
/// between anchors `k` and `k+1` the estimated IBI is the inter-peak
/// interval `b[k+1] - b[k]` and the confidence is the mean of the two peak
/// heights. Frames before the first anchor and after the last copy the
/// nearest segment. Fewer than two peaks falls back to the 120 BPM prior
/// (a single peak keeps its own height as confidence).
pub fn to_condition(plp: &PlpCurve, peaks: &[usize]) -> TempoCondition {
    let grid = plp.grid();
    let values = plp.values();
    let n = grid.n_frames();

    if peaks.len() < 2 {
        let confidence = match peaks.first() {
            Some(&p) => values[p].clamp(0.0, 1.0),
            None => FALLBACK_CONFIDENCE,
        };
        return TempoCondition::fallback(grid, confidence);
    }

    let anchors: Vec<usize> = peaks.iter().map(|&p| right_anchor(values, p)).collect();
    let mut confidence = vec![0.0; n];
    let mut est_ibi = vec![0.0; n];

    for k in 0..peaks.len() - 1 {
        let ipi = (peaks[k + 1] - peaks[k]) as f64;
        let lam = 0.5 * (values[peaks[k]] + values[peaks[k + 1]]);
        let from = if k == 0 { 0 } else { anchors[k] + 1 };
        let to = if k == peaks.len() - 2 {
            n - 1
        } else {
            anchors[k + 1]
        };
        for i in from..=to {
            confidence[i] = lam;
            est_ibi[i] = ipi;
        }
    }

    TempoCondition {
        grid,
        confidence,
        est_ibi_frames: est_ibi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{NoveltyCurve, TempoRange};
    use crate::plp::{plp, TempogramConfig};
    use alloc::vec;

    #[test]
    fn single_triangle_peak() {
        let curve = [0.0, 0.2, 0.9, 0.2, 0.0];
        assert_eq!(pick_peaks(&curve, &PeakPickConfig::default()), vec![2]);
    }

    #[test]
    fn close_pair_keeps_higher() {
        // peaks of 0.9 and 0.8 spaced five frames apart, min distance seven
        let mut curve = vec![0.0; 16];
        curve[5] = 0.9;
        curve[10] = 0.8;
        assert_eq!(pick_peaks(&curve, &PeakPickConfig::default()), vec![5]);
    }

    #[test]
    fn distance_exactly_met_keeps_both() {
        let mut curve = vec![0.0; 20];
        curve[5] = 0.9;
        curve[12] = 0.8;
        assert_eq!(pick_peaks(&curve, &PeakPickConfig::default()), vec![5, 12]);
    }

    #[test]
    fn constant_curve_has_no_peaks() {
        let curve = vec![0.4; 32];
        assert!(pick_peaks(&curve, &PeakPickConfig::default()).is_empty());
    }

    #[test]
    fn empty_and_tiny_input() {
        let cfg = PeakPickConfig::default();
        assert!(pick_peaks(&[], &cfg).is_empty());
        assert!(pick_peaks(&[1.0, 0.5], &cfg).is_empty());
    }

    #[test]
    fn low_prominence_rejected() {
        // a small bump on the shoulder of a taller peak: height fine,
        // prominence only 0.05 (valley at 0.6 before the higher sample)
        let curve = [0.0, 1.0, 0.6, 0.65, 0.3, 0.0];
        let cfg = PeakPickConfig {
            min_distance_frames: 1,
            ..PeakPickConfig::default()
        };
        let peaks = pick_peaks(&curve, &cfg);
        assert_eq!(peaks, vec![1]);
    }

    #[test]
    fn height_tie_prefers_earlier_frame() {
        let mut curve = vec![0.0; 16];
        curve[4] = 0.8;
        curve[8] = 0.8;
        assert_eq!(pick_peaks(&curve, &PeakPickConfig::default()), vec![4]);
    }

    fn raw_curve(values: Vec<f64>, fps: u32) -> PlpCurve {
        PlpCurve::from_values(values, fps, crate::plp::KernelTag::Combined).unwrap()
    }

    #[test]
    fn condition_from_two_peaks() {
        // hand-built curve: peaks at 100 (0.8) and 150 (0.6)
        let n = 260;
        let mut vals = vec![0.0; n];
        vals[100] = 0.8;
        for d in 1..=9 {
            vals[100 - d] = 0.8 * (1.0 - d as f64 / 10.0);
            vals[100 + d] = 0.8 * (1.0 - d as f64 / 10.0);
        }
        vals[150] = 0.6;
        for d in 1..=9 {
            vals[150 - d] = vals[150 - d].max(0.6 * (1.0 - d as f64 / 10.0));
            vals[150 + d] = 0.6 * (1.0 - d as f64 / 10.0);
        }
        let curve = raw_curve(vals, 100);
        let peaks = pick_peaks(curve.values(), &PeakPickConfig::default());
        assert_eq!(peaks, vec![100, 150]);
        let cond = to_condition(&curve, &peaks);
        // anchors are where the decaying flanks die out: 110 and 160
        for i in 111..=160 {
            assert_eq!(cond.est_ibi_frames()[i], 50.0);
            assert!((cond.confidence()[i] - 0.7).abs() < 1e-12);
        }
        // leading and trailing copy the single segment
        assert_eq!(cond.est_ibi_frames()[0], 50.0);
        assert_eq!(cond.est_ibi_frames()[n - 1], 50.0);
    }

    #[test]
    fn periodic_plp_gives_constant_ibi() {
        // rectified cosine of period 50 frames via the real PLP pipeline
        let mut vals = vec![0.0; 1600];
        for (t, v) in vals.iter_mut().enumerate() {
            if t % 50 == 0 {
                *v = 1.0;
            }
        }
        let novelty = NoveltyCurve::new(vals, 100).unwrap();
        let cfg = TempogramConfig::new(3.0, TempoRange::default());
        let curve = plp(&novelty, &cfg).unwrap();
        let peaks = pick_peaks(curve.values(), &PeakPickConfig::default());
        let cond = to_condition(&curve, &peaks);
        for i in 400..1200 {
            assert!(
                (cond.est_ibi_frames()[i] - 50.0).abs() <= 1.0,
                "ibi {} at {}",
                cond.est_ibi_frames()[i],
                i
            );
        }
    }

    #[test]
    fn single_peak_fallback() {
        let mut vals = vec![0.0; 200];
        vals[90] = 0.55;
        vals[89] = 0.2;
        vals[91] = 0.2;
        let curve = raw_curve(vals, 100);
        let peaks = pick_peaks(curve.values(), &PeakPickConfig::default());
        assert_eq!(peaks, vec![90]);
        let cond = to_condition(&curve, &peaks);
        assert!(cond.est_ibi_frames().iter().all(|&x| x == 50.0));
        assert!(cond.confidence().iter().all(|&x| x == 0.55));
    }

    #[test]
    fn no_peak_fallback() {
        let curve = raw_curve(vec![0.0; 100], 100);
        let cond = to_condition(&curve, &[]);
        assert!(cond.est_ibi_frames().iter().all(|&x| x == 50.0));
        assert!(cond.confidence().iter().all(|&x| x == FALLBACK_CONFIDENCE));
    }
}
