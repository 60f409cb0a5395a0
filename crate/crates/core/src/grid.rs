//! Shared domain types: frame grid, novelty curve, beat sequence, tempo range.
//!
//! Frames are stored 0-based; frame `i` sits at `i / fps` seconds. Everything
//! crossing a file or CLI boundary is expressed in seconds.

use alloc::vec::Vec;

use crate::math;
use crate::Error;

/// Absolute slack allowed when validating `[0, 1]` ranged values
/// before clamping; anything further out is rejected.
pub const RANGE_SLACK: f64 = 1e-9;

/// Sampled time axis: `n_frames` frames at `fps` frames per second.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameGrid {
    fps: u32,
    n_frames: usize,
}

impl FrameGrid {
    pub const DEFAULT_FPS: u32 = 100;

    pub fn new(fps: u32, n_frames: usize) -> Result<Self, Error> {
        if fps == 0 {
            return Err(Error::InvalidGrid("fps must be positive"));
        }
        if n_frames == 0 {
            return Err(Error::InvalidGrid("grid needs at least one frame"));
        }
        Ok(FrameGrid { fps, n_frames })
    }

    #[inline]
    pub fn fps(&self) -> u32 {
        self.fps
    }

    #[inline]
    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    /// Time of frame `i` in seconds.
    #[inline]
    pub fn time_of(&self, frame: usize) -> f64 {
        frame as f64 / self.fps as f64
    }

    /// Nearest frame for a time in seconds (clamped to the grid).
    #[inline]
    pub fn frame_of(&self, time_sec: f64) -> usize {
        let f = math::round(time_sec * self.fps as f64);
        if f <= 0.0 {
            0
        } else {
            (f as usize).min(self.n_frames - 1)
        }
    }
}

/// Beats-per-minute window searched by tempogram and tracker state spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TempoRange {
    min_bpm: u32,
    max_bpm: u32,
}

impl TempoRange {
    pub fn new(min_bpm: u32, max_bpm: u32) -> Result<Self, Error> {
        if min_bpm == 0 || min_bpm >= max_bpm {
            return Err(Error::InvalidConfig("tempo range needs 0 < min < max"));
        }
        Ok(TempoRange { min_bpm, max_bpm })
    }

    #[inline]
    pub fn min_bpm(&self) -> u32 {
        self.min_bpm
    }

    #[inline]
    pub fn max_bpm(&self) -> u32 {
        self.max_bpm
    }
}

impl Default for TempoRange {
    fn default() -> Self {
        TempoRange {
            min_bpm: 30,
            max_bpm: 300,
        }
    }
}

/// Beat period in frames for a tempo: `60 * fps / bpm`.
pub fn bpm_to_frames(bpm: f64, fps: f64) -> Result<f64, Error> {
    if !(bpm > 0.0) || !(fps > 0.0) {
        return Err(Error::Domain("bpm and fps must be positive"));
    }
    Ok(60.0 * fps / bpm)
}

/// Frame-rate activation (novelty) function with values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct NoveltyCurve {
    grid: FrameGrid,
    values: Vec<f64>,
}

impl NoveltyCurve {
    /// Validates and wraps raw activation values. Values straying outside
    /// `[0, 1]` by at most [`RANGE_SLACK`] are clamped; anything worse is
    /// rejected, as are non-finite entries and empty input.
    pub fn new(values: Vec<f64>, fps: u32) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let grid = FrameGrid::new(fps, values.len())?;
        let mut values = values;
        for (index, v) in values.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *v < 0.0 || *v > 1.0 {
                if *v >= -RANGE_SLACK && *v <= 1.0 + RANGE_SLACK {
                    *v = v.clamp(0.0, 1.0);
                } else {
                    return Err(Error::OutOfRange { index, value: *v });
                }
            }
        }
        Ok(NoveltyCurve { grid, values })
    }

    #[inline]
    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Strictly increasing beat positions on a frame grid.
#[derive(Clone, Debug, PartialEq)]
pub struct BeatSequence {
    grid: FrameGrid,
    frames: Vec<usize>,
}

impl BeatSequence {
    pub fn new(frames: Vec<usize>, grid: FrameGrid) -> Result<Self, Error> {
        for pair in frames.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::NotIncreasing);
            }
        }
        if let Some(&last) = frames.last() {
            if last >= grid.n_frames() {
                return Err(Error::BeatBeyondGrid {
                    frame: last,
                    n_frames: grid.n_frames(),
                });
            }
        }
        Ok(BeatSequence { grid, frames })
    }

    /// Builds a sequence from beat times in seconds. The grid is sized to
    /// hold the last beat plus a one-second tail so that downstream peak
    /// detection always sees a right neighbour. Beats that collapse onto
    /// the same frame after rounding are merged.
    pub fn from_times_sec(times: &[f64], fps: u32) -> Result<Self, Error> {
        if times.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (index, t) in times.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if *t < 0.0 {
                return Err(Error::Domain("beat times must be nonnegative"));
            }
        }
        for pair in times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::NotIncreasing);
            }
        }
        let last = *times.last().unwrap();
        let n_frames = (math::round(last * fps as f64) as usize) + fps as usize + 1;
        let grid = FrameGrid::new(fps, n_frames)?;
        let mut frames: Vec<usize> = Vec::with_capacity(times.len());
        for t in times {
            let f = grid.frame_of(*t);
            if frames.last() != Some(&f) {
                frames.push(f);
            }
        }
        Ok(BeatSequence { grid, frames })
    }

    #[inline]
    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    #[inline]
    pub fn frames(&self) -> &[usize] {
        &self.frames
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Second-domain view of the beat positions.
    pub fn times_sec(&self) -> Vec<f64> {
        self.frames.iter().map(|&f| self.grid.time_of(f)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn bpm_to_frames_values() {
        assert_eq!(bpm_to_frames(120.0, 100.0).unwrap(), 50.0);
        assert_eq!(bpm_to_frames(60.0, 100.0).unwrap(), 100.0);
        assert_eq!(bpm_to_frames(30.0, 100.0).unwrap(), 200.0);
        assert!(bpm_to_frames(0.0, 100.0).is_err());
        assert!(bpm_to_frames(120.0, 0.0).is_err());
        assert!(bpm_to_frames(-3.0, 100.0).is_err());
    }

    #[test]
    fn novelty_validation() {
        let c = NoveltyCurve::new(vec![0.0, 0.5, 1.0], 100).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c.grid().fps(), 100);

        assert!(matches!(
            NoveltyCurve::new(vec![0.0, 1.2], 100),
            Err(Error::OutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            NoveltyCurve::new(vec![0.0, f64::NAN], 100),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(matches!(
            NoveltyCurve::new(vec![], 100),
            Err(Error::EmptyInput)
        ));

        // serialization noise within the slack is absorbed
        let c = NoveltyCurve::new(vec![-1e-12, 1.0 + 1e-12], 100).unwrap();
        assert_eq!(c.values(), &[0.0, 1.0]);
    }

    #[test]
    fn frame_second_round_trip() {
        let grid = FrameGrid::new(100, 5000).unwrap();
        for n in 0..5000 {
            assert_eq!(grid.frame_of(grid.time_of(n)), n);
        }
    }

    #[test]
    fn beat_sequence_invariants() {
        let grid = FrameGrid::new(100, 300).unwrap();
        assert!(BeatSequence::new(vec![10, 10], grid).is_err());
        assert!(BeatSequence::new(vec![10, 5], grid).is_err());
        assert!(BeatSequence::new(vec![10, 300], grid).is_err());
        let b = BeatSequence::new(vec![100, 200], grid).unwrap();
        assert_eq!(b.times_sec(), vec![1.0, 2.0]);
        let empty = BeatSequence::new(vec![], grid).unwrap();
        assert_eq!(empty.len(), 0);
    }

    #[test]
    fn beats_from_times() {
        let b = BeatSequence::from_times_sec(&[1.0, 2.0], 100).unwrap();
        assert_eq!(b.frames(), &[100, 200]);
        assert_eq!(b.grid().n_frames(), 301);
        // sub-frame neighbours merge instead of breaking monotonicity
        let b = BeatSequence::from_times_sec(&[1.0, 1.001, 2.0], 100).unwrap();
        assert_eq!(b.frames(), &[100, 200]);
        assert!(BeatSequence::from_times_sec(&[2.0, 1.0], 100).is_err());
    }
}
