//! Beat evaluation: F-measure with a tolerance window, tempo-stability
//! flags, and inter-beat-interval progressions. Everything works in seconds
//! so sequences from different frame rates compare correctly.

use alloc::vec::Vec;

use crate::grid::BeatSequence;

pub const DEFAULT_TOLERANCE_SEC: f64 = 0.070;
pub const DEFAULT_STABILITY_TOL: f64 = 0.04;

/// One-to-one matching scores plus the bookkeeping behind them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalReport {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub n_matched: usize,
    pub n_est: usize,
    pub n_ref: usize,
    pub tolerance_sec: f64,
}

impl EvalReport {
    /// Mean of per-track metrics; counts are summed.
    pub fn mean(reports: &[EvalReport], tolerance_sec: f64) -> EvalReport {
        if reports.is_empty() {
            return EvalReport {
                f1: 0.0,
                precision: 0.0,
                recall: 0.0,
                n_matched: 0,
                n_est: 0,
                n_ref: 0,
                tolerance_sec,
            };
        }
        let k = reports.len() as f64;
        EvalReport {
            f1: reports.iter().map(|r| r.f1).sum::<f64>() / k,
            precision: reports.iter().map(|r| r.precision).sum::<f64>() / k,
            recall: reports.iter().map(|r| r.recall).sum::<f64>() / k,
            n_matched: reports.iter().map(|r| r.n_matched).sum(),
            n_est: reports.iter().map(|r| r.n_est).sum(),
            n_ref: reports.iter().map(|r| r.n_ref).sum(),
            tolerance_sec,
        }
    }
}

fn scores(n_matched: usize, n_est: usize, n_ref: usize, tolerance_sec: f64) -> EvalReport {
    let precision = if n_est == 0 {
        if n_ref == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        n_matched as f64 / n_est as f64
    };
    let recall = if n_ref == 0 {
        if n_est == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        n_matched as f64 / n_ref as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    EvalReport {
        f1,
        precision,
        recall,
        n_matched,
        n_est,
        n_ref,
        tolerance_sec,
    }
}

/// F-measure on beat times in seconds (both inputs sorted ascending).
///
/// Matching is reference-ordered greedy: each reference beat takes the
/// nearest still-unmatched estimate within the tolerance (ties go to the
/// earlier estimate). No beat is matched twice.
pub fn fmeasure_times(est: &[f64], reference: &[f64], tolerance_sec: f64) -> EvalReport {
    let mut matched = 0usize;
    let mut taken = alloc::vec![false; est.len()];
    let mut lo = 0usize;
    for &r in reference {
        while lo < est.len() && est[lo] < r - tolerance_sec {
            lo += 1;
        }
        let mut best: Option<usize> = None;
        let mut best_dist = f64::INFINITY;
        let mut j = lo;
        while j < est.len() && est[j] <= r + tolerance_sec {
            if !taken[j] {
                let dist = (est[j] - r).abs();
                if dist < best_dist {
                    best_dist = dist;
                    best = Some(j);
                }
            }
            j += 1;
        }
        if let Some(j) = best {
            taken[j] = true;
            matched += 1;
        }
    }
    scores(matched, est.len(), reference.len(), tolerance_sec)
}

/// F-measure on beat sequences; grids may differ, comparison is in seconds.
pub fn fmeasure(est: &BeatSequence, reference: &BeatSequence, tolerance_sec: f64) -> EvalReport {
    fmeasure_times(&est.times_sec(), &reference.times_sec(), tolerance_sec)
}

/// Track-level tempo stability flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// Fewer than two beats: stability is undefined and the track counts as
    /// unstable.
    TooFewBeats,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        matches!(self, Stability::Stable)
    }
}

/// A track is stable when every per-interval tempo, normalized by the track's
/// mean tempo, stays within `1 ± tol`.
pub fn tempo_stability_times(times_sec: &[f64], tol: f64) -> Stability {
    if times_sec.len() < 2 {
        return Stability::TooFewBeats;
    }
    let tempi: Vec<f64> = times_sec
        .windows(2)
        .map(|w| 60.0 / (w[1] - w[0]))
        .collect();
    let mean = tempi.iter().sum::<f64>() / tempi.len() as f64;
    if !(mean > 0.0) || !mean.is_finite() {
        return Stability::Unstable;
    }
    let ok = tempi
        .iter()
        .all(|&t| t / mean >= 1.0 - tol && t / mean <= 1.0 + tol);
    if ok {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

pub fn tempo_stability(beats: &BeatSequence, tol: f64) -> Stability {
    tempo_stability_times(&beats.times_sec(), tol)
}

/// Fraction of stable tracks.
pub fn stability_rate(flags: &[Stability]) -> f64 {
    if flags.is_empty() {
        return 0.0;
    }
    flags.iter().filter(|f| f.is_stable()).count() as f64 / flags.len() as f64
}

/// Pairs `(b_i, b_{i+1} - b_i)` in seconds; empty when fewer than two beats.
pub fn ibi_progression_times(times_sec: &[f64]) -> Vec<(f64, f64)> {
    times_sec.windows(2).map(|w| (w[0], w[1] - w[0])).collect()
}

pub fn ibi_progression(beats: &BeatSequence) -> Vec<(f64, f64)> {
    ibi_progression_times(&beats.times_sec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn identical_sequences_are_perfect() {
        let a = [1.0, 1.5, 2.0, 2.5];
        let r = fmeasure_times(&a, &a, 0.07);
        assert_eq!((r.f1, r.precision, r.recall), (1.0, 1.0, 1.0));
        assert_eq!(r.n_matched, 4);
    }

    #[test]
    fn shift_beyond_tolerance_matches_nothing() {
        let reference = [1.0, 2.0, 3.0];
        let est: Vec<f64> = reference.iter().map(|t| t + 0.071).collect();
        let r = fmeasure_times(&est, &reference, 0.070);
        assert_eq!((r.f1, r.precision, r.recall), (0.0, 0.0, 0.0));
    }

    #[test]
    fn half_detected() {
        let reference: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let est = &reference[..5];
        let r = fmeasure_times(est, &reference, 0.07);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 0.5);
        assert!((r.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_conventions() {
        let r = fmeasure_times(&[], &[], 0.07);
        assert_eq!((r.precision, r.recall, r.f1), (1.0, 1.0, 1.0));
        let r = fmeasure_times(&[], &[1.0], 0.07);
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
        let r = fmeasure_times(&[1.0], &[], 0.07);
        assert_eq!((r.precision, r.recall, r.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn no_double_matching() {
        // two references both near one estimate: only one can match
        let r = fmeasure_times(&[1.0], &[0.96, 1.04], 0.07);
        assert_eq!(r.n_matched, 1);
    }

    #[test]
    fn stability_flags() {
        let constant: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        assert_eq!(tempo_stability_times(&constant, 0.04), Stability::Stable);

        // one interval 10% longer than the rest
        let mut wobble = constant.clone();
        for t in wobble.iter_mut().skip(10) {
            *t += 0.05;
        }
        assert_eq!(tempo_stability_times(&wobble, 0.04), Stability::Unstable);

        assert_eq!(tempo_stability_times(&[1.0], 0.04), Stability::TooFewBeats);
        assert_eq!(
            stability_rate(&[Stability::Stable, Stability::Unstable, Stability::TooFewBeats]),
            1.0 / 3.0
        );
    }

    #[test]
    fn stability_is_scale_invariant() {
        let times: Vec<f64> = vec![0.0, 0.5, 1.02, 1.5, 2.01, 2.5];
        for scale in [0.25, 1.0, 3.0] {
            let scaled: Vec<f64> = times.iter().map(|t| t * scale).collect();
            assert_eq!(
                tempo_stability_times(&scaled, 0.04),
                tempo_stability_times(&times, 0.04)
            );
        }
    }

    #[test]
    fn ibi_progression_pairs() {
        let out = ibi_progression_times(&[1.0, 1.5, 2.1]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], (1.0, 0.5));
        assert!((out[1].0 - 1.5).abs() < 1e-12);
        assert!((out[1].1 - 0.6).abs() < 1e-12);
        assert!(ibi_progression_times(&[1.0]).is_empty());
    }
}
