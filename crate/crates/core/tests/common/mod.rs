//! Shared test-only machinery: an independent scorer and maximizer for the
//! beat-sequence objective, plus random instance generation.
//!
//! The scorer and maximizer deliberately avoid the production DP code path:
//! the maximizer is a memoized top-down recursion over "best sequence ending
//! at n", and `enumerate_max_score` certifies it against a literal power-set
//! sweep on small instances (the sequence space is exponential, so the
//! literal sweep is only feasible there).

use beatkit_core::trackers::penalty;
use rand::Rng;

/// Beat-sequence objective: activation at each beat plus, for every
/// consecutive pair, the confidence-weighted tempo penalty evaluated at the
/// later beat. Frames are 0-based.
pub fn score_sequence(
    activation: &[f64],
    lambda: &[f64],
    ibi: &[f64],
    frames: &[usize],
) -> f64 {
    let mut total = 0.0;
    for (k, &b) in frames.iter().enumerate() {
        total += activation[b];
        if k > 0 {
            let gap = (b - frames[k - 1]) as f64;
            total += lambda[b] * penalty(gap, ibi[b]).unwrap();
        }
    }
    total
}

/// Maximum objective over all strictly increasing beat sequences (including
/// the empty one), via memoized recursion on the last beat.
pub fn oracle_max_score(activation: &[f64], lambda: &[f64], ibi: &[f64]) -> f64 {
    fn best_ending_at(
        n: usize,
        activation: &[f64],
        lambda: &[f64],
        ibi: &[f64],
        memo: &mut [Option<f64>],
    ) -> f64 {
        if let Some(v) = memo[n] {
            return v;
        }
        let mut best_tail = 0.0f64;
        for m in 0..n {
            let prev = best_ending_at(m, activation, lambda, ibi, memo);
            let gap = (n - m) as f64;
            let cand = prev + lambda[n] * penalty(gap, ibi[n]).unwrap();
            if cand > best_tail {
                best_tail = cand;
            }
        }
        let v = activation[n] + best_tail;
        memo[n] = Some(v);
        v
    }

    let mut memo = vec![None; activation.len()];
    let mut best = 0.0f64; // empty sequence
    for n in 0..activation.len() {
        let v = best_ending_at(n, activation, lambda, ibi, &mut memo);
        if v > best {
            best = v;
        }
    }
    best
}

/// Literal exhaustive sweep over every subset of frames; only for tiny `n`.
pub fn enumerate_max_score(activation: &[f64], lambda: &[f64], ibi: &[f64]) -> f64 {
    let n = activation.len();
    assert!(n <= 18, "power-set sweep is exponential");
    let mut best = 0.0f64;
    let mut frames = Vec::with_capacity(n);
    for mask in 0u32..(1u32 << n) {
        frames.clear();
        for b in 0..n {
            if mask & (1 << b) != 0 {
                frames.push(b);
            }
        }
        let s = score_sequence(activation, lambda, ibi, &frames);
        if s > best {
            best = s;
        }
    }
    best
}

pub struct RandomInstance {
    pub activation: Vec<f64>,
    pub lambda: Vec<f64>,
    pub ibi: Vec<f64>,
}

/// Random activation in `[0, 1)` with a random piecewise-constant condition.
pub fn random_instance<R: Rng>(rng: &mut R, n: usize) -> RandomInstance {
    let activation: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let mut lambda = Vec::with_capacity(n);
    let mut ibi = Vec::with_capacity(n);
    while lambda.len() < n {
        let seg = rng.gen_range(5..30).min(n - lambda.len());
        let lam = rng.gen_range(0.0..1.0);
        let d = rng.gen_range(2.0..40.0);
        for _ in 0..seg {
            lambda.push(lam);
            ibi.push(d);
        }
    }
    RandomInstance {
        activation,
        lambda,
        ibi,
    }
}
