//! Post-processing trackers: peak picking, dynamic-programming beat search
//! with constant or frame-varying tempo conditions, and a tempo-state HMM.
//!
//! The DP maximizes
//!
//! ```text
//! C(B) = sum_k activation(b_k) + sum_k lambda(b_k) * P(b_k - b_{k-1})
//! P_d0(d) = -(log2(d / d0))^2
//! ```
//!
//! over all strictly increasing beat sequences, via the forward recurrence
//!
//! ```text
//! D(n) = activation(n) + max(0, max_{m < n} { D(m) + lambda(n) * P_ibi(n)(n - m) })
//! ```
//!
//! with predecessor bookkeeping and a backward walk from the argmax of `D`.
//! An exact mode scans every predecessor; the windowed mode restricts the
//! scan to `[n - ceil(w * ibi), n - floor(ibi / w)]`, which is safe because
//! the penalty at a factor-`w` tempo deviation already dwarfs any achievable
//! activation gain.

use alloc::vec;
use alloc::vec::Vec;

use crate::conditions::{pick_peaks, PeakPickConfig, TempoCondition};
use crate::eval::{fmeasure, EvalReport};
use crate::grid::{bpm_to_frames, BeatSequence, NoveltyCurve, TempoRange};
use crate::math;
use crate::Error;

/// Predecessor scan range for the DP forward pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SearchWindow {
    /// Every earlier frame; quadratic but exact by construction.
    Full,
    /// Frames within a tempo factor of the local IBI estimate.
    Windowed { factor: f64 },
}

impl Default for SearchWindow {
    fn default() -> Self {
        SearchWindow::Windowed { factor: 4.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DpConfig {
    /// Preassigned beat period in frames.
    pub delta0_frames: f64,
    /// Balance between activation strength and tempo consistency.
    pub lambda0: f64,
    pub window: SearchWindow,
}

impl DpConfig {
    pub fn new(delta0_frames: f64) -> Self {
        DpConfig {
            delta0_frames,
            lambda0: 100.0,
            window: SearchWindow::default(),
        }
    }
}

/// Forward-pass output: accumulated scores and predecessors, 1-based with a
/// virtual start at index 0 (`predecessor == 0` means "sequence starts
/// here").
#[derive(Clone, Debug, PartialEq)]
pub struct DpState {
    pub accumulated_score: Vec<f64>,
    pub predecessor: Vec<usize>,
}

impl DpState {
    /// Backward pass: walk predecessors from the argmax of the accumulated
    /// score (ties toward the smaller index) and return 0-based beat frames
    /// in chronological order.
    pub fn backtrack(&self) -> Vec<usize> {
        let d = &self.accumulated_score;
        let mut best = 0usize;
        for n in 1..d.len() {
            if d[n] > d[best] {
                best = n;
            }
        }
        if best == 0 {
            return Vec::new();
        }
        let mut chain = vec![best];
        let mut cur = best;
        while self.predecessor[cur] != 0 {
            cur = self.predecessor[cur];
            chain.push(cur);
        }
        chain.reverse();
        chain.iter().map(|&n| n - 1).collect()
    }
}

/// Tempo-consistency penalty `-(log2(delta / delta0))^2`; zero exactly at
/// `delta == delta0` and strictly decreasing away from it.
pub fn penalty(delta: f64, delta0: f64) -> Result<f64, Error> {
    if !(delta > 0.0) || !(delta0 > 0.0) {
        return Err(Error::Domain("penalty needs positive intervals"));
    }
    Ok(penalty_unchecked(delta, delta0))
}

#[inline(always)]
fn penalty_unchecked(delta: f64, delta0: f64) -> f64 {
    let l = math::log2(delta / delta0);
    -(l * l)
}

fn run_dp<L, I>(activation: &[f64], lambda_of: L, ibi_of: I, window: SearchWindow) -> DpState
where
    L: Fn(usize) -> f64,
    I: Fn(usize) -> f64,
{
    let n_frames = activation.len();
    let mut score = vec![0.0f64; n_frames + 1];
    let mut pred = vec![0usize; n_frames + 1];

    for n in 1..=n_frames {
        let lambda = lambda_of(n - 1);
        let ibi = ibi_of(n - 1);
        let (lo, hi) = match window {
            SearchWindow::Full => (1, n - 1),
            SearchWindow::Windowed { factor } => {
                let span_max = math::ceil(factor * ibi) as usize;
                let span_min = (math::floor(ibi / factor) as usize).max(1);
                (n.saturating_sub(span_max).max(1), n.saturating_sub(span_min))
            }
        };
        let mut best = f64::NEG_INFINITY;
        let mut best_m = 0usize;
        let mut m = lo;
        while m <= hi && m < n {
            let cand = score[m] + lambda * penalty_unchecked((n - m) as f64, ibi);
            if cand > best {
                best = cand;
                best_m = m;
            }
            m += 1;
        }
        if best > 0.0 {
            score[n] = activation[n - 1] + best;
            pred[n] = best_m;
        } else {
            score[n] = activation[n - 1];
            pred[n] = 0;
        }
    }

    DpState {
        accumulated_score: score,
        predecessor: pred,
    }
}

/// Global-tempo DP: constant preassigned IBI and balance factor.
pub fn dp_state(activation: &NoveltyCurve, config: &DpConfig) -> DpState {
    run_dp(
        activation.values(),
        |_| config.lambda0,
        |_| config.delta0_frames,
        config.window,
    )
}

pub fn dp_track(activation: &NoveltyCurve, config: &DpConfig) -> BeatSequence {
    let state = dp_state(activation, config);
    BeatSequence::new(state.backtrack(), activation.grid())
        .expect("backtrack yields increasing in-grid frames")
}

/// Condition-driven DP: per-frame confidence and IBI estimate.
pub fn plpdp_state(
    activation: &NoveltyCurve,
    condition: &TempoCondition,
    window: SearchWindow,
) -> Result<DpState, Error> {
    if activation.grid() != condition.grid() {
        return Err(Error::GridMismatch);
    }
    let lambda = condition.confidence();
    let ibi = condition.est_ibi_frames();
    Ok(run_dp(
        activation.values(),
        |i| lambda[i],
        |i| ibi[i],
        window,
    ))
}

pub fn plpdp_track_with(
    activation: &NoveltyCurve,
    condition: &TempoCondition,
    window: SearchWindow,
) -> Result<BeatSequence, Error> {
    let state = plpdp_state(activation, condition, window)?;
    Ok(BeatSequence::new(state.backtrack(), activation.grid())
        .expect("backtrack yields increasing in-grid frames"))
}

pub fn plpdp_track(
    activation: &NoveltyCurve,
    condition: &TempoCondition,
) -> Result<BeatSequence, Error> {
    plpdp_track_with(activation, condition, SearchWindow::default())
}

/// Plain peak picking on the activation itself; every peak is a beat.
pub fn sppk_track(activation: &NoveltyCurve) -> BeatSequence {
    let peaks = pick_peaks(activation.values(), &PeakPickConfig::default());
    BeatSequence::new(peaks, activation.grid()).expect("peaks are increasing in-grid frames")
}

/// Tempo-change likelihood `exp(-lambda_trans * |psi_cur / psi_prev - 1|)`.
/// Identically 1 when `lambda_trans` is zero.
pub fn tempo_transition(psi_prev: f64, psi_cur: f64, lambda_trans: f64) -> Result<f64, Error> {
    if !(psi_prev > 0.0) {
        return Err(Error::Domain("previous tempo must be positive"));
    }
    Ok(math::exp(-lambda_trans * math::fabs(psi_cur / psi_prev - 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HmmConfig {
    /// Steepness of the tempo-change likelihood; 0 makes every change
    /// equally likely.
    pub lambda_trans: f64,
    pub tempo_range: TempoRange,
    /// Cap on the number of tempo states; `None` keeps every integer beat
    /// period the range allows.
    pub n_tempo_states: Option<usize>,
    /// Fraction of each beat period treated as the beat-emitting region.
    pub observation_beat_fraction: f64,
    pub observation_lambda: f64,
}

impl Default for HmmConfig {
    fn default() -> Self {
        HmmConfig {
            lambda_trans: 100.0,
            tempo_range: TempoRange::default(),
            n_tempo_states: None,
            observation_beat_fraction: 1.0 / 16.0,
            observation_lambda: 16.0,
        }
    }
}

impl HmmConfig {
    /// Integer beat periods (frames per beat) covered by the tempo range.
    pub fn periods(&self, fps: u32) -> Result<Vec<usize>, Error> {
        let fps = fps as f64;
        let min_period = math::round(bpm_to_frames(self.tempo_range.max_bpm() as f64, fps)?);
        let max_period = math::round(bpm_to_frames(self.tempo_range.min_bpm() as f64, fps)?);
        let lo = (min_period as usize).max(1);
        let hi = max_period as usize;
        if hi < lo {
            return Err(Error::InvalidConfig(
                "tempo range discretizes to no beat period",
            ));
        }
        let all: Vec<usize> = (lo..=hi).collect();
        let keep = match self.n_tempo_states {
            Some(0) => {
                return Err(Error::InvalidConfig("need at least one tempo state"));
            }
            Some(k) if k < all.len() => {
                // evenly spaced subsample, endpoints included
                let mut out = Vec::with_capacity(k);
                if k == 1 {
                    out.push(all[0]);
                } else {
                    for i in 0..k {
                        let pos = i as f64 * (all.len() - 1) as f64 / (k - 1) as f64;
                        let idx = math::round(pos) as usize;
                        let v = all[idx];
                        if out.last() != Some(&v) {
                            out.push(v);
                        }
                    }
                }
                out
            }
            _ => all,
        };
        Ok(keep)
    }
}

/// Viterbi decoding over a beat-phase by tempo state space.
///
/// Each tempo state is an integer beat period; its phase counter advances one
/// frame per step and wraps at the period. Tempo changes only happen on the
/// wrap, weighted by [`tempo_transition`] renormalized over the reachable
/// periods. Frames whose first phase slot is decoded become beats.
pub fn hmm_track(activation: &NoveltyCurve, config: &HmmConfig) -> Result<BeatSequence, Error> {
    let grid = activation.grid();
    let fps = grid.fps();
    let periods = config.periods(fps)?;
    let n_periods = periods.len();
    let values = activation.values();
    let n = values.len();

    // state layout: contiguous phase runs per period, phase 0 first
    let mut offset = vec![0usize; n_periods];
    let mut total = 0usize;
    for (i, &p) in periods.iter().enumerate() {
        offset[i] = total;
        total += p;
    }

    let beat_len: Vec<usize> = periods
        .iter()
        .map(|&p| {
            let b = math::ceil(p as f64 * config.observation_beat_fraction) as usize;
            b.clamp(1, p)
        })
        .collect();

    // log transition weights between periods, row-normalized
    let fps_f = fps as f64;
    let mut log_trans = vec![0.0f64; n_periods * n_periods];
    for (src, &ps) in periods.iter().enumerate() {
        let tempo_src = 60.0 * fps_f / ps as f64;
        let mut row_sum = 0.0;
        for (dst, &pd) in periods.iter().enumerate() {
            let tempo_dst = 60.0 * fps_f / pd as f64;
            let f = tempo_transition(tempo_src, tempo_dst, config.lambda_trans)?;
            log_trans[src * n_periods + dst] = f;
            row_sum += f;
        }
        let log_norm = ln(row_sum);
        for dst in 0..n_periods {
            let f = log_trans[src * n_periods + dst];
            log_trans[src * n_periods + dst] = ln(f) - log_norm;
        }
    }

    // per frame the emission takes only two values: beat-region and not
    let emissions = |x: f64| -> (f64, f64) {
        (
            ln(x.max(f64::MIN_POSITIVE)),
            ln(((1.0 - x) / config.observation_lambda).max(f64::MIN_POSITIVE)),
        )
    };

    let mut prev = vec![0.0f64; total];
    let mut cur = vec![0.0f64; total];
    // wrap choices per frame: chosen source period index for each period's
    // phase-0 state
    let mut wrap_from = vec![0u16; n * n_periods];
    debug_assert!(n_periods <= u16::MAX as usize);

    // frame 0: uniform start, emission only
    let (on, off) = emissions(values[0]);
    for (pi, &p) in periods.iter().enumerate() {
        for phase in 0..p {
            prev[offset[pi] + phase] = if phase < beat_len[pi] { on } else { off };
        }
    }

    for frame in 1..n {
        let (on, off) = emissions(values[frame]);
        // wrap scores: best source is the last phase of each period
        for (pi, _) in periods.iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            let mut best_src = 0usize;
            for (src, &ps) in periods.iter().enumerate() {
                let cand = prev[offset[src] + ps - 1] + log_trans[src * n_periods + pi];
                if cand > best {
                    best = cand;
                    best_src = src;
                }
            }
            cur[offset[pi]] = best + on;
            wrap_from[frame * n_periods + pi] = best_src as u16;
        }
        // deterministic in-period advance
        for (pi, &p) in periods.iter().enumerate() {
            let base = offset[pi];
            let bl = beat_len[pi];
            for phase in 1..p {
                cur[base + phase] = prev[base + phase - 1] + if phase < bl { on } else { off };
            }
        }
        core::mem::swap(&mut prev, &mut cur);
    }

    // final argmax, ties toward the smaller state index
    let mut best_state = 0usize;
    for s in 1..total {
        if prev[s] > prev[best_state] {
            best_state = s;
        }
    }
    let state_period_phase = |state: usize| -> (usize, usize) {
        let pi = match offset.binary_search(&state) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (pi, state - offset[pi])
    };

    let (mut pi, mut phase) = state_period_phase(best_state);
    let mut beats_rev = Vec::new();
    let mut frame = n;
    while frame > 0 {
        frame -= 1;
        if phase == 0 {
            beats_rev.push(frame);
            if frame > 0 {
                let src = wrap_from[frame * n_periods + pi] as usize;
                pi = src;
                phase = periods[src] - 1;
            }
        } else {
            phase -= 1;
        }
    }
    beats_rev.reverse();
    BeatSequence::new(beats_rev, grid)
}

#[inline(always)]
fn ln(x: f64) -> f64 {
    math::log2(x) * core::f64::consts::LN_2
}

/// HMM tracking swept over transition steepness values; one mean report per
/// value, sorted ascending.
pub fn grid_search_lambda_trans(
    corpus: &[(NoveltyCurve, BeatSequence)],
    lambdas: &[f64],
    base: &HmmConfig,
    tolerance_sec: f64,
) -> Result<Vec<(f64, EvalReport)>, Error> {
    if corpus.is_empty() || lambdas.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted: Vec<f64> = lambdas.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let mut out = Vec::with_capacity(sorted.len());
    for &lambda in &sorted {
        let config = HmmConfig {
            lambda_trans: lambda,
            ..*base
        };
        let mut reports = Vec::with_capacity(corpus.len());
        for (activation, reference) in corpus {
            let est = hmm_track(activation, &config)?;
            reports.push(fmeasure(&est, reference, tolerance_sec));
        }
        out.push((lambda, EvalReport::mean(&reports, tolerance_sec)));
    }
    Ok(out)
}
