//! Beat-tracking post-processing core.
//!
//! Takes frame-rate beat activation functions and produces beat sequences.
//! The pieces:
//!
//! - [`plp`]: Fourier tempogram and predominant-local-pulse curves, including
//!   the multi-kernel combined curve.
//! - [`conditions`]: peak picking and conversion of a pulse curve into
//!   piecewise-constant confidence / estimated-IBI functions.
//! - [`trackers`]: the actual post-processing trackers (plain peak picking,
//!   global-tempo DP, condition-driven DP, and a tempo-state HMM).
//! - [`synth`] / [`eval`]: oracle activation synthesis and F-measure /
//!   tempo-stability evaluation.
//!
//! The crate is `no_std`-compatible (`default-features = false`); it then
//! pulls float transcendentals from `libm` and only needs `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod conditions;
pub mod eval;
pub mod grid;
pub(crate) mod math;
pub mod pipeline;
pub mod plp;
pub mod synth;
pub mod trackers;

pub use grid::{bpm_to_frames, BeatSequence, FrameGrid, NoveltyCurve, TempoRange};

/// Errors shared across the crate.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("value {value} at index {index} outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("inputs live on different frame grids")]
    GridMismatch,
    #[error("positions must be strictly increasing")]
    NotIncreasing,
    #[error("beat frame {frame} outside grid of {n_frames} frames")]
    BeatBeyondGrid { frame: usize, n_frames: usize },
}
