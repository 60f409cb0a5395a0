//! End-to-end condition-driven tracking: multi-kernel pulse curves, their
//! combined product, the derived tempo condition, and the DP decode.

use alloc::vec;
use alloc::vec::Vec;

use crate::conditions::{pick_peaks, to_condition, PeakPickConfig, TempoCondition};
use crate::grid::{BeatSequence, NoveltyCurve, TempoRange};
use crate::plp::{plp_multi, PlpCurve};
use crate::trackers::{plpdp_track_with, SearchWindow};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct PlpdpParams {
    /// Kernel sizes in seconds feeding the combined pulse curve.
    pub kernel_sizes_sec: Vec<f64>,
    pub tempo_range: TempoRange,
    pub tempo_step_bpm: u32,
    pub hop_frames: usize,
    pub peaks: PeakPickConfig,
    pub window: SearchWindow,
}

impl Default for PlpdpParams {
    fn default() -> Self {
        PlpdpParams {
            kernel_sizes_sec: vec![1.0, 3.0, 5.0],
            tempo_range: TempoRange::default(),
            tempo_step_bpm: 1,
            hop_frames: 1,
            peaks: PeakPickConfig::default(),
            window: SearchWindow::default(),
        }
    }
}

impl PlpdpParams {
    /// Single-kernel variant (three-second kernel).
    pub fn single_kernel() -> Self {
        PlpdpParams {
            kernel_sizes_sec: vec![3.0],
            ..PlpdpParams::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlpdpOutput {
    pub beats: BeatSequence,
    pub condition: TempoCondition,
    pub combined: PlpCurve,
    pub per_kernel: Vec<PlpCurve>,
}

/// Full condition-driven tracking pass over one activation curve.
pub fn plpdp_pipeline(
    activation: &NoveltyCurve,
    params: &PlpdpParams,
) -> Result<PlpdpOutput, Error> {
    let (per_kernel, combined) = plp_multi(
        activation,
        &params.kernel_sizes_sec,
        params.tempo_range,
        params.hop_frames,
        params.tempo_step_bpm,
    )?;
    let peaks = pick_peaks(combined.values(), &params.peaks);
    let condition = to_condition(&combined, &peaks);
    let beats = plpdp_track_with(activation, &condition, params.window)?;
    Ok(PlpdpOutput {
        beats,
        condition,
        combined,
        per_kernel,
    })
}
