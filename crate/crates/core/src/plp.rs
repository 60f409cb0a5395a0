//! Predominant-local-pulse computation.
//!
//! A Fourier tempogram is obtained by correlating the novelty curve, under a
//! sliding Hann window, with complex exponentials on a BPM grid. Per analysis
//! frame the strongest tempo bin defines an optimal windowed cosine kernel
//! (tempo + phase); overlap-adding all kernels and half-wave rectifying gives
//! the pulse curve. Curves for several kernel sizes can be combined by
//! element-wise multiplication, which suppresses positions where the kernels
//! disagree.
//!
//! The tempogram uses the Hann identity `w(j) = 0.5 - 0.5*cos(2*pi*j/(L-1))`
//! to turn each windowed inner product into three prefix-sum lookups, so the
//! whole tempogram costs `O(n_frames * n_bins)` instead of
//! `O(n_frames * n_bins * L)`. Tests check this against the direct sum.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{FrameGrid, NoveltyCurve, TempoRange};
use crate::math::{self, Complex};
use crate::Error;

const TAU: f64 = core::f64::consts::TAU;

/// Frames per block between exact re-seeds of the incremental complex
/// rotation; bounds phase drift well below coefficient tolerances.
const ROTATION_BLOCK: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct TempogramConfig {
    /// Kernel (analysis window) size in seconds.
    pub kernel_size_sec: f64,
    /// Spacing of analysis frames, in frames.
    pub hop_frames: usize,
    pub tempo_range: TempoRange,
    /// Tempo grid step in BPM.
    pub tempo_step_bpm: u32,
}

impl TempogramConfig {
    pub fn new(kernel_size_sec: f64, tempo_range: TempoRange) -> Self {
        TempogramConfig {
            kernel_size_sec,
            hop_frames: 1,
            tempo_range,
            tempo_step_bpm: 1,
        }
    }

    /// Analysis window length in frames.
    pub fn window_len(&self, fps: u32) -> usize {
        math::round(self.kernel_size_sec * fps as f64) as usize
    }

    fn validate(&self, fps: u32) -> Result<(), Error> {
        if !self.kernel_size_sec.is_finite() || self.kernel_size_sec <= 0.0 {
            return Err(Error::InvalidConfig("kernel size must be positive"));
        }
        if self.window_len(fps) < 2 {
            return Err(Error::InvalidConfig(
                "kernel shorter than two frames; increase kernel size",
            ));
        }
        if self.hop_frames == 0 {
            return Err(Error::InvalidConfig("hop must be at least one frame"));
        }
        if self.tempo_step_bpm == 0 {
            return Err(Error::InvalidConfig("tempo step must be positive"));
        }
        Ok(())
    }

    fn tempo_grid(&self) -> Vec<f64> {
        (self.tempo_range.min_bpm()..=self.tempo_range.max_bpm())
            .step_by(self.tempo_step_bpm as usize)
            .map(|b| b as f64)
            .collect()
    }
}

/// Complex Fourier coefficients over (analysis frame, tempo bin).
#[derive(Clone, Debug)]
pub struct Tempogram {
    grid: FrameGrid,
    config: TempogramConfig,
    window_len: usize,
    /// Analysis frame centers, 0-based, spaced by the hop.
    centers: Vec<usize>,
    tempi_bpm: Vec<f64>,
    /// Row-major: `coeffs[center_idx * n_bins + bin_idx]`.
    coeffs: Vec<Complex>,
}

impl Tempogram {
    #[inline]
    pub fn grid(&self) -> FrameGrid {
        self.grid
    }

    #[inline]
    pub fn config(&self) -> &TempogramConfig {
        &self.config
    }

    #[inline]
    pub fn window_len(&self) -> usize {
        self.window_len
    }

    #[inline]
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    #[inline]
    pub fn tempi_bpm(&self) -> &[f64] {
        &self.tempi_bpm
    }

    #[inline]
    pub fn coefficient(&self, center_idx: usize, bin_idx: usize) -> Complex {
        self.coeffs[center_idx * self.tempi_bpm.len() + bin_idx]
    }

    #[inline]
    pub fn magnitude(&self, center_idx: usize, bin_idx: usize) -> f64 {
        self.coefficient(center_idx, bin_idx).norm()
    }

    fn row(&self, center_idx: usize) -> &[Complex] {
        let k = self.tempi_bpm.len();
        &self.coeffs[center_idx * k..(center_idx + 1) * k]
    }
}

/// Hann window value at position `j` of an `len`-point window.
#[inline]
pub(crate) fn hann(j: usize, len: usize) -> f64 {
    0.5 - 0.5 * math::cos(TAU * j as f64 / (len - 1) as f64)
}

/// Windowed inner product of the novelty curve with complex exponentials of
/// frequency `bpm / 60` Hz, Hann window of `round(kernel_size_sec * fps)`
/// frames centered at each analysis frame, zero-padded at the edges.
pub fn fourier_tempogram(
    novelty: &NoveltyCurve,
    config: &TempogramConfig,
) -> Result<Tempogram, Error> {
    let grid = novelty.grid();
    let fps = grid.fps() as f64;
    config.validate(grid.fps())?;

    let tempi = config.tempo_grid();
    if tempi.is_empty() {
        return Err(Error::InvalidConfig("tempo grid is empty"));
    }

    let n = grid.n_frames();
    let len = config.window_len(grid.fps());
    let half = (len / 2) as isize;
    let omega = TAU / (len - 1) as f64;
    let centers: Vec<usize> = (0..n).step_by(config.hop_frames).collect();
    let values = novelty.values();

    // Window-phase factors shared by every tempo bin.
    let cos_wt: Vec<f64> = (0..n).map(|t| math::cos(omega * t as f64)).collect();
    let sin_wt: Vec<f64> = (0..n).map(|t| math::sin(omega * t as f64)).collect();
    let start_phase: Vec<(f64, f64)> = centers
        .iter()
        .map(|&c| {
            let s = omega * (c as isize - half) as f64;
            (math::cos(s), math::sin(s))
        })
        .collect();

    let mut coeffs = vec![Complex::ZERO; centers.len() * tempi.len()];
    let mut p0 = vec![Complex::ZERO; n + 1];
    let mut pc = vec![Complex::ZERO; n + 1];
    let mut ps = vec![Complex::ZERO; n + 1];

    for (bin_idx, &bpm) in tempi.iter().enumerate() {
        let step = -TAU * (bpm / 60.0) / fps;
        let rot = Complex::cis(step);
        let mut z = Complex::ZERO;
        for t in 0..n {
            if t % ROTATION_BLOCK == 0 {
                z = Complex::cis(step * t as f64);
            }
            let y = z.scale(values[t]);
            p0[t + 1] = p0[t] + y;
            pc[t + 1] = pc[t] + y.scale(cos_wt[t]);
            ps[t + 1] = ps[t] + y.scale(sin_wt[t]);
            z = z * rot;
        }
        for (center_idx, &c) in centers.iter().enumerate() {
            let s = c as isize - half;
            let lo = s.max(0) as usize;
            let hi = ((s + len as isize - 1).min(n as isize - 1)) as usize;
            if lo > hi {
                continue;
            }
            let sum0 = p0[hi + 1] - p0[lo];
            let sum_c = pc[hi + 1] - pc[lo];
            let sum_s = ps[hi + 1] - ps[lo];
            let (cs, ss) = start_phase[center_idx];
            let x = sum0.scale(0.5) - (sum_c.scale(cs) + sum_s.scale(ss)).scale(0.5);
            coeffs[center_idx * tempi.len() + bin_idx] = x;
        }
    }

    Ok(Tempogram {
        grid,
        config: config.clone(),
        window_len: len,
        centers,
        tempi_bpm: tempi,
        coeffs,
    })
}

/// Best-correlating windowed cosine at one analysis frame.
///
/// The kernel is `cos(2*pi * (tempo_bpm/60) * t - phase)` with `t` in
/// seconds, weighted by the analysis Hann window around `center_frame`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalKernel {
    pub center_frame: usize,
    pub tempo_bpm: f64,
    /// Radians in `[0, 2*pi)`.
    pub phase: f64,
    /// Fourier coefficient magnitude at the winning tempo bin.
    pub magnitude: f64,
}

impl OptimalKernel {
    /// Unwindowed kernel value at a frame.
    #[inline]
    pub fn value_at(&self, frame: usize, fps: u32) -> f64 {
        let t = frame as f64 / fps as f64;
        math::cos(TAU * (self.tempo_bpm / 60.0) * t - self.phase)
    }
}

/// Argmax over tempo bins per analysis frame. Ties (including all-zero
/// windows) resolve to the lowest tempo bin with phase 0.
pub fn optimal_kernels(tempogram: &Tempogram) -> Vec<OptimalKernel> {
    tempogram
        .centers()
        .iter()
        .enumerate()
        .map(|(center_idx, &center_frame)| {
            let row = tempogram.row(center_idx);
            let mut best_bin = 0usize;
            let mut best_sq = row[0].norm_sqr();
            for (bin, x) in row.iter().enumerate().skip(1) {
                let sq = x.norm_sqr();
                if sq > best_sq {
                    best_sq = sq;
                    best_bin = bin;
                }
            }
            let coeff = row[best_bin];
            let phase = if best_sq == 0.0 {
                0.0
            } else {
                // cos(2*pi*f*t + arg(X)) maximizes the windowed correlation;
                // store it as a positive phase offset.
                let mut p = -coeff.arg() % TAU;
                if p < 0.0 {
                    p += TAU;
                }
                p
            };
            OptimalKernel {
                center_frame,
                tempo_bpm: tempogram.tempi_bpm()[best_bin],
                phase,
                magnitude: math::sqrt(best_sq),
            }
        })
        .collect()
}

/// Which kernel size a pulse curve came from.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelTag {
    Single { kernel_size_sec: f64 },
    Combined,
}

impl core::fmt::Display for KernelTag {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            KernelTag::Single { kernel_size_sec } => write!(f, "k{kernel_size_sec}"),
            KernelTag::Combined => write!(f, "combined"),
        }
    }
}

/// Half-wave rectified, overlap-normalized pulse curve in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlpCurve {
    grid: FrameGrid,
    values: Vec<f64>,
    kernel_tag: KernelTag,
}

impl PlpCurve {
    /// Wraps precomputed rectified values in `[0, 1]` as a pulse curve.
    pub fn from_values(values: Vec<f64>, fps: u32, kernel_tag: KernelTag) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let grid = FrameGrid::new(fps, values.len())?;
        for (index, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange { index, value: v });
            }
        }
        Ok(PlpCurve {
            grid,
            values,
            kernel_tag,
        })
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
    pub fn kernel_tag(&self) -> &KernelTag {
        &self.kernel_tag
    }
}

/// Overlap-adds each analysis frame's optimal windowed unit-amplitude cosine,
/// half-wave rectifies, and divides by the overlap-added window weight so
/// peak height reads as local periodicity agreement in `[0, 1]`.
pub fn plp(novelty: &NoveltyCurve, config: &TempogramConfig) -> Result<PlpCurve, Error> {
    let tempogram = fourier_tempogram(novelty, config)?;
    let kernels = optimal_kernels(&tempogram);
    Ok(accumulate_kernels(
        novelty.grid(),
        tempogram.window_len(),
        &kernels,
        KernelTag::Single {
            kernel_size_sec: config.kernel_size_sec,
        },
    ))
}

fn accumulate_kernels(
    grid: FrameGrid,
    window_len: usize,
    kernels: &[OptimalKernel],
    tag: KernelTag,
) -> PlpCurve {
    let n = grid.n_frames();
    let fps = grid.fps() as f64;
    let half = (window_len / 2) as isize;
    let mut acc = vec![0.0f64; n];
    let mut weight = vec![0.0f64; n];

    for kernel in kernels {
        let s = kernel.center_frame as isize - half;
        let lo = s.max(0) as usize;
        let hi = ((s + window_len as isize - 1).min(n as isize - 1)) as usize;
        if lo > hi {
            continue;
        }
        let freq = kernel.tempo_bpm / 60.0;
        // cos(2*pi*f*t/fps - phase) advanced incrementally across the window
        let mut z = Complex::cis(TAU * freq * lo as f64 / fps - kernel.phase);
        let rot = Complex::cis(TAU * freq / fps);
        for t in lo..=hi {
            let w = hann((t as isize - s) as usize, window_len);
            acc[t] += w * z.re;
            weight[t] += w;
            z = z * rot;
        }
    }

    let values = acc
        .iter()
        .zip(weight.iter())
        .map(|(&a, &w)| {
            if w > 0.0 && a > 0.0 {
                (a / w).min(1.0)
            } else {
                0.0
            }
        })
        .collect();

    PlpCurve {
        grid,
        values,
        kernel_tag: tag,
    }
}

/// Element-wise product of pulse curves sharing one grid.
pub fn combine_plp(curves: &[PlpCurve]) -> Result<PlpCurve, Error> {
    let first = curves.first().ok_or(Error::EmptyInput)?;
    let grid = first.grid();
    let mut values = first.values().to_vec();
    for curve in &curves[1..] {
        if curve.grid() != grid {
            return Err(Error::GridMismatch);
        }
        for (v, x) in values.iter_mut().zip(curve.values()) {
            *v *= x;
        }
    }
    Ok(PlpCurve {
        grid,
        values,
        kernel_tag: KernelTag::Combined,
    })
}

/// Smallest BPM a kernel of `kernel_size_sec` can hold one full period of,
/// floored at the configured range minimum.
pub fn effective_min_bpm(kernel_size_sec: f64, tempo_range: TempoRange) -> u32 {
    let needed = math::ceil(60.0 / kernel_size_sec) as u32;
    tempo_range.min_bpm().max(needed)
}

/// Per-kernel pulse curves plus their combined product. Each kernel gets the
/// widest tempo sub-range it can accommodate a full period in.
pub fn plp_multi(
    novelty: &NoveltyCurve,
    kernel_sizes_sec: &[f64],
    tempo_range: TempoRange,
    hop_frames: usize,
    tempo_step_bpm: u32,
) -> Result<(Vec<PlpCurve>, PlpCurve), Error> {
    if kernel_sizes_sec.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut curves = Vec::with_capacity(kernel_sizes_sec.len());
    for &kappa in kernel_sizes_sec {
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidConfig("kernel size must be positive"));
        }
        let min_bpm = effective_min_bpm(kappa, tempo_range);
        if min_bpm >= tempo_range.max_bpm() {
            return Err(Error::InvalidConfig(
                "kernel too short for any tempo in range",
            ));
        }
        let config = TempogramConfig {
            kernel_size_sec: kappa,
            hop_frames,
            tempo_range: TempoRange::new(min_bpm, tempo_range.max_bpm())?,
            tempo_step_bpm,
        };
        curves.push(plp(novelty, &config)?);
    }
    let combined = combine_plp(&curves)?;
    Ok((curves, combined))
}

/// Label used for per-kernel CSV columns.
pub fn kernel_label(kernel_size_sec: f64) -> String {
    use core::fmt::Write;
    let mut s = String::new();
    let _ = write!(s, "{kernel_size_sec}");
    s
}
