//! Oracle activation synthesis: pulse trains built from reference beats, and
//! a deterministic corpus generator with constant, ramp, step, and rubato
//! tempo trajectories for desk-scale evaluation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{BeatSequence, FrameGrid, NoveltyCurve, TempoRange};
use crate::math;
use crate::Error;

pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Tracks start this far into the grid so the first beat has left context.
pub const LEAD_IN_SEC: f64 = 1.0;

/// Pulse train of equal magnitudes: `1 - epsilon` on each reference frame,
/// `epsilon` elsewhere. The floor keeps downstream log-domain trackers away
/// from zero probabilities.
pub fn synth_activation(
    reference: &BeatSequence,
    fps: u32,
    epsilon: f64,
) -> Result<NoveltyCurve, Error> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Domain("epsilon must be in (0, 0.5)"));
    }
    let src = reference.grid();
    let (n_frames, frames): (usize, Vec<usize>) = if fps == src.fps() {
        (src.n_frames(), reference.frames().to_vec())
    } else {
        let scale = fps as f64 / src.fps() as f64;
        let n = (math::round((src.n_frames() - 1) as f64 * scale) as usize) + 1;
        let mapped = reference
            .frames()
            .iter()
            .map(|&f| math::round(f as f64 * scale) as usize)
            .collect();
        (n, mapped)
    };
    let mut values = vec![epsilon; n_frames];
    for &f in &frames {
        if f >= n_frames {
            return Err(Error::BeatBeyondGrid { frame: f, n_frames });
        }
        values[f] = 1.0 - epsilon;
    }
    NoveltyCurve::new(values, fps)
}

/// Instantaneous-tempo description over a track of fixed duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TempoTrajectory {
    Constant {
        bpm: f64,
    },
    Ramp {
        start_bpm: f64,
        end_bpm: f64,
    },
    Step {
        first_bpm: f64,
        second_bpm: f64,
        /// Fraction of the duration at which the tempo switches.
        switch_frac: f64,
    },
    Rubato {
        base_bpm: f64,
        /// Relative modulation depth, e.g. 0.1 for +-10%.
        depth: f64,
        rate_hz: f64,
        phase: f64,
    },
}

impl TempoTrajectory {
    pub fn family(&self) -> &'static str {
        match self {
            TempoTrajectory::Constant { .. } => "constant",
            TempoTrajectory::Ramp { .. } => "ramp",
            TempoTrajectory::Step { .. } => "step",
            TempoTrajectory::Rubato { .. } => "rubato",
        }
    }

    /// Tempo at `t` seconds after the first beat.
    pub fn bpm_at(&self, t: f64, duration_sec: f64) -> f64 {
        match *self {
            TempoTrajectory::Constant { bpm } => bpm,
            TempoTrajectory::Ramp { start_bpm, end_bpm } => {
                start_bpm + (end_bpm - start_bpm) * (t / duration_sec).clamp(0.0, 1.0)
            }
            TempoTrajectory::Step {
                first_bpm,
                second_bpm,
                switch_frac,
            } => {
                if t < switch_frac * duration_sec {
                    first_bpm
                } else {
                    second_bpm
                }
            }
            TempoTrajectory::Rubato {
                base_bpm,
                depth,
                rate_hz,
                phase,
            } => base_bpm * (1.0 + depth * math::sin(core::f64::consts::TAU * rate_hz * t + phase)),
        }
    }

    fn bpm_bounds(&self) -> (f64, f64) {
        match *self {
            TempoTrajectory::Constant { bpm } => (bpm, bpm),
            TempoTrajectory::Ramp { start_bpm, end_bpm } => {
                (start_bpm.min(end_bpm), start_bpm.max(end_bpm))
            }
            TempoTrajectory::Step {
                first_bpm,
                second_bpm,
                ..
            } => (first_bpm.min(second_bpm), first_bpm.max(second_bpm)),
            TempoTrajectory::Rubato {
                base_bpm, depth, ..
            } => (base_bpm * (1.0 - depth), base_bpm * (1.0 + depth)),
        }
    }

    fn validate(&self, range: TempoRange) -> Result<(), Error> {
        let (lo, hi) = self.bpm_bounds();
        if !(lo >= range.min_bpm() as f64 && hi <= range.max_bpm() as f64) {
            return Err(Error::Domain("trajectory tempo outside the tempo range"));
        }
        if let TempoTrajectory::Step { switch_frac, .. } = self {
            if !(0.0..=1.0).contains(switch_frac) {
                return Err(Error::Domain("switch fraction must be in [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Beat times for a trajectory: the first beat at [`LEAD_IN_SEC`], then each
/// next beat one instantaneous period later, spanning `duration_sec`.
pub fn trajectory_beats(
    trajectory: &TempoTrajectory,
    duration_sec: f64,
) -> Result<Vec<f64>, Error> {
    trajectory.validate(TempoRange::default())?;
    if !(duration_sec > 0.0) {
        return Err(Error::Domain("duration must be positive"));
    }
    let mut times = vec![LEAD_IN_SEC];
    loop {
        let t = *times.last().unwrap();
        let bpm = trajectory.bpm_at(t - LEAD_IN_SEC, duration_sec);
        let next = t + 60.0 / bpm;
        if next > LEAD_IN_SEC + duration_sec + 1e-9 {
            break;
        }
        times.push(next);
    }
    Ok(times)
}

/// One synthesized track: trajectory, reference beats, oracle activation.
#[derive(Clone, Debug, PartialEq)]
pub struct SynthTrack {
    pub name: String,
    pub trajectory: TempoTrajectory,
    pub reference: BeatSequence,
    pub activation: NoveltyCurve,
}

pub fn synth_track(
    name: String,
    trajectory: TempoTrajectory,
    duration_sec: f64,
    fps: u32,
    epsilon: f64,
) -> Result<SynthTrack, Error> {
    let times = trajectory_beats(&trajectory, duration_sec)?;
    let last = *times.last().unwrap();
    let n_frames = (math::round((last + 1.0) * fps as f64) as usize) + 1;
    let grid = FrameGrid::new(fps, n_frames)?;
    let frames: Vec<usize> = times.iter().map(|&t| grid.frame_of(t)).collect();
    let reference = BeatSequence::new(frames, grid)?;
    let activation = synth_activation(&reference, fps, epsilon)?;
    Ok(SynthTrack {
        name,
        trajectory,
        reference,
        activation,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorpusSpec {
    pub n_tracks: usize,
    pub duration_sec: f64,
    pub fps: u32,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            n_tracks: 50,
            duration_sec: 60.0,
            fps: FrameGrid::DEFAULT_FPS,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
        }
    }
}

/// Deterministic corpus cycling through the four trajectory families.
/// Constant tracks land on integer frames-per-beat tempi so state-space
/// trackers can represent them exactly; the other families draw continuous
/// parameters. Identical specs produce bit-identical corpora.
pub fn synth_corpus(spec: &CorpusSpec) -> Result<Vec<SynthTrack>, Error> {
    if spec.n_tracks == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let fps = spec.fps as f64;
    let mut out = Vec::with_capacity(spec.n_tracks);
    for i in 0..spec.n_tracks {
        let trajectory = match i % 4 {
            0 => {
                // integer beat period between 50 and 200 BPM
                let period_lo = math::ceil(60.0 * fps / 200.0) as usize;
                let period_hi = math::floor(60.0 * fps / 50.0) as usize;
                let period = rng.gen_range(period_lo..=period_hi);
                TempoTrajectory::Constant {
                    bpm: 60.0 * fps / period as f64,
                }
            }
            1 => {
                let start_bpm = rng.gen_range(70.0..170.0);
                let factor = rng.gen_range(0.75..1.35);
                TempoTrajectory::Ramp {
                    start_bpm,
                    end_bpm: (start_bpm * factor).clamp(40.0, 250.0),
                }
            }
            2 => {
                let first_bpm = rng.gen_range(70.0..170.0);
                let factor = rng.gen_range(0.75..1.3);
                TempoTrajectory::Step {
                    first_bpm,
                    second_bpm: (first_bpm * factor).clamp(40.0, 250.0),
                    switch_frac: rng.gen_range(0.35..0.65),
                }
            }
            _ => TempoTrajectory::Rubato {
                // expressive-timing territory: swings deep and fast enough
                // that a rigid tempo prior cannot follow them
                base_bpm: rng.gen_range(80.0..160.0),
                depth: rng.gen_range(0.25..0.38),
                rate_hz: rng.gen_range(0.14..0.26),
                phase: rng.gen_range(0.0..core::f64::consts::TAU),
            },
        };
        let name = format!("{:03}_{}", i, trajectory.family());
        out.push(synth_track(
            name,
            trajectory,
            spec.duration_sec,
            spec.fps,
            spec.epsilon,
        )?);
    }
    Ok(out)
}
