//! NCCF candidate generation followed by a Viterbi search over candidate
//! lags and an explicit unvoiced state, in the style of RAPT.

use serde::{Deserialize, Serialize};

use crate::audio::{lowpass, AudioBuffer};
use crate::dsp::ms_to_samples;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PitchParams {
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
    pub step_ms: f64,
    pub corr_window_ms: f64,
    /// Minimum NCCF peak height for a lag to become a voiced candidate.
    pub voicing_threshold: f64,
    /// Cost per octave of lag change between consecutive voiced frames.
    pub octave_cost: f64,
    /// Cost of switching between voiced and unvoiced.
    pub transition_cost: f64,
    /// Bias toward shorter lags: a candidate's score is scaled by
    /// `1 - lag_weight * lag / max_lag`.
    pub lag_weight: f64,
    /// Center of the first analysis frame. The default matches the center of
    /// a 35 ms MFCC window so both tracks share frame times.
    pub frame_offset_ms: f64,
    /// Band edge of the low-pass applied before correlation, as a multiple
    /// of `f0_max_hz`; 0 disables it. Removes high formant ringing that
    /// otherwise correlates at very short lags.
    pub lowpass_factor: f64,
}

impl Default for PitchParams {
    fn default() -> Self {
        Self {
            f0_min_hz: 60.0,
            f0_max_hz: 800.0,
            step_ms: 10.0,
            corr_window_ms: 7.5,
            voicing_threshold: 0.3,
            octave_cost: 0.2,
            transition_cost: 0.1,
            lag_weight: 0.15,
            frame_offset_ms: 17.5,
            lowpass_factor: 2.0,
        }
    }
}

impl PitchParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidPitchParams(m.to_owned()));
        if !(self.f0_min_hz > 0.0 && self.f0_min_hz < self.f0_max_hz) {
            return bad("need 0 < f0_min < f0_max");
        }
        if !(self.step_ms > 0.0 && self.corr_window_ms > 0.0 && self.frame_offset_ms >= 0.0) {
            return bad("step, correlation window and frame offset must be positive");
        }
        if !(self.voicing_threshold > 0.0 && self.voicing_threshold < 1.0) {
            return bad("voicing threshold must lie in (0, 1)");
        }
        if !(self.octave_cost >= 0.0 && self.transition_cost >= 0.0) {
            return bad("costs must be non-negative");
        }
        if !(self.lowpass_factor >= 0.0 && self.lowpass_factor.is_finite()) {
            return bad("low-pass factor must be non-negative");
        }
        if !(0.0..1.0).contains(&self.lag_weight) {
            return bad("lag weight must lie in [0, 1)");
        }
        Ok(())
    }
}

/// Per-frame F0 with voicing. `f0_hz` is zero exactly on unvoiced frames.
#[derive(Clone, Debug, PartialEq)]
pub struct PitchTrack<T> {
    frame_times_s: Vec<f64>,
    f0_hz: Vec<T>,
    voicing: Vec<bool>,
    params: PitchParams,
}

impl<T: Real> PitchTrack<T> {
    /// Builds a track from per-frame F0 values; zero means unvoiced.
    pub fn from_f0(frame_times_s: Vec<f64>, f0_hz: Vec<T>, params: PitchParams) -> Result<Self> {
        if frame_times_s.len() != f0_hz.len() {
            return Err(Error::LengthMismatch {
                left: frame_times_s.len(),
                right: f0_hz.len(),
            });
        }
        if frame_times_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("frame times must be strictly increasing".into()));
        }
        if f0_hz.iter().any(|f| !f.is_finite() || *f < T::zero()) {
            return Err(Error::InvalidConfig("F0 values must be finite and non-negative".into()));
        }
        let voicing = f0_hz.iter().map(|&f| f > T::zero()).collect();
        Ok(Self {
            frame_times_s,
            f0_hz,
            voicing,
            params,
        })
    }

    pub fn len(&self) -> usize {
        self.f0_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f0_hz.is_empty()
    }

    pub fn frame_times_s(&self) -> &[f64] {
        &self.frame_times_s
    }

    pub fn f0_hz(&self) -> &[T] {
        &self.f0_hz
    }

    pub fn voicing(&self) -> &[bool] {
        &self.voicing
    }

    pub fn params(&self) -> &PitchParams {
        &self.params
    }

    pub fn step_s(&self) -> f64 {
        self.params.step_ms / 1000.0
    }

    pub fn voiced_f0(&self) -> Vec<T> {
        self.f0_hz.iter().copied().filter(|&f| f > T::zero()).collect()
    }

    pub fn voiced_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.voicing.iter().filter(|&&v| v).count() as f64 / self.len() as f64
    }
}

/// Normalized cross-correlation of `x[start..start+width]` against the same
/// span shifted by each lag in `lags`.
pub fn nccf<T: Real>(x: &[T], start: usize, width: usize, lags: std::ops::RangeInclusive<usize>) -> Vec<T> {
    let reference = &x[start..start + width];
    let e0: T = reference.iter().map(|&v| v * v).sum();
    lags.map(|lag| {
        let shifted = &x[start + lag..start + lag + width];
        let (mut dot, mut e1) = (T::zero(), T::zero());
        for (&a, &b) in reference.iter().zip(shifted) {
            dot += a * b;
            e1 += b * b;
        }
        let denom = (e0 * e1).sqrt();
        if denom > T::min_positive_value() {
            dot / denom
        } else {
            T::zero()
        }
    })
    .collect()
}

/// Like [`nccf`], but for every lag the pair of windows is placed
/// symmetrically about `center`, so the measured period belongs to the
/// frame time rather than to a point up to half the lag range earlier.
fn centered_nccf<T: Real>(x: &[T], center: usize, width: usize, lags: std::ops::RangeInclusive<usize>) -> Vec<f64> {
    let n = x.len();
    lags.map(|lag| {
        let start = center.saturating_sub((width + lag) / 2).min(n - width - lag);
        let (a, b) = (&x[start..start + width], &x[start + lag..start + lag + width]);
        let (mut dot, mut e0, mut e1) = (0.0, 0.0, 0.0);
        for (&p, &q) in a.iter().zip(b) {
            let (p, q) = (p.as_f64(), q.as_f64());
            dot += p * q;
            e0 += p * p;
            e1 += q * q;
        }
        let denom = (e0 * e1).sqrt();
        if denom > f64::MIN_POSITIVE {
            dot / denom
        } else {
            0.0
        }
    })
    .collect()
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    lag: f64,
    score: f64,
}

const MAX_CANDIDATES: usize = 12;

struct FrameAnalysis {
    candidates: Vec<Candidate>,
    peak: f64,
}

fn analyze_frame<T: Real>(
    x: &[T],
    center: usize,
    width: usize,
    lag_min: usize,
    lag_max: usize,
    threshold: f64,
) -> FrameAnalysis {
    let n = x.len();
    let empty = FrameAnalysis {
        candidates: Vec::new(),
        peak: 0.0,
    };
    if n < width + lag_min + 2 {
        return empty;
    }
    let lag_max = lag_max.min(n - width - 1);
    // one extra lag on each side for peak picking at the range edges
    let lo = lag_min.saturating_sub(1).max(1);
    let r = centered_nccf(x, center, width, lo..=lag_max + 1);

    let mut peak = 0.0f64;
    let mut candidates = Vec::new();
    for i in 1..r.len() - 1 {
        let lag = lo + i;
        if lag < lag_min || lag > lag_max {
            continue;
        }
        peak = peak.max(r[i]);
        if r[i] >= threshold && r[i] >= r[i - 1] && r[i] > r[i + 1] {
            let (a, b, c) = (r[i - 1], r[i], r[i + 1]);
            let curvature = a - 2.0 * b + c;
            let delta = if curvature < 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
            candidates.push(Candidate {
                lag: lag as f64 + delta,
                score: (b - 0.25 * (a - c) * delta).min(1.0),
            });
        }
    }
    candidates.sort_by(|p, q| q.score.total_cmp(&p.score));
    candidates.truncate(MAX_CANDIDATES);
    FrameAnalysis { candidates, peak }
}

/// Estimates F0 for `buf`.
///
/// Frame `i` is centered at `frame_offset + i * step`; frames are emitted
/// while the center is at least `frame_offset` away from the end.
pub fn track_f0<T: Real>(buf: &AudioBuffer<T>, params: &PitchParams) -> Result<PitchTrack<T>> {
    params.validate()?;
    let rate = buf.sample_rate_hz();
    let fs = f64::from(rate);
    if fs < 2.0 * params.f0_max_hz {
        return Err(Error::RateTooLow {
            rate,
            f0_max: params.f0_max_hz,
        });
    }
    let lag_min = ((fs / params.f0_max_hz).floor() as usize).max(2);
    let lag_max = (fs / params.f0_min_hz).ceil() as usize;
    let width = ms_to_samples(params.corr_window_ms, rate).max(2);
    let step = ms_to_samples(params.step_ms, rate).max(1);
    let offset = ms_to_samples(params.frame_offset_ms, rate);

    let filtered;
    let x = if params.lowpass_factor > 0.0 {
        filtered = lowpass(buf, params.lowpass_factor * params.f0_max_hz);
        filtered.samples()
    } else {
        buf.samples()
    };
    let n = x.len();
    let n_frames = if n >= 2 * offset && n > 0 {
        (n - 2 * offset) / step + 1
    } else {
        0
    };
    let frames: Vec<FrameAnalysis> = (0..n_frames)
        .map(|i| analyze_frame(x, offset + i * step, width, lag_min, lag_max, params.voicing_threshold))
        .collect();

    // state 0 is unvoiced; state k >= 1 is candidate k - 1
    let local = |f: &FrameAnalysis, s: usize| -> f64 {
        if s == 0 {
            f.peak
        } else {
            let c = f.candidates[s - 1];
            1.0 - c.score * (1.0 - params.lag_weight * c.lag / lag_max as f64)
        }
    };
    let transition = |prev: &FrameAnalysis, ps: usize, cur: &FrameAnalysis, cs: usize| -> f64 {
        match (ps, cs) {
            (0, 0) => 0.0,
            (0, _) | (_, 0) => params.transition_cost,
            _ => {
                let ratio = cur.candidates[cs - 1].lag / prev.candidates[ps - 1].lag;
                params.octave_cost * ratio.log2().abs()
            }
        }
    };

    let mut back: Vec<Vec<usize>> = Vec::with_capacity(n_frames);
    let mut cost: Vec<f64> = Vec::new();
    for (i, f) in frames.iter().enumerate() {
        let n_states = f.candidates.len() + 1;
        if i == 0 {
            cost = (0..n_states).map(|s| local(f, s)).collect();
            back.push(vec![0; n_states]);
            continue;
        }
        let prev = &frames[i - 1];
        let mut next = Vec::with_capacity(n_states);
        let mut ptr = Vec::with_capacity(n_states);
        for s in 0..n_states {
            let (best, arg) = cost
                .iter()
                .enumerate()
                .map(|(ps, &c)| (c + transition(prev, ps, f, s), ps))
                .fold((f64::INFINITY, 0), |acc, v| if v.0 < acc.0 { v } else { acc });
            next.push(best + local(f, s));
            ptr.push(arg);
        }
        cost = next;
        back.push(ptr);
    }

    let mut f0 = vec![T::zero(); n_frames];
    if n_frames > 0 {
        let mut state = cost
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (s, &c)| if c < acc.1 { (s, c) } else { acc })
            .0;
        for i in (0..n_frames).rev() {
            if state > 0 {
                let hz = (fs / frames[i].candidates[state - 1].lag).clamp(params.f0_min_hz, params.f0_max_hz);
                f0[i] = T::lit(hz);
            }
            state = back[i][state];
        }
    }

    let times = (0..n_frames)
        .map(|i| (offset + i * step) as f64 / fs)
        .collect();
    PitchTrack::from_f0(times, f0, params.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn median(mut v: Vec<f64>) -> f64 {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    }

    fn buffer(mut f: impl FnMut(f64) -> f64, secs: f64) -> AudioBuffer<f64> {
        let n = (16000.0 * secs) as usize;
        AudioBuffer::new((0..n).map(|i| f(i as f64 / 16000.0)).collect(), 16000).unwrap()
    }

    #[test]
    fn sawtooth_220() {
        let buf = buffer(|t| 0.8 * (2.0 * (220.0 * t).fract() - 1.0), 1.0);
        let track = track_f0(&buf, &PitchParams::default()).unwrap();
        assert!(track.voiced_fraction() >= 0.95, "{}", track.voiced_fraction());
        let med = median(track.voiced_f0());
        assert!((med - 220.0).abs() <= 2.2, "median {med}");
    }

    #[test]
    fn sine_100() {
        let buf = buffer(|t| 0.5 * (2.0 * std::f64::consts::PI * 100.0 * t).sin(), 1.0);
        let track = track_f0(&buf, &PitchParams::default()).unwrap();
        let med = median(track.voiced_f0());
        assert!((med - 100.0).abs() <= 1.0, "median {med}");
    }

    #[test]
    fn white_noise_is_unvoiced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let buf = buffer(|_| rng.random_range(-0.5..0.5), 1.0);
        let track = track_f0(&buf, &PitchParams::default()).unwrap();
        assert!(track.voiced_fraction() <= 0.2, "{}", track.voiced_fraction());
    }

    #[test]
    fn silence_is_unvoiced_and_voicing_matches_f0() {
        let buf = AudioBuffer::new(vec![0.0f64; 8000], 16000).unwrap();
        let track = track_f0(&buf, &PitchParams::default()).unwrap();
        assert_eq!(track.len(), (8000 - 560) / 160 + 1);
        assert!(track.voicing().iter().all(|v| !v));
        assert!(track.f0_hz().iter().all(|&f| f == 0.0));
    }

    #[test]
    fn low_rate_is_rejected() {
        let buf = AudioBuffer::new(vec![0.0f64; 100], 1000).unwrap();
        assert!(matches!(track_f0(&buf, &PitchParams::default()), Err(Error::RateTooLow { .. })));
    }

    #[test]
    fn frame_times_align_with_mfcc_frames() {
        let buf = AudioBuffer::new(vec![0.0f64; 80000], 16000).unwrap();
        let track = track_f0(&buf, &PitchParams::default()).unwrap();
        assert_eq!(track.len(), 497);
        assert!((track.frame_times_s()[0] - 0.0175).abs() < 1e-12);
    }

    #[test]
    fn nccf_of_periodic_signal_peaks_at_period() {
        let x: Vec<f64> = (0..2000).map(|i| ((i % 80) as f64 / 80.0) - 0.5).collect();
        let r = nccf(&x, 100, 400, 40..=200);
        assert!((r[80 - 40] - 1.0).abs() < 1e-12);
        assert!(r.iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn invalid_params_are_rejected() {
        let p = PitchParams { f0_min_hz: 900.0, ..PitchParams::default() };
        assert!(p.validate().is_err());
        let p = PitchParams { voicing_threshold: 1.5, ..PitchParams::default() };
        assert!(p.validate().is_err());
    }
}
