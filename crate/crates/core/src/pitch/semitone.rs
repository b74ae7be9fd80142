use crate::error::{Error, Result};
use crate::pitch::PitchTrack;
use crate::scalar::Real;

/// Percentile of a speaker's voiced F0 used as the semitone reference.
pub const BASE_PERCENTILE: f64 = 5.0;

/// Percentile with linear interpolation between order statistics at rank
/// `p/100 * (n-1)`.
pub fn percentile<T: Real>(values: &[T], p: f64) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::ParamOutOfRange {
            name: "percentile",
            value: p,
            lo: 0.0,
            hi: 100.0,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = T::lit(rank - lo as f64);
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Voiced frames of a pitch track expressed in semitones above `base_hz`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemitoneTrack<T> {
    pub frame_times_s: Vec<f64>,
    pub semitones: Vec<T>,
    pub base_hz: T,
    /// Frame step of the originating pitch track.
    pub step_s: f64,
}

impl<T: Real> SemitoneTrack<T> {
    pub fn len(&self) -> usize {
        self.semitones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.semitones.is_empty()
    }
}

/// `12 * log2(f0 / base)` for every voiced frame.
pub fn hz_to_semitones<T: Real>(track: &PitchTrack<T>, base_hz: T) -> Result<SemitoneTrack<T>> {
    if !(base_hz > T::zero()) || !base_hz.is_finite() {
        return Err(Error::NonPositiveBase(base_hz.as_f64()));
    }
    let twelve = T::lit(12.0);
    let (frame_times_s, semitones) = track
        .frame_times_s()
        .iter()
        .zip(track.f0_hz())
        .filter(|(_, &f)| f > T::zero())
        .map(|(&t, &f)| (t, twelve * (f / base_hz).log2()))
        .unzip();
    Ok(SemitoneTrack {
        frame_times_s,
        semitones,
        base_hz,
        step_s: track.step_s(),
    })
}

/// Inverse of the semitone transform.
pub fn semitones_to_hz<T: Real>(semitones: T, base_hz: T) -> T {
    base_hz * (semitones / T::lit(12.0)).exp2()
}
