use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Framing and filterbank parameters for MFCC extraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FrameSpec {
    pub window_ms: f64,
    pub step_ms: f64,
    /// Defaults to the smallest power of two covering the window.
    pub n_fft: Option<usize>,
    pub n_mels: usize,
    pub n_mfcc: usize,
    pub fmin_hz: f64,
    /// Defaults to the Nyquist frequency.
    pub fmax_hz: Option<f64>,
    /// Floor applied to mel energies before the natural log.
    pub log_floor: f64,
}

impl Default for FrameSpec {
    fn default() -> Self {
        Self {
            window_ms: 35.0,
            step_ms: 10.0,
            n_fft: None,
            n_mels: 40,
            n_mfcc: 40,
            fmin_hz: 0.0,
            fmax_hz: None,
            log_floor: 1e-10,
        }
    }
}

/// A [`FrameSpec`] resolved against a concrete sample rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameGeometry {
    pub sample_rate_hz: u32,
    pub win_len: usize,
    pub step_len: usize,
    pub n_fft: usize,
    pub fmin_hz: f64,
    pub fmax_hz: f64,
}

impl FrameGeometry {
    pub fn frame_count(&self, n_samples: usize) -> usize {
        frame_count(n_samples, self.win_len, self.step_len)
    }

    /// Center time of frame `i` in seconds.
    pub fn frame_time(&self, i: usize) -> f64 {
        (self.win_len as f64 / 2.0 + (i * self.step_len) as f64) / f64::from(self.sample_rate_hz)
    }

    pub fn n_bins(&self) -> usize {
        self.n_fft / 2 + 1
    }
}

pub(crate) fn ms_to_samples(ms: f64, rate: u32) -> usize {
    (ms * f64::from(rate) / 1000.0).round() as usize
}

impl FrameSpec {
    pub fn resolve(&self, sample_rate_hz: u32) -> Result<FrameGeometry> {
        let bad = |m: String| Err(Error::InvalidFrameSpec(m));
        if sample_rate_hz == 0 {
            return bad("sample rate must be positive".into());
        }
        if !(self.window_ms > 0.0 && self.step_ms > 0.0) {
            return bad("window and step must be positive".into());
        }
        if self.step_ms > self.window_ms {
            return bad(format!("step {} ms exceeds window {} ms", self.step_ms, self.window_ms));
        }
        if self.n_mels == 0 || self.n_mfcc == 0 || self.n_mfcc > self.n_mels {
            return bad(format!("need 0 < n_mfcc ({}) <= n_mels ({})", self.n_mfcc, self.n_mels));
        }
        if !(self.log_floor > 0.0) {
            return bad("log floor must be positive".into());
        }
        let win_len = ms_to_samples(self.window_ms, sample_rate_hz);
        let step_len = ms_to_samples(self.step_ms, sample_rate_hz).max(1);
        if win_len < 2 {
            return bad("window shorter than two samples".into());
        }
        let n_fft = self.n_fft.unwrap_or_else(|| win_len.next_power_of_two());
        if !n_fft.is_power_of_two() || n_fft < win_len {
            return bad(format!("n_fft {n_fft} must be a power of two >= window length {win_len}"));
        }
        let nyquist = f64::from(sample_rate_hz) / 2.0;
        let fmax_hz = self.fmax_hz.unwrap_or(nyquist);
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax_hz && fmax_hz <= nyquist) {
            return Err(Error::InvalidRange {
                fmin: self.fmin_hz,
                fmax: fmax_hz,
            });
        }
        Ok(FrameGeometry {
            sample_rate_hz,
            win_len,
            step_len,
            n_fft,
            fmin_hz: self.fmin_hz,
            fmax_hz,
        })
    }
}

/// `floor((n - win) / step) + 1` when the signal holds at least one window.
pub fn frame_count(n_samples: usize, win_len: usize, step_len: usize) -> usize {
    if n_samples < win_len {
        0
    } else {
        (n_samples - win_len) / step_len + 1
    }
}

/// Periodic Hann window of length `n`.
pub fn hann_window<T: Real>(n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            T::lit(0.5 - 0.5 * a.cos())
        })
        .collect()
}

/// Splits `buf` into Hann-windowed frames. Partial frames are dropped.
pub fn frame_signal<T: Real>(buf: &AudioBuffer<T>, spec: &FrameSpec) -> Result<Vec<Vec<T>>> {
    let geom = spec.resolve(buf.sample_rate_hz())?;
    Ok(frames_with(buf.samples(), &geom, &hann_window(geom.win_len)))
}

pub(crate) fn frames_with<T: Real>(x: &[T], geom: &FrameGeometry, window: &[T]) -> Vec<Vec<T>> {
    (0..geom.frame_count(x.len()))
        .map(|i| {
            let start = i * geom.step_len;
            x[start..start + geom.win_len]
                .iter()
                .zip(window)
                .map(|(&s, &w)| s * w)
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_geometry_at_16k() {
        let g = FrameSpec::default().resolve(16000).unwrap();
        assert_eq!((g.win_len, g.step_len, g.n_fft), (560, 160, 1024));
        assert_eq!(g.n_bins(), 513);
    }

    #[test]
    fn frame_counts() {
        assert_eq!(frame_count(80000, 560, 160), 497);
        assert_eq!(frame_count(559, 560, 160), 0);
        assert_eq!(frame_count(560, 560, 160), 1);
        assert_eq!(frame_count(0, 560, 160), 0);
    }

    #[test]
    fn frames_are_hann_windowed() {
        let buf = AudioBuffer::new(vec![1.0f64; 560], 16000).unwrap();
        let frames = frame_signal(&buf, &FrameSpec::default()).unwrap();
        assert_eq!(frames.len(), 1);
        let w = hann_window::<f64>(560);
        assert_eq!(frames[0], w);
        assert_eq!(w[0], 0.0);
        assert!((w[280] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_times_follow_center_convention() {
        let g = FrameSpec::default().resolve(16000).unwrap();
        assert!((g.frame_time(0) - 0.0175).abs() < 1e-12);
        assert!((g.frame_time(3) - 0.0475).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let spec = FrameSpec { step_ms: 40.0, ..FrameSpec::default() };
        assert!(spec.resolve(16000).is_err());
        let spec = FrameSpec { n_mfcc: 41, ..FrameSpec::default() };
        assert!(spec.resolve(16000).is_err());
        let spec = FrameSpec { fmin_hz: 9000.0, ..FrameSpec::default() };
        assert!(matches!(spec.resolve(16000), Err(Error::InvalidRange { .. })));
        let spec = FrameSpec { n_fft: Some(512), ..FrameSpec::default() };
        assert!(spec.resolve(16000).is_err());
    }
}
