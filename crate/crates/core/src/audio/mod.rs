//! Mono PCM audio: the buffer type, PCM16 WAV I/O and band-limited resampling.

mod resample;
mod wav;

pub use resample::{lowpass, resample, KAISER_BETA, TAPS_PER_SIDE};
pub use wav::{encode_wav, read_wav, write_wav};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Canonical analysis rate.
pub const CANONICAL_RATE_HZ: u32 = 16_000;

/// Mono samples in `[-1, 1]` together with their sample rate.
#[derive(Clone, Debug, PartialEq)]
pub struct AudioBuffer<T> {
    samples: Vec<T>,
    sample_rate_hz: u32,
}

impl<T: Real> AudioBuffer<T> {
    pub fn new(samples: Vec<T>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz == 0 {
            return Err(Error::InvalidConfig("sample rate must be positive".into()));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidConfig(format!("non-finite sample at index {i}")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn silence(n: usize, sample_rate_hz: u32) -> Result<Self> {
        Self::new(vec![T::zero(); n], sample_rate_hz)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    pub fn peak(&self) -> T {
        self.samples
            .iter()
            .fold(T::zero(), |m, s| if s.abs() > m { s.abs() } else { m })
    }

    /// Multiplies every sample by `gain`.
    pub fn scaled(&self, gain: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&s| s * gain).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }
}
