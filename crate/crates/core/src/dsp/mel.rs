//! Slaney-style mel scale and area-normalized triangular filterbank.

use super::frame::{FrameGeometry, FrameSpec};
use crate::error::Result;
use crate::scalar::Real;

const F_SP: f64 = 200.0 / 3.0;
const MIN_LOG_HZ: f64 = 1000.0;
const MIN_LOG_MEL: f64 = MIN_LOG_HZ / F_SP;

fn log_step() -> f64 {
    6.4f64.ln() / 27.0
}

/// Hz to mel: linear (`3f/200`) below 1 kHz, logarithmic above.
pub fn hz_to_mel(hz: f64) -> f64 {
    if hz < MIN_LOG_HZ {
        hz / F_SP
    } else {
        MIN_LOG_MEL + (hz / MIN_LOG_HZ).ln() / log_step()
    }
}

pub fn mel_to_hz(mel: f64) -> f64 {
    if mel < MIN_LOG_MEL {
        mel * F_SP
    } else {
        MIN_LOG_HZ * ((mel - MIN_LOG_MEL) * log_step()).exp()
    }
}

/// Dense `n_mels x (n_fft/2 + 1)` filterbank, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MelFilterbank<T> {
    n_mels: usize,
    n_bins: usize,
    weights: Vec<T>,
}

impl<T: Real> MelFilterbank<T> {
    pub fn new(spec: &FrameSpec, sample_rate_hz: u32) -> Result<Self> {
        let geom = spec.resolve(sample_rate_hz)?;
        Ok(Self::from_geometry(&geom, spec.n_mels))
    }

    pub(crate) fn from_geometry(geom: &FrameGeometry, n_mels: usize) -> Self {
        let n_bins = geom.n_bins();
        let lo = hz_to_mel(geom.fmin_hz);
        let hi = hz_to_mel(geom.fmax_hz);
        let edges: Vec<f64> = (0..n_mels + 2)
            .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (n_mels + 1) as f64))
            .collect();
        let bin_hz = f64::from(geom.sample_rate_hz) / geom.n_fft as f64;

        let mut weights = vec![T::zero(); n_mels * n_bins];
        for m in 0..n_mels {
            let (f_lo, f_c, f_hi) = (edges[m], edges[m + 1], edges[m + 2]);
            let norm = 2.0 / (f_hi - f_lo);
            for k in 0..n_bins {
                let f = k as f64 * bin_hz;
                let rising = (f - f_lo) / (f_c - f_lo);
                let falling = (f_hi - f) / (f_hi - f_c);
                let w = rising.min(falling).max(0.0);
                weights[m * n_bins + k] = T::lit(w * norm);
            }
        }
        Self {
            n_mels,
            n_bins,
            weights,
        }
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn row(&self, m: usize) -> &[T] {
        &self.weights[m * self.n_bins..(m + 1) * self.n_bins]
    }

    /// Mel energies of one power spectrum.
    pub fn apply(&self, power: &[T]) -> Vec<T> {
        assert_eq!(power.len(), self.n_bins, "power spectrum length mismatch");
        (0..self.n_mels)
            .map(|m| self.row(m).iter().zip(power).map(|(&w, &p)| w * p).sum())
            .collect()
    }
}

/// Filterbank for `spec` at `sample_rate_hz`.
pub fn mel_filterbank<T: Real>(spec: &FrameSpec, sample_rate_hz: u32) -> Result<MelFilterbank<T>> {
    MelFilterbank::new(spec, sample_rate_hz)
}
