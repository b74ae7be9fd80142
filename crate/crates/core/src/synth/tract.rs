use serde::{Deserialize, Serialize};

use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Peak level of rendered vowels.
pub const OUTPUT_PEAK: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Formant {
    pub frequency_hz: f64,
    pub bandwidth_hz: f64,
}

impl Formant {
    pub fn new(frequency_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            frequency_hz,
            bandwidth_hz,
        }
    }
}

pub fn resonator_pole_radius(bandwidth_hz: f64, sample_rate_hz: u32) -> f64 {
    (-std::f64::consts::PI * bandwidth_hz / f64::from(sample_rate_hz)).exp()
}

pub(crate) fn validate_formants(formants: &[Formant], sample_rate_hz: u32) -> Result<()> {
    let nyquist = f64::from(sample_rate_hz) / 2.0;
    for (i, f) in formants.iter().enumerate() {
        if !(f.frequency_hz > 0.0 && f.frequency_hz < nyquist) {
            return Err(Error::InvalidConfig(format!(
                "formant {} at {} Hz outside (0, {nyquist})",
                i + 1,
                f.frequency_hz
            )));
        }
        if !(f.bandwidth_hz > 0.0) {
            return Err(Error::UnstableFilter(format!(
                "formant {} bandwidth {} Hz is not positive",
                i + 1,
                f.bandwidth_hz
            )));
        }
        if i > 0 && f.frequency_hz <= formants[i - 1].frequency_hz {
            return Err(Error::InvalidConfig("formant frequencies must be strictly increasing".into()));
        }
    }
    Ok(())
}

/// Cascade of two-pole resonators, one per formant, each with unit gain at
/// DC. The result is scaled to a peak of [`OUTPUT_PEAK`] unless silent.
pub fn vocal_tract_filter<T: Real>(source: &AudioBuffer<T>, formants: &[Formant]) -> Result<AudioBuffer<T>> {
    let rate = source.sample_rate_hz();
    validate_formants(formants, rate)?;
    let mut y: Vec<f64> = source.samples().iter().map(|s| s.as_f64()).collect();
    for f in formants {
        let r = resonator_pole_radius(f.bandwidth_hz, rate);
        if !(r < 1.0) {
            return Err(Error::UnstableFilter(format!("pole radius {r} for {f:?}")));
        }
        let theta = 2.0 * std::f64::consts::PI * f.frequency_hz / f64::from(rate);
        let a1 = 2.0 * r * theta.cos();
        let a2 = -r * r;
        let gain = 1.0 - a1 - a2;
        let (mut y1, mut y2) = (0.0, 0.0);
        for v in y.iter_mut() {
            let out = gain * *v + a1 * y1 + a2 * y2;
            y2 = y1;
            y1 = out;
            *v = out;
        }
    }
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale = if peak > 0.0 { OUTPUT_PEAK / peak } else { 0.0 };
    AudioBuffer::new(y.into_iter().map(|v| T::lit(v * scale)).collect(), rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::power_spectrum;

    #[test]
    fn pole_radius_example() {
        assert!((resonator_pole_radius(80.0, 16000) - 0.984_414).abs() < 1e-5);
    }

    #[test]
    fn impulse_response_peaks_at_formants() {
        let formants = [
            Formant::new(700.0, 80.0),
            Formant::new(1220.0, 90.0),
            Formant::new(2600.0, 120.0),
            Formant::new(3500.0, 150.0),
        ];
        let n = 16384;
        let mut x = vec![0.0f64; n];
        x[0] = 1.0;
        let y = vocal_tract_filter(&AudioBuffer::new(x, 16000).unwrap(), &formants).unwrap();
        assert!((y.peak() - OUTPUT_PEAK).abs() < 1e-12);
        let p = power_spectrum(y.samples(), n);
        let bin_hz = 16000.0 / n as f64;
        let maxima: Vec<f64> = (1..p.len() - 1)
            .filter(|&k| p[k] > p[k - 1] && p[k] >= p[k + 1])
            .map(|k| k as f64 * bin_hz)
            .collect();
        for f in &formants {
            assert!(
                maxima.iter().any(|m| (m - f.frequency_hz).abs() <= 20.0),
                "no maximum near {} Hz in {maxima:?}",
                f.frequency_hz
            );
        }
    }

    #[test]
    fn silence_in_silence_out() {
        let y = vocal_tract_filter(
            &AudioBuffer::new(vec![0.0f64; 100], 16000).unwrap(),
            &[Formant::new(500.0, 60.0)],
        )
        .unwrap();
        assert!(y.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bad_formants_are_rejected() {
        let buf = AudioBuffer::new(vec![0.0f64; 10], 16000).unwrap();
        assert!(matches!(
            vocal_tract_filter(&buf, &[Formant::new(500.0, 0.0)]),
            Err(Error::UnstableFilter(_))
        ));
        assert!(vocal_tract_filter(&buf, &[Formant::new(900.0, 50.0), Formant::new(800.0, 50.0)]).is_err());
        assert!(vocal_tract_filter(&buf, &[Formant::new(9000.0, 50.0)]).is_err());
    }
}
