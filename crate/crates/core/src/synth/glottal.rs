use std::f64::consts::{FRAC_PI_2, PI};

use super::contour::F0Contour;
use crate::audio::AudioBuffer;
use crate::scalar::Real;

/// Rosenberg glottal flow at cycle phase `phase` in `[0, 1)`.
///
/// The open phase of length `open_quotient` splits 2:1 into a raised-cosine
/// opening and a quarter-cosine closing; the rest of the cycle is closed.
pub fn rosenberg_pulse(phase: f64, open_quotient: f64) -> f64 {
    let rise = open_quotient * 2.0 / 3.0;
    let fall = open_quotient - rise;
    if phase < rise {
        0.5 * (1.0 - (PI * phase / rise).cos())
    } else if phase < open_quotient {
        (FRAC_PI_2 * (phase - rise) / fall).cos()
    } else {
        0.0
    }
}

/// Glottal excitation together with the number of glottal cycles started.
#[derive(Clone, Debug, PartialEq)]
pub struct GlottalPulses<T> {
    pub audio: AudioBuffer<T>,
    pub cycles: usize,
}

/// Differentiated Rosenberg pulse train following `contour`.
///
/// Phase (in cycles) advances by `f0(t_n) / rate` per sample; each wrap
/// starts a new cycle. The first difference of the flow models lip radiation.
pub fn glottal_source<T: Real>(contour: &F0Contour, sample_rate_hz: u32, open_quotient: f64) -> GlottalPulses<T> {
    assert!(
        open_quotient > 0.0 && open_quotient < 1.0,
        "open quotient must lie in (0, 1)"
    );
    let fs = f64::from(sample_rate_hz);
    let n = (contour.duration_s * fs).round() as usize;
    let mut samples = Vec::with_capacity(n);
    let mut phase = 0.0f64;
    let mut previous = 0.0f64;
    let mut cycles = usize::from(n > 0);
    for i in 0..n {
        let flow = rosenberg_pulse(phase, open_quotient);
        samples.push(T::lit(flow - previous));
        previous = flow;
        phase += contour.f0_at(i as f64 / fs) / fs;
        if phase >= 1.0 {
            phase -= phase.floor();
            if i + 1 < n {
                cycles += 1;
            }
        }
    }
    GlottalPulses {
        audio: AudioBuffer::new(samples, sample_rate_hz).expect("glottal samples are finite"),
        cycles,
    }
}
