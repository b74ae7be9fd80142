//! Rational-ratio polyphase resampler with a Kaiser-windowed sinc kernel.

use super::AudioBuffer;
use crate::scalar::Real;

/// Kernel half-length, counted in zero crossings of the low-pass sinc.
pub const TAPS_PER_SIDE: usize = 32;
/// Kaiser shape parameter (roughly 85 dB stop-band attenuation).
pub const KAISER_BETA: f64 = 8.6;

/// Coefficient tables larger than this are evaluated on the fly instead.
const MAX_TABLE_LEN: usize = 1 << 22;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let f = half / k as f64;
        term *= f * f;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    sum
}

struct Kernel {
    cutoff: f64,
    half_width: f64,
    i0_beta: f64,
}

impl Kernel {
    fn new(cutoff: f64) -> Self {
        Self::with_zero_crossings(cutoff, TAPS_PER_SIDE)
    }

    fn with_zero_crossings(cutoff: f64, zero_crossings: usize) -> Self {
        Self {
            cutoff,
            half_width: zero_crossings as f64 / cutoff,
            i0_beta: bessel_i0(KAISER_BETA),
        }
    }

    fn eval(&self, d: f64) -> f64 {
        let u = d / self.half_width;
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let window = bessel_i0(KAISER_BETA * (1.0 - u * u).sqrt()) / self.i0_beta;
        let arg = self.cutoff * d;
        let sinc = if arg.abs() < 1e-12 {
            1.0
        } else {
            (std::f64::consts::PI * arg).sin() / (std::f64::consts::PI * arg)
        };
        self.cutoff * sinc * window
    }

    /// Taps for an output point at fractional offset `frac` in `[0, 1)` past
    /// input sample `base`; tap `t` multiplies input `base + 1 - reach + t`.
    /// Normalized to unit sum so DC passes exactly.
    fn taps(&self, frac: f64, reach: usize, out: &mut [f64]) {
        let mut sum = 0.0;
        for (t, c) in out.iter_mut().enumerate() {
            let k = t as f64 + 1.0 - reach as f64;
            *c = self.eval(frac - k);
            sum += *c;
        }
        if sum.abs() > 0.0 {
            out.iter_mut().for_each(|c| *c /= sum);
        }
    }
}

/// Resamples `buf` to `target_rate_hz`.
///
/// Output length is `round(n_in * target / source)`. Equal rates return the
/// input unchanged. Samples beyond the signal edges are taken as zero.
pub fn resample<T: Real>(buf: &AudioBuffer<T>, target_rate_hz: u32) -> AudioBuffer<T> {
    assert!(target_rate_hz > 0, "target rate must be positive");
    let source = buf.sample_rate_hz();
    if source == target_rate_hz {
        return buf.clone();
    }
    let g = gcd(u64::from(source), u64::from(target_rate_hz));
    let up = u64::from(target_rate_hz) / g;
    let down = u64::from(source) / g;
    let n_in = buf.len();
    let n_out = ((n_in as u64 * up) as f64 / down as f64).round() as usize;

    let kernel = Kernel::new((up as f64 / down as f64).min(1.0));
    let reach = kernel.half_width.ceil() as usize;
    let width = 2 * reach;
    let x = buf.samples();

    let table: Option<Vec<f64>> = (up as usize)
        .checked_mul(width)
        .filter(|&len| len <= MAX_TABLE_LEN)
        .map(|len| {
            let mut table = vec![0.0; len];
            for (phase, row) in table.chunks_exact_mut(width).enumerate() {
                kernel.taps(phase as f64 / up as f64, reach, row);
            }
            table
        });

    let mut scratch = vec![0.0; width];
    let mut out = Vec::with_capacity(n_out);
    for j in 0..n_out as u64 {
        let pos = j * down;
        let base = (pos / up) as isize;
        let phase = (pos % up) as usize;
        let taps: &[f64] = match &table {
            Some(t) => &t[phase * width..(phase + 1) * width],
            None => {
                kernel.taps(phase as f64 / up as f64, reach, &mut scratch);
                &scratch
            }
        };
        let first = base + 1 - reach as isize;
        let mut acc = 0.0;
        for (t, &c) in taps.iter().enumerate() {
            let k = first + t as isize;
            if k >= 0 && (k as usize) < n_in {
                acc += c * x[k as usize].as_f64();
            }
        }
        out.push(T::lit(acc.clamp(-1.0, 1.0)));
    }
    AudioBuffer::new(out, target_rate_hz).expect("resampler output is finite")
}

/// Zero-crossings per side of the [`lowpass`] kernel.
const LOWPASS_ZERO_CROSSINGS: usize = 16;

/// Zero-phase low-pass filter with the resampler's Kaiser-sinc kernel and
/// band edge `cutoff_hz`. Cutoffs at or above Nyquist return the input.
pub fn lowpass<T: Real>(buf: &AudioBuffer<T>, cutoff_hz: f64) -> AudioBuffer<T> {
    let nyquist = 0.5 * f64::from(buf.sample_rate_hz());
    if !(cutoff_hz > 0.0) || cutoff_hz >= nyquist {
        return buf.clone();
    }
    let kernel = Kernel::with_zero_crossings(cutoff_hz / nyquist, LOWPASS_ZERO_CROSSINGS);
    let reach = kernel.half_width.floor() as usize;
    let mut taps = vec![0.0; 2 * reach + 1];
    // reach + 1 aligns tap `reach` with offset zero
    kernel.taps(0.0, reach + 1, &mut taps);
    let x = buf.samples();
    let n = x.len();
    let out = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(reach);
            let hi = (i + reach).min(n.saturating_sub(1));
            let acc: f64 = (lo..=hi).map(|k| taps[k + reach - i] * x[k].as_f64()).sum();
            T::lit(acc)
        })
        .collect();
    AudioBuffer::new(out, buf.sample_rate_hz()).expect("filter output is finite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_matches_known_values() {
        assert!((bessel_i0(0.0) - 1.0).abs() < 1e-15);
        // I0(1) = 1.2660658777520082
        assert!((bessel_i0(1.0) - 1.266_065_877_752_008_2).abs() < 1e-14);
    }

    #[test]
    fn identity_when_rates_match() {
        let buf = AudioBuffer::new(vec![0.1f64, -0.2, 0.3], 16000).unwrap();
        assert_eq!(resample(&buf, 16000), buf);
    }

    #[test]
    fn dc_is_preserved_when_downsampling() {
        let buf = AudioBuffer::new(vec![1.0f64; 32000], 32000).unwrap();
        let out = resample(&buf, 16000);
        assert_eq!(out.len(), 16000);
        let reach = 2 * TAPS_PER_SIDE + 2;
        for &s in &out.samples()[reach..out.len() - reach] {
            assert!((s - 1.0).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn lowpass_passes_low_tones_and_stops_high_ones() {
        let rate = 16000u32;
        let tone = |f: f64| {
            let x: Vec<f64> = (0..8000).map(|i| (2.0 * std::f64::consts::PI * f * i as f64 / 16000.0).sin()).collect();
            AudioBuffer::new(x, rate).unwrap()
        };
        let rms = |b: &AudioBuffer<f64>| {
            let s = &b.samples()[1000..7000];
            (s.iter().map(|v| v * v).sum::<f64>() / s.len() as f64).sqrt()
        };
        let low = lowpass(&tone(300.0), 1600.0);
        assert!((rms(&low) - 0.5f64.sqrt()).abs() < 1e-3, "{}", rms(&low));
        // zero phase: the passband tone is not delayed
        let orig = tone(300.0);
        for i in 1000..1100 {
            assert!((low.samples()[i] - orig.samples()[i]).abs() < 2e-3);
        }
        assert!(rms(&lowpass(&tone(2400.0), 1600.0)) < 1e-3);
        assert_eq!(lowpass(&orig, 9000.0), orig);
    }

    #[test]
    fn output_length_is_rounded_ratio() {
        let buf = AudioBuffer::new(vec![0.0f64; 44101], 44100).unwrap();
        let out = resample(&buf, 16000);
        assert_eq!(out.len(), (44101.0f64 * 16000.0 / 44100.0).round() as usize);
        let empty = AudioBuffer::<f64>::new(vec![], 48000).unwrap();
        assert!(resample(&empty, 16000).is_empty());
    }
}
