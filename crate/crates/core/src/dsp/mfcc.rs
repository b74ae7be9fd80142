use super::dct::Dct2;
use super::fft::RealFft;
use super::frame::{hann_window, FrameGeometry, FrameSpec};
use super::mel::MelFilterbank;
use crate::audio::AudioBuffer;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Frames x coefficients, row-major, with per-frame center times.
#[derive(Clone, Debug, PartialEq)]
pub struct MfccMatrix<T> {
    coeffs: Vec<T>,
    n_coeffs: usize,
    frame_times_s: Vec<f64>,
    spec: FrameSpec,
}

impl<T: Real> MfccMatrix<T> {
    /// Builds a matrix from explicit rows; every row must have the same width
    /// and times must be strictly increasing.
    pub fn from_rows(rows: Vec<Vec<T>>, frame_times_s: Vec<f64>, spec: FrameSpec) -> Result<Self> {
        if rows.len() != frame_times_s.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: frame_times_s.len(),
            });
        }
        let n_coeffs = rows.first().map_or(spec.n_mfcc, Vec::len);
        let mut coeffs = Vec::with_capacity(rows.len() * n_coeffs);
        for row in rows {
            if row.len() != n_coeffs {
                return Err(Error::DimensionMismatch {
                    expected: n_coeffs,
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConfig("non-finite MFCC entry".into()));
            }
            coeffs.extend(row);
        }
        if frame_times_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidConfig("frame times must be strictly increasing".into()));
        }
        Ok(Self {
            coeffs,
            n_coeffs,
            frame_times_s,
            spec,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.frame_times_s.len()
    }

    pub fn n_coeffs(&self) -> usize {
        self.n_coeffs
    }

    pub fn is_empty(&self) -> bool {
        self.frame_times_s.is_empty()
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.coeffs[i * self.n_coeffs..(i + 1) * self.n_coeffs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.coeffs.chunks_exact(self.n_coeffs.max(1)).take(self.n_frames())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn frame_times_s(&self) -> &[f64] {
        &self.frame_times_s
    }

    pub fn spec(&self) -> &FrameSpec {
        &self.spec
    }

    pub fn step_s(&self) -> f64 {
        self.spec.step_ms / 1000.0
    }
}

/// Reusable MFCC front end for one sample rate: Hann window, power
/// spectrum, mel filterbank, floored natural log, orthonormal DCT-II.
#[derive(Clone, Debug)]
pub struct MfccExtractor<T> {
    spec: FrameSpec,
    geom: FrameGeometry,
    window: Vec<T>,
    fft: RealFft<T>,
    filterbank: MelFilterbank<T>,
    dct: Dct2<T>,
}

impl<T: Real> MfccExtractor<T> {
    pub fn new(spec: &FrameSpec, sample_rate_hz: u32) -> Result<Self> {
        let geom = spec.resolve(sample_rate_hz)?;
        Ok(Self {
            spec: spec.clone(),
            geom,
            window: hann_window(geom.win_len),
            fft: RealFft::new(geom.n_fft),
            filterbank: MelFilterbank::from_geometry(&geom, spec.n_mels),
            dct: Dct2::new(spec.n_mels, spec.n_mfcc),
        })
    }

    pub fn geometry(&self) -> &FrameGeometry {
        &self.geom
    }

    /// Log mel energies of one raw (unwindowed) frame of `win_len` samples.
    pub fn log_mel(&self, raw: &[T]) -> Vec<T> {
        let windowed: Vec<T> = raw.iter().zip(&self.window).map(|(&s, &w)| s * w).collect();
        let power = self.fft.power_spectrum(&windowed);
        let floor = T::lit(self.spec.log_floor);
        self.filterbank
            .apply(&power)
            .into_iter()
            .map(|e| e.max(floor).ln())
            .collect()
    }

    pub fn extract(&self, buf: &AudioBuffer<T>) -> Result<MfccMatrix<T>> {
        if buf.sample_rate_hz() != self.geom.sample_rate_hz {
            return Err(Error::InvalidConfig(format!(
                "extractor built for {} Hz, buffer is {} Hz",
                self.geom.sample_rate_hz,
                buf.sample_rate_hz()
            )));
        }
        let x = buf.samples();
        let n_frames = self.geom.frame_count(x.len());
        let mut coeffs = Vec::with_capacity(n_frames * self.spec.n_mfcc);
        for i in 0..n_frames {
            let start = i * self.geom.step_len;
            let log_mel = self.log_mel(&x[start..start + self.geom.win_len]);
            coeffs.extend(self.dct.transform(&log_mel));
        }
        Ok(MfccMatrix {
            coeffs,
            n_coeffs: self.spec.n_mfcc,
            frame_times_s: (0..n_frames).map(|i| self.geom.frame_time(i)).collect(),
            spec: self.spec.clone(),
        })
    }
}

/// One-shot MFCC extraction.
pub fn mfcc<T: Real>(buf: &AudioBuffer<T>, spec: &FrameSpec) -> Result<MfccMatrix<T>> {
    if buf.is_empty() {
        return Err(Error::EmptyInput);
    }
    MfccExtractor::new(spec, buf.sample_rate_hz())?.extract(buf)
}
