//! MFCC front end: framing, FFT power spectrum, mel filterbank and DCT-II.

mod dct;
mod fft;
mod frame;
mod mel;
mod mfcc;

pub use dct::Dct2;
pub use fft::{power_spectrum, Fft, RealFft};
pub use frame::{frame_count, frame_signal, hann_window, FrameGeometry, FrameSpec};
pub use mel::{hz_to_mel, mel_filterbank, mel_to_hz, MelFilterbank};
pub use mfcc::{mfcc, MfccExtractor, MfccMatrix};

pub(crate) use frame::ms_to_samples;
