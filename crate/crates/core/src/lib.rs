//! Predicting pitch from coarse spectral features.
//!
//! The crate synthesizes voiced stimuli with controlled F0 contours,
//! extracts 40-dimensional MFCCs, tracks reference F0, fits ordinary least
//! squares from single MFCC frames to semitones and evaluates the fit with
//! RMSE, Pearson correlation, cross-condition matrices and training-size
//! ablations.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar for the common cases.

pub mod audio;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod model;
pub mod pipeline;
pub mod pitch;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Real;

pub type AudioF64 = audio::AudioBuffer<f64>;
pub type AudioF32 = audio::AudioBuffer<f32>;
pub type MfccF64 = dsp::MfccMatrix<f64>;
pub type MfccF32 = dsp::MfccMatrix<f32>;
pub type PitchTrackF64 = pitch::PitchTrack<f64>;
pub type PitchTrackF32 = pitch::PitchTrack<f32>;
pub type SemitoneTrackF64 = pitch::SemitoneTrack<f64>;
pub type DatasetF64 = model::Dataset<f64>;
pub type ModelF64 = model::RegressionModel<f64>;
pub type ModelF32 = model::RegressionModel<f32>;
pub type CorpusF64 = eval::Corpus<f64>;
pub type PreparedCorpusF64 = eval::PreparedCorpus<f64>;
pub type EvalReportF64 = eval::EvalReport<f64>;
pub type CrossMatrixF64 = eval::CrossMatrix<f64>;
