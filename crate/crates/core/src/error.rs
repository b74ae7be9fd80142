use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed WAV: {0}")]
    MalformedWav(String),
    #[error("unsupported WAV format: {0}")]
    UnsupportedFormat(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid frequency range: fmin {fmin} Hz must be below fmax {fmax} Hz")]
    InvalidRange { fmin: f64, fmax: f64 },
    #[error("invalid frame spec: {0}")]
    InvalidFrameSpec(String),
    #[error("sample rate {rate} Hz is below twice the maximum F0 {f0_max} Hz")]
    RateTooLow { rate: u32, f0_max: f64 },
    #[error("invalid pitch parameters: {0}")]
    InvalidPitchParams(String),
    #[error("empty input")]
    EmptyInput,
    #[error("semitone base must be positive, got {0}")]
    NonPositiveBase(f64),
    #[error("parameter {name} = {value} outside [{lo}, {hi}]")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("unstable resonator: {0}")]
    UnstableFilter(String),
    #[error("no voiced frames to align")]
    NoVoicedFrames,
    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("correlation undefined for constant input")]
    ConstantInput,
    #[error("empty corpus: {0}")]
    EmptyCorpus(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("bad data in {path}: {message}")]
    BadData { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures caused by the caller's input (bad files, flags,
    /// missing corpora) rather than broken internal invariants.
    pub fn is_user_error(&self) -> bool {
        !matches!(self, Error::UnstableFilter(_) | Error::DimensionMismatch { .. })
    }
}
