//! Reference F0 tracking and the semitone transform used as regression target.

mod semitone;
mod tracker;

pub use semitone::{hz_to_semitones, percentile, semitones_to_hz, SemitoneTrack, BASE_PERCENTILE};
pub use tracker::{nccf, track_f0, PitchParams, PitchTrack};
