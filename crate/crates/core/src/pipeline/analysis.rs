use rayon::prelude::*;

use crate::audio::{resample, AudioBuffer, CANONICAL_RATE_HZ};
use crate::dsp::{FrameSpec, MfccExtractor};
use crate::error::Result;
use crate::eval::{Corpus, Utterance};
use crate::pitch::{track_f0, PitchParams};
use crate::scalar::Real;
use crate::synth::Stimulus;

/// MFCCs and reference pitch for one recording, after resampling to the
/// canonical rate.
pub fn analyze<T: Real>(
    id: &str,
    audio: &AudioBuffer<T>,
    frames: &FrameSpec,
    pitch: &PitchParams,
) -> Result<Utterance<T>> {
    let audio = resample(audio, CANONICAL_RATE_HZ);
    let mfcc = MfccExtractor::new(frames, CANONICAL_RATE_HZ)?.extract(&audio)?;
    let pitch = track_f0(&audio, pitch)?;
    Ok(Utterance {
        id: id.to_owned(),
        mfcc,
        pitch,
    })
}

/// Analyzes a synthetic corpus in parallel; utterance ids are
/// `<mechanism>_<index>`.
pub fn analyze_stimuli<T: Real>(
    corpus_id: &str,
    stimuli: &[Stimulus<T>],
    frames: &FrameSpec,
    pitch: &PitchParams,
) -> Result<Corpus<T>> {
    let utterances = stimuli
        .par_iter()
        .map(|s| analyze(&stimulus_id(s), &s.audio, frames, pitch))
        .collect::<Result<_>>()?;
    Ok(Corpus {
        id: corpus_id.to_owned(),
        utterances,
    })
}

pub fn stimulus_id<T>(s: &Stimulus<T>) -> String {
    format!("{}_{:03}", s.spec.contour.mechanism(), s.spec.index)
}
