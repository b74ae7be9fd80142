#![allow(dead_code)]

use pitchcov::dsp::FrameSpec;
use pitchcov::eval::{Corpus, PreparedCorpus};
use pitchcov::model::{Dataset, Matrix};
use pitchcov::pipeline::analyze_stimuli;
use pitchcov::pitch::PitchParams;
use pitchcov::synth::{generate_corpus, Mechanism, Stimulus, SynthConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 40;

/// Corpus whose targets are exactly `features . weights + intercept`.
pub fn planted_corpus(id: &str, seed: u64, weights: &[f64], intercept: f64, n_utt: usize, frames: usize) -> PreparedCorpus<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let utts = (0..n_utt)
        .map(|u| {
            let x: Vec<f64> = (0..frames * weights.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = x
                .chunks(weights.len())
                .map(|row| row.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>() + intercept)
                .collect();
            Dataset::new(Matrix::from_vec(frames, weights.len(), x).unwrap(), y)
                .unwrap()
                .labeled(id, &format!("u{u:02}"))
        })
        .collect();
    PreparedCorpus::from_datasets(id, 100.0, utts).unwrap()
}

/// Corpus whose targets are independent of the features.
pub fn noise_corpus(id: &str, seed: u64, n_utt: usize, frames: usize) -> PreparedCorpus<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let utts = (0..n_utt)
        .map(|u| {
            let x: Vec<f64> = (0..frames * DIM).map(|_| rng.random_range(-1.0..1.0)).collect();
            let y = (0..frames).map(|_| rng.random_range(-1.0..1.0)).collect();
            Dataset::new(Matrix::from_vec(frames, DIM, x).unwrap(), y)
                .unwrap()
                .labeled(id, &format!("u{u:02}"))
        })
        .collect();
    PreparedCorpus::from_datasets(id, 100.0, utts).unwrap()
}

pub fn random_weights(seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DIM).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// A generated corpus together with its analysis at default settings.
pub struct SynthCorpus {
    pub stimuli: Vec<Stimulus<f64>>,
    pub corpus: Corpus<f64>,
}

pub fn synth_corpus(mechanism: Mechanism, n: usize, duration_s: f64, seed: u64) -> SynthCorpus {
    let cfg = SynthConfig {
        mechanism,
        n_utterances: n,
        duration_s,
        ..SynthConfig::default()
    };
    let stimuli = generate_corpus::<f64>(&cfg, seed).unwrap();
    let corpus = analyze_stimuli(&mechanism.to_string(), &stimuli, &FrameSpec::default(), &PitchParams::default()).unwrap();
    SynthCorpus { stimuli, corpus }
}

impl SynthCorpus {
    /// Tracked-vs-commanded errors in semitones over voiced frames, and the
    /// number of unvoiced frames.
    pub fn tracking_errors(&self) -> (Vec<f64>, usize) {
        let mut errs = Vec::new();
        let mut unvoiced = 0;
        for (s, u) in self.stimuli.iter().zip(&self.corpus.utterances) {
            for (&t, &f) in u.pitch.frame_times_s().iter().zip(u.pitch.f0_hz()) {
                if f > 0.0 {
                    errs.push(12.0 * (f / s.spec.contour.f0_at(t)).log2());
                } else {
                    unvoiced += 1;
                }
            }
        }
        (errs, unvoiced)
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn sawtooth(freq: f64, rate: u32, seconds: f64) -> Vec<f64> {
    let n = (seconds * f64::from(rate)) as usize;
    (0..n)
        .map(|i| {
            let ph = (freq * i as f64 / f64::from(rate)).fract();
            0.8 * (2.0 * ph - 1.0)
        })
        .collect()
}

pub fn sine(freq: f64, rate: u32, seconds: f64, amp: f64) -> Vec<f64> {
    let n = (seconds * f64::from(rate)) as usize;
    (0..n)
        .map(|i| amp * (2.0 * std::f64::consts::PI * freq * i as f64 / f64::from(rate)).sin())
        .collect()
}
