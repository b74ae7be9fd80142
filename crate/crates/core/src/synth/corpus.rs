use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{ContourParams, F0Contour, Mechanism, ALPHA12_RANGE, ALPHA_RANGE, PHASE_RANGE};
use super::glottal::glottal_source;
use super::tract::{validate_formants, vocal_tract_filter, Formant};
use crate::audio::{AudioBuffer, CANONICAL_RATE_HZ};
use crate::error::{Error, Result};
use crate::rng;
use crate::scalar::Real;

/// Corpus generation settings. Formant ranges are sampled once per
/// utterance and held fixed while F0 varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub mechanism: Mechanism,
    pub n_utterances: usize,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    /// Contour sampling step stored with each stimulus.
    pub contour_step_s: f64,
    pub open_quotient: f64,
    /// When set, the open quotient is drawn uniformly per utterance.
    pub open_quotient_range: Option<(f64, f64)>,
    pub gain: f64,
    pub formant_ranges_hz: [(f64, f64); 4],
    pub bandwidth_range_hz: (f64, f64),
    /// Minimum spacing enforced between consecutive sampled formants.
    pub min_formant_gap_hz: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            mechanism: Mechanism::Sinusoidal,
            n_utterances: 60,
            duration_s: 5.0,
            sample_rate_hz: CANONICAL_RATE_HZ,
            contour_step_s: 0.01,
            open_quotient: 0.6,
            open_quotient_range: None,
            gain: 1.0,
            formant_ranges_hz: [(300.0, 900.0), (900.0, 2500.0), (2200.0, 3200.0), (3200.0, 4200.0)],
            bandwidth_range_hz: (60.0, 160.0),
            min_formant_gap_hz: 100.0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_utterances == 0 {
            return bad("corpus needs at least one utterance".into());
        }
        if !(self.duration_s > 0.0 && self.contour_step_s > 0.0) {
            return bad("duration and contour step must be positive".into());
        }
        if !(self.open_quotient > 0.0 && self.open_quotient < 1.0) {
            return bad(format!("open quotient {} outside (0, 1)", self.open_quotient));
        }
        if let Some((lo, hi)) = self.open_quotient_range {
            if !(lo > 0.0 && lo <= hi && hi < 1.0) {
                return bad(format!("open quotient range ({lo}, {hi}) invalid"));
            }
        }
        if !(self.gain > 0.0 && self.gain <= 1.0 / super::tract::OUTPUT_PEAK) {
            return bad(format!("gain {} would clip or silence the output", self.gain));
        }
        let nyquist = f64::from(self.sample_rate_hz) / 2.0;
        for (lo, hi) in self.formant_ranges_hz {
            if !(lo > 0.0 && lo <= hi && hi < nyquist) {
                return bad(format!("formant range ({lo}, {hi}) invalid at {} Hz", self.sample_rate_hz));
            }
        }
        let (blo, bhi) = self.bandwidth_range_hz;
        if !(blo > 0.0 && blo <= bhi) {
            return bad(format!("bandwidth range ({blo}, {bhi}) invalid"));
        }
        if F0_MAX_HZ >= nyquist {
            return bad("sample rate too low for the F0 range".into());
        }
        Ok(())
    }
}

const F0_MAX_HZ: f64 = super::contour::F0_RANGE_HZ.1;

/// Everything needed to re-render one utterance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub index: usize,
    pub contour: F0Contour,
    pub formants: [Formant; 4],
    pub glottal_open_quotient: f64,
    pub gain: f64,
    pub rng_seed: u64,
    pub sample_rate_hz: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stimulus<T> {
    pub spec: StimulusSpec,
    pub audio: AudioBuffer<T>,
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

impl StimulusSpec {
    /// Draws utterance `index` of a corpus. Depends only on
    /// `(master_seed, index)` and the config.
    pub fn sample(config: &SynthConfig, master_seed: u64, index: usize) -> Result<Self> {
        let rng_seed = rng::derive_seed(master_seed, &[index as u64]);
        let mut rng = rng::stream(rng_seed, &[]);
        let params = match config.mechanism {
            Mechanism::Sinusoidal => ContourParams::Sinusoidal {
                alpha: uniform(&mut rng, ALPHA_RANGE),
                phi: uniform(&mut rng, PHASE_RANGE),
            },
            Mechanism::Complicated => ContourParams::Complicated {
                alpha1: uniform(&mut rng, ALPHA12_RANGE),
                beta1: uniform(&mut rng, PHASE_RANGE),
                alpha2: uniform(&mut rng, ALPHA12_RANGE),
                beta2: uniform(&mut rng, PHASE_RANGE),
            },
        };
        let mut formants = [Formant::new(0.0, 0.0); 4];
        let mut floor = 0.0f64;
        for (slot, &(lo, hi)) in formants.iter_mut().zip(&config.formant_ranges_hz) {
            let lo = lo.max(floor).min(hi);
            let frequency_hz = uniform(&mut rng, (lo, hi));
            *slot = Formant::new(frequency_hz, uniform(&mut rng, config.bandwidth_range_hz));
            floor = frequency_hz + config.min_formant_gap_hz;
        }
        let glottal_open_quotient = match config.open_quotient_range {
            Some(range) => uniform(&mut rng, range),
            None => config.open_quotient,
        };
        validate_formants(&formants, config.sample_rate_hz)?;
        Ok(Self {
            index,
            contour: F0Contour::new(params, config.duration_s, config.contour_step_s)?,
            formants,
            glottal_open_quotient,
            gain: config.gain,
            rng_seed,
            sample_rate_hz: config.sample_rate_hz,
        })
    }
}

/// Renders one stimulus: glottal source, formant cascade, then gain.
pub fn render<T: Real>(spec: &StimulusSpec) -> Result<AudioBuffer<T>> {
    let source = glottal_source::<T>(&spec.contour, spec.sample_rate_hz, spec.glottal_open_quotient);
    let voiced = vocal_tract_filter(&source.audio, &spec.formants)?;
    Ok(voiced.scaled(T::lit(spec.gain)))
}

/// Generates `config.n_utterances` stimuli in parallel; the output is
/// identical for a given seed regardless of scheduling.
pub fn generate_corpus<T: Real>(config: &SynthConfig, master_seed: u64) -> Result<Vec<Stimulus<T>>> {
    config.validate()?;
    (0..config.n_utterances)
        .into_par_iter()
        .map(|index| {
            let spec = StimulusSpec::sample(config, master_seed, index)?;
            let audio = render(&spec)?;
            Ok(Stimulus { spec, audio })
        })
        .collect()
}
