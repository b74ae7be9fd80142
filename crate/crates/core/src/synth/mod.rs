//! Synthetic voiced stimuli: F0 contours, a Rosenberg glottal source and a
//! four-formant resonator cascade.

mod contour;
mod corpus;
mod glottal;
mod tract;

pub use contour::{
    complicated_contour, sinusoidal_contour, ContourParams, F0Contour, Mechanism, ALPHA12_RANGE,
    ALPHA_RANGE, COMPLICATED_RULE, F0_RANGE_HZ, PHASE_RANGE,
};
pub use corpus::{generate_corpus, render, Stimulus, StimulusSpec, SynthConfig};
pub use glottal::{glottal_source, rosenberg_pulse, GlottalPulses};
pub use tract::{resonator_pole_radius, vocal_tract_filter, Formant, OUTPUT_PEAK};
