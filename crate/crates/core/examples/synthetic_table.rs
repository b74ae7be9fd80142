//! Synthesizes both stimulus corpora, fits single-frame MFCC regressors and
//! prints train/test RMSE and Pearson r averaged over ten 80/20 splits.

use std::time::Instant;

use pitchcov::dsp::FrameSpec;
use pitchcov::eval::{run_experiment, ExperimentConfig, PreparedCorpus};
use pitchcov::pipeline::analyze_stimuli;
use pitchcov::pitch::PitchParams;
use pitchcov::synth::{generate_corpus, Mechanism, SynthConfig};

fn main() -> pitchcov::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    println!("{:<12} {:>10} {:>10} {:>8} {:>9}", "stimuli", "train_rmse", "test_rmse", "r", "base_hz");
    for mechanism in [Mechanism::Sinusoidal, Mechanism::Complicated] {
        let start = Instant::now();
        let cfg = SynthConfig { mechanism, ..SynthConfig::default() };
        let stimuli = generate_corpus::<f64>(&cfg, seed)?;
        let corpus = analyze_stimuli(&mechanism.to_string(), &stimuli, &FrameSpec::default(), &PitchParams::default())?;
        let prepared = PreparedCorpus::prepare(&corpus, 0)?;
        let report = run_experiment(&prepared, &prepared, &ExperimentConfig { seed, ..Default::default() })?;
        println!(
            "{:<12} {:>10.3} {:>10.3} {:>8.4} {:>9.2}   ({:.1?})",
            mechanism,
            report.train_rmse_semitones,
            report.rmse_semitones,
            report.pearson_r,
            report.base_hz_train,
            start.elapsed()
        );
    }
    Ok(())
}
