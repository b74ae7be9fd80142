use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use pitchcov::pipeline::{cmd_eval, cmd_extract, cmd_synth, fmt_sig, RunConfig};
use pitchcov::synth::Mechanism;
use pitchcov::Error;

/// Pitch prediction from single-frame MFCCs.
#[derive(Debug, Parser)]
#[command(name = "pitchcov", version)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for synthesis and data splits.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a synthetic corpus of WAV files plus manifest.csv.
    Synth(SynthArgs),
    /// Write per-utterance MFCC and F0 CSVs for a directory of WAVs.
    Extract(ExtractArgs),
    /// Fit and evaluate pitch regressions on extracted features.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct SynthArgs {
    /// Contour family: sinusoidal or complicated.
    #[arg(long)]
    mechanism: Option<Mechanism>,
    /// Number of utterances.
    #[arg(long)]
    n: Option<usize>,
    /// Utterance length in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Output sample rate in Hz.
    #[arg(long)]
    rate: Option<u32>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Directory of WAV files.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Feature directory to train on.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Feature directory to test on (default: self-split of --train).
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    /// Training share of utterances in a self-split.
    #[arg(long)]
    split: Option<f64>,
    /// Neighbouring frames stacked on each side of the target frame.
    #[arg(long)]
    context_k: Option<usize>,
    /// Significance level.
    #[arg(long)]
    alpha: Option<f64>,
    /// Comma-separated feature directories for the cross-condition matrix.
    #[arg(long, value_delimiter = ',')]
    matrix: Option<Vec<PathBuf>>,
    /// Run the training-size ablation on --train.
    #[arg(long)]
    ablation: bool,
    /// Ablation fractions, `start:stop:step` or `a,b,...`.
    #[arg(long)]
    fractions: Option<String>,
    /// Correlate each MFCC coefficient with pitch on --train.
    #[arg(long)]
    percoeff: bool,
}

fn resolve(cli: &Cli) -> pitchcov::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    match &cli.command {
        Command::Synth(a) => {
            if let Some(m) = a.mechanism {
                cfg.synth.mechanism = m;
            }
            if let Some(n) = a.n {
                cfg.synth.n_utterances = n;
            }
            if let Some(d) = a.duration {
                cfg.synth.duration_s = d;
            }
            if let Some(r) = a.rate {
                cfg.synth.sample_rate_hz = r;
            }
        }
        Command::Extract(a) => {
            if let Some(i) = &a.input {
                cfg.input = Some(i.clone());
            }
        }
        Command::Eval(a) => {
            if let Some(t) = &a.train {
                cfg.train = Some(t.clone());
            }
            if let Some(t) = &a.test {
                cfg.test = Some(t.clone());
            }
            if let Some(r) = a.runs {
                cfg.runs = r;
            }
            if let Some(s) = a.split {
                cfg.split = s;
            }
            if let Some(k) = a.context_k {
                cfg.context_k = k;
            }
            if let Some(al) = a.alpha {
                cfg.alpha = al;
            }
            if let Some(m) = &a.matrix {
                cfg.matrix = m.clone();
            }
            cfg.ablation |= a.ablation;
            if let Some(f) = &a.fractions {
                cfg.fractions = f.clone();
            }
            cfg.percoeff |= a.percoeff;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> pitchcov::Result<()> {
    let cfg = resolve(cli)?;
    match &cli.command {
        Command::Synth(_) => {
            let o = cmd_synth(&cfg)?;
            println!("wrote {} files ({} s of audio)", o.files.len(), fmt_sig(o.total_duration_s));
        }
        Command::Extract(_) => {
            let o = cmd_extract(&cfg)?;
            for (path, why) in &o.skipped {
                eprintln!("warning: skipped {}: {why}", path.display());
            }
            println!("extracted {} utterances", o.written.len());
        }
        Command::Eval(_) => {
            let s = cmd_eval(&cfg)?;
            if let Some(e) = &s.experiment {
                println!(
                    "{} -> {}: test RMSE {} st, r {}, p {}{}",
                    e.train,
                    e.test,
                    fmt_sig(e.rmse_semitones),
                    fmt_sig(e.pearson_r),
                    fmt_sig(e.p_value),
                    if e.significant { "" } else { " (n.s.)" }
                );
            }
            if let Some(m) = &s.matrix {
                println!("matrix: {0}x{0} cells over {1} runs", m.conditions.len(), m.runs);
            }
            if let Some(a) = &s.ablation {
                println!("ablation: {} fractions", a.len());
            }
            for (cond, utts) in &s.skipped_utterances {
                eprintln!("warning: {cond}: {} utterances without voiced frames skipped", utts.len());
            }
        }
    }
    Ok(())
}

fn report(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    if e.is_user_error() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => report(&e),
        // a panic is a broken internal invariant
        Err(_) => ExitCode::from(2),
    }
}
