use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::analysis::{analyze, stimulus_id};
use super::config::RunConfig;
use super::io::{
    atomic_write, f0_csv, fmt_sig, list_with_suffix, load_features, mfcc_csv, model_csv, write_csv,
};
use crate::audio::{encode_wav, read_wav};
use crate::error::{Error, Result};
use crate::eval::{
    ablation, cross_matrix, per_coefficient_correlation_dataset, run_experiment, EvalReport, PreparedCorpus,
    Protocol,
};
use crate::model::fit_ols;
use crate::synth::{generate_corpus, ContourParams, StimulusSpec};

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    atomic_write(&dir.join("config.json"), cfg.to_json().as_bytes())
}

#[derive(Clone, Debug)]
pub struct SynthOutcome {
    pub files: Vec<PathBuf>,
    pub total_duration_s: f64,
}

const MANIFEST_HEADER: [&str; 13] = [
    "index", "mechanism", "alpha", "phi", "alpha1", "beta1", "alpha2", "beta2", "f1", "f2", "f3", "f4", "seed",
];

fn manifest_row(spec: &StimulusSpec) -> Vec<String> {
    let blank = String::new;
    let contour = match spec.contour.params {
        ContourParams::Sinusoidal { alpha, phi } => [fmt_sig(alpha), fmt_sig(phi), blank(), blank(), blank(), blank()],
        ContourParams::Complicated {
            alpha1,
            beta1,
            alpha2,
            beta2,
        } => [blank(), blank(), fmt_sig(alpha1), fmt_sig(beta1), fmt_sig(alpha2), fmt_sig(beta2)],
    };
    let mut row = vec![spec.index.to_string(), spec.contour.mechanism().to_string()];
    row.extend(contour);
    row.extend(spec.formants.iter().map(|f| fmt_sig(f.frequency_hz)));
    row.push(spec.rng_seed.to_string());
    row
}

/// Renders the configured corpus into `out` as 16-bit WAVs plus
/// `manifest.csv` and `config.json`.
pub fn cmd_synth(cfg: &RunConfig) -> Result<SynthOutcome> {
    let out = cfg.out_dir()?;
    cfg.synth.validate()?;
    ensure_dir(out)?;
    let stimuli = generate_corpus::<f64>(&cfg.synth, cfg.seed)?;
    let files = stimuli
        .par_iter()
        .map(|s| {
            let path = out.join(format!("{}.wav", stimulus_id(s)));
            atomic_write(&path, &encode_wav(&s.audio)).map(|()| path)
        })
        .collect::<Result<Vec<_>>>()?;
    write_csv(
        &out.join("manifest.csv"),
        &MANIFEST_HEADER,
        stimuli.iter().map(|s| manifest_row(&s.spec)),
    )?;
    write_config(out, cfg)?;
    Ok(SynthOutcome {
        files,
        total_duration_s: stimuli.iter().map(|s| s.audio.duration_s()).sum(),
    })
}

#[derive(Clone, Debug)]
pub struct ExtractOutcome {
    /// Utterance ids written, in file-name order.
    pub written: Vec<String>,
    /// Inputs that could not be analysed, with the reason.
    pub skipped: Vec<(PathBuf, String)>,
}

/// Analyses every `*.wav` in `input` and writes `<utt>.mfcc.csv` and
/// `<utt>.f0.csv` into `out` (default: `input`). Unreadable files are
/// skipped and reported; a directory without usable audio is an error.
pub fn cmd_extract(cfg: &RunConfig) -> Result<ExtractOutcome> {
    let input = cfg
        .input
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("no corpus directory (--input)".into()))?;
    let out = cfg.out.as_deref().unwrap_or(input);
    let wavs = list_with_suffix(input, ".wav")?;
    if wavs.is_empty() {
        return Err(Error::BadData {
            path: input.to_owned(),
            message: "no .wav files".into(),
        });
    }
    ensure_dir(out)?;
    let results: Vec<(String, Result<()>)> = wavs
        .par_iter()
        .map(|path| {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let utt = name.trim_end_matches(".wav").to_owned();
            let res = read_wav::<f64>(path)
                .and_then(|audio| analyze(&utt, &audio, &cfg.frames, &cfg.pitch))
                .and_then(|u| {
                    atomic_write(&out.join(format!("{utt}.mfcc.csv")), &mfcc_csv(&u.mfcc))?;
                    atomic_write(&out.join(format!("{utt}.f0.csv")), &f0_csv(&u.pitch))
                });
            (utt, res)
        })
        .collect();
    let mut outcome = ExtractOutcome {
        written: Vec::new(),
        skipped: Vec::new(),
    };
    for ((utt, res), path) in results.into_iter().zip(&wavs) {
        match res {
            Ok(()) => outcome.written.push(utt),
            // output-side failures are not per-file problems
            Err(e @ Error::Io { .. }) if !matches!(&e, Error::Io { path: p, .. } if p == path) => return Err(e),
            Err(e) => outcome.skipped.push((path.clone(), e.to_string())),
        }
    }
    if outcome.written.is_empty() {
        return Err(Error::BadData {
            path: input.to_owned(),
            message: "no readable .wav files".into(),
        });
    }
    write_config(out, cfg)?;
    Ok(outcome)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub train: String,
    pub test: String,
    pub protocol: Protocol,
    pub train_rmse_semitones: f64,
    pub rmse_semitones: f64,
    pub pearson_r: f64,
    pub p_value: f64,
    pub significant: bool,
    pub n_frames: usize,
    pub base_hz_train: f64,
    pub base_hz_test: f64,
    pub runs: usize,
}

impl From<&EvalReport<f64>> for ExperimentSummary {
    fn from(r: &EvalReport<f64>) -> Self {
        Self {
            train: r.train_id.clone(),
            test: r.test_id.clone(),
            protocol: r.protocol,
            train_rmse_semitones: r.train_rmse_semitones,
            rmse_semitones: r.rmse_semitones,
            pearson_r: r.pearson_r,
            p_value: r.p_value,
            significant: r.significant,
            n_frames: r.n_frames,
            base_hz_train: r.base_hz_train,
            base_hz_test: r.base_hz_test,
            runs: r.runs.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixSummary {
    pub conditions: Vec<String>,
    pub mean_r: Vec<Vec<f64>>,
    pub significant: Vec<Vec<bool>>,
    pub runs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub fraction: f64,
    pub rmse: f64,
    pub r: f64,
    pub train_rmse: f64,
    pub n_train_utterances: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoeffRow {
    pub coeff: usize,
    /// `None` when the coefficient is constant over the corpus.
    pub r: Option<f64>,
    pub p: Option<f64>,
}

/// Everything `eval` computed; also written as `report.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalSummary {
    pub experiment: Option<ExperimentSummary>,
    pub matrix: Option<MatrixSummary>,
    pub ablation: Option<Vec<AblationRow>>,
    pub percoeff: Option<Vec<CoeffRow>>,
    /// Utterances dropped for having no voiced frames, per condition.
    pub skipped_utterances: Vec<(String, Vec<String>)>,
}

fn condition_id(dir: &Path) -> String {
    dir.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string())
}

struct Loader<'a> {
    cfg: &'a RunConfig,
    skipped: Vec<(String, Vec<String>)>,
}

impl Loader<'_> {
    fn load(&mut self, dir: &Path, id: &str, context_k: usize) -> Result<PreparedCorpus<f64>> {
        let corpus = load_features(dir, id, &self.cfg.frames, &self.cfg.pitch)?;
        let prepared = PreparedCorpus::prepare(&corpus, context_k)?;
        if !prepared.skipped.is_empty() && !self.skipped.iter().any(|(c, _)| c == id) {
            self.skipped.push((id.to_owned(), prepared.skipped.clone()));
        }
        Ok(prepared)
    }
}

fn experiment_rows(report: &EvalReport<f64>) -> impl Iterator<Item = Vec<String>> + '_ {
    report.runs.iter().map(move |run| {
        vec![
            report.train_id.clone(),
            report.test_id.clone(),
            run.run.to_string(),
            fmt_sig(run.rmse),
            fmt_sig(run.r),
            fmt_sig(run.p_value),
            run.n_test.to_string(),
            fmt_sig(report.base_hz_train),
            fmt_sig(report.base_hz_test),
        ]
    })
}

/// Runs the experiments selected in `cfg` over extracted feature
/// directories and writes the report files into `out`.
pub fn cmd_eval(cfg: &RunConfig) -> Result<EvalSummary> {
    let out = cfg.out_dir()?;
    if cfg.train.is_none() && cfg.matrix.is_empty() {
        return Err(Error::InvalidConfig("nothing to evaluate: give --train or --matrix".into()));
    }
    if cfg.train.is_none() && (cfg.ablation || cfg.percoeff || cfg.test.is_some()) {
        return Err(Error::InvalidConfig("--test, --ablation and --percoeff need --train".into()));
    }
    let exp_cfg = cfg.experiment();
    let fractions = if cfg.ablation { Some(cfg.parsed_fractions()?) } else { None };
    let mut loader = Loader {
        cfg,
        skipped: Vec::new(),
    };
    let mut summary = EvalSummary::default();
    let mut experiment_csv: Vec<Vec<String>> = Vec::new();

    // load everything before writing anything so input errors leave `out` untouched
    let train = match &cfg.train {
        Some(dir) => {
            let train_id = condition_id(dir);
            let train = loader.load(dir, &train_id, cfg.context_k)?;
            let test = match &cfg.test {
                Some(t) if t != dir => {
                    let mut id = condition_id(t);
                    if id == train_id {
                        id = t.display().to_string();
                    }
                    Some(loader.load(t, &id, cfg.context_k)?)
                }
                _ => None,
            };
            Some((train, test))
        }
        None => None,
    };
    let conditions = cfg
        .matrix
        .iter()
        .map(|dir| {
            let id = condition_id(dir);
            loader.load(dir, &id, cfg.context_k)
        })
        .collect::<Result<Vec<_>>>()?;
    ensure_dir(out)?;

    if let Some((train, test)) = &train {
        let test = test.as_ref().unwrap_or(train);
        let report = run_experiment(train, test, &exp_cfg)?;
        experiment_csv.extend(experiment_rows(&report));
        for trace in &report.traces {
            write_csv(
                &out.join(format!("trace_{}.csv", trace.utterance_id)),
                &["time_s", "gold_st", "pred_st"],
                trace
                    .frame_times_s
                    .iter()
                    .zip(&trace.gold)
                    .zip(&trace.pred)
                    .map(|((&t, &g), &p)| [fmt_sig(t), fmt_sig(g), fmt_sig(p)]),
            )?;
        }
        let model = fit_ols(&train.pooled()?)?;
        atomic_write(&out.join("model.csv"), &model_csv(&model))?;
        summary.experiment = Some(ExperimentSummary::from(&report));

        if let Some(fractions) = &fractions {
            let points = ablation(train, fractions, &exp_cfg)?;
            write_csv(
                &out.join("ablation.csv"),
                &["fraction", "rmse", "r"],
                points.iter().map(|p| [fmt_sig(p.fraction), fmt_sig(p.rmse), fmt_sig(p.r)]),
            )?;
            summary.ablation = Some(
                points
                    .iter()
                    .map(|p| AblationRow {
                        fraction: p.fraction,
                        rmse: p.rmse,
                        r: p.r,
                        train_rmse: p.train_rmse,
                        n_train_utterances: p.n_train_utterances,
                    })
                    .collect(),
            );
        }

        if cfg.percoeff {
            let single_frame = if cfg.context_k == 0 {
                train.pooled()?
            } else {
                let dir = cfg.train.as_deref().expect("checked above");
                loader.load(dir, &train.id, 0)?.pooled()?
            };
            let rows: Vec<CoeffRow> = per_coefficient_correlation_dataset(&single_frame)?
                .into_iter()
                .map(|c| CoeffRow {
                    coeff: c.index,
                    r: c.correlation.map(|c| c.r),
                    p: c.correlation.map(|c| c.p_value),
                })
                .collect();
            let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
            write_csv(
                &out.join("percoeff.csv"),
                &["coeff", "r", "p"],
                rows.iter().map(|c| [c.coeff.to_string(), opt(c.r), opt(c.p)]),
            )?;
            summary.percoeff = Some(rows);
        }
    }

    if !conditions.is_empty() {
        let m = cross_matrix(&conditions, &exp_cfg)?;
        for row in &m.cells {
            for cell in row {
                experiment_csv.extend(experiment_rows(cell));
            }
        }
        let mut header = vec!["train".to_owned()];
        header.extend(m.conditions.iter().cloned());
        header.extend(m.conditions.iter().map(|c| format!("sig_{c}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        write_csv(
            &out.join("matrix.csv"),
            &header,
            m.conditions.iter().enumerate().map(|(i, c)| {
                std::iter::once(c.clone())
                    .chain(m.mean_r[i].iter().map(|&r| fmt_sig(r)))
                    .chain(m.significant[i].iter().map(|&s| u8::from(s).to_string()))
                    .collect::<Vec<_>>()
            }),
        )?;
        summary.matrix = Some(MatrixSummary {
            conditions: m.conditions.clone(),
            mean_r: m.mean_r.clone(),
            significant: m.significant.clone(),
            runs: m.runs,
        });
    }

    write_csv(
        &out.join("experiments.csv"),
        &["train", "test", "run", "rmse", "r", "p", "n", "base_train", "base_test"],
        experiment_csv,
    )?;
    summary.skipped_utterances = loader.skipped;
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    atomic_write(&out.join("report.json"), json.as_bytes())?;
    write_config(out, cfg)?;
    Ok(summary)
}
