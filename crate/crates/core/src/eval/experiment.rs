//! Repeated-holdout experiments over utterance-level splits: single
//! train/test evaluations, the cross-condition matrix and the training-size
//! ablation.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{pearson, rmse};
use crate::dsp::MfccMatrix;
use crate::error::{Error, Result};
use crate::model::{align_targets_with_context, fit_ols, predict, Dataset, RegressionModel};
use crate::pitch::{hz_to_semitones, percentile, PitchTrack, BASE_PERCENTILE};
use crate::rng;
use crate::scalar::Real;

/// One analysed utterance: features plus reference pitch.
#[derive(Clone, Debug, PartialEq)]
pub struct Utterance<T> {
    pub id: String,
    pub mfcc: MfccMatrix<T>,
    pub pitch: PitchTrack<T>,
}

/// A condition (speaker x material) as a list of utterances.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus<T> {
    pub id: String,
    pub utterances: Vec<Utterance<T>>,
}

/// A corpus reduced to per-utterance regression datasets.
///
/// The semitone base is the 5th percentile of all voiced frames in the
/// corpus, independent of any later split.
#[derive(Clone, Debug)]
pub struct PreparedCorpus<T> {
    pub id: String,
    pub base_hz: T,
    pub utterances: Vec<Dataset<T>>,
    /// Ids of utterances dropped for lack of voiced frames.
    pub skipped: Vec<String>,
}

impl<T: Real> PreparedCorpus<T> {
    pub fn prepare(corpus: &Corpus<T>, context_k: usize) -> Result<Self> {
        let voiced: Vec<T> = corpus.utterances.iter().flat_map(|u| u.pitch.voiced_f0()).collect();
        if voiced.is_empty() {
            return Err(Error::EmptyCorpus(format!("{}: no voiced frames", corpus.id)));
        }
        let base_hz = percentile(&voiced, BASE_PERCENTILE)?;
        let mut utterances = Vec::new();
        let mut skipped = Vec::new();
        for u in &corpus.utterances {
            let st = hz_to_semitones(&u.pitch, base_hz)?;
            match align_targets_with_context(&u.mfcc, &st, context_k) {
                Ok(ds) => utterances.push(ds.labeled(&corpus.id, &u.id)),
                Err(Error::NoVoicedFrames) => skipped.push(u.id.clone()),
                Err(e) => return Err(e),
            }
        }
        if utterances.is_empty() {
            return Err(Error::EmptyCorpus(corpus.id.clone()));
        }
        Ok(Self {
            id: corpus.id.clone(),
            base_hz,
            utterances,
            skipped,
        })
    }

    /// Wraps ready-made datasets, e.g. planted targets in tests.
    pub fn from_datasets(id: &str, base_hz: T, utterances: Vec<Dataset<T>>) -> Result<Self> {
        if utterances.is_empty() {
            return Err(Error::EmptyCorpus(id.to_owned()));
        }
        Ok(Self {
            id: id.to_owned(),
            base_hz,
            utterances,
            skipped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn n_frames(&self) -> usize {
        self.utterances.iter().map(Dataset::len).sum()
    }

    pub fn pooled(&self) -> Result<Dataset<T>> {
        Dataset::concat(&self.utterances)
    }

    fn pool(&self, idx: &[usize]) -> Result<Dataset<T>> {
        Dataset::concat(idx.iter().map(|&i| &self.utterances[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    /// Fraction of utterances used for training in a self-split.
    pub split: f64,
    pub runs: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            split: 0.8,
            runs: 10,
            seed: 0,
            alpha: 0.05,
        }
    }
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(Error::InvalidConfig(format!("split {} outside (0, 1)", self.split)));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Train and test on disjoint utterance subsets of one corpus.
    SelfSplit,
    /// Train on the whole source corpus, test on the whole target corpus.
    Cross,
}

/// Identifies a cell's RNG streams; `(i, j)` and `(j, i)` share streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct CellKey {
    pub train: usize,
    pub test: usize,
}

impl CellKey {
    fn path(&self, run: usize) -> [u64; 3] {
        let (a, b) = (self.train.min(self.test), self.train.max(self.test));
        [a as u64, b as u64, run as u64]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult<T> {
    pub run: usize,
    pub train_rmse: T,
    pub rmse: T,
    /// Zero, with `p_value` one, when predictions or targets are constant.
    pub r: T,
    pub p_value: T,
    pub n_train: usize,
    pub n_test: usize,
    pub train_utterances: Vec<usize>,
    pub test_utterances: Vec<usize>,
}

/// Gold and predicted semitones for one test utterance.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace<T> {
    pub utterance_id: String,
    pub frame_times_s: Vec<f64>,
    pub gold: Vec<T>,
    pub pred: Vec<T>,
}

/// Averages over runs of one train/test pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport<T> {
    pub train_id: String,
    pub test_id: String,
    pub protocol: Protocol,
    pub train_rmse_semitones: T,
    pub rmse_semitones: T,
    pub pearson_r: T,
    /// Largest per-run p-value.
    pub p_value: T,
    /// Every run reached `p <= alpha`.
    pub significant: bool,
    /// Mean test frames per run, rounded.
    pub n_frames: usize,
    pub base_hz_train: T,
    pub base_hz_test: T,
    pub runs: Vec<RunResult<T>>,
    /// Test-utterance traces of the first run.
    pub traces: Vec<Trace<T>>,
}

struct Split {
    train: Vec<usize>,
    test: Vec<usize>,
}

fn self_split(n: usize, split: f64, seed: u64, key: CellKey, run: usize) -> Result<Split> {
    if n < 2 {
        return Err(Error::EmptyCorpus(format!(
            "self-split needs at least 2 utterances, corpus has {n}"
        )));
    }
    let n_train = ((n as f64 * split).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, &key.path(run)));
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

fn correlation_or_null<T: Real>(gold: &[T], pred: &[T]) -> Result<(T, T)> {
    match pearson(gold, pred) {
        Ok(c) => Ok((c.r, c.p_value)),
        Err(Error::ConstantInput) => Ok((T::zero(), T::one())),
        Err(e) => Err(e),
    }
}

struct Fitted<T> {
    model: RegressionModel<T>,
    train_rmse: T,
    n_train: usize,
}

fn fit_on<T: Real>(corpus: &PreparedCorpus<T>, idx: &[usize]) -> Result<Fitted<T>> {
    let train = corpus.pool(idx)?;
    let model = fit_ols(&train)?;
    let fitted = predict(&model, &train.features)?;
    Ok(Fitted {
        train_rmse: rmse(&train.targets, &fitted)?,
        n_train: train.len(),
        model,
    })
}

fn evaluate<T: Real>(
    fitted: &Fitted<T>,
    test: &PreparedCorpus<T>,
    idx: &[usize],
    run: usize,
    train_idx: Vec<usize>,
    keep_traces: bool,
) -> Result<(RunResult<T>, Vec<Trace<T>>)> {
    let mut gold = Vec::new();
    let mut pred = Vec::new();
    let mut traces = Vec::new();
    for &i in idx {
        let ds = &test.utterances[i];
        let p = predict(&fitted.model, &ds.features)?;
        if keep_traces {
            traces.push(Trace {
                utterance_id: ds.utterance_ids.first().cloned().unwrap_or_default(),
                frame_times_s: ds.frame_times_s.clone(),
                gold: ds.targets.clone(),
                pred: p.clone(),
            });
        }
        gold.extend_from_slice(&ds.targets);
        pred.extend(p);
    }
    let (r, p_value) = correlation_or_null(&gold, &pred)?;
    Ok((
        RunResult {
            run,
            train_rmse: fitted.train_rmse,
            rmse: rmse(&gold, &pred)?,
            r,
            p_value,
            n_train: fitted.n_train,
            n_test: gold.len(),
            train_utterances: train_idx,
            test_utterances: idx.to_vec(),
        },
        traces,
    ))
}

fn mean<T: Real>(values: impl Iterator<Item = T>) -> T {
    let (sum, n) = values.fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        T::nan()
    } else {
        sum / T::from_usize_lossy(n)
    }
}

fn summarize<T: Real>(
    train: &PreparedCorpus<T>,
    test: &PreparedCorpus<T>,
    protocol: Protocol,
    alpha: f64,
    runs: Vec<RunResult<T>>,
    traces: Vec<Trace<T>>,
) -> EvalReport<T> {
    let alpha = T::lit(alpha);
    EvalReport {
        train_id: train.id.clone(),
        test_id: test.id.clone(),
        protocol,
        train_rmse_semitones: mean(runs.iter().map(|r| r.train_rmse)),
        rmse_semitones: mean(runs.iter().map(|r| r.rmse)),
        pearson_r: mean(runs.iter().map(|r| r.r)),
        p_value: runs.iter().map(|r| r.p_value).fold(T::zero(), T::max),
        significant: runs.iter().all(|r| r.p_value <= alpha),
        n_frames: (runs.iter().map(|r| r.n_test).sum::<usize>() as f64 / runs.len().max(1) as f64).round() as usize,
        base_hz_train: train.base_hz,
        base_hz_test: test.base_hz,
        runs,
        traces,
    }
}

/// Protocol used for a pairing: corpora with the same id are split.
pub fn protocol_for<T>(train: &PreparedCorpus<T>, test: &PreparedCorpus<T>) -> Protocol {
    if train.id == test.id {
        Protocol::SelfSplit
    } else {
        Protocol::Cross
    }
}

/// Runs `cfg.runs` evaluations of `train -> test` with streams keyed by `key`.
pub fn run_experiment_keyed<T: Real>(
    train: &PreparedCorpus<T>,
    test: &PreparedCorpus<T>,
    cfg: &ExperimentConfig,
    key: CellKey,
) -> Result<EvalReport<T>> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::EmptyCorpus(train.id.clone()));
    }
    if test.is_empty() {
        return Err(Error::EmptyCorpus(test.id.clone()));
    }
    let protocol = protocol_for(train, test);
    let per_run: Vec<(RunResult<T>, Vec<Trace<T>>)> = match protocol {
        Protocol::SelfSplit => (0..cfg.runs)
            .into_par_iter()
            .map(|run| {
                let split = self_split(train.len(), cfg.split, cfg.seed, key, run)?;
                let fitted = fit_on(train, &split.train)?;
                evaluate(&fitted, test, &split.test, run, split.train, run == 0)
            })
            .collect::<Result<_>>()?,
        Protocol::Cross => {
            // full-corpus protocol: every run sees the same data
            let all_train: Vec<usize> = (0..train.len()).collect();
            let all_test: Vec<usize> = (0..test.len()).collect();
            let fitted = fit_on(train, &all_train)?;
            (0..cfg.runs)
                .map(|run| evaluate(&fitted, test, &all_test, run, all_train.clone(), run == 0))
                .collect::<Result<_>>()?
        }
    };
    let mut runs = Vec::with_capacity(per_run.len());
    let mut traces = Vec::new();
    for (r, t) in per_run {
        runs.push(r);
        if traces.is_empty() {
            traces = t;
        }
    }
    Ok(summarize(train, test, protocol, cfg.alpha, runs, traces))
}

/// Repeated-holdout evaluation of a model trained on `train`, tested on `test`.
pub fn run_experiment<T: Real>(
    train: &PreparedCorpus<T>,
    test: &PreparedCorpus<T>,
    cfg: &ExperimentConfig,
) -> Result<EvalReport<T>> {
    run_experiment_keyed(train, test, cfg, CellKey::default())
}

/// Mean test correlation for every ordered pair of conditions.
#[derive(Clone, Debug)]
pub struct CrossMatrix<T> {
    pub conditions: Vec<String>,
    pub mean_r: Vec<Vec<T>>,
    pub significant: Vec<Vec<bool>>,
    pub runs: usize,
    /// Full reports, row = training condition, column = test condition.
    pub cells: Vec<Vec<EvalReport<T>>>,
}

pub fn cross_matrix<T: Real>(conditions: &[PreparedCorpus<T>], cfg: &ExperimentConfig) -> Result<CrossMatrix<T>> {
    let n = conditions.len();
    if n == 0 {
        return Err(Error::EmptyCorpus("no conditions given".into()));
    }
    let cells: Vec<EvalReport<T>> = (0..n * n)
        .into_par_iter()
        .map(|c| {
            let (i, j) = (c / n, c % n);
            run_experiment_keyed(&conditions[i], &conditions[j], cfg, CellKey { train: i, test: j })
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<Vec<EvalReport<T>>> = Vec::with_capacity(n);
    let mut it = cells.into_iter();
    for _ in 0..n {
        rows.push(it.by_ref().take(n).collect());
    }
    Ok(CrossMatrix {
        conditions: conditions.iter().map(|c| c.id.clone()).collect(),
        mean_r: rows.iter().map(|r| r.iter().map(|c| c.pearson_r).collect()).collect(),
        significant: rows.iter().map(|r| r.iter().map(|c| c.significant).collect()).collect(),
        runs: cfg.runs,
        cells: rows,
    })
}

/// Mean test metrics when training on a fraction of the training split.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationPoint<T> {
    pub fraction: f64,
    pub rmse: T,
    pub r: T,
    pub train_rmse: T,
    /// Mean number of training frames per run.
    pub n_train_frames: f64,
    pub n_train_utterances: usize,
}

/// `fractions` parsed from `start:stop:step`, inclusive of `stop`.
pub fn fraction_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start > 0.0 && stop <= 1.0 && start <= stop && step > 0.0) {
        return Err(Error::InvalidConfig(format!("bad fraction range {start}:{stop}:{step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    // round to the step's decimal precision so 0.1 * 3 prints as 0.3
    Ok((0..n).map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9).collect())
}

/// Training-size ablation on a self-split: for each run the held-out test
/// utterances are fixed and `ceil(fraction * n_train)` training utterances
/// are drawn. A fraction of 1.0 reproduces [`run_experiment`] exactly.
pub fn ablation<T: Real>(
    corpus: &PreparedCorpus<T>,
    fractions: &[f64],
    cfg: &ExperimentConfig,
) -> Result<Vec<AblationPoint<T>>> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(corpus.id.clone()));
    }
    if let Some(&f) = fractions.iter().find(|&&f| !(f > 0.0 && f <= 1.0)) {
        return Err(Error::InvalidConfig(format!("fraction {f} outside (0, 1]")));
    }
    let key = CellKey::default();
    let per_run: Vec<Vec<RunResult<T>>> = (0..cfg.runs)
        .into_par_iter()
        .map(|run| {
            let split = self_split(corpus.len(), cfg.split, cfg.seed, key, run)?;
            fractions
                .iter()
                .enumerate()
                .map(|(fi, &fraction)| {
                    let keep = ((fraction * split.train.len() as f64 - 1e-9).ceil() as usize).clamp(1, split.train.len());
                    let subset = if keep == split.train.len() {
                        split.train.clone()
                    } else {
                        let mut pool = split.train.clone();
                        let mut path = key.path(run).to_vec();
                        path.push(1 + fi as u64);
                        pool.shuffle(&mut rng::stream(cfg.seed, &path));
                        let mut s = pool[..keep].to_vec();
                        s.sort_unstable();
                        s
                    };
                    let fitted = fit_on(corpus, &subset)?;
                    evaluate(&fitted, corpus, &split.test, run, subset, false).map(|(r, _)| r)
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    Ok(fractions
        .iter()
        .enumerate()
        .map(|(fi, &fraction)| {
            let at = || per_run.iter().map(move |runs| &runs[fi]);
            AblationPoint {
                fraction,
                rmse: mean(at().map(|r| r.rmse)),
                r: mean(at().map(|r| r.r)),
                train_rmse: mean(at().map(|r| r.train_rmse)),
                n_train_frames: at().map(|r| r.n_train as f64).sum::<f64>() / per_run.len() as f64,
                n_train_utterances: at().next().map_or(0, |r| r.train_utterances.len()),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn planted(id: &str, n_utt: usize, frames: usize, seed: u64, noise_only: bool) -> PreparedCorpus<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..40).map(|j| ((j * 7 % 11) as f64 - 5.0) / 10.0).collect();
        let utts = (0..n_utt)
            .map(|u| {
                let rows: Vec<Vec<f64>> =
                    (0..frames).map(|_| (0..40).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
                let y = rows
                    .iter()
                    .map(|r| {
                        if noise_only {
                            rng.random_range(-1.0..1.0)
                        } else {
                            r.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() + 4.0
                        }
                    })
                    .collect();
                Dataset::new(Matrix::from_rows(&rows).unwrap(), y).unwrap().labeled(id, &format!("u{u}"))
            })
            .collect();
        PreparedCorpus::from_datasets(id, 100.0, utts).unwrap()
    }

    #[test]
    fn self_split_counts() {
        let s = self_split(60, 0.8, 1, CellKey::default(), 0).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (48, 12));
        let t = self_split(60, 0.8, 1, CellKey::default(), 1).unwrap();
        assert_ne!(s.train, t.train);
        assert!(self_split(1, 0.8, 1, CellKey::default(), 0).is_err());
    }

    #[test]
    fn planted_self_experiment_is_exact() {
        let c = planted("a", 10, 30, 1, false);
        let cfg = ExperimentConfig { seed: 3, ..Default::default() };
        let rep = run_experiment(&c, &c, &cfg).unwrap();
        assert_eq!(rep.protocol, Protocol::SelfSplit);
        assert_eq!(rep.runs.len(), 10);
        assert!(rep.rmse_semitones < 1e-6);
        assert!((rep.pearson_r - 1.0).abs() < 1e-9);
        assert!(rep.significant);
        assert_eq!(rep.runs[0].test_utterances.len(), 2);
        assert_eq!(rep.traces.len(), 2);
        assert_eq!(run_experiment(&c, &c, &cfg).unwrap(), rep);
    }

    #[test]
    fn cross_protocol_uses_full_corpora() {
        let a = planted("a", 4, 30, 1, false);
        let b = planted("b", 3, 30, 2, false);
        let rep = run_experiment(&a, &b, &ExperimentConfig::default()).unwrap();
        assert_eq!(rep.protocol, Protocol::Cross);
        assert_eq!(rep.runs[0].n_test, 90);
        assert_eq!(rep.runs[0].n_train, 120);
    }

    #[test]
    fn ablation_at_full_fraction_matches_experiment() {
        let c = planted("a", 10, 30, 4, true);
        let cfg = ExperimentConfig { seed: 9, runs: 4, ..Default::default() };
        let rep = run_experiment(&c, &c, &cfg).unwrap();
        let ab = ablation(&c, &[0.5, 1.0], &cfg).unwrap();
        assert_eq!(ab[1].rmse, rep.rmse_semitones);
        assert_eq!(ab[1].r, rep.pearson_r);
        assert_eq!(ab[0].n_train_utterances, 4);
    }

    #[test]
    fn fraction_ranges() {
        let f = fraction_range(0.1, 1.0, 0.1).unwrap();
        assert_eq!(f.len(), 10);
        assert_eq!(f[2], 0.3);
        assert_eq!(f[9], 1.0);
        assert!(fraction_range(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn matrix_labels_and_protocols() {
        let conds: Vec<_> = (0..3).map(|i| planted(&format!("c{i}"), 5, 20, i, false)).collect();
        let m = cross_matrix(&conds, &ExperimentConfig { runs: 2, ..Default::default() }).unwrap();
        assert_eq!(m.conditions, vec!["c0", "c1", "c2"]);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { Protocol::SelfSplit } else { Protocol::Cross };
                assert_eq!(m.cells[i][j].protocol, want);
                assert_eq!(m.cells[i][j].train_id, format!("c{i}"));
                assert_eq!(m.cells[i][j].test_id, format!("c{j}"));
            }
        }
    }
}
