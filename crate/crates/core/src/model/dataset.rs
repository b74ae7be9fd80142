use super::matrix::Matrix;
use crate::dsp::MfccMatrix;
use crate::error::{Error, Result};
use crate::pitch::SemitoneTrack;
use crate::scalar::Real;

/// Row `i` is frames `i-k ..= i+k` concatenated; out-of-range frames are
/// replaced by the nearest edge frame.
pub fn assemble_features<T: Real>(mfcc: &MfccMatrix<T>, context_k: usize) -> Matrix<T> {
    let n = mfcc.n_frames();
    let d = mfcc.n_coeffs();
    let width = d * (2 * context_k + 1);
    let mut data = Vec::with_capacity(n * width);
    for i in 0..n {
        for offset in 0..=2 * context_k {
            let j = (i + offset).saturating_sub(context_k).min(n - 1);
            data.extend_from_slice(mfcc.row(j));
        }
    }
    Matrix::from_vec(n, width, data).expect("width arithmetic")
}

/// Where a dataset row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameRef {
    /// Index into [`Dataset::utterance_ids`].
    pub utterance: usize,
    /// MFCC frame index within the utterance.
    pub frame: usize,
}

/// Feature rows paired one-to-one with semitone targets.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub features: Matrix<T>,
    pub targets: Vec<T>,
    pub frame_times_s: Vec<f64>,
    pub corpus_id: String,
    pub utterance_ids: Vec<String>,
    pub provenance: Vec<FrameRef>,
    pub context_k: usize,
}

impl<T: Real> Dataset<T> {
    pub fn new(features: Matrix<T>, targets: Vec<T>) -> Result<Self> {
        if features.rows() != targets.len() {
            return Err(Error::LengthMismatch {
                left: features.rows(),
                right: targets.len(),
            });
        }
        if features.as_slice().iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("dataset contains non-finite values".into()));
        }
        let n = targets.len();
        Ok(Self {
            features,
            targets,
            frame_times_s: vec![0.0; n],
            corpus_id: String::new(),
            utterance_ids: vec![String::new()],
            provenance: (0..n).map(|frame| FrameRef { utterance: 0, frame }).collect(),
            context_k: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    /// Tags a single-utterance dataset with its corpus and utterance ids.
    pub fn labeled(mut self, corpus_id: &str, utterance_id: &str) -> Self {
        self.corpus_id = corpus_id.to_owned();
        self.utterance_ids = vec![utterance_id.to_owned()];
        self.provenance.iter_mut().for_each(|p| p.utterance = 0);
        self
    }

    /// Pools datasets; utterance indices in the provenance are remapped.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Dataset<T>>) -> Result<Self> {
        let parts: Vec<&Dataset<T>> = parts.into_iter().collect();
        let first = parts.first().ok_or(Error::EmptyInput)?;
        let features = Matrix::vstack(parts.iter().map(|p| &p.features))?;
        let mut out = Dataset {
            features,
            targets: Vec::new(),
            frame_times_s: Vec::new(),
            corpus_id: first.corpus_id.clone(),
            utterance_ids: Vec::new(),
            provenance: Vec::new(),
            context_k: first.context_k,
        };
        for p in parts {
            let base = out.utterance_ids.len();
            out.targets.extend_from_slice(&p.targets);
            out.frame_times_s.extend_from_slice(&p.frame_times_s);
            out.utterance_ids.extend(p.utterance_ids.iter().cloned());
            out.provenance.extend(p.provenance.iter().map(|r| FrameRef {
                utterance: base + r.utterance,
                frame: r.frame,
            }));
            if p.corpus_id != out.corpus_id {
                out.corpus_id = format!("{}+{}", out.corpus_id, p.corpus_id);
            }
        }
        Ok(out)
    }
}

/// Pairs MFCC frames with semitone frames by nearest time, using
/// single-frame features.
pub fn align_targets<T: Real>(mfcc: &MfccMatrix<T>, st: &SemitoneTrack<T>) -> Result<Dataset<T>> {
    align_targets_with_context(mfcc, st, 0)
}

/// As [`align_targets`], with `context_k` neighbouring frames per side.
///
/// A pair is formed when the times differ by less than half the smaller of
/// the two frame steps; MFCC frames without a voiced partner are dropped.
pub fn align_targets_with_context<T: Real>(
    mfcc: &MfccMatrix<T>,
    st: &SemitoneTrack<T>,
    context_k: usize,
) -> Result<Dataset<T>> {
    if st.is_empty() || mfcc.is_empty() {
        return Err(Error::NoVoicedFrames);
    }
    let tol = 0.5 * mfcc.step_s().min(st.step_s) * (1.0 - 1e-6);
    let times = &st.frame_times_s;
    let mut pairs = Vec::new();
    for (i, &t) in mfcc.frame_times_s().iter().enumerate() {
        let j = times.partition_point(|&x| x < t);
        let best = [j.checked_sub(1), (j < times.len()).then_some(j)]
            .into_iter()
            .flatten()
            .min_by(|&a, &b| (times[a] - t).abs().total_cmp(&(times[b] - t).abs()));
        if let Some(j) = best.filter(|&j| (times[j] - t).abs() < tol) {
            pairs.push((i, j));
        }
    }
    if pairs.is_empty() {
        return Err(Error::NoVoicedFrames);
    }
    let all = assemble_features(mfcc, context_k);
    let rows: Vec<usize> = pairs.iter().map(|&(i, _)| i).collect();
    let mut ds = Dataset::new(all.select_rows(&rows), pairs.iter().map(|&(_, j)| st.semitones[j]).collect())?;
    ds.frame_times_s = rows.iter().map(|&i| mfcc.frame_times_s()[i]).collect();
    ds.provenance = rows.iter().map(|&frame| FrameRef { utterance: 0, frame }).collect();
    ds.context_k = context_k;
    Ok(ds)
}
