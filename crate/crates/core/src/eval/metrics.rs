use super::special::student_t_two_sided_p;
use crate::dsp::MfccMatrix;
use crate::error::{Error, Result};
use crate::model::{align_targets, Dataset};
use crate::pitch::SemitoneTrack;
use crate::scalar::Real;

pub fn rmse<T: Real>(gold: &[T], pred: &[T]) -> Result<T> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ss: T = gold.iter().zip(pred).map(|(&g, &p)| (g - p) * (g - p)).sum();
    Ok((ss / T::from_usize_lossy(gold.len())).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation<T> {
    pub r: T,
    /// Two-sided p-value of `r = 0` under Student's t with `n - 2` dof.
    pub p_value: T,
    pub n: usize,
}

/// Pearson correlation with its two-sided significance.
pub fn pearson<T: Real>(x: &[T], y: &[T]) -> Result<Correlation<T>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let nf = T::from_usize_lossy(n);
    let mx = x.iter().copied().sum::<T>() / nf;
    let my = y.iter().copied().sum::<T>() / nf;
    let (mut sxx, mut syy, mut sxy) = (T::zero(), T::zero(), T::zero());
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    if sxx <= T::zero() || syy <= T::zero() {
        return Err(Error::ConstantInput);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).max(-T::one()).min(T::one());
    let dof = T::from_usize_lossy(n - 2);
    let one_minus = T::one() - r * r;
    let p_value = if one_minus <= T::zero() {
        T::zero()
    } else {
        student_t_two_sided_p(r * (dof / one_minus).sqrt(), dof)
    };
    Ok(Correlation { r, p_value, n })
}

/// Correlation of one cepstral dimension with the target; `None` when the
/// coefficient is constant over the aligned frames.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffCorrelation<T> {
    pub index: usize,
    pub correlation: Option<Correlation<T>>,
}

/// Pearson r of every feature column against the semitone target.
pub fn per_coefficient_correlation_dataset<T: Real>(data: &Dataset<T>) -> Result<Vec<CoeffCorrelation<T>>> {
    if data.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: data.len() });
    }
    if data.targets.iter().all(|&t| t == data.targets[0]) {
        return Err(Error::ConstantInput);
    }
    (0..data.feature_dim())
        .map(|j| match pearson(&data.features.column(j), &data.targets) {
            Ok(c) => Ok(CoeffCorrelation { index: j, correlation: Some(c) }),
            Err(Error::ConstantInput) => Ok(CoeffCorrelation { index: j, correlation: None }),
            Err(e) => Err(e),
        })
        .collect()
}

/// Per-coefficient correlation for one utterance's MFCCs and semitones.
pub fn per_coefficient_correlation<T: Real>(
    mfcc: &MfccMatrix<T>,
    st: &SemitoneTrack<T>,
) -> Result<Vec<CoeffCorrelation<T>>> {
    per_coefficient_correlation_dataset(&align_targets(mfcc, st)?)
}
