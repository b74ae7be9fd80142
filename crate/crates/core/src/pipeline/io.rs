use std::fs;
use std::path::{Path, PathBuf};

use crate::dsp::{FrameSpec, MfccMatrix};
use crate::error::{Error, Result};
use crate::eval::{Corpus, Utterance};
use crate::model::RegressionModel;
use crate::pitch::{PitchParams, PitchTrack};

/// Formats `x` with 9 significant digits, trailing zeros trimmed.
///
/// Plain notation is used for decimal exponents in `[-5, 9)`, scientific
/// otherwise, so the output is stable and round-trips through `str::parse`
/// to within one unit in the ninth digit.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidConfig(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Renders rows of already-formatted fields as CSV.
pub(crate) fn csv_bytes<I, R>(header: &[String], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    // writes into a Vec cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.write_record(row).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub(crate) fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let header: Vec<String> = header.iter().map(|s| (*s).to_owned()).collect();
    atomic_write(path, &csv_bytes(&header, rows))
}

pub fn mfcc_csv(m: &MfccMatrix<f64>) -> Vec<u8> {
    let header: Vec<String> = std::iter::once("time_s".to_owned())
        .chain((0..m.n_coeffs()).map(|j| format!("c{j}")))
        .collect();
    let rows = m
        .frame_times_s()
        .iter()
        .zip(m.rows())
        .map(|(&t, row)| std::iter::once(fmt_sig(t)).chain(row.iter().map(|&v| fmt_sig(v))));
    csv_bytes(&header, rows)
}

pub fn f0_csv(track: &PitchTrack<f64>) -> Vec<u8> {
    let header = ["time_s", "f0_hz", "voiced"].map(String::from);
    let rows = track
        .frame_times_s()
        .iter()
        .zip(track.f0_hz())
        .map(|(&t, &f)| [fmt_sig(t), fmt_sig(f), u8::from(f > 0.0).to_string()]);
    csv_bytes(&header, rows)
}

fn bad(path: &Path, message: impl Into<String>) -> Error {
    Error::BadData {
        path: path.to_owned(),
        message: message.into(),
    }
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| bad(path, e.to_string()))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| bad(path, e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(path, e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| bad(path, format!("row {}: {e}", i + 1)))?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Reads a `time_s,c0,...` file written by [`mfcc_csv`]. The coefficient
/// count is taken from the header.
pub fn read_mfcc_csv(path: &Path, spec: &FrameSpec) -> Result<MfccMatrix<f64>> {
    let (header, rows) = read_table(path)?;
    if header.first().map(String::as_str) != Some("time_s") || header.len() < 2 {
        return Err(bad(path, "expected header time_s,c0,..."));
    }
    let spec = FrameSpec {
        n_mfcc: header.len() - 1,
        ..spec.clone()
    };
    let times = rows.iter().map(|r| r[0]).collect();
    let coeffs = rows.into_iter().map(|mut r| r.split_off(1)).collect();
    MfccMatrix::from_rows(coeffs, times, spec).map_err(|e| bad(path, e.to_string()))
}

/// Reads a `time_s,f0_hz,voiced` file written by [`f0_csv`].
pub fn read_f0_csv(path: &Path, params: &PitchParams) -> Result<PitchTrack<f64>> {
    let (header, rows) = read_table(path)?;
    if header != ["time_s", "f0_hz", "voiced"] {
        return Err(bad(path, "expected header time_s,f0_hz,voiced"));
    }
    let times = rows.iter().map(|r| r[0]).collect();
    let f0 = rows.iter().map(|r| r[1]).collect();
    PitchTrack::from_f0(times, f0, params.clone()).map_err(|e| bad(path, e.to_string()))
}

/// Sorted list of files in `dir` whose names end with `suffix`.
pub(crate) fn list_with_suffix(dir: &Path, suffix: &str) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        let matches = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(suffix) && n.len() > suffix.len());
        if matches && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads every `<utt>.mfcc.csv` / `<utt>.f0.csv` pair in `dir` as one
/// corpus named `id`.
pub fn load_features(dir: &Path, id: &str, frames: &FrameSpec, pitch: &PitchParams) -> Result<Corpus<f64>> {
    const MFCC: &str = ".mfcc.csv";
    let mfcc_files = list_with_suffix(dir, MFCC)?;
    if mfcc_files.is_empty() {
        return Err(bad(dir, "no *.mfcc.csv files; run extract first"));
    }
    let mut utterances = Vec::with_capacity(mfcc_files.len());
    for path in mfcc_files {
        let name = path.file_name().and_then(|n| n.to_str()).expect("utf-8 name");
        let utt = &name[..name.len() - MFCC.len()];
        let f0_path = dir.join(format!("{utt}.f0.csv"));
        if !f0_path.is_file() {
            return Err(bad(&f0_path, "missing pitch track for extracted MFCCs"));
        }
        utterances.push(Utterance {
            id: utt.to_owned(),
            mfcc: read_mfcc_csv(&path, frames)?,
            pitch: read_f0_csv(&f0_path, pitch)?,
        });
    }
    Ok(Corpus {
        id: id.to_owned(),
        utterances,
    })
}

/// Two-row model file: metadata, then weights.
pub fn model_csv(model: &RegressionModel<f64>) -> Vec<u8> {
    let header = ["context_k", "feature_dim", "intercept", "rank_flag"].map(String::from);
    let meta = [
        model.context_k.to_string(),
        model.feature_dim().to_string(),
        fmt_sig(model.intercept),
        if model.rank_deficient { "rank_deficient" } else { "full_rank" }.to_owned(),
    ];
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(&header).expect("in-memory csv");
    w.write_record(&meta).expect("in-memory csv");
    w.write_record(model.weights.iter().map(|&v| fmt_sig(v))).expect("in-memory csv");
    w.into_inner().expect("in-memory csv")
}
