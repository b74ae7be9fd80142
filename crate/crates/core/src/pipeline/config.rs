use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dsp::FrameSpec;
use crate::error::{Error, Result};
use crate::eval::{fraction_range, ExperimentConfig};
use crate::pitch::PitchParams;
use crate::synth::SynthConfig;

/// Everything a command needs; persisted as `config.json` next to its
/// outputs so the run can be repeated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub frames: FrameSpec,
    pub pitch: PitchParams,
    pub synth: SynthConfig,
    pub split: f64,
    pub runs: usize,
    pub alpha: f64,
    pub context_k: usize,
    /// Corpus directory read by `extract`.
    pub input: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// Feature directories for the cross-condition matrix.
    pub matrix: Vec<PathBuf>,
    pub ablation: bool,
    /// `start:stop:step` or a comma-separated list.
    pub fractions: String,
    pub percoeff: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let exp = ExperimentConfig::default();
        Self {
            seed: 0,
            frames: FrameSpec::default(),
            pitch: PitchParams::default(),
            synth: SynthConfig::default(),
            split: exp.split,
            runs: exp.runs,
            alpha: exp.alpha,
            context_k: 0,
            input: None,
            train: None,
            test: None,
            matrix: Vec::new(),
            ablation: false,
            fractions: "0.1:1.0:0.1".into(),
            percoeff: false,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::BadData {
            path: path.to_owned(),
            message: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            split: self.split,
            runs: self.runs,
            seed: self.seed,
            alpha: self.alpha,
        }
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("no output directory (--out)".into()))
    }

    pub fn parsed_fractions(&self) -> Result<Vec<f64>> {
        parse_fractions(&self.fractions)
    }
}

/// Parses `start:stop:step` (inclusive) or `a,b,c`.
pub fn parse_fractions(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot parse fractions {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, c] => fraction_range(num(a)?, num(b)?, num(c)?),
        [list] => {
            let v = list.split(',').map(num).collect::<Result<Vec<_>>>()?;
            if v.is_empty() || v.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
                return Err(bad());
            }
            Ok(v)
        }
        _ => Err(bad()),
    }
}
