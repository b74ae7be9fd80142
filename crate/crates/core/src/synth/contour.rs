use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angular-rate range of the single-sinusoid contour, rad/s.
pub const ALPHA_RANGE: (f64, f64) = (1.7227, 8.6133);
/// Angular-rate range of each component of the two-oscillation contour.
pub const ALPHA12_RANGE: (f64, f64) = (0.8613, 3.4453);
pub const PHASE_RANGE: (f64, f64) = (-FRAC_PI_2, FRAC_PI_2);
pub const F0_RANGE_HZ: (f64, f64) = (60.0, 404.0);

const CENTER_HZ: f64 = 232.0;
const SINE_AMPLITUDE_HZ: f64 = 172.0;
const SUM_AMPLITUDE_HZ: f64 = 86.0;

/// How the two oscillations of the complicated contour are combined.
pub const COMPLICATED_RULE: &str = "f0 = 232 + 86 * (sin(a1 t + b1) + cos(a2 t + b2))";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mechanism {
    Sinusoidal,
    Complicated,
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mechanism::Sinusoidal => "sinusoidal",
            Mechanism::Complicated => "complicated",
        })
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sinusoidal" | "sine" => Ok(Mechanism::Sinusoidal),
            "complicated" => Ok(Mechanism::Complicated),
            other => Err(Error::InvalidConfig(format!("unknown mechanism {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mechanism", rename_all = "lowercase")]
pub enum ContourParams {
    Sinusoidal { alpha: f64, phi: f64 },
    Complicated { alpha1: f64, beta1: f64, alpha2: f64, beta2: f64 },
}

impl ContourParams {
    pub fn mechanism(&self) -> Mechanism {
        match self {
            ContourParams::Sinusoidal { .. } => Mechanism::Sinusoidal,
            ContourParams::Complicated { .. } => Mechanism::Complicated,
        }
    }

    /// Instantaneous F0 in Hz at time `t` seconds.
    pub fn f0_at(&self, t: f64) -> f64 {
        match *self {
            ContourParams::Sinusoidal { alpha, phi } => SINE_AMPLITUDE_HZ * (alpha * t + phi).sin() + CENTER_HZ,
            ContourParams::Complicated {
                alpha1,
                beta1,
                alpha2,
                beta2,
            } => {
                let a = (alpha1 * t + beta1).sin();
                let w = (alpha2 * t + beta2).cos();
                CENTER_HZ + SUM_AMPLITUDE_HZ * (a + w)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(name: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<()> {
            if (lo..=hi).contains(&value) {
                Ok(())
            } else {
                Err(Error::ParamOutOfRange { name, value, lo, hi })
            }
        }
        match *self {
            ContourParams::Sinusoidal { alpha, phi } => {
                check("alpha", alpha, ALPHA_RANGE)?;
                check("phi", phi, PHASE_RANGE)
            }
            ContourParams::Complicated {
                alpha1,
                beta1,
                alpha2,
                beta2,
            } => {
                check("alpha1", alpha1, ALPHA12_RANGE)?;
                check("alpha2", alpha2, ALPHA12_RANGE)?;
                check("beta1", beta1, PHASE_RANGE)?;
                check("beta2", beta2, PHASE_RANGE)
            }
        }
    }
}

/// An F0 trajectory: its generating parameters plus samples every `step_s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F0Contour {
    pub params: ContourParams,
    pub duration_s: f64,
    pub step_s: f64,
    pub f0_hz: Vec<f64>,
}

impl F0Contour {
    pub fn new(params: ContourParams, duration_s: f64, step_s: f64) -> Result<Self> {
        params.validate()?;
        if !(duration_s >= 0.0 && step_s > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "contour needs duration >= 0 and step > 0 (got {duration_s}, {step_s})"
            )));
        }
        let n = (duration_s / step_s + 1e-9).floor() as usize;
        let f0_hz = (0..n).map(|i| params.f0_at(i as f64 * step_s)).collect();
        Ok(Self {
            params,
            duration_s,
            step_s,
            f0_hz,
        })
    }

    pub fn mechanism(&self) -> Mechanism {
        self.params.mechanism()
    }

    pub fn f0_at(&self, t: f64) -> f64 {
        self.params.f0_at(t)
    }

    pub fn times_s(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.f0_hz.len()).map(|i| i as f64 * self.step_s)
    }
}

/// `172 sin(alpha t + phi) + 232`.
pub fn sinusoidal_contour(alpha: f64, phi: f64, duration_s: f64, step_s: f64) -> Result<F0Contour> {
    F0Contour::new(ContourParams::Sinusoidal { alpha, phi }, duration_s, step_s)
}

/// `232 + 86 (sin(alpha1 t + beta1) + cos(alpha2 t + beta2))`.
pub fn complicated_contour(
    alpha1: f64,
    alpha2: f64,
    beta1: f64,
    beta2: f64,
    duration_s: f64,
    step_s: f64,
) -> Result<F0Contour> {
    F0Contour::new(
        ContourParams::Complicated {
            alpha1,
            beta1,
            alpha2,
            beta2,
        },
        duration_s,
        step_s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sinusoid_at_origin() {
        let c = sinusoidal_contour(2.0, 0.0, 5.0, 0.01).unwrap();
        assert_eq!(c.f0_hz[0], 232.0);
        assert_eq!(c.f0_hz.len(), 500);
    }

    #[test]
    fn sinusoid_period() {
        let c = sinusoidal_contour(2.0 * std::f64::consts::PI, 0.0, 5.0, 0.01).unwrap();
        assert!((c.f0_at(1.0) - c.f0_at(0.0)).abs() < 1e-9);
        assert!((c.f0_hz[100] - c.f0_hz[0]).abs() < 1e-9);
    }

    #[test]
    fn complicated_at_origin() {
        let c = complicated_contour(1.0, 2.0, 0.0, 0.0, 5.0, 0.01).unwrap();
        assert!((c.f0_hz[0] - 318.0).abs() < 1e-12);
    }

    #[test]
    fn complicated_equal_rates_phasor_identity() {
        let a = 1.7;
        let c = complicated_contour(a, a, 0.0, 0.0, 5.0, 0.01).unwrap();
        for t in [0.0, 0.37, 1.2, 4.9] {
            let want = 232.0 + 86.0 * 2f64.sqrt() * (a * t + std::f64::consts::FRAC_PI_4).sin();
            assert!((c.f0_at(t) - want).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_range_parameters_are_rejected() {
        assert!(matches!(
            sinusoidal_contour(10.0, 0.0, 1.0, 0.01),
            Err(Error::ParamOutOfRange { name: "alpha", .. })
        ));
        assert!(sinusoidal_contour(2.0, 2.0, 1.0, 0.01).is_err());
        assert!(complicated_contour(1.0, 4.0, 0.0, 0.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn bounds_hold_for_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (lo, hi) = F0_RANGE_HZ;
        for _ in 0..10_000 {
            let sine = ContourParams::Sinusoidal {
                alpha: rng.random_range(ALPHA_RANGE.0..=ALPHA_RANGE.1),
                phi: rng.random_range(PHASE_RANGE.0..=PHASE_RANGE.1),
            };
            let comp = ContourParams::Complicated {
                alpha1: rng.random_range(ALPHA12_RANGE.0..=ALPHA12_RANGE.1),
                beta1: rng.random_range(PHASE_RANGE.0..=PHASE_RANGE.1),
                alpha2: rng.random_range(ALPHA12_RANGE.0..=ALPHA12_RANGE.1),
                beta2: rng.random_range(PHASE_RANGE.0..=PHASE_RANGE.1),
            };
            for p in [sine, comp] {
                for i in 0..50 {
                    let f = p.f0_at(i as f64 * 0.1);
                    assert!(f >= lo - 1e-9 && f <= hi + 1e-9, "{p:?} -> {f}");
                }
            }
        }
    }

    #[test]
    fn mechanism_parses() {
        assert_eq!("sinusoidal".parse::<Mechanism>().unwrap(), Mechanism::Sinusoidal);
        assert_eq!("Complicated".parse::<Mechanism>().unwrap(), Mechanism::Complicated);
        assert!("vibrato".parse::<Mechanism>().is_err());
    }
}
