use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use teleport_core::channels::DurationConfig;
use teleport_core::protocols::{GeneralizedBellTypeState, TwoQubitState};

pub const DEFAULT_SHOTS: u64 = 8192;

/// Coefficient norms further than this from 1 are rejected.
const NORM_REJECT: f64 = 1e-6;
/// Coefficient norms further than this from 1 are renormalized with a warning.
const NORM_WARN: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    TwoBell,
    Cluster5,
    GeneralTwoQubit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Noise {
    None,
    Calibration(PathBuf),
}

/// `α|x⟩ + β|x̄⟩`, with `x` given as a bit pattern (default all zeros).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputState {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    #[serde(default)]
    pub x: usize,
}

impl InputState {
    pub fn plus() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self { alpha: [h, 0.0], beta: [h, 0.0], x: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    /// Qubits in the first input; the second has `m + 1`.
    pub m: usize,
    pub chi_a: InputState,
    pub chi_b: InputState,
    /// Amplitudes of `|00⟩, |01⟩, |10⟩, |11⟩` for `general_two_qubit`.
    pub state: [[f64; 2]; 4],
    pub shots: u64,
    pub seed: u64,
    pub noise: Noise,
    pub durations: DurationConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let half = [0.5, 0.0];
        Self {
            scheme: Scheme::TwoBell,
            m: 1,
            chi_a: InputState::plus(),
            chi_b: InputState::plus(),
            state: [half; 4],
            shots: DEFAULT_SHOTS,
            seed: 0,
            noise: Noise::None,
            durations: DurationConfig::default(),
        }
    }
}

fn complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Applies the norm policy to a coefficient list.
fn normalized(coeffs: &[Complex64], what: &str) -> Result<Vec<Complex64>> {
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let dev = (norm - 1.0).abs();
    if dev > NORM_REJECT {
        bail!("{what} coefficients have norm² {norm}, not 1 within {NORM_REJECT:e}");
    }
    if dev > NORM_WARN {
        log::warn!("{what} coefficients have norm² {norm}; renormalizing");
    }
    let s = norm.sqrt();
    Ok(coeffs.iter().map(|c| c / s).collect())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Self = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            bail!("shots must be at least 1");
        }
        if self.m == 0 {
            bail!("m must be at least 1");
        }
        if self.scheme == Scheme::Cluster5 && self.m != 1 {
            bail!("the cluster5 scheme is defined for m = 1 only");
        }
        self.durations.validate()?;
        Ok(())
    }

    fn input(&self, s: &InputState, n: usize, what: &str) -> Result<GeneralizedBellTypeState> {
        let c = normalized(&[complex(s.alpha), complex(s.beta)], what)?;
        Ok(GeneralizedBellTypeState::new(n, s.x, c[0], c[1])?)
    }

    pub fn chi_a(&self) -> Result<GeneralizedBellTypeState> {
        self.input(&self.chi_a, self.m, "chi_a")
    }

    pub fn chi_b(&self) -> Result<GeneralizedBellTypeState> {
        self.input(&self.chi_b, self.m + 1, "chi_b")
    }

    pub fn two_qubit_state(&self) -> Result<TwoQubitState> {
        let c = normalized(&self.state.map(complex), "state")?;
        Ok(TwoQubitState::new(c[0], c[1], c[2], c[3])?)
    }
}
