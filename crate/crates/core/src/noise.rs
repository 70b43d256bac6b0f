// Copyright 2026 The simon-mbqc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Stochastic Pauli noise applied to a prepared resource.
//!
//! Each trajectory is a pure state; averages over trajectories reproduce the
//! corresponding mixed-state channel.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mbqc_engine::shot_rng;
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Real;
use crate::statevector::StateVector;

/// Tolerance band of [`calibrate_to_fidelity`].
pub const CALIBRATION_TOLERANCE: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    /// `ρ = p|ψ⟩⟨ψ| + (1 − p) I/2^n`.
    WhiteNoise { p: f64 },
    /// Each qubit independently suffers a uniformly random X, Y or Z with
    /// probability `q`.
    PerQubitDepolarizing { q: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    WhiteNoise,
    PerQubitDepolarizing,
}

impl NoiseKind {
    pub fn with_parameter(self, x: f64) -> NoiseSpec {
        match self {
            NoiseKind::WhiteNoise => NoiseSpec::WhiteNoise { p: x },
            NoiseKind::PerQubitDepolarizing => NoiseSpec::PerQubitDepolarizing { q: x },
        }
    }

    /// Parameter interval searched by calibration, listed from noiseless to
    /// fully mixing.
    fn range(self) -> (f64, f64) {
        match self {
            NoiseKind::WhiteNoise => (1.0, 0.0),
            NoiseKind::PerQubitDepolarizing => (0.0, 0.75),
        }
    }
}

impl NoiseSpec {
    pub fn kind(&self) -> NoiseKind {
        match self {
            NoiseSpec::WhiteNoise { .. } => NoiseKind::WhiteNoise,
            NoiseSpec::PerQubitDepolarizing { .. } => NoiseKind::PerQubitDepolarizing,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            NoiseSpec::WhiteNoise { p } => p,
            NoiseSpec::PerQubitDepolarizing { q } => q,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let x = self.parameter();
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidNoise(format!("parameter {x} outside [0, 1]")));
        }
        Ok(())
    }
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseSpec::WhiteNoise { p } => write!(f, "white:{p}"),
            NoiseSpec::PerQubitDepolarizing { q } => write!(f, "depolarizing:{q}"),
        }
    }
}

/// Parses `white:P` or `depolarizing:Q`.
impl FromStr for NoiseSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let err = || Error::Parse {
            kind: "noise spec",
            input: s.to_string(),
        };
        let (kind, value) = s.split_once(':').ok_or_else(err)?;
        let x: f64 = value.parse().map_err(|_| err())?;
        let spec = match kind {
            "white" => NoiseSpec::WhiteNoise { p: x },
            "depolarizing" => NoiseSpec::PerQubitDepolarizing { q: x },
            _ => return Err(err()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Applies one random trajectory of the channel. Every random number is
/// drawn whatever the outcome, so trajectories built from the same stream
/// are nested as the parameter varies.
pub fn apply_noise_trajectory<T: Real, R: Rng + ?Sized>(
    state: &mut StateVector<T>,
    spec: &NoiseSpec,
    rng: &mut R,
) -> Result<()> {
    spec.validate()?;
    let n = state.num_qubits();
    let pauli = match *spec {
        NoiseSpec::WhiteNoise { p } => {
            let u: f64 = rng.random();
            let letters: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect();
            if u >= p {
                PauliString::new(false, letters)
            } else {
                return Ok(());
            }
        }
        NoiseSpec::PerQubitDepolarizing { q } => {
            let letters = (0..n)
                .map(|_| {
                    let u: f64 = rng.random();
                    let letter = Pauli::ALL[rng.random_range(1..4)];
                    if u < q {
                        letter
                    } else {
                        Pauli::I
                    }
                })
                .collect();
            PauliString::new(false, letters)
        }
    };
    state.apply_pauli_string(&pauli)
}

/// Mean of a Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn from_samples(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::UndefinedMean);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Ok(Self {
            mean,
            std_error: (var / n).sqrt(),
        })
    }
}

/// Average of `f` over `trials` noisy copies of `state`. Trajectory `k` uses
/// `shot_rng(seed, k)`.
pub fn ensemble_average<T, F>(
    state: &StateVector<T>,
    spec: &NoiseSpec,
    trials: usize,
    seed: u64,
    f: F,
) -> Result<Estimate>
where
    T: Real,
    F: Fn(&StateVector<T>) -> Result<f64> + Sync,
{
    let values = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut noisy = state.clone();
            apply_noise_trajectory(&mut noisy, spec, &mut shot_rng(seed, k as u64))?;
            f(&noisy)
        })
        .collect::<Result<Vec<_>>>()?;
    Estimate::from_samples(&values)
}

/// Mean fidelity `|⟨ideal|ψ_k⟩|²` of noisy copies of `ideal`.
pub fn ensemble_fidelity<T: Real>(
    ideal: &StateVector<T>,
    spec: &NoiseSpec,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    ensemble_average(ideal, spec, trials, seed, |s| {
        Ok(ideal.overlap(s)?.as_f64())
    })
}

/// White-noise mixing `p` giving fidelity `target` on `n` qubits.
pub fn white_noise_closed_form(target: f64, n: usize) -> Result<f64> {
    let floor = 0.5f64.powi(n as i32);
    if !(floor < target && target <= 1.0) {
        return Err(Error::UnreachableFidelity { target, floor });
    }
    Ok((target - floor) / (1.0 - floor))
}

/// Bisects the noise parameter for the ensemble fidelity of `ideal` to hit
/// `target`, accepting a result within [`CALIBRATION_TOLERANCE`]. The same
/// trajectories are reused at every probe.
pub fn calibrate_to_fidelity<T: Real>(
    ideal: &StateVector<T>,
    target: f64,
    kind: NoiseKind,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let floor = 0.5f64.powi(ideal.num_qubits() as i32);
    if !(floor < target && target <= 1.0) {
        return Err(Error::UnreachableFidelity { target, floor });
    }
    if trials == 0 {
        return Err(Error::UndefinedMean);
    }
    let fidelity = |x: f64| -> Result<f64> {
        Ok(ensemble_fidelity(ideal, &kind.with_parameter(x), trials, seed)?.mean)
    };
    let (mut clean, mut mixed) = kind.range();
    if fidelity(clean)? - target <= CALIBRATION_TOLERANCE {
        return Ok(clean);
    }
    for _ in 0..50 {
        let mid = 0.5 * (clean + mixed);
        if fidelity(mid)? > target {
            clean = mid;
        } else {
            mixed = mid;
        }
    }
    let mid = 0.5 * (clean + mixed);
    if (fidelity(mid)? - target).abs() <= CALIBRATION_TOLERANCE {
        Ok(mid)
    } else {
        Err(Error::UnreachableFidelity { target, floor })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_state::{canonical_resource, ResourceId};

    fn cluster() -> StateVector<f64> {
        canonical_resource(ResourceId::LinearCluster5).unwrap().1
    }

    #[test]
    fn parses_specs() {
        assert_eq!(
            "white:0.5".parse::<NoiseSpec>().unwrap(),
            NoiseSpec::WhiteNoise { p: 0.5 }
        );
        assert_eq!(
            "depolarizing:0.1".parse::<NoiseSpec>().unwrap(),
            NoiseSpec::PerQubitDepolarizing { q: 0.1 }
        );
        assert!("white:1.5".parse::<NoiseSpec>().is_err());
        assert!("pink:0.1".parse::<NoiseSpec>().is_err());
        assert!("white".parse::<NoiseSpec>().is_err());
    }

    #[test]
    fn noiseless_limit_leaves_state_alone() {
        let s = cluster();
        for seed in 0..20 {
            let mut t = s.clone();
            apply_noise_trajectory(
                &mut t,
                &NoiseSpec::WhiteNoise { p: 1.0 },
                &mut shot_rng(seed, 0),
            )
            .unwrap();
            assert_eq!(t, s);
            let mut d = s.clone();
            apply_noise_trajectory(
                &mut d,
                &NoiseSpec::PerQubitDepolarizing { q: 0.0 },
                &mut shot_rng(seed, 0),
            )
            .unwrap();
            assert_eq!(d, s);
        }
    }

    #[test]
    fn fully_mixed_fidelity_is_one_over_dimension() {
        let est =
            ensemble_fidelity(&cluster(), &NoiseSpec::WhiteNoise { p: 0.0 }, 20_000, 4).unwrap();
        assert!(
            (est.mean - 1.0 / 32.0).abs() < 5.0 * est.std_error,
            "{est:?}"
        );
    }

    #[test]
    fn closed_form() {
        assert_eq!(white_noise_closed_form(1.0, 5).unwrap(), 1.0);
        assert!(
            (white_noise_closed_form(0.70, 5).unwrap() - (0.70 - 1.0 / 32.0) / (31.0 / 32.0)).abs()
                < 1e-15
        );
        assert!(matches!(
            white_noise_closed_form(0.02, 5),
            Err(Error::UnreachableFidelity { .. })
        ));
    }

    #[test]
    fn calibration_edges() {
        let s = cluster();
        assert_eq!(
            calibrate_to_fidelity(&s, 1.0, NoiseKind::WhiteNoise, 100, 1).unwrap(),
            1.0
        );
        assert!(calibrate_to_fidelity(&s, 0.02, NoiseKind::WhiteNoise, 100, 1).is_err());
        let q = calibrate_to_fidelity(&s, 0.7, NoiseKind::PerQubitDepolarizing, 4000, 2).unwrap();
        let f = ensemble_fidelity(&s, &NoiseSpec::PerQubitDepolarizing { q }, 4000, 2).unwrap();
        assert!((f.mean - 0.7).abs() <= CALIBRATION_TOLERANCE);
    }

    #[test]
    fn estimate_needs_samples() {
        assert!(matches!(
            Estimate::from_samples(&[]),
            Err(Error::UndefinedMean)
        ));
        let e = Estimate::from_samples(&[1.0, 3.0]).unwrap();
        assert_eq!(e.mean, 2.0);
    }
}
