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

//! Stabilizer fidelity, the two-setting witness, local measurement settings
//! and Poissonian error bars.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph_state::{stabilizer_generator, stabilizer_group, Graph};
use crate::mbqc_engine::shot_rng;
use crate::noise::{apply_noise_trajectory, NoiseSpec};
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Real;
use crate::statevector::{Gate, StateVector};

/// The seventeen local settings that cover the five-qubit cluster group.
pub const FIDELITY_SETTINGS: [&str; 17] = [
    "XZZXZ", "XZZYY", "YXXXY", "YXXYZ", "YYZZX", "ZXZZX", "ZYXXY", "ZYXYZ", "XZXZX", "XZYXY",
    "XZYYZ", "YXYZX", "YYIXZ", "YYIYY", "ZXIXZ", "ZXIYY", "ZYYZX",
];

/// Settings read by the witness: odd then even generators.
pub const WITNESS_SETTINGS: [&str; 2] = ["XZXZX", "ZXZXZ"];

/// Error bars below zero required to call entanglement detected.
pub const DEFAULT_DETECTION_SIGMAS: f64 = 1.0;

/// One local Pauli basis per qubit. `I` marks a qubit that is not read.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MeasurementSetting(Vec<Pauli>);

impl MeasurementSetting {
    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `term` can be estimated from this setting's outcomes.
    pub fn measures(&self, term: &PauliString) -> bool {
        term.len() == self.len()
            && term
                .letters()
                .iter()
                .zip(&self.0)
                .all(|(&t, &s)| t == Pauli::I || t == s)
    }
}

pub fn compatible(term: &PauliString, setting: &MeasurementSetting) -> bool {
    setting.measures(term)
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|p| write!(f, "{}", p.as_char()))
    }
}

impl FromStr for MeasurementSetting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .filter(|v| !v.is_empty())
            .map(MeasurementSetting)
            .ok_or_else(|| Error::Parse {
                kind: "measurement setting",
                input: s.to_string(),
            })
    }
}

impl Serialize for MeasurementSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn fidelity_settings() -> Vec<MeasurementSetting> {
    FIDELITY_SETTINGS
        .iter()
        .map(|s| s.parse().expect("valid setting"))
        .collect()
}

pub fn witness_settings() -> Vec<MeasurementSetting> {
    WITNESS_SETTINGS
        .iter()
        .map(|s| s.parse().expect("valid setting"))
        .collect()
}

/// Assignment of terms to settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cover {
    /// Each term with the index of the first setting that measures it.
    Complete(BTreeMap<PauliString, usize>),
    Uncovered(Vec<PauliString>),
}

impl Cover {
    pub fn is_complete(&self) -> bool {
        matches!(self, Cover::Complete(_))
    }
}

pub fn settings_cover(terms: &[PauliString], settings: &[MeasurementSetting]) -> Cover {
    let mut assignment = BTreeMap::new();
    let mut uncovered = Vec::new();
    for t in terms {
        match settings.iter().position(|s| s.measures(t)) {
            Some(k) => {
                assignment.insert(t.clone(), k);
            }
            None => uncovered.push(t.clone()),
        }
    }
    if uncovered.is_empty() {
        Cover::Complete(assignment)
    } else {
        Cover::Uncovered(uncovered)
    }
}

fn check_graph<T: Real>(state: &StateVector<T>, g: &Graph) -> Result<()> {
    if state.num_qubits() != g.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: g.num_vertices(),
            got: state.num_qubits(),
        });
    }
    Ok(())
}

/// `2^{-n} Σ_{S ∈ group} ⟨S⟩`, the fidelity with the cluster state of `g`.
pub fn stabilizer_fidelity<T: Real>(state: &StateVector<T>, g: &Graph) -> Result<T> {
    check_graph(state, g)?;
    let group = stabilizer_group(g)?;
    let sum = group
        .iter()
        .map(|p| state.pauli_expectation(p))
        .sum::<Result<T>>()?;
    Ok(sum / T::lit(group.len() as f64))
}

/// Expansion of a product of `(I + K_v)/2` over `vertices` as weighted
/// Pauli terms.
fn projector_terms(g: &Graph, vertices: &[usize]) -> Result<Vec<(f64, PauliString)>> {
    let gens = vertices
        .iter()
        .map(|&v| stabilizer_generator(g, v))
        .collect::<Result<Vec<_>>>()?;
    let weight = 0.5f64.powi(gens.len() as i32);
    (0..1usize << gens.len())
        .map(|mask| {
            gens.iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .try_fold(PauliString::identity(g.num_vertices()), |acc, (_, k)| {
                    acc.mul(k)
                })
                .map(|p| (weight, p))
        })
        .collect()
}

/// `W_2 = 3 I − 2 (P_odd + P_even)` on the five-qubit linear cluster as
/// `(coefficient, term)` pairs with like terms merged; the identity comes
/// first.
pub fn witness_terms() -> Result<Vec<(f64, PauliString)>> {
    let g = crate::graph_state::canonical_graph(crate::graph_state::ResourceId::LinearCluster5)?;
    let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
    merged.insert(PauliString::identity(5), 3.0);
    for set in [&[1, 3, 5][..], &[2, 4][..]] {
        for (w, p) in projector_terms(&g, set)? {
            *merged.entry(p).or_default() -= 2.0 * w;
        }
    }
    let id = PauliString::identity(5);
    let mut terms = vec![(merged.remove(&id).unwrap_or(0.0), id)];
    terms.extend(merged.into_iter().map(|(p, c)| (c, p)));
    Ok(terms)
}

fn check_five<T: Real>(state: &StateVector<T>) -> Result<()> {
    if state.num_qubits() != 5 {
        return Err(Error::LengthMismatch {
            expected: 5,
            got: state.num_qubits(),
        });
    }
    Ok(())
}

/// Exact `⟨W_2⟩`; negative values certify genuine multipartite entanglement.
pub fn witness_value<T: Real>(state: &StateVector<T>) -> Result<T> {
    check_five(state)?;
    witness_terms()?
        .iter()
        .map(|(c, p)| Ok(state.pauli_expectation(p)? * T::lit(*c)))
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub value: f64,
    pub error: f64,
    pub detects_gme: bool,
}

impl WitnessReport {
    pub fn new(value: f64, error: f64, sigmas: f64) -> Self {
        Self {
            value,
            error,
            detects_gme: value + sigmas * error < 0.0,
        }
    }
}

/// Exact witness of a five-qubit state, with zero error.
pub fn witness_two_setting<T: Real>(state: &StateVector<T>) -> Result<WitnessReport> {
    let value = witness_value(state)?.as_f64();
    Ok(WitnessReport::new(value, 0.0, DEFAULT_DETECTION_SIGMAS))
}

/// Outcome histogram of one setting; `counts[k]` counts the bit pattern `k`,
/// qubit 1 most significant, `0` meaning the `+1` eigenvalue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SettingCounts {
    pub setting: MeasurementSetting,
    pub counts: Vec<u64>,
}

impl SettingCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Parity estimate of `term`; `None` without any counts.
    pub fn expectation(&self, term: &PauliString) -> Option<f64> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        let n = self.setting.len();
        let mask = term
            .letters()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .fold(0usize, |m, (q, _)| m | 1 << (n - 1 - q));
        let signed: i64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                if (k & mask).count_ones() % 2 == 0 {
                    c as i64
                } else {
                    -(c as i64)
                }
            })
            .sum();
        Some(term.sign() as f64 * signed as f64 / total as f64)
    }
}

/// Rotates a copy of `state` so that a computational readout measures
/// `setting`: `H` for X, `Rz(-π/2)` then `H` for Y.
pub fn rotate_to_setting<T: Real>(
    state: &StateVector<T>,
    setting: &MeasurementSetting,
) -> Result<StateVector<T>> {
    if setting.len() != state.num_qubits() {
        return Err(Error::LengthMismatch {
            expected: state.num_qubits(),
            got: setting.len(),
        });
    }
    let mut rotated = state.clone();
    for (q, &p) in setting.letters().iter().enumerate() {
        match p {
            Pauli::X => rotated.apply_gate(Gate::H, &[q])?,
            Pauli::Y => {
                rotated.apply_gate(Gate::Rz(-FRAC_PI_2), &[q])?;
                rotated.apply_gate(Gate::H, &[q])?;
            }
            Pauli::I | Pauli::Z => {}
        }
    }
    Ok(rotated)
}

fn outcome_distribution<T: Real>(
    state: &StateVector<T>,
    setting: &MeasurementSetting,
) -> Result<Vec<f64>> {
    Ok(rotate_to_setting(state, setting)?
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr().as_f64())
        .collect())
}

/// Simulated counts, `shots` per setting. Setting `k` uses the stream
/// `shot_rng(seed, k)`. With noise, every shot measures its own trajectory.
pub fn simulate_counts<T: Real>(
    state: &StateVector<T>,
    settings: &[MeasurementSetting],
    shots: u64,
    seed: u64,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<SettingCounts>> {
    settings
        .par_iter()
        .enumerate()
        .map(|(k, setting)| {
            let mut rng = shot_rng(seed, k as u64);
            let mut counts = vec![0u64; 1 << state.num_qubits()];
            match noise {
                None if shots > 0 => {
                    let dist = WeightedIndex::new(outcome_distribution(state, setting)?)
                        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
                    for _ in 0..shots {
                        counts[dist.sample(&mut rng)] += 1;
                    }
                }
                None => {}
                Some(spec) => {
                    for _ in 0..shots {
                        let mut noisy = state.clone();
                        apply_noise_trajectory(&mut noisy, spec, &mut rng)?;
                        counts[rotate_to_setting(&noisy, setting)?.sample_index(&mut rng)] += 1;
                    }
                }
            }
            Ok(SettingCounts {
                setting: setting.clone(),
                counts,
            })
        })
        .collect()
}

/// Fidelity estimate `2^{-n}(1 + Σ ⟨S⟩)` with each group element read from
/// the first setting that measures it. `None` when a needed setting has no
/// counts.
pub fn fidelity_from_counts(counts: &[SettingCounts], g: &Graph) -> Result<Option<f64>> {
    let group = stabilizer_group(g)?;
    let settings: Vec<MeasurementSetting> = counts.iter().map(|c| c.setting.clone()).collect();
    let terms: Vec<PauliString> = group.iter().filter(|p| !p.is_identity()).cloned().collect();
    let Cover::Complete(assignment) = settings_cover(&terms, &settings) else {
        return Err(Error::InvalidArgument(
            "settings do not cover the stabilizer group".into(),
        ));
    };
    let mut sum = 1.0;
    for (term, k) in &assignment {
        match counts[*k].expectation(term) {
            Some(e) => sum += e,
            None => return Ok(None),
        }
    }
    Ok(Some(sum / group.len() as f64))
}

/// Witness estimate from counts that include both witness settings.
pub fn witness_from_counts(counts: &[SettingCounts]) -> Result<Option<f64>> {
    let settings: Vec<MeasurementSetting> = counts.iter().map(|c| c.setting.clone()).collect();
    let terms = witness_terms()?;
    let nontrivial: Vec<PauliString> = terms.iter().skip(1).map(|(_, p)| p.clone()).collect();
    let Cover::Complete(assignment) = settings_cover(&nontrivial, &settings) else {
        return Err(Error::InvalidArgument(
            "settings do not cover the witness".into(),
        ));
    };
    let mut value = terms[0].0;
    for (c, p) in terms.iter().skip(1) {
        match counts[assignment[p]].expectation(p) {
            Some(e) => value += c * e,
            None => return Ok(None),
        }
    }
    Ok(Some(value))
}

/// Spread of a derived quantity over Poisson-resampled counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Resampled {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// Some resample had a setting without counts.
    pub degenerate: bool,
}

/// Redraws each cell as Poisson(count) (empty cells stay empty) and
/// evaluates `quantity` on every resample. Resample `k` uses
/// `shot_rng(seed, k)`.
pub fn poisson_resample<F>(
    counts: &[SettingCounts],
    resamples: usize,
    seed: u64,
    quantity: F,
) -> Result<Resampled>
where
    F: Fn(&[SettingCounts]) -> Result<Option<f64>> + Sync,
{
    let draws = (0..resamples)
        .into_par_iter()
        .map(|k| {
            let mut rng = shot_rng(seed, k as u64);
            let redrawn: Vec<SettingCounts> = counts
                .iter()
                .map(|c| SettingCounts {
                    setting: c.setting.clone(),
                    counts: c.counts.iter().map(|&n| poisson(n, &mut rng)).collect(),
                })
                .collect();
            quantity(&redrawn)
        })
        .collect::<Result<Vec<_>>>()?;
    let degenerate = draws.iter().any(Option::is_none);
    let values: Vec<f64> = draws.into_iter().flatten().collect();
    let len = values.len() as f64;
    let mean = if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / len
    };
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0)).sqrt()
    } else {
        f64::NAN
    };
    Ok(Resampled {
        values,
        mean,
        std,
        degenerate,
    })
}

fn poisson<R: Rng + ?Sized>(mean: u64, rng: &mut R) -> u64 {
    if mean == 0 {
        return 0;
    }
    let d = Poisson::new(mean as f64).expect("positive Poisson mean");
    d.sample(rng) as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ValueWithError {
    pub value: Option<f64>,
    pub error: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessEstimate {
    pub value: Option<f64>,
    pub error: Option<f64>,
    pub detects_gme: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TomographyReport {
    pub fidelity: ValueWithError,
    pub witness: WitnessEstimate,
    pub settings: Vec<MeasurementSetting>,
    pub shots: u64,
    pub seed: u64,
    pub degenerate: bool,
}

/// Parameters of [`tomography_report`].
#[derive(Clone, Debug, PartialEq)]
pub struct TomographyConfig {
    pub shots: u64,
    pub seed: u64,
    pub resamples: usize,
    pub sigmas: f64,
    pub noise: Option<NoiseSpec>,
}

impl Default for TomographyConfig {
    fn default() -> Self {
        Self {
            shots: 10_000,
            seed: 0,
            resamples: 200,
            sigmas: DEFAULT_DETECTION_SIGMAS,
            noise: None,
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Simulated fidelity and witness estimates of a five-qubit linear-cluster
/// preparation, with Poisson error bars.
pub fn tomography_report<T: Real>(
    state: &StateVector<T>,
    g: &Graph,
    cfg: &TomographyConfig,
) -> Result<TomographyReport> {
    check_graph(state, g)?;
    check_five(state)?;
    let mut settings = fidelity_settings();
    for w in witness_settings() {
        if !settings.contains(&w) {
            settings.push(w);
        }
    }
    let counts = simulate_counts(state, &settings, cfg.shots, cfg.seed, cfg.noise.as_ref())?;
    let fidelity = fidelity_from_counts(&counts, g)?;
    let witness = witness_from_counts(&counts)?;
    let resample_seed = cfg.seed ^ 0x5eed_5eed_5eed_5eed;
    let f_err = poisson_resample(&counts, cfg.resamples, resample_seed, |c| {
        fidelity_from_counts(c, g)
    })?;
    let w_err = poisson_resample(&counts, cfg.resamples, resample_seed, witness_from_counts)?;
    let w_error = finite(w_err.std);
    let detects_gme = match (witness, w_error) {
        (Some(v), Some(e)) => v + cfg.sigmas * e < 0.0,
        _ => false,
    };
    Ok(TomographyReport {
        fidelity: ValueWithError {
            value: fidelity,
            error: finite(f_err.std),
        },
        witness: WitnessEstimate {
            value: witness,
            error: w_error,
            detects_gme,
        },
        settings,
        shots: cfg.shots,
        seed: cfg.seed,
        degenerate: fidelity.is_none() || witness.is_none() || f_err.degenerate || w_err.degenerate,
    })
}
