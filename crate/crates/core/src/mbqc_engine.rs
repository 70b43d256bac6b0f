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

//! Adaptive measurement patterns and their execution.
//!
//! A run has three stages. The oracle measures the bridge qubits listed in
//! [`Pattern::steps`] in ascending vertex order; measured qubits are
//! contracted out of the register. Feed-forward rules then act as explicit
//! unitaries on the surviving qubits. Finally the output (query) and ancilla
//! qubits are read out in the computational basis.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph_state::{canonical_graph, ResourceId, Vertex};
use crate::noise::{apply_noise_trajectory, NoiseSpec};
use crate::scalar::Real;
use crate::statevector::{Gate, MeasurementBasis, StateVector, MIN_FORCED_PROBABILITY};

/// Most oracle qubits [`enumerate_branches`] will expand.
pub const MAX_BRANCH_QUBITS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub qubit: Vertex,
    pub basis: MeasurementBasis,
}

impl Step {
    pub fn computational(qubit: Vertex) -> Self {
        Self {
            qubit,
            basis: MeasurementBasis::Computational,
        }
    }

    pub fn equatorial(qubit: Vertex, alpha: f64) -> Self {
        Self {
            qubit,
            basis: MeasurementBasis::Equatorial { alpha },
        }
    }
}

/// Shape of a feed-forward correction. With `p` the parity of the source
/// outcomes, the gate sequences (first gate applied first) are
///
/// | form | sequence |
/// |---|---|
/// | `Chi` | `Rz(-π/2), H, X^p` |
/// | `ChiTilde` | `Rz(-π), H, X^p` |
/// | `Zeta` | `H, X^p` |
/// | `Phase { k }` | `Rz(-kπ/2), H, X^p` |
/// | `Hadamard` | `H` |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeedForwardForm {
    Chi,
    ChiTilde,
    Zeta,
    Hadamard,
    Phase { quarter_turns: u8 },
}

impl FeedForwardForm {
    /// Canonical form for `Rz(-kπ/2)` before the Hadamard.
    pub fn from_quarter_turns(k: u8) -> Self {
        match k {
            0 => FeedForwardForm::Zeta,
            1 => FeedForwardForm::Chi,
            2 => FeedForwardForm::ChiTilde,
            quarter_turns => FeedForwardForm::Phase { quarter_turns },
        }
    }

    pub fn quarter_turns(self) -> Option<u8> {
        match self {
            FeedForwardForm::Zeta => Some(0),
            FeedForwardForm::Chi => Some(1),
            FeedForwardForm::ChiTilde => Some(2),
            FeedForwardForm::Phase { quarter_turns } => Some(quarter_turns),
            FeedForwardForm::Hadamard => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            FeedForwardForm::Chi => "chi",
            FeedForwardForm::ChiTilde => "chi_tilde",
            FeedForwardForm::Zeta => "zeta",
            FeedForwardForm::Hadamard => "hadamard",
            FeedForwardForm::Phase { .. } => "phase",
        }
    }
}

/// Correction on `target` whose Pauli part is `X^{⊕ s_v}` over `sources`.
/// Source 0 stands for the constant outcome `s_0 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr", into = "RuleRepr")]
pub struct FeedForwardRule {
    pub target: Vertex,
    pub form: FeedForwardForm,
    pub sources: Vec<Vertex>,
}

impl FeedForwardRule {
    pub fn new(target: Vertex, form: FeedForwardForm, sources: Vec<Vertex>) -> Self {
        Self {
            target,
            form,
            sources,
        }
    }

    pub fn chi(target: Vertex, i: Vertex, j: Vertex) -> Self {
        Self::new(target, FeedForwardForm::Chi, vec![i, j])
    }

    pub fn chi_tilde(target: Vertex, i: Vertex, j: Vertex) -> Self {
        Self::new(target, FeedForwardForm::ChiTilde, vec![i, j])
    }

    pub fn zeta(target: Vertex, i: Vertex, j: Vertex) -> Self {
        Self::new(target, FeedForwardForm::Zeta, vec![i, j])
    }

    pub fn hadamard(target: Vertex) -> Self {
        Self::new(target, FeedForwardForm::Hadamard, vec![])
    }

    /// Measured vertices the rule reads, without the constant source 0.
    pub fn dependencies(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.sources.iter().copied().filter(|&v| v != 0)
    }

    pub fn parity(&self, outcomes: &BTreeMap<Vertex, u8>) -> Result<u8> {
        self.dependencies().try_fold(0u8, |acc, v| {
            outcomes
                .get(&v)
                .map(|&s| acc ^ (s & 1))
                .ok_or(Error::MissingOutcome(v))
        })
    }

    pub fn gates(&self, outcomes: &BTreeMap<Vertex, u8>) -> Result<Vec<Gate>> {
        let Some(k) = self.form.quarter_turns() else {
            return Ok(vec![Gate::H]);
        };
        let mut gates = Vec::with_capacity(3);
        if k % 4 != 0 {
            gates.push(Gate::Rz(-(k as f64) * FRAC_PI_2));
        }
        gates.push(Gate::H);
        if self.parity(outcomes)? == 1 {
            gates.push(Gate::X);
        }
        Ok(gates)
    }
}

#[derive(Serialize, Deserialize)]
struct RuleRepr {
    target: Vertex,
    form: String,
    i: Vertex,
    j: Vertex,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    extra: Vec<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quarter_turns: Option<u8>,
}

impl From<FeedForwardRule> for RuleRepr {
    fn from(rule: FeedForwardRule) -> Self {
        let mut sources = rule.sources.into_iter();
        let i = sources.next().unwrap_or(0);
        let j = sources.next().unwrap_or(0);
        let quarter_turns = match rule.form {
            FeedForwardForm::Phase { quarter_turns } => Some(quarter_turns),
            _ => None,
        };
        RuleRepr {
            target: rule.target,
            form: rule.form.name().to_string(),
            i,
            j,
            extra: sources.collect(),
            quarter_turns,
        }
    }
}

impl TryFrom<RuleRepr> for FeedForwardRule {
    type Error = Error;

    fn try_from(r: RuleRepr) -> Result<Self> {
        let form = match (r.form.as_str(), r.quarter_turns) {
            ("chi", None) => FeedForwardForm::Chi,
            ("chi_tilde", None) => FeedForwardForm::ChiTilde,
            ("zeta", None) => FeedForwardForm::Zeta,
            ("hadamard", None) => FeedForwardForm::Hadamard,
            ("phase", Some(quarter_turns)) => FeedForwardForm::Phase { quarter_turns },
            _ => {
                return Err(Error::Parse {
                    kind: "feed-forward form",
                    input: r.form,
                })
            }
        };
        let sources = if form == FeedForwardForm::Hadamard && r.i == 0 && r.j == 0 {
            r.extra
        } else {
            [r.i, r.j].into_iter().chain(r.extra).collect()
        };
        Ok(FeedForwardRule::new(r.target, form, sources))
    }
}

/// Concrete gate sequences, in rule order.
pub fn resolve_feedforward(
    rules: &[FeedForwardRule],
    outcomes: &BTreeMap<Vertex, u8>,
) -> Result<Vec<(Vertex, Vec<Gate>)>> {
    rules
        .iter()
        .map(|r| Ok((r.target, r.gates(outcomes)?)))
        .collect()
}

/// A validated measurement program on a canonical resource.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct Pattern {
    resource: ResourceId,
    num_vertices: usize,
    steps: Vec<Step>,
    rules: Vec<FeedForwardRule>,
    outputs: Vec<Vertex>,
    ancillas: Vec<Vertex>,
    flips: BitString,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    resource: ResourceId,
    steps: Vec<Step>,
    rules: Vec<FeedForwardRule>,
    outputs: Vec<Vertex>,
    ancillas: Vec<Vertex>,
    flips: BitString,
}

impl From<Pattern> for PatternRepr {
    fn from(p: Pattern) -> Self {
        PatternRepr {
            resource: p.resource,
            steps: p.steps,
            rules: p.rules,
            outputs: p.outputs,
            ancillas: p.ancillas,
            flips: p.flips,
        }
    }
}

impl TryFrom<PatternRepr> for Pattern {
    type Error = Error;

    fn try_from(r: PatternRepr) -> Result<Self> {
        Pattern::new(r.resource, r.steps, r.rules, r.outputs, r.ancillas, r.flips)
    }
}

impl Pattern {
    /// Validates the program against its resource. Steps are sorted by
    /// vertex; `flips` relabels the ancilla readout and has one bit per
    /// ancilla.
    pub fn new(
        resource: ResourceId,
        mut steps: Vec<Step>,
        rules: Vec<FeedForwardRule>,
        outputs: Vec<Vertex>,
        ancillas: Vec<Vertex>,
        flips: BitString,
    ) -> Result<Self> {
        let num_vertices = canonical_graph(resource)?.num_vertices();
        let bad = |msg: String| Err(Error::MalformedPattern(msg));
        let in_range = |v: Vertex| (1..=num_vertices).contains(&v);

        steps.sort_by_key(|s| s.qubit);
        let mut measured = BTreeSet::new();
        for s in &steps {
            if !in_range(s.qubit) {
                return bad(format!("step on vertex {} outside the resource", s.qubit));
            }
            if !measured.insert(s.qubit) {
                return bad(format!("vertex {} measured twice", s.qubit));
            }
        }
        if outputs.is_empty() {
            return bad("no output qubits".into());
        }
        let mut readout = BTreeSet::new();
        for &v in outputs.iter().chain(&ancillas) {
            if !in_range(v) {
                return bad(format!("readout vertex {v} outside the resource"));
            }
            if measured.contains(&v) || !readout.insert(v) {
                return bad(format!("vertex {v} measured twice"));
            }
        }
        let mut targets = BTreeSet::new();
        for r in &rules {
            if !in_range(r.target) || measured.contains(&r.target) {
                return bad(format!("rule target {} is not a live qubit", r.target));
            }
            if !targets.insert(r.target) {
                return bad(format!("two rules on vertex {}", r.target));
            }
            if let Some(v) = r.dependencies().find(|v| !measured.contains(v)) {
                return bad(format!("rule on {} reads unmeasured vertex {v}", r.target));
            }
        }
        if flips.len() != ancillas.len() {
            return Err(Error::LengthMismatch {
                expected: ancillas.len(),
                got: flips.len(),
            });
        }
        Ok(Self {
            resource,
            num_vertices,
            steps,
            rules,
            outputs,
            ancillas,
            flips,
        })
    }

    pub fn resource(&self) -> ResourceId {
        self.resource
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn rules(&self) -> &[FeedForwardRule] {
        &self.rules
    }

    /// Query qubits whose readout forms `y`.
    pub fn outputs(&self) -> &[Vertex] {
        &self.outputs
    }

    /// Ancilla qubits whose readout forms `z`.
    pub fn ancillas(&self) -> &[Vertex] {
        &self.ancillas
    }

    pub fn flips(&self) -> BitString {
        self.flips
    }

    pub fn basis_of(&self, v: Vertex) -> Option<MeasurementBasis> {
        self.steps.iter().find(|s| s.qubit == v).map(|s| s.basis)
    }

    pub fn rule_for(&self, v: Vertex) -> Option<&FeedForwardRule> {
        self.rules.iter().find(|r| r.target == v)
    }

    /// Same program with a different ancilla relabeling.
    pub fn with_flips(&self, flips: BitString) -> Result<Self> {
        if flips.len() != self.ancillas.len() {
            return Err(Error::LengthMismatch {
                expected: self.ancillas.len(),
                got: flips.len(),
            });
        }
        Ok(Self {
            flips,
            ..self.clone()
        })
    }

    fn readout_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.outputs.iter().chain(&self.ancillas).copied()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Register after the oracle (and possibly feed-forward) stage.
#[derive(Clone, Debug)]
pub struct PreReadout<T: Real> {
    /// Unmeasured qubits only, in ascending vertex order.
    pub state: StateVector<T>,
    pub vertices: Vec<Vertex>,
    pub outcomes: BTreeMap<Vertex, u8>,
    /// Product of the oracle-stage Born probabilities.
    pub probability: T,
}

impl<T: Real> PreReadout<T> {
    fn position(&self, v: Vertex) -> Result<usize> {
        self.vertices
            .iter()
            .position(|&w| w == v)
            .ok_or_else(|| Error::MalformedPattern(format!("vertex {v} is not live")))
    }

    fn measure(&mut self, step: &Step, outcome: u8) -> Result<()> {
        let pos = self.position(step.qubit)?;
        let (state, p) = self.state.collapse_out(pos, step.basis, outcome)?;
        self.state = state;
        self.vertices.remove(pos);
        self.outcomes.insert(step.qubit, outcome);
        self.probability = self.probability * p;
        Ok(())
    }

    /// Applies every feed-forward rule of `pattern` as a unitary.
    pub fn apply_feedforward(&mut self, pattern: &Pattern) -> Result<()> {
        for (target, gates) in resolve_feedforward(pattern.rules(), &self.outcomes)? {
            let pos = self.position(target)?;
            for g in gates {
                self.state.apply_gate(g, &[pos])?;
            }
        }
        Ok(())
    }

    /// Joint computational distribution of `(y, z)` with flips applied; index
    /// `y << m | z` for `m` ancillas.
    pub fn readout_distribution(&self, pattern: &Pattern) -> Result<Vec<T>> {
        let positions = pattern
            .readout_vertices()
            .map(|v| self.position(v))
            .collect::<Result<Vec<_>>>()?;
        let raw = self.state.marginal(&positions)?;
        let flips = pattern.flips().value() as usize;
        let mut dist = vec![T::zero(); raw.len()];
        for (i, p) in raw.into_iter().enumerate() {
            dist[i ^ flips] = p;
        }
        Ok(dist)
    }

    /// Distribution of `y` alone.
    pub fn y_distribution(&self, pattern: &Pattern) -> Result<Vec<T>> {
        Ok(y_marginal(&self.readout_distribution(pattern)?, pattern))
    }
}

fn check_resource<T: Real>(state: &StateVector<T>, pattern: &Pattern) -> Result<()> {
    if state.num_qubits() != pattern.num_vertices() {
        return Err(Error::LengthMismatch {
            expected: pattern.num_vertices(),
            got: state.num_qubits(),
        });
    }
    Ok(())
}

fn initial<T: Real>(state: &StateVector<T>, pattern: &Pattern) -> Result<PreReadout<T>> {
    check_resource(state, pattern)?;
    Ok(PreReadout {
        state: state.clone(),
        vertices: (1..=pattern.num_vertices()).collect(),
        outcomes: BTreeMap::new(),
        probability: T::one(),
    })
}

/// Oracle stage with every step outcome supplied by `forced`.
pub fn oracle_stage_forced<T: Real>(
    state: &StateVector<T>,
    pattern: &Pattern,
    forced: &BTreeMap<Vertex, u8>,
) -> Result<PreReadout<T>> {
    let mut pre = initial(state, pattern)?;
    for step in pattern.steps() {
        let outcome = *forced
            .get(&step.qubit)
            .ok_or(Error::MissingOutcome(step.qubit))?;
        pre.measure(step, outcome)?;
    }
    Ok(pre)
}

/// Oracle stage with Born-sampled outcomes.
pub fn oracle_stage_sampled<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    pattern: &Pattern,
    rng: &mut R,
) -> Result<PreReadout<T>> {
    let mut pre = initial(state, pattern)?;
    for step in pattern.steps() {
        let pos = pre.position(step.qubit)?;
        let [p0, p1] = pre.state.probabilities(pos, step.basis)?;
        let u: f64 = rng.random();
        let outcome = u8::from(u * (p0 + p1).as_f64() >= p0.as_f64());
        pre.measure(step, outcome)?;
    }
    Ok(pre)
}

/// Oracle stage with forced outcomes followed by feed-forward: the state the
/// readout measurements act on.
pub fn prepare_forced<T: Real>(
    state: &StateVector<T>,
    pattern: &Pattern,
    forced: &BTreeMap<Vertex, u8>,
) -> Result<PreReadout<T>> {
    let mut pre = oracle_stage_forced(state, pattern, forced)?;
    pre.apply_feedforward(pattern)?;
    Ok(pre)
}

/// Everything recorded in one execution of a pattern.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutcomeRecord {
    /// Raw outcome of every measured vertex, readout included (before flips).
    pub outcomes: BTreeMap<Vertex, u8>,
    /// Product of all Born probabilities along the run.
    pub probability: f64,
    pub y: BitString,
    /// Ancilla readout after the flip relabeling.
    pub z: BitString,
}

fn readout<T: Real, R: Rng + ?Sized>(
    pre: PreReadout<T>,
    pattern: &Pattern,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    let positions = pattern
        .readout_vertices()
        .map(|v| pre.position(v))
        .collect::<Result<Vec<_>>>()?;
    let dist = pre.state.marginal(&positions)?;
    let total: f64 = dist.iter().map(|p| p.as_f64()).sum();
    let mut u = rng.random::<f64>() * total;
    let mut index = dist.len() - 1;
    for (i, p) in dist.iter().enumerate() {
        u -= p.as_f64();
        if u < 0.0 {
            index = i;
            break;
        }
    }
    let k = positions.len();
    let mut outcomes = pre.outcomes;
    for (bit, v) in pattern.readout_vertices().enumerate() {
        outcomes.insert(v, ((index >> (k - 1 - bit)) & 1) as u8);
    }
    let m = pattern.ancillas().len();
    let y = BitString::new((index >> m) as u64, pattern.outputs().len())?;
    let z = BitString::new((index & ((1 << m) - 1)) as u64, m)?.xor(&pattern.flips());
    Ok(OutcomeRecord {
        outcomes,
        probability: (pre.probability.as_f64()) * dist[index].as_f64(),
        y,
        z,
    })
}

/// Full run with sampled oracle outcomes.
pub fn run_pattern<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    pattern: &Pattern,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    let mut pre = oracle_stage_sampled(state, pattern, rng)?;
    pre.apply_feedforward(pattern)?;
    readout(pre, pattern, rng)
}

/// Full run along a forced oracle branch; only the readout is sampled.
pub fn run_pattern_forced<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    pattern: &Pattern,
    forced: &BTreeMap<Vertex, u8>,
    rng: &mut R,
) -> Result<OutcomeRecord> {
    readout(prepare_forced(state, pattern, forced)?, pattern, rng)
}

/// One forced oracle assignment and what it leads to.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<T> {
    pub outcomes: BTreeMap<Vertex, u8>,
    pub probability: T,
    /// Joint `(y, z)` distribution after feed-forward; `None` when the
    /// branch cannot occur.
    pub readout: Option<Vec<T>>,
}

impl<T: Real> Branch<T> {
    pub fn y_distribution(&self, pattern: &Pattern) -> Option<Vec<T>> {
        self.readout.as_ref().map(|d| y_marginal(d, pattern))
    }
}

/// Every assignment of oracle outcomes, in lexicographic order with the
/// lowest vertex most significant. Prefixes are shared depth first.
pub fn enumerate_branches<T: Real>(
    state: &StateVector<T>,
    pattern: &Pattern,
) -> Result<Vec<Branch<T>>> {
    let depth = pattern.steps().len();
    if depth > MAX_BRANCH_QUBITS {
        return Err(Error::Capacity {
            what: "oracle qubits for branch enumeration",
            requested: depth,
            limit: MAX_BRANCH_QUBITS,
        });
    }
    let mut out = Vec::with_capacity(1 << depth);
    descend(initial(state, pattern)?, pattern, 0, &mut out)?;
    Ok(out)
}

fn descend<T: Real>(
    pre: PreReadout<T>,
    pattern: &Pattern,
    depth: usize,
    out: &mut Vec<Branch<T>>,
) -> Result<()> {
    let Some(step) = pattern.steps().get(depth) else {
        let mut pre = pre;
        pre.apply_feedforward(pattern)?;
        out.push(Branch {
            readout: Some(pre.readout_distribution(pattern)?),
            outcomes: pre.outcomes,
            probability: pre.probability,
        });
        return Ok(());
    };
    let pos = pre.position(step.qubit)?;
    let probs = pre.state.probabilities(pos, step.basis)?;
    for outcome in 0..2u8 {
        if probs[outcome as usize].as_f64() <= MIN_FORCED_PROBABILITY {
            impossible(&pre.outcomes, step.qubit, outcome, pattern, depth + 1, out);
            continue;
        }
        let mut next = pre.clone();
        next.measure(step, outcome)?;
        descend(next, pattern, depth + 1, out)?;
    }
    Ok(())
}

fn impossible<T: Real>(
    prefix: &BTreeMap<Vertex, u8>,
    qubit: Vertex,
    outcome: u8,
    pattern: &Pattern,
    depth: usize,
    out: &mut Vec<Branch<T>>,
) {
    let rest = &pattern.steps()[depth..];
    for bits in 0..1usize << rest.len() {
        let mut outcomes = prefix.clone();
        outcomes.insert(qubit, outcome);
        for (k, s) in rest.iter().enumerate() {
            outcomes.insert(s.qubit, ((bits >> (rest.len() - 1 - k)) & 1) as u8);
        }
        out.push(Branch {
            outcomes,
            probability: T::zero(),
            readout: None,
        });
    }
}

/// Probability-weighted mixture of the branch readout distributions.
pub fn averaged_readout<T: Real>(branches: &[Branch<T>]) -> Vec<T> {
    let len = branches
        .iter()
        .find_map(|b| b.readout.as_ref().map(Vec::len))
        .unwrap_or(0);
    let mut acc = vec![T::zero(); len];
    for b in branches {
        if let Some(d) = &b.readout {
            for (a, p) in acc.iter_mut().zip(d) {
                *a = *a + b.probability * *p;
            }
        }
    }
    acc
}

/// Marginal over `y` of a joint `(y, z)` distribution.
pub fn y_marginal<T: Real>(joint: &[T], pattern: &Pattern) -> Vec<T> {
    let m = pattern.ancillas().len();
    let mut y = vec![T::zero(); joint.len() >> m];
    for (i, &p) in joint.iter().enumerate() {
        y[i >> m] = y[i >> m] + p;
    }
    y
}

/// `½ Σ |a_i − b_i|`.
pub fn total_variation<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let sum: T = a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum();
    Ok(sum / T::lit(2.0))
}

/// Independent stream for shot `shot` under `seed`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Runs `shots` independent executions, each on a fresh copy of `resource`
/// with an optional noise trajectory. Shot `k` draws only from
/// `shot_rng(seed, k)`, so results do not depend on the thread count.
pub fn sample_shots<T: Real>(
    resource: &StateVector<T>,
    pattern: &Pattern,
    shots: usize,
    seed: u64,
    noise: Option<&NoiseSpec>,
) -> Result<Vec<OutcomeRecord>> {
    check_resource(resource, pattern)?;
    (0..shots)
        .into_par_iter()
        .map(|k| {
            let mut rng = shot_rng(seed, k as u64);
            match noise {
                Some(spec) => {
                    let mut noisy = resource.clone();
                    apply_noise_trajectory(&mut noisy, spec, &mut rng)?;
                    run_pattern(&noisy, pattern, &mut rng)
                }
                None => run_pattern(resource, pattern, &mut rng),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    use super::*;
    use crate::graph_state::canonical_resource;

    type Sv = StateVector<f64>;

    fn s01_pattern() -> Pattern {
        Pattern::new(
            ResourceId::SixQubitSp22,
            vec![Step::computational(4), Step::equatorial(2, FRAC_PI_2)],
            vec![
                FeedForwardRule::chi(1, 2, 0),
                FeedForwardRule::chi(3, 2, 4),
                FeedForwardRule::zeta(5, 0, 4),
                FeedForwardRule::hadamard(6),
            ],
            vec![1, 5],
            vec![3, 6],
            BitString::zeros(2),
        )
        .unwrap()
    }

    fn outcomes(pairs: &[(Vertex, u8)]) -> BTreeMap<Vertex, u8> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn chi_resolution() {
        let rule = FeedForwardRule::chi(1, 2, 0);
        assert_eq!(
            rule.gates(&outcomes(&[(2, 0)])).unwrap(),
            vec![Gate::Rz(-FRAC_PI_2), Gate::H]
        );
        assert_eq!(
            rule.gates(&outcomes(&[(2, 1)])).unwrap(),
            vec![Gate::Rz(-FRAC_PI_2), Gate::H, Gate::X]
        );
        assert!(matches!(
            rule.gates(&BTreeMap::new()),
            Err(Error::MissingOutcome(2))
        ));
    }

    #[test]
    fn zeta_and_hadamard_resolution() {
        let zeta = FeedForwardRule::zeta(5, 0, 4);
        assert_eq!(
            zeta.gates(&outcomes(&[(4, 1)])).unwrap(),
            vec![Gate::H, Gate::X]
        );
        assert_eq!(zeta.gates(&outcomes(&[(4, 0)])).unwrap(), vec![Gate::H]);
        let tilde = FeedForwardRule::chi_tilde(3, 2, 4);
        assert_eq!(
            tilde.gates(&outcomes(&[(2, 1), (4, 1)])).unwrap(),
            vec![Gate::Rz(-PI), Gate::H]
        );
        assert_eq!(
            FeedForwardRule::hadamard(6)
                .gates(&BTreeMap::new())
                .unwrap(),
            vec![Gate::H]
        );
        let resolved =
            resolve_feedforward(&[zeta, FeedForwardRule::hadamard(6)], &outcomes(&[(4, 1)]))
                .unwrap();
        assert_eq!(resolved.len(), 2);
        assert_eq!(resolved[1], (6, vec![Gate::H]));
    }

    #[test]
    fn quarter_turn_forms() {
        for k in 0..6u8 {
            assert_eq!(
                FeedForwardForm::from_quarter_turns(k).quarter_turns(),
                Some(k)
            );
        }
        assert_eq!(FeedForwardForm::from_quarter_turns(1), FeedForwardForm::Chi);
        let four = FeedForwardRule::new(1, FeedForwardForm::Phase { quarter_turns: 4 }, vec![2]);
        assert_eq!(four.gates(&outcomes(&[(2, 0)])).unwrap(), vec![Gate::H]);
    }

    #[test]
    fn malformed_patterns_are_rejected() {
        let z = BitString::zeros(2);
        let r = ResourceId::SixQubitSp22;
        let twice = Pattern::new(
            r,
            vec![Step::computational(2), Step::computational(2)],
            vec![],
            vec![1],
            vec![],
            BitString::zeros(0),
        );
        assert!(matches!(twice, Err(Error::MalformedPattern(_))));
        let unmeasured = Pattern::new(
            r,
            vec![Step::computational(2)],
            vec![FeedForwardRule::chi(1, 4, 0)],
            vec![1, 5],
            vec![3, 6],
            z,
        );
        assert!(unmeasured.is_err());
        let target_measured = Pattern::new(
            r,
            vec![Step::computational(2)],
            vec![FeedForwardRule::chi(2, 0, 0)],
            vec![1, 5],
            vec![3, 6],
            z,
        );
        assert!(target_measured.is_err());
        let readout_measured = Pattern::new(
            r,
            vec![Step::computational(1)],
            vec![],
            vec![1, 5],
            vec![3, 6],
            z,
        );
        assert!(readout_measured.is_err());
        let out_of_range = Pattern::new(
            r,
            vec![Step::computational(7)],
            vec![],
            vec![1],
            vec![],
            BitString::zeros(0),
        );
        assert!(out_of_range.is_err());
        let bad_flips = Pattern::new(
            r,
            vec![],
            vec![],
            vec![1, 5],
            vec![3, 6],
            BitString::zeros(1),
        );
        assert!(matches!(bad_flips, Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn steps_are_sorted() {
        let p = s01_pattern();
        assert_eq!(
            p.steps().iter().map(|s| s.qubit).collect::<Vec<_>>(),
            vec![2, 4]
        );
    }

    #[test]
    fn json_round_trip_is_exact() {
        let p = s01_pattern();
        let json = p.to_json().unwrap();
        assert!(json.contains("\"kind\": \"equatorial\""));
        assert!(json.contains("\"form\": \"zeta\""));
        let back = Pattern::from_json(&json).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json().unwrap(), json);
        let rule = FeedForwardRule::new(
            3,
            FeedForwardForm::Phase { quarter_turns: 3 },
            vec![7, 8, 9],
        );
        let text = serde_json::to_string(&rule).unwrap();
        assert_eq!(
            text,
            r#"{"target":3,"form":"phase","i":7,"j":8,"extra":[9],"quarter_turns":3}"#
        );
        assert_eq!(
            serde_json::from_str::<FeedForwardRule>(&text).unwrap(),
            rule
        );
        assert!(serde_json::from_str::<FeedForwardRule>(
            r#"{"target":1,"form":"psi","i":0,"j":0}"#
        )
        .is_err());
    }

    #[test]
    fn s01_branches_split_between_00_and_10() {
        let (_, state) = canonical_resource::<f64>(ResourceId::SixQubitSp22).unwrap();
        let p = s01_pattern();
        let branches = enumerate_branches(&state, &p).unwrap();
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
        for b in &branches {
            let y = b.y_distribution(&p).unwrap();
            for (got, want) in y.iter().zip([0.5, 0.0, 0.5, 0.0]) {
                assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn empty_program_has_one_branch() {
        let (_, state) = canonical_resource::<f64>(ResourceId::SixQubitSp22).unwrap();
        let p = Pattern::new(
            ResourceId::SixQubitSp22,
            vec![],
            vec![],
            vec![1],
            vec![],
            BitString::zeros(0),
        )
        .unwrap();
        let branches = enumerate_branches(&state, &p).unwrap();
        assert_eq!(branches.len(), 1);
        assert_abs_diff_eq!(branches[0].probability, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn impossible_branches_are_listed_with_zero_weight() {
        // Vertex 2 starts in |0⟩, so its outcome 1 never occurs.
        let mut state = Sv::new_plus_state(6).unwrap();
        state.apply_gate(Gate::H, &[1]).unwrap();
        let p = Pattern::new(
            ResourceId::SixQubitSp22,
            vec![Step::computational(2), Step::computational(4)],
            vec![],
            vec![1],
            vec![],
            BitString::zeros(0),
        )
        .unwrap();
        let branches = enumerate_branches(&state, &p).unwrap();
        assert_eq!(branches.len(), 4);
        assert_eq!(branches.iter().filter(|b| b.readout.is_none()).count(), 2);
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn forced_runs_are_deterministic() {
        let (_, state) = canonical_resource::<f64>(ResourceId::SixQubitSp22).unwrap();
        let p = s01_pattern();
        let forced = outcomes(&[(2, 1), (4, 0)]);
        let a = run_pattern_forced(&state, &p, &forced, &mut shot_rng(3, 0)).unwrap();
        let b = run_pattern_forced(&state, &p, &forced, &mut shot_rng(3, 0)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.outcomes[&2], 1);
        assert!(a.y == "00".parse().unwrap() || a.y == "10".parse().unwrap());
        assert_abs_diff_eq!(a.probability, 0.25 * 0.25, epsilon = 1e-10);
    }

    #[test]
    fn shots_do_not_depend_on_thread_count() {
        let (_, state) = canonical_resource::<f64>(ResourceId::SixQubitSp22).unwrap();
        let p = s01_pattern();
        let many = sample_shots(&state, &p, 200, 9, None).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let single = pool.install(|| sample_shots(&state, &p, 200, 9, None).unwrap());
        assert_eq!(many, single);
    }

    #[test]
    fn flips_relabel_ancilla_readout() {
        let (_, state) = canonical_resource::<f64>(ResourceId::SixQubitSp22).unwrap();
        let p = s01_pattern();
        let flipped = p.with_flips("11".parse().unwrap()).unwrap();
        let forced = outcomes(&[(2, 0), (4, 0)]);
        let a = prepare_forced(&state, &p, &forced)
            .unwrap()
            .readout_distribution(&p)
            .unwrap();
        let b = prepare_forced(&state, &flipped, &forced)
            .unwrap()
            .readout_distribution(&flipped)
            .unwrap();
        for (i, &v) in a.iter().enumerate() {
            assert_abs_diff_eq!(b[i ^ 0b11], v, epsilon = 1e-12);
        }
    }

    #[test]
    fn total_variation_examples() {
        assert_abs_diff_eq!(
            total_variation(&[0.5, 0.5], &[1.0, 0.0]).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        assert!(total_variation(&[1.0], &[0.5, 0.5]).is_err());
    }

    proptest! {
        #[test]
        fn feedforward_equals_basis_change(
            amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
            k in 0u8..4,
            parity in 0u8..2,
        ) {
            let state = Sv::from_amplitudes(amps.into_iter().map(|(r, i)| Complex64::new(r, i)).collect());
            prop_assume!(state.is_ok());
            let state = state.unwrap();
            let rule = FeedForwardRule::new(1, FeedForwardForm::from_quarter_turns(k), vec![2]);
            let mut rotated = state.clone();
            for g in rule.gates(&outcomes(&[(2, parity)])).unwrap() {
                rotated.apply_gate(g, &[0]).unwrap();
            }
            let [c0, c1] = rotated.probabilities(0, MeasurementBasis::Computational).unwrap();
            let basis = MeasurementBasis::Equatorial { alpha: k as f64 * FRAC_PI_2 };
            let [e0, e1] = state.probabilities(0, basis).unwrap();
            let (e0, e1) = if parity == 1 { (e1, e0) } else { (e0, e1) };
            prop_assert!((c0 - e0).abs() < 1e-10 && (c1 - e1).abs() < 1e-10);
        }
    }
}
