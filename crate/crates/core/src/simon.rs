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

//! Simon's problem on the SP_22 resources: black-box catalog, end-to-end
//! runs, the circuit-model reference, period recovery over GF(2) and the
//! classical baselines.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph_state::{canonical_resource, ResourceId, Vertex};
use crate::mbqc_engine::{
    run_pattern, run_pattern_forced, sample_shots, shot_rng, FeedForwardForm, FeedForwardRule,
    Pattern, Step,
};
use crate::noise::{Estimate, NoiseSpec};
use crate::statevector::{Gate, StateVector};

/// Runs allowed per trial of [`expected_runs_to_nonzero`] before giving up.
pub const MAX_RUNS_PER_TRIAL: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Period {
    OneToOne,
    TwoToOne(BitString),
}

impl Period {
    pub fn is_two_to_one(&self) -> bool {
        matches!(self, Period::TwoToOne(_))
    }

    /// Period of a function table indexed by `x`, if it obeys the promise.
    pub fn of_table(table: &[BitString]) -> Result<Period> {
        let mut seen: HashMap<BitString, Vec<usize>> = HashMap::new();
        for (x, fx) in table.iter().enumerate() {
            seen.entry(*fx).or_default().push(x);
        }
        let n = table.len().trailing_zeros() as usize;
        let violation =
            || Error::InvalidArgument("table is neither 1-1 nor 2-1 with one period".into());
        if seen.values().all(|xs| xs.len() == 1) {
            return Ok(Period::OneToOne);
        }
        let s = match seen.get(&table[0]).map(Vec::as_slice) {
            Some(&[0, x]) => x,
            _ => return Err(violation()),
        };
        let ok = seen.values().all(|xs| xs.len() == 2 && xs[0] ^ xs[1] == s);
        if !ok {
            return Err(violation());
        }
        Ok(Period::TwoToOne(BitString::new(s as u64, n)?))
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::OneToOne => f.write_str("one-to-one"),
            Period::TwoToOne(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "one-to-one" {
            return Ok(Period::OneToOne);
        }
        let bits: BitString = s.parse()?;
        if bits.is_zero() {
            return Err(Error::InvalidSelection("period must be nonzero".into()));
        }
        Ok(Period::TwoToOne(bits))
    }
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Black-box identifier. `Six(s)` is the representative with period `s` on
/// the six-qubit resource; `Eight(c)` is column `c` (0 for a, …, 14 for o) of
/// the eight-qubit table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BbId {
    Six(u8),
    Eight(u8),
}

impl BbId {
    pub fn six() -> impl Iterator<Item = BbId> {
        (1..=3).map(BbId::Six)
    }

    pub fn eight() -> impl Iterator<Item = BbId> {
        (0..15).map(BbId::Eight)
    }

    pub fn all() -> impl Iterator<Item = BbId> {
        Self::six().chain(Self::eight())
    }

    pub fn resource(self) -> ResourceId {
        match self {
            BbId::Six(_) => ResourceId::SixQubitSp22,
            BbId::Eight(_) => ResourceId::EightQubitSp22,
        }
    }
}

impl fmt::Display for BbId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BbId::Six(s) => write!(f, "s{s:02b}"),
            BbId::Eight(c) => write!(f, "{}8", (b'a' + c) as char),
        }
    }
}

impl FromStr for BbId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BbId::all()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| Error::UnknownBlackBox(s.to_string()))
    }
}

impl Serialize for BbId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// Six-qubit programs, one entry per period 01, 10, 11: f(01), f(10), f(11),
// bases of bridges 2 and 4, then feed-forward forms on 1, 3, 5.
// 'B' is B(π/2), 'C' computational; 'x' χ, 't' χ̃, 'z' ζ.
const SIX: [([&str; 3], [u8; 2], [u8; 3]); 3] = [
    (["00", "10", "10"], *b"BC", *b"xxz"),
    (["10", "00", "10"], *b"CB", *b"zxx"),
    (["10", "10", "00"], *b"BB", *b"xtx"),
];

// Eight-qubit table, one string per row with columns a..o.
const EIGHT_F: [[&str; 15]; 3] = [
    [
        "01", "01", "11", "10", "10", "11", "00", "00", "00", "01", "10", "11", "01", "10", "11",
    ],
    [
        "10", "11", "10", "01", "11", "01", "01", "10", "11", "00", "00", "00", "01", "10", "11",
    ],
    [
        "11", "10", "01", "11", "01", "10", "01", "10", "11", "01", "10", "11", "00", "00", "00",
    ],
];
const EIGHT_M: [(Vertex, &[u8; 15]); 4] = [
    (2, b"BBBCBCCBBCCCCBB"),
    (4, b"CCBBBBCCCCBBCBB"),
    (7, b"BBBCCBCCCBCBBCB"),
    (8, b"CBCBBBBCBCCCBCB"),
];
// Target, sources, forms per column.
const EIGHT_FF: [(Vertex, [Vertex; 2], &[u8; 15]); 4] = [
    (1, [2, 8], b"xtxxtxxxtzzzxxt"),
    (3, [2, 4], b"xxtxtxzxxzxxxtt"),
    (5, [7, 4], b"xxtxxtzzzxxtxxt"),
    (6, [8, 7], b"xtxxxtxzxxzxtzt"),
];

fn step(qubit: Vertex, code: u8) -> Step {
    match code {
        b'B' => Step::equatorial(qubit, FRAC_PI_2),
        _ => Step::computational(qubit),
    }
}

fn form(code: u8) -> FeedForwardForm {
    match code {
        b'x' => FeedForwardForm::Chi,
        b't' => FeedForwardForm::ChiTilde,
        _ => FeedForwardForm::Zeta,
    }
}

fn parse_table(rows: [&str; 3]) -> Vec<BitString> {
    std::iter::once("00")
        .chain(rows)
        .map(|s| s.parse().expect("catalog bit strings are well formed"))
        .collect()
}

/// One catalogued black box with its flips applied.
#[derive(Clone, Debug, PartialEq)]
pub struct SimonInstance {
    pub id: BbId,
    pub period: Period,
    pub flips: BitString,
    /// `table[x] = f(x) ⊕ flips`.
    pub table: Vec<BitString>,
    pub pattern: Pattern,
}

impl SimonInstance {
    pub fn n(&self) -> usize {
        self.table.len().trailing_zeros() as usize
    }
}

#[derive(Serialize)]
struct CatalogEntry<'a> {
    bb_id: BbId,
    period: Period,
    flips: BitString,
    table: BTreeMap<BitString, BitString>,
    pattern: &'a Pattern,
}

impl Serialize for SimonInstance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.n();
        CatalogEntry {
            bb_id: self.id,
            period: self.period,
            flips: self.flips,
            table: self
                .table
                .iter()
                .enumerate()
                .map(|(x, fx)| (BitString::new(x as u64, n).expect("x < 2^n"), *fx))
                .collect(),
            pattern: &self.pattern,
        }
        .serialize(s)
    }
}

/// Catalogued instance `id` with ancilla flips `flips`.
pub fn bb_catalog(id: BbId, flips: BitString) -> Result<SimonInstance> {
    if flips.len() != 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            got: flips.len(),
        });
    }
    let (rows, steps, rules) = match id {
        BbId::Six(s @ 1..=3) => {
            let (rows, m, ff) = SIX[s as usize - 1];
            let rules = vec![
                FeedForwardRule::new(1, form(ff[0]), vec![2, 0]),
                FeedForwardRule::new(3, form(ff[1]), vec![2, 4]),
                FeedForwardRule::new(5, form(ff[2]), vec![0, 4]),
                FeedForwardRule::hadamard(6),
            ];
            (rows, vec![step(2, m[0]), step(4, m[1])], rules)
        }
        BbId::Eight(c @ 0..=14) => {
            let c = c as usize;
            let rows = [EIGHT_F[0][c], EIGHT_F[1][c], EIGHT_F[2][c]];
            let steps = EIGHT_M
                .iter()
                .map(|&(q, codes)| step(q, codes[c]))
                .collect();
            let rules = EIGHT_FF
                .iter()
                .map(|&(t, src, codes)| FeedForwardRule::new(t, form(codes[c]), src.to_vec()))
                .collect();
            (rows, steps, rules)
        }
        other => return Err(Error::UnknownBlackBox(other.to_string())),
    };
    let base = parse_table(rows);
    let period = Period::of_table(&base)?;
    let table = base.iter().map(|fx| fx.xor(&flips)).collect();
    let pattern = Pattern::new(id.resource(), steps, rules, vec![1, 5], vec![3, 6], flips)?;
    Ok(SimonInstance {
        id,
        period,
        flips,
        table,
        pattern,
    })
}

/// Every catalogued instance under every flip mask.
pub fn full_catalog() -> Result<Vec<SimonInstance>> {
    BbId::all()
        .flat_map(|id| BitString::all(2).map(move |f| bb_catalog(id, f)))
        .collect()
}

/// Observed query-register outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleSet {
    n: usize,
    samples: Vec<BitString>,
}

impl SampleSet {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            samples: Vec::new(),
        }
    }

    pub fn from_samples(n: usize, samples: Vec<BitString>) -> Result<Self> {
        let mut set = Self::new(n);
        for y in samples {
            set.push(y)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, y: BitString) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        self.samples.push(y);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[BitString] {
        &self.samples
    }

    /// Histogram over every `y` in `{0,1}^n`, zeros included.
    pub fn counts(&self) -> BTreeMap<BitString, usize> {
        let mut counts: BTreeMap<BitString, usize> =
            BitString::all(self.n).map(|y| (y, 0)).collect();
        for y in &self.samples {
            *counts.entry(*y).or_default() += 1;
        }
        counts
    }
}

/// Runs the instance's pattern `shots` times on a fresh resource.
pub fn run_simon_mbqc(
    instance: &SimonInstance,
    shots: usize,
    seed: u64,
    noise: Option<&NoiseSpec>,
) -> Result<SampleSet> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let (_, state) = canonical_resource::<f64>(instance.pattern.resource())?;
    let records = sample_shots(&state, &instance.pattern, shots, seed, noise)?;
    SampleSet::from_samples(instance.n(), records.into_iter().map(|r| r.y).collect())
}

fn table_shape(table: &[BitString]) -> Result<(usize, usize)> {
    let len = table.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    let m = table[0].len();
    if let Some(bad) = table.iter().find(|fx| fx.len() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            got: bad.len(),
        });
    }
    Ok((n, m))
}

/// Exact joint distribution of `(y, z)` from the oracle circuit: prepare
/// `2^{-n/2} Σ_x |x⟩|f(x)⟩`, apply `H` to the query register and read out
/// everything. Index `y << m | z`.
pub fn circuit_model_joint(table: &[BitString]) -> Result<Vec<f64>> {
    let (n, m) = table_shape(table)?;
    let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); 1 << (n + m)];
    for (x, fx) in table.iter().enumerate() {
        amps[(x << m) | fx.value() as usize] += 1.0;
    }
    let mut state = StateVector::from_amplitudes(amps)?;
    for q in 0..n {
        state.apply_gate(Gate::H, &[q])?;
    }
    state.marginal(&(0..n + m).collect::<Vec<_>>())
}

/// Exact distribution of `y` from the oracle circuit.
pub fn circuit_model_reference(table: &[BitString]) -> Result<Vec<f64>> {
    let (n, _) = table_shape(table)?;
    let joint = circuit_model_joint(table)?;
    let m = joint.len().trailing_zeros() as usize - n;
    let mut y = vec![0.0; 1 << n];
    for (i, p) in joint.into_iter().enumerate() {
        y[i >> m] += p;
    }
    Ok(y)
}

/// Outcome of period recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeriodSolution {
    Period(BitString),
    OneToOneSuspected,
    InsufficientRank { rank: usize },
}

impl fmt::Display for PeriodSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PeriodSolution::Period(s) => write!(f, "{s}"),
            PeriodSolution::OneToOneSuspected => f.write_str("one-to-one suspected"),
            PeriodSolution::InsufficientRank { .. } => f.write_str("insufficient rank"),
        }
    }
}

/// Reduced row echelon basis of the span of `rows`; each row's leading bit
/// is cleared from every other row.
fn rref(rows: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for mut r in rows {
        for &b in &basis {
            let lead = 63 - b.leading_zeros();
            if r >> lead & 1 == 1 {
                r ^= b;
            }
        }
        if r == 0 {
            continue;
        }
        let lead = 63 - r.leading_zeros();
        for b in basis.iter_mut() {
            if *b >> lead & 1 == 1 {
                *b ^= r;
            }
        }
        basis.push(r);
    }
    basis
}

fn check_samples(samples: &[BitString], n: usize) -> Result<()> {
    if n == 0 || n > crate::bits::MAX_BITS {
        return Err(Error::InvalidArgument(format!("register size {n}")));
    }
    match samples.iter().find(|y| y.len() != n) {
        Some(y) => Err(Error::LengthMismatch {
            expected: n,
            got: y.len(),
        }),
        None => Ok(()),
    }
}

/// Rank over GF(2) of the samples.
pub fn gf2_rank(samples: &[BitString], n: usize) -> Result<usize> {
    check_samples(samples, n)?;
    Ok(rref(samples.iter().map(BitString::value)).len())
}

/// Gaussian elimination over GF(2). Rank `n − 1` yields the unique nonzero
/// `s` orthogonal to every sample; rank `n` contradicts the 2-1 promise.
pub fn solve_period(samples: &[BitString], n: usize) -> Result<PeriodSolution> {
    check_samples(samples, n)?;
    let basis = rref(samples.iter().map(BitString::value));
    let rank = basis.len();
    if rank == n {
        return Err(Error::PromiseViolation);
    }
    if rank + 1 < n {
        return Ok(PeriodSolution::InsufficientRank { rank });
    }
    let pivots: u64 = basis
        .iter()
        .map(|b| 1u64 << (63 - b.leading_zeros()))
        .fold(0, |a, b| a | b);
    let free = (0..n as u32)
        .find(|&bit| pivots >> bit & 1 == 0)
        .expect("rank n - 1 leaves one free column");
    let s = basis
        .iter()
        .filter(|&&b| b >> free & 1 == 1)
        .fold(1u64 << free, |acc, &b| {
            acc | 1u64 << (63 - b.leading_zeros())
        });
    Ok(PeriodSolution::Period(BitString::new(s, n)?))
}

/// Default sample budget before a rank-`n − 1` set is trusted as 2-1.
pub const fn default_budget(n: usize) -> usize {
    3 * n
}

/// Non-failing decision rule. Full rank reports a 1-1 function; rank `n − 1`
/// reports the period once at least `budget` samples were seen, since a 1-1
/// function can still look periodic on a short run.
pub fn classify(samples: &[BitString], n: usize, budget: usize) -> Result<PeriodSolution> {
    match solve_period(samples, n) {
        Err(Error::PromiseViolation) => Ok(PeriodSolution::OneToOneSuspected),
        Ok(PeriodSolution::Period(_)) if samples.len() < budget => {
            Ok(PeriodSolution::InsufficientRank { rank: n - 1 })
        }
        other => other,
    }
}

/// Mean number of runs until the first nonzero `y`, with its standard
/// error. With `forced` set, every run follows that oracle branch.
pub fn expected_runs_to_nonzero(
    instance: &SimonInstance,
    trials: usize,
    seed: u64,
    forced: Option<&BTreeMap<Vertex, u8>>,
) -> Result<Estimate> {
    if trials == 0 {
        return Err(Error::UndefinedMean);
    }
    if !instance.period.is_two_to_one() {
        return Err(Error::InvalidArgument(format!(
            "{} is not a 2-1 instance",
            instance.id
        )));
    }
    let (_, state) = canonical_resource::<f64>(instance.pattern.resource())?;
    let runs = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = shot_rng(seed, t as u64);
            for run in 1..=MAX_RUNS_PER_TRIAL {
                let record = match forced {
                    Some(f) => run_pattern_forced(&state, &instance.pattern, f, &mut rng)?,
                    None => run_pattern(&state, &instance.pattern, &mut rng)?,
                };
                if !record.y.is_zero() {
                    return Ok(run as f64);
                }
            }
            Err(Error::InvalidArgument(
                "no nonzero outcome within the run cap".into(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Estimate::from_samples(&runs)
}

/// Function tables `[f(00), f(01), f(10), f(11)]` of the three
/// representatives used on the six-qubit resource.
pub fn sp22_representatives() -> Vec<Vec<BitString>> {
    SIX.iter().map(|(rows, _, _)| parse_table(*rows)).collect()
}

/// Minimum expected number of classical queries that determines the period
/// when the hidden function is drawn uniformly from `functions`. The search
/// runs over every adaptive strategy: at a knowledge state (the set of
/// functions consistent with the answers so far) either all candidates share
/// a period, or some input is queried and the expectation recurses on the
/// answer classes.
pub fn classical_optimal_queries(functions: &[Vec<BitString>]) -> Result<Ratio<u64>> {
    if functions.is_empty() || functions.len() > 64 {
        return Err(Error::InvalidArgument(format!(
            "{} candidate functions",
            functions.len()
        )));
    }
    let periods = functions
        .iter()
        .map(|f| Period::of_table(f))
        .collect::<Result<Vec<_>>>()?;
    let inputs = functions[0].len();
    if functions.iter().any(|f| f.len() != inputs) {
        return Err(Error::InvalidArgument("tables of different sizes".into()));
    }
    let all = if functions.len() == 64 {
        u64::MAX
    } else {
        (1u64 << functions.len()) - 1
    };
    let mut memo = HashMap::new();
    expected_queries(all, functions, &periods, &mut memo)
}

fn expected_queries(
    set: u64,
    functions: &[Vec<BitString>],
    periods: &[Period],
    memo: &mut HashMap<u64, Ratio<u64>>,
) -> Result<Ratio<u64>> {
    if let Some(&e) = memo.get(&set) {
        return Ok(e);
    }
    let members: Vec<usize> = (0..functions.len())
        .filter(|&i| set >> i & 1 == 1)
        .collect();
    if members.iter().all(|&i| periods[i] == periods[members[0]]) {
        memo.insert(set, Ratio::from_integer(0));
        return Ok(Ratio::from_integer(0));
    }
    let size = members.len() as u64;
    let mut best: Option<Ratio<u64>> = None;
    for x in 0..functions[0].len() {
        let mut classes: BTreeMap<BitString, u64> = BTreeMap::new();
        for &i in &members {
            *classes.entry(functions[i][x]).or_default() |= 1 << i;
        }
        if classes.len() < 2 {
            continue;
        }
        let mut e = Ratio::from_integer(1);
        for &class in classes.values() {
            let weight = Ratio::new(class.count_ones() as u64, size);
            e += weight * expected_queries(class, functions, periods, memo)?;
        }
        best = Some(best.map_or(e, |b| b.min(e)));
    }
    let best = best.ok_or_else(|| {
        Error::InvalidArgument("candidates with different periods share a table".into())
    })?;
    memo.insert(set, best);
    Ok(best)
}

/// Exact classical query count for the experiment's representatives: the
/// three 2-1 tables under all four output flips, each equally likely.
pub fn classical_baseline_sp22() -> Result<Ratio<u64>> {
    let functions: Vec<Vec<BitString>> = sp22_representatives()
        .iter()
        .flat_map(|t| BitString::all(2).map(move |f| t.iter().map(|fx| fx.xor(&f)).collect()))
        .collect();
    classical_optimal_queries(&functions)
}

/// Monte Carlo success probability of the random-query classical strategy
/// for deciding 1-1 versus 2-1. The hidden function is 1-1 or 2-1 with
/// probability ½ each, the period uniform over nonzero strings. `queries`
/// distinct random inputs are asked; a repeated output proves 2-1, otherwise
/// the strategy answers 1-1. Only output equalities matter to this strategy,
/// so a 2-1 function's outputs are represented by its coset labels.
pub fn classical_success_bound(
    n: usize,
    queries: usize,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    if n == 0 || n > 12 {
        return Err(Error::Capacity {
            what: "classical Monte Carlo register",
            requested: n,
            limit: 12,
        });
    }
    let inputs = 1usize << n;
    if queries > inputs {
        return Err(Error::InvalidArgument(format!(
            "{queries} distinct queries on {inputs} inputs"
        )));
    }
    let successes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = shot_rng(seed, t as u64);
            let two_to_one: bool = rng.random();
            let s = rng.random_range(1..inputs);
            let asked = sample(&mut rng, inputs, queries).into_vec();
            let label = |x: usize| if two_to_one { x.min(x ^ s) } else { x };
            let mut outputs: Vec<usize> = asked.iter().map(|&x| label(x)).collect();
            outputs.sort_unstable();
            let collision = outputs.windows(2).any(|w| w[0] == w[1]);
            if collision == two_to_one {
                1.0
            } else {
                0.0
            }
        })
        .collect::<Vec<f64>>();
    Estimate::from_samples(&successes)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::statevector::MeasurementBasis;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn table(rows: [&str; 4]) -> Vec<BitString> {
        rows.iter().map(|s| bits(s)).collect()
    }

    #[test]
    fn ids_round_trip() {
        let names: Vec<String> = BbId::all().map(|id| id.to_string()).collect();
        assert_eq!(&names[..4], ["s01", "s10", "s11", "a8"]);
        assert_eq!(names.last().unwrap(), "o8");
        for id in BbId::all() {
            assert_eq!(id.to_string().parse::<BbId>().unwrap(), id);
        }
        assert!(matches!(
            "p8".parse::<BbId>(),
            Err(Error::UnknownBlackBox(_))
        ));
        assert!(bb_catalog(BbId::Eight(15), bits("00")).is_err());
    }

    #[test]
    fn s01_representative() {
        let inst = bb_catalog(BbId::Six(1), bits("00")).unwrap();
        assert_eq!(inst.table, table(["00", "00", "10", "10"]));
        assert_eq!(inst.period, Period::TwoToOne(bits("01")));
        let p = &inst.pattern;
        assert_eq!(p.basis_of(2), Some(MeasurementBasis::Y));
        assert_eq!(p.basis_of(4), Some(MeasurementBasis::Computational));
        assert_eq!(p.rule_for(1).unwrap(), &FeedForwardRule::chi(1, 2, 0));
        assert_eq!(p.rule_for(3).unwrap(), &FeedForwardRule::chi(3, 2, 4));
        assert_eq!(p.rule_for(5).unwrap(), &FeedForwardRule::zeta(5, 0, 4));
        assert_eq!(p.rule_for(6).unwrap(), &FeedForwardRule::hadamard(6));
    }

    #[test]
    fn s11_representative() {
        let inst = bb_catalog(BbId::Six(3), bits("00")).unwrap();
        assert_eq!(inst.table, table(["00", "10", "10", "00"]));
        assert_eq!(inst.pattern.basis_of(2), Some(MeasurementBasis::Y));
        assert_eq!(inst.pattern.basis_of(4), Some(MeasurementBasis::Y));
        assert_eq!(
            inst.pattern.rule_for(3).unwrap().form,
            FeedForwardForm::ChiTilde
        );
    }

    #[test]
    fn eight_qubit_column_a() {
        let inst = bb_catalog(BbId::Eight(0), bits("00")).unwrap();
        assert_eq!(inst.table, table(["00", "01", "10", "11"]));
        assert_eq!(inst.period, Period::OneToOne);
        for (v, basis) in [
            (2, MeasurementBasis::Y),
            (7, MeasurementBasis::Y),
            (4, MeasurementBasis::Computational),
            (8, MeasurementBasis::Computational),
        ] {
            assert_eq!(inst.pattern.basis_of(v), Some(basis));
        }
    }

    #[test]
    fn eight_qubit_periods_by_column() {
        let expected = [
            "-", "-", "-", "-", "-", "-", "01", "01", "01", "10", "10", "10", "11", "11", "11",
        ];
        for (c, want) in expected.iter().enumerate() {
            let inst = bb_catalog(BbId::Eight(c as u8), bits("00")).unwrap();
            match *want {
                "-" => assert_eq!(inst.period, Period::OneToOne),
                s => assert_eq!(inst.period, Period::TwoToOne(bits(s))),
            }
        }
    }

    #[test]
    fn flips_xor_the_table() {
        let inst = bb_catalog(BbId::Six(2), bits("10")).unwrap();
        assert_eq!(inst.table, table(["10", "00", "10", "00"]));
        assert_eq!(inst.pattern.flips(), bits("10"));
        assert_eq!(full_catalog().unwrap().len(), 18 * 4);
    }

    #[test]
    fn catalog_json_shape() {
        let inst = bb_catalog(BbId::Six(1), bits("01")).unwrap();
        let v = serde_json::to_value(&inst).unwrap();
        assert_eq!(v["bb_id"], "s01");
        assert_eq!(v["period"], "01");
        assert_eq!(v["table"]["11"], "11");
        assert_eq!(v["pattern"]["resource"], "sp22-six");
    }

    #[test]
    fn circuit_reference_examples() {
        let y = circuit_model_reference(&table(["00", "00", "10", "10"])).unwrap();
        for (got, want) in y.iter().zip([0.5, 0.0, 0.5, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let y = circuit_model_reference(&table(["00", "01", "10", "11"])).unwrap();
        for got in y {
            assert_abs_diff_eq!(got, 0.25, epsilon = 1e-12);
        }
        assert!(circuit_model_reference(&[bits("00"), bits("01"), bits("1")]).is_err());
    }

    #[test]
    fn circuit_reference_ignores_flips() {
        for inst in full_catalog().unwrap() {
            let base = bb_catalog(inst.id, bits("00")).unwrap();
            let a = circuit_model_reference(&inst.table).unwrap();
            let b = circuit_model_reference(&base.table).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn period_solver_examples() {
        assert_eq!(
            solve_period(&[bits("10")], 2).unwrap(),
            PeriodSolution::Period(bits("01"))
        );
        assert_eq!(
            solve_period(&[bits("110"), bits("101")], 3).unwrap(),
            PeriodSolution::Period(bits("111"))
        );
        assert_eq!(
            solve_period(&[bits("00"), bits("00")], 2).unwrap(),
            PeriodSolution::InsufficientRank { rank: 0 }
        );
        assert!(matches!(
            solve_period(&[bits("10"), bits("01")], 2),
            Err(Error::PromiseViolation)
        ));
        assert!(solve_period(&[bits("101")], 2).is_err());
    }

    #[test]
    fn classification_budget() {
        let ys = [bits("10"), bits("00")];
        assert_eq!(
            classify(&ys, 2, 3).unwrap(),
            PeriodSolution::InsufficientRank { rank: 1 }
        );
        assert_eq!(
            classify(&ys, 2, 2).unwrap(),
            PeriodSolution::Period(bits("01"))
        );
        assert_eq!(
            classify(&[bits("10"), bits("11")], 2, 6).unwrap(),
            PeriodSolution::OneToOneSuspected
        );
        assert_eq!(default_budget(2), 6);
    }

    #[test]
    fn classical_count_is_eight_thirds() {
        assert_eq!(classical_baseline_sp22().unwrap(), Ratio::new(8, 3));
    }

    #[test]
    fn classical_restricted_sets() {
        let reps = sp22_representatives();
        let flipped = |t: &Vec<BitString>| -> Vec<Vec<BitString>> {
            BitString::all(2)
                .map(|f| t.iter().map(|x| x.xor(&f)).collect())
                .collect()
        };
        // A single period is known before any query.
        assert_eq!(
            classical_optimal_queries(&flipped(&reps[0])).unwrap(),
            Ratio::from_integer(0)
        );
        assert_eq!(
            classical_optimal_queries(&reps[..1]).unwrap(),
            Ratio::from_integer(0)
        );
        // Two periods: the first answer only reveals the flips, the second
        // always separates the periods.
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            let mut set = flipped(&reps[a]);
            set.extend(flipped(&reps[b]));
            let e = classical_optimal_queries(&set).unwrap();
            assert_eq!(e, Ratio::from_integer(2));
            assert!(Ratio::from_integer(1) < e && e < Ratio::new(8, 3));
        }
    }

    #[test]
    fn classical_monte_carlo_limits() {
        let all = classical_success_bound(3, 8, 2000, 1).unwrap();
        assert_eq!(all.mean, 1.0);
        let one = classical_success_bound(2, 1, 20_000, 2).unwrap();
        assert!((one.mean - 0.5).abs() < 5.0 * one.std_error.max(1e-3));
        let bounded = classical_success_bound(4, 2, 20_000, 3).unwrap();
        assert!(bounded.mean <= 0.5 + 0.25 + 5.0 * bounded.std_error);
        assert!(classical_success_bound(2, 5, 10, 0).is_err());
    }

    #[test]
    fn expected_runs_edge_cases() {
        let two = bb_catalog(BbId::Six(1), bits("00")).unwrap();
        assert!(matches!(
            expected_runs_to_nonzero(&two, 0, 1, None),
            Err(Error::UndefinedMean)
        ));
        let one = bb_catalog(BbId::Eight(0), bits("00")).unwrap();
        assert!(expected_runs_to_nonzero(&one, 10, 1, None).is_err());
        let est = expected_runs_to_nonzero(&two, 4000, 1, None).unwrap();
        assert!((est.mean - 2.0).abs() < 5.0 * est.std_error);
    }

    #[test]
    fn sample_set_lengths() {
        let mut set = SampleSet::new(2);
        assert!(set.push(bits("101")).is_err());
        set.push(bits("10")).unwrap();
        assert_eq!(set.counts()[&bits("10")], 1);
        assert_eq!(set.counts().len(), 4);
    }

    fn sample_strategy(n: usize) -> impl Strategy<Value = Vec<BitString>> {
        proptest::collection::vec(0u64..(1 << n), 0..8).prop_map(move |vs| {
            vs.into_iter()
                .map(|v| BitString::new(v, n).unwrap())
                .collect()
        })
    }

    proptest! {
        #[test]
        fn solved_period_is_orthogonal(ys in (2usize..7).prop_flat_map(sample_strategy)) {
            let n = ys.first().map_or(2, BitString::len);
            if let Ok(PeriodSolution::Period(s)) = solve_period(&ys, n) {
                prop_assert!(!s.is_zero());
                for y in &ys {
                    prop_assert_eq!(s.dot(y), 0);
                }
            }
        }

        #[test]
        fn rank_matches_brute_force(ys in sample_strategy(4)) {
            let span: std::collections::BTreeSet<u64> = (0u64..1 << ys.len())
                .map(|mask| ys.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).fold(0, |a, (_, y)| a ^ y.value()))
                .collect();
            prop_assert_eq!(1usize << gf2_rank(&ys, 4).unwrap(), span.len());
        }
    }
}
