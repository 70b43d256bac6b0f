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

//! Dense pure-state simulation.
//!
//! Qubit `k` (0-based) lives at bit `num_qubits - 1 - k` of the basis-state
//! index, so a printed ket `|q_1 q_2 … q_n⟩` reads left to right. Global phase
//! is never normalized away; compare states with [`StateVector::overlap`].

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::scalar::Real;

/// Largest register the dense representation accepts.
pub const MAX_QUBITS: usize = 24;

/// Forced outcomes below this Born probability are rejected.
pub const MIN_FORCED_PROBABILITY: f64 = 1e-12;

/// Single-qubit measurement basis.
///
/// `Equatorial { alpha }` projects onto `|α_±⟩ = (|0⟩ ± e^{iα}|1⟩)/√2`;
/// outcome 0 is `|α_+⟩`. Outcome 0 of `Computational` is `|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurementBasis {
    Computational,
    Equatorial { alpha: f64 },
}

impl MeasurementBasis {
    /// `B(π/2)`, the only equatorial basis the Simon programs use.
    pub const Y: MeasurementBasis = MeasurementBasis::Equatorial {
        alpha: std::f64::consts::FRAC_PI_2,
    };

    /// Components `(⟨0|v⟩, ⟨1|v⟩)` of the basis vector selected by `outcome`.
    pub fn vector<T: Real>(&self, outcome: u8) -> [Complex<T>; 2] {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        match *self {
            MeasurementBasis::Computational if outcome == 0 => [one, zero],
            MeasurementBasis::Computational => [zero, one],
            MeasurementBasis::Equatorial { alpha } => {
                let r = T::FRAC_1_SQRT_2();
                let sign = if outcome == 0 { r } else { -r };
                let phase = Complex::from_polar(T::one(), T::lit(alpha));
                [Complex::new(r, T::zero()), phase * sign]
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    /// `exp(-i α Z / 2)`
    Rz(f64),
    Cz,
}

impl Gate {
    fn name(&self) -> &'static str {
        match self {
            Gate::H => "H",
            Gate::X => "X",
            Gate::Y => "Y",
            Gate::Z => "Z",
            Gate::Rz(_) => "Rz",
            Gate::Cz => "CZ",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Gate::Cz => 2,
            _ => 1,
        }
    }

    /// Dense 2×2 matrix of a single-qubit gate.
    pub fn matrix<T: Real>(&self) -> Option<[[Complex<T>; 2]; 2]> {
        let c = |re: T, im: T| Complex::new(re, im);
        let (o, l) = (T::zero(), T::one());
        let r = T::FRAC_1_SQRT_2();
        Some(match *self {
            Gate::H => [[c(r, o), c(r, o)], [c(r, o), c(-r, o)]],
            Gate::X => [[c(o, o), c(l, o)], [c(l, o), c(o, o)]],
            Gate::Y => [[c(o, o), c(o, -l)], [c(o, l), c(o, o)]],
            Gate::Z => [[c(l, o), c(o, o)], [c(o, o), c(-l, o)]],
            Gate::Rz(alpha) => {
                let half = T::lit(alpha / 2.0);
                [
                    [Complex::from_polar(l, -half), c(o, o)],
                    [c(o, o), Complex::from_polar(l, half)],
                ]
            }
            Gate::Cz => return None,
        })
    }
}

/// Result of a single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement<T> {
    pub outcome: u8,
    /// Born probability of `outcome` before the collapse.
    pub probability: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real = f64> {
    num_qubits: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    fn check_capacity(n: usize) -> Result<()> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Capacity {
                what: "qubit count",
                requested: n,
                limit: MAX_QUBITS,
            });
        }
        Ok(())
    }

    /// `|+⟩^⊗n`.
    pub fn new_plus_state(n: usize) -> Result<Self> {
        Self::check_capacity(n)?;
        let amp = T::lit(2f64.powf(-(n as f64) / 2.0));
        Ok(Self {
            num_qubits: n,
            amplitudes: vec![Complex::new(amp, T::zero()); 1 << n],
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        Self::check_capacity(n)?;
        if index >> n != 0 {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} for {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Wraps amplitudes, rescaling them to unit norm.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n = len.trailing_zeros() as usize;
        Self::check_capacity(n)?;
        let mut state = Self {
            num_qubits: n,
            amplitudes,
        };
        state.normalize()?;
        Ok(state)
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm <= T::epsilon() {
            return Err(Error::ZeroNorm);
        }
        let inv = T::one() / norm;
        self.amplitudes.iter_mut().for_each(|a| *a = *a * inv);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_same_size(&self, other: &Self) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::WrongArity {
                gate: gate.name(),
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        for &t in targets {
            self.check_qubit(t)?;
        }
        match (gate, targets) {
            (Gate::Cz, &[a, b]) => {
                if a == b {
                    return Err(Error::DuplicateTargets(a));
                }
                let both = self.mask(a) | self.mask(b);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & both == both {
                        *amp = -*amp;
                    }
                }
            }
            (Gate::Rz(alpha), &[q]) => {
                let half = T::lit(alpha / 2.0);
                let lo = Complex::from_polar(T::one(), -half);
                let hi = Complex::from_polar(T::one(), half);
                let m = self.mask(q);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    *amp = *amp * if i & m == 0 { lo } else { hi };
                }
            }
            (Gate::Z, &[q]) => {
                let m = self.mask(q);
                for (i, amp) in self.amplitudes.iter_mut().enumerate() {
                    if i & m != 0 {
                        *amp = -*amp;
                    }
                }
            }
            (g, &[q]) => {
                let matrix = g.matrix().expect("single-qubit gate");
                self.apply_matrix_unchecked(q, &matrix);
            }
            _ => unreachable!("arity checked above"),
        }
        Ok(())
    }

    /// Applies an arbitrary 2×2 matrix to one qubit.
    pub fn apply_matrix(&mut self, qubit: usize, matrix: &[[Complex<T>; 2]; 2]) -> Result<()> {
        self.check_qubit(qubit)?;
        self.apply_matrix_unchecked(qubit, matrix);
        Ok(())
    }

    fn apply_matrix_unchecked(&mut self, qubit: usize, m: &[[Complex<T>; 2]; 2]) {
        let mask = self.mask(qubit);
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Applies the letters of `p` as a unitary; the sign only changes the
    /// global phase and is ignored.
    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli_len(p)?;
        for (q, &letter) in p.letters().iter().enumerate() {
            match letter {
                Pauli::I => {}
                Pauli::X => self.apply_gate(Gate::X, &[q])?,
                Pauli::Y => self.apply_gate(Gate::Y, &[q])?,
                Pauli::Z => self.apply_gate(Gate::Z, &[q])?,
            }
        }
        Ok(())
    }

    /// Born probabilities of outcomes 0 and 1.
    pub fn probabilities(&self, qubit: usize, basis: MeasurementBasis) -> Result<[T; 2]> {
        self.check_qubit(qubit)?;
        Ok([
            self.outcome_probability(qubit, &basis.vector(0)),
            self.outcome_probability(qubit, &basis.vector(1)),
        ])
    }

    fn outcome_probability(&self, qubit: usize, v: &[Complex<T>; 2]) -> T {
        let mask = self.mask(qubit);
        let (c0, c1) = (v[0].conj(), v[1].conj());
        (0..self.amplitudes.len())
            .filter(|i| i & mask == 0)
            .map(|i| (c0 * self.amplitudes[i] + c1 * self.amplitudes[i | mask]).norm_sqr())
            .sum()
    }

    fn checked_forced(&self, qubit: usize, basis: MeasurementBasis, outcome: u8) -> Result<T> {
        self.check_qubit(qubit)?;
        if outcome > 1 {
            return Err(Error::InvalidArgument(format!("outcome {outcome}")));
        }
        let p = self.outcome_probability(qubit, &basis.vector(outcome));
        if p.as_f64() <= MIN_FORCED_PROBABILITY {
            return Err(Error::ImpossibleBranch {
                qubit,
                outcome,
                probability: p.as_f64(),
            });
        }
        Ok(p)
    }

    /// Projects onto the forced outcome and renormalizes. The measured qubit
    /// stays in the post-measurement basis state.
    pub fn measure_forced(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        outcome: u8,
    ) -> Result<Measurement<T>> {
        let probability = self.checked_forced(qubit, basis, outcome)?;
        let v: [Complex<T>; 2] = basis.vector(outcome);
        let mask = self.mask(qubit);
        let inv = T::one() / probability.sqrt();
        for i in 0..self.amplitudes.len() {
            if i & mask == 0 {
                let j = i | mask;
                let c = (v[0].conj() * self.amplitudes[i] + v[1].conj() * self.amplitudes[j]) * inv;
                self.amplitudes[i] = v[0] * c;
                self.amplitudes[j] = v[1] * c;
            }
        }
        Ok(Measurement {
            outcome,
            probability,
        })
    }

    pub fn measure_sampled<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        basis: MeasurementBasis,
        rng: &mut R,
    ) -> Result<Measurement<T>> {
        let outcome = self.sample_outcome(qubit, basis, rng)?;
        self.measure_forced(qubit, basis, outcome)
    }

    fn sample_outcome<R: Rng + ?Sized>(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
        rng: &mut R,
    ) -> Result<u8> {
        let [p0, p1] = self.probabilities(qubit, basis)?;
        let u: f64 = rng.random();
        Ok(if u * (p0 + p1).as_f64() < p0.as_f64() {
            0
        } else {
            1
        })
    }

    /// Projects `qubit` onto the basis vector of `outcome` and removes it from
    /// the register. Returns the smaller state and the Born probability.
    pub fn collapse_out(
        &self,
        qubit: usize,
        basis: MeasurementBasis,
        outcome: u8,
    ) -> Result<(StateVector<T>, T)> {
        if self.num_qubits < 2 {
            return Err(Error::InvalidArgument(
                "cannot remove the last qubit of a register".into(),
            ));
        }
        let probability = self.checked_forced(qubit, basis, outcome)?;
        let v: [Complex<T>; 2] = basis.vector(outcome);
        let (c0, c1) = (v[0].conj(), v[1].conj());
        let low_bits = self.num_qubits - 1 - qubit;
        let low_mask = (1usize << low_bits) - 1;
        let inv = T::one() / probability.sqrt();
        let amplitudes = (0..self.amplitudes.len() / 2)
            .map(|k| {
                let i = ((k & !low_mask) << 1) | (k & low_mask);
                let j = i | (1 << low_bits);
                (c0 * self.amplitudes[i] + c1 * self.amplitudes[j]) * inv
            })
            .collect();
        Ok((
            StateVector {
                num_qubits: self.num_qubits - 1,
                amplitudes,
            },
            probability,
        ))
    }

    fn check_pauli_len(&self, p: &PauliString) -> Result<()> {
        if p.len() != self.num_qubits {
            return Err(Error::LengthMismatch {
                expected: self.num_qubits,
                got: p.len(),
            });
        }
        Ok(())
    }

    /// `sign · ⟨ψ|P|ψ⟩`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<T> {
        self.check_pauli_len(p)?;
        let (mut xmask, mut zmask, mut ny) = (0usize, 0usize, 0u32);
        for (q, &letter) in p.letters().iter().enumerate() {
            let m = self.mask(q);
            if letter.flips() {
                xmask |= m;
            }
            if letter.phases() {
                zmask |= m;
            }
            if letter == Pauli::Y {
                ny += 1;
            }
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (b, &amp) in self.amplitudes.iter().enumerate() {
            let term = self.amplitudes[b ^ xmask].conj() * amp;
            if (b & zmask).count_ones() % 2 == 0 {
                acc = acc + term;
            } else {
                acc = acc - term;
            }
        }
        // i^{#Y}
        let acc = match ny % 4 {
            0 => acc,
            1 => Complex::new(-acc.im, acc.re),
            2 => -acc,
            _ => Complex::new(acc.im, -acc.re),
        };
        debug_assert!(
            acc.im.abs().as_f64() < 1e3 * T::TOLERANCE,
            "Hermitian expectation has imaginary part {}",
            acc.im
        );
        Ok(if p.is_negative() { -acc.re } else { acc.re })
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &StateVector<T>) -> Result<T> {
        self.check_same_size(other)?;
        let inner = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            });
        Ok(inner.norm_sqr())
    }

    /// Joint outcome distribution of `qubits` measured computationally. The
    /// first listed qubit is the most significant bit of the result index.
    pub fn marginal(&self, qubits: &[usize]) -> Result<Vec<T>> {
        for &q in qubits {
            self.check_qubit(q)?;
        }
        let masks: Vec<usize> = qubits.iter().map(|&q| self.mask(q)).collect();
        let mut dist = vec![T::zero(); 1 << qubits.len()];
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let key = masks
                .iter()
                .fold(0usize, |k, &m| (k << 1) | usize::from(i & m != 0));
            dist[key] = dist[key] + amp.norm_sqr();
        }
        Ok(dist)
    }

    /// Draws one computational basis index from the Born distribution.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.norm_sqr().as_f64();
        let mut u = rng.random::<f64>() * total;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            u -= amp.norm_sqr().as_f64();
            if u < 0.0 {
                return i;
            }
        }
        self.amplitudes
            .iter()
            .rposition(|a| a.norm_sqr() > T::zero())
            .unwrap_or(0)
    }

    /// Tensor product `self ⊗ other`, `self` taking the leading qubits.
    pub fn kron(&self, other: &StateVector<T>) -> Result<StateVector<T>> {
        let n = self.num_qubits + other.num_qubits;
        Self::check_capacity(n)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| *a * *b))
            .collect();
        Ok(StateVector {
            num_qubits: n,
            amplitudes,
        })
    }

    /// Converts to another precision.
    pub fn cast<U: Real>(&self) -> StateVector<U> {
        StateVector {
            num_qubits: self.num_qubits,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|a| Complex::new(U::lit(a.re.as_f64()), U::lit(a.im.as_f64())))
                .collect(),
        }
    }
}
