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

//! Ket arithmetic for writing reference states term by term, plus
//! small fixtures shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use simon_mbqc::{BitString, PauliString, StateVector, Vertex};

/// Unnormalized ket; qubit 0 is the leftmost factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket(pub Vec<Complex64>);

fn single(c: char) -> [Complex64; 2] {
    let r = FRAC_1_SQRT_2;
    let re = |a: f64, b: f64| [Complex64::new(a, 0.0), Complex64::new(b, 0.0)];
    match c {
        '0' => re(1.0, 0.0),
        '1' => re(0.0, 1.0),
        '+' => re(r, r),
        '-' => re(r, -r),
        'i' => [Complex64::new(r, 0.0), Complex64::new(0.0, r)],
        'j' => [Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
        _ => panic!("unknown ket symbol {c:?}"),
    }
}

/// Product ket from symbols `0 1 + -`, with `i`/`j` for `|±i⟩`.
pub fn ket(symbols: &str) -> Ket {
    symbols
        .chars()
        .fold(Ket(vec![Complex64::new(1.0, 0.0)]), |acc, c| {
            let [a, b] = single(c);
            Ket(acc.0.iter().flat_map(|x| [x * a, x * b]).collect())
        })
}

impl Ket {
    pub fn kron(&self, other: &Ket) -> Ket {
        Ket(self
            .0
            .iter()
            .flat_map(|a| other.0.iter().map(move |b| a * b))
            .collect())
    }

    pub fn scale(&self, c: Complex64) -> Ket {
        Ket(self.0.iter().map(|a| a * c).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn state(&self) -> StateVector {
        StateVector::from_amplitudes(self.0.clone()).expect("nonzero ket")
    }
}

impl Add for Ket {
    type Output = Ket;

    fn add(self, rhs: Ket) -> Ket {
        assert_eq!(self.0.len(), rhs.0.len(), "ket sizes differ");
        Ket(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for Ket {
    type Output = Ket;

    fn sub(self, rhs: Ket) -> Ket {
        self + rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Ket> for Complex64 {
    type Output = Ket;

    fn mul(self, rhs: Ket) -> Ket {
        rhs.scale(self)
    }
}

impl Mul<Ket> for f64 {
    type Output = Ket;

    fn mul(self, rhs: Ket) -> Ket {
        rhs.scale(Complex64::new(self, 0.0))
    }
}

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reference six-qubit resource: linear cluster on 1..5 next to `|+⟩_6`.
pub fn reference_six_qubit_resource() -> Ket {
    let left = ket("+0") + ket("-1");
    let left_minus = ket("+0") - ket("-1");
    let right = ket("0+") + ket("1-");
    let right_minus = ket("0+") - ket("1-");
    let cluster = left.kron(&ket("0")).kron(&right) + left_minus.kron(&ket("1")).kron(&right_minus);
    (1.0 / (2.0 * 2f64.sqrt()) * cluster).kron(&ket("+"))
}

/// Reference eight-qubit resource. The operator between the second and third
/// products is missing in the source expression and is read as `+`.
pub fn reference_eight_qubit_resource() -> Ket {
    let pair = |a: &str, b: &str, c: &str, d: &str| (ket(a) + ket(b)).kron(&(ket(c) + ket(d)));
    0.25 * (pair("0+0+0", "0-1-0", "0++", "1--")
        + pair("0+0-1", "0-1+1", "1+-", "0-+")
        + pair("1+1+1", "1-0-1", "1++", "0--")
        + pair("1+1-0", "1-0+0", "0+-", "1-+"))
}

/// Reference fidelity expansion of the five-qubit linear cluster, without the
/// leading identity.
pub const REFERENCE_FIDELITY_TERMS: &str =
    "+IIIZX+IIZXZ+IIZYY+IZXIX+IZXZI-IZYXY+IZYYZ+XIXIX+XIXZI-XIYXY\
+XIYYZ+XZIII+XZIZX+XZZXZ+XZZYY-YXXXY+YXXYZ-YXYIX-YXYZI+YYIXZ\
+YYIYY+YYZII+YYZZX+ZXIXZ+ZXIYY+ZXZII+ZXZZX+ZYXXY-ZYXYZ+ZYYIX+ZYYZI";

pub fn reference_fidelity_terms() -> Vec<PauliString> {
    let s = REFERENCE_FIDELITY_TERMS;
    (0..s.len())
        .step_by(6)
        .map(|k| s[k..k + 6].parse().expect("signed Pauli string"))
        .collect()
}

/// Reference final states for outcomes `s_2 = s_4 = 0` on qubits 1, 3, 5, 6,
/// one per period 01, 10, 11.
pub fn reference_final_states() -> [(&'static str, Ket); 3] {
    [
        ("01", ket("0-00") + ket("1+00")),
        ("10", ket("0+10") + ket("0-00")),
        ("11", ket("1+10") + ket("0-00")),
    ]
}

/// Reference state of qubits 1, 3, 5, 6 for the s = 01 program after the
/// oracle measurements and before any feed-forward, at `s_2 = s_4 = 0`.
pub fn reference_s01_after_oracle() -> Ket {
    let q13 =
        (ket("0") + I * ket("1")).kron(&ket("0")) + (I * (ket("0") - I * ket("1"))).kron(&ket("1"));
    q13.kron(&(ket("0") + ket("1"))).kron(&ket("+"))
}

pub fn bits(s: &str) -> BitString {
    s.parse().expect("bit string")
}

pub fn outcomes(pairs: &[(Vertex, u8)]) -> BTreeMap<Vertex, u8> {
    pairs.iter().copied().collect()
}

/// All flip masks of a two-bit ancilla register.
pub fn flip_masks() -> Vec<BitString> {
    BitString::all(2).collect()
}

/// Ordinary least squares fit `y = a + b x` and its coefficient of
/// determination.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a - b * x).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (a, b, 1.0 - ss_res / ss_tot)
}
