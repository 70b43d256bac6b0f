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

//! Minimal SP_nn resources and compilation of black-box selections into
//! measurement patterns.
//!
//! Layout for register size `n`: query vertices `1..=n`, ancilla vertices
//! `n+1..=2n`, then one bridge per controllable CNOT. Bridges `(i, j)` for
//! query `i` in `1..=n` and ancilla `j` in `1..n` come first in lexicographic
//! order, followed by the final bridge `(n, n)`. A bridge measured in
//! `B(π/2)` applies `(Rz(π/2) ⊗ Rz(π/2)) CZ` between its neighbours; a
//! computational measurement removes it.
//!
//! Feed-forward: every bridge outcome leaves a `Z` byproduct on both of its
//! neighbours whatever its basis, and each active bridge adds `Rz(π/2)` to
//! both. A query or ancilla vertex adjacent to `k` active bridges therefore
//! receives `X^{⊕ adjacent outcomes} H Rz(-kπ/2)`, which also supplies the
//! Hadamards that turn the CZs into CNOTs and close the algorithm.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::graph_state::{canonical_resource, Graph, ResourceId, Role, Vertex, MAX_SIMULATED_SPNN};
use crate::mbqc_engine::{sample_shots, FeedForwardForm, FeedForwardRule, Pattern, Step};
use crate::noise::NoiseSpec;
use crate::simon::{Period, SampleSet};

/// CNOT from query bit `.0` onto ancilla bit `.1`, both 1-based.
pub type Cnot = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpnnResource {
    pub n: usize,
    pub graph: Graph,
    pub bridges: BTreeMap<Cnot, Vertex>,
    pub queries: Vec<Vertex>,
    pub ancillas: Vec<Vertex>,
}

impl SpnnResource {
    pub fn query(&self, i: usize) -> Vertex {
        self.queries[i - 1]
    }

    pub fn ancilla(&self, j: usize) -> Vertex {
        self.ancillas[j - 1]
    }

    /// Bridges adjacent to `v` with the CNOT each one implements.
    pub fn bridges_at(&self, v: Vertex) -> Vec<(Cnot, Vertex)> {
        self.bridges
            .iter()
            .filter(|(&(i, j), _)| self.query(i) == v || self.ancilla(j) == v)
            .map(|(&c, &b)| (c, b))
            .collect()
    }
}

/// Vertex, edge and bridge counts of an SP_nn layout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceCounts {
    pub n: usize,
    pub qubits: usize,
    pub edges: usize,
    pub cnots: usize,
}

pub fn spnn_counts(n: usize) -> ResourceCounts {
    ResourceCounts {
        n,
        qubits: n * n + n + 1,
        edges: 2 * n * n - 2 * n + 2,
        cnots: n * (n - 1) + 1,
    }
}

pub fn build_spnn_resource(n: usize) -> Result<SpnnResource> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "SP_nn needs n >= 2, got {n}"
        )));
    }
    let cnots: Vec<Cnot> = (1..=n)
        .flat_map(|i| (1..n).map(move |j| (i, j)))
        .chain(std::iter::once((n, n)))
        .collect();
    let mut graph = Graph::new(2 * n + cnots.len());
    let queries: Vec<Vertex> = (1..=n).collect();
    let ancillas: Vec<Vertex> = (n + 1..=2 * n).collect();
    let mut bridges = BTreeMap::new();
    for (k, &(i, j)) in cnots.iter().enumerate() {
        let b = 2 * n + 1 + k;
        graph.add_edge(queries[i - 1], b)?;
        graph.add_edge(b, ancillas[j - 1])?;
        graph.set_role(b, Role::Bridge)?;
        bridges.insert((i, j), b);
    }
    for &q in &queries {
        graph.set_role(q, Role::Query)?;
    }
    for &a in &ancillas {
        graph.set_role(a, Role::Ancilla)?;
    }
    Ok(SpnnResource {
        n,
        graph,
        bridges,
        queries,
        ancillas,
    })
}

/// Black box chosen from the SP_nn representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpnnSelection {
    pub period: Period,
    pub flips: BitString,
}

impl SpnnSelection {
    pub fn new(period: Period, flips: BitString) -> Result<Self> {
        if let Period::TwoToOne(s) = period {
            if s.is_zero() {
                return Err(Error::InvalidSelection("period must be nonzero".into()));
            }
            if s.len() != flips.len() {
                return Err(Error::InvalidSelection(format!(
                    "period has {} bits, flips {}",
                    s.len(),
                    flips.len()
                )));
            }
        }
        Ok(Self { period, flips })
    }

    fn check(&self, n: usize) -> Result<()> {
        let len = match self.period {
            Period::TwoToOne(s) => s.len(),
            Period::OneToOne => n,
        };
        if len != n || self.flips.len() != n {
            return Err(Error::InvalidSelection(format!(
                "selection for n = {len} on an n = {n} resource"
            )));
        }
        Ok(())
    }
}

/// Logical operation applied to one ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaOp {
    /// `z_l ⊕= x_l`.
    Copy(usize),
    /// `z_i ⊕= x_i ⊕ x_j`.
    Check(usize, usize),
}

/// Per-ancilla operations of a selection. A 1-1 selection copies every bit.
/// A 2-1 selection copies the bits where `s` is 0 and chains pairwise checks
/// over consecutive ones `p_1 < … < p_k` of `s`, each check targeting the
/// ancilla of its first bit; ancilla `p_k` stays untouched.
pub fn ancilla_ops(n: usize, period: Period) -> Result<Vec<AncillaOp>> {
    match period {
        Period::OneToOne => Ok((1..=n).map(AncillaOp::Copy).collect()),
        Period::TwoToOne(s) => {
            if s.len() != n || s.is_zero() {
                return Err(Error::InvalidSelection(format!("period {s} for n = {n}")));
            }
            let ones: Vec<usize> = s.ones().into_iter().map(|k| k + 1).collect();
            let mut ops: Vec<AncillaOp> = (1..=n)
                .filter(|l| !ones.contains(l))
                .map(AncillaOp::Copy)
                .collect();
            ops.extend(ones.windows(2).map(|w| AncillaOp::Check(w[0], w[1])));
            Ok(ops)
        }
    }
}

/// CNOTs switched on by a selection, sorted.
pub fn active_cnots(n: usize, period: Period) -> Result<Vec<Cnot>> {
    let mut cnots: Vec<Cnot> = ancilla_ops(n, period)?
        .into_iter()
        .flat_map(|op| match op {
            AncillaOp::Copy(l) => vec![(l, l)],
            AncillaOp::Check(i, j) => vec![(i, i), (j, i)],
        })
        .collect();
    cnots.sort_unstable();
    Ok(cnots)
}

/// `f(x) ⊕ flips` for every `x`, computed from the active CNOTs.
pub fn selection_table(n: usize, sel: &SpnnSelection) -> Result<Vec<BitString>> {
    sel.check(n)?;
    let cnots = active_cnots(n, sel.period)?;
    BitString::all(n)
        .map(|x| {
            let z = cnots.iter().fold(BitString::zeros(n), |z, &(i, j)| {
                z.with_bit(j - 1, z.bit(j - 1) ^ x.bit(i - 1))
            });
            Ok(z.xor(&sel.flips))
        })
        .collect()
}

/// Measurement pattern realising `sel` on `r`.
pub fn compile_selection(r: &SpnnResource, sel: &SpnnSelection) -> Result<Pattern> {
    sel.check(r.n)?;
    let active: BTreeSet<Cnot> = active_cnots(r.n, sel.period)?.into_iter().collect();
    for c in &active {
        if !r.bridges.contains_key(c) {
            return Err(Error::InvalidSelection(format!("no bridge for CNOT {c:?}")));
        }
    }
    let steps = r
        .bridges
        .iter()
        .map(|(c, &b)| {
            if active.contains(c) {
                Step::equatorial(b, FRAC_PI_2)
            } else {
                Step::computational(b)
            }
        })
        .collect();
    let rules = r
        .queries
        .iter()
        .chain(&r.ancillas)
        .map(|&v| {
            let adjacent = r.bridges_at(v);
            let k = adjacent.iter().filter(|(c, _)| active.contains(c)).count();
            let sources = adjacent.iter().map(|&(_, b)| b).collect();
            FeedForwardRule::new(v, FeedForwardForm::from_quarter_turns(k as u8), sources)
        })
        .collect();
    Pattern::new(
        ResourceId::Spnn(r.n),
        steps,
        rules,
        r.queries.clone(),
        r.ancillas.clone(),
        sel.flips,
    )
}

/// Samples the compiled selection; `n` is limited by the dense simulator.
pub fn run_spnn(
    r: &SpnnResource,
    sel: &SpnnSelection,
    shots: usize,
    seed: u64,
    noise: Option<&NoiseSpec>,
) -> Result<SampleSet> {
    if r.n > MAX_SIMULATED_SPNN {
        return Err(Error::Capacity {
            what: "simulated SP_nn register",
            requested: r.n,
            limit: MAX_SIMULATED_SPNN,
        });
    }
    let pattern = compile_selection(r, sel)?;
    let (_, state) = canonical_resource::<f64>(ResourceId::Spnn(r.n))?;
    let records = sample_shots(&state, &pattern, shots, seed, noise)?;
    SampleSet::from_samples(r.n, records.into_iter().map(|rec| rec.y).collect())
}
