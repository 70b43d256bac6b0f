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

//! Graphs, cluster states and their stabilizer groups.
//!
//! Vertices are numbered from 1; vertex `v` is statevector qubit `v - 1`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::resource_compiler;
use crate::scalar::Real;
use crate::statevector::{Gate, StateVector, MAX_QUBITS};

pub type Vertex = usize;

/// Largest graph whose full stabilizer group is enumerated.
pub const MAX_GROUP_VERTICES: usize = 12;

/// Largest SP_nn register that still fits the dense simulator.
pub const MAX_SIMULATED_SPNN: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Query,
    Ancilla,
    Bridge,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Query => "query",
            Role::Ancilla => "ancilla",
            Role::Bridge => "bridge",
        }
    }
}

/// Simple undirected graph on vertices `1..=num_vertices`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    edges: BTreeSet<(Vertex, Vertex)>,
    roles: BTreeMap<Vertex, Role>,
}

impl Graph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: BTreeSet::new(),
            roles: BTreeMap::new(),
        }
    }

    pub fn with_edges(num_vertices: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Self::new(num_vertices);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v == 0 || v > self.num_vertices {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} outside 1..={}",
                self.num_vertices
            )));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) -> Result<()> {
        self.check_vertex(a)?;
        self.check_vertex(b)?;
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop on vertex {a}")));
        }
        if !self.edges.insert((a.min(b), a.max(b))) {
            return Err(Error::InvalidGraph(format!("duplicate edge {a}-{b}")));
        }
        Ok(())
    }

    pub fn set_role(&mut self, v: Vertex, role: Role) -> Result<()> {
        self.check_vertex(v)?;
        self.roles.insert(v, role);
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(smaller, larger)` pairs in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn role(&self, v: Vertex) -> Option<Role> {
        self.roles.get(&v).copied()
    }

    pub fn roles(&self) -> &BTreeMap<Vertex, Role> {
        &self.roles
    }

    pub fn vertices_with_role(&self, role: Role) -> Vec<Vertex> {
        self.roles
            .iter()
            .filter(|(_, &r)| r == role)
            .map(|(&v, _)| v)
            .collect()
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| match v {
                _ if a == v => Some(b),
                _ if b == v => Some(a),
                _ => None,
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// A vertex without edges stays an unentangled `|+⟩` factor.
    pub fn is_detached(&self, v: Vertex) -> bool {
        self.degree(v) == 0
    }

    /// Graphviz rendering; roles and detachment become node attributes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {name} {{\n");
        for v in 1..=self.num_vertices {
            let mut attrs = Vec::new();
            if let Some(role) = self.role(v) {
                attrs.push(format!("role=\"{}\"", role.as_str()));
                let color = match role {
                    Role::Query => "lightblue",
                    Role::Ancilla => "lightgreen",
                    Role::Bridge => "lightgray",
                };
                attrs.push(format!("style=filled, fillcolor={color}"));
            }
            if self.is_detached(v) {
                attrs.push("detached=true".into());
            }
            if attrs.is_empty() {
                let _ = writeln!(out, "  {v};");
            } else {
                let _ = writeln!(out, "  {v} [{}];", attrs.join(", "));
            }
        }
        for (a, b) in self.edges() {
            let _ = writeln!(out, "  {a} -- {b};");
        }
        out.push_str("}\n");
        out
    }
}

/// `∏_{(a,b)} CZ_{ab} |+⟩^⊗n`.
pub fn build_cluster<T: Real>(g: &Graph) -> Result<StateVector<T>> {
    if g.num_vertices() > MAX_QUBITS {
        return Err(Error::Capacity {
            what: "cluster vertices",
            requested: g.num_vertices(),
            limit: MAX_QUBITS,
        });
    }
    let mut state = StateVector::new_plus_state(g.num_vertices())?;
    for (a, b) in g.edges() {
        state.apply_gate(Gate::Cz, &[a - 1, b - 1])?;
    }
    Ok(state)
}

/// `K_v = X_v ∏_{w ∈ N(v)} Z_w`.
pub fn stabilizer_generator(g: &Graph, v: Vertex) -> Result<PauliString> {
    g.check_vertex(v)?;
    let mut letters = vec![Pauli::I; g.num_vertices()];
    letters[v - 1] = Pauli::X;
    for w in g.neighbors(v) {
        letters[w - 1] = Pauli::Z;
    }
    Ok(PauliString::new(false, letters))
}

/// All `2^n` products of the generators. Element `k` is the ordered product
/// of `K_v` over the set bits of `k`, vertex 1 on the most significant bit,
/// so element 0 is the identity.
pub fn stabilizer_group(g: &Graph) -> Result<Vec<PauliString>> {
    let n = g.num_vertices();
    if n == 0 || n > MAX_GROUP_VERTICES {
        return Err(Error::Capacity {
            what: "stabilizer group vertices",
            requested: n,
            limit: MAX_GROUP_VERTICES,
        });
    }
    let generators = (1..=n)
        .map(|v| stabilizer_generator(g, v))
        .collect::<Result<Vec<_>>>()?;
    let mut group = Vec::with_capacity(1 << n);
    group.push(PauliString::identity(n));
    for k in generators.iter().rev() {
        let extended = group.iter().map(|p| k.mul(p)).collect::<Result<Vec<_>>>()?;
        group.extend(extended);
    }
    Ok(group)
}

/// The fixed resources used by the programs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceId {
    /// Five-qubit linear cluster 1-2-3-4-5.
    LinearCluster5,
    /// Linear 1-2-3-4-5 plus the detached vertex 6.
    SixQubitSp22,
    /// Ring 1-2-3-4-5-7-6-8-1.
    EightQubitSp22,
    /// Minimal SP_nn resource with `n² + n + 1` vertices.
    Spnn(usize),
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResourceId::LinearCluster5 => f.write_str("linear5"),
            ResourceId::SixQubitSp22 => f.write_str("sp22-six"),
            ResourceId::EightQubitSp22 => f.write_str("sp22-eight"),
            ResourceId::Spnn(n) => write!(f, "spnn-{n}"),
        }
    }
}

impl FromStr for ResourceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = || Error::Parse {
            kind: "resource id",
            input: s.to_string(),
        };
        match s {
            "linear5" => Ok(ResourceId::LinearCluster5),
            "sp22-six" => Ok(ResourceId::SixQubitSp22),
            "sp22-eight" => Ok(ResourceId::EightQubitSp22),
            _ => s
                .strip_prefix("spnn-")
                .and_then(|n| n.parse().ok())
                .map(ResourceId::Spnn)
                .ok_or_else(parse_err),
        }
    }
}

impl Serialize for ResourceId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResourceId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

const LINEAR5_EDGES: [(Vertex, Vertex); 4] = [(1, 2), (2, 3), (3, 4), (4, 5)];
const RING8_EDGES: [(Vertex, Vertex); 8] = [
    (1, 2),
    (2, 3),
    (3, 4),
    (4, 5),
    (5, 7),
    (7, 6),
    (6, 8),
    (8, 1),
];

fn labelled(n: usize, edges: &[(Vertex, Vertex)], roles: &[(Vertex, Role)]) -> Result<Graph> {
    let mut g = Graph::with_edges(n, edges)?;
    for &(v, r) in roles {
        g.set_role(v, r)?;
    }
    Ok(g)
}

/// Graph of a canonical resource with roles populated.
pub fn canonical_graph(id: ResourceId) -> Result<Graph> {
    use Role::*;
    match id {
        ResourceId::LinearCluster5 => labelled(
            5,
            &LINEAR5_EDGES,
            &[
                (1, Query),
                (2, Bridge),
                (3, Ancilla),
                (4, Bridge),
                (5, Query),
            ],
        ),
        ResourceId::SixQubitSp22 => labelled(
            6,
            &LINEAR5_EDGES,
            &[
                (1, Query),
                (2, Bridge),
                (3, Ancilla),
                (4, Bridge),
                (5, Query),
                (6, Ancilla),
            ],
        ),
        ResourceId::EightQubitSp22 => labelled(
            8,
            &RING8_EDGES,
            &[
                (1, Query),
                (2, Bridge),
                (3, Ancilla),
                (4, Bridge),
                (5, Query),
                (6, Ancilla),
                (7, Bridge),
                (8, Bridge),
            ],
        ),
        ResourceId::Spnn(n) => Ok(resource_compiler::build_spnn_resource(n)?.graph),
    }
}

/// Graph plus its cluster state.
pub fn canonical_resource<T: Real>(id: ResourceId) -> Result<(Graph, StateVector<T>)> {
    if let ResourceId::Spnn(n) = id {
        if n > MAX_SIMULATED_SPNN {
            return Err(Error::Capacity {
                what: "simulated SP_nn register",
                requested: n,
                limit: MAX_SIMULATED_SPNN,
            });
        }
    }
    let g = canonical_graph(id)?;
    let state = build_cluster(&g)?;
    Ok((g, state))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;

    type Sv = StateVector<f64>;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = Graph::new(3);
        assert!(g.add_edge(1, 1).is_err());
        assert!(g.add_edge(0, 2).is_err());
        assert!(g.add_edge(1, 4).is_err());
        g.add_edge(2, 1).unwrap();
        assert!(g.add_edge(1, 2).is_err());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(1, 2)]);
    }

    #[test]
    fn empty_graph_is_plus_product() {
        let s: Sv = build_cluster(&Graph::new(2)).unwrap();
        assert_abs_diff_eq!(
            s.overlap(&Sv::new_plus_state(2).unwrap()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn single_edge_is_two_qubit_cluster() {
        let s: Sv = build_cluster(&Graph::with_edges(2, &[(1, 2)]).unwrap()).unwrap();
        let amps: Vec<f64> = s.amplitudes().iter().map(|a| a.re).collect();
        assert_eq!(amps, vec![0.5, 0.5, 0.5, -0.5]);
    }

    #[test]
    fn small_groups() {
        let single = stabilizer_group(&Graph::new(1)).unwrap();
        assert_eq!(single, vec![ps("I"), ps("X")]);
        let pair: BTreeSet<_> = stabilizer_group(&Graph::with_edges(2, &[(1, 2)]).unwrap())
            .unwrap()
            .into_iter()
            .collect();
        let expected: BTreeSet<_> = ["II", "XZ", "ZX", "YY"].into_iter().map(ps).collect();
        assert_eq!(pair, expected);
    }

    #[test]
    fn linear_cluster_generators() {
        let g = canonical_graph(ResourceId::LinearCluster5).unwrap();
        assert_eq!(stabilizer_generator(&g, 1).unwrap(), ps("XZIII"));
        assert_eq!(stabilizer_generator(&g, 3).unwrap(), ps("IZXZI"));
        let s: Sv = build_cluster(&g).unwrap();
        assert_abs_diff_eq!(
            s.pauli_expectation(&ps("XZIII")).unwrap(),
            1.0,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            s.pauli_expectation(&ps("XXXXX")).unwrap(),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn canonical_shapes_and_roles() {
        let six = canonical_graph(ResourceId::SixQubitSp22).unwrap();
        assert_eq!(six.num_vertices(), 6);
        assert_eq!(six.edges().collect::<Vec<_>>(), LINEAR5_EDGES.to_vec());
        assert!(six.is_detached(6));
        assert_eq!(six.vertices_with_role(Role::Query), vec![1, 5]);
        assert_eq!(six.vertices_with_role(Role::Ancilla), vec![3, 6]);
        assert_eq!(six.vertices_with_role(Role::Bridge), vec![2, 4]);
        let eight = canonical_graph(ResourceId::EightQubitSp22).unwrap();
        assert_eq!((eight.num_vertices(), eight.num_edges()), (8, 8));
        assert!((1..=8).all(|v| eight.degree(v) == 2));
        let spnn = canonical_graph(ResourceId::Spnn(2)).unwrap();
        assert_eq!((spnn.num_vertices(), spnn.num_edges()), (7, 6));
        assert!(canonical_resource::<f64>(ResourceId::Spnn(5)).is_err());
    }

    #[test]
    fn resource_ids_round_trip() {
        for id in [
            ResourceId::LinearCluster5,
            ResourceId::SixQubitSp22,
            ResourceId::EightQubitSp22,
            ResourceId::Spnn(3),
        ] {
            assert_eq!(id.to_string().parse::<ResourceId>().unwrap(), id);
        }
        assert!("spnn-x".parse::<ResourceId>().is_err());
    }

    #[test]
    fn dot_export_lists_every_vertex() {
        let dot = canonical_graph(ResourceId::SixQubitSp22)
            .unwrap()
            .to_dot("sp22");
        assert!(dot.starts_with("graph sp22 {"));
        assert!(dot
            .contains("6 [role=\"ancilla\", style=filled, fillcolor=lightgreen, detached=true];"));
        assert!(dot.contains("4 -- 5;"));
        assert!(dot.trim_end().ends_with('}'));
    }

    fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
        (2..=max_n).prop_flat_map(|n| {
            let pairs: Vec<(Vertex, Vertex)> = (1..=n)
                .flat_map(|a| (a + 1..=n).map(move |b| (a, b)))
                .collect();
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len())
                .prop_map(move |edges| Graph::with_edges(n, &edges).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn group_elements_stabilize_cluster(g in graph_strategy(7)) {
            let s: Sv = build_cluster(&g).unwrap();
            let group = stabilizer_group(&g).unwrap();
            prop_assert_eq!(group.len(), 1 << g.num_vertices());
            for p in &group {
                prop_assert!((s.pauli_expectation(p).unwrap() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn group_is_closed(g in graph_strategy(5)) {
            let group = stabilizer_group(&g).unwrap();
            let set: BTreeSet<_> = group.iter().cloned().collect();
            prop_assert_eq!(set.len(), group.len());
            for a in &group {
                for b in &group {
                    prop_assert!(set.contains(&a.mul(b).unwrap()));
                }
            }
        }

        #[test]
        fn edge_order_is_irrelevant(g in graph_strategy(7), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut edges: Vec<_> = g.edges().collect();
            edges.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let mut s = Sv::new_plus_state(g.num_vertices()).unwrap();
            for (a, b) in edges {
                s.apply_gate(Gate::Cz, &[b - 1, a - 1]).unwrap();
            }
            let reference: Sv = build_cluster(&g).unwrap();
            prop_assert!((s.overlap(&reference).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}
