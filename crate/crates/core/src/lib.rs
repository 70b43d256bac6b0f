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

//! One-way (measurement-based) simulation of Simon's problem on small
//! cluster states.
//!
//! The crate prepares graph states, runs measurement patterns with
//! feed-forward, samples the hidden-period black boxes and recovers the
//! period over GF(2). Tomography and noise modules estimate stabilizer
//! fidelities and an entanglement witness under simple noise models.
//!
//! Qubit `k` of an `n`-qubit register is bit `n - 1 - k` of a basis index,
//! so kets print left to right. Graph vertices are 1-based.

pub mod bits;
pub mod cli;
pub mod error;
pub mod graph_state;
pub mod mbqc_engine;
pub mod noise;
pub mod pauli;
pub mod resource_compiler;
pub mod scalar;
pub mod simon;
pub mod statevector;
pub mod tomography;

pub use bits::BitString;
pub use error::{Error, Result};
pub use graph_state::{Graph, ResourceId, Role, Vertex};
pub use mbqc_engine::{FeedForwardForm, FeedForwardRule, Pattern, Step};
pub use noise::NoiseSpec;
pub use pauli::{Pauli, PauliString};
pub use scalar::Real;
pub use simon::{BbId, Period, PeriodSolution, SimonInstance};
pub use statevector::{Gate, MeasurementBasis};

/// Double-precision state vector.
pub type StateVector = statevector::StateVector<f64>;
/// Single-precision state vector.
pub type StateVectorF32 = statevector::StateVector<f32>;
