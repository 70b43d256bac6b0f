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

use thiserror::Error;

use crate::graph_state::Vertex;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} exceeds capacity: {requested} > {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },
    #[error("qubit index {index} out of range for {num_qubits} qubits")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTargets(usize),
    #[error("gate {gate} takes {expected} target(s), got {got}")]
    WrongArity {
        gate: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("forced outcome {outcome} on qubit {qubit} has probability {probability:e}")]
    ImpossibleBranch {
        qubit: usize,
        outcome: u8,
        probability: f64,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("amplitude vector of length {0} is not a nonzero power of two")]
    NotPowerOfTwo(usize),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("product of anticommuting Pauli strings {0} and {1} is not Hermitian")]
    AnticommutingProduct(String, String),
    #[error("cannot parse {kind} from {input:?}")]
    Parse { kind: &'static str, input: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("malformed pattern: {0}")]
    MalformedPattern(String),
    #[error("feed-forward needs the outcome of qubit {0}, which has not been measured")]
    MissingOutcome(Vertex),
    #[error("unknown black box {0:?}")]
    UnknownBlackBox(String),
    #[error("invalid selection: {0}")]
    InvalidSelection(String),
    #[error("samples span the full space, which contradicts the two-to-one promise")]
    PromiseViolation,
    #[error("mean of zero trials is undefined")]
    UndefinedMean,
    #[error("invalid noise specification: {0}")]
    InvalidNoise(String),
    #[error("target fidelity {target} is unreachable (reachable range ({floor}, 1])")]
    UnreachableFidelity { target: f64, floor: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
