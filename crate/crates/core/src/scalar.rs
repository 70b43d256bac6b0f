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

//! Scalar abstraction shared by every amplitude-carrying type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating-point type backing complex amplitudes.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Absolute tolerance for exact-math comparisons at this precision.
    const TOLERANCE: f64;

    /// Converts an `f64` literal or parameter.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 is representable")
    }

    fn tolerance() -> Self {
        Self::lit(Self::TOLERANCE)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl Real for f64 {
    const TOLERANCE: f64 = 1e-10;
}

impl Real for f32 {
    const TOLERANCE: f64 = 1e-5;
}
