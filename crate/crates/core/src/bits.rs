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

//! Fixed-length bit strings in register order.
//!
//! Character `k` of the printed string (qubit `k + 1`) is bit `len - 1 - k` of
//! the packed integer, the same convention the state vector uses for qubits.
//! `"01"` therefore packs to `1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_BITS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u8,
    value: u64,
}

impl BitString {
    pub fn new(value: u64, len: usize) -> Result<Self> {
        if len > MAX_BITS {
            return Err(Error::Capacity {
                what: "bit string length",
                requested: len,
                limit: MAX_BITS,
            });
        }
        if len < MAX_BITS && value >> len != 0 {
            return Err(Error::InvalidArgument(format!(
                "value {value} does not fit in {len} bits"
            )));
        }
        Ok(Self {
            len: len as u8,
            value,
        })
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(0, len).expect("length within capacity")
    }

    /// Builds a string from per-position bits, first element leftmost.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidArgument(format!("bit value {b}")));
            }
            value = (value << 1) | u64::from(b);
        }
        Self::new(value, bits.len())
    }

    /// All strings of length `len` in increasing numeric order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < MAX_BITS, "enumeration of {len}-bit strings");
        (0..1u64 << len).map(move |v| BitString {
            len: len as u8,
            value: v,
        })
    }

    pub fn len(&self) -> usize {
        usize::from(self.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Bit at position `k` counted from the left (0-based).
    pub fn bit(&self, k: usize) -> u8 {
        assert!(k < self.len(), "bit {k} of a {}-bit string", self.len);
        ((self.value >> (self.len() - 1 - k)) & 1) as u8
    }

    pub fn with_bit(self, k: usize, bit: u8) -> Self {
        let mask = 1u64 << (self.len() - 1 - k);
        let value = if bit & 1 == 1 {
            self.value | mask
        } else {
            self.value & !mask
        };
        Self { value, ..self }
    }

    pub fn count_ones(&self) -> u32 {
        self.value.count_ones()
    }

    /// Positions (0-based, from the left) holding a one.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.bit(k) == 1).collect()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitString) -> u8 {
        debug_assert_eq!(self.len, other.len);
        ((self.value & other.value).count_ones() & 1) as u8
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        debug_assert_eq!(self.len, other.len);
        BitString {
            len: self.len,
            value: self.value ^ other.value,
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len() {
            f.write_str(if self.bit(k) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse {
                    kind: "bit string",
                    input: s.to_string(),
                }),
            })
            .collect::<Result<Vec<u8>>>()?;
        BitString::from_bits(&bits)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
