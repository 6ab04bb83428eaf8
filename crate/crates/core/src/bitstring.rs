//! Fixed-length bit strings used as search targets and measurement outcomes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Longest supported string. Indices are stored in a `u64`.
pub const MAX_LEN: usize = 63;

/// Measurement histogram keyed by outcome.
pub type Counts = BTreeMap<BitString, u64>;

/// A bit string of fixed length `n ≥ 1`.
///
/// Bit `i` of [`BitString::index`] is the value of qubit `i`. The textual form
/// lists qubit 0 first, so `"10"` has qubit 0 set and index 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BitString {
    len: usize,
    index: u64,
}

impl BitString {
    pub fn new(index: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_LEN {
            return Err(Error::InvalidTarget(format!(
                "length must be in 1..={MAX_LEN}, got {len}"
            )));
        }
        if index >> len != 0 {
            return Err(Error::InvalidTarget(format!(
                "index {index} does not fit in {len} bits"
            )));
        }
        Ok(Self { len, index })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        // validates len before the shift below
        Self::zeros(len)?;
        let index = rng.gen::<u64>() & ((1u64 << len) - 1);
        Self::new(index, len)
    }

    /// All `2^len` strings in index order.
    pub fn all(len: usize) -> Result<impl Iterator<Item = BitString>> {
        Self::zeros(len)?;
        Ok((0..1u64 << len).map(move |index| BitString { len, index }))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Basis-state index with qubit 0 as least significant bit.
    #[inline]
    pub fn index(&self) -> u64 {
        self.index
    }

    #[inline]
    pub fn bit(&self, qubit: usize) -> bool {
        debug_assert!(qubit < self.len);
        (self.index >> qubit) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|q| self.bit(q))
    }

    pub fn hamming_distance(&self, other: &BitString) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::Dimension {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok((self.index ^ other.index).count_ones() as usize)
    }

    /// Reorders bits so that qubit `i` of the result is qubit `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<BitString> {
        if perm.len() != self.len {
            return Err(Error::Dimension {
                expected: self.len,
                actual: perm.len(),
            });
        }
        let index = perm
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &src)| acc | (u64::from(self.bit(src)) << i));
        BitString::new(index, self.len)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidTarget("empty bit string".into()));
        }
        let mut index = 0u64;
        let mut len = 0usize;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < MAX_LEN => index |= 1 << i,
                '1' => {}
                other => {
                    return Err(Error::InvalidTarget(format!(
                        "non-binary character {other:?} in {s:?}"
                    )))
                }
            }
            len += 1;
        }
        BitString::new(index, len)
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
