use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Binary on/off choice per secondary link.
///
/// Ordering is lexicographic over the bit string `y_1 y_2 ... y_M` with
/// `0 < 1`. Serializes as an array of `0`/`1` integers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ActivationVector(Vec<bool>);

impl ActivationVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Link `j` is active iff bit `j` of `mask` is set.
    pub fn from_mask(mask: u64, len: usize) -> Self {
        Self((0..len).map(|j| (mask >> j) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_active(&self, j: usize) -> bool {
        self.0.get(j).copied().unwrap_or(false)
    }

    pub fn set(&mut self, j: usize, on: bool) {
        self.0[j] = on;
    }

    pub fn count_active(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    /// `true` when every active link here is also active in `other`.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| !a || b)
    }
}

impl fmt::Display for ActivationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for ActivationVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|&b| u8::from(b)))
    }
}

impl<'de> Deserialize<'de> for ActivationVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = Vec::<u8>::deserialize(d)?;
        raw.into_iter()
            .map(|b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(D::Error::custom(format!(
                    "activation bit must be 0 or 1, got {other}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}
