// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fixed-width string of bits. Position 0 is the leftmost and most
/// significant bit, so `"01"` has value 1 and `bit(1) == true`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    len: u32,
    value: u64,
}

impl BitString {
    pub const MAX_LEN: u32 = 64;

    pub fn new(value: u64, len: u32) -> Result<Self> {
        if len == 0 || len > Self::MAX_LEN {
            return Err(Error::Argument(format!("bit string length {len} out of 1..=64")));
        }
        if len < 64 && value >> len != 0 {
            return Err(Error::Argument(format!("value {value} does not fit in {len} bits")));
        }
        Ok(BitString { len, value })
    }

    /// Panics if `value` does not fit in `len` bits.
    pub fn from_value(value: u64, len: u32) -> Self {
        Self::new(value, len).expect("bit string value out of range")
    }

    pub fn zeros(len: u32) -> Self {
        Self::from_value(0, len)
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn index(&self) -> usize {
        self.value as usize
    }

    /// Bit at `pos`, counted from the left.
    pub fn bit(&self, pos: u32) -> bool {
        assert!(pos < self.len, "bit {pos} out of range for width {}", self.len);
        (self.value >> (self.len - 1 - pos)) & 1 == 1
    }

    /// The `width`-bit field starting at `pos`, counted from the left.
    pub fn field(&self, pos: u32, width: u32) -> u64 {
        assert!(pos + width <= self.len);
        let shift = self.len - pos - width;
        (self.value >> shift) & low_mask(width)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn xor(&self, other: &BitString) -> BitString {
        assert_eq!(self.len, other.len);
        BitString { len: self.len, value: self.value ^ other.value }
    }

    /// Inner product modulo 2.
    pub fn dot(&self, other: &BitString) -> bool {
        assert_eq!(self.len, other.len);
        (self.value & other.value).count_ones() % 2 == 1
    }

    pub fn count_ones(&self) -> u32 {
        self.value.count_ones()
    }

    /// All strings of width `len` in increasing value order.
    pub fn all(len: u32) -> impl Iterator<Item = BitString> {
        assert!((1..64).contains(&len));
        (0..1u64 << len).map(move |v| BitString { len, value: v })
    }
}

pub(crate) fn low_mask(width: u32) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 0..self.len {
            f.write_str(if self.bit(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > 64 {
            return Err(Error::Parse(format!("bit string {s:?} must have 1..=64 characters")));
        }
        let mut value = 0u64;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(Error::Parse(format!("invalid bit {other:?} in {s:?}"))),
                };
        }
        Ok(BitString { len: s.len() as u32, value })
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
