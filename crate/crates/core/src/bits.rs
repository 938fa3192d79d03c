//! Bit strings, the currency of every certificate and input.
//!
//! Integers are written most-significant bit first in fixed-width fields, so
//! `Bits::from_uint(5, 4)` renders as `"0101"`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;

/// Number of bits needed to write `x` in binary, i.e. `ceil(log2(x + 1))`.
pub fn bits_for(x: u64) -> usize {
    (u64::BITS - x.leading_zeros()) as usize
}

/// A finite bit string. Strings up to 128 bits are stored inline.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    len: usize,
    words: SmallVec<[u64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit string character {0:?}")]
pub struct ParseBitsError(pub char);

impl Bits {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        let mut words = SmallVec::new();
        words.resize(len.div_ceil(64), 0);
        Bits { len, words }
    }

    /// `value` written MSB-first on exactly `width` bits; higher bits are dropped.
    pub fn from_uint(value: u64, width: usize) -> Self {
        let mut b = Bits::new();
        b.push_uint(value, width);
        b
    }

    pub fn from_bools(bools: &[bool]) -> Self {
        let mut b = Bits::new();
        for &x in bools {
            b.push(x);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn push_uint(&mut self, value: u64, width: usize) {
        for k in (0..width).rev() {
            self.push(k < 64 && value >> k & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &Bits) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    /// Reads `width` bits starting at `offset` as an MSB-first integer.
    /// Returns `None` if the field runs past the end or is wider than 64 bits.
    pub fn read_uint(&self, offset: usize, width: usize) -> Option<u64> {
        if width > 64 || offset + width > self.len {
            return None;
        }
        let mut v = 0u64;
        for i in offset..offset + width {
            v = (v << 1) | self.get(i) as u64;
        }
        Some(v)
    }

    /// The whole string as an integer (empty string is `None`).
    pub fn as_uint(&self) -> Option<u64> {
        if self.is_empty() {
            None
        } else {
            self.read_uint(0, self.len)
        }
    }

    pub fn slice(&self, offset: usize, width: usize) -> Option<Bits> {
        if offset + width > self.len {
            return None;
        }
        let mut out = Bits::new();
        for i in offset..offset + width {
            out.push(self.get(i));
        }
        Some(out)
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn complement(&self) -> Bits {
        let mut out = self.clone();
        for i in 0..self.len {
            out.set(i, !self.get(i));
        }
        out
    }

    /// Fills the string with raw words; bits beyond `len` are cleared.
    pub(crate) fn from_words(len: usize, raw: impl IntoIterator<Item = u64>) -> Bits {
        let mut words: SmallVec<[u64; 2]> = raw.into_iter().take(len.div_ceil(64)).collect();
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % 64)) - 1;
        }
        Bits { len, words }
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Bits {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut b = Bits::new();
        for c in s.chars() {
            match c {
                '0' => b.push(false),
                '1' => b.push(true),
                other => return Err(ParseBitsError(other)),
            }
        }
        Ok(b)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Elias-gamma style self-delimiting code for `x >= 1`.
pub fn push_gamma(bits: &mut Bits, x: u64) {
    assert!(x >= 1);
    let w = bits_for(x);
    for _ in 1..w {
        bits.push(false);
    }
    bits.push_uint(x, w);
}

/// Reads a gamma code at `*pos`, advancing it.
pub fn read_gamma(bits: &Bits, pos: &mut usize) -> Option<u64> {
    let mut zeros = 0;
    while *pos + zeros < bits.len() && !bits.get(*pos + zeros) {
        zeros += 1;
        if zeros > 63 {
            return None;
        }
    }
    let v = bits.read_uint(*pos + zeros, zeros + 1)?;
    *pos += 2 * zeros + 1;
    Some(v)
}
