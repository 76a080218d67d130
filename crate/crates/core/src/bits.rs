//! Finite bit sequences, rendered as ASCII `0`/`1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

/// A work-tape word; the same thing as a [`BitString`].
pub type Word = BitString;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("character {found:?} at offset {offset} is not a bit")]
pub struct NotABit {
    pub offset: usize,
    pub found: char,
}

impl BitString {
    pub fn new() -> BitString {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> BitString {
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = self.clone();
        out.extend_from(other);
        out
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn as_mut_vec(&mut self) -> &mut Vec<bool> {
        &mut self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Number of one bits.
    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> BitString {
        BitString(iter.into_iter().collect())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> BitString {
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = NotABit;

    fn from_str(s: &str) -> Result<BitString, NotABit> {
        s.chars()
            .enumerate()
            .map(|(offset, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                found => Err(NotABit { offset, found }),
            })
            .collect()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<BitString, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and examples: `bits("1011")`. Panics on non-bits.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("bit literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(b.to_string(), "0110");
        assert_eq!(b.count_ones(), 2);
    }

    #[test]
    fn rejects_non_bits_with_offset() {
        let err = "01a1".parse::<BitString>().unwrap_err();
        assert_eq!(err, NotABit { offset: 2, found: 'a' });
    }

    #[test]
    fn serde_as_string() {
        let b = bits("101");
        assert_eq!(serde_json::to_string(&b).unwrap(), "\"101\"");
        let back: BitString = serde_json::from_str("\"101\"").unwrap();
        assert_eq!(back, b);
    }
}
