use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Fixed-length bitstring, the search point of the GA.
///
/// The length is set at construction and never changes. The wire form is
/// lowercase hexadecimal, most significant bit first, one character per
/// four bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenomeParseError {
    #[error("invalid hex digit {0:?} in genome")]
    InvalidHex(char),
    #[error("invalid bit {0:?} in genome, expected '0' or '1'")]
    InvalidBit(char),
    #[error("uppercase hex digit {0:?} in genome; the encoding is lowercase")]
    Uppercase(char),
}

impl Genome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Genome { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Genome {
            bits: vec![false; len],
        }
    }

    pub fn ones(len: usize) -> Self {
        Genome {
            bits: vec![true; len],
        }
    }

    /// Uniformly random genome: every bit is an independent fair coin.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Genome {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    /// Parses a string of `'0'`/`'1'` characters, most significant bit first.
    pub fn from_bit_str(s: &str) -> Result<Self, GenomeParseError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(GenomeParseError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Genome::from_bits)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Lowercase hex, MSB first. A trailing partial nibble is padded with
    /// zero bits on the right; [`crate::GaParams`] only admits lengths that
    /// are multiples of four, so in practice the encoding is exact.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        self.bits
            .chunks(4)
            .map(|nibble| {
                let v = nibble
                    .iter()
                    .chain(std::iter::repeat(&false))
                    .take(4)
                    .fold(0usize, |acc, &b| (acc << 1) | b as usize);
                DIGITS[v] as char
            })
            .collect()
    }

    /// Decodes the hex form; the result is `4 × s.len()` bits long.
    pub fn from_hex(s: &str) -> Result<Self, GenomeParseError> {
        let mut bits = Vec::with_capacity(s.len() * 4);
        for c in s.chars() {
            if c.is_ascii_uppercase() && c.is_ascii_hexdigit() {
                return Err(GenomeParseError::Uppercase(c));
            }
            let v = c.to_digit(16).ok_or(GenomeParseError::InvalidHex(c))?;
            bits.extend((0..4).rev().map(|shift| (v >> shift) & 1 == 1));
        }
        Ok(Genome { bits })
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for Genome {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Genome {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Genome::from_hex(&s).map_err(serde::de::Error::custom)
    }
}
