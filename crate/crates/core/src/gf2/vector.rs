use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vector length supported by the packed representation.
pub const MAX_LEN: usize = 64;

/// Largest number of rebits (a phase point uses `2n` bits).
pub const MAX_REBITS: usize = 32;

#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// A vector over GF(2) of length at most 64.
///
/// Coordinate 0 is stored in the most significant used bit, so the packed
/// integer reads the same as the binary string written left to right.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GF2Vector {
    len: u8,
    bits: u64,
}

impl GF2Vector {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > MAX_LEN {
            return Err(Error::TooLarge {
                requested: len,
                max: MAX_LEN,
            });
        }
        if bits & !low_mask(len) != 0 {
            return Err(Error::Invalid(format!(
                "bits {bits:#x} do not fit in length {len}"
            )));
        }
        Ok(Self { len: len as u8, bits })
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(len, 0).expect("length within bounds")
    }

    /// The unit vector with a one at coordinate `i`.
    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len);
        Self::new(len, 1u64 << (len - 1 - i)).expect("length within bounds")
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len());
        let bit = 1u64 << (self.len() - 1 - i);
        if value {
            self.bits |= bit;
        } else {
            self.bits &= !bit;
        }
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Standard dot product mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        Ok(parity(self.bits & other.bits))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_len(other)?;
        Ok(Self {
            len: self.len,
            bits: self.bits ^ other.bits,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }
}

impl Add for GF2Vector {
    type Output = GF2Vector;

    /// Panics on a length mismatch; use [`GF2Vector::checked_add`] otherwise.
    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs)
            .expect("length mismatch in GF2Vector addition")
    }
}

impl AddAssign for GF2Vector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl fmt::Display for GF2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for GF2Vector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            if i >= MAX_LEN {
                return Err(Error::TooLarge {
                    requested: s.len(),
                    max: MAX_LEN,
                });
            }
            bits <<= 1;
            match c {
                '0' => {}
                '1' => bits |= 1,
                other => return Err(Error::Invalid(format!("invalid bit character '{other}'"))),
            }
        }
        Self::new(s.chars().count(), bits)
    }
}
