use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use super::vector::{low_mask, parity, GF2Vector, MAX_REBITS};
use crate::error::{Error, Result};

/// A point `(u_Z, u_X)` of the phase space `Z_2^{2n}`.
///
/// Each part stores rebit 0 in its most significant used bit. The flat
/// index is `(u_Z << n) | u_X`, so the Z part occupies the high bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct PhasePoint {
    n: u8,
    z: u64,
    x: u64,
}

impl PhasePoint {
    pub fn new(n: usize, z: u64, x: u64) -> Result<Self> {
        if n > MAX_REBITS {
            return Err(Error::TooLarge {
                requested: n,
                max: MAX_REBITS,
            });
        }
        let m = low_mask(n);
        if z & !m != 0 || x & !m != 0 {
            return Err(Error::Invalid(format!(
                "phase point parts do not fit in {n} rebits"
            )));
        }
        Ok(Self { n: n as u8, z, x })
    }

    pub fn zero(n: usize) -> Self {
        Self::new(n, 0, 0).expect("n within bounds")
    }

    /// Decodes a flat index `(u_Z << n) | u_X`.
    pub fn from_index(n: usize, index: u64) -> Self {
        let m = low_mask(n);
        Self::new(n, (index >> n) & m, index & m).expect("index within bounds")
    }

    pub fn from_parts(z: GF2Vector, x: GF2Vector) -> Result<Self> {
        if z.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: z.len(),
                found: x.len(),
            });
        }
        Self::new(z.len(), z.bits(), x.bits())
    }

    /// Pure Z point on a single rebit.
    pub fn z_at(n: usize, i: usize) -> Self {
        Self::new(n, 1u64 << (n - 1 - i), 0).expect("n within bounds")
    }

    /// Pure X point on a single rebit.
    pub fn x_at(n: usize, i: usize) -> Self {
        Self::new(n, 0, 1u64 << (n - 1 - i)).expect("n within bounds")
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn z(&self) -> u64 {
        self.z
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn z_part(&self) -> GF2Vector {
        GF2Vector::new(self.n(), self.z).expect("fits")
    }

    pub fn x_part(&self) -> GF2Vector {
        GF2Vector::new(self.n(), self.x).expect("fits")
    }

    pub fn index(&self) -> u64 {
        (self.z << self.n) | self.x
    }

    pub fn to_vector(&self) -> GF2Vector {
        GF2Vector::new(2 * self.n(), self.index()).expect("fits")
    }

    pub fn from_vector(v: &GF2Vector) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::Invalid("phase space vector must have even length".into()));
        }
        Ok(Self::from_index(v.len() / 2, v.bits()))
    }

    pub fn is_zero(&self) -> bool {
        self.z == 0 && self.x == 0
    }

    /// Symplectic product `[u, v] = u_Z.v_X + v_Z.u_X mod 2`.
    pub fn sym(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        parity((self.z & other.x) ^ (other.z & self.x))
    }

    /// `u_X . v_Z mod 2`, the ordered-pair sign bit of `T_u T_v`.
    pub fn x_dot_z(&self, other: &Self) -> bool {
        parity(self.x & other.z)
    }

    /// True when `u_Z . u_X` is even, i.e. `T_u` is symmetric.
    pub fn is_symmetric(&self) -> bool {
        !parity(self.z & self.x)
    }

    /// Pure X or pure Z.
    pub fn is_pure(&self) -> bool {
        self.z == 0 || self.x == 0
    }

    /// Exchange the Z and X parts.
    pub fn swapped(&self) -> Self {
        Self {
            n: self.n,
            z: self.x,
            x: self.z,
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(Self {
            n: self.n,
            z: self.z ^ other.z,
            x: self.x ^ other.x,
        })
    }

    /// Tensor concatenation: rebits of `self` followed by rebits of `other`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let n = self.n() + other.n();
        Self::new(n, (self.z << other.n) | other.z, (self.x << other.n) | other.x)
    }

    /// All `4^n` phase points in index order.
    pub fn all(n: usize) -> impl Iterator<Item = PhasePoint> {
        (0..1u64 << (2 * n)).map(move |i| PhasePoint::from_index(n, i))
    }
}

impl Add for PhasePoint {
    type Output = PhasePoint;

    fn add(self, rhs: Self) -> Self {
        self.checked_add(&rhs).expect("rebit count mismatch")
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.z_part(), self.x_part())
    }
}

/// Symplectic product on flat `2n`-bit indices.
#[inline]
pub fn sym_index(n: usize, u: u64, v: u64) -> bool {
    let m = low_mask(n);
    parity(((u >> n) & v & m) ^ ((v >> n) & u & m))
}

/// Exchange the Z and X halves of a flat `2n`-bit index.
#[inline]
pub fn swap_index(n: usize, u: u64) -> u64 {
    let m = low_mask(n);
    ((u & m) << n) | ((u >> n) & m)
}
