//! Real Pauli operators `T_a = Z(a_Z) X(a_X)` and the observable sets.
//!
//! Every `+-T_a` is a real orthogonal matrix; it is symmetric (an observable)
//! exactly when `a_Z . a_X` is even. Text form uses the usual letters with
//! `Y = iXZ`, so a string is real only with a matching power of `i`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::PhasePoint;

/// Largest rebit count for which dense matrices are built.
pub const MAX_DENSE_REBITS: usize = 6;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_negative(negative: bool) -> Self {
        if negative {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip_if(self, flip: bool) -> Self {
        Sign::from_negative(self.is_negative() ^ flip)
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        self.flip_if(rhs.is_negative())
    }
}

/// `sign * T_label`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct PauliOp {
    pub sign: Sign,
    pub label: PhasePoint,
}

impl PauliOp {
    pub fn new(sign: Sign, label: PhasePoint) -> Self {
        Self { sign, label }
    }

    pub fn plus(label: PhasePoint) -> Self {
        Self::new(Sign::Plus, label)
    }

    pub fn identity(n: usize) -> Self {
        Self::plus(PhasePoint::zero(n))
    }

    pub fn n(&self) -> usize {
        self.label.n()
    }

    pub fn negated(&self) -> Self {
        Self::new(self.sign.flip_if(true), self.label)
    }

    /// Symmetric, i.e. a Hermitian observable.
    pub fn is_symmetric(&self) -> bool {
        self.label.is_symmetric()
    }

    /// `T_a` acting on a computational basis state:
    /// `T_a |c> = (-1)^{a_Z . (c + a_X)} |c + a_X>`.
    pub fn apply_to_basis(&self, c: u64) -> (u64, f64) {
        let r = c ^ self.label.x();
        let neg = crate::gf2::parity(self.label.z() & r) ^ self.sign.is_negative();
        (r, if neg { -1.0 } else { 1.0 })
    }
}

/// The two distinguished observable sets.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum ObservableSet {
    /// All symmetric `+-T_a`.
    A,
    /// Pure X or pure Z operators.
    O,
}

impl ObservableSet {
    pub fn contains(self, op: &PauliOp) -> bool {
        match self {
            ObservableSet::A => in_set_a(op),
            ObservableSet::O => in_set_o(op),
        }
    }
}

pub fn in_set_a(op: &PauliOp) -> bool {
    op.is_symmetric()
}

pub fn in_set_o(op: &PauliOp) -> bool {
    op.label.is_pure()
}

/// `(s T_a)(r T_b) = s r (-1)^{a_X . b_Z} T_{a+b}`. The product of two real
/// Pauli operators is always real, so only a size mismatch can fail.
pub fn pauli_product(a: &PauliOp, b: &PauliOp) -> Result<PauliOp> {
    let label = a.label.checked_add(&b.label)?;
    let sign = (a.sign * b.sign).flip_if(a.label.x_dot_z(&b.label));
    Ok(PauliOp::new(sign, label))
}

pub fn commutes(a: &PauliOp, b: &PauliOp) -> bool {
    !a.label.sym(&b.label)
}

/// Every operator lies in the observable set `A` and every ordered pair has
/// `a_X . b_Z = 0`, which makes the set commute and multiply without signs.
pub fn is_jointly_measurable(ops: &[PauliOp]) -> bool {
    ops.iter().all(in_set_a) && ops.iter().all(|a| ops.iter().all(|b| !a.label.x_dot_z(&b.label)))
}

/// Dense `2^n x 2^n` matrix of `sign * T_a`.
pub fn dense_matrix(op: &PauliOp) -> Result<DMatrix<f64>> {
    let n = op.n();
    if n > MAX_DENSE_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_DENSE_REBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim as u64 {
        let (r, v) = op.apply_to_basis(c);
        m[(r as usize, c as usize)] = v;
    }
    Ok(m)
}

/// Coefficient written in front of the letter string.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Coefficient {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Coefficient {
    fn times_i_pow(self, k: usize) -> Self {
        const ORDER: [Coefficient; 4] = [
            Coefficient::One,
            Coefficient::I,
            Coefficient::MinusOne,
            Coefficient::MinusI,
        ];
        let pos = ORDER.iter().position(|&c| c == self).expect("listed");
        ORDER[(pos + k) % 4]
    }

    fn prefix(self) -> &'static str {
        match self {
            Coefficient::One => "+",
            Coefficient::I => "+i",
            Coefficient::MinusOne => "-",
            Coefficient::MinusI => "-i",
        }
    }
}

impl fmt::Display for PauliOp {
    /// `s T_a = s i^k P` where `P` is the letter string and `k` the number of
    /// sites carrying both an X and a Z.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        let base = if self.sign.is_negative() {
            Coefficient::MinusOne
        } else {
            Coefficient::One
        };
        let ys = (self.label.z() & self.label.x()).count_ones() as usize;
        f.write_str(base.times_i_pow(ys).prefix())?;
        for i in 0..n {
            let bit = 1u64 << (n - 1 - i);
            let c = match (self.label.z() & bit != 0, self.label.x() & bit != 0) {
                (false, false) => 'I',
                (false, true) => 'X',
                (true, false) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim();
        let (negative, rest) = match text.as_bytes().first() {
            Some(b'+') => (false, &text[1..]),
            Some(b'-') => (true, &text[1..]),
            _ => (false, text),
        };
        let (imag, letters) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let n = letters.chars().count();
        if n == 0 {
            return Err(Error::Invalid(format!("empty Pauli string '{text}'")));
        }
        if n > crate::gf2::MAX_REBITS {
            return Err(Error::TooLarge {
                requested: n,
                max: crate::gf2::MAX_REBITS,
            });
        }
        let (mut z, mut x) = (0u64, 0u64);
        for c in letters.chars() {
            z <<= 1;
            x <<= 1;
            match c {
                'I' => {}
                'X' => x |= 1,
                'Z' => z |= 1,
                'Y' => {
                    z |= 1;
                    x |= 1;
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "invalid Pauli letter '{other}' in '{text}'"
                    )))
                }
            }
        }
        // c P = c (-i)^k T_a must be real.
        let ys = (z & x).count_ones() as usize;
        let mut coeff = match (negative, imag) {
            (false, false) => Coefficient::One,
            (false, true) => Coefficient::I,
            (true, false) => Coefficient::MinusOne,
            (true, true) => Coefficient::MinusI,
        };
        coeff = coeff.times_i_pow(3 * ys);
        let sign = match coeff {
            Coefficient::One => Sign::Plus,
            Coefficient::MinusOne => Sign::Minus,
            _ => return Err(Error::Imaginary(text.to_string())),
        };
        Ok(PauliOp::new(sign, PhasePoint::new(n, z, x)?))
    }
}
