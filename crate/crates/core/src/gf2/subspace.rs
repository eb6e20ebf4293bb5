use std::fmt;

use serde::{Deserialize, Serialize};

use super::phase::swap_index;
use super::vector::{low_mask, parity, GF2Vector, MAX_LEN};
use crate::error::{Error, Result};

/// Bilinear form used for orthogonality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Form {
    /// `(u, v) = u . v mod 2`.
    Euclidean,
    /// `[u, v] = u_Z.v_X + v_Z.u_X mod 2` on an even-length ambient space.
    Symplectic,
}

/// A linear subspace of `GF(2)^d` stored as a reduced row echelon basis.
///
/// Rows are sorted by pivot, highest bit first; every pivot column is zero in
/// all other rows. The representation is canonical, so structural equality is
/// subspace equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct GF2Subspace {
    ambient: u8,
    basis: Vec<u64>,
}

#[inline]
fn leading_bit(v: u64) -> u32 {
    63 - v.leading_zeros()
}

impl GF2Subspace {
    pub fn zero(ambient: usize) -> Self {
        assert!(ambient <= MAX_LEN);
        Self {
            ambient: ambient as u8,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span_bits(ambient, (0..ambient).map(|b| 1u64 << b))
    }

    /// Span of packed vectors. Bits outside the ambient length are an error.
    pub fn span_bits(ambient: usize, vectors: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            assert_eq!(v & !low_mask(ambient), 0, "vector outside ambient space");
            s.insert(v);
        }
        s
    }

    pub fn span(ambient: usize, vectors: &[GF2Vector]) -> Result<Self> {
        let mut s = Self::zero(ambient);
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    found: v.len(),
                });
            }
            s.insert(v.bits());
        }
        Ok(s)
    }

    /// Like [`GF2Subspace::span`] but rejects linearly dependent input.
    pub fn from_independent(ambient: usize, vectors: &[GF2Vector]) -> Result<Self> {
        let s = Self::span(ambient, vectors)?;
        if s.dim() != vectors.len() {
            return Err(Error::DependentGenerators);
        }
        Ok(s)
    }

    pub fn ambient(&self) -> usize {
        self.ambient as usize
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Number of elements, `2^dim`.
    pub fn size(&self) -> u64 {
        1u64 << self.dim()
    }

    pub fn basis(&self) -> &[u64] {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<GF2Vector> {
        self.basis
            .iter()
            .map(|&b| GF2Vector::new(self.ambient(), b).expect("fits"))
            .collect()
    }

    pub fn pivots(&self) -> impl Iterator<Item = u32> + '_ {
        self.basis.iter().map(|&b| leading_bit(b))
    }

    /// Canonical coset representative of `v + self`: the element of the
    /// coset with the smallest packed integer value.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.basis {
            if v >> leading_bit(row) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains_vector(&self, v: &GF2Vector) -> bool {
        v.len() == self.ambient() && self.contains(v.bits())
    }

    /// Adds `v` to the span. Returns false if it was already contained.
    pub fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = leading_bit(v);
        for row in self.basis.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= v;
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|&r| leading_bit(r) < p)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, v);
        true
    }

    /// The element with coefficient index `c`; bit `dim-1-i` of `c` selects
    /// basis row `i`.
    pub fn element(&self, c: u64) -> u64 {
        let k = self.dim();
        let mut v = 0;
        for (i, &row) in self.basis.iter().enumerate() {
            if c >> (k - 1 - i) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    /// Coefficient index of `v`, if `v` lies in the subspace.
    pub fn coordinates(&self, v: u64) -> Option<u64> {
        if !self.contains(v) {
            return None;
        }
        let k = self.dim();
        let mut c = 0;
        for (i, &row) in self.basis.iter().enumerate() {
            if v >> leading_bit(row) & 1 == 1 {
                c |= 1 << (k - 1 - i);
            }
        }
        Some(c)
    }

    /// All `2^dim` elements in coefficient-index order.
    pub fn elements(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.size()).map(move |c| self.element(c))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        Ok(s)
    }

    pub fn is_subspace_of(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|&b| other.contains(b))
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::DimensionMismatch {
                expected: self.ambient(),
                found: other.ambient(),
            });
        }
        Ok(())
    }

    fn euclidean_complement(ambient: usize, rows: &GF2Subspace) -> GF2Subspace {
        let pivots: Vec<u32> = rows.pivots().collect();
        let mut out = GF2Subspace::zero(ambient);
        for f in 0..ambient as u32 {
            if pivots.contains(&f) {
                continue;
            }
            let mut w = 1u64 << f;
            for (&row, &p) in rows.basis.iter().zip(&pivots) {
                if row >> f & 1 == 1 {
                    w |= 1u64 << p;
                }
            }
            out.insert(w);
        }
        out
    }

    /// Orthogonal complement with respect to `form`.
    pub fn orthogonal_complement(&self, form: Form) -> Result<Self> {
        match form {
            Form::Euclidean => Ok(Self::euclidean_complement(self.ambient(), self)),
            Form::Symplectic => {
                let n = self.symplectic_half()?;
                let swapped = Self::span_bits(self.ambient(), self.basis.iter().map(|&b| swap_index(n, b)));
                Ok(Self::euclidean_complement(self.ambient(), &swapped))
            }
        }
    }

    /// Symplectic complement; panics if the ambient length is odd.
    pub fn symplectic_complement(&self) -> Self {
        self.orthogonal_complement(Form::Symplectic)
            .expect("ambient space has even length")
    }

    pub fn is_isotropic(&self, form: Form) -> Result<bool> {
        let f = self.form_fn(form)?;
        Ok(self
            .basis
            .iter()
            .enumerate()
            .all(|(i, &a)| self.basis[i..].iter().all(|&b| !f(a, b))))
    }

    pub fn is_lagrangian(&self) -> bool {
        self.ambient.is_multiple_of(2)
            && self.dim() * 2 == self.ambient()
            && self.is_isotropic(Form::Symplectic).unwrap_or(false)
    }

    fn symplectic_half(&self) -> Result<usize> {
        if !self.ambient.is_multiple_of(2) {
            return Err(Error::Invalid(
                "symplectic form needs an even-length ambient space".into(),
            ));
        }
        Ok(self.ambient() / 2)
    }

    fn form_fn(&self, form: Form) -> Result<impl Fn(u64, u64) -> bool> {
        let n = match form {
            Form::Euclidean => None,
            Form::Symplectic => Some(self.symplectic_half()?),
        };
        Ok(move |a: u64, b: u64| match n {
            None => parity(a & b),
            Some(n) => super::phase::sym_index(n, a, b),
        })
    }
}

impl fmt::Display for GF2Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("span{")?;
        for (i, v) in self.basis_vectors().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}
