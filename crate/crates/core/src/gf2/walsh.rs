use serde::{Deserialize, Serialize};

use super::subspace::GF2Subspace;
use super::vector::parity;
use crate::error::{Error, Result};

/// In-place unnormalized Walsh-Hadamard butterfly:
/// `out[y] = sum_c (-1)^{popcount(y & c)} in[c]`.
pub fn fwht(values: &mut [f64]) {
    let len = values.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut h = 1;
    while h < len {
        for block in values.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = x + y;
                *b = x - y;
            }
        }
        h *= 2;
    }
}

/// A real function on a linear subspace `M`, indexed by coefficient index
/// (see [`GF2Subspace::element`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealFunctionOnSubspace {
    domain: GF2Subspace,
    values: Vec<f64>,
}

impl RealFunctionOnSubspace {
    pub fn new(domain: GF2Subspace, values: Vec<f64>) -> Result<Self> {
        if values.len() as u64 != domain.size() {
            return Err(Error::DimensionMismatch {
                expected: domain.size() as usize,
                found: values.len(),
            });
        }
        Ok(Self { domain, values })
    }

    /// Builds the function by evaluating `f` on every element of `domain`.
    pub fn from_fn(domain: GF2Subspace, f: impl Fn(u64) -> f64) -> Self {
        let values = domain.elements().map(f).collect();
        Self { domain, values }
    }

    pub fn domain(&self) -> &GF2Subspace {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the packed element `x`, or `None` outside the domain.
    pub fn get(&self, x: u64) -> Option<f64> {
        self.domain.coordinates(x).map(|c| self.values[c as usize])
    }

    /// True when the dot product restricted to the domain is non-degenerate.
    /// The normalized transform is an involution exactly on such domains.
    pub fn domain_is_nondegenerate(&self) -> bool {
        let k = self.domain.dim();
        let gram = gram_rows(&self.domain);
        GF2Subspace::span_bits(k, gram.iter().copied()).dim() == k
    }

    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        if self.domain != other.domain {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}

/// Gram matrix rows in coefficient packing: bit `k-1-j` of row `i` is
/// `b_i . b_j mod 2`.
fn gram_rows(domain: &GF2Subspace) -> Vec<u64> {
    let b = domain.basis();
    let k = b.len();
    (0..k)
        .map(|i| (0..k).fold(0u64, |acc, j| acc | ((parity(b[i] & b[j]) as u64) << (k - 1 - j))))
        .collect()
}

/// Normalized Walsh transform on the domain `M`:
/// `F f(u) = |M|^{-1/2} sum_{x in M} (-1)^{(u, x)} f(x)`.
///
/// Runs in `O(|M| dim M)`. On a non-degenerate domain (in particular the full
/// space) the transform is an involution.
pub fn walsh_transform(f: &RealFunctionOnSubspace) -> RealFunctionOnSubspace {
    let k = f.domain.dim();
    let gram = gram_rows(&f.domain);
    let mut spectrum = f.values.clone();
    fwht(&mut spectrum);
    let norm = (f.values.len() as f64).sqrt().recip();
    let values = (0..f.values.len() as u64)
        .map(|d| {
            let y = (0..k)
                .filter(|&i| d >> (k - 1 - i) & 1 == 1)
                .fold(0u64, |acc, i| acc ^ gram[i]);
            spectrum[y as usize] * norm
        })
        .collect();
    RealFunctionOnSubspace {
        domain: f.domain.clone(),
        values,
    }
}
