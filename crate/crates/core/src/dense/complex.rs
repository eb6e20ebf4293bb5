use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gates::{apply_gate, GateOp};
use super::{check_state_size, DenseState};
use crate::error::{Error, Result};

/// Complex state vector, used only to validate the real encoding of
/// complex circuits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexRepr", into = "ComplexRepr")]
pub struct ComplexState {
    n: usize,
    amps: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    n: usize,
    /// `[re, im]` pairs.
    amplitudes: Vec<[f64; 2]>,
}

impl TryFrom<ComplexRepr> for ComplexState {
    type Error = Error;

    fn try_from(r: ComplexRepr) -> Result<Self> {
        ComplexState::new(
            r.n,
            r.amplitudes
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexState> for ComplexRepr {
    fn from(s: ComplexState) -> Self {
        ComplexRepr {
            n: s.n,
            amplitudes: s.amps.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl ComplexState {
    pub fn new(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_state_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { n, amps })
    }

    pub fn from_unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        let n = amps.len().trailing_zeros() as usize;
        if !amps.len().is_power_of_two() {
            return Err(Error::Invalid("length is not a power of two".into()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(n, amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn zero(n: usize) -> Result<Self> {
        check_state_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Haar-like random state from independent Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        use rand_distr::StandardNormal;
        let amps = (0..1usize << n)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::from_unnormalized(amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        apply_gate(self.n, &mut self.amps, gate)
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn inner(&self, other: &ComplexState) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &ComplexState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn kron(&self, other: &ComplexState) -> Result<ComplexState> {
        let n = self.n + other.n;
        check_state_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for &a in &self.amps {
            amps.extend(other.amps.iter().map(|&b| a * b));
        }
        Ok(Self { n, amps })
    }

    /// Probability that rebit `i` reads `bit` in the computational basis.
    pub fn z_probability(&self, i: usize, bit: bool) -> Result<f64> {
        let mask = self.bit_mask(i)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| (idx & mask != 0) == bit)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects rebit `i` onto `bit` and renormalizes; returns the probability.
    pub fn project_z(&mut self, i: usize, bit: bool) -> Result<f64> {
        let mask = self.bit_mask(i)?;
        let p = self.z_probability(i, bit)?;
        if p < 1e-14 {
            return Err(Error::ZeroProbability);
        }
        let norm = p.sqrt();
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a = if (idx & mask != 0) == bit {
                *a / norm
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        Ok(p)
    }

    /// True when a global phase makes every amplitude real.
    pub fn is_rebit(&self) -> bool {
        let Some(big) = self
            .amps
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
        else {
            return true;
        };
        let phase = big.conj() / big.norm();
        self.amps.iter().all(|a| (a * phase).im.abs() < 1e-12)
    }

    /// Real state equal to this one up to global phase, if any.
    pub fn to_real(&self) -> Result<DenseState> {
        if !self.is_rebit() {
            return Err(Error::Invalid("state is not real up to global phase".into()));
        }
        let big = self
            .amps
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .expect("non-empty");
        let phase = big.conj() / big.norm();
        DenseState::from_unnormalized(self.amps.iter().map(|a| (a * phase).re).collect())
    }

    fn bit_mask(&self, i: usize) -> Result<usize> {
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.n,
            });
        }
        Ok(1 << (self.n - 1 - i))
    }
}

impl From<&DenseState> for ComplexState {
    fn from(s: &DenseState) -> Self {
        Self {
            n: s.n(),
            amps: s.amplitudes().iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        }
    }
}
