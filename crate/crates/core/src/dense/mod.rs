//! Dense state-vector and density-matrix backend used as the reference
//! oracle for every table-level algorithm.

mod complex;
mod gates;

pub use complex::ComplexState;
pub use gates::GateOp;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{dense_matrix, PauliOp, Sign, MAX_DENSE_REBITS};

/// Largest register for state vectors.
pub const MAX_STATE_REBITS: usize = 10;

const NORM_TOL: f64 = 1e-9;
const DENSITY_TOL: f64 = 1e-10;
const ZERO_PROB: f64 = 1e-14;

pub(crate) fn check_state_size(n: usize) -> Result<()> {
    if n > MAX_STATE_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_STATE_REBITS,
        });
    }
    Ok(())
}

pub(crate) fn check_matrix_size(n: usize) -> Result<()> {
    if n > MAX_DENSE_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_DENSE_REBITS,
        });
    }
    Ok(())
}

fn log2_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::Invalid(format!("length {len} is not a power of two")));
    }
    Ok(len.trailing_zeros() as usize)
}

/// A normalized real pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRepr", into = "StateRepr")]
pub struct DenseState {
    n: usize,
    amps: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n: usize,
    amplitudes: Vec<f64>,
}

impl TryFrom<StateRepr> for DenseState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        DenseState::new(r.n, r.amplitudes)
    }
}

impl From<DenseState> for StateRepr {
    fn from(s: DenseState) -> Self {
        StateRepr {
            n: s.n,
            amplitudes: s.amps,
        }
    }
}

impl DenseState {
    pub fn new(n: usize, amps: Vec<f64>) -> Result<Self> {
        check_state_size(n)?;
        if amps.len() != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                found: amps.len(),
            });
        }
        let norm2: f64 = amps.iter().map(|a| a * a).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { n, amps })
    }

    /// Normalizes `amps`; fails on the zero vector.
    pub fn from_unnormalized(amps: Vec<f64>) -> Result<Self> {
        let n = log2_len(amps.len())?;
        let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(n, amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn basis(n: usize, index: u64) -> Result<Self> {
        check_state_size(n)?;
        let mut amps = vec![0.0; 1 << n];
        *amps.get_mut(index as usize).ok_or(Error::IndexOutOfRange {
            index: index as usize,
            len: 1 << n,
        })? = 1.0;
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        if matches!(gate, GateOp::HAll) {
            gates::hadamard_all_real(&mut self.amps);
            return Ok(());
        }
        gates::apply_gate(self.n, &mut self.amps, gate)
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a GateOp>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.apply(g))
    }

    /// `sign * T_a |psi>` as a raw amplitude vector.
    pub fn pauli_image(&self, op: &PauliOp) -> Result<Vec<f64>> {
        self.check_op(op)?;
        let mut out = vec![0.0; self.amps.len()];
        for (c, &a) in self.amps.iter().enumerate() {
            let (r, v) = op.apply_to_basis(c as u64);
            out[r as usize] += v * a;
        }
        Ok(out)
    }

    pub fn expectation(&self, op: &PauliOp) -> Result<f64> {
        let image = self.pauli_image(op)?;
        Ok(self.amps.iter().zip(&image).map(|(a, b)| a * b).sum())
    }

    /// Born probability of `outcome` when measuring the observable `op`.
    pub fn outcome_probability(&self, op: &PauliOp, outcome: Sign) -> Result<f64> {
        require_observable(op)?;
        let e = self.expectation(op)?;
        Ok(((1.0 + outcome.value() * e) / 2.0).clamp(0.0, 1.0))
    }

    /// Projects onto the `outcome` eigenspace of `op` and renormalizes.
    /// Returns the outcome probability.
    pub fn project(&mut self, op: &PauliOp, outcome: Sign) -> Result<f64> {
        require_observable(op)?;
        let image = self.pauli_image(op)?;
        let s = outcome.value();
        let projected: Vec<f64> = self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, b)| 0.5 * (a + s * b))
            .collect();
        let p: f64 = projected.iter().map(|a| a * a).sum();
        if p < ZERO_PROB {
            return Err(Error::ZeroProbability);
        }
        let norm = p.sqrt();
        self.amps = projected.into_iter().map(|a| a / norm).collect();
        Ok(p)
    }

    /// Samples a measurement of `op` and collapses the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, op: &PauliOp, rng: &mut R) -> Result<Sign> {
        let p_plus = self.outcome_probability(op, Sign::Plus)?;
        let outcome = if rng.gen::<f64>() < p_plus {
            Sign::Plus
        } else {
            Sign::Minus
        };
        self.project(op, outcome)?;
        Ok(outcome)
    }

    pub fn density(&self) -> Result<DenseDensity> {
        check_matrix_size(self.n)?;
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        Ok(DenseDensity {
            n: self.n,
            rho: &v * v.transpose(),
        })
    }

    /// Tensor product, `self` on the leading rebits.
    pub fn kron(&self, other: &DenseState) -> Result<DenseState> {
        let n = self.n + other.n;
        check_state_size(n)?;
        let mut amps = Vec::with_capacity(1 << n);
        for &a in &self.amps {
            amps.extend(other.amps.iter().map(|&b| a * b));
        }
        Ok(Self { n, amps })
    }

    pub fn inner(&self, other: &DenseState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a * b).sum())
    }

    /// Splits off the listed rebits, which must be unentangled from the rest.
    /// Returns the remaining register and the local state of the removed
    /// rebits (in the order given).
    pub fn remove_rebits(&self, rebits: &[usize]) -> Result<(DenseState, DenseState)> {
        let n = self.n;
        for &r in rebits {
            if r >= n {
                return Err(Error::IndexOutOfRange { index: r, len: n });
            }
        }
        let k = rebits.len();
        let rest: Vec<usize> = (0..n).filter(|i| !rebits.contains(i)).collect();
        if rest.len() + k != n {
            return Err(Error::Invalid("repeated rebit in removal list".into()));
        }
        let gather = |idx: usize, which: &[usize]| -> usize {
            which
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
        };
        // Matrix M[local][rest]; product states have rank one.
        let mut m = vec![vec![0.0; 1 << rest.len()]; 1 << k];
        for (idx, &a) in self.amps.iter().enumerate() {
            m[gather(idx, rebits)][gather(idx, &rest)] = a;
        }
        let norms: Vec<f64> = m.iter().map(|r| r.iter().map(|a| a * a).sum::<f64>()).collect();
        let best = (0..m.len())
            .max_by(|&a, &b| norms[a].total_cmp(&norms[b]))
            .expect("non-empty");
        let rest_amps: Vec<f64> = m[best].iter().map(|a| a / norms[best].sqrt()).collect();
        let local: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(&rest_amps).map(|(a, b)| a * b).sum())
            .collect();
        for (row, &l) in m.iter().zip(&local) {
            let dev = row
                .iter()
                .zip(&rest_amps)
                .map(|(a, b)| (a - l * b).abs())
                .fold(0.0, f64::max);
            if dev > 1e-9 {
                return Err(Error::NotProduct(rebits[0]));
            }
        }
        Ok((
            DenseState::from_unnormalized(rest_amps)?,
            DenseState::from_unnormalized(local)?,
        ))
    }

    fn check_op(&self, op: &PauliOp) -> Result<()> {
        if op.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: op.n(),
            });
        }
        Ok(())
    }
}

fn require_observable(op: &PauliOp) -> Result<()> {
    if !op.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// A real density matrix: symmetric, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRepr", into = "DensityRepr")]
pub struct DenseDensity {
    n: usize,
    rho: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct DensityRepr {
    n: usize,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<DensityRepr> for DenseDensity {
    type Error = Error;

    fn try_from(r: DensityRepr) -> Result<Self> {
        let dim = r.matrix.len();
        if r.matrix.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| r.matrix[i][j]);
        let d = DenseDensity::new(m)?;
        if d.n != r.n {
            return Err(Error::DimensionMismatch {
                expected: r.n,
                found: d.n,
            });
        }
        Ok(d)
    }
}

impl From<DenseDensity> for DensityRepr {
    fn from(d: DenseDensity) -> Self {
        let dim = d.rho.nrows();
        DensityRepr {
            n: d.n,
            matrix: (0..dim)
                .map(|i| (0..dim).map(|j| d.rho[(i, j)]).collect())
                .collect(),
        }
    }
}

impl DenseDensity {
    pub fn new(rho: DMatrix<f64>) -> Result<Self> {
        if rho.nrows() != rho.ncols() {
            return Err(Error::InvalidDensity("matrix is not square".into()));
        }
        let n = log2_len(rho.nrows())?;
        check_matrix_size(n)?;
        let asym = (&rho - rho.transpose()).amax();
        if asym > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not symmetric (deviation {asym:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} != 1")));
        }
        let min_eig = SymmetricEigen::new(rho.clone()).eigenvalues.min();
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { n, rho })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_matrix_size(n)?;
        let dim = 1usize << n;
        Ok(Self {
            n,
            rho: DMatrix::identity(dim, dim) / dim as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.rho
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.rho
    }

    /// `rho -> U rho U^T`.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        let dim = self.rho.nrows();
        let mut m = self.rho.clone();
        for pass in 0..2 {
            for j in 0..dim {
                let mut col: Vec<f64> = m.column(j).iter().copied().collect();
                if matches!(gate, GateOp::HAll) {
                    gates::hadamard_all_real(&mut col);
                } else {
                    gates::apply_gate(self.n, &mut col, gate)?;
                }
                m.set_column(j, &nalgebra::DVector::from_vec(col));
            }
            if pass == 0 {
                m = m.transpose();
            }
        }
        // First pass gives U rho, its transpose is rho U^T, second pass U rho U^T.
        self.rho = m;
        Ok(())
    }

    pub fn expectation(&self, op: &PauliOp) -> Result<f64> {
        self.check_op(op)?;
        let dim = self.rho.nrows();
        let mut tr = 0.0;
        for c in 0..dim {
            let (r, v) = op.apply_to_basis(c as u64);
            tr += v * self.rho[(c, r as usize)];
        }
        Ok(tr)
    }

    pub fn outcome_probability(&self, op: &PauliOp, outcome: Sign) -> Result<f64> {
        require_observable(op)?;
        let e = self.expectation(op)?;
        Ok(((1.0 + outcome.value() * e) / 2.0).clamp(0.0, 1.0))
    }

    /// Post-measurement state for `outcome`, and its probability.
    pub fn project(&mut self, op: &PauliOp, outcome: Sign) -> Result<f64> {
        require_observable(op)?;
        self.check_op(op)?;
        let dim = self.rho.nrows();
        let proj = (DMatrix::identity(dim, dim) + dense_matrix(op)? * outcome.value()) * 0.5;
        let unnorm = &proj * &self.rho * &proj;
        let p = unnorm.trace();
        if p < ZERO_PROB {
            return Err(Error::ZeroProbability);
        }
        self.rho = unnorm / p;
        Ok(p)
    }

    pub fn kron(&self, other: &DenseDensity) -> Result<DenseDensity> {
        check_matrix_size(self.n + other.n)?;
        Ok(Self {
            n: self.n + other.n,
            rho: self.rho.kronecker(&other.rho),
        })
    }

    fn check_op(&self, op: &PauliOp) -> Result<()> {
        if op.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: op.n(),
            });
        }
        Ok(())
    }
}
