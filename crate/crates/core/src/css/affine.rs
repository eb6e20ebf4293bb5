use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dense::GateOp;
use crate::error::{parse_err, Error, Result};
use crate::gf2::{GF2Matrix, PhasePoint};
use crate::pauli::PauliOp;
use crate::wigner::WignerTable;

/// A generator of the CSS-preserving gate group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CssGate {
    Cnot { control: usize, target: usize },
    HAll,
    X(usize),
    Z(usize),
}

impl CssGate {
    pub fn check(&self, n: usize) -> Result<()> {
        GateOp::from(*self).check(n)
    }
}

impl From<CssGate> for GateOp {
    fn from(g: CssGate) -> GateOp {
        match g {
            CssGate::Cnot { control, target } => GateOp::Cnot { control, target },
            CssGate::HAll => GateOp::HAll,
            CssGate::X(i) => GateOp::X(i),
            CssGate::Z(i) => GateOp::Z(i),
        }
    }
}

impl TryFrom<GateOp> for CssGate {
    type Error = Error;

    fn try_from(g: GateOp) -> Result<CssGate> {
        match g {
            GateOp::Cnot { control, target } => Ok(CssGate::Cnot { control, target }),
            GateOp::HAll => Ok(CssGate::HAll),
            GateOp::X(i) => Ok(CssGate::X(i)),
            GateOp::Z(i) => Ok(CssGate::Z(i)),
            other => Err(Error::UnsupportedGate(other.to_string())),
        }
    }
}

impl fmt::Display for CssGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        GateOp::from(*self).fmt(f)
    }
}

impl FromStr for CssGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<CssGate> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        let idx = |k: usize| -> Result<usize> {
            parts
                .get(k)
                .ok_or_else(|| parse_err(0, format!("missing operand in '{s}'")))?
                .parse()
                .map_err(|_| parse_err(0, format!("invalid index in '{s}'")))
        };
        let gate = match parts.first().map(|p| p.to_ascii_uppercase()).as_deref() {
            Some("CNOT") => CssGate::Cnot {
                control: idx(1)?,
                target: idx(2)?,
            },
            Some("HALL") => CssGate::HAll,
            Some("X") => CssGate::X(idx(1)?),
            Some("Z") => CssGate::Z(idx(1)?),
            _ => return Err(parse_err(0, format!("unknown CSS gate '{s}'"))),
        };
        let expected = match gate {
            CssGate::Cnot { .. } => 3,
            CssGate::HAll => 1,
            _ => 2,
        };
        if parts.len() != expected {
            return Err(parse_err(0, format!("wrong operand count in '{s}'")));
        }
        Ok(gate)
    }
}

/// Affine symplectic map `u -> F u + t` on `Z_2^{2n}` with `F` in CSS block
/// form. The gate it represents acts as `g T_a g^T = (-1)^{[t, F a]} T_{F a}`
/// on symmetric `T_a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineSymplectic {
    n: usize,
    f: GF2Matrix,
    t: PhasePoint,
}

/// Which CSS block form a matrix has.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockForm {
    Diagonal,
    AntiDiagonal,
}

impl AffineSymplectic {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            f: GF2Matrix::identity(2 * n),
            t: PhasePoint::zero(n),
        }
    }

    /// Validates that `f` is symplectic and in CSS block form.
    pub fn new(f: GF2Matrix, t: PhasePoint) -> Result<Self> {
        let n = t.n();
        if f.rows() != 2 * n || f.cols() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: f.rows(),
            });
        }
        let m = Self { n, f, t };
        if !m.is_symplectic() {
            return Err(Error::Invalid("matrix is not symplectic".into()));
        }
        if m.block_form().is_none() {
            return Err(Error::Invalid("matrix is not in CSS block form".into()));
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &GF2Matrix {
        &self.f
    }

    pub fn translation(&self) -> PhasePoint {
        self.t
    }

    /// `F u` without the translation.
    pub fn linear(&self, u: &PhasePoint) -> PhasePoint {
        PhasePoint::from_index(self.n, self.f.mul_bits(u.index()))
    }

    /// `F u + t`.
    pub fn apply(&self, u: &PhasePoint) -> PhasePoint {
        self.linear(u) + self.t
    }

    /// `self o inner`: apply `inner` first.
    pub fn compose(&self, inner: &AffineSymplectic) -> Result<AffineSymplectic> {
        if self.n != inner.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.n,
            });
        }
        Ok(Self {
            n: self.n,
            f: self.f.mul(&inner.f)?,
            t: self.linear(&inner.t) + self.t,
        })
    }

    pub fn inverse(&self) -> AffineSymplectic {
        let f_inv = self.f.inverse().expect("symplectic matrices are invertible");
        let t = PhasePoint::from_index(self.n, f_inv.mul_bits(self.t.index()));
        Self {
            n: self.n,
            f: f_inv,
            t,
        }
    }

    /// The Pauli shift `x = F^{-1} t`, so that `g T_a g^T = (-1)^{[x,a]} T_{Fa}`.
    pub fn pauli_shift(&self) -> PhasePoint {
        self.inverse().t
    }

    /// Conjugates a symmetric Pauli operator by the represented gate.
    pub fn conjugate(&self, op: &PauliOp) -> Result<PauliOp> {
        if !op.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let fa = self.linear(&op.label);
        Ok(PauliOp::new(op.sign.flip_if(self.t.sym(&fa)), fa))
    }

    /// `W'(F u + t) = W(u)`.
    pub fn apply_to_table(&self, w: &WignerTable) -> Result<WignerTable> {
        if w.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: w.n(),
            });
        }
        let mut values = vec![0.0; w.values().len()];
        for u in PhasePoint::all(self.n) {
            values[self.apply(&u).index() as usize] = w.get(&u);
        }
        WignerTable::new(self.n, values)
    }

    pub fn is_symplectic(&self) -> bool {
        let dim = 2 * self.n;
        let cols: Vec<u64> = (0..dim).map(|j| self.f.mul_bits(1u64 << (dim - 1 - j))).collect();
        (0..dim).all(|i| {
            (0..dim).all(|j| {
                crate::gf2::sym_index(self.n, cols[i], cols[j])
                    == crate::gf2::sym_index(self.n, 1u64 << (dim - 1 - i), 1u64 << (dim - 1 - j))
            })
        })
    }

    /// The CSS block form, if any, with `F_X = (F_Z^{-1})^T`.
    pub fn block_form(&self) -> Option<BlockForm> {
        let n = self.n;
        let a = self.f.block(0, 0, n, n);
        let b = self.f.block(0, n, n, n);
        let c = self.f.block(n, 0, n, n);
        let d = self.f.block(n, n, n, n);
        let dual = |m: &GF2Matrix| m.inverse().map(|i| i.transpose());
        if b.is_zero() && c.is_zero() && dual(&a).as_ref() == Some(&d) {
            Some(BlockForm::Diagonal)
        } else if a.is_zero() && d.is_zero() && dual(&b).as_ref() == Some(&c) {
            Some(BlockForm::AntiDiagonal)
        } else {
            None
        }
    }
}

/// Affine map of a single CSS gate on `n` rebits.
pub fn gate_to_affine(gate: &CssGate, n: usize) -> Result<AffineSymplectic> {
    gate.check(n)?;
    let id = GF2Matrix::identity(n);
    let zero = GF2Matrix::zeros(n, n);
    Ok(match *gate {
        CssGate::HAll => AffineSymplectic {
            n,
            f: GF2Matrix::from_blocks(&zero, &id, &id, &zero),
            t: PhasePoint::zero(n),
        },
        CssGate::Cnot { control, target } => {
            let mut fz = id.clone();
            fz.set(control, target, true);
            let mut fx = id;
            fx.set(target, control, true);
            AffineSymplectic {
                n,
                f: GF2Matrix::from_blocks(&fz, &zero, &zero, &fx),
                t: PhasePoint::zero(n),
            }
        }
        CssGate::X(i) => AffineSymplectic {
            n,
            f: GF2Matrix::identity(2 * n),
            t: PhasePoint::x_at(n, i),
        },
        CssGate::Z(i) => AffineSymplectic {
            n,
            f: GF2Matrix::identity(2 * n),
            t: PhasePoint::z_at(n, i),
        },
    })
}

/// Affine map of a gate word applied left to right.
pub fn word_to_affine(word: &[CssGate], n: usize) -> Result<AffineSymplectic> {
    word.iter().try_fold(AffineSymplectic::identity(n), |acc, g| {
        gate_to_affine(g, n)?.compose(&acc)
    })
}

/// Checks `W_{g rho g^T}(F u + t) = W_rho(u)` at every point.
pub fn covariance_check(before: &WignerTable, after: &WignerTable, map: &AffineSymplectic) -> bool {
    map.apply_to_table(before)
        .and_then(|w| w.max_abs_diff(after))
        .map(|d| d <= 1e-10)
        .unwrap_or(false)
}
