use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::fwht;

/// Gates understood by the dense backend. Rebit indices are 0-based with
/// rebit 0 the most significant bit of a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum GateOp {
    Cnot {
        control: usize,
        target: usize,
    },
    /// Hadamard on every rebit.
    HAll,
    /// Hadamard on one rebit (oracle only).
    H(usize),
    X(usize),
    Z(usize),
    /// Controlled-Z (oracle only).
    Cz(usize, usize),
    /// `exp(i theta Z)` on one rebit.
    Rz(usize, f64),
}

impl GateOp {
    /// Member of the CSS-preserving gate set.
    pub fn is_css(&self) -> bool {
        matches!(
            self,
            GateOp::Cnot { .. } | GateOp::HAll | GateOp::X(_) | GateOp::Z(_)
        )
    }

    /// True when the gate has a real matrix: everything except `Rz` with an
    /// angle outside `{0, pi}` mod `2 pi`.
    pub fn is_real(&self) -> bool {
        match self {
            GateOp::Rz(_, theta) => real_rz_sign(*theta).is_some(),
            _ => true,
        }
    }

    pub(crate) fn check(&self, n: usize) -> Result<()> {
        let idx = |i: usize| -> Result<()> {
            if i >= n {
                Err(Error::IndexOutOfRange { index: i, len: n })
            } else {
                Ok(())
            }
        };
        match *self {
            GateOp::Cnot { control, target } => {
                idx(control)?;
                idx(target)?;
                if control == target {
                    return Err(Error::Invalid("CNOT control equals target".into()));
                }
            }
            GateOp::Cz(a, b) => {
                idx(a)?;
                idx(b)?;
                if a == b {
                    return Err(Error::Invalid("CZ on a single rebit".into()));
                }
            }
            GateOp::HAll => {}
            GateOp::H(i) | GateOp::X(i) | GateOp::Z(i) | GateOp::Rz(i, _) => idx(i)?,
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            GateOp::HAll => write!(f, "HALL"),
            GateOp::H(i) => write!(f, "H {i}"),
            GateOp::X(i) => write!(f, "X {i}"),
            GateOp::Z(i) => write!(f, "Z {i}"),
            GateOp::Cz(a, b) => write!(f, "CZ {a} {b}"),
            GateOp::Rz(i, t) => write!(f, "RZ {i} {t}"),
        }
    }
}

/// `exp(i theta Z)` is `+-I` for `theta` in `{0, pi}` mod `2 pi`.
fn real_rz_sign(theta: f64) -> Option<f64> {
    let r = theta.rem_euclid(2.0 * PI);
    let tol = 1e-12;
    if r < tol || (2.0 * PI - r) < tol {
        Some(1.0)
    } else if (r - PI).abs() < tol {
        Some(-1.0)
    } else {
        None
    }
}

#[inline]
fn bit(n: usize, i: usize) -> usize {
    1usize << (n - 1 - i)
}

/// Applies a gate to an amplitude vector over `n` rebits. Works for any
/// scalar that supports the needed arithmetic.
pub(crate) trait Amplitude:
    Copy
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::Mul<f64, Output = Self>
{
    fn rz(self, theta: f64, one: bool) -> Option<Self>;
}

impl Amplitude for f64 {
    fn rz(self, theta: f64, _one: bool) -> Option<Self> {
        real_rz_sign(theta).map(|s| self * s)
    }
}

impl Amplitude for Complex64 {
    fn rz(self, theta: f64, one: bool) -> Option<Self> {
        let phase = if one { -theta } else { theta };
        Some(self * Complex64::from_polar(1.0, phase))
    }
}

pub(crate) fn apply_gate<T: Amplitude>(n: usize, amps: &mut [T], gate: &GateOp) -> Result<()> {
    gate.check(n)?;
    debug_assert_eq!(amps.len(), 1 << n);
    match *gate {
        GateOp::X(i) => {
            let b = bit(n, i);
            for idx in 0..amps.len() {
                if idx & b == 0 {
                    amps.swap(idx, idx | b);
                }
            }
        }
        GateOp::Z(i) => {
            let b = bit(n, i);
            for (idx, a) in amps.iter_mut().enumerate() {
                if idx & b != 0 {
                    *a = -*a;
                }
            }
        }
        GateOp::H(i) => {
            let b = bit(n, i);
            for idx in 0..amps.len() {
                if idx & b == 0 {
                    let (lo, hi) = (amps[idx], amps[idx | b]);
                    amps[idx] = (lo + hi) * FRAC_1_SQRT_2;
                    amps[idx | b] = (lo - hi) * FRAC_1_SQRT_2;
                }
            }
        }
        GateOp::HAll => {
            for i in 0..n {
                apply_gate(n, amps, &GateOp::H(i))?;
            }
        }
        GateOp::Cnot { control, target } => {
            let (c, t) = (bit(n, control), bit(n, target));
            for idx in 0..amps.len() {
                if idx & c != 0 && idx & t == 0 {
                    amps.swap(idx, idx | t);
                }
            }
        }
        GateOp::Cz(a, b) => {
            let m = bit(n, a) | bit(n, b);
            for (idx, amp) in amps.iter_mut().enumerate() {
                if idx & m == m {
                    *amp = -*amp;
                }
            }
        }
        GateOp::Rz(i, theta) => {
            let b = bit(n, i);
            for (idx, a) in amps.iter_mut().enumerate() {
                *a = a
                    .rz(theta, idx & b != 0)
                    .ok_or_else(|| Error::UnsupportedGate(gate.to_string()))?;
            }
        }
    }
    Ok(())
}

/// Fast path for `HAll` on real amplitudes.
pub(crate) fn hadamard_all_real(amps: &mut [f64]) {
    fwht(amps);
    let norm = (amps.len() as f64).sqrt().recip();
    amps.iter_mut().for_each(|a| *a *= norm);
}
