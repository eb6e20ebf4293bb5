use serde::Serialize;

use crate::css::{gate_to_affine, AffineSymplectic, CssGate};
use crate::dense::DenseDensity;
use crate::error::{Error, Result};
use crate::gf2::{parity, Form, GF2Subspace, GF2Vector, PhasePoint};
use crate::pauli::{in_set_o, PauliOp};
use crate::wigner::WignerTable;

/// Basis `a_1..a_m` of an isotropic subspace of symmetric labels, with dual
/// vectors `b_1..b_m` satisfying `[a_i, b_j] = delta_ij`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessSpec {
    n: usize,
    basis: Vec<PhasePoint>,
    conjugates: Vec<PhasePoint>,
}

fn check_basis(n: usize, basis: &[PhasePoint]) -> Result<()> {
    for a in basis {
        if a.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.n(),
            });
        }
        if !a.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
    }
    let span = GF2Subspace::span_bits(2 * n, basis.iter().map(PhasePoint::index));
    if span.dim() != basis.len() {
        return Err(Error::DependentGenerators);
    }
    if !span.is_isotropic(Form::Symplectic)? {
        return Err(Error::NotIsotropic);
    }
    Ok(())
}

/// Dual vectors for an isotropic basis. Each `b_j` is the smallest integer
/// solution of `[a_i, b_j] = delta_ij`.
pub fn conjugate_basis(n: usize, basis: &[PhasePoint]) -> Result<Vec<PhasePoint>> {
    check_basis(n, basis)?;
    // Row-reduce the system rows [a_i, .] = swap(a_i) . , tracking which
    // original rows each reduced row combines.
    let mut rows: Vec<(u64, u64)> = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        let mut v = a.swapped().index();
        let mut combo = 1u64 << i;
        for &(r, c) in &rows {
            if v >> (63 - r.leading_zeros()) & 1 == 1 {
                v ^= r;
                combo ^= c;
            }
        }
        let p = 63 - v.leading_zeros();
        for (r, c) in rows.iter_mut() {
            if *r >> p & 1 == 1 {
                *r ^= v;
                *c ^= combo;
            }
        }
        rows.push((v, combo));
    }
    let kernel = GF2Subspace::span_bits(2 * n, basis.iter().map(PhasePoint::index)).symplectic_complement();
    Ok((0..basis.len())
        .map(|j| {
            let particular = rows
                .iter()
                .filter(|(_, c)| c >> j & 1 == 1)
                .fold(0u64, |acc, &(r, _)| acc | 1u64 << (63 - r.leading_zeros()));
            PhasePoint::from_index(n, kernel.reduce(particular))
        })
        .collect())
}

impl WitnessSpec {
    /// Builds the spec with the canonical dual vectors.
    pub fn new(n: usize, basis: Vec<PhasePoint>) -> Result<Self> {
        let conjugates = conjugate_basis(n, &basis)?;
        Ok(Self { n, basis, conjugates })
    }

    /// Builds the spec with caller-supplied dual vectors.
    pub fn with_conjugates(n: usize, basis: Vec<PhasePoint>, conjugates: Vec<PhasePoint>) -> Result<Self> {
        check_basis(n, &basis)?;
        if conjugates.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: conjugates.len(),
            });
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in conjugates.iter().enumerate() {
                if b.n() != n || a.sym(b) != (i == j) {
                    return Err(Error::Invalid(
                        "conjugate vectors are not dual to the basis".into(),
                    ));
                }
            }
        }
        Ok(Self { n, basis, conjugates })
    }

    /// Parses a comma-separated list of Pauli strings; signs are ignored
    /// since only labels enter the witness.
    pub fn parse(text: &str) -> Result<Self> {
        let ops = text
            .split(',')
            .map(|s| s.trim().parse::<PauliOp>())
            .collect::<Result<Vec<_>>>()?;
        let n = ops
            .first()
            .map(PauliOp::n)
            .ok_or_else(|| Error::Invalid("empty witness basis".into()))?;
        Self::new(n, ops.into_iter().map(|o| o.label).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PhasePoint] {
        &self.basis
    }

    pub fn conjugates(&self) -> &[PhasePoint] {
        &self.conjugates
    }

    pub fn subspace(&self) -> GF2Subspace {
        GF2Subspace::span_bits(2 * self.n, self.basis.iter().map(PhasePoint::index))
    }

    /// `sum_i z_i a_i` for a coefficient mask (bit `i` selects `a_i`).
    fn combination(&self, vectors: &[PhasePoint], mask: u64) -> PhasePoint {
        vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(PhasePoint::zero(self.n), |acc, (_, v)| acc + *v)
    }

    fn x_mask(&self, x: &GF2Vector) -> Result<u64> {
        if x.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: x.len(),
            });
        }
        Ok((0..self.m()).filter(|&i| x.get(i)).fold(0, |acc, i| acc | 1 << i))
    }

    /// The terms `(-1)^{z.x} T_{sum z_i a_i}` of the witness operator.
    pub fn terms(&self, x: &GF2Vector) -> Result<Vec<(f64, PhasePoint)>> {
        let xm = self.x_mask(x)?;
        Ok((0..1u64 << self.m())
            .map(|z| {
                let sign = if parity(z & xm) { -1.0 } else { 1.0 };
                (sign, self.combination(&self.basis, z))
            })
            .collect())
    }
}

/// Witness value from expectation values of the label operators.
pub fn witness_value(rho: &DenseDensity, spec: &WitnessSpec, x: &GF2Vector) -> Result<f64> {
    if rho.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: rho.n(),
        });
    }
    spec.terms(x)?
        .into_iter()
        .map(|(s, a)| Ok(s * rho.expectation(&PauliOp::plus(a))?))
        .sum()
}

/// Witness value as `2^m sum_{v in U^perp} W(v + sum_i x_i b_i)`.
pub fn witness_value_wigner(w: &WignerTable, spec: &WitnessSpec, x: &GF2Vector) -> Result<f64> {
    if w.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            found: w.n(),
        });
    }
    let eta = spec.combination(&spec.conjugates, spec.x_mask(x)?).index();
    let perp = spec.subspace().symplectic_complement();
    let sum: f64 = perp.elements().map(|v| w.at(v ^ eta)).sum();
    Ok((1u64 << spec.m()) as f64 * sum)
}

/// One circuit step to pull a witness back through.
#[derive(Clone, Debug, PartialEq)]
pub enum PullbackStep {
    Gate(CssGate),
    Affine(AffineSymplectic),
    /// Non-selective measurement of `T_c`, `c` in O.
    Measure(PhasePoint),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Pullback {
    /// Witness on the state before the step with the same value.
    Pulled {
        spec: WitnessSpec,
        x: GF2Vector,
    },
    Rejected {
        reason: String,
    },
}

/// Rewrites a witness on the state after `step` as a witness on the state
/// before it. Measurements that anticommute with the witness subspace are
/// rejected.
pub fn witness_pullback(spec: &WitnessSpec, x: &GF2Vector, step: &PullbackStep) -> Result<Pullback> {
    spec.x_mask(x)?;
    let map = match step {
        PullbackStep::Gate(g) => gate_to_affine(g, spec.n)?,
        PullbackStep::Affine(m) => {
            if m.n() != spec.n {
                return Err(Error::DimensionMismatch {
                    expected: spec.n,
                    found: m.n(),
                });
            }
            m.clone()
        }
        PullbackStep::Measure(c) => {
            if c.n() != spec.n {
                return Err(Error::DimensionMismatch {
                    expected: spec.n,
                    found: c.n(),
                });
            }
            let op = PauliOp::plus(*c);
            if !in_set_o(&op) {
                return Err(Error::NotInO(op.to_string()));
            }
            return Ok(match spec.basis.iter().position(|a| a.sym(c)) {
                None => Pullback::Pulled {
                    spec: spec.clone(),
                    x: *x,
                },
                Some(i) => Pullback::Rejected {
                    reason: format!(
                        "measured {op} anticommutes with witness basis element {}; \
                         the post-measurement state cannot carry this witness maximally",
                        PauliOp::plus(spec.basis[i])
                    ),
                },
            });
        }
    };
    let inv = map.inverse();
    let shift = map.pauli_shift();
    let basis: Vec<PhasePoint> = spec.basis.iter().map(|a| inv.linear(a)).collect();
    let conjugates = spec.conjugates.iter().map(|b| inv.linear(b)).collect();
    let mut x_new = *x;
    for (i, a) in basis.iter().enumerate() {
        if shift.sym(a) {
            x_new.set(i, !x_new.get(i));
        }
    }
    Ok(Pullback::Pulled {
        spec: WitnessSpec::with_conjugates(spec.n, basis, conjugates)?,
        x: x_new,
    })
}

/// Pulls a witness back through a whole circuit, last step first.
pub fn witness_pullback_word(spec: &WitnessSpec, x: &GF2Vector, steps: &[PullbackStep]) -> Result<Pullback> {
    let mut current = Pullback::Pulled {
        spec: spec.clone(),
        x: *x,
    };
    for step in steps.iter().rev() {
        current = match current {
            Pullback::Pulled { spec, x } => witness_pullback(&spec, &x, step)?,
            rejected => return Ok(rejected),
        };
    }
    Ok(current)
}
