//! Named states and parametric families used throughout the examples.

use nalgebra::DMatrix;

use crate::css::StabilizerGroup;
use crate::dense::{DenseState, GateOp};
use crate::error::{Error, Result};
use crate::gf2::PhasePoint;
use crate::pauli::{dense_matrix, PauliOp, Sign};

/// `prod_{(i,j) in edges} CZ_{ij} |+>^n`.
pub fn graph_state(n: usize, edges: &[(usize, usize)]) -> Result<DenseState> {
    let mut s = DenseState::zero(n)?;
    for i in 0..n {
        s.apply(&GateOp::H(i))?;
    }
    for &(i, j) in edges {
        s.apply(&GateOp::Cz(i, j))?;
    }
    Ok(s)
}

/// Stabilizer generators `X_i prod_{j ~ i} Z_j` of a graph state.
pub fn graph_stabilizers(n: usize, edges: &[(usize, usize)]) -> Result<StabilizerGroup> {
    let gens = (0..n)
        .map(|i| {
            let z = edges.iter().fold(0u64, |acc, &(a, b)| {
                if a == i {
                    acc | 1 << (n - 1 - b)
                } else if b == i {
                    acc | 1 << (n - 1 - a)
                } else {
                    acc
                }
            });
            Ok(PauliOp::plus(PhasePoint::new(n, z, 1 << (n - 1 - i))?))
        })
        .collect::<Result<Vec<_>>>()?;
    StabilizerGroup::new(gens)
}

/// Two-rebit graph state, stabilized by `+XZ` and `+ZX`.
pub fn g2() -> DenseState {
    graph_state(2, &[(0, 1)]).expect("two rebits")
}

/// Two-rebit graph state variant stabilized by `-XZ` and `-ZX`.
pub fn k2() -> DenseState {
    let mut s = g2();
    s.apply(&GateOp::Z(0)).expect("two rebits");
    s.apply(&GateOp::Z(1)).expect("two rebits");
    s
}

/// Triangle graph state on three rebits.
pub fn k3() -> DenseState {
    graph_state(3, &[(0, 1), (1, 2), (0, 2)]).expect("three rebits")
}

pub fn ghz(n: usize) -> Result<DenseState> {
    if n == 0 {
        return Err(Error::Invalid("GHZ state needs at least one rebit".into()));
    }
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    amps[(1 << n) - 1] = 1.0;
    DenseState::from_unnormalized(amps)
}

/// `(|00> + |11>)/sqrt 2`.
pub fn bell() -> DenseState {
    ghz(2).expect("two rebits")
}

/// `(I + x X + z Z)/2`; positive semidefinite iff `x^2 + z^2 <= 1`.
pub fn one_rebit_operator(x: f64, z: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0 + z, x, x, 1.0 - z]) * 0.5
}

pub fn one_rebit_is_physical(x: f64, z: f64) -> bool {
    x * x + z * z <= 1.0 + 1e-12
}

/// `(I + a XZ)(I + b ZX)/4`; positive semidefinite iff `|a|, |b| <= 1`.
pub fn two_rebit_operator(a: f64, b: f64) -> DMatrix<f64> {
    let xz = dense_matrix(&"XZ".parse::<PauliOp>().expect("valid")).expect("small");
    let zx = dense_matrix(&"ZX".parse::<PauliOp>().expect("valid")).expect("small");
    let id = DMatrix::<f64>::identity(4, 4);
    (&id + xz * a) * (&id + zx * b) * 0.25
}

pub fn two_rebit_is_physical(a: f64, b: f64) -> bool {
    a.abs() <= 1.0 + 1e-12 && b.abs() <= 1.0 + 1e-12
}

/// Stabilizer group whose eigenbasis diagonalizes the two-rebit family.
pub fn two_rebit_basis_group() -> StabilizerGroup {
    StabilizerGroup::new(vec!["XZ".parse().expect("valid"), "ZX".parse().expect("valid")]).expect("commuting")
}

/// Looks up a state by name: `zeroN`, `oneN`, `plusN`, `minusN`, `ghzN`,
/// `bell`, `g2`, `k2`, `k3`, `b` (alias of `g2`).
pub fn named_state(name: &str) -> Result<DenseState> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        "bell" => return Ok(bell()),
        "g2" | "b" => return Ok(g2()),
        "k2" => return Ok(k2()),
        "k3" => return Ok(k3()),
        _ => {}
    }
    let split = lower
        .find(|c: char| c.is_ascii_digit())
        .ok_or_else(|| Error::Invalid(format!("unknown state '{name}'")))?;
    let (stem, digits) = lower.split_at(split);
    let n: usize = digits
        .parse()
        .map_err(|_| Error::Invalid(format!("unknown state '{name}'")))?;
    let mut s = DenseState::zero(n)?;
    let each = |s: &mut DenseState, g: fn(usize) -> GateOp| -> Result<()> {
        (0..n).try_for_each(|i| s.apply(&g(i)))
    };
    match stem {
        "zero" => {}
        "one" => each(&mut s, GateOp::X)?,
        "plus" => each(&mut s, GateOp::H)?,
        "minus" => {
            each(&mut s, GateOp::X)?;
            each(&mut s, GateOp::H)?;
        }
        "ghz" => s = ghz(n)?,
        _ => return Err(Error::Invalid(format!("unknown state '{name}'"))),
    }
    Ok(s)
}

/// Sign of a group element's eigenvalue on a state, if the state is an
/// eigenstate.
pub fn eigen_sign(state: &DenseState, op: &PauliOp) -> Result<Option<Sign>> {
    let e = state.expectation(op)?;
    Ok(if (e - 1.0).abs() < 1e-10 {
        Some(Sign::Plus)
    } else if (e + 1.0).abs() < 1e-10 {
        Some(Sign::Minus)
    } else {
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> PauliOp {
        s.parse().unwrap()
    }

    #[test]
    fn graph_state_stabilizers() {
        for (n, edges) in [
            (2, vec![(0, 1)]),
            (3, vec![(0, 1), (1, 2), (0, 2)]),
            (4, vec![(0, 1), (1, 2), (2, 3)]),
        ] {
            let s = graph_state(n, &edges).unwrap();
            for g in graph_stabilizers(n, &edges).unwrap().generators() {
                assert_eq!(eigen_sign(&s, g).unwrap(), Some(Sign::Plus));
            }
        }
        let k = k3();
        for g in ["XZZ", "ZXZ", "ZZX", "-XXX"] {
            assert_eq!(eigen_sign(&k, &op(g)).unwrap(), Some(Sign::Plus), "{g}");
        }
        assert_eq!(eigen_sign(&k2(), &op("XZ")).unwrap(), Some(Sign::Minus));
        assert_eq!(eigen_sign(&k2(), &op("ZX")).unwrap(), Some(Sign::Minus));
        assert_eq!(eigen_sign(&g2(), &op("YY")).unwrap(), Some(Sign::Plus));
    }

    #[test]
    fn families() {
        let r = one_rebit_operator(0.6, -0.8);
        assert!((r.trace() - 1.0).abs() < 1e-15);
        assert!(r.symmetric_eigen().eigenvalues.min() > -1e-12);
        assert!(one_rebit_is_physical(0.6, -0.8));
        assert!(!one_rebit_is_physical(0.8, 0.8));
        let t = two_rebit_operator(1.0, 1.0);
        assert!((t.trace() - 1.0).abs() < 1e-15);
        // Corner state is the +1 eigenstate of XZ and ZX: a rank-one projector.
        assert!(((&t * &t) - &t).abs().max() < 1e-12);
        assert!(two_rebit_operator(0.5, -1.5).symmetric_eigen().eigenvalues.min() < 0.0);
    }

    #[test]
    fn names() {
        assert_eq!(named_state("one2").unwrap().amplitudes(), &[0.0, 0.0, 0.0, 1.0]);
        assert!((named_state("minus1").unwrap().amplitudes()[1] + 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(named_state("ghz3").unwrap().n(), 3);
        assert!(named_state("k9").is_err());
        assert!(named_state("bogus3").is_err());
    }
}
