use std::collections::BTreeMap;

use serde::Serialize;

use crate::dense::DenseDensity;
use crate::error::{Error, Result};
use crate::gf2::{parity, PhasePoint};
use crate::pauli::{is_jointly_measurable, pauli_product, PauliOp, Sign};
use crate::wigner::WignerTable;

/// Joint outcome distribution keyed by outcome strings (`0` for `+1`, `1`
/// for `-1`, one character per observable).
pub type JointDistribution = BTreeMap<String, f64>;

/// Deterministic hidden-variable state `u`: `lambda_u(+-T_a) = +-(-1)^{[u,a]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ValueAssignment {
    pub u: PhasePoint,
}

impl ValueAssignment {
    pub fn value(&self, op: &PauliOp) -> Sign {
        op.sign.flip_if(self.u.sym(&op.label))
    }
}

fn key(bits: u64, k: usize) -> String {
    (0..k)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_setting(n: usize, ops: &[PauliOp]) -> Result<()> {
    if let Some(op) = ops.iter().find(|o| o.n() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: op.n(),
        });
    }
    if !is_jointly_measurable(ops) {
        return Err(Error::Invalid(
            "observables are not jointly measurable with CSS-preserving operations".into(),
        ));
    }
    if ops.len() > 20 {
        return Err(Error::TooLarge {
            requested: ops.len(),
            max: 20,
        });
    }
    Ok(())
}

/// Outcome distribution predicted by the model that samples `u` from `W`
/// and answers with `lambda_u`.
pub fn hvm_predict(w: &WignerTable, ops: &[PauliOp]) -> Result<JointDistribution> {
    check_setting(w.n(), ops)?;
    let neg = w.negativity();
    if !neg.is_nonnegative {
        return Err(Error::NegativeTable {
            value: neg.min_value,
            point: neg.argmin.index() as usize,
        });
    }
    let mut probs = vec![0.0; 1 << ops.len()];
    for u in PhasePoint::all(w.n()) {
        let lambda = ValueAssignment { u };
        let bits = ops
            .iter()
            .enumerate()
            .filter(|(_, o)| lambda.value(o).is_negative())
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        probs[bits as usize] += w.get(&u);
    }
    Ok(probs
        .into_iter()
        .enumerate()
        .map(|(b, p)| (key(b as u64, ops.len()), p))
        .collect())
}

/// Born probabilities `Tr(prod_i (I + s_i O_i)/2 rho)`, expanded over
/// products of the commuting observables.
pub fn born_joint_distribution(rho: &DenseDensity, ops: &[PauliOp]) -> Result<JointDistribution> {
    check_setting(rho.n(), ops)?;
    let k = ops.len();
    let mut expectations = Vec::with_capacity(1 << k);
    for z in 0..1u64 << k {
        let prod = ops
            .iter()
            .enumerate()
            .filter(|(i, _)| z >> i & 1 == 1)
            .try_fold(PauliOp::identity(rho.n()), |acc, (_, o)| pauli_product(&acc, o))?;
        expectations.push(rho.expectation(&prod)?);
    }
    let scale = 1.0 / (1u64 << k) as f64;
    Ok((0..1u64 << k)
        .map(|s| {
            let p: f64 = (0..1u64 << k)
                .map(|z| {
                    let e = expectations[z as usize];
                    if parity(z & s) {
                        -e
                    } else {
                        e
                    }
                })
                .sum();
            (key(s, k), p * scale)
        })
        .collect())
}

/// One line of the rotated Mermin square.
#[derive(Clone, Debug, Serialize)]
pub struct MerminLine {
    pub observables: Vec<String>,
    pub jointly_measurable: bool,
    /// The operator product of the line is `product_sign * I`.
    pub product_sign: i8,
    pub all_plus_consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MerminReport {
    pub lines: Vec<MerminLine>,
    /// Every admitted line accepts the all-`+1` assignment.
    pub all_plus_consistent_on_admitted: bool,
    /// Only the line `XZ, ZX, -YY` is excluded.
    pub bottom_row_excluded: bool,
}

/// Rows then columns of the rotated square
/// `(X1, X2, XX), (Z2, Z1, ZZ), (XZ, ZX, -YY)`.
pub fn mermin_square() -> Result<MerminReport> {
    let grid = [["XI", "IX", "XX"], ["IZ", "ZI", "ZZ"], ["XZ", "ZX", "-YY"]];
    let mut lines_text: Vec<[&str; 3]> = grid.to_vec();
    lines_text.extend((0..3).map(|c| [grid[0][c], grid[1][c], grid[2][c]]));
    let mut lines = Vec::new();
    for text in lines_text {
        let ops = text
            .iter()
            .map(|s| s.parse::<PauliOp>())
            .collect::<Result<Vec<_>>>()?;
        let prod = ops
            .iter()
            .try_fold(PauliOp::identity(2), |acc, o| pauli_product(&acc, o))?;
        if !prod.label.is_zero() {
            return Err(Error::Invalid("Mermin line does not multiply to +-I".into()));
        }
        let product_sign = if prod.sign.is_negative() { -1 } else { 1 };
        lines.push(MerminLine {
            observables: text.iter().map(|s| s.to_string()).collect(),
            jointly_measurable: is_jointly_measurable(&ops),
            product_sign,
            all_plus_consistent: product_sign == 1,
        });
    }
    let all_plus_consistent_on_admitted = lines
        .iter()
        .filter(|l| l.jointly_measurable)
        .all(|l| l.all_plus_consistent);
    let excluded: Vec<&MerminLine> = lines.iter().filter(|l| !l.jointly_measurable).collect();
    let bottom_row_excluded = excluded.len() == 1 && excluded[0].observables == ["XZ", "ZX", "-YY"];
    Ok(MerminReport {
        lines,
        all_plus_consistent_on_admitted,
        bottom_row_excluded,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConsistencyReport {
    pub n: usize,
    pub assignments: usize,
    /// Pairs `{T_a, T_b}` admitted as joint measurements.
    pub admitted_pairs: usize,
    /// Checks of `lambda(T_{a+b}) = lambda(T_a) lambda(T_b)` over admitted
    /// pairs and all assignments.
    pub constraints_checked: usize,
    pub violations: usize,
    /// Commuting pairs with `T_a T_b = -T_{a+b}`, not admitted.
    pub excluded_commuting_pairs: usize,
    /// Every assignment would violate the operator identity on each excluded
    /// pair, so exclusion is what keeps the model consistent.
    pub excluded_pairs_would_fail: bool,
    pub mermin: MerminReport,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
            && self.excluded_pairs_would_fail
            && self.mermin.all_plus_consistent_on_admitted
            && self.mermin.bottom_row_excluded
    }
}

/// Checks every value assignment `lambda_u` against every multiplicative
/// constraint imposed by admitted joint measurements.
pub fn hvm_consistency_audit(n: usize) -> Result<ConsistencyReport> {
    if n == 0 || n > 3 {
        return Err(Error::TooLarge { requested: n, max: 3 });
    }
    let labels: Vec<PhasePoint> = PhasePoint::all(n).filter(PhasePoint::is_symmetric).collect();
    let points: Vec<PhasePoint> = PhasePoint::all(n).collect();
    let mut admitted_pairs = 0;
    let mut constraints_checked = 0;
    let mut violations = 0;
    let mut excluded = 0;
    let mut excluded_fail = true;
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i..] {
            if a.sym(b) {
                continue;
            }
            let (ta, tb) = (PauliOp::plus(*a), PauliOp::plus(*b));
            let prod = pauli_product(&ta, &tb)?;
            if is_jointly_measurable(&[ta, tb]) {
                admitted_pairs += 1;
                for &u in &points {
                    let l = ValueAssignment { u };
                    // lambda applied to the operator identity T_a T_b = prod.
                    if l.value(&ta) * l.value(&tb) != l.value(&prod) {
                        violations += 1;
                    }
                    constraints_checked += 1;
                }
            } else {
                excluded += 1;
                let ab = PauliOp::plus(*a + *b);
                excluded_fail &= points.iter().all(|&u| {
                    let l = ValueAssignment { u };
                    prod == ab.negated() && l.value(&ta) * l.value(&tb) != l.value(&prod)
                });
            }
        }
    }
    Ok(ConsistencyReport {
        n,
        assignments: points.len(),
        admitted_pairs,
        constraints_checked,
        violations,
        excluded_commuting_pairs: excluded,
        excluded_pairs_would_fail: excluded_fail,
        mermin: mermin_square()?,
    })
}
