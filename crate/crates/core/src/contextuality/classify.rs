use std::fmt;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::css::StabilizerGroup;
use crate::dense::DenseDensity;
use crate::error::{Error, Result};
use crate::gf2::{lagrangians, GF2Subspace, PhasePoint};
use crate::pauli::dense_matrix;
use crate::wigner::{wigner_of_density, wigner_of_operator, WignerTable, NONNEG_TOL};

/// Coset sums below this count as violations.
pub const CONTEXTUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Noncontextual,
    Contextual,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Noncontextual => "NONCONTEXTUAL",
            Verdict::Contextual => "CONTEXTUAL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Evidence backing a verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Certificate {
    /// The table itself is a nonnegative hidden-variable model.
    NonnegativeTable(WignerTable),
    /// A Lagrangian `U` and coset `offset + U` with negative total weight.
    Violation {
        subspace: GF2Subspace,
        offset: PhasePoint,
        sum: f64,
    },
    /// Negative somewhere, but every Lagrangian coset sum is nonnegative.
    Inconclusive { min_coset_sum: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub min_value: f64,
    pub certificate: Certificate,
}

impl Classification {
    /// Re-derives the certificate's claim from the table.
    pub fn recheck(&self, w: &WignerTable) -> bool {
        match (&self.verdict, &self.certificate) {
            (Verdict::Noncontextual, Certificate::NonnegativeTable(t)) => {
                t == w && t.negativity().min_value >= -NONNEG_TOL
            }
            (
                Verdict::Contextual,
                Certificate::Violation {
                    subspace,
                    offset,
                    sum,
                },
            ) => {
                let s = coset_sum(w, subspace, offset);
                subspace.is_lagrangian() && s < -CONTEXTUAL_TOL && (s - sum).abs() < 1e-12
            }
            (Verdict::Indeterminate, Certificate::Inconclusive { .. }) => {
                w.negativity().min_value < -NONNEG_TOL
            }
            _ => false,
        }
    }
}

/// `sum_{v in U} W(v + offset)`.
pub fn coset_sum(w: &WignerTable, subspace: &GF2Subspace, offset: &PhasePoint) -> f64 {
    let o = offset.index();
    subspace.elements().map(|v| w.at(v ^ o)).sum()
}

/// Most negative coset of `U`, as `(sum, canonical offset)`; ties go to the
/// smaller offset.
pub fn min_coset(w: &WignerTable, subspace: &GF2Subspace) -> (f64, PhasePoint) {
    let n = w.n();
    let mut sums = vec![0.0; w.values().len()];
    for (u, &v) in w.values().iter().enumerate() {
        sums[subspace.reduce(u as u64) as usize] += v;
    }
    let mut best = (f64::INFINITY, 0u64);
    for u in 0..sums.len() as u64 {
        if subspace.reduce(u) == u && sums[u as usize] < best.0 {
            best = (sums[u as usize], u);
        }
    }
    (best.0, PhasePoint::from_index(n, best.1))
}

/// Classifies a (possibly unnormalized or non-positive) Wigner table:
/// nonnegative tables are noncontextual; otherwise the most negative
/// Lagrangian coset sum decides between contextual and indeterminate.
pub fn classify_table(w: &WignerTable) -> Result<Classification> {
    let neg = w.negativity();
    if neg.is_nonnegative {
        return Ok(Classification {
            verdict: Verdict::Noncontextual,
            min_value: neg.min_value,
            certificate: Certificate::NonnegativeTable(w.clone()),
        });
    }
    let all = lagrangians(w.n())?;
    let per_subspace: Vec<(f64, PhasePoint)> = all.par_iter().map(|u| min_coset(w, u)).collect();
    // Sequential merge keeps the earliest subspace among equal minima.
    let (idx, &(sum, offset)) = per_subspace
        .iter()
        .enumerate()
        .fold(
            None,
            |best: Option<(usize, &(f64, PhasePoint))>, cur| match best {
                Some(b) if b.1 .0 <= cur.1 .0 + 1e-12 => Some(b),
                _ => Some(cur),
            },
        )
        .expect("at least one Lagrangian");
    Ok(if sum < -CONTEXTUAL_TOL {
        Classification {
            verdict: Verdict::Contextual,
            min_value: neg.min_value,
            certificate: Certificate::Violation {
                subspace: all[idx].clone(),
                offset,
                sum,
            },
        }
    } else {
        Classification {
            verdict: Verdict::Indeterminate,
            min_value: neg.min_value,
            certificate: Certificate::Inconclusive { min_coset_sum: sum },
        }
    })
}

pub fn classify(rho: &DenseDensity) -> Result<Classification> {
    classify_table(&wigner_of_density(rho)?)
}

/// Classifies a symmetric operator without requiring positivity, for
/// parameter sweeps that cross the physical boundary.
pub fn classify_operator(m: &DMatrix<f64>) -> Result<Classification> {
    classify_table(&wigner_of_operator(m)?)
}

/// Classification of a state diagonal in the eigenbasis of a maximal real
/// stabilizer group. Contextual exactly when the table has a negative entry;
/// the certificate uses the group's label space.
pub fn classify_stabilizer_diagonal(rho: &DMatrix<f64>, group: &StabilizerGroup) -> Result<Classification> {
    if !group.is_full() {
        return Err(Error::Invalid("stabilizer group is not maximal".into()));
    }
    let dim = 1usize << group.n();
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: rho.nrows(),
        });
    }
    for g in group.generators() {
        let t = dense_matrix(g)?;
        if (&t * rho * &t - rho).abs().max() > 1e-10 {
            return Err(Error::Invalid(format!(
                "state is not diagonal in the eigenbasis of {group} (fails for {g})"
            )));
        }
    }
    let w = wigner_of_operator(rho)?;
    let neg = w.negativity();
    if neg.is_nonnegative {
        return Ok(Classification {
            verdict: Verdict::Noncontextual,
            min_value: neg.min_value,
            certificate: Certificate::NonnegativeTable(w),
        });
    }
    let subspace = group.label_space();
    let (sum, offset) = min_coset(&w, &subspace);
    Ok(Classification {
        verdict: Verdict::Contextual,
        min_value: neg.min_value,
        certificate: Certificate::Violation {
            subspace,
            offset,
            sum,
        },
    })
}
