use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::StabilizerGroup;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::gf2::{lagrangians, PhasePoint};
use crate::pauli::{PauliOp, Sign};
use crate::rng::stream_rng;
use crate::wigner::{wigner_of_pure_fast, NONNEG_TOL};

/// Largest register the exhaustive check accepts.
pub const MAX_HUDSON_REBITS: usize = 3;

/// Every maximal real stabilizer group on `n` rebits: a Lagrangian inside
/// the symmetric labels together with one of the `2^n` sign patterns on its
/// canonical basis.
pub fn real_stabilizer_groups(n: usize) -> Result<Vec<StabilizerGroup>> {
    let mut out = Vec::new();
    for l in lagrangians(n)?.iter() {
        if !l.elements().all(|v| PhasePoint::from_index(n, v).is_symmetric()) {
            continue;
        }
        for signs in 0..1u64 << n {
            let gens = l
                .basis()
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    PauliOp::new(
                        Sign::from_negative(signs >> i & 1 == 1),
                        PhasePoint::from_index(n, b),
                    )
                })
                .collect();
            out.push(StabilizerGroup::new(gens)?);
        }
    }
    Ok(out)
}

/// A stabilizer state whose Wigner positivity disagrees with its CSS-ness.
#[derive(Clone, Debug, Serialize)]
pub struct HudsonViolation {
    pub generators: String,
    pub is_css: bool,
    pub min_value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HudsonReport {
    pub n: usize,
    pub stabilizer_states: usize,
    pub css_states: usize,
    /// Non-CSS states, all of which should have a negative entry.
    pub negative_states: usize,
    pub violations: Vec<HudsonViolation>,
    pub random_samples: usize,
    pub random_negative: usize,
    pub random_min_value: f64,
    pub random_mean_min_value: f64,
    pub random_mean_negative_mass: f64,
}

impl HudsonReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that a real stabilizer state has a nonnegative Wigner function
/// exactly when it is CSS, then gathers negativity statistics on random real
/// pure states.
pub fn hudson_verify(n: usize, samples: usize, seed: u64) -> Result<HudsonReport> {
    if n == 0 || n > MAX_HUDSON_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_HUDSON_REBITS,
        });
    }
    let groups = real_stabilizer_groups(n)?;
    let checked = groups
        .par_iter()
        .map(|g| -> Result<(bool, f64, String)> {
            let w = wigner_of_pure_fast(&g.state()?)?;
            Ok((g.is_css(), w.negativity().min_value, g.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = Vec::new();
    let mut css_states = 0;
    let mut negative_states = 0;
    for (is_css, min_value, generators) in checked {
        let nonneg = min_value >= -NONNEG_TOL;
        css_states += usize::from(is_css);
        negative_states += usize::from(!nonneg);
        if nonneg != is_css {
            violations.push(HudsonViolation {
                generators,
                is_css,
                min_value,
            });
        }
    }

    let stats = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64)> {
            let mut rng = stream_rng(seed, k);
            let amps = (0..1usize << n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let neg = wigner_of_pure_fast(&DenseState::from_unnormalized(amps)?)?.negativity();
            Ok((neg.min_value, neg.neg_mass))
        })
        .collect::<Result<Vec<_>>>()?;
    let count = stats.len().max(1) as f64;
    Ok(HudsonReport {
        n,
        stabilizer_states: groups.len(),
        css_states,
        negative_states,
        violations,
        random_samples: stats.len(),
        random_negative: stats.iter().filter(|s| s.0 < -NONNEG_TOL).count(),
        random_min_value: stats.iter().map(|s| s.0).fold(f64::INFINITY, f64::min),
        random_mean_min_value: stats.iter().map(|s| s.0).sum::<f64>() / count,
        random_mean_negative_mass: stats.iter().map(|s| s.1).sum::<f64>() / count,
    })
}
