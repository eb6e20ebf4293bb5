use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::classify::{classify_operator, Verdict};
use crate::error::{Error, Result};
use crate::states::{one_rebit_is_physical, one_rebit_operator, two_rebit_is_physical, two_rebit_operator};

pub const MAX_SWEEP_RESOLUTION: usize = 2001;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepFamily {
    /// `(I + x X + z Z)/2` over `(x, z)`.
    OneRebitXz,
    /// `(I + a XZ)(I + b ZX)/4` over `(a, b)`.
    TwoRebitAb,
}

impl SweepFamily {
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            SweepFamily::OneRebitXz => ("x", "z"),
            SweepFamily::TwoRebitAb => ("a", "b"),
        }
    }

    /// Verdict predicted by the closed-form region, where one exists.
    pub fn predicted(self, p: f64, q: f64) -> Option<Verdict> {
        match self {
            SweepFamily::OneRebitXz => one_rebit_is_physical(p, q).then(|| {
                if p.abs() + q.abs() <= 1.0 {
                    Verdict::Noncontextual
                } else {
                    Verdict::Indeterminate
                }
            }),
            SweepFamily::TwoRebitAb => {
                let negative = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
                    .iter()
                    .any(|(al, be)| 1.0 + al * p + be * q - al * be * p * q < 0.0);
                Some(if negative {
                    Verdict::Contextual
                } else {
                    Verdict::Noncontextual
                })
            }
        }
    }
}

impl fmt::Display for SweepFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepFamily::OneRebitXz => "one-rebit-xz",
            SweepFamily::TwoRebitAb => "two-rebit-ab",
        })
    }
}

impl FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-rebit-xz" => Ok(SweepFamily::OneRebitXz),
            "two-rebit-ab" => Ok(SweepFamily::TwoRebitAb),
            _ => Err(Error::Invalid(format!("unknown sweep family {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub i: usize,
    pub j: usize,
    pub p: f64,
    pub q: f64,
    pub physical: bool,
    pub min_w: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sweep {
    pub family: SweepFamily,
    pub resolution: usize,
    pub range: (f64, f64),
    /// Row-major: `i` indexes the first parameter.
    pub points: Vec<SweepPoint>,
}

/// Classifies every point of a `resolution x resolution` grid over
/// `[lo, hi]^2`.
pub fn sweep(family: SweepFamily, resolution: usize, lo: f64, hi: f64) -> Result<Sweep> {
    if !(2..=MAX_SWEEP_RESOLUTION).contains(&resolution) {
        return Err(Error::Invalid(format!(
            "resolution must lie in 2..={MAX_SWEEP_RESOLUTION}, got {resolution}"
        )));
    }
    if lo >= hi || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid(format!("invalid sweep range [{lo}, {hi}]")));
    }
    let step = (hi - lo) / (resolution - 1) as f64;
    let points = (0..resolution * resolution)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / resolution, k % resolution);
            let (p, q) = (lo + i as f64 * step, lo + j as f64 * step);
            let (m, physical) = match family {
                SweepFamily::OneRebitXz => (one_rebit_operator(p, q), one_rebit_is_physical(p, q)),
                SweepFamily::TwoRebitAb => (two_rebit_operator(p, q), two_rebit_is_physical(p, q)),
            };
            let c = classify_operator(&m)?;
            Ok(SweepPoint {
                i,
                j,
                p,
                q,
                physical,
                min_w: c.min_value,
                verdict: c.verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep {
        family,
        resolution,
        range: (lo, hi),
        points,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SweepCheck {
    /// Points with a closed-form prediction.
    pub compared: usize,
    pub mismatches: usize,
    /// Mismatches with no grid neighbour on the other side of the predicted
    /// boundary.
    pub off_boundary: usize,
    pub unphysical: usize,
}

impl SweepCheck {
    pub fn passed(&self) -> bool {
        self.compared > 0 && self.off_boundary == 0
    }
}

impl Sweep {
    fn at(&self, i: usize, j: usize) -> &SweepPoint {
        &self.points[i * self.resolution + j]
    }

    /// Compares verdicts with the closed-form regions, tolerating
    /// disagreement within one grid cell of a predicted boundary.
    pub fn check(&self) -> SweepCheck {
        let r = self.resolution;
        let mut out = SweepCheck::default();
        for pt in &self.points {
            if !pt.physical {
                out.unphysical += 1;
            }
            let Some(expected) = self.family.predicted(pt.p, pt.q) else {
                continue;
            };
            out.compared += 1;
            if expected == pt.verdict {
                continue;
            }
            out.mismatches += 1;
            let near_boundary = (pt.i.saturating_sub(1)..=(pt.i + 1).min(r - 1)).any(|i| {
                (pt.j.saturating_sub(1)..=(pt.j + 1).min(r - 1)).any(|j| {
                    let nb = self.at(i, j);
                    self.family.predicted(nb.p, nb.q) != Some(expected)
                })
            });
            if !near_boundary {
                out.off_boundary += 1;
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let (a, b) = self.family.axis_names();
        let mut s = format!("{a},{b},physical,min_w,verdict\n");
        for pt in &self.points {
            s.push_str(&format!(
                "{:.6},{:.6},{},{:.12e},{}\n",
                pt.p, pt.q, pt.physical, pt.min_w, pt.verdict
            ));
        }
        s
    }
}
