//! Phase-space sampling simulator for CSS circuits on states with
//! nonnegative Wigner function, plus exact table-level updates and a dense
//! Born-rule oracle used to validate it.

mod circuit;

pub use circuit::{keyword_table, InitialState, SimCircuit, SimStep};

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::css::{gate_to_affine, AffineSymplectic, CssGate};
use crate::dense::DenseDensity;
use crate::error::{Error, Result};
use crate::gf2::PhasePoint;
use crate::pauli::{in_set_o, PauliOp, Sign};
use crate::rng::stream_rng;
use crate::wigner::{reconstruct, WignerTable};

/// Outcome strings use `0` for `+1` and `1` for `-1`, one character per
/// measurement in circuit order.
pub type Distribution = BTreeMap<String, f64>;

const MAX_MEASUREMENTS: usize = 64;

fn outcome_string(bits: u64, len: usize) -> String {
    (0..len)
        .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn require_o(a: &PhasePoint) -> Result<()> {
    let op = PauliOp::plus(*a);
    if in_set_o(&op) {
        Ok(())
    } else {
        Err(Error::NotInO(op.to_string()))
    }
}

/// Inverse-CDF sampler for one table.
#[derive(Clone, Debug)]
struct TableSampler {
    n: usize,
    cdf: Vec<f64>,
}

impl TableSampler {
    fn new(w: &WignerTable) -> Self {
        let mut acc = 0.0;
        let cdf = w
            .values()
            .iter()
            .map(|&v| {
                acc += v.max(0.0);
                acc
            })
            .collect();
        Self { n: w.n(), cdf }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let total = *self.cdf.last().expect("non-empty");
        let r = rng.gen::<f64>() * total;
        let idx = self.cdf.partition_point(|&c| c <= r).min(self.cdf.len() - 1);
        PhasePoint::from_index(self.n, idx as u64)
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Affine(AffineSymplectic),
    Measure(PhasePoint),
}

/// A circuit prepared for repeated sampling.
#[derive(Clone, Debug)]
pub struct Sampler {
    n: usize,
    factors: Vec<TableSampler>,
    steps: Vec<Compiled>,
    measurements: usize,
}

/// The sampled path of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleTrace {
    pub seed: u64,
    pub sample_index: u64,
    /// Point before the first step and after every step.
    pub points: Vec<PhasePoint>,
    pub outcomes: Vec<Sign>,
}

impl Sampler {
    pub fn new(circuit: &SimCircuit) -> Result<Self> {
        let measurements = circuit.measurement_count();
        if measurements > MAX_MEASUREMENTS {
            return Err(Error::TooLarge {
                requested: measurements,
                max: MAX_MEASUREMENTS,
            });
        }
        let steps = circuit
            .steps()
            .iter()
            .map(|s| match s {
                SimStep::Unitary(g) => gate_to_affine(g, circuit.n()).map(Compiled::Affine),
                SimStep::Measure(a) => Ok(Compiled::Measure(*a)),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            n: circuit.n(),
            factors: circuit
                .initial()
                .factors()
                .iter()
                .map(TableSampler::new)
                .collect(),
            steps,
            measurements,
        })
    }

    /// Draws a point with probability `W(u)`, factor by factor.
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> PhasePoint {
        let mut it = self.factors.iter();
        let first = it.next().expect("non-empty").sample(rng);
        it.fold(first, |acc, f| acc.concat(&f.sample(rng)).expect("within limits"))
    }

    fn run_one<R: Rng + ?Sized>(&self, rng: &mut R, mut trace: Option<&mut SampleTrace>) -> u64 {
        let mut u = self.sample_initial(rng);
        if let Some(t) = trace.as_deref_mut() {
            t.points.push(u);
        }
        let mut bits = 0u64;
        let mut k = 0;
        for step in &self.steps {
            match step {
                Compiled::Affine(m) => u = m.apply(&u),
                Compiled::Measure(a) => {
                    let (s, next) = measure_point(&u, a, rng);
                    u = next;
                    if s.is_negative() {
                        bits |= 1 << k;
                    }
                    if let Some(t) = trace.as_deref_mut() {
                        t.outcomes.push(s);
                    }
                    k += 1;
                }
            }
            if let Some(t) = trace.as_deref_mut() {
                t.points.push(u);
            }
        }
        bits
    }

    /// Full path of sample `index` under `seed`.
    pub fn trace(&self, seed: u64, index: u64) -> SampleTrace {
        let mut t = SampleTrace {
            seed,
            sample_index: index,
            points: Vec::new(),
            outcomes: Vec::new(),
        };
        let mut rng = stream_rng(seed, index);
        self.run_one(&mut rng, Some(&mut t));
        t
    }

    /// Samples `num_samples` runs in parallel; sample `k` uses its own
    /// stream `(seed, k)`, so the result does not depend on thread count.
    pub fn run(&self, num_samples: u64, seed: u64) -> Histogram {
        let counts = (0..num_samples)
            .into_par_iter()
            .fold(HashMap::new, |mut acc: HashMap<u64, u64>, k| {
                let mut rng = stream_rng(seed, k);
                *acc.entry(self.run_one(&mut rng, None)).or_default() += 1;
                acc
            })
            .reduce(HashMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_default() += v;
                }
                a
            });
        Histogram {
            samples: num_samples,
            counts: counts
                .into_iter()
                .map(|(b, c)| (outcome_string(b, self.measurements), c))
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Empirical outcome counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Histogram {
    pub samples: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Histogram {
    pub fn frequencies(&self) -> Distribution {
        let total = self.samples.max(1) as f64;
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / total))
            .collect()
    }

    /// Total-variation distance to a reference distribution.
    pub fn tv_distance(&self, reference: &Distribution) -> f64 {
        tv_distance(&self.frequencies(), reference)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count,frequency\n");
        for (k, f) in self.frequencies() {
            out.push_str(&format!("{k},{},{f}\n", self.counts[&k]));
        }
        out
    }
}

pub fn tv_distance(p: &Distribution, q: &Distribution) -> f64 {
    let keys: std::collections::BTreeSet<&String> = p.keys().chain(q.keys()).collect();
    0.5 * keys
        .into_iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

/// Samples one run of `circuit` with `seed`.
pub fn run(circuit: &SimCircuit, num_samples: u64, seed: u64) -> Result<Histogram> {
    Ok(Sampler::new(circuit)?.run(num_samples, seed))
}

pub fn sample_initial<R: Rng + ?Sized>(circuit: &SimCircuit, rng: &mut R) -> Result<PhasePoint> {
    Ok(Sampler::new(circuit)?.sample_initial(rng))
}

/// `u -> F u + t` for the gate's affine map.
pub fn step_unitary(u: &PhasePoint, gate: &CssGate) -> Result<PhasePoint> {
    Ok(gate_to_affine(gate, u.n())?.apply(u))
}

fn measure_point<R: Rng + ?Sized>(u: &PhasePoint, a: &PhasePoint, rng: &mut R) -> (Sign, PhasePoint) {
    let s = Sign::from_negative(u.sym(a));
    let next = if rng.gen::<bool>() { *u + *a } else { *u };
    (s, next)
}

/// Outcome `(-1)^{[u,a]}`, then `u` or `u + a` on a fair coin.
pub fn step_measure<R: Rng + ?Sized>(
    u: &PhasePoint,
    a: &PhasePoint,
    rng: &mut R,
) -> Result<(Sign, PhasePoint)> {
    require_o(a)?;
    if u.n() != a.n() {
        return Err(Error::DimensionMismatch {
            expected: u.n(),
            found: a.n(),
        });
    }
    Ok(measure_point(u, a, rng))
}

/// `W'(F u + t) = W(u)`.
pub fn wigner_update_unitary(w: &WignerTable, gate: &CssGate) -> Result<WignerTable> {
    gate_to_affine(gate, w.n())?.apply_to_table(w)
}

/// Unnormalized post-measurement table: `(W(u) + W(u+a))/2` where
/// `(-1)^{[u,a]} = s`, zero elsewhere. Its sum is the outcome probability.
pub fn wigner_update_measurement(w: &WignerTable, a: &PhasePoint, s: Sign) -> Result<WignerTable> {
    require_o(a)?;
    if a.n() != w.n() {
        return Err(Error::DimensionMismatch {
            expected: w.n(),
            found: a.n(),
        });
    }
    WignerTable::from_fn(w.n(), |u| {
        if Sign::from_negative(u.sym(a)) == s {
            0.5 * (w.get(&u) + w.get(&(u + *a)))
        } else {
            0.0
        }
    })
}

/// Normalized post-measurement table and the outcome probability.
pub fn wigner_update_measurement_normalized(
    w: &WignerTable,
    a: &PhasePoint,
    s: Sign,
) -> Result<(WignerTable, f64)> {
    let un = wigner_update_measurement(w, a, s)?;
    let p = un.sum();
    if p < 1e-14 {
        return Err(Error::ZeroProbability);
    }
    Ok((un.scaled(1.0 / p), p))
}

/// Exact outcome distribution by branching table updates.
pub fn table_distribution(circuit: &SimCircuit) -> Result<Distribution> {
    let mut out = Distribution::new();
    let start = circuit.initial().joint_table()?;
    table_branch(circuit.steps(), start, String::new(), 1.0, &mut out)?;
    Ok(out)
}

fn table_branch(
    steps: &[SimStep],
    mut w: WignerTable,
    prefix: String,
    prob: f64,
    out: &mut Distribution,
) -> Result<()> {
    for (i, step) in steps.iter().enumerate() {
        match step {
            SimStep::Unitary(g) => w = wigner_update_unitary(&w, g)?,
            SimStep::Measure(a) => {
                for (s, c) in [(Sign::Plus, '0'), (Sign::Minus, '1')] {
                    match wigner_update_measurement_normalized(&w, a, s) {
                        Ok((next, p)) => {
                            let mut key = prefix.clone();
                            key.push(c);
                            table_branch(&steps[i + 1..], next, key, prob * p, out)?;
                        }
                        Err(Error::ZeroProbability) => {}
                        Err(e) => return Err(e),
                    }
                }
                return Ok(());
            }
        }
    }
    *out.entry(prefix).or_default() += prob;
    Ok(())
}

/// Initial density matrix reconstructed from the initial tables.
pub fn initial_density(circuit: &SimCircuit) -> Result<DenseDensity> {
    let mut it = circuit.initial().factors().iter();
    let first = reconstruct(it.next().expect("non-empty"))?;
    it.try_fold(first, |acc, w| acc.kron(&reconstruct(w)?))
}

/// Born-rule outcome distribution from dense density-matrix evolution.
pub fn born_distribution(circuit: &SimCircuit) -> Result<Distribution> {
    let mut out = Distribution::new();
    born_branch(
        circuit.steps(),
        initial_density(circuit)?,
        String::new(),
        1.0,
        &mut out,
    )?;
    Ok(out)
}

fn born_branch(
    steps: &[SimStep],
    mut rho: DenseDensity,
    prefix: String,
    prob: f64,
    out: &mut Distribution,
) -> Result<()> {
    for (i, step) in steps.iter().enumerate() {
        match step {
            SimStep::Unitary(g) => rho.apply(&(*g).into())?,
            SimStep::Measure(a) => {
                let op = PauliOp::plus(*a);
                for (s, c) in [(Sign::Plus, '0'), (Sign::Minus, '1')] {
                    let mut next = rho.clone();
                    match next.project(&op, s) {
                        Ok(p) => {
                            let mut key = prefix.clone();
                            key.push(c);
                            born_branch(&steps[i + 1..], next, key, prob * p, out)?;
                        }
                        Err(Error::ZeroProbability) => {}
                        Err(e) => return Err(e),
                    }
                }
                return Ok(());
            }
        }
    }
    *out.entry(prefix).or_default() += prob;
    Ok(())
}
