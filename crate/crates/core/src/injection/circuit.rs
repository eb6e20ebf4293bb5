use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_8;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use super::gadgets::{cnot_gadget, h_gadget, measure_z_gadget, t_gadget};
use super::register::{audit_log, AuditReport, LogEntry, OutcomeSource, Register};
use super::{decode, encode, MAX_DATA_QUBITS};
use crate::dense::{ComplexState, GateOp};
use crate::error::{parse_err, Error, Result};
use crate::pauli::Sign;
use crate::rng::stream_rng;

/// Probabilities of logical outcome strings (`0` for `Z = +1`).
pub type OutcomeDistribution = BTreeMap<String, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LogicalOp {
    Cnot(usize, usize),
    H(usize),
    /// `exp(i pi/8 Z_i)`.
    T(usize),
    MeasureZ(usize),
}

impl LogicalOp {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            LogicalOp::Cnot(a, b) => vec![a, b],
            LogicalOp::H(i) | LogicalOp::T(i) | LogicalOp::MeasureZ(i) => vec![i],
        }
    }
}

impl fmt::Display for LogicalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicalOp::Cnot(a, b) => write!(f, "CNOT {a} {b}"),
            LogicalOp::H(i) => write!(f, "H {i}"),
            LogicalOp::T(i) => write!(f, "T {i}"),
            LogicalOp::MeasureZ(i) => write!(f, "MEASZ {i}"),
        }
    }
}

/// Circuit over the universal set `{CNOT, H, exp(i pi/8 Z)}` with `Z`
/// readout.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogicalCircuit {
    n: usize,
    ops: Vec<LogicalOp>,
}

impl LogicalCircuit {
    pub fn new(n: usize, ops: Vec<LogicalOp>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("circuit needs at least one qubit".into()));
        }
        for op in &ops {
            let q = op.qubits();
            if let Some(&bad) = q.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index: bad, len: n });
            }
            if q.len() == 2 && q[0] == q[1] {
                return Err(Error::Invalid("CNOT control equals target".into()));
            }
        }
        Ok(Self { n, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[LogicalOp] {
        &self.ops
    }

    pub fn measurement_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, LogicalOp::MeasureZ(_)))
            .count()
    }

    /// Parses `H i`, `T i`, `CNOT i j` and `MEASZ i` lines; an optional
    /// `QUBITS n` line fixes the register size, which otherwise is one more
    /// than the largest index used.
    pub fn parse(text: &str) -> Result<Self> {
        let mut declared = None;
        let mut ops = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty").to_ascii_uppercase();
            let args = parts
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(lineno, format!("bad index {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            let op = match (head.as_str(), &args[..]) {
                ("QUBITS", &[n]) => {
                    declared = Some(n);
                    continue;
                }
                ("H", &[i]) => LogicalOp::H(i),
                ("T", &[i]) => LogicalOp::T(i),
                ("MEASZ", &[i]) => LogicalOp::MeasureZ(i),
                ("CNOT", &[a, b]) => LogicalOp::Cnot(a, b),
                _ => return Err(parse_err(lineno, format!("unrecognized instruction {line:?}"))),
            };
            ops.push(op);
        }
        let used = ops.iter().flat_map(LogicalOp::qubits).max().map_or(1, |m| m + 1);
        Self::new(declared.unwrap_or(used), ops)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("QUBITS {}\n", self.n);
        for op in &self.ops {
            s.push_str(&format!("{op}\n"));
        }
        s
    }
}

fn outcome_char(s: Sign) -> char {
    if s.is_negative() {
        '1'
    } else {
        '0'
    }
}

fn check_input(circuit: &LogicalCircuit, input: &ComplexState) -> Result<()> {
    if input.n() != circuit.n {
        return Err(Error::DimensionMismatch {
            expected: circuit.n,
            found: input.n(),
        });
    }
    if circuit.n > MAX_DATA_QUBITS {
        return Err(Error::TooLarge {
            requested: circuit.n,
            max: MAX_DATA_QUBITS,
        });
    }
    Ok(())
}

fn execute(
    circuit: &LogicalCircuit,
    input: &ComplexState,
    source: OutcomeSource,
) -> Result<(Register, String)> {
    check_input(circuit, input)?;
    let mut reg = Register::new(encode(input)?, source);
    let mut outcomes = String::new();
    for op in &circuit.ops {
        match *op {
            LogicalOp::Cnot(a, b) => cnot_gadget(&mut reg, a, b)?,
            LogicalOp::H(i) => h_gadget(&mut reg, i)?,
            LogicalOp::T(i) => t_gadget(&mut reg, i)?,
            LogicalOp::MeasureZ(i) => outcomes.push(outcome_char(measure_z_gadget(&mut reg, i)?)),
        }
    }
    Ok((reg, outcomes))
}

/// Result of one encoded execution.
#[derive(Clone, Debug, Serialize)]
pub struct EncodedRun {
    /// Logical `Z` readouts in circuit order.
    pub outcomes: String,
    pub decoded: ComplexState,
    /// Probability of every primitive outcome taken along the way.
    pub probability: f64,
    pub log: Vec<LogEntry>,
    pub audit: AuditReport,
}

fn finish(reg: Register, outcomes: String) -> Result<EncodedRun> {
    let decoded = decode(&reg.encoded()?)?;
    let log = reg.log().to_vec();
    Ok(EncodedRun {
        outcomes,
        decoded,
        probability: reg.probability(),
        audit: audit_log(&log),
        log,
    })
}

/// Runs the encoded circuit once with random measurement outcomes.
pub fn run_encoded(circuit: &LogicalCircuit, input: &ComplexState, seed: u64) -> Result<EncodedRun> {
    let (reg, outcomes) = execute(
        circuit,
        input,
        OutcomeSource::Random(Box::new(stream_rng(seed, 0))),
    )?;
    finish(reg, outcomes)
}

/// Logical outcome counts over `shots` independent encoded runs.
pub fn sample_encoded(
    circuit: &LogicalCircuit,
    input: &ComplexState,
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<String, usize>> {
    check_input(circuit, input)?;
    (0..shots as u64)
        .into_par_iter()
        .map(|k| {
            execute(
                circuit,
                input,
                OutcomeSource::Random(Box::new(stream_rng(seed, k))),
            )
            .map(|r| r.1)
        })
        .try_fold(BTreeMap::new, |mut acc, r| {
            *acc.entry(r?).or_insert(0) += 1;
            Ok(acc)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

/// One complete assignment of primitive measurement outcomes.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    pub primitive_outcomes: Vec<i8>,
    pub run: EncodedRun,
}

/// Every branch of the encoded circuit, found by depth-first search over
/// primitive measurement outcomes.
pub fn enumerate_branches(circuit: &LogicalCircuit, input: &ComplexState) -> Result<Vec<Branch>> {
    let mut pending = vec![Vec::<Sign>::new()];
    let mut branches = Vec::new();
    while let Some(script) = pending.pop() {
        let fixed = script.len();
        let (reg, outcomes) = execute(circuit, input, OutcomeSource::scripted(script))?;
        let trace = reg.source().trace().to_vec();
        for (j, &(s, p_plus)) in trace.iter().enumerate().skip(fixed) {
            let p_alt = if s.is_negative() { p_plus } else { 1.0 - p_plus };
            if p_alt > 1e-12 {
                let mut alt: Vec<Sign> = trace[..j].iter().map(|t| t.0).collect();
                alt.push(s.flip_if(true));
                pending.push(alt);
            }
        }
        branches.push(Branch {
            primitive_outcomes: trace
                .iter()
                .map(|(s, _)| if s.is_negative() { -1 } else { 1 })
                .collect(),
            run: finish(reg, outcomes)?,
        });
    }
    Ok(branches)
}

fn oracle_gate(op: &LogicalOp) -> Option<GateOp> {
    match *op {
        LogicalOp::Cnot(control, target) => Some(GateOp::Cnot { control, target }),
        LogicalOp::H(i) => Some(GateOp::H(i)),
        LogicalOp::T(i) => Some(GateOp::Rz(i, FRAC_PI_8)),
        LogicalOp::MeasureZ(_) => None,
    }
}

/// Direct complex simulation with the logical readouts fixed to `outcomes`.
/// Returns the post-measurement state and the probability of the readouts.
pub fn oracle_run(
    circuit: &LogicalCircuit,
    input: &ComplexState,
    outcomes: &str,
) -> Result<(ComplexState, f64)> {
    if outcomes.len() != circuit.measurement_count() {
        return Err(Error::DimensionMismatch {
            expected: circuit.measurement_count(),
            found: outcomes.len(),
        });
    }
    let mut psi = input.clone();
    let mut bits = outcomes.chars();
    let mut p = 1.0;
    for op in &circuit.ops {
        match (oracle_gate(op), op) {
            (Some(g), _) => psi.apply(&g)?,
            (None, LogicalOp::MeasureZ(i)) => {
                let bit = bits.next().expect("length checked") == '1';
                p *= psi.project_z(*i, bit)?;
            }
            _ => unreachable!("only readouts lack a gate"),
        }
    }
    Ok((psi, p))
}

/// Exact distribution of logical readouts under the complex circuit.
pub fn oracle_distribution(circuit: &LogicalCircuit, input: &ComplexState) -> Result<OutcomeDistribution> {
    let k = circuit.measurement_count();
    let mut dist = OutcomeDistribution::new();
    for bits in 0..1u64 << k {
        let key: String = (0..k)
            .map(|i| if bits >> (k - 1 - i) & 1 == 1 { '1' } else { '0' })
            .collect();
        match oracle_run(circuit, input, &key) {
            Ok((_, p)) => {
                dist.insert(key, p);
            }
            Err(Error::ZeroProbability) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(dist)
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub branches: usize,
    pub total_probability: f64,
    /// Largest `1 - |<oracle|decoded>|^2` over branches.
    pub max_infidelity: f64,
    /// Largest gap between encoded and oracle readout probabilities.
    pub max_probability_error: f64,
    pub whitelist_violations: usize,
    pub primitive_operations: usize,
    pub max_rebits: usize,
}

impl ValidationReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.whitelist_violations == 0
            && (self.total_probability - 1.0).abs() < tol
            && self.max_infidelity < tol
            && self.max_probability_error < tol
    }
}

/// Compares every encoded branch with the complex oracle.
pub fn validate_circuit(circuit: &LogicalCircuit, input: &ComplexState) -> Result<ValidationReport> {
    let branches = enumerate_branches(circuit, input)?;
    let oracle = oracle_distribution(circuit, input)?;
    let mut encoded = OutcomeDistribution::new();
    let mut max_infidelity: f64 = 0.0;
    let mut violations = 0;
    let mut ops = 0;
    let mut max_rebits = circuit.n + 1;
    for b in &branches {
        let (expected, _) = oracle_run(circuit, input, &b.run.outcomes)?;
        max_infidelity = max_infidelity.max(1.0 - expected.fidelity(&b.run.decoded)?);
        *encoded.entry(b.run.outcomes.clone()).or_insert(0.0) += b.run.probability;
        violations += b.run.audit.violations.len();
        ops += b.run.log.len();
        max_rebits = b
            .run
            .log
            .iter()
            .map(|e| e.rebits_after)
            .fold(max_rebits, usize::max);
    }
    let max_probability_error = oracle
        .keys()
        .chain(encoded.keys())
        .map(|k| (oracle.get(k).unwrap_or(&0.0) - encoded.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max);
    Ok(ValidationReport {
        branches: branches.len(),
        total_probability: branches.iter().map(|b| b.run.probability).sum(),
        max_infidelity,
        max_probability_error,
        whitelist_violations: violations,
        primitive_operations: ops,
        max_rebits,
    })
}
