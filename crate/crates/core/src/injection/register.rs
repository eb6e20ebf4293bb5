use serde::Serialize;

use super::{ancilla, Ancilla, EncodedState};
use crate::css::CssGate;
use crate::dense::{DenseState, GateOp, MAX_STATE_REBITS};
use crate::error::{Error, Result};
use crate::gf2::PhasePoint;
use crate::pauli::{in_set_o, PauliOp, Sign};
use crate::rng::StreamRng;
use rand::Rng;

/// Outcomes below this probability are treated as impossible.
const MIN_BRANCH_PROB: f64 = 1e-12;

/// A primitive operation requested by a gadget.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instruction {
    Unitary {
        gate: GateOp,
    },
    Measure {
        observable: String,
    },
    Inject {
        ancilla: Ancilla,
    },
    /// Drops rebits that are unentangled from the register.
    Discard {
        rebits: Vec<usize>,
    },
}

impl Instruction {
    fn whitelist_error(&self) -> Option<String> {
        match self {
            Instruction::Unitary { gate } if !gate.is_css() => Some(format!("unitary {gate}")),
            Instruction::Measure { observable } => match observable.parse::<PauliOp>() {
                Ok(op) if in_set_o(&op) => None,
                _ => Some(format!("measurement of {observable}")),
            },
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogEntry {
    /// Gadget stack, outermost first, e.g. `T(0)/CZ(3,2)`.
    pub gadget: String,
    pub instruction: Instruction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<i8>,
    pub rebits_after: usize,
}

/// Where measurement outcomes come from.
#[derive(Clone, Debug)]
pub enum OutcomeSource {
    Random(Box<StreamRng>),
    /// Replays `script`, then takes the `+1` outcome whenever it is
    /// possible. Every decision is recorded in `trace` with its `P(+1)`.
    Scripted {
        script: Vec<Sign>,
        trace: Vec<(Sign, f64)>,
    },
}

impl OutcomeSource {
    pub fn scripted(script: Vec<Sign>) -> Self {
        OutcomeSource::Scripted {
            script,
            trace: Vec::new(),
        }
    }

    fn next(&mut self, p_plus: f64) -> Result<Sign> {
        match self {
            OutcomeSource::Random(rng) => Ok(Sign::from_negative(rng.gen::<f64>() >= p_plus)),
            OutcomeSource::Scripted { script, trace } => {
                let s = match script.get(trace.len()) {
                    Some(&s) => s,
                    None => Sign::from_negative(p_plus < MIN_BRANCH_PROB),
                };
                let p = if s.is_negative() { 1.0 - p_plus } else { p_plus };
                if p < MIN_BRANCH_PROB {
                    return Err(Error::ZeroProbability);
                }
                trace.push((s, p_plus));
                Ok(s)
            }
        }
    }

    /// Decisions taken so far with the probability of `+1` at each.
    pub fn trace(&self) -> &[(Sign, f64)] {
        match self {
            OutcomeSource::Random(_) => &[],
            OutcomeSource::Scripted { trace, .. } => trace,
        }
    }
}

/// Rebit register that only accepts whitelisted instructions and logs each
/// one with the gadget that issued it.
#[derive(Clone, Debug)]
pub struct Register {
    state: DenseState,
    data_count: usize,
    tracker: usize,
    source: OutcomeSource,
    tags: Vec<String>,
    log: Vec<LogEntry>,
    probability: f64,
}

impl Register {
    pub fn new(enc: EncodedState, source: OutcomeSource) -> Self {
        let data_count = enc.data_count();
        Self {
            state: enc.into_state(),
            data_count,
            tracker: data_count,
            source,
            tags: Vec::new(),
            log: Vec::new(),
            probability: 1.0,
        }
    }

    pub fn rebits(&self) -> usize {
        self.state.n()
    }

    pub fn data_count(&self) -> usize {
        self.data_count
    }

    pub fn tracker(&self) -> usize {
        self.tracker
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn source(&self) -> &OutcomeSource {
        &self.source
    }

    /// Probability of the outcomes observed so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    /// The register as an encoded state; fails while ancillas are attached.
    pub fn encoded(&self) -> Result<EncodedState> {
        if self.state.n() != self.data_count + 1 {
            return Err(Error::Invalid(format!(
                "{} ancilla rebits still attached",
                self.state.n() - self.data_count - 1
            )));
        }
        EncodedState::new(self.state.clone())
    }

    pub(crate) fn push_tag(&mut self, tag: String) {
        self.tags.push(tag);
    }

    pub(crate) fn pop_tag(&mut self) {
        self.tags.pop();
    }

    /// Runs one instruction. Returns the measurement outcome, if any.
    pub fn execute(&mut self, instruction: Instruction) -> Result<Option<Sign>> {
        if let Some(what) = instruction.whitelist_error() {
            return Err(Error::WhitelistViolation(what));
        }
        let outcome = match &instruction {
            Instruction::Unitary { gate } => {
                self.state.apply(gate)?;
                None
            }
            Instruction::Measure { observable } => {
                let op: PauliOp = observable.parse()?;
                let p_plus = self.state.outcome_probability(&op, Sign::Plus)?;
                let s = self.source.next(p_plus)?;
                self.probability *= if s.is_negative() { 1.0 - p_plus } else { p_plus };
                self.state.project(&op, s)?;
                Some(s)
            }
            Instruction::Inject { ancilla: kind } => {
                let n = self.state.n() + 2;
                if n > MAX_STATE_REBITS {
                    return Err(Error::TooLarge {
                        requested: n,
                        max: MAX_STATE_REBITS,
                    });
                }
                self.state = self.state.kron(&ancilla(*kind))?;
                None
            }
            Instruction::Discard { rebits } => {
                if rebits.iter().any(|&r| r <= self.tracker) {
                    return Err(Error::Invalid("cannot discard data or tracker rebits".into()));
                }
                self.state = self.state.remove_rebits(rebits)?.0;
                None
            }
        };
        self.check_real()?;
        self.log.push(LogEntry {
            gadget: self.tags.join("/"),
            instruction,
            outcome: outcome.map(|s| if s.is_negative() { -1 } else { 1 }),
            rebits_after: self.state.n(),
        });
        Ok(outcome)
    }

    fn check_real(&self) -> Result<()> {
        let norm: f64 = self.state.amplitudes().iter().map(|a| a * a).sum();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(())
    }

    pub fn css(&mut self, gate: CssGate) -> Result<()> {
        self.execute(Instruction::Unitary { gate: gate.into() })
            .map(|_| ())
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.css(CssGate::Cnot { control, target })
    }

    pub fn swap(&mut self, a: usize, b: usize) -> Result<()> {
        self.cnot(a, b)?;
        self.cnot(b, a)?;
        self.cnot(a, b)
    }

    /// Measures the product of `Z` (or `X`) over `rebits`.
    pub fn measure_pure(&mut self, z_type: bool, rebits: &[usize]) -> Result<Sign> {
        let n = self.state.n();
        let mask = rebits.iter().fold(0u64, |m, &r| m | 1 << (n - 1 - r));
        let label = if z_type {
            PhasePoint::new(n, mask, 0)?
        } else {
            PhasePoint::new(n, 0, mask)?
        };
        let outcome = self.execute(Instruction::Measure {
            observable: PauliOp::plus(label).to_string(),
        })?;
        Ok(outcome.expect("measurements return an outcome"))
    }

    /// Appends an ancilla; returns the indices of its two rebits.
    pub fn inject(&mut self, kind: Ancilla) -> Result<(usize, usize)> {
        let k = self.state.n();
        self.execute(Instruction::Inject { ancilla: kind })?;
        Ok((k, k + 1))
    }

    pub fn discard(&mut self, rebits: &[usize]) -> Result<()> {
        self.execute(Instruction::Discard {
            rebits: rebits.to_vec(),
        })
        .map(|_| ())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub unitaries: usize,
    pub measurements: usize,
    pub injections: usize,
    pub discards: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks an execution log against the whitelist.
pub fn audit_log(log: &[LogEntry]) -> AuditReport {
    let mut report = AuditReport::default();
    for (i, entry) in log.iter().enumerate() {
        match &entry.instruction {
            Instruction::Unitary { .. } => report.unitaries += 1,
            Instruction::Measure { .. } => report.measurements += 1,
            Instruction::Inject { .. } => report.injections += 1,
            Instruction::Discard { .. } => report.discards += 1,
        }
        if let Some(what) = entry.instruction.whitelist_error() {
            report
                .violations
                .push(format!("entry {i} ({}): {what}", entry.gadget));
        }
    }
    report
}
