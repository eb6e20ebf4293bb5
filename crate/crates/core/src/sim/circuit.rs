use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::css::CssGate;
use crate::error::{parse_err, Error, Result};
use crate::gf2::{GF2Vector, PhasePoint};
use crate::pauli::{in_set_o, PauliOp};
use crate::states::one_rebit_operator;
use crate::wigner::{wigner_of_operator, WignerTable, NONNEG_TOL};

/// Initial phase-space distribution: independent factors in register order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialState {
    factors: Vec<WignerTable>,
    /// Source tokens used for text output.
    #[serde(skip)]
    labels: Vec<String>,
}

impl InitialState {
    /// Product of tables. Each must be nonnegative and normalized.
    pub fn product(factors: Vec<WignerTable>) -> Result<Self> {
        let labels = (0..factors.len()).map(|i| format!("table{i}")).collect();
        Self::with_labels(factors, labels)
    }

    /// A single correlated table.
    pub fn table(w: WignerTable) -> Result<Self> {
        Self::product(vec![w])
    }

    fn with_labels(factors: Vec<WignerTable>, labels: Vec<String>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Invalid("initial state has no factors".into()));
        }
        for w in &factors {
            let neg = w.negativity();
            if !neg.is_nonnegative {
                return Err(Error::NegativeTable {
                    value: neg.min_value,
                    point: neg.argmin.index() as usize,
                });
            }
            let s = w.sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::NotNormalized(s));
            }
        }
        Ok(Self { factors, labels })
    }

    pub fn factors(&self) -> &[WignerTable] {
        &self.factors
    }

    pub fn n(&self) -> usize {
        self.factors.iter().map(WignerTable::n).sum()
    }

    /// Full table of the product state.
    pub fn joint_table(&self) -> Result<WignerTable> {
        let mut it = self.factors.iter();
        let first = it.next().expect("non-empty").clone();
        it.try_fold(first, |acc, w| acc.tensor(w))
    }
}

/// Table of a one-rebit keyword state.
pub fn keyword_table(word: &str) -> Option<WignerTable> {
    let (x, z) = match word.to_ascii_uppercase().as_str() {
        "ZERO" => (0.0, 1.0),
        "ONE" => (0.0, -1.0),
        "PLUS" => (1.0, 0.0),
        "MINUS" => (-1.0, 0.0),
        "MIXED" => (0.0, 0.0),
        _ => return None,
    };
    Some(wigner_of_operator(&one_rebit_operator(x, z)).expect("one rebit"))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SimStep {
    Unitary(CssGate),
    /// Measurement of `T_a` for a label `a` in the set O.
    Measure(PhasePoint),
}

/// A CSS circuit acting on a nonnegative initial state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimCircuit {
    n: usize,
    initial: InitialState,
    steps: Vec<SimStep>,
}

impl SimCircuit {
    pub fn new(initial: InitialState, steps: Vec<SimStep>) -> Result<Self> {
        let n = initial.n();
        for step in &steps {
            match step {
                SimStep::Unitary(g) => g.check(n)?,
                SimStep::Measure(a) => {
                    if a.n() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            found: a.n(),
                        });
                    }
                    let op = PauliOp::plus(*a);
                    if !in_set_o(&op) {
                        return Err(Error::NotInO(op.to_string()));
                    }
                }
            }
        }
        Ok(Self { n, initial, steps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    pub fn steps(&self) -> &[SimStep] {
        &self.steps
    }

    pub fn measurement_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, SimStep::Measure(_)))
            .count()
    }

    /// Parses the line-oriented circuit format:
    ///
    /// ```text
    /// INIT ZERO PLUS MIXED   # one token per factor: keyword or table CSV path
    /// CNOT 0 1
    /// HALL
    /// X 2
    /// Z 0
    /// MEASX 110
    /// MEASZ 011
    /// ```
    ///
    /// Table paths are resolved against `base` when relative.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut initial: Option<InitialState> = None;
        let mut steps = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty").to_ascii_uppercase();
            let rest: Vec<&str> = parts.collect();
            match head.as_str() {
                "INIT" => {
                    if initial.is_some() {
                        return Err(parse_err(lineno, "duplicate INIT"));
                    }
                    if rest.is_empty() {
                        return Err(parse_err(lineno, "INIT needs at least one factor"));
                    }
                    let mut factors = Vec::new();
                    for tok in &rest {
                        let table = match keyword_table(tok) {
                            Some(t) => t,
                            None => load_table(tok, base).map_err(|e| parse_err(lineno, e.to_string()))?,
                        };
                        factors.push(table);
                    }
                    let labels = rest.iter().map(|s| s.to_string()).collect();
                    initial = Some(
                        InitialState::with_labels(factors, labels)
                            .map_err(|e| parse_err(lineno, e.to_string()))?,
                    );
                }
                "MEASX" | "MEASZ" => {
                    let n = initial
                        .as_ref()
                        .ok_or_else(|| parse_err(lineno, "INIT must come first"))?
                        .n();
                    let [mask] = rest[..] else {
                        return Err(parse_err(lineno, "expected one mask"));
                    };
                    let v: GF2Vector = mask
                        .parse()
                        .map_err(|e: Error| parse_err(lineno, e.to_string()))?;
                    if v.len() != n {
                        return Err(parse_err(lineno, format!("mask must have {n} bits")));
                    }
                    let a = if head == "MEASX" {
                        PhasePoint::new(n, 0, v.bits())
                    } else {
                        PhasePoint::new(n, v.bits(), 0)
                    }
                    .map_err(|e| parse_err(lineno, e.to_string()))?;
                    steps.push(SimStep::Measure(a));
                }
                _ => {
                    if initial.is_none() {
                        return Err(parse_err(lineno, "INIT must come first"));
                    }
                    let gate: CssGate = line
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("unknown instruction '{line}'")))?;
                    steps.push(SimStep::Unitary(gate));
                }
            }
        }
        let initial = initial.ok_or_else(|| parse_err(0, "missing INIT line"))?;
        Self::new(initial, steps)
    }

    /// Text form; table factors are written under their original tokens.
    pub fn to_text(&self) -> String {
        let mut out = String::from("INIT");
        for l in &self.initial.labels {
            out.push(' ');
            out.push_str(l);
        }
        out.push('\n');
        for step in &self.steps {
            match step {
                SimStep::Unitary(g) => {
                    let _ = writeln!(out, "{g}");
                }
                SimStep::Measure(a) if a.x() == 0 => {
                    let _ = writeln!(out, "MEASZ {}", a.z_part());
                }
                SimStep::Measure(a) => {
                    let _ = writeln!(out, "MEASX {}", a.x_part());
                }
            }
        }
        out
    }
}

fn load_table(token: &str, base: Option<&Path>) -> Result<WignerTable> {
    let path = Path::new(token);
    let path = match base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path.to_path_buf(),
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    let w = WignerTable::from_csv(&text)?;
    if w.negativity().min_value < -NONNEG_TOL {
        let neg = w.negativity();
        return Err(Error::NegativeTable {
            value: neg.min_value,
            point: neg.argmin.index() as usize,
        });
    }
    Ok(w)
}
