//! Universal computation on rebits: complex amplitudes are carried by one
//! extra "tracker" rebit, and the non-CSS gates H, CZ and the pi/8 phase are
//! built from CSS operations consuming the ancillas `|A>` and `|B>`.

mod circuit;
mod gadgets;
mod register;

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::{ComplexState, DenseState, GateOp};
use crate::error::{Error, Result};

pub use circuit::{
    enumerate_branches, oracle_distribution, oracle_run, run_encoded, sample_encoded, validate_circuit,
    Branch, EncodedRun, LogicalCircuit, LogicalOp, OutcomeDistribution, ValidationReport,
};
pub use gadgets::{cnot_gadget, cz_gadget, h_gadget, measure_z_gadget, t_gadget};
pub use register::{audit_log, AuditReport, Instruction, LogEntry, OutcomeSource, Register};

/// Largest register the gadgets may reach; the pi/8 gadget peaks at `n + 5`.
pub const MAX_DATA_QUBITS: usize = crate::dense::MAX_STATE_REBITS - 5;

/// Real encoding of an `n`-qubit state on `n + 1` rebits: the last rebit
/// holds the real part in `|0>` and the imaginary part in `|1>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedState {
    state: DenseState,
    data_count: usize,
}

impl EncodedState {
    pub fn new(state: DenseState) -> Result<Self> {
        if state.n() < 2 {
            return Err(Error::Invalid(
                "an encoded state needs data and tracker rebits".into(),
            ));
        }
        let data_count = state.n() - 1;
        Ok(Self { state, data_count })
    }

    pub fn state(&self) -> &DenseState {
        &self.state
    }

    pub fn into_state(self) -> DenseState {
        self.state
    }

    pub fn data_count(&self) -> usize {
        self.data_count
    }

    pub fn tracker(&self) -> usize {
        self.data_count
    }

    /// Encoding of the complex-conjugate state (`Z` on the tracker).
    pub fn conjugate(&self) -> Self {
        let mut state = self.state.clone();
        state
            .apply(&GateOp::Z(self.tracker()))
            .expect("tracker index is in range");
        Self {
            state,
            data_count: self.data_count,
        }
    }
}

pub fn encode(psi: &ComplexState) -> Result<EncodedState> {
    let amps: Vec<f64> = psi.amplitudes().iter().flat_map(|c| [c.re, c.im]).collect();
    EncodedState::new(DenseState::new(psi.n() + 1, amps)?)
}

/// Inverse of [`encode`]. Every normalized real vector on `n + 1` rebits is
/// a valid encoding, so this only fails on malformed input.
pub fn decode(enc: &EncodedState) -> Result<ComplexState> {
    let amps = enc
        .state
        .amplitudes()
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    ComplexState::new(enc.data_count, amps)
}

/// Resource states consumed by the gadgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ancilla {
    /// Encoding of `(|0> + e^{i pi/4}|1>)/sqrt 2`, as (data, tracker).
    A,
    /// `(|0>|+> + |1>|->)/sqrt 2`.
    B,
}

pub fn ancilla(kind: Ancilla) -> DenseState {
    let amps = match kind {
        Ancilla::A => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            vec![h, 0.0, FRAC_PI_4.cos() * h, FRAC_PI_4.sin() * h]
        }
        Ancilla::B => vec![0.5, 0.5, 0.5, -0.5],
    };
    DenseState::new(2, amps).expect("ancilla amplitudes are normalized")
}

#[cfg(test)]
mod tests;
