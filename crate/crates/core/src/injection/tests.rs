use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;
use proptest::prelude::{prop_assert, proptest, ProptestConfig};

use super::*;
use crate::css::StabilizerGroup;
use crate::pauli::Sign;
use crate::rng::stream_rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn qubit(a: Complex64, b: Complex64) -> ComplexState {
    ComplexState::new(1, vec![a, b]).unwrap()
}

fn magic() -> ComplexState {
    qubit(
        c(FRAC_1_SQRT_2, 0.0),
        Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4),
    )
}

fn circuit(text: &str) -> LogicalCircuit {
    LogicalCircuit::parse(text).unwrap()
}

fn all_branches_ok(text: &str, input: &ComplexState) -> ValidationReport {
    let report = validate_circuit(&circuit(text), input).unwrap();
    assert!(report.passed(1e-9), "{text}: {report:?}");
    report
}

#[test]
fn encode_examples() {
    let real = ComplexState::from(&DenseState::new(1, vec![0.6, 0.8]).unwrap());
    assert_eq!(encode(&real).unwrap().state().amplitudes(), &[0.6, 0.0, 0.8, 0.0]);
    assert_eq!(encode(&magic()).unwrap().state(), &ancilla(Ancilla::A));
    let imag = qubit(c(0.0, 1.0), c(0.0, 0.0));
    assert_eq!(encode(&imag).unwrap().state().amplitudes(), &[0.0, 1.0, 0.0, 0.0]);
    assert!(
        decode(&EncodedState::new(ancilla(Ancilla::A)).unwrap())
            .unwrap()
            .fidelity(&magic())
            .unwrap()
            > 1.0 - 1e-12
    );
}

#[test]
fn round_trip_and_conjugate() {
    let mut rng = stream_rng(40, 0);
    for n in 1..=4 {
        let psi = ComplexState::random(n, &mut rng).unwrap();
        let enc = encode(&psi).unwrap();
        assert!((decode(&enc).unwrap().fidelity(&psi).unwrap() - 1.0).abs() < 1e-10);
        let conj = decode(&enc.conjugate()).unwrap();
        assert!((conj.fidelity(&psi.conj()).unwrap() - 1.0).abs() < 1e-10);
        // Encoding is insensitive to global phase up to a tracker rotation.
        let rotated = ComplexState::new(
            n,
            psi.amplitudes()
                .iter()
                .map(|a| a * Complex64::from_polar(1.0, 0.7))
                .collect(),
        )
        .unwrap();
        assert!(
            (decode(&encode(&rotated).unwrap())
                .unwrap()
                .fidelity(&psi)
                .unwrap()
                - 1.0)
                .abs()
                < 1e-10
        );
    }
}

#[test]
fn ancillas() {
    let a = ancilla(Ancilla::A);
    assert!((a.inner(&a).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(ancilla(Ancilla::B).amplitudes(), &[0.5, 0.5, 0.5, -0.5]);
    let g = StabilizerGroup::from_text("+XZ\n+ZX\n").unwrap();
    let b = g.state().unwrap();
    assert!((b.inner(&ancilla(Ancilla::B)).unwrap().abs() - 1.0).abs() < 1e-12);
}

#[test]
fn pass_through_gadgets() {
    let mut rng = stream_rng(41, 0);
    let psi = ComplexState::random(2, &mut rng).unwrap();
    let mut reg = Register::new(
        encode(&psi).unwrap(),
        OutcomeSource::Random(Box::new(stream_rng(41, 1))),
    );
    cnot_gadget(&mut reg, 0, 1).unwrap();
    assert_eq!(reg.log().len(), 1);
    let mut expected = psi.clone();
    expected
        .apply(&GateOp::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
    assert!(
        (decode(&reg.encoded().unwrap())
            .unwrap()
            .fidelity(&expected)
            .unwrap()
            - 1.0)
            .abs()
            < 1e-10
    );
    measure_z_gadget(&mut reg, 1).unwrap();
    assert_eq!(reg.log().len(), 2);
    assert_eq!(
        reg.log()[1].instruction,
        Instruction::Measure {
            observable: "+IZI".into()
        }
    );
}

#[test]
fn hadamard_on_all_branches() {
    let zero = ComplexState::zero(1).unwrap();
    let r = all_branches_ok("H 0", &zero);
    assert_eq!(r.branches, 4);
    let mut rng = stream_rng(42, 0);
    for n in 1..=3 {
        let psi = ComplexState::random(n, &mut rng).unwrap();
        all_branches_ok(&format!("QUBITS {n}\nH {}", n - 1), &psi);
    }
}

#[test]
fn pi8_on_all_branches() {
    let plus = qubit(c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0));
    let branches = enumerate_branches(&circuit("T 0"), &plus).unwrap();
    let total: f64 = branches.iter().map(|b| b.run.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    // exp(i pi/8 Z)|+> is the conjugate of the |A> payload.
    let expected = magic().conj();
    for b in &branches {
        assert!((b.run.decoded.fidelity(&expected).unwrap() - 1.0).abs() < 1e-10);
        assert!((b.run.decoded.conj().fidelity(&magic()).unwrap() - 1.0).abs() < 1e-10);
        assert!(b.run.audit.passed());
    }
    let r = all_branches_ok("T 0", &plus);
    assert_eq!(r.max_rebits, 6);
    let mut rng = stream_rng(43, 0);
    for n in 1..=3 {
        let psi = ComplexState::random(n, &mut rng).unwrap();
        let r = all_branches_ok(&format!("QUBITS {n}\nT 0\nT {}", n - 1), &psi);
        assert!(r.max_rebits <= n + 5);
    }
}

#[test]
fn cz_gadget_all_branches() {
    let mut rng = stream_rng(44, 0);
    let psi = ComplexState::random(2, &mut rng).unwrap();
    let mut expected = psi.clone();
    expected.apply(&GateOp::Cz(0, 1)).unwrap();
    for s1 in [Sign::Plus, Sign::Minus] {
        for s2 in [Sign::Plus, Sign::Minus] {
            let mut reg = Register::new(encode(&psi).unwrap(), OutcomeSource::scripted(vec![s1, s2]));
            cz_gadget(&mut reg, 0, 1).unwrap();
            let out = decode(&reg.encoded().unwrap()).unwrap();
            assert!((out.fidelity(&expected).unwrap() - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn logical_circuits_match_oracle() {
    let zero = ComplexState::zero(1).unwrap();
    all_branches_ok("H 0\nT 0\nH 0", &zero);
    all_branches_ok("H 0\nT 0\nH 0\nMEASZ 0", &zero);
    let empty = validate_circuit(&circuit("QUBITS 2"), &ComplexState::zero(2).unwrap()).unwrap();
    assert_eq!(empty.branches, 1);
    assert_eq!(empty.primitive_operations, 0);
    let r = all_branches_ok("H 0\nCNOT 0 1\nMEASZ 0\nMEASZ 1", &ComplexState::zero(2).unwrap());
    assert!(r.branches >= 2);
    let mut rng = stream_rng(45, 0);
    let psi = ComplexState::random(2, &mut rng).unwrap();
    all_branches_ok("T 1\nH 0\nCNOT 1 0\nT 0\nMEASZ 1\nH 1", &psi);
}

#[test]
fn sampled_statistics_match_oracle() {
    let c = circuit("H 0\nT 0\nH 0\nMEASZ 0");
    let zero = ComplexState::zero(1).unwrap();
    let oracle = oracle_distribution(&c, &zero).unwrap();
    // P(0) = cos^2(pi/8).
    assert!((oracle["0"] - FRAC_PI_8.cos().powi(2)).abs() < 1e-12);
    let shots = 20_000;
    let counts = sample_encoded(&c, &zero, shots, 7).unwrap();
    let p0 = counts.get("0").copied().unwrap_or(0) as f64 / shots as f64;
    assert!((p0 - oracle["0"]).abs() < 0.02);
    assert_eq!(
        sample_encoded(&c, &zero, 500, 3).unwrap(),
        sample_encoded(&c, &zero, 500, 3).unwrap()
    );
}

#[test]
fn whitelist_rejects_restricted_primitives() {
    let mut reg = Register::new(
        encode(&ComplexState::zero(1).unwrap()).unwrap(),
        OutcomeSource::Random(Box::new(stream_rng(46, 0))),
    );
    for bad in [
        Instruction::Unitary { gate: GateOp::H(0) },
        Instruction::Unitary {
            gate: GateOp::Cz(0, 1),
        },
        Instruction::Unitary {
            gate: GateOp::Rz(0, FRAC_PI_8),
        },
        Instruction::Measure {
            observable: "XZ".into(),
        },
    ] {
        assert!(matches!(
            reg.execute(bad),
            Err(crate::Error::WhitelistViolation(_))
        ));
    }
    assert!(reg.log().is_empty());
    assert!(reg.discard(&[1]).is_err());
    let forged = vec![LogEntry {
        gadget: "forged".into(),
        instruction: Instruction::Unitary { gate: GateOp::H(0) },
        outcome: None,
        rebits_after: 2,
    }];
    assert!(!audit_log(&forged).passed());
}

#[test]
fn log_serializes_with_provenance() {
    let run = run_encoded(&circuit("T 0"), &ComplexState::zero(1).unwrap(), 5).unwrap();
    let json = serde_json::to_string(&run.log).unwrap();
    assert!(json.contains("\"gadget\":\"T(0)/merge/CZ(3,1)\""));
    assert!(run.audit.passed());
    assert!(run.audit.injections >= 2);
}

#[test]
fn size_cap() {
    let big = ComplexState::zero(MAX_DATA_QUBITS + 1).unwrap();
    let c = LogicalCircuit::new(MAX_DATA_QUBITS + 1, vec![LogicalOp::H(0)]).unwrap();
    assert!(matches!(
        run_encoded(&c, &big, 0),
        Err(crate::Error::TooLarge { .. })
    ));
}

#[test]
fn cnot_hadamard_propagation() {
    let mut rng = stream_rng(47, 0);
    for _ in 0..20 {
        let psi = ComplexState::random(3, &mut rng).unwrap();
        let mut lhs = psi.clone();
        lhs.apply(&GateOp::HAll).unwrap();
        lhs.apply(&GateOp::Cnot {
            control: 0,
            target: 2,
        })
        .unwrap();
        let mut rhs = psi.clone();
        rhs.apply(&GateOp::Cnot {
            control: 2,
            target: 0,
        })
        .unwrap();
        rhs.apply(&GateOp::HAll).unwrap();
        assert!((lhs.inner(&rhs).unwrap() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn parse_round_trip() {
    let c = circuit("# demo\nH 0\ncnot 0 2\nT 1\nMEASZ 2\n");
    assert_eq!(c.n(), 3);
    assert_eq!(LogicalCircuit::parse(&c.to_text()).unwrap(), c);
    assert!(LogicalCircuit::parse("CNOT 1 1").is_err());
    assert!(LogicalCircuit::parse("RX 0").is_err());
    assert!(LogicalCircuit::parse("QUBITS 1\nH 2").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_circuits_match_oracle(seed in 0u64..1_000_000, len in 1usize..5) {
        let mut rng = stream_rng(seed, 0);
        use rand::Rng;
        let n = rng.gen_range(1..=2);
        let ops: Vec<LogicalOp> = (0..len)
            .map(|_| {
                let i = rng.gen_range(0..n);
                match rng.gen_range(0..4) {
                    0 if n == 2 => LogicalOp::Cnot(i, 1 - i),
                    0 | 1 => LogicalOp::H(i),
                    2 => LogicalOp::T(i),
                    _ => LogicalOp::MeasureZ(i),
                }
            })
            .collect();
        let c = LogicalCircuit::new(n, ops).unwrap();
        let psi = ComplexState::random(n, &mut rng).unwrap();
        let r = validate_circuit(&c, &psi).unwrap();
        prop_assert!(r.passed(1e-9), "{:?}", r);
    }
}
