use super::*;
use crate::css::{real_stabilizer_groups, CssGate};
use crate::dense::{DenseDensity, DenseState, GateOp};
use crate::gf2::{GF2Subspace, GF2Vector, PhasePoint};
use crate::pauli::{dense_matrix, PauliOp, Sign};
use crate::rng::{stream_rng, StreamRng};
use crate::states::{self, one_rebit_operator, two_rebit_basis_group, two_rebit_operator};
use crate::wigner::{wigner_of_density, wigner_of_operator, wigner_of_pure_fast, WignerTable};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashSet;

fn op(s: &str) -> PauliOp {
    s.parse().unwrap()
}

fn bits(s: &str) -> GF2Vector {
    s.parse().unwrap()
}

fn spec(s: &str) -> WitnessSpec {
    WitnessSpec::parse(s).unwrap()
}

fn rho(psi: &DenseState) -> DenseDensity {
    psi.density().unwrap()
}

fn random_density(n: usize, rng: &mut StreamRng) -> DenseDensity {
    let dim = 1usize << n;
    let rank = rng.gen_range(1..=dim);
    let g: DMatrix<f64> = DMatrix::from_fn(dim, rank, |_, _| rng.sample(StandardNormal));
    let m = &g * g.transpose();
    let tr = m.trace();
    DenseDensity::new(m / tr).unwrap()
}

/// All isotropic subspaces, as subspaces of some Lagrangian.
fn isotropic_subspaces(n: usize) -> Vec<GF2Subspace> {
    let mut out = HashSet::new();
    for l in crate::gf2::lagrangians(n).unwrap().iter() {
        for mask in 0..1u64 << l.dim() {
            let picks = l
                .basis()
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &b)| b);
            out.insert(GF2Subspace::span_bits(2 * n, picks));
        }
    }
    let mut v: Vec<GF2Subspace> = out.into_iter().collect();
    v.sort();
    v
}

/// Random isotropic basis of symmetric labels.
fn random_spec(n: usize, rng: &mut StreamRng) -> WitnessSpec {
    let ls = crate::gf2::lagrangians(n).unwrap();
    loop {
        let l = &ls[rng.gen_range(0..ls.len())];
        let mut basis = Vec::new();
        let mut span = GF2Subspace::zero(2 * n);
        let want = rng.gen_range(1..=n);
        for _ in 0..20 {
            let v = l.element(rng.gen_range(1..l.size()));
            let p = PhasePoint::from_index(n, v);
            if p.is_symmetric() && span.insert(v) {
                basis.push(p);
                if basis.len() == want {
                    break;
                }
            }
        }
        if !basis.is_empty() {
            return WitnessSpec::new(n, basis).unwrap();
        }
    }
}

#[test]
fn witness_examples() {
    let s = spec("XZ,ZX");
    let g2 = rho(&states::g2());
    assert!((witness_value(&g2, &s, &bits("11")).unwrap() + 2.0).abs() < 1e-10);
    let w = wigner_of_density(&g2).unwrap();
    assert!((witness_value_wigner(&w, &s, &bits("11")).unwrap() + 2.0).abs() < 1e-10);

    let k2 = rho(&states::k2());
    assert!((witness_value(&k2, &s, &bits("00")).unwrap() + 2.0).abs() < 1e-10);
    let wk = wigner_of_density(&k2).unwrap();
    assert!((witness_value_wigner(&wk, &s, &bits("00")).unwrap() + 2.0).abs() < 1e-10);

    let zero = rho(&DenseState::zero(2).unwrap());
    assert!((witness_value(&zero, &s, &bits("00")).unwrap() - 1.0).abs() < 1e-12);
    assert!(witness_value(&zero, &s, &bits("0")).is_err());
}

#[test]
fn witness_terms_use_label_operators() {
    // Omega(11) = I - XZ - ZX + T_{(11,11)} = I - XZ - ZX - YY.
    let terms = spec("XZ,ZX").terms(&bits("11")).unwrap();
    let m: DMatrix<f64> = terms
        .iter()
        .map(|(s, a)| dense_matrix(&PauliOp::plus(*a)).unwrap() * *s)
        .fold(DMatrix::zeros(4, 4), |acc, t| acc + t);
    let expected = DMatrix::identity(4, 4)
        - dense_matrix(&op("XZ")).unwrap()
        - dense_matrix(&op("ZX")).unwrap()
        - dense_matrix(&op("YY")).unwrap();
    assert!((m - expected).abs().max() < 1e-15);
}

#[test]
fn conjugate_basis_is_dual_and_minimal() {
    assert!(conjugate_basis(2, &[]).unwrap().is_empty());
    let a = PhasePoint::new(2, 0b01, 0b10).unwrap();
    let b = conjugate_basis(2, &[a]).unwrap();
    assert!(a.sym(&b[0]));
    assert!(conjugate_basis(2, &[a, a]).is_err());
    let z = PhasePoint::new(1, 1, 0).unwrap();
    let x = PhasePoint::new(1, 0, 1).unwrap();
    assert_eq!(conjugate_basis(1, &[z, x]), Err(crate::Error::NotIsotropic));
    assert_eq!(
        conjugate_basis(1, &[PhasePoint::new(1, 1, 1).unwrap()]),
        Err(crate::Error::NotSymmetric)
    );

    let mut rng = stream_rng(21, 0);
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let s = random_spec(n, &mut rng);
        for (j, b) in s.conjugates().iter().enumerate() {
            for (i, a) in s.basis().iter().enumerate() {
                assert_eq!(a.sym(b), i == j);
            }
            // Brute-force smallest solution.
            let best = (0..1u64 << (2 * n))
                .map(|v| PhasePoint::from_index(n, v))
                .find(|v| s.basis().iter().enumerate().all(|(i, a)| a.sym(v) == (i == j)))
                .unwrap();
            assert_eq!(*b, best);
        }
    }
}

#[test]
fn witness_routes_agree_and_respect_bounds() {
    let mut rng = stream_rng(22, 0);
    for _ in 0..150 {
        let n = rng.gen_range(1..=4);
        let r = random_density(n, &mut rng);
        let w = wigner_of_density(&r).unwrap();
        let s = random_spec(n, &mut rng);
        let x = GF2Vector::new(s.m(), rng.gen_range(0..1u64 << s.m())).unwrap();
        let dense = witness_value(&r, &s, &x).unwrap();
        let phase = witness_value_wigner(&w, &s, &x).unwrap();
        assert!((dense - phase).abs() < 1e-9, "{dense} vs {phase}");
        assert!(dense.abs() <= (1u64 << s.m()) as f64 + 1e-9);
        if s.m() == 2 {
            assert!(dense >= -2.0 - 1e-9);
        }
        if w.is_nonnegative() {
            assert!(dense >= -1e-9);
        }
    }
}

#[test]
fn nonnegative_states_never_violate() {
    let mut rng = stream_rng(23, 0);
    for n in 1..=3 {
        for g in real_stabilizer_groups(n).unwrap() {
            let Some(_) = g.to_css() else { continue };
            let r = rho(&g.state().unwrap());
            for _ in 0..3 {
                let s = random_spec(n, &mut rng);
                for xv in 0..1u64 << s.m() {
                    let x = GF2Vector::new(s.m(), xv).unwrap();
                    assert!(witness_value(&r, &s, &x).unwrap() >= -1e-9);
                }
            }
        }
    }
}

#[test]
fn classify_examples() {
    let c = classify_operator(&one_rebit_operator(0.5, 0.4)).unwrap();
    assert_eq!(c.verdict, Verdict::Noncontextual);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = one_rebit_operator(h, h);
    let c = classify_operator(&m).unwrap();
    assert_eq!(c.verdict, Verdict::Indeterminate);
    assert!(c.recheck(&wigner_of_operator(&m).unwrap()));
    assert!((c.min_value - (1.0 - 2.0f64.sqrt()) / 4.0).abs() < 1e-12);
    // Outside the physical disk and the unit square the sufficient condition bites.
    assert_eq!(
        classify_operator(&one_rebit_operator(1.2, 0.0)).unwrap().verdict,
        Verdict::Contextual
    );

    let k3 = rho(&states::k3());
    let c = classify(&k3).unwrap();
    assert_eq!(c.verdict, Verdict::Contextual);
    let Certificate::Violation { subspace, sum, .. } = &c.certificate else {
        panic!()
    };
    let expected = GF2Subspace::span_bits(6, ["XZZ", "ZXZ", "ZZX"].iter().map(|s| op(s).label.index()));
    assert_eq!(subspace, &expected);
    assert!((sum + 0.5).abs() < 1e-10);
    assert!(c.recheck(&wigner_of_density(&k3).unwrap()));

    let bell = rho(&states::bell());
    let c = classify(&bell).unwrap();
    assert_eq!(c.verdict, Verdict::Noncontextual);
    assert!(c.recheck(&wigner_of_density(&bell).unwrap()));
}

#[test]
fn classifier_soundness_on_random_states() {
    let mut rng = stream_rng(24, 0);
    for _ in 0..40 {
        let n = rng.gen_range(1..=3);
        let psi =
            DenseState::from_unnormalized((0..1 << n).map(|_| rng.sample(StandardNormal)).collect()).unwrap();
        let w = wigner_of_pure_fast(&psi).unwrap();
        let c = classify_table(&w).unwrap();
        assert!(c.recheck(&w), "{c:?}");
    }
}

#[test]
fn restriction_to_lagrangians() {
    let mut rng = stream_rng(25, 0);
    for n in 1..=3 {
        let iso = isotropic_subspaces(n);
        let perps: Vec<GF2Subspace> = iso.iter().map(GF2Subspace::symplectic_complement).collect();
        for _ in 0..6 {
            let w = if rng.gen() {
                wigner_of_density(&random_density(n, &mut rng)).unwrap()
            } else {
                let psi =
                    DenseState::from_unnormalized((0..1 << n).map(|_| rng.sample(StandardNormal)).collect())
                        .unwrap();
                wigner_of_pure_fast(&psi).unwrap()
            };
            let lag_min = crate::gf2::lagrangians(n)
                .unwrap()
                .iter()
                .map(|u| min_coset(&w, u).0)
                .fold(f64::INFINITY, f64::min);
            let iso_min = perps
                .iter()
                .map(|p| min_coset(&w, p).0)
                .fold(f64::INFINITY, f64::min);
            if lag_min >= 0.0 {
                assert!(iso_min >= -1e-12);
            }
        }
    }
}

fn two_rebit_condition(a: f64, b: f64) -> bool {
    [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .iter()
        .any(|(al, be)| 1.0 + al * a + be * b - al * be * a * b < 0.0)
}

#[test]
fn stabilizer_diagonal_family() {
    let g = two_rebit_basis_group();
    assert_eq!(
        classify_stabilizer_diagonal(&two_rebit_operator(1.0, 1.0), &g)
            .unwrap()
            .verdict,
        Verdict::Contextual
    );
    assert_eq!(
        classify_stabilizer_diagonal(&two_rebit_operator(0.0, 0.0), &g)
            .unwrap()
            .verdict,
        Verdict::Noncontextual
    );
    let off = DenseState::zero(2).unwrap().density().unwrap();
    assert!(classify_stabilizer_diagonal(off.matrix(), &g).is_err());
    let grid = [-1.3, -1.0, -0.7, -0.2, 0.0, 0.3, 0.9, 1.0, 1.4];
    for &a in &grid {
        for &b in &grid {
            let m = two_rebit_operator(a, b);
            let special = classify_stabilizer_diagonal(&m, &g).unwrap();
            let general = classify_operator(&m).unwrap();
            assert_ne!(special.verdict, Verdict::Indeterminate);
            assert_eq!(special.verdict, general.verdict, "a={a} b={b}");
            let strict = two_rebit_condition(a, b) && {
                let w = wigner_of_operator(&m).unwrap();
                w.negativity().min_value < -1e-10
            };
            assert_eq!(special.verdict == Verdict::Contextual, strict, "a={a} b={b}");
        }
    }
}

#[test]
fn hvm_matches_born() {
    let ghz = rho(&states::ghz(3).unwrap());
    let p = hvm_predict(&wigner_of_density(&ghz).unwrap(), &[op("ZZI"), op("IZZ")]).unwrap();
    assert!((p["00"] - 1.0).abs() < 1e-12);

    let mixed = WignerTable::uniform(2).unwrap();
    let p = hvm_predict(&mixed, &[op("XX")]).unwrap();
    assert!((p["0"] - 0.5).abs() < 1e-15 && (p["1"] - 0.5).abs() < 1e-15);

    assert!(hvm_predict(&mixed, &[op("XZ"), op("ZX")]).is_err());
    let k3 = wigner_of_density(&rho(&states::k3())).unwrap();
    assert!(matches!(
        hvm_predict(&k3, &[op("ZII")]),
        Err(crate::Error::NegativeTable { .. })
    ));

    let mut rng = stream_rng(26, 0);
    let css: Vec<_> = real_stabilizer_groups(3)
        .unwrap()
        .into_iter()
        .filter(|g| g.is_css())
        .collect();
    let symmetric: Vec<PhasePoint> = PhasePoint::all(3)
        .filter(|p| p.is_symmetric() && !p.is_zero())
        .collect();
    for _ in 0..60 {
        let g = &css[rng.gen_range(0..css.len())];
        let r = rho(&g.state().unwrap());
        let w = wigner_of_density(&r).unwrap();
        let mut ops: Vec<PauliOp> = Vec::new();
        for _ in 0..6 {
            let cand = PauliOp::new(
                Sign::from_negative(rng.gen()),
                symmetric[rng.gen_range(0..symmetric.len())],
            );
            let mut trial = ops.clone();
            trial.push(cand);
            if crate::pauli::is_jointly_measurable(&trial) {
                ops = trial;
            }
        }
        let hvm = hvm_predict(&w, &ops).unwrap();
        let born = born_joint_distribution(&r, &ops).unwrap();
        for (k, v) in &born {
            assert!((hvm[k] - v).abs() < 1e-9);
        }
    }
}

#[test]
fn value_assignments_are_consistent() {
    for n in 2..=3 {
        let r = hvm_consistency_audit(n).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.assignments, 1 << (2 * n));
        assert!(r.excluded_commuting_pairs > 0);
    }
    let m = mermin_square().unwrap();
    assert!(m.bottom_row_excluded);
    assert_eq!(m.lines[2].product_sign, -1);
    assert!(m.lines.iter().filter(|l| l.jointly_measurable).count() == 5);
    for u in PhasePoint::all(2) {
        let l = ValueAssignment { u };
        assert_eq!(l.value(&op("XI")) * l.value(&op("IZ")), l.value(&op("XZ")));
    }
}

#[test]
fn pullback_through_gates() {
    let s = spec("XZ,ZX");
    let x = bits("11");
    let Pullback::Pulled {
        spec: same,
        x: same_x,
    } = witness_pullback_word(&s, &x, &[]).unwrap()
    else {
        panic!()
    };
    assert_eq!((same, same_x), (s.clone(), x));

    let mut rng = stream_rng(27, 0);
    for _ in 0..50 {
        let word: Vec<CssGate> = (0..6)
            .map(|_| match rng.gen_range(0..5) {
                0 => CssGate::Cnot {
                    control: 0,
                    target: 1,
                },
                1 => CssGate::Cnot {
                    control: 1,
                    target: 0,
                },
                2 => CssGate::X(rng.gen_range(0..2)),
                3 => CssGate::Z(rng.gen_range(0..2)),
                _ => CssGate::HAll,
            })
            .collect();
        // Initial state that the word maps onto the graph state.
        let mut initial = states::g2();
        for g in word.iter().rev() {
            initial.apply(&GateOp::from(*g)).unwrap();
        }
        let mut fin = initial.clone();
        for g in &word {
            fin.apply(&GateOp::from(*g)).unwrap();
        }
        assert!((fin.inner(&states::g2()).unwrap() - 1.0).abs() < 1e-12);
        let steps: Vec<PullbackStep> = word.iter().map(|g| PullbackStep::Gate(*g)).collect();
        let Pullback::Pulled { spec: s0, x: x0 } = witness_pullback_word(&s, &x, &steps).unwrap() else {
            panic!()
        };
        let v = witness_value(&rho(&initial), &s0, &x0).unwrap();
        assert!((v + 2.0).abs() < 1e-10);
    }
}

#[test]
fn pullback_through_measurements() {
    let mut rng = stream_rng(28, 0);
    let s = spec("XXI,ZZI");
    let c = op("ZZI").label;
    let Pullback::Pulled { spec: s2, .. } =
        witness_pullback(&s, &bits("01"), &PullbackStep::Measure(c)).unwrap()
    else {
        panic!()
    };
    assert_eq!(s2, s);
    for _ in 0..20 {
        let before = random_density(3, &mut rng);
        let t = dense_matrix(&PauliOp::plus(c)).unwrap();
        let id = DMatrix::<f64>::identity(8, 8);
        let (pp, pm) = ((&id + &t) * 0.5, (&id - &t) * 0.5);
        let after = &pp * before.matrix() * &pp + &pm * before.matrix() * &pm;
        let after = DenseDensity::new(after).unwrap();
        for xv in 0..4 {
            let x = GF2Vector::new(2, xv).unwrap();
            let a = witness_value(&after, &s, &x).unwrap();
            let b = witness_value(&before, &s, &x).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }
    assert!(matches!(
        witness_pullback(&s, &bits("00"), &PullbackStep::Measure(op("IZI").label)).unwrap(),
        Pullback::Rejected { .. }
    ));
    assert!(witness_pullback(&s, &bits("00"), &PullbackStep::Measure(op("XZI").label)).is_err());
}

#[test]
fn sweeps_follow_closed_form_regions() {
    let one = sweep(SweepFamily::OneRebitXz, 41, -1.0, 1.0).unwrap();
    let check = one.check();
    assert!(check.passed(), "{check:?}");
    let at = |s: &Sweep, p: f64, q: f64| {
        *s.points
            .iter()
            .find(|pt| (pt.p - p).abs() < 1e-9 && (pt.q - q).abs() < 1e-9)
            .unwrap()
    };
    assert_eq!(at(&one, 0.5, 0.4).verdict, Verdict::Noncontextual);
    assert!(!at(&one, 0.8, 0.8).physical);
    let two = sweep(SweepFamily::TwoRebitAb, 41, -1.0, 1.0).unwrap();
    assert!(two.check().passed());
    assert_eq!(at(&two, 1.0, 1.0).verdict, Verdict::Contextual);
    assert!(sweep(SweepFamily::OneRebitXz, 2002, -1.0, 1.0).is_err());
    assert_eq!(
        "two-rebit-ab".parse::<SweepFamily>().unwrap(),
        SweepFamily::TwoRebitAb
    );
    assert!(one.to_csv().starts_with("x,z,physical,min_w,verdict\n"));
}
