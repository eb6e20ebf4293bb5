use super::*;
use crate::dense::{DenseDensity, GateOp};
use crate::pauli::in_set_o;
use crate::rng::stream_rng;
use crate::wigner::{wigner_of_density, wigner_of_pure_fast};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashSet;

fn group(text: &str) -> StabilizerGroup {
    StabilizerGroup::from_text(text).unwrap()
}

fn unitary(word: &[CssGate], n: usize) -> DMatrix<f64> {
    let dim = 1usize << n;
    let mut u = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        let mut s = DenseState::basis(n, c as u64).unwrap();
        for g in word {
            s.apply(&GateOp::from(*g)).unwrap();
        }
        for (r, a) in s.amplitudes().iter().enumerate() {
            u[(r, c)] = *a;
        }
    }
    u
}

fn random_word<R: Rng>(n: usize, len: usize, rng: &mut R) -> Vec<CssGate> {
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 if n > 1 => {
                let c = rng.gen_range(0..n);
                let mut t = rng.gen_range(0..n - 1);
                if t >= c {
                    t += 1;
                }
                CssGate::Cnot {
                    control: c,
                    target: t,
                }
            }
            1 => CssGate::X(rng.gen_range(0..n)),
            2 => CssGate::Z(rng.gen_range(0..n)),
            _ => CssGate::HAll,
        })
        .collect()
}

fn random_density<R: Rng>(n: usize, rng: &mut R) -> DenseDensity {
    let dim = 1usize << n;
    let g: DMatrix<f64> = DMatrix::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let rho = &g * g.transpose();
    let tr = rho.trace();
    DenseDensity::new(rho / tr).unwrap()
}

/// Projector onto the joint +1 eigenspace, by eigendecomposition.
fn eigen_oracle(g: &StabilizerGroup) -> DMatrix<f64> {
    let eig = g.projector().unwrap().symmetric_eigen();
    let k = eig.eigenvalues.imax();
    assert!((eig.eigenvalues[k] - 1.0).abs() < 1e-9);
    let v = eig.eigenvectors.column(k).into_owned();
    &v * v.transpose()
}

fn same_state(a: &DenseState, b: &DMatrix<f64>) -> bool {
    let v = DMatrix::from_column_slice(a.amplitudes().len(), 1, a.amplitudes());
    ((&v * v.transpose()) - b).abs().max() < 1e-10
}

#[test]
fn css_state_examples() {
    let z = CssGroup::new(1, &[(1, Sign::Plus)], &[]).unwrap();
    assert_eq!(css_state(&z).unwrap().amplitudes(), &[1.0, 0.0]);

    let bell = CssGroup::new(2, &[(0b11, Sign::Plus)], &[(0b11, Sign::Plus)]).unwrap();
    let s = css_state(&bell).unwrap();
    assert!(same_state(&s, &eigen_oracle(&group("XX\nZZ"))));
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((s.amplitudes()[0] - h).abs() < 1e-12 && (s.amplitudes()[3] - h).abs() < 1e-12);

    let ghz = CssGroup::new(
        3,
        &[(0b110, Sign::Plus), (0b011, Sign::Plus)],
        &[(0b111, Sign::Plus)],
    )
    .unwrap();
    let s = css_state(&ghz).unwrap();
    assert!(same_state(&s, &eigen_oracle(&group("XXX\nZZI\nIZZ"))));
    assert!((s.amplitudes()[7] - h).abs() < 1e-12);
}

#[test]
fn css_group_errors() {
    assert_eq!(
        CssGroup::new(1, &[(1, Sign::Plus), (1, Sign::Minus)], &[]),
        Err(Error::InconsistentSigns)
    );
    assert_eq!(
        CssGroup::new(1, &[(1, Sign::Plus)], &[(1, Sign::Plus)]),
        Err(Error::NonCommuting)
    );
    // A consistent dependent row is absorbed.
    let g = CssGroup::new(
        2,
        &[(0b11, Sign::Minus), (0b10, Sign::Plus), (0b01, Sign::Minus)],
        &[],
    )
    .unwrap();
    assert_eq!(g.rank(), 2);
    assert_eq!(css_state(&g).unwrap().amplitudes(), &[0.0, 1.0, 0.0, 0.0]);
    assert!(css_state(&CssGroup::new(2, &[(1, Sign::Plus)], &[]).unwrap()).is_err());
}

#[test]
fn closed_form_examples() {
    let z = CssGroup::new(1, &[(1, Sign::Plus)], &[]).unwrap();
    let w = wigner_css_closed_form(&z).unwrap();
    assert_eq!(w.support.basis(), &[0b10]);
    assert_eq!(w.offset.index(), 0);

    let minus_z = CssGroup::new(1, &[(1, Sign::Minus)], &[]).unwrap();
    let w = wigner_css_closed_form(&minus_z).unwrap();
    assert_eq!(w.support.basis(), &[0b10]);
    // The offset realizes the -1 character on Z: [t, (1,0)] = t_X = 1.
    assert_eq!(w.offset, PhasePoint::new(1, 0, 1).unwrap());
    let dense = wigner_of_pure_fast(&css_state(&minus_z).unwrap()).unwrap();
    assert!(w.table().unwrap().max_abs_diff(&dense).unwrap() < 1e-12);
}

#[test]
fn closed_form_matches_dense_for_all_css_states() {
    for n in 1..=3 {
        let mut count = 0;
        for g in real_stabilizer_groups(n).unwrap() {
            let Some(css) = g.to_css() else { continue };
            count += 1;
            let psi = css_state(&css).unwrap();
            assert!((psi.inner(&g.state().unwrap()).unwrap().abs() - 1.0).abs() < 1e-10);
            let w = wigner_css_closed_form(&css).unwrap();
            assert_eq!(w.support.size(), 1 << n);
            assert_eq!(w.offset.index(), w.support.reduce(w.offset.index()));
            let dense = wigner_of_pure_fast(&psi).unwrap();
            assert!(w.table().unwrap().max_abs_diff(&dense).unwrap() < 1e-10);
        }
        // CSS states: sum over subspaces N of 2^n sign choices.
        let expected = [0, 4, 20, 128][n];
        assert_eq!(count, expected);
    }
}

#[test]
fn is_css_examples() {
    assert!(!group("XZ\nZX").is_css());
    assert!(group("XX\nZZ").is_css());
    assert!(group("Z").is_css());
    // Mixed generators that split after row reduction.
    assert!(group("XX\nYY").is_css());
    let css = group("XX\n-YY").to_css().unwrap();
    assert_eq!(css.rank(), 2);
}

#[test]
fn stabilizer_group_validation() {
    assert_eq!(
        StabilizerGroup::from_text("Z\nX").unwrap_err(),
        Error::NonCommuting
    );
    assert_eq!(
        StabilizerGroup::from_text("Z\n-Z").unwrap_err(),
        Error::DependentGenerators
    );
    assert_eq!(StabilizerGroup::from_text("iY").unwrap_err(), Error::NotSymmetric);
    let g = group("# Bell\nXX\nZZ\n");
    assert_eq!(g.to_text(), "+XX\n+ZZ\n");
    assert_eq!(g.elements().len(), 4);
    let yy = g
        .element_with_label(&PhasePoint::new(2, 0b11, 0b11).unwrap())
        .unwrap();
    assert_eq!(yy.to_string(), "-YY");
}

#[test]
fn affine_examples() {
    let h = gate_to_affine(&CssGate::HAll, 2).unwrap();
    assert_eq!(h.block_form(), Some(BlockForm::AntiDiagonal));
    assert_eq!(h.matrix().row(0), 0b0010);
    let c = gate_to_affine(
        &CssGate::Cnot {
            control: 0,
            target: 1,
        },
        2,
    )
    .unwrap();
    assert_eq!(c.block_form(), Some(BlockForm::Diagonal));
    // Z part rows: Z_0 <- Z_0 Z_1, X part rows: X_1 <- X_0 X_1.
    assert_eq!(c.matrix().row(0), 0b1100);
    assert_eq!(c.matrix().row(3), 0b0011);
    let x = gate_to_affine(&CssGate::X(1), 2).unwrap();
    assert!(x.matrix().is_identity());
    assert_eq!(x.translation(), PhasePoint::new(2, 0, 0b01).unwrap());
    assert_eq!(x.pauli_shift(), x.translation());
}

#[test]
fn tableau_examples() {
    let cn = CssGate::Cnot {
        control: 0,
        target: 1,
    };
    assert_eq!(tableau_apply(&group("ZI"), &cn).unwrap().to_text(), "+ZI\n");
    assert_eq!(
        tableau_apply(&group("ZII\nIZI\nIIZ"), &CssGate::HAll)
            .unwrap()
            .to_text(),
        "+XII\n+IXI\n+IIX\n"
    );
    assert_eq!(
        tableau_apply(&group("Z"), &CssGate::X(0)).unwrap().to_text(),
        "-Z\n"
    );
    assert_eq!(tableau_apply(&group("XI"), &cn).unwrap().to_text(), "+XX\n");
}

#[test]
fn conjugation_matches_dense() {
    let mut rng = stream_rng(11, 0);
    for n in 1..=3 {
        for _ in 0..30 {
            let word = random_word(n, 8, &mut rng);
            let u = unitary(&word, n);
            let map = word_to_affine(&word, n).unwrap();
            for a in PhasePoint::all(n).filter(|a| a.is_symmetric()) {
                let op = PauliOp::plus(a);
                let lhs = &u * dense_matrix(&op).unwrap() * u.transpose();
                let img = map.conjugate(&op).unwrap();
                assert!((lhs - dense_matrix(&img).unwrap()).abs().max() < 1e-12);
                // O is mapped onto itself.
                assert_eq!(in_set_o(&op), in_set_o(&img));
            }
        }
    }
}

#[test]
fn morphism_on_random_words() {
    let mut rng = stream_rng(12, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let g = random_word(n, 6, &mut rng);
        let h = random_word(n, 6, &mut rng);
        let gh: Vec<CssGate> = h.iter().chain(&g).copied().collect();
        let lhs = word_to_affine(&gh, n).unwrap();
        let rhs = word_to_affine(&g, n)
            .unwrap()
            .compose(&word_to_affine(&h, n).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert!(lhs.block_form().is_some() && lhs.is_symplectic());
        assert_eq!(
            lhs.compose(&lhs.inverse()).unwrap(),
            AffineSymplectic::identity(n)
        );
    }
}

#[test]
fn group_order_two_rebits() {
    let gens: Vec<AffineSymplectic> = [
        CssGate::HAll,
        CssGate::Cnot {
            control: 0,
            target: 1,
        },
        CssGate::Cnot {
            control: 1,
            target: 0,
        },
        CssGate::X(0),
        CssGate::X(1),
        CssGate::Z(0),
        CssGate::Z(1),
    ]
    .iter()
    .map(|g| gate_to_affine(g, 2).unwrap())
    .collect();
    let mut seen = HashSet::new();
    let mut frontier = vec![AffineSymplectic::identity(2)];
    seen.insert(frontier[0].clone());
    while let Some(m) = frontier.pop() {
        for g in &gens {
            let next = g.compose(&m).unwrap();
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    assert_eq!(seen.len(), 16 * 6 * 2);
}

#[test]
fn covariance_on_random_states() {
    let mut rng = stream_rng(13, 0);
    for n in 1..=3 {
        for _ in 0..10 {
            let rho = random_density(n, &mut rng);
            let word = random_word(n, 10, &mut rng);
            let mut after = rho.clone();
            for g in &word {
                after.apply(&GateOp::from(*g)).unwrap();
            }
            let map = word_to_affine(&word, n).unwrap();
            assert!(covariance_check(
                &wigner_of_density(&rho).unwrap(),
                &wigner_of_density(&after).unwrap(),
                &map
            ));
        }
    }
    let rho = random_density(2, &mut rng);
    let w = wigner_of_density(&rho).unwrap();
    assert!(covariance_check(&w, &w, &AffineSymplectic::identity(2)));
}

#[test]
fn single_hadamard_breaks_covariance() {
    let bell = css_state(&CssGroup::new(2, &[(0b11, Sign::Plus)], &[(0b11, Sign::Plus)]).unwrap()).unwrap();
    let mut graph = bell.clone();
    graph.apply(&GateOp::H(0)).unwrap();
    let before = wigner_of_pure_fast(&bell).unwrap();
    let after = wigner_of_pure_fast(&graph).unwrap();
    assert!(before.is_nonnegative());
    assert!(!after.is_nonnegative());
    // Any affine map permutes values, so the sorted values would agree.
    let sorted = |w: &WignerTable| {
        let mut v = w.values().to_vec();
        v.sort_by(f64::total_cmp);
        v
    };
    assert_ne!(sorted(&before), sorted(&after));
    assert!(CssGate::try_from(GateOp::H(0)).is_err());
}

#[test]
fn gate_text_round_trip() {
    for g in [
        CssGate::HAll,
        CssGate::X(2),
        CssGate::Z(0),
        CssGate::Cnot {
            control: 1,
            target: 0,
        },
    ] {
        assert_eq!(g.to_string().parse::<CssGate>().unwrap(), g);
    }
    assert!("H 0".parse::<CssGate>().is_err());
    assert!("CNOT 0".parse::<CssGate>().is_err());
}

proptest! {
    #[test]
    fn closed_form_support_size(n in 1usize..=4, seed in any::<u64>()) {
        // Random CSS group: pick N, take N^perp for Z rows, random signs.
        let mut rng = stream_rng(seed, 0);
        let x_rows: Vec<u64> = (0..rng.gen_range(0..=n)).map(|_| rng.gen_range(0..1u64 << n)).collect();
        let nspace = GF2Subspace::span_bits(n, x_rows.iter().copied());
        let zspace = nspace.orthogonal_complement(crate::gf2::Form::Euclidean).unwrap();
        let sign = |r: &mut crate::rng::StreamRng| Sign::from_negative(r.gen());
        let xs: Vec<(u64, Sign)> = nspace.basis().iter().map(|&b| (b, sign(&mut rng))).collect();
        let zs: Vec<(u64, Sign)> = zspace.basis().iter().map(|&b| (b, sign(&mut rng))).collect();
        let g = CssGroup::new(n, &zs, &xs).unwrap();
        prop_assert!(g.is_full());
        let w = wigner_css_closed_form(&g).unwrap();
        prop_assert_eq!(w.support.size(), 1u64 << n);
        let dense = wigner_of_pure_fast(&css_state(&g).unwrap()).unwrap();
        prop_assert!(w.table().unwrap().max_abs_diff(&dense).unwrap() < 1e-10);
    }
}
