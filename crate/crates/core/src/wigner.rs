//! The rebit Wigner function on `Z_2^{2n}`.
//!
//! `W_rho(u) = 2^{-n} Tr(A_u rho)` with phase-point operators
//! `A_u = 2^{-n} sum_{a in V_A} (-1)^{[u,a]} T_a`. Tables are indexed by the
//! flat phase-point index `(u_Z << n) | u_X`.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::{check_matrix_size, DenseDensity, DenseState};
use crate::error::{parse_err, Error, Result};
use crate::gf2::{fwht, swap_index, GF2Vector, PhasePoint};
use crate::pauli::{dense_matrix, PauliOp};

/// Largest rebit count for a stored table (`4^n` entries).
pub const MAX_TABLE_REBITS: usize = 10;

/// Tolerance below which a value counts as negative.
pub const NONNEG_TOL: f64 = 1e-10;

fn check_table_size(n: usize) -> Result<()> {
    if n > MAX_TABLE_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_TABLE_REBITS,
        });
    }
    Ok(())
}

/// Quasi-probability table over all `4^n` phase points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct WignerTable {
    n: usize,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<TableRepr> for WignerTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        WignerTable::new(r.n, r.values)
    }
}

impl From<WignerTable> for TableRepr {
    fn from(t: WignerTable) -> Self {
        TableRepr {
            n: t.n,
            values: t.values,
        }
    }
}

/// Summary of the negative part of a table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Negativity {
    pub min_value: f64,
    pub argmin: PhasePoint,
    pub neg_mass: f64,
    pub is_nonnegative: bool,
}

impl WignerTable {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_table_size(n)?;
        if values.len() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch {
                expected: 1 << (2 * n),
                found: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(PhasePoint) -> f64) -> Result<Self> {
        check_table_size(n)?;
        Ok(Self {
            n,
            values: PhasePoint::all(n).map(f).collect(),
        })
    }

    /// Table of the maximally mixed state, `4^{-n}` everywhere.
    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(n, vec![1.0 / (1u64 << (2 * n)) as f64; 1 << (2 * n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, u: &PhasePoint) -> f64 {
        debug_assert_eq!(u.n(), self.n);
        self.values[u.index() as usize]
    }

    pub fn at(&self, index: u64) -> f64 {
        self.values[index as usize]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn negativity(&self) -> Negativity {
        let (idx, &min_value) = self
            .values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("table is non-empty");
        Negativity {
            min_value,
            argmin: PhasePoint::from_index(self.n, idx as u64),
            neg_mass: self.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum(),
            is_nonnegative: min_value >= -NONNEG_TOL,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.negativity().is_nonnegative
    }

    /// `<T_a> = sum_u W(u) (-1)^{[u,a]}` for a symmetric `T_a`.
    pub fn pauli_expectation(&self, op: &PauliOp) -> Result<f64> {
        if op.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: op.n(),
            });
        }
        if !op.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        let e: f64 = PhasePoint::all(self.n)
            .map(|u| {
                if u.sym(&op.label) {
                    -self.get(&u)
                } else {
                    self.get(&u)
                }
            })
            .sum();
        Ok(op.sign.value() * e)
    }

    /// Table of the tensor product: `W(u_A + u_B) = Wa(u_A) Wb(u_B)`.
    pub fn tensor(&self, other: &WignerTable) -> Result<WignerTable> {
        let n = self.n + other.n;
        check_table_size(n)?;
        Self::from_fn(n, |u| {
            let (a, b) = split_point(&u, self.n);
            self.get(&a) * other.get(&b)
        })
    }

    pub fn max_abs_diff(&self, other: &WignerTable) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn scaled(&self, factor: f64) -> WignerTable {
        Self {
            n: self.n,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// CSV with columns `u_Z,u_X,value` (binary strings, rebit 0 first) and a
    /// trailing comment line with the negativity summary.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u_Z,u_X,value\n");
        for u in PhasePoint::all(self.n) {
            let _ = writeln!(out, "{},{},{:.17e}", u.z_part(), u.x_part(), self.get(&u));
        }
        let neg = self.negativity();
        let _ = writeln!(
            out,
            "# min={:.17e},neg_mass={:.17e},nonnegative={}",
            neg.min_value, neg.neg_mass, neg.is_nonnegative
        );
        out
    }

    /// Like [`Self::to_csv`] with an extra `negative` column marking entries
    /// below `-NONNEG_TOL`. [`Self::from_csv`] ignores the extra column.
    pub fn to_csv_flagged(&self) -> String {
        let mut out = String::from("u_Z,u_X,value,negative\n");
        for u in PhasePoint::all(self.n) {
            let v = self.get(&u);
            let _ = writeln!(
                out,
                "{},{},{:.17e},{}",
                u.z_part(),
                u.x_part(),
                v,
                v < -NONNEG_TOL
            );
        }
        let neg = self.negativity();
        let _ = writeln!(
            out,
            "# min={:.17e},neg_mass={:.17e},nonnegative={}",
            neg.min_value, neg.neg_mass, neg.is_nonnegative
        );
        out
    }

    pub fn from_csv(text: &str) -> Result<WignerTable> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("u_Z") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(parse_err(lineno + 1, "expected at least three columns"));
            }
            let z: GF2Vector = fields[0]
                .parse()
                .map_err(|e: Error| parse_err(lineno + 1, e.to_string()))?;
            let x: GF2Vector = fields[1]
                .parse()
                .map_err(|e: Error| parse_err(lineno + 1, e.to_string()))?;
            let u = PhasePoint::from_parts(z, x).map_err(|e| parse_err(lineno + 1, e.to_string()))?;
            let v: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(lineno + 1, format!("invalid number '{}'", fields[2])))?;
            entries.push((u, v));
        }
        let n = entries
            .first()
            .map(|(u, _)| u.n())
            .ok_or_else(|| parse_err(0, "empty table"))?;
        check_table_size(n)?;
        let mut values = vec![f64::NAN; 1 << (2 * n)];
        for (u, v) in entries {
            if u.n() != n {
                return Err(Error::Invalid("mixed rebit counts in table".into()));
            }
            values[u.index() as usize] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Invalid("table is missing phase points".into()));
        }
        Self::new(n, values)
    }
}

/// Splits a point on `n_a + n_b` rebits into its two factors.
pub fn split_point(u: &PhasePoint, n_a: usize) -> (PhasePoint, PhasePoint) {
    let n_b = u.n() - n_a;
    let mb = crate::gf2::low_mask(n_b);
    (
        PhasePoint::new(n_a, u.z() >> n_b, u.x() >> n_b).expect("fits"),
        PhasePoint::new(n_b, u.z() & mb, u.x() & mb).expect("fits"),
    )
}

/// `A_u = 2^{-n} sum_{a in V_A} (-1)^{[u,a]} T_a` as a dense matrix.
pub fn phase_point_operator(u: &PhasePoint) -> Result<DMatrix<f64>> {
    let n = u.n();
    check_matrix_size(n)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for a in PhasePoint::all(n).filter(PhasePoint::is_symmetric) {
        let s = if u.sym(&a) { -1.0 } else { 1.0 };
        let op = PauliOp::plus(a);
        for c in 0..dim as u64 {
            let (r, v) = op.apply_to_basis(c);
            m[(r as usize, c as usize)] += s * v;
        }
    }
    Ok(m / dim as f64)
}

/// Table of any square matrix of size `2^n`; only its symmetric part
/// contributes.
pub fn wigner_of_operator(m: &DMatrix<f64>) -> Result<WignerTable> {
    if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() {
        return Err(Error::Invalid("operator must be square of size 2^n".into()));
    }
    let n = m.nrows().trailing_zeros() as usize;
    check_matrix_size(n)?;
    // c_a = Tr(T_a M) on V_A, then one Walsh transform over Z_2^{2n}.
    let mut f = vec![0.0; 1 << (2 * n)];
    for a in PhasePoint::all(n).filter(PhasePoint::is_symmetric) {
        let op = PauliOp::plus(a);
        f[a.index() as usize] = (0..1u64 << n)
            .map(|c| {
                let (r, v) = op.apply_to_basis(c);
                v * m[(c as usize, r as usize)]
            })
            .sum();
    }
    fwht(&mut f);
    let scale = 1.0 / (1u64 << (2 * n)) as f64;
    let values = (0..1u64 << (2 * n))
        .map(|u| f[swap_index(n, u) as usize] * scale)
        .collect();
    WignerTable::new(n, values)
}

pub fn wigner_of_density(rho: &DenseDensity) -> Result<WignerTable> {
    wigner_of_operator(rho.matrix())
}

/// Pure-state route: `W(p, q) = 2^{-n} sum_x (-1)^{p.x} psi(q) psi(q+x)` with
/// `p = u_Z`, `q = u_X`, one Walsh transform per `q` slice.
pub fn wigner_of_pure_fast(psi: &DenseState) -> Result<WignerTable> {
    let n = psi.n();
    check_table_size(n)?;
    let amps = psi.amplitudes();
    let dim = 1usize << n;
    let scale = 1.0 / dim as f64;
    let mut values = vec![0.0; dim * dim];
    let mut slice = vec![0.0; dim];
    for q in 0..dim {
        for (x, k) in slice.iter_mut().enumerate() {
            *k = amps[q] * amps[q ^ x];
        }
        fwht(&mut slice);
        for (p, s) in slice.iter().enumerate() {
            values[(p << n) | q] = s * scale;
        }
    }
    WignerTable::new(n, values)
}

/// `sum_u W(u) A_u` as a dense symmetric matrix.
pub fn reconstruct_operator(w: &WignerTable) -> Result<DMatrix<f64>> {
    let n = w.n();
    check_matrix_size(n)?;
    let mut g = w.values().to_vec();
    fwht(&mut g);
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for a in PhasePoint::all(n).filter(PhasePoint::is_symmetric) {
        let coeff = g[swap_index(n, a.index()) as usize];
        if coeff == 0.0 {
            continue;
        }
        let op = PauliOp::plus(a);
        for c in 0..dim as u64 {
            let (r, v) = op.apply_to_basis(c);
            m[(r as usize, c as usize)] += coeff * v;
        }
    }
    Ok(m / dim as f64)
}

/// Reconstructs a density matrix; fails if the table is not one.
pub fn reconstruct(w: &WignerTable) -> Result<DenseDensity> {
    DenseDensity::new(reconstruct_operator(w)?)
}

/// `Tr(rho sigma) = 2^n sum_u W_rho(u) W_sigma(u)`.
pub fn trace_inner(a: &WignerTable, b: &WignerTable) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    let s: f64 = a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum();
    Ok(s * (1u64 << a.n()) as f64)
}

/// True when `w_ab` is the pointwise product of `w_a` and `w_b`.
pub fn product_check(w_a: &WignerTable, w_b: &WignerTable, w_ab: &WignerTable) -> bool {
    w_a.tensor(w_b)
        .and_then(|t| t.max_abs_diff(w_ab))
        .map(|d| d <= 1e-10)
        .unwrap_or(false)
}

/// Dense matrix of `sign * T_a`, re-exported for oracle tests.
pub fn pauli_matrix(op: &PauliOp) -> Result<DMatrix<f64>> {
    dense_matrix(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::GateOp;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};

    fn random_state(n: usize, seed: u64) -> DenseState {
        let mut rng = stream_rng(seed, 0);
        let amps = (0..1 << n).map(|_| StandardNormal.sample(&mut rng)).collect();
        DenseState::from_unnormalized(amps).unwrap()
    }

    fn random_density(n: usize, seed: u64) -> DenseDensity {
        let mut rng = stream_rng(seed, 1);
        let dim = 1 << n;
        let g: DMatrix<f64> = DMatrix::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
        let m: DMatrix<f64> = &g * g.transpose();
        let tr = m.trace();
        DenseDensity::new(m / tr).unwrap()
    }

    /// Literal definition: `2^{-n} Tr(A_u rho)` with conjugated `A_0`.
    fn oracle_table(rho: &DMatrix<f64>) -> WignerTable {
        let n = rho.nrows().trailing_zeros() as usize;
        let a0 = phase_point_operator(&PhasePoint::zero(n)).unwrap();
        WignerTable::from_fn(n, |u| {
            let t = dense_matrix(&PauliOp::plus(u)).unwrap();
            let au = &t * &a0 * t.transpose();
            (au * rho).trace() / (1u64 << n) as f64
        })
        .unwrap()
    }

    #[test]
    fn a0_single_rebit() {
        let a0 = phase_point_operator(&PhasePoint::zero(1)).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]);
        assert!((a0 - expected).amax() < 1e-15);
    }

    #[test]
    fn phase_point_traces() {
        for u in PhasePoint::all(2) {
            let a = phase_point_operator(&u).unwrap();
            assert!((a.trace() - 1.0).abs() < 1e-12);
            assert!((&a - a.transpose()).amax() < 1e-15);
        }
    }

    #[test]
    fn a0_closed_form() {
        for n in 1..=3 {
            let dim = 1usize << n;
            let plus = nalgebra::DVector::from_element(dim, (dim as f64).sqrt().recip());
            let mut zero = nalgebra::DVector::zeros(dim);
            zero[0] = 1.0;
            let closed =
                (&zero * plus.transpose() + &plus * zero.transpose()) * 2f64.powf(n as f64 / 2.0 - 1.0);
            let a0 = phase_point_operator(&PhasePoint::zero(n)).unwrap();
            assert!((a0 - closed).amax() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn character_form_matches_conjugation_form() {
        for n in 1..=3 {
            let a0 = phase_point_operator(&PhasePoint::zero(n)).unwrap();
            for u in PhasePoint::all(n) {
                let t = dense_matrix(&PauliOp::plus(u)).unwrap();
                let conj = &t * &a0 * t.transpose();
                assert!((conj - phase_point_operator(&u).unwrap()).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_state_tables() {
        let zero = wigner_of_density(&DenseState::zero(1).unwrap().density().unwrap()).unwrap();
        // Index (z << 1) | x: points with u_X = 0 are 0 and 2.
        assert_eq!(zero.values(), &[0.5, 0.0, 0.5, 0.0]);
        let mut plus = DenseState::zero(1).unwrap();
        plus.apply(&GateOp::HAll).unwrap();
        let w = wigner_of_pure_fast(&plus).unwrap();
        let expected = [0.5, 0.5, 0.0, 0.0];
        for (a, b) in w.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        for n in 1..=3 {
            let w = wigner_of_density(&DenseDensity::maximally_mixed(n).unwrap()).unwrap();
            assert!(w.max_abs_diff(&WignerTable::uniform(n).unwrap()).unwrap() < 1e-15);
            let back = reconstruct(&WignerTable::uniform(n).unwrap()).unwrap();
            assert!((back.matrix() - DenseDensity::maximally_mixed(n).unwrap().matrix()).amax() < 1e-14);
        }
    }

    #[test]
    fn tilted_one_rebit_state_is_negative() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let rho = DMatrix::from_row_slice(2, 2, &[0.5 + 0.5 * h, 0.5 * h, 0.5 * h, 0.5 - 0.5 * h]);
        let w = wigner_of_operator(&rho).unwrap();
        let oracle = oracle_table(&rho);
        assert!(w.max_abs_diff(&oracle).unwrap() < 1e-12);
        let u11 = PhasePoint::new(1, 1, 1).unwrap();
        assert!((w.get(&u11) - (1.0 - 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_is_uniform_on_eight_points() {
        let s = DenseState::from_unnormalized(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let w = wigner_of_pure_fast(&s).unwrap();
        let support: Vec<f64> = w.values().iter().copied().filter(|v| v.abs() > 1e-12).collect();
        assert_eq!(support.len(), 8);
        assert!(support.iter().all(|v| (v - 0.125).abs() < 1e-12));
    }

    #[test]
    fn trace_inner_examples() {
        let zero = DenseState::zero(1).unwrap();
        let mut plus = zero.clone();
        plus.apply(&GateOp::HAll).unwrap();
        let (wz, wp) = (
            wigner_of_pure_fast(&zero).unwrap(),
            wigner_of_pure_fast(&plus).unwrap(),
        );
        assert!((trace_inner(&wz, &wz).unwrap() - 1.0).abs() < 1e-12);
        assert!((trace_inner(&wz, &wp).unwrap() - 0.5).abs() < 1e-12);
        let one = wigner_of_pure_fast(&DenseState::basis(1, 1).unwrap()).unwrap();
        assert!(trace_inner(&wz, &one).unwrap().abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip() {
        let w = wigner_of_density(&random_density(2, 9)).unwrap();
        let back = WignerTable::from_csv(&w.to_csv()).unwrap();
        assert!(w.max_abs_diff(&back).unwrap() < 1e-15);
        let flagged = WignerTable::from_csv(&w.to_csv_flagged()).unwrap();
        assert!(w.max_abs_diff(&flagged).unwrap() < 1e-15);
        assert!(WignerTable::from_csv("u_Z,u_X,value\n0,0,1\n").is_err());
    }

    #[test]
    fn pauli_expectation_from_table() {
        let rho = random_density(2, 4);
        let w = wigner_of_density(&rho).unwrap();
        for a in PhasePoint::all(2).filter(PhasePoint::is_symmetric) {
            let op = PauliOp::plus(a);
            assert!((w.pauli_expectation(&op).unwrap() - rho.expectation(&op).unwrap()).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn fast_path_matches_dense(n in 1usize..=4, seed in any::<u64>()) {
            let s = random_state(n, seed);
            let fast = wigner_of_pure_fast(&s).unwrap();
            let dense = wigner_of_density(&s.density().unwrap()).unwrap();
            prop_assert!(fast.max_abs_diff(&dense).unwrap() < 1e-10);
        }

        #[test]
        fn dense_matches_literal_definition(n in 1usize..=3, seed in any::<u64>()) {
            let rho = random_density(n, seed);
            let w = wigner_of_density(&rho).unwrap();
            prop_assert!(w.max_abs_diff(&oracle_table(rho.matrix())).unwrap() < 1e-12);
            prop_assert!((w.sum() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn reconstruct_round_trip(n in 1usize..=4, seed in any::<u64>()) {
            let rho = random_density(n, seed);
            let back = reconstruct(&wigner_of_density(&rho).unwrap()).unwrap();
            prop_assert!((back.matrix() - rho.matrix()).amax() < 1e-10);
        }

        #[test]
        fn trace_inner_matches_dense(seed in any::<u64>()) {
            let (a, b) = (random_density(2, seed), random_density(2, seed ^ 0xabc));
            let ip = trace_inner(&wigner_of_density(&a).unwrap(), &wigner_of_density(&b).unwrap()).unwrap();
            prop_assert!((ip - (a.matrix() * b.matrix()).trace()).abs() < 1e-10);
        }

        #[test]
        fn tensor_product_factorizes(seed in any::<u64>()) {
            let (a, b) = (random_density(2, seed), random_density(2, seed.rotate_left(7)));
            let ab = a.kron(&b).unwrap();
            let (wa, wb) = (wigner_of_density(&a).unwrap(), wigner_of_density(&b).unwrap());
            prop_assert!(product_check(&wa, &wb, &wigner_of_density(&ab).unwrap()));
        }

        #[test]
        fn normalization_for_symmetric_operators(seed in any::<u64>()) {
            let mut rng = stream_rng(seed, 2);
            let g: DMatrix<f64> = DMatrix::from_fn(4, 4, |_, _| StandardNormal.sample(&mut rng));
            let sym = &g + g.transpose();
            prop_assert!((wigner_of_operator(&sym).unwrap().sum() - sym.trace()).abs() < 1e-10);
        }
    }
}
