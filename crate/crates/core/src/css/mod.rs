//! CSS and real stabilizer groups, their states, the closed-form Wigner
//! function of CSS states, the affine action of CSS-preserving gates and a
//! Hudson's-theorem verifier.

mod affine;
mod hudson;

pub use affine::{covariance_check, gate_to_affine, word_to_affine, AffineSymplectic, BlockForm, CssGate};
pub use hudson::{hudson_verify, real_stabilizer_groups, HudsonReport, HudsonViolation};

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::{check_matrix_size, check_state_size, DenseState};
use crate::error::{parse_err, Error, Result};
use crate::gf2::{parity, GF2Subspace, PhasePoint};
use crate::pauli::{commutes, dense_matrix, pauli_product, PauliOp, Sign};
use crate::wigner::WignerTable;

/// Row-reduced generators of one Pauli type, with signs.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
struct SignedRows {
    rows: Vec<(u64, Sign)>,
}

impl SignedRows {
    fn pivot(v: u64) -> u32 {
        63 - v.leading_zeros()
    }

    /// Inserts a signed row. Dependent rows must carry the sign implied by
    /// the existing ones, otherwise the group contains `-I`.
    fn insert(&mut self, mut v: u64, mut sign: Sign) -> Result<()> {
        for &(row, s) in &self.rows {
            if v >> Self::pivot(row) & 1 == 1 {
                v ^= row;
                sign = sign * s;
            }
        }
        if v == 0 {
            return if sign.is_negative() {
                Err(Error::InconsistentSigns)
            } else {
                Ok(())
            };
        }
        let p = Self::pivot(v);
        for (row, s) in self.rows.iter_mut() {
            if *row >> p & 1 == 1 {
                *row ^= v;
                *s = *s * sign;
            }
        }
        let pos = self
            .rows
            .iter()
            .position(|&(r, _)| Self::pivot(r) < p)
            .unwrap_or(self.rows.len());
        self.rows.insert(pos, (v, sign));
        Ok(())
    }

    /// A vector `t` with `row . t = [sign negative]` for every row.
    fn solve_signs(&self) -> u64 {
        self.rows
            .iter()
            .filter(|(_, s)| s.is_negative())
            .fold(0, |acc, &(r, _)| acc | 1u64 << Self::pivot(r))
    }

    fn span(&self, n: usize) -> GF2Subspace {
        GF2Subspace::span_bits(n, self.rows.iter().map(|&(r, _)| r))
    }
}

/// A CSS group generated by signed pure-Z and pure-X operators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssGroup {
    n: usize,
    z: SignedRows,
    x: SignedRows,
}

impl CssGroup {
    /// Builds the group from signed Z rows and X rows. Dependent rows with
    /// consistent signs are dropped.
    pub fn new(n: usize, z_gens: &[(u64, Sign)], x_gens: &[(u64, Sign)]) -> Result<Self> {
        check_state_size(n)?;
        let mask = crate::gf2::low_mask(n);
        let mut z = SignedRows::default();
        let mut x = SignedRows::default();
        for &(v, s) in z_gens {
            if v & !mask != 0 {
                return Err(Error::Invalid("Z row exceeds rebit count".into()));
            }
            z.insert(v, s)?;
        }
        for &(v, s) in x_gens {
            if v & !mask != 0 {
                return Err(Error::Invalid("X row exceeds rebit count".into()));
            }
            x.insert(v, s)?;
        }
        for &(a, _) in &z.rows {
            for &(b, _) in &x.rows {
                if parity(a & b) {
                    return Err(Error::NonCommuting);
                }
            }
        }
        Ok(Self { n, z, x })
    }

    /// Builds the group from pure-type Pauli operators.
    pub fn from_ops(ops: &[PauliOp]) -> Result<Self> {
        let n = ops.first().map(PauliOp::n).unwrap_or(0);
        let mut zs = Vec::new();
        let mut xs = Vec::new();
        for op in ops {
            if op.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: op.n(),
                });
            }
            match (op.label.z(), op.label.x()) {
                (0, 0) if op.sign.is_negative() => return Err(Error::InconsistentSigns),
                (0, 0) => {}
                (z, 0) => zs.push((z, op.sign)),
                (0, x) => xs.push((x, op.sign)),
                _ => return Err(Error::NotInO(op.to_string())),
            }
        }
        Self::new(n, &zs, &xs)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.z.rows.len() + self.x.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.n
    }

    pub fn generators(&self) -> Vec<PauliOp> {
        let n = self.n;
        self.z
            .rows
            .iter()
            .map(|&(r, s)| PauliOp::new(s, PhasePoint::new(n, r, 0).expect("fits")))
            .chain(
                self.x
                    .rows
                    .iter()
                    .map(|&(r, s)| PauliOp::new(s, PhasePoint::new(n, 0, r).expect("fits"))),
            )
            .collect()
    }

    /// Span `N` of the X-generator vectors.
    pub fn x_space(&self) -> GF2Subspace {
        self.x.span(self.n)
    }

    /// Span of the Z-generator vectors (equal to `N^perp` for a state).
    pub fn z_space(&self) -> GF2Subspace {
        self.z.span(self.n)
    }

    pub fn to_stabilizer_group(&self) -> StabilizerGroup {
        StabilizerGroup {
            n: self.n,
            gens: self.generators(),
        }
    }

    fn require_full(&self) -> Result<()> {
        if !self.is_full() {
            return Err(Error::Invalid(format!(
                "group has rank {} but a state needs rank {}",
                self.rank(),
                self.n
            )));
        }
        Ok(())
    }
}

/// The +1 joint eigenstate: an equal-weight signed superposition over the
/// coset of the X space that satisfies the Z constraints.
pub fn css_state(group: &CssGroup) -> Result<DenseState> {
    group.require_full()?;
    let n = group.n;
    let offset = group.z.solve_signs();
    let dim = 1usize << n;
    let mut amps = vec![0.0; dim];
    let k = group.x.rows.len();
    for c in 0..1u64 << k {
        let mut w = offset;
        let mut neg = false;
        for (i, &(row, s)) in group.x.rows.iter().enumerate() {
            if c >> i & 1 == 1 {
                w ^= row;
                neg ^= s.is_negative();
            }
        }
        amps[w as usize] = if neg { -1.0 } else { 1.0 };
    }
    DenseState::from_unnormalized(amps)
}

/// Support of a CSS Wigner function: the coset `offset + support`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CssWigner {
    pub n: usize,
    /// `V_S = N^perp x N` as a subspace of `Z_2^{2n}`.
    pub support: GF2Subspace,
    /// Canonical (smallest) representative of the support coset.
    pub offset: PhasePoint,
}

impl CssWigner {
    pub fn contains(&self, u: &PhasePoint) -> bool {
        self.support.contains(u.index() ^ self.offset.index())
    }

    /// Dense table: `2^{-n}` on the coset, zero elsewhere.
    pub fn table(&self) -> Result<WignerTable> {
        let v = 1.0 / (1u64 << self.n) as f64;
        WignerTable::from_fn(self.n, |u| if self.contains(&u) { v } else { 0.0 })
    }
}

/// Closed form `W = 2^{-n} delta_{t + V_S}` for a full-rank CSS group.
pub fn wigner_css_closed_form(group: &CssGroup) -> Result<CssWigner> {
    group.require_full()?;
    let n = group.n;
    let support = GF2Subspace::span_bits(
        2 * n,
        group
            .z
            .rows
            .iter()
            .map(|&(r, _)| r << n)
            .chain(group.x.rows.iter().map(|&(r, _)| r)),
    );
    // [t, (v_Z, 0)] = v_Z . t_X and [t, (0, v_X)] = t_Z . v_X.
    let t_x = group.z.solve_signs();
    let t_z = group.x.solve_signs();
    let t = support.reduce((t_z << n) | t_x);
    Ok(CssWigner {
        n,
        support,
        offset: PhasePoint::from_index(n, t),
    })
}

/// A group generated by commuting, independent, symmetric signed Pauli
/// operators. It never contains `-I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGroup {
    n: usize,
    gens: Vec<PauliOp>,
}

impl StabilizerGroup {
    pub fn new(gens: Vec<PauliOp>) -> Result<Self> {
        let n = gens
            .first()
            .map(PauliOp::n)
            .ok_or_else(|| Error::Invalid("empty generator list".into()))?;
        for g in &gens {
            if g.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: g.n(),
                });
            }
            if !g.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
        }
        for (i, a) in gens.iter().enumerate() {
            if gens[i + 1..].iter().any(|b| !commutes(a, b)) {
                return Err(Error::NonCommuting);
            }
        }
        let labels = GF2Subspace::span_bits(2 * n, gens.iter().map(|g| g.label.index()));
        if labels.dim() != gens.len() {
            // Dependent labels either repeat an element or generate -I.
            return Err(Error::DependentGenerators);
        }
        Ok(Self { n, gens })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[PauliOp] {
        &self.gens
    }

    pub fn is_full(&self) -> bool {
        self.gens.len() == self.n
    }

    pub fn label_space(&self) -> GF2Subspace {
        GF2Subspace::span_bits(2 * self.n, self.gens.iter().map(|g| g.label.index()))
    }

    /// All `2^k` group elements with their signs.
    pub fn elements(&self) -> Vec<PauliOp> {
        let mut out = vec![PauliOp::identity(self.n)];
        for g in &self.gens {
            let with: Vec<PauliOp> = out
                .iter()
                .map(|e| pauli_product(e, g).expect("same size"))
                .collect();
            out.extend(with);
        }
        out
    }

    /// Signed group element with the given label, if present.
    pub fn element_with_label(&self, label: &PhasePoint) -> Option<PauliOp> {
        let space = self.label_space();
        let c = space.coordinates(label.index())?;
        // Express the label in terms of the generators, then multiply.
        let k = self.gens.len();
        let basis_in_gens = self.label_coordinates();
        let mut acc = PauliOp::identity(self.n);
        let mut mask = 0u64;
        for (i, coeffs) in basis_in_gens.iter().enumerate() {
            if c >> (space.dim() - 1 - i) & 1 == 1 {
                mask ^= coeffs;
            }
        }
        for i in 0..k {
            if mask >> i & 1 == 1 {
                acc = pauli_product(&acc, &self.gens[i]).expect("same size");
            }
        }
        Some(acc)
    }

    /// For each RREF basis row of the label space, the set of generators
    /// (bit `i` for generator `i`) whose labels sum to it.
    fn label_coordinates(&self) -> Vec<u64> {
        let space = self.label_space();
        let mut tracked: Vec<(u64, u64)> = Vec::new();
        for (i, g) in self.gens.iter().enumerate() {
            let mut v = g.label.index();
            let mut m = 1u64 << i;
            for &(r, rm) in &tracked {
                if v >> (63 - r.leading_zeros()) & 1 == 1 {
                    v ^= r;
                    m ^= rm;
                }
            }
            let p = 63 - v.leading_zeros();
            for (r, rm) in tracked.iter_mut() {
                if *r >> p & 1 == 1 {
                    *r ^= v;
                    *rm ^= m;
                }
            }
            tracked.push((v, m));
        }
        space
            .basis()
            .iter()
            .map(|b| tracked.iter().find(|(r, _)| r == b).expect("same span").1)
            .collect()
    }

    /// True when the group has a generating set of pure-X and pure-Z
    /// elements.
    pub fn is_css(&self) -> bool {
        let space = self.label_space();
        let n = self.n;
        let z_dim = GF2Subspace::span_bits(n, space.basis().iter().map(|&b| b >> n)).dim();
        let x_dim =
            GF2Subspace::span_bits(n, space.basis().iter().map(|&b| b & crate::gf2::low_mask(n))).dim();
        z_dim + x_dim == space.dim()
    }

    /// The equivalent CSS presentation, if the group is CSS.
    pub fn to_css(&self) -> Option<CssGroup> {
        if !self.is_css() {
            return None;
        }
        let pure: Vec<PauliOp> = self
            .elements()
            .into_iter()
            .filter(|e| e.label.is_pure() && !e.label.is_zero())
            .collect();
        CssGroup::from_ops(&pure).ok()
    }

    /// `prod_i (I + g_i) / 2`.
    pub fn projector(&self) -> Result<DMatrix<f64>> {
        check_matrix_size(self.n)?;
        let dim = 1usize << self.n;
        let mut p = DMatrix::identity(dim, dim);
        for g in &self.gens {
            p = (&p + &p * dense_matrix(g)?) * 0.5;
        }
        Ok(p)
    }

    /// The unique joint +1 eigenstate of a full group.
    pub fn state(&self) -> Result<DenseState> {
        if !self.is_full() {
            return Err(Error::Invalid("stabilizer group is not maximal".into()));
        }
        check_state_size(self.n)?;
        let dim = 1usize << self.n;
        // Some basis vector has overlap at least 2^{-n} with the state.
        for c in 0..dim as u64 {
            let mut v = DenseState::basis(self.n, c)?;
            let mut ok = true;
            for g in &self.gens {
                if v.project(g, Sign::Plus).is_err() {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(v);
            }
        }
        Err(Error::InconsistentSigns)
    }

    /// Conjugates every generator by a CSS gate.
    pub fn apply(&self, gate: &CssGate) -> Result<StabilizerGroup> {
        let map = gate_to_affine(gate, self.n)?;
        let gens = self
            .gens
            .iter()
            .map(|g| map.conjugate(g))
            .collect::<Result<Vec<_>>>()?;
        Ok(StabilizerGroup { n: self.n, gens })
    }

    /// Parses one signed Pauli string per line; blank lines and `#` comments
    /// are skipped.
    pub fn from_text(text: &str) -> Result<StabilizerGroup> {
        let mut gens = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            gens.push(
                line.parse::<PauliOp>()
                    .map_err(|e| parse_err(lineno + 1, e.to_string()))?,
            );
        }
        StabilizerGroup::new(gens)
    }

    pub fn to_text(&self) -> String {
        self.gens.iter().map(|g| format!("{g}\n")).collect()
    }
}

impl fmt::Display for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(">")
    }
}

/// Conjugation by a CSS gate, as a free function.
pub fn tableau_apply(group: &StabilizerGroup, gate: &CssGate) -> Result<StabilizerGroup> {
    group.apply(gate)
}

/// Whether a stabilizer group is CSS, as a free function.
pub fn is_css(group: &StabilizerGroup) -> bool {
    group.is_css()
}

#[cfg(test)]
mod tests;
