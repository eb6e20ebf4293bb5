//! Linear algebra over GF(2): packed vectors, phase-space points, canonical
//! subspaces, small matrices and the Walsh transform.

mod matrix;
mod phase;
mod subspace;
mod vector;
mod walsh;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

pub use matrix::GF2Matrix;
pub use phase::{swap_index, sym_index, PhasePoint};
pub use subspace::{Form, GF2Subspace};
pub use vector::{GF2Vector, MAX_LEN, MAX_REBITS};
pub use walsh::{fwht, walsh_transform, RealFunctionOnSubspace};

pub(crate) use vector::{low_mask, parity};

use crate::error::{Error, Result};

/// Largest rebit count for which maximal isotropic subspaces are enumerated.
pub const MAX_ENUMERATION_REBITS: usize = 5;

/// Symplectic product of two phase points.
pub fn sym_inner(u: &PhasePoint, v: &PhasePoint) -> bool {
    u.sym(v)
}

/// Every maximal isotropic (Lagrangian) subspace of `Z_2^{2n}`, sorted by
/// canonical basis. There are `prod_{i=1}^{n} (2^i + 1)` of them.
///
/// Each subspace is produced exactly once by growing its greedy basis: the
/// next vector is the smallest element outside the current span.
pub fn enumerate_maximal_isotropic(n: usize) -> Result<Vec<GF2Subspace>> {
    if n > MAX_ENUMERATION_REBITS {
        return Err(Error::TooLarge {
            requested: n,
            max: MAX_ENUMERATION_REBITS,
        });
    }
    let mut out = Vec::new();
    grow(n, &GF2Subspace::zero(2 * n), 0, &mut out);
    out.sort();
    Ok(out)
}

fn grow(n: usize, current: &GF2Subspace, last: u64, out: &mut Vec<GF2Subspace>) {
    if current.dim() == n {
        out.push(current.clone());
        return;
    }
    let perp = current.symplectic_complement();
    for v in perp.elements() {
        if v <= last || current.reduce(v) != v {
            continue;
        }
        let mut next = current.clone();
        next.insert(v);
        grow(n, &next, v, out);
    }
}

/// Shared, cached copy of [`enumerate_maximal_isotropic`].
pub fn lagrangians(n: usize) -> Result<Arc<Vec<GF2Subspace>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<GF2Subspace>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&n) {
        return Ok(v.clone());
    }
    let v = Arc::new(enumerate_maximal_isotropic(n)?);
    cache.lock().expect("cache lock").insert(n, v.clone());
    Ok(v)
}
