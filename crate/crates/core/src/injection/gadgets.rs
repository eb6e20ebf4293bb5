use super::register::Register;
use super::Ancilla;
use crate::css::CssGate;
use crate::error::{Error, Result};
use crate::pauli::Sign;

fn tagged<T>(reg: &mut Register, tag: String, body: impl FnOnce(&mut Register) -> Result<T>) -> Result<T> {
    reg.push_tag(tag);
    let out = body(reg);
    reg.pop_tag();
    out
}

fn check_data(reg: &Register, i: usize) -> Result<()> {
    if i >= reg.data_count() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: reg.data_count(),
        });
    }
    Ok(())
}

/// Logical `Z_i` measurement: the encoded observable is `Z_i` itself.
pub fn measure_z_gadget(reg: &mut Register, i: usize) -> Result<Sign> {
    check_data(reg, i)?;
    tagged(reg, format!("MEASZ({i})"), |r| r.measure_pure(true, &[i]))
}

/// Logical CNOT is the physical CNOT.
pub fn cnot_gadget(reg: &mut Register, control: usize, target: usize) -> Result<()> {
    check_data(reg, control)?;
    check_data(reg, target)?;
    tagged(reg, format!("CNOT({control},{target})"), |r| {
        r.cnot(control, target)
    })
}

/// Controlled-Z on any two register rebits, by teleporting both through
/// `|B> = CZ|++>`.
pub fn cz_gadget(reg: &mut Register, p: usize, q: usize) -> Result<()> {
    if p == q || p >= reg.rebits() || q >= reg.rebits() {
        return Err(Error::Invalid(format!("CZ gadget on rebits {p}, {q}")));
    }
    tagged(reg, format!("CZ({p},{q})"), |r| {
        let (a1, a2) = r.inject(Ancilla::B)?;
        r.cnot(a1, p)?;
        r.cnot(a2, q)?;
        let m1 = r.measure_pure(true, &[p])?.is_negative();
        let m2 = r.measure_pure(true, &[q])?.is_negative();
        if m1 {
            r.css(CssGate::X(a1))?;
            r.css(CssGate::Z(a2))?;
        }
        if m2 {
            r.css(CssGate::X(a2))?;
            r.css(CssGate::Z(a1))?;
        }
        r.swap(p, a1)?;
        r.swap(q, a2)?;
        r.discard(&[a1, a2])
    })
}

/// Logical Hadamard: Bell-measure the data rebit with half of `|B>`; the
/// other half carries `H` times a Pauli byproduct.
pub fn h_gadget(reg: &mut Register, d: usize) -> Result<()> {
    check_data(reg, d)?;
    tagged(reg, format!("H({d})"), |r| {
        let (a, b) = r.inject(Ancilla::B)?;
        let xx = r.measure_pure(false, &[d, a])?.is_negative();
        let zz = r.measure_pure(true, &[d, a])?.is_negative();
        if zz {
            r.css(CssGate::Z(b))?;
        }
        if xx {
            r.css(CssGate::X(b))?;
        }
        r.swap(d, b)?;
        r.discard(&[a, b])
    })
}

/// Logical `exp(i pi/8 Z_d)`. The `|A>` block is merged into the data
/// block's tracker, landing on either `|A>` or its conjugate; the phase is
/// then teleported in and a conditional `S^dagger` fixes the wrong branches.
pub fn t_gadget(reg: &mut Register, d: usize) -> Result<()> {
    check_data(reg, d)?;
    let t = reg.tracker();
    tagged(reg, format!("T({d})"), |r| {
        let (m, ta) = r.inject(Ancilla::A)?;
        // Merge: rotate i_T i_A onto X_A and measure it.
        r.push_tag("merge".into());
        let merged = (|| {
            r.cnot(ta, t)?;
            cz_gadget(r, ta, t)?;
            r.css(CssGate::Z(ta))?;
            let conj = r.measure_pure(false, &[ta])?.is_negative();
            r.discard(&[ta])?;
            Ok(conj)
        })();
        r.pop_tag();
        let conjugate = merged?;
        r.cnot(d, m)?;
        let bit = r.measure_pure(true, &[m])?.is_negative();
        r.discard(&[m])?;
        if bit == conjugate {
            r.push_tag("sdg".into());
            let fixed = r.cnot(d, t).and_then(|_| cz_gadget(r, d, t));
            r.pop_tag();
            fixed?;
        }
        Ok(())
    })
}
