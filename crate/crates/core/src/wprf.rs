//! Rounding-based weak PRF: y = ⌊A·s⌉_p with A ∈ Z_q1^{m_D×n1}.
//!
//! The rounding is the floor map ⌊p·x/q1⌋, so u = A·s mod q1 always splits
//! as u = γ·y + e with e ∈ [0, γ).

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::{round_vec, Decode, Encode, ParamSet, Reader, Writer, ZqMatrix, ZqVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WprfKey {
    pub s: ZqVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WprfOutput {
    pub y: Vec<u64>,
}

/// Uniform over nonzero keys. The zero key maps every input to zero, so all
/// of a user's tags would coincide; at toy sizes it is drawn often enough to
/// matter.
pub fn wprf_keygen<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> WprfKey {
    loop {
        let s = ZqVector::random(params.n1, params.q1(), rng);
        if !s.is_zero() {
            return WprfKey { s };
        }
    }
}

/// The pre-rounding value A·s mod q1.
pub fn wprf_inner(s: &WprfKey, a: &ZqMatrix) -> Result<ZqVector> {
    if a.modulus != s.s.modulus {
        return Err(Error::ModulusMismatch(format!("input mod {} vs key mod {}", a.modulus, s.s.modulus)));
    }
    a.mul_vec(&s.s)
}

pub fn wprf_eval(s: &WprfKey, a: &ZqMatrix, p: u64) -> Result<WprfOutput> {
    let u = wprf_inner(s, a)?;
    Ok(WprfOutput { y: round_vec(&u, p)?.entries })
}

impl WprfOutput {
    pub fn as_vector(&self, p: u64) -> ZqVector {
        ZqVector::new(self.y.clone(), p)
    }
}

impl Encode for WprfKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.s);
    }
}

impl Decode for WprfKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(WprfKey { s: r.get()? })
    }
}

impl Encode for WprfOutput {
    fn encode(&self, w: &mut Writer) {
        w.u64s(&self.y);
    }
}

impl Decode for WprfOutput {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(WprfOutput { y: r.u64s()? })
    }
}
