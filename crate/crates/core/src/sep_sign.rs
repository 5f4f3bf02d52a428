//! Tag-based gadget signature with a committed message.
//!
//! pk = (A, B = A·R, u) plus the system-wide commitment key D. A signature on
//! a binary m is (τ, v) with A_τ·v = u + D·m, A_τ = [A | τ·G − B].

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::gauss::GaussianSampler;
use crate::lattice_core::{norm_inf_int, Decode, Encode, ParamSet, Reader, Writer, ZqMatrix, ZqVector};
use crate::trapdoor::{sample_pre_tagged, tagged_matrix, ternary_matrix, GadgetTrapdoor};

/// Resampling budget when an output misses the bounds the relation proves.
const SIGN_ATTEMPTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct SepPublicKey {
    pub a: ZqMatrix,
    pub b: ZqMatrix,
    pub u: ZqVector,
    pub d: ZqMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SepSecretKey {
    pub r: GadgetTrapdoor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SepSignature {
    pub tau: u64,
    pub v1: Vec<i64>,
    pub v2: Vec<i64>,
}

impl SepSignature {
    pub fn v(&self) -> Vec<i64> {
        let mut v = self.v1.clone();
        v.extend_from_slice(&self.v2);
        v
    }
}

pub fn sep_keygen<R: Rng + ?Sized>(params: &ParamSet, d: &ZqMatrix, rng: &mut R) -> (SepPublicKey, SepSecretKey) {
    let q = params.q();
    let (n, k) = (params.n, params.k());
    let a = ZqMatrix::random(n, params.m1, q, rng);
    let r = GadgetTrapdoor::new(n, params.m1, k, ternary_matrix(params.m1, n * k, rng));
    let b = r.times(&a);
    let u = ZqVector::random(n, q, rng);
    (SepPublicKey { a, b, u, d: d.clone() }, SepSecretKey { r })
}

impl SepPublicKey {
    pub fn a_tau(&self, tau: u64) -> Result<ZqMatrix> {
        tagged_matrix(&self.a, &self.b, tau)
    }
}

fn check_message(params: &ParamSet, m: &[u64]) -> Result<()> {
    if m.len() != params.m3 {
        return Err(Error::MessageLength { got: m.len(), want: params.m3 });
    }
    if m.iter().any(|&b| b > 1) {
        return Err(Error::Protocol("message must be binary".into()));
    }
    Ok(())
}

/// Sign a binary message. A caller-supplied tag is used verbatim; otherwise
/// one is drawn uniformly from the usable tags.
pub fn sep_sign<R: Rng + ?Sized>(
    params: &ParamSet,
    sk: &SepSecretKey,
    pk: &SepPublicKey,
    m: &[u64],
    tag: Option<u64>,
    rng: &mut R,
) -> Result<SepSignature> {
    check_message(params, m)?;
    let tags = params.usable_tags();
    let tau = match tag {
        Some(t) if tags.contains(&t) => t,
        Some(t) => return Err(Error::BadTag(t)),
        None => tags[rng.gen_range(0..tags.len())],
    };
    let q = params.q();
    let a_tau = pk.a_tau(tau)?;
    let dm = pk.d.mul_vec(&ZqVector::new(m.to_vec(), q))?;
    let perturb = GaussianSampler::new(params.sigma2);
    for _ in 0..SIGN_ATTEMPTS {
        let r = perturb.sample_vec(rng, params.m1);
        let c = pk.a.mul_int(&r)?.add(&dm)?;
        let target = pk.u.add(&c)?;
        let e = sample_pre_tagged(&a_tau, &sk.r, tau, &target, params.sigma, rng)?;
        let v1: Vec<i64> = e[..params.m1].iter().zip(&r).map(|(x, y)| x - y).collect();
        let v2 = e[params.m1..].to_vec();
        if norm_inf_int(&v1) <= params.alpha1() && norm_inf_int(&v2) <= params.alpha2() {
            return Ok(SepSignature { tau, v1, v2 });
        }
    }
    Err(Error::Protocol("signature sampling exceeded its retry budget".into()))
}

pub fn sep_verify(params: &ParamSet, pk: &SepPublicKey, m: &[u64], sig: &SepSignature) -> bool {
    if check_message(params, m).is_err() || sig.v1.len() != params.m1 || sig.v2.len() != params.m2 {
        return false;
    }
    if sig.tau == 0 || sig.tau >= params.qprime {
        return false;
    }
    let b1 = params.sigma1 * (params.m1 as f64).log2();
    let b2 = params.sigma1 * (params.m2 as f64).log2();
    if norm_inf_int(&sig.v1) as f64 > b1 || norm_inf_int(&sig.v2) as f64 > b2 {
        return false;
    }
    let q = params.q();
    let Ok(a_tau) = pk.a_tau(sig.tau) else { return false };
    let Ok(lhs) = a_tau.mul_int(&sig.v()) else { return false };
    let Ok(rhs) = pk.d.mul_vec(&ZqVector::new(m.to_vec(), q)).and_then(|dm| pk.u.add(&dm)) else {
        return false;
    };
    lhs == rhs
}

impl Encode for SepPublicKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.a);
        w.put(&self.b);
        w.put(&self.u);
        w.put(&self.d);
    }
}

impl Decode for SepPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(SepPublicKey { a: r.get()?, b: r.get()?, u: r.get()?, d: r.get()? })
    }
}

impl Encode for SepSecretKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.r);
    }
}

impl Decode for SepSecretKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(SepSecretKey { r: r.get()? })
    }
}

impl Encode for SepSignature {
    fn encode(&self, w: &mut Writer) {
        w.u64(self.tau);
        w.i64s(&self.v1);
        w.i64s(&self.v2);
    }
}

impl Decode for SepSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(SepSignature { tau: r.u64()?, v1: r.i64s()?, v2: r.i64s()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup(seed: u64) -> (ParamSet, SepPublicKey, SepSecretKey, ChaCha20Rng) {
        let p = ParamSet::toy_27();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let d = ZqMatrix::random(p.n, p.m3, p.q(), &mut rng);
        let (pk, sk) = sep_keygen(&p, &d, &mut rng);
        (p, pk, sk, rng)
    }

    #[test]
    fn keygen_equation() {
        let (p, pk, sk, _) = setup(1);
        let r = ZqMatrix::from_signed(p.m1, p.m2, &sk.r.r, p.q());
        assert_eq!(pk.a.mul(&r).unwrap(), pk.b);
    }

    #[test]
    fn sign_verify_and_tamper() {
        let (p, pk, sk, mut rng) = setup(2);
        let m: Vec<u64> = (0..p.m3).map(|_| rng.gen_range(0..2)).collect();
        let sig = sep_sign(&p, &sk, &pk, &m, None, &mut rng).unwrap();
        assert!(sep_verify(&p, &pk, &m, &sig));
        let mut m2 = m.clone();
        m2[0] ^= 1;
        assert!(!sep_verify(&p, &pk, &m2, &sig));
        let doubled = SepSignature { v1: sig.v1.iter().map(|x| 2 * x).collect(), v2: sig.v2.iter().map(|x| 2 * x).collect(), ..sig.clone() };
        assert!(!sep_verify(&p, &pk, &m, &doubled));
        let mut inflated = sig.clone();
        inflated.v1[0] += p.q() as i64 * 1000;
        assert!(!sep_verify(&p, &pk, &m, &inflated));
        assert!(sep_sign(&p, &sk, &pk, &m[1..], None, &mut rng).is_err());
        assert!(sep_sign(&p, &sk, &pk, &m, Some(3), &mut rng).is_err());
    }
}
