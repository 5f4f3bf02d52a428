//! Proving and verifying R* instances, plus the proof-size formula.
//!
//! The only backend shipped is transparent: a proof carries the witness in
//! the clear together with a hash commitment and a binding to the message.
//! It is **not zero-knowledge** and exists so the protocol can run end to
//! end; a real prover would slot in behind the same `prove`/`verify`.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};
use crate::lattice_core::{Decode, Encode, Reader, Writer};
use crate::zk_relations::RStarInstance;

pub const PROOF_VERSION: u32 = 1;
pub const TRANSPARENT_BACKEND: &str = "transparent-v1";
pub const NON_ZK_WARNING: &str = "NON-ZERO-KNOWLEDGE: this proof reveals the full witness";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub version: u32,
    pub backend: String,
    pub warning: String,
    pub statement: [u8; 32],
    pub message: [u8; 32],
    /// Revealed witness.
    pub witness: Vec<u64>,
    pub commitment: [u8; 32],
    pub binding: [u8; 32],
}

fn hash(label: &[u8], parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Shake256::default();
    h.update(label);
    for p in parts {
        h.update(&(p.len() as u64).to_le_bytes());
        h.update(p);
    }
    let mut out = [0u8; 32];
    h.finalize_xof().read(&mut out);
    out
}

pub fn message_digest(msg: &[u8]) -> [u8; 32] {
    hash(b"ktaa-message-v1", &[msg])
}

fn commit(x: &[u64]) -> [u8; 32] {
    let bytes: Vec<u8> = x.iter().flat_map(|v| v.to_le_bytes()).collect();
    hash(b"ktaa-commit-v1", &[&bytes])
}

fn bind(statement: &[u8; 32], message: &[u8; 32], commitment: &[u8; 32]) -> [u8; 32] {
    hash(b"ktaa-fs-v1", &[statement, message, commitment])
}

pub fn prove(inst: &RStarInstance, x: &[u64], msg: &[u8]) -> Result<Proof> {
    if inst.first_violation(x)?.is_some() {
        return Err(Error::InvalidWitness);
    }
    Ok(prove_unchecked(inst, x, msg))
}

/// Build a proof without checking the witness. Only for adversarial tests:
/// the verifier must reject whatever this produces for a bad witness.
pub fn prove_unchecked(inst: &RStarInstance, x: &[u64], msg: &[u8]) -> Proof {
    let statement = inst.digest();
    let message = message_digest(msg);
    let commitment = commit(x);
    Proof {
        version: PROOF_VERSION,
        backend: TRANSPARENT_BACKEND.into(),
        warning: NON_ZK_WARNING.into(),
        statement,
        message,
        witness: x.to_vec(),
        commitment,
        binding: bind(&statement, &message, &commitment),
    }
}

pub fn verify(inst: &RStarInstance, proof: &Proof, msg: &[u8]) -> bool {
    proof.version == PROOF_VERSION
        && proof.backend == TRANSPARENT_BACKEND
        && proof.warning == NON_ZK_WARNING
        && proof.statement == inst.digest()
        && proof.message == message_digest(msg)
        && proof.commitment == commit(&proof.witness)
        && proof.binding == bind(&proof.statement, &proof.message, &proof.commitment)
        && matches!(inst.first_violation(&proof.witness), Ok(None))
}

impl Encode for Proof {
    fn encode(&self, w: &mut Writer) {
        w.u32(self.version);
        w.str(&self.backend);
        w.str(&self.warning);
        w.raw(&self.statement);
        w.raw(&self.message);
        w.u64s(&self.witness);
        w.raw(&self.commitment);
        w.raw(&self.binding);
    }
}

impl Decode for Proof {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let version = r.u32()?;
        if version != PROOF_VERSION {
            return Err(Error::Decode(format!("proof version {version}")));
        }
        Ok(Proof {
            version,
            backend: r.str()?,
            warning: r.str()?,
            statement: r.raw()?,
            message: r.raw()?,
            witness: r.u64s()?,
            commitment: r.raw()?,
            binding: r.raw()?,
        })
    }
}

/// Parameters of the size formula for the succinct prover.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZkCostParams {
    pub l_hat1: f64,
    pub l_hat2: f64,
    /// log2 of the challenge bound p̂.
    pub log2_p_hat: f64,
    pub kappa_hat: f64,
    pub n_kappa: f64,
}

impl ZkCostParams {
    pub fn level_80() -> Self {
        ZkCostParams { l_hat1: 7050.0, l_hat2: 7020.0, log2_p_hat: 80.0, kappa_hat: 80.0, n_kappa: 1.0 }
    }

    /// Only log p̂ and N_κ are published at this level; the commitment
    /// dimensions are carried over from the 80-bit set.
    pub fn level_128() -> Self {
        ZkCostParams { l_hat1: 7050.0, l_hat2: 7020.0, log2_p_hat: 128.0, kappa_hat: 128.0, n_kappa: 1.0 }
    }
}

/// Proof length in bits for witness length `n` and |M| = `l`.
pub fn proof_size_bits(n: f64, l: f64, cost: &ZkCostParams, log2_q: f64) -> f64 {
    // log2(2p̂ + 1) without forming p̂
    let a = cost.log2_p_hat + 1.0;
    let head = a + (-a).exp2().ln_1p() / std::f64::consts::LN_2;
    (head + cost.kappa_hat + (3.0 * cost.l_hat1 + 2.0 * cost.l_hat2 + 2.0 * n + 2.0 * l) * log2_q) * cost.n_kappa
        + (cost.l_hat1 + n) * log2_q
}

pub fn proof_size(inst: &RStarInstance, cost: &ZkCostParams, log2_q: f64) -> f64 {
    proof_size_bits(inst.witness_len() as f64, inst.m_size() as f64, cost, log2_q)
}
