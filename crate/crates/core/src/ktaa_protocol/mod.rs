//! The GM / AP / User protocol: setup, join, access granting and
//! revocation, authentication with per-AP visit limits, and public tracing.
//!
//! Entities own their state and talk through serializable messages, so the
//! same flows run in-process or through the CLI's file stores.

mod ap;
mod gm;
mod tracing;
mod user;

pub use ap::{ApPublic, ApState, ArcEntry, AuthOutcome, AuthRecord, AuthRequest, Challenge};
pub use gm::{Credential, GroupManager, JoinRequest, ListEntry};
pub use tracing::{public_tracing, Traced};
pub use user::{UserAp, UserState};

use rand::Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::acc_static::{macc_setup, MerkleParams};
use crate::error::{Error, Result};
use crate::lattice_core::{bit_len, Decode, Encode, ParamSet, Reader, Writer, ZqMatrix};
use crate::rng::derive;
use crate::sep_sign::SepPublicKey;
use crate::zk_relations::compilers::tag_base_digest;

/// System-wide public values, all derived from a preset and a seed.
#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams {
    pub params: ParamSet,
    pub seed: u64,
    /// wPRF input for user public keys, m_D × n1 over Z_q1.
    pub a_prf: ZqMatrix,
    /// Public-key map, n′ × m_D·k_p over Z_p.
    pub f: ZqMatrix,
    /// Message commitment key of the signature, n × m3 over Z_q.
    pub d: ZqMatrix,
    /// Tag-base compression, n_E1 × m_D·n1·k′ over Z_q1.
    pub e1: ZqMatrix,
    pub merkle: MerkleParams,
}

impl PublicParams {
    pub fn setup(params: ParamSet, seed: u64) -> Result<Self> {
        params.validate()?;
        if !params.is_arithmetic() {
            return Err(Error::Params(format!("{} is estimator-only", params.name)));
        }
        let p = &params;
        let mut rng = derive(seed, "public-params");
        let a_prf = ZqMatrix::random(p.m_d, p.n1, p.q1(), &mut rng);
        let f = ZqMatrix::random(p.n_prime(), p.m_d * p.k_p(), p.p(), &mut rng);
        let d = ZqMatrix::random(p.n, p.m3, p.q(), &mut rng);
        let e1 = ZqMatrix::random(p.n_e1, p.m_d * p.n1 * p.k_vdec(), p.q1(), &mut rng);
        let merkle = macc_setup(p, &mut rng);
        Ok(PublicParams { params, seed, a_prf, f, d, e1, merkle })
    }

    pub fn preset(name: &str, seed: u64) -> Result<Self> {
        Self::setup(ParamSet::preset(name)?, seed)
    }
}

/// H(ID, k, i) → (B, B̌), each m_D × n1 over Z_q1, by rejection sampling
/// ⌈log q1⌉-bit chunks of a SHAKE256 stream.
pub fn hash_tag_base(params: &ParamSet, id: &str, k: usize, i: usize) -> (ZqMatrix, ZqMatrix) {
    let q1 = params.q1();
    let bits = bit_len(q1 - 1);
    let mask = (1u64 << bits) - 1;
    let mut h = Shake256::default();
    h.update(b"ktaa-tagbase-v1");
    h.update(&(id.len() as u64).to_le_bytes());
    h.update(id.as_bytes());
    h.update(&(k as u64).to_le_bytes());
    h.update(&(i as u64).to_le_bytes());
    let mut xof = h.finalize_xof();
    let count = params.m_d * params.n1;
    let mut next = || loop {
        let mut buf = [0u8; 8];
        xof.read(&mut buf);
        let x = u64::from_le_bytes(buf) & mask;
        if x < q1 {
            return x;
        }
    };
    let mut draw = || ZqMatrix::from_signed(params.m_d, params.n1, &(0..count).map(|_| next() as i64).collect::<Vec<_>>(), q1);
    let b = draw();
    let b_check = draw();
    (b, b_check)
}

/// Static-accumulator leaves b′_1..b′_k for an AP, zero padded to node length.
pub fn tag_base_leaves(pp: &PublicParams, id: &str, k: usize) -> Result<Vec<Vec<u64>>> {
    (1..=k)
        .map(|i| {
            let (b, bc) = hash_tag_base(&pp.params, id, k, i);
            let mut leaf = tag_base_digest(&pp.e1, &b, &bc, pp.params.iota)?;
            leaf.resize(pp.merkle.node_len(), 0);
            Ok(leaf)
        })
        .collect()
}

/// Only the preset name and seed are stored; everything else is rederived.
impl Encode for PublicParams {
    fn encode(&self, w: &mut Writer) {
        w.str(&self.params.name);
        w.u64(self.seed);
    }
}

impl Decode for PublicParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let name = r.str()?;
        let seed = r.u64()?;
        PublicParams::preset(&name, seed)
    }
}

/// Redraws allowed when the GM already lists the user's public key.
const REKEY_ATTEMPTS: usize = 64;

/// Join: the user proves knowledge of s, the GM signs and records. A fresh
/// user whose key collides with a listed one draws a new key and retries.
pub fn join<R: Rng + ?Sized>(pp: &PublicParams, gm: &mut GroupManager, user: &mut UserState, rng: &mut R) -> Result<()> {
    for _ in 0..REKEY_ATTEMPTS {
        if gm.find_id(&user.id).is_none() && gm.find_y(&user.y).is_some() {
            user.rekey(pp, rng)?;
            continue;
        }
        let req = user.join_request(pp)?;
        let cred = gm.issue(pp, &req, rng)?;
        return user.accept_credential(pp, &gm.pk, cred);
    }
    Err(Error::DuplicateKey)
}

pub fn grant(ap: &mut ApState, user: &mut UserState) -> Result<()> {
    let w = ap.grant(user.tau()?)?;
    user.receive_grant(&ap.id, w, ap.arc.len());
    Ok(())
}

/// One honest authentication, both sides in process.
pub fn authenticate<R: Rng + ?Sized>(
    pp: &PublicParams,
    gm: &SepPublicKey,
    ap: &mut ApState,
    user: &mut UserState,
    rng: &mut R,
) -> Result<AuthOutcome> {
    let ch = ap.challenge(pp.params.p(), rng);
    let visit = user.visits(&ap.id) + 1;
    let req = user.authenticate(pp, gm, &ap.public(), &ch)?;
    let mut outcome = ap.verify_request(pp, gm, &ch, &req)?;
    if outcome == AuthOutcome::DuplicateTag {
        outcome = answer_rechallenge(pp, gm, ap, user, &req.t, visit, rng)?.unwrap_or(outcome);
    }
    if outcome == AuthOutcome::Accepted {
        user.confirm(&ap.id);
    }
    Ok(outcome)
}

/// Adversarial: authenticate again at visit index k regardless of the counter.
pub fn over_authenticate<R: Rng + ?Sized>(
    pp: &PublicParams,
    gm: &SepPublicKey,
    ap: &mut ApState,
    user: &mut UserState,
    rng: &mut R,
) -> Result<AuthOutcome> {
    let ch = ap.challenge(pp.params.p(), rng);
    let req = user.authenticate_at(pp, gm, &ap.public(), &ch, ap.k, false)?;
    let outcome = ap.verify_request(pp, gm, &ch, &req)?;
    Ok(answer_rechallenge(pp, gm, ap, user, &req.t, ap.k, rng)?.unwrap_or(outcome))
}

/// Run the AP's second challenge for an untraceable duplicate, if it asks.
fn answer_rechallenge<R: Rng + ?Sized>(
    pp: &PublicParams,
    gm: &SepPublicKey,
    ap: &mut ApState,
    user: &mut UserState,
    t: &[u64],
    visit: usize,
    rng: &mut R,
) -> Result<Option<AuthOutcome>> {
    let Some(ch) = ap.rechallenge(pp.params.p(), t, rng) else { return Ok(None) };
    let req = user.authenticate_at(pp, gm, &ap.public(), &ch, visit, false)?;
    ap.verify_request(pp, gm, &ch, &req).map(Some)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn hex_u64s(v: &[u64]) -> String {
    v.iter().map(|x| format!("{x:x}")).collect::<Vec<_>>().join(".")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn join_grant_authenticate_trace() {
        let pp = PublicParams::preset("toy-27", 1).unwrap();
        let mut rng = derive(1, "flow");
        let mut gm = GroupManager::setup(&pp, &mut rng);
        let mut ap = ApState::setup(&pp, "ap", 2, &mut rng).unwrap();
        let mut alice = UserState::setup(&pp, "alice", &mut rng).unwrap();
        let mut bob = UserState::setup(&pp, "bob", &mut rng).unwrap();
        join(&pp, &mut gm, &mut alice, &mut rng).unwrap();
        join(&pp, &mut gm, &mut bob, &mut rng).unwrap();
        grant(&mut ap, &mut alice).unwrap();
        grant(&mut ap, &mut bob).unwrap();
        for _ in 0..2 {
            assert_eq!(authenticate(&pp, &gm.pk, &mut ap, &mut alice, &mut rng).unwrap(), AuthOutcome::Accepted);
            assert_eq!(authenticate(&pp, &gm.pk, &mut ap, &mut bob, &mut rng).unwrap(), AuthOutcome::Accepted);
        }
        assert!(matches!(authenticate(&pp, &gm.pk, &mut ap, &mut bob, &mut rng), Err(Error::LimitReached)));
        assert!(public_tracing(pp.params.p(), &gm.list, &ap.log).is_empty());
        assert_eq!(over_authenticate(&pp, &gm.pk, &mut ap, &mut bob, &mut rng).unwrap(), AuthOutcome::DuplicateTag);
        let traced = public_tracing(pp.params.p(), &gm.list, &ap.log);
        assert_eq!(traced.into_iter().collect::<Vec<_>>(), vec![Traced::User("bob".into())]);
        assert_eq!(ap.replay(&pp, &gm.pk).iter().map(|v| v.1).collect::<Vec<_>>(), ap.log.iter().map(|r| r.accepted).collect::<Vec<_>>());
    }
}
