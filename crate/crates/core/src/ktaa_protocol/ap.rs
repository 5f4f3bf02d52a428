use std::collections::BTreeSet;

use rand::Rng;

use crate::acc_dynamic::{
    dacc_accumulate, dacc_keygen, dacc_update_acc, dacc_witgen, DynAccKeys, DynAccPublicKey, DynAccState, DynWitness, Update,
    UpdateState,
};
use crate::acc_static::MerkleAccumulator;
use crate::error::{Error, Result};
use crate::lattice_core::{Decode, Encode, Reader, Writer, ZqVector};
use crate::proof_backend::{verify, Proof};
use crate::sep_sign::SepPublicKey;
use crate::zk_relations::{compile_auth, AuthPublic, Conjoined};

use super::{hex, hex_u64s, tag_base_leaves, PublicParams};

/// One archived accumulator update and the value it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcEntry {
    pub update: UpdateState,
    pub u: ZqVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Challenge {
    pub c: u64,
    pub msg: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthRequest {
    pub t: Vec<u64>,
    pub t_check: Vec<u64>,
    pub proof: Proof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthRecord {
    pub t: Vec<u64>,
    pub t_check: Vec<u64>,
    pub c: u64,
    pub msg: Vec<u8>,
    pub proof: Proof,
    /// ARC length when the record was checked; fixes the accumulator value.
    pub epoch: usize,
    pub valid: bool,
    pub accepted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuthOutcome {
    Accepted,
    InvalidProof,
    /// Proof valid but t already seen: the visit limit was exceeded.
    DuplicateTag,
}

#[derive(Clone, Debug)]
pub struct ApState {
    pub id: String,
    pub k: usize,
    pub keys: DynAccKeys,
    pub acc: DynAccState,
    pub u0: ZqVector,
    pub arc: Vec<ArcEntry>,
    pub log: Vec<AuthRecord>,
    /// b′_1..b′_k padded to node length, and their Merkle tree.
    pub leaves: Vec<Vec<u64>>,
    pub tree: MerkleAccumulator,
    /// Challenges not yet issued in the current round.
    challenge_pool: Vec<u64>,
}

/// What a user may read from an AP.
#[derive(Clone, Copy, Debug)]
pub struct ApPublic<'a> {
    pub id: &'a str,
    pub k: usize,
    pub dacc: &'a DynAccPublicKey,
    pub u: &'a ZqVector,
    pub arc: &'a [ArcEntry],
}

/// The public half of one authentication statement.
#[allow(clippy::too_many_arguments)]
pub(crate) fn auth_public<'a>(
    pp: &'a PublicParams,
    gm: &'a SepPublicKey,
    tree: &'a MerkleAccumulator,
    dacc: &'a DynAccPublicKey,
    u: &'a ZqVector,
    t: &'a [u64],
    t_check: &'a [u64],
    c: u64,
) -> AuthPublic<'a> {
    AuthPublic {
        params: &pp.params,
        a_prf: &pp.a_prf,
        f: &pp.f,
        e1: &pp.e1,
        merkle: &pp.merkle,
        root: tree.root(),
        depth: tree.depth(),
        dacc,
        u_acc: u,
        gm,
        t,
        t_check,
        c,
    }
}

impl ApState {
    pub fn setup<R: Rng + ?Sized>(pp: &PublicParams, id: &str, k: usize, rng: &mut R) -> Result<Self> {
        if k == 0 {
            return Err(Error::Protocol("k_AP must be at least 1".into()));
        }
        let leaves = tag_base_leaves(pp, id, k)?;
        let tree = MerkleAccumulator::build(&pp.merkle, &leaves)?;
        let keys = dacc_keygen(&pp.params, rng)?;
        let acc = dacc_accumulate(&keys, &BTreeSet::new(), rng)?;
        Ok(ApState {
            id: id.to_string(),
            k,
            u0: acc.u.clone(),
            keys,
            acc,
            arc: Vec::new(),
            log: Vec::new(),
            leaves,
            tree,
            challenge_pool: Vec::new(),
        })
    }

    pub fn public(&self) -> ApPublic<'_> {
        ApPublic { id: &self.id, k: self.k, dacc: &self.keys.pk, u: &self.acc.u, arc: &self.arc }
    }

    pub fn u_at(&self, epoch: usize) -> Result<&ZqVector> {
        match epoch {
            0 => Ok(&self.u0),
            e => self.arc.get(e - 1).map(|a| &a.u).ok_or(Error::IndexOutOfRange(e)),
        }
    }

    /// Add τ to the access group; returns its witness, valid from the
    /// current ARC length on.
    pub fn grant(&mut self, tau: u64) -> Result<DynWitness> {
        let j = tau as usize;
        let update = dacc_update_acc(&self.keys, &mut self.acc, j, Update::Add)?;
        self.arc.push(ArcEntry { update, u: self.acc.u.clone() });
        dacc_witgen(&self.keys, &self.acc, j)
    }

    pub fn revoke(&mut self, tau: u64) -> Result<()> {
        let update = dacc_update_acc(&self.keys, &mut self.acc, tau as usize, Update::Remove)?;
        self.arc.push(ArcEntry { update, u: self.acc.u.clone() });
        Ok(())
    }

    /// Draw (c, 𝔪). Values of c are not repeated until all of Z_p has been
    /// used, so a reused tag always meets a different challenge.
    pub fn challenge<R: Rng + ?Sized>(&mut self, p: u64, rng: &mut R) -> Challenge {
        if self.challenge_pool.is_empty() {
            self.challenge_pool = (0..p).collect();
        }
        let i = rng.gen_range(0..self.challenge_pool.len());
        let c = self.challenge_pool.swap_remove(i);
        let mut msg = vec![0u8; 32];
        rng.fill(&mut msg[..]);
        Challenge { c, msg }
    }

    /// A tag seen again under the only challenge value it was ever answered
    /// with cannot be traced, since tracing divides by c_i − c_j. The AP then
    /// asks once more with a c outside the values already used for that tag.
    pub fn rechallenge<R: Rng + ?Sized>(&self, p: u64, t: &[u64], rng: &mut R) -> Option<Challenge> {
        let seen: Vec<u64> = self.log.iter().filter(|r| r.valid && r.t == t).map(|r| r.c % p).collect();
        let used: BTreeSet<u64> = seen.iter().copied().collect();
        if seen.len() < 2 || used.len() != 1 {
            return None;
        }
        let free: Vec<u64> = (0..p).filter(|c| !used.contains(c)).collect();
        let c = free[rng.gen_range(0..free.len())];
        let mut msg = vec![0u8; 32];
        rng.fill(&mut msg[..]);
        Some(Challenge { c, msg })
    }

    fn statement(&self, pp: &PublicParams, gm: &SepPublicKey, epoch: usize, t: &[u64], t_check: &[u64], c: u64) -> Result<Conjoined> {
        compile_auth(&auth_public(pp, gm, &self.tree, &self.keys.pk, self.u_at(epoch)?, t, t_check, c))
    }

    /// Verify, log, then check freshness of t against earlier valid records.
    pub fn verify_request(&mut self, pp: &PublicParams, gm: &SepPublicKey, ch: &Challenge, req: &AuthRequest) -> Result<AuthOutcome> {
        let epoch = self.arc.len();
        let valid = match self.statement(pp, gm, epoch, &req.t, &req.t_check, ch.c) {
            Ok(conj) => verify(&conj.inst, &req.proof, &ch.msg),
            Err(_) => false,
        };
        let seen = self.log.iter().any(|r| r.valid && r.t == req.t);
        let outcome = match (valid, seen) {
            (false, _) => AuthOutcome::InvalidProof,
            (true, true) => AuthOutcome::DuplicateTag,
            (true, false) => AuthOutcome::Accepted,
        };
        self.log.push(AuthRecord {
            t: req.t.clone(),
            t_check: req.t_check.clone(),
            c: ch.c,
            msg: ch.msg.clone(),
            proof: req.proof.clone(),
            epoch,
            valid,
            accepted: outcome == AuthOutcome::Accepted,
        });
        Ok(outcome)
    }

    /// Re-verify a logged record from scratch.
    pub fn check_record(&self, pp: &PublicParams, gm: &SepPublicKey, rec: &AuthRecord) -> bool {
        self.statement(pp, gm, rec.epoch, &rec.t, &rec.t_check, rec.c)
            .is_ok_and(|conj| verify(&conj.inst, &rec.proof, &rec.msg))
    }

    /// Replay the whole log: (valid, accepted) per record.
    pub fn replay(&self, pp: &PublicParams, gm: &SepPublicKey) -> Vec<(bool, bool)> {
        let mut valid_tags: Vec<&[u64]> = Vec::new();
        self.log
            .iter()
            .map(|rec| {
                let valid = self.check_record(pp, gm, rec);
                let accepted = valid && !valid_tags.contains(&rec.t.as_slice());
                if valid {
                    valid_tags.push(&rec.t);
                }
                (valid, accepted)
            })
            .collect()
    }

    pub fn dump_log(&self) -> String {
        self.log
            .iter()
            .map(|r| {
                format!(
                    "{} {} {} {} {} {} {}\n",
                    r.epoch,
                    r.c,
                    r.valid as u8,
                    r.accepted as u8,
                    hex(&r.msg),
                    hex_u64s(&r.t),
                    hex_u64s(&r.t_check)
                )
            })
            .collect()
    }

    pub fn dump_arc(&self) -> String {
        self.arc
            .iter()
            .map(|a| {
                let op = if a.update.m_star.first().is_some_and(|&x| x > 0) { "add" } else { "remove" };
                format!("{} {} {}\n", op, a.update.j, hex_u64s(&a.u.entries))
            })
            .collect()
    }
}

impl Encode for ArcEntry {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.update);
        w.put(&self.u);
    }
}

impl Decode for ArcEntry {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(ArcEntry { update: r.get()?, u: r.get()? })
    }
}

impl Encode for Challenge {
    fn encode(&self, w: &mut Writer) {
        w.u64(self.c);
        w.bytes(&self.msg);
    }
}

impl Decode for Challenge {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Challenge { c: r.u64()?, msg: r.bytes()? })
    }
}

impl Encode for AuthRequest {
    fn encode(&self, w: &mut Writer) {
        w.u64s(&self.t);
        w.u64s(&self.t_check);
        w.put(&self.proof);
    }
}

impl Decode for AuthRequest {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(AuthRequest { t: r.u64s()?, t_check: r.u64s()?, proof: r.get()? })
    }
}

impl Encode for AuthRecord {
    fn encode(&self, w: &mut Writer) {
        w.u64s(&self.t);
        w.u64s(&self.t_check);
        w.u64(self.c);
        w.bytes(&self.msg);
        w.put(&self.proof);
        w.usize(self.epoch);
        w.bool(self.valid);
        w.bool(self.accepted);
    }
}

impl Decode for AuthRecord {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(AuthRecord {
            t: r.u64s()?,
            t_check: r.u64s()?,
            c: r.u64()?,
            msg: r.bytes()?,
            proof: r.get()?,
            epoch: r.usize()?,
            valid: r.bool()?,
            accepted: r.bool()?,
        })
    }
}

impl ApState {
    /// Serialize everything except the Merkle tree, which is rebuilt from
    /// the hash oracle on load.
    pub fn encode_with(&self, w: &mut Writer) {
        w.str(&self.id);
        w.usize(self.k);
        w.put(&self.keys);
        w.put(&self.acc);
        w.put(&self.u0);
        w.seq(&self.arc);
        w.seq(&self.log);
        w.u64s(&self.challenge_pool);
    }

    pub fn decode_with(pp: &PublicParams, r: &mut Reader<'_>) -> Result<Self> {
        let id = r.str()?;
        let k = r.usize()?;
        if k == 0 {
            return Err(Error::Decode("k_AP = 0".into()));
        }
        let keys: DynAccKeys = r.get()?;
        let acc: DynAccState = r.get()?;
        let u0 = r.get()?;
        let arc = r.seq()?;
        let log = r.seq()?;
        let challenge_pool = r.u64s()?;
        let leaves = tag_base_leaves(pp, &id, k)?;
        let tree = MerkleAccumulator::build(&pp.merkle, &leaves)?;
        Ok(ApState { id, k, keys, acc, u0, arc, log, leaves, tree, challenge_pool })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode_with(&mut w);
        w.into_bytes()
    }

    pub fn from_bytes(pp: &PublicParams, bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let ap = Self::decode_with(pp, &mut r)?;
        r.finish()?;
        Ok(ap)
    }
}
