use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::{Decode, Encode, Reader, Writer};
use crate::proof_backend::{verify, Proof};
use crate::sep_sign::{sep_keygen, sep_sign, sep_verify, SepPublicKey, SepSecretKey, SepSignature};
use crate::zk_relations::compilers::pk_message;
use crate::zk_relations::compile_join;

use super::{hex_u64s, PublicParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListEntry {
    pub id: String,
    pub y: Vec<u64>,
    pub tau: u64,
}

/// Membership credential: the signature (τ, v) on m = bin(F·bin(y)).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Credential {
    pub sig: SepSignature,
    pub m: Vec<u64>,
    pub y: Vec<u64>,
}

impl Credential {
    pub fn tau(&self) -> u64 {
        self.sig.tau
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinRequest {
    pub id: String,
    pub y: Vec<u64>,
    pub proof: Proof,
}

pub(crate) fn join_message(id: &str, y: &[u64]) -> Vec<u8> {
    let mut w = Writer::new();
    w.str("ktaa-join-v1");
    w.str(id);
    w.u64s(y);
    w.into_bytes()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupManager {
    pub pk: SepPublicKey,
    sk: SepSecretKey,
    pub list: Vec<ListEntry>,
    /// Tags not yet handed out; each member gets a distinct one.
    free_tags: Vec<u64>,
}

impl GroupManager {
    pub fn setup<R: Rng + ?Sized>(pp: &PublicParams, rng: &mut R) -> Self {
        let (pk, sk) = sep_keygen(&pp.params, &pp.d, rng);
        GroupManager { pk, sk, list: Vec::new(), free_tags: pp.params.usable_tags() }
    }

    pub fn find_y(&self, y: &[u64]) -> Option<&ListEntry> {
        self.list.iter().find(|e| e.y == y)
    }

    pub fn find_id(&self, id: &str) -> Option<&ListEntry> {
        self.list.iter().find(|e| e.id == id)
    }

    pub fn tags_left(&self) -> usize {
        self.free_tags.len()
    }

    fn draw_tag<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<u64> {
        if self.free_tags.is_empty() {
            return Err(Error::TagSpaceExhausted);
        }
        let i = rng.gen_range(0..self.free_tags.len());
        Ok(self.free_tags.swap_remove(i))
    }

    fn sign<R: Rng + ?Sized>(&mut self, pp: &PublicParams, y: &[u64], rng: &mut R) -> Result<Credential> {
        let m = pk_message(&pp.f, y)?;
        let tau = self.draw_tag(rng)?;
        let sig = sep_sign(&pp.params, &self.sk, &self.pk, &m, Some(tau), rng)?;
        Ok(Credential { sig, m, y: y.to_vec() })
    }

    /// Check the join proof, sign, and record (id, y, τ).
    pub fn issue<R: Rng + ?Sized>(&mut self, pp: &PublicParams, req: &JoinRequest, rng: &mut R) -> Result<Credential> {
        if self.find_y(&req.y).is_some() || self.find_id(&req.id).is_some() {
            return Err(Error::DuplicateKey);
        }
        let inst = compile_join(&pp.a_prf, &req.y, &pp.params)?;
        if !verify(&inst, &req.proof, &join_message(&req.id, &req.y)) {
            return Err(Error::ProofRejected);
        }
        let cred = self.sign(pp, &req.y, rng)?;
        self.list.push(ListEntry { id: req.id.clone(), y: req.y.clone(), tau: cred.tau() });
        Ok(cred)
    }

    /// Adversarial harness: a credential whose key never enters LIST.
    pub fn issue_off_list<R: Rng + ?Sized>(&mut self, pp: &PublicParams, y: &[u64], rng: &mut R) -> Result<Credential> {
        self.sign(pp, y, rng)
    }

    pub fn verify_credential(&self, pp: &PublicParams, cred: &Credential) -> bool {
        pk_message(&pp.f, &cred.y).is_ok_and(|m| m == cred.m) && sep_verify(&pp.params, &self.pk, &cred.m, &cred.sig)
    }

    pub fn dump_list(&self) -> String {
        self.list.iter().map(|e| format!("{} {} {}\n", e.id, e.tau, hex_u64s(&e.y))).collect()
    }
}

impl Encode for ListEntry {
    fn encode(&self, w: &mut Writer) {
        w.str(&self.id);
        w.u64s(&self.y);
        w.u64(self.tau);
    }
}

impl Decode for ListEntry {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(ListEntry { id: r.str()?, y: r.u64s()?, tau: r.u64()? })
    }
}

impl Encode for Credential {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.sig);
        w.u64s(&self.m);
        w.u64s(&self.y);
    }
}

impl Decode for Credential {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Credential { sig: r.get()?, m: r.u64s()?, y: r.u64s()? })
    }
}

impl Encode for JoinRequest {
    fn encode(&self, w: &mut Writer) {
        w.str(&self.id);
        w.u64s(&self.y);
        w.put(&self.proof);
    }
}

impl Decode for JoinRequest {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(JoinRequest { id: r.str()?, y: r.u64s()?, proof: r.get()? })
    }
}

impl Encode for GroupManager {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.pk);
        w.put(&self.sk);
        w.seq(&self.list);
        w.u64s(&self.free_tags);
    }
}

impl Decode for GroupManager {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(GroupManager { pk: r.get()?, sk: r.get()?, list: r.seq()?, free_tags: r.u64s()? })
    }
}
