use std::collections::BTreeMap;

use rand::Rng;

use crate::acc_dynamic::{dacc_update_wit, DynWitness};
use crate::acc_static::MerkleAccumulator;
use crate::error::{Error, Result};
use crate::lattice_core::{Decode, Encode, Reader, Writer};
use crate::proof_backend::{prove, prove_unchecked};
use crate::sep_sign::{sep_verify, SepPublicKey};
use crate::zk_relations::compilers::pk_message;
use crate::wprf::{wprf_eval, wprf_keygen, WprfKey};
use crate::zk_relations::{compile_auth, compile_join, witness_auth, witness_join, AuthSecret};

use super::ap::{auth_public, ApPublic, AuthRequest, Challenge};
use super::gm::{join_message, Credential, JoinRequest};
use super::{hash_tag_base, tag_base_leaves, PublicParams};

/// Per-AP user state: visits so far, the membership witness and the ARC
/// position it is current to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserAp {
    pub visits: usize,
    pub w: DynWitness,
    pub epoch: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserState {
    pub id: String,
    pub s: WprfKey,
    pub y: Vec<u64>,
    pub credential: Option<Credential>,
    pub aps: BTreeMap<String, UserAp>,
}

impl UserState {
    pub fn setup<R: Rng + ?Sized>(pp: &PublicParams, id: &str, rng: &mut R) -> Result<Self> {
        let s = wprf_keygen(&pp.params, rng);
        let y = wprf_eval(&s, &pp.a_prf, pp.params.p())?.y;
        Ok(UserState { id: id.to_string(), s, y, credential: None, aps: BTreeMap::new() })
    }

    /// Draw a fresh key. Only meaningful before a credential is issued.
    pub fn rekey<R: Rng + ?Sized>(&mut self, pp: &PublicParams, rng: &mut R) -> Result<()> {
        if self.credential.is_some() {
            return Err(Error::Protocol(format!("user `{}` already holds a credential", self.id)));
        }
        *self = UserState::setup(pp, &self.id, rng)?;
        Ok(())
    }

    pub fn join_request(&self, pp: &PublicParams) -> Result<JoinRequest> {
        let inst = compile_join(&pp.a_prf, &self.y, &pp.params)?;
        let x = witness_join(&pp.params, &self.s, &pp.a_prf)?;
        let proof = prove(&inst, &x, &join_message(&self.id, &self.y))?;
        Ok(JoinRequest { id: self.id.clone(), y: self.y.clone(), proof })
    }

    pub fn accept_credential(&mut self, pp: &PublicParams, gm: &SepPublicKey, cred: Credential) -> Result<()> {
        if cred.y != self.y || pk_message(&pp.f, &self.y)? != cred.m || !sep_verify(&pp.params, gm, &cred.m, &cred.sig) {
            return Err(Error::Protocol("credential does not verify".into()));
        }
        self.credential = Some(cred);
        Ok(())
    }

    pub fn tau(&self) -> Result<u64> {
        self.credential.as_ref().map(|c| c.tau()).ok_or_else(|| Error::NoCredential(self.id.clone()))
    }

    /// Store the witness handed out at grant time; it already reflects the
    /// ARC up to `epoch`.
    pub fn receive_grant(&mut self, ap_id: &str, w: DynWitness, epoch: usize) {
        let visits = self.aps.get(ap_id).map_or(0, |a| a.visits);
        self.aps.insert(ap_id.to_string(), UserAp { visits, w, epoch });
    }

    /// Apply ARC entries published since the last sync. The user's own
    /// revocation cannot be applied and leaves the witness stale.
    pub fn sync(&mut self, ap: &ApPublic<'_>) -> Result<()> {
        let tau = self.tau()? as usize;
        let st = self.aps.get_mut(ap.id).ok_or_else(|| Error::NoAccess(ap.id.to_string()))?;
        for entry in ap.arc.iter().skip(st.epoch) {
            if entry.update.j != tau {
                st.w = dacc_update_wit(tau, &st.w, &entry.update)?;
            }
        }
        st.epoch = ap.arc.len();
        Ok(())
    }

    pub fn visits(&self, ap_id: &str) -> usize {
        self.aps.get(ap_id).map_or(0, |a| a.visits)
    }

    /// Honest authentication at the next visit index; refuses past k.
    pub fn authenticate(&mut self, pp: &PublicParams, gm: &SepPublicKey, ap: &ApPublic<'_>, ch: &Challenge) -> Result<AuthRequest> {
        self.sync(ap)?;
        let visits = self.visits(ap.id);
        if visits >= ap.k {
            return Err(Error::LimitReached);
        }
        self.respond(pp, gm, ap, ch, visits + 1, false)
    }

    /// Adversarial authentication: any visit index in 1..=k, and with
    /// `forge` a proof is emitted even when the witness is not valid.
    pub fn authenticate_at(
        &mut self,
        pp: &PublicParams,
        gm: &SepPublicKey,
        ap: &ApPublic<'_>,
        ch: &Challenge,
        visit: usize,
        forge: bool,
    ) -> Result<AuthRequest> {
        self.sync(ap)?;
        self.respond(pp, gm, ap, ch, visit, forge)
    }

    fn respond(&self, pp: &PublicParams, gm: &SepPublicKey, ap: &ApPublic<'_>, ch: &Challenge, visit: usize, forge: bool) -> Result<AuthRequest> {
        if visit == 0 || visit > ap.k {
            return Err(Error::IndexOutOfRange(visit));
        }
        let p = &pp.params;
        let cred = self.credential.as_ref().ok_or_else(|| Error::NoCredential(self.id.clone()))?;
        let st = self.aps.get(ap.id).ok_or_else(|| Error::NoAccess(ap.id.to_string()))?;
        let (b, b_check) = hash_tag_base(p, ap.id, ap.k, visit);
        let tree = MerkleAccumulator::build(&pp.merkle, &tag_base_leaves(pp, ap.id, ap.k)?)?;
        let merkle_w = tree.witness_at(visit - 1)?;
        let t = wprf_eval(&self.s, &b, p.p())?.y;
        let t_prime = wprf_eval(&self.s, &b_check, p.p())?.y;
        let t_check: Vec<u64> = t_prime.iter().zip(&self.y).map(|(a, y)| (a + ch.c * y) % p.p()).collect();
        let public = auth_public(pp, gm, &tree, ap.dacc, ap.u, &t, &t_check, ch.c);
        let conj = compile_auth(&public)?;
        let secret = AuthSecret { s: &self.s, b: &b, b_check: &b_check, merkle_w: &merkle_w, dacc_w: &st.w, sig: &cred.sig };
        let x = witness_auth(&public, &conj, &secret)?;
        let proof = if forge { prove_unchecked(&conj.inst, &x, &ch.msg) } else { prove(&conj.inst, &x, &ch.msg)? };
        Ok(AuthRequest { t, t_check, proof })
    }

    /// Count a visit after the AP accepted.
    pub fn confirm(&mut self, ap_id: &str) {
        if let Some(st) = self.aps.get_mut(ap_id) {
            st.visits += 1;
        }
    }
}

impl Encode for UserAp {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.visits);
        w.put(&self.w);
        w.usize(self.epoch);
    }
}

impl Decode for UserAp {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(UserAp { visits: r.usize()?, w: r.get()?, epoch: r.usize()? })
    }
}

impl Encode for UserState {
    fn encode(&self, w: &mut Writer) {
        w.str(&self.id);
        w.put(&self.s);
        w.u64s(&self.y);
        w.opt(&self.credential);
        w.usize(self.aps.len());
        for (k, v) in &self.aps {
            w.str(k);
            w.put(v);
        }
    }
}

impl Decode for UserState {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let id = r.str()?;
        let s = r.get()?;
        let y = r.u64s()?;
        let credential = r.opt()?;
        let n = r.usize()?;
        let mut aps = BTreeMap::new();
        for _ in 0..n {
            let k = r.str()?;
            aps.insert(k, r.get()?);
        }
        Ok(UserState { id, s, y, credential, aps })
    }
}
