//! The join and authentication statements, assembled from the clause
//! compilers.

use crate::acc_dynamic::{DynAccPublicKey, DynWitness};
use crate::acc_static::{MerkleParams, MerkleWitness};
use crate::error::{Error, Result};
use crate::lattice_core::{ParamSet, ZqMatrix, ZqVector};
use crate::sep_sign::{SepPublicKey, SepSignature};
use crate::wprf::{wprf_eval, WprfKey};

use super::compilers::*;
use super::conjoin::{conjoin, Conjoined};
use super::instance::RStarInstance;

/// Public half of an authentication: everything the verifier sees.
#[derive(Clone, Copy, Debug)]
pub struct AuthPublic<'a> {
    pub params: &'a ParamSet,
    /// wPRF input mapping a user key to its public y.
    pub a_prf: &'a ZqMatrix,
    pub f: &'a ZqMatrix,
    pub e1: &'a ZqMatrix,
    pub merkle: &'a MerkleParams,
    pub root: &'a [u64],
    pub depth: usize,
    pub dacc: &'a DynAccPublicKey,
    pub u_acc: &'a ZqVector,
    pub gm: &'a SepPublicKey,
    pub t: &'a [u64],
    pub t_check: &'a [u64],
    pub c: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct AuthSecret<'a> {
    pub s: &'a WprfKey,
    pub b: &'a ZqMatrix,
    pub b_check: &'a ZqMatrix,
    pub merkle_w: &'a MerkleWitness,
    pub dacc_w: &'a DynWitness,
    pub sig: &'a SepSignature,
}

/// Shared segments between clauses.
pub const AUTH_ALIASES: [(&str, &str); 9] = [
    ("wprf_y.s", "tag_t.s"),
    ("wprf_y.s", "tag_tc.s"),
    ("wprf_y.y", "pk_map.y"),
    ("wprf_y.y", "tag_eq.y"),
    ("pk_map.m", "sign.m"),
    ("tag_t.a", "tagbase.b"),
    ("tag_tc.a", "tagbase.b_check"),
    ("tag_tc.y", "tag_eq.t_prime"),
    ("tagbase.b_prime", "merkle.leaf"),
];

pub fn compile_auth(pb: &AuthPublic<'_>) -> Result<Conjoined> {
    let p = pb.params;
    let clauses = [
        ("wprf_y", compile_wprf_key_output(pb.a_prf, p)?),
        ("pk_map", compile_pk_transform(pb.f, p)?),
        ("dacc", compile_dacc_membership(pb.dacc, pb.u_acc, p)?),
        ("sign", compile_signature_knowledge(pb.gm, p)?),
        ("tag_t", compile_wprf_preimage_key(pb.t, p)?),
        ("tag_tc", compile_wprf_hidden_all(p)?),
        ("tag_eq", compile_tag_equation(pb.t_check, pb.c, p)?),
        ("tagbase", compile_tagbase_transform(pb.e1, p)?),
        ("merkle", compile_static_membership(pb.merkle, pb.root, pb.depth, p.bprime_bits())?),
    ];
    let refs: Vec<(&str, &RStarInstance)> = clauses.iter().map(|(n, i)| (*n, i)).collect();
    let mut conj = conjoin(&refs, &AUTH_ALIASES)?;
    // the accumulator block index is the signature tag
    let y = conj.inst.range("dacc.y_ind")?.start;
    let tau = conj.inst.range("sign.tau")?.start;
    let q = conj.inst.modulus;
    let mut row: Vec<(usize, u64)> = (1..pb.dacc.big_n).map(|j| (y + j * pb.dacc.l, j as u64 % q)).collect();
    row.push((tau, q - 1));
    conj.inst.add_row(row, 0);
    Ok(conj)
}

pub fn witness_auth(pb: &AuthPublic<'_>, conj: &Conjoined, sk: &AuthSecret<'_>) -> Result<Vec<u64>> {
    let p = pb.params;
    let y = wprf_eval(sk.s, pb.a_prf, p.p())?.y;
    let m = pk_message(pb.f, &y)?;
    let t_prime = wprf_eval(sk.s, sk.b_check, p.p())?.y;
    let mut leaf = tag_base_digest(pb.e1, sk.b, sk.b_check, p.iota)?;
    leaf.resize(pb.merkle.node_len(), 0);
    let tau = usize::try_from(sk.sig.tau).map_err(|_| Error::InvalidWitness)?;
    let parts = vec![
        witness_wprf_key_output(p, sk.s, pb.a_prf)?,
        witness_pk_transform(pb.f, &y)?,
        witness_dacc_membership(p, pb.dacc, tau, sk.dacc_w)?,
        witness_signature_knowledge(p, &m, sk.sig)?,
        witness_wprf_preimage_key(p, sk.s, sk.b)?,
        witness_wprf_hidden_all(p, sk.s, sk.b_check)?,
        witness_tag_equation(&t_prime, &y),
        witness_tagbase_transform(p, pb.e1, sk.b, sk.b_check)?,
        witness_static_membership(pb.merkle, &leaf, sk.merkle_w)?,
    ];
    conj.assemble(&parts)
}

/// Knowledge of s with y = ⌊A·s⌉_p for a public A and y.
pub fn compile_join(a_pub: &ZqMatrix, y: &[u64], params: &ParamSet) -> Result<RStarInstance> {
    if y.len() != params.m_d || a_pub.rows != params.m_d || a_pub.cols != params.n1 {
        return Err(Error::Dimension("join statement shape".into()));
    }
    let (n1, md, q1) = (params.n1, params.m_d, params.q1());
    let mut b = wprf_hidden_input(params, Some(y));
    // the hidden input is pinned to A, stored column by column after s
    for j in 0..n1 {
        for i in 0..md {
            b.row(vec![(n1 + j * md + i, 1)], a_pub.get(i, j) % q1);
        }
    }
    b.finish().lift(params.q())
}

pub fn witness_join(params: &ParamSet, s: &WprfKey, a_pub: &ZqMatrix) -> Result<Vec<u64>> {
    witness_wprf_preimage_key(params, s, a_pub)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::acc_dynamic::{dacc_accumulate, dacc_keygen, dacc_witgen};
    use crate::acc_static::{macc_setup, MerkleAccumulator};
    use crate::rng::derive;
    use crate::sep_sign::{sep_keygen, sep_sign};
    use crate::wprf::wprf_keygen;
    use crate::zk_relations::instance::check_instance;
    use crate::zk_relations::sizes::{clause_sizes, clause_totals};

    struct World {
        params: ParamSet,
        a_prf: ZqMatrix,
        f: ZqMatrix,
        e1: ZqMatrix,
        merkle: MerkleParams,
        tree: MerkleAccumulator,
        dacc: crate::acc_dynamic::DynAccKeys,
        u_acc: ZqVector,
        gm: SepPublicKey,
        t: Vec<u64>,
        t_check: Vec<u64>,
        c: u64,
        s: WprfKey,
        b: ZqMatrix,
        b_check: ZqMatrix,
        dacc_w: DynWitness,
        sig: SepSignature,
    }

    fn world(params: ParamSet, seed: u64) -> World {
        let mut rng = derive(seed, "statement-test");
        let p = &params;
        let (q, q1, pp) = (p.q(), p.q1(), p.p());
        let a_prf = ZqMatrix::random(p.m_d, p.n1, q1, &mut rng);
        let f = ZqMatrix::random(p.n_prime(), p.m_d * p.k_p(), pp, &mut rng);
        let e1 = ZqMatrix::random(p.n_e1, p.m_d * p.n1 * p.k_vdec(), q1, &mut rng);
        let merkle = macc_setup(p, &mut rng);
        let d = ZqMatrix::random(p.n, p.m3, q, &mut rng);
        let (gm, gm_sk) = sep_keygen(p, &d, &mut rng);
        let s = wprf_keygen(p, &mut rng);
        let y = wprf_eval(&s, &a_prf, pp).unwrap().y;
        let m = pk_message(&f, &y).unwrap();
        let tau = p.usable_tags()[1];
        let sig = sep_sign(p, &gm_sk, &gm, &m, Some(tau), &mut rng).unwrap();
        let dacc = dacc_keygen(p, &mut rng).unwrap();
        let members: BTreeSet<usize> = [1, tau as usize, 5].into_iter().collect();
        let state = dacc_accumulate(&dacc, &members, &mut rng).unwrap();
        let dacc_w = dacc_witgen(&dacc, &state, tau as usize).unwrap();
        let b = ZqMatrix::random(p.m_d, p.n1, q1, &mut rng);
        let b_check = ZqMatrix::random(p.m_d, p.n1, q1, &mut rng);
        let mut leaf = tag_base_digest(&e1, &b, &b_check, p.iota).unwrap();
        leaf.resize(merkle.node_len(), 0);
        let mut leaves: Vec<Vec<u64>> =
            (0..2).map(|_| (0..merkle.node_len()).map(|_| rand::Rng::gen_range(&mut rng, 0..2)).collect()).collect();
        leaves.insert(1, leaf);
        let tree = MerkleAccumulator::build(&merkle, &leaves).unwrap();
        let t = wprf_eval(&s, &b, pp).unwrap().y;
        let c = 2;
        let t_prime = wprf_eval(&s, &b_check, pp).unwrap().y;
        let t_check = t_prime.iter().zip(&y).map(|(a, b)| (a + c * b) % pp).collect();
        World {
            params, a_prf, f, e1, merkle, tree, u_acc: state.u, dacc, gm, t, t_check, c, s, b, b_check, dacc_w, sig,
        }
    }

    impl World {
        fn public(&self) -> AuthPublic<'_> {
            AuthPublic {
                params: &self.params,
                a_prf: &self.a_prf,
                f: &self.f,
                e1: &self.e1,
                merkle: &self.merkle,
                root: self.tree.root(),
                depth: self.tree.depth(),
                dacc: &self.dacc.pk,
                u_acc: &self.u_acc,
                gm: &self.gm,
                t: &self.t,
                t_check: &self.t_check,
                c: self.c,
            }
        }
    }

    fn honest(w: &World) -> (Conjoined, Vec<u64>) {
        let mw = w.tree.witness_at(1).unwrap();
        let sk = AuthSecret {
            s: &w.s,
            b: &w.b,
            b_check: &w.b_check,
            merkle_w: &mw,
            dacc_w: &w.dacc_w,
            sig: &w.sig,
        };
        let conj = compile_auth(&w.public()).unwrap();
        let x = witness_auth(&w.public(), &conj, &sk).unwrap();
        (conj, x)
    }

    #[test]
    fn honest_witness_satisfies_every_clause_and_the_whole() {
        for (params, seed) in [(ParamSet::toy_27(), 1), (ParamSet::toy_125(), 2)] {
            let w = world(params, seed);
            let (conj, x) = honest(&w);
            assert_eq!(conj.inst.first_violation(&x).unwrap(), None, "{}", w.params.name);
        }
    }

    #[test]
    fn sizes_match_closed_forms() {
        for (params, seed) in [(ParamSet::toy_27(), 3), (ParamSet::toy_125(), 4)] {
            let w = world(params, seed);
            let (conj, _) = honest(&w);
            let depth = w.tree.depth();
            let closed = clause_sizes(&w.params, depth);
            for (name, map) in conj.clauses.iter().zip(&conj.maps) {
                let c = closed.iter().find(|c| c.clause == name).unwrap();
                assert_eq!(map.len(), c.witness, "{name} witness");
            }
            let (wsum, msum) = clause_totals(&w.params, depth);
            assert_eq!(conj.unmerged_sizes(), (wsum, msum));
            assert_eq!(conj.inst.witness_len(), wsum - conj.alias_dedup);
            assert_eq!(conj.inst.m_size(), msum - conj.triple_dedup);
        }
    }

    #[test]
    fn tampered_witness_or_statement_fails() {
        let w = world(ParamSet::toy_27(), 5);
        let (conj, x) = honest(&w);
        let q = conj.inst.modulus;
        for seg in ["wprf_y.s", "sign.tau", "dacc.y_ind", "merkle.leaf", "tagbase.vdec", "tag_eq.t_prime"] {
            let r = conj.inst.range(seg).unwrap();
            let mut bad = x.clone();
            bad[r.start] = (bad[r.start] + 1) % q;
            assert!(!check_instance(&conj.inst, &bad).unwrap(), "{seg}");
        }
        // a different public tag must not verify with the same witness
        let mut other = world(ParamSet::toy_27(), 5);
        other.t[0] = (other.t[0] + 1) % other.params.p();
        let conj2 = compile_auth(&other.public()).unwrap();
        assert!(!check_instance(&conj2.inst, &x).unwrap());
    }

    #[test]
    fn join_statement() {
        let w = world(ParamSet::toy_27(), 6);
        let y = wprf_eval(&w.s, &w.a_prf, w.params.p()).unwrap().y;
        let inst = compile_join(&w.a_prf, &y, &w.params).unwrap();
        let x = witness_join(&w.params, &w.s, &w.a_prf).unwrap();
        assert!(check_instance(&inst, &x).unwrap());
        let other = ZqMatrix::random(w.params.m_d, w.params.n1, w.params.q1(), &mut derive(9, "x"));
        let x2 = witness_join(&w.params, &w.s, &other).unwrap();
        assert!(!check_instance(&inst, &x2).unwrap());
    }
}
