#![allow(dead_code)]

pub mod scenarios;

use std::collections::BTreeSet;

use ktaa::acc_dynamic::{dacc_accumulate, dacc_keygen, dacc_witgen, DynAccKeys, DynWitness};
use ktaa::acc_static::{macc_setup, MerkleAccumulator, MerkleParams, MerkleWitness};
use ktaa::lattice_core::{ParamSet, ZqMatrix, ZqVector};
use ktaa::rng::derive;
use ktaa::sep_sign::{sep_keygen, sep_sign, SepPublicKey, SepSecretKey, SepSignature};
use ktaa::wprf::{wprf_eval, wprf_keygen, WprfKey};
use ktaa::zk_relations::compilers::*;
use ktaa::zk_relations::{AuthPublic, AuthSecret, RStarInstance};
use rand::Rng;

/// Every public and secret value of one authentication, built directly from
/// the building blocks rather than through the protocol.
pub struct World {
    pub params: ParamSet,
    pub a_prf: ZqMatrix,
    pub f: ZqMatrix,
    pub e1: ZqMatrix,
    pub merkle: MerkleParams,
    pub tree: MerkleAccumulator,
    pub leaf_index: usize,
    pub leaf: Vec<u64>,
    pub mw: MerkleWitness,
    pub dacc: DynAccKeys,
    pub u_acc: ZqVector,
    pub gm: SepPublicKey,
    pub gm_sk: SepSecretKey,
    pub y: Vec<u64>,
    pub m: Vec<u64>,
    pub t: Vec<u64>,
    pub t_prime: Vec<u64>,
    pub t_check: Vec<u64>,
    pub c: u64,
    pub s: WprfKey,
    pub b: ZqMatrix,
    pub b_check: ZqMatrix,
    pub tau: usize,
    pub dacc_w: DynWitness,
    pub sig: SepSignature,
}

pub fn world(params: ParamSet, seed: u64) -> World {
    let mut rng = derive(seed, "integration-world");
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
    let tags = p.usable_tags();
    let tau = tags[rng.gen_range(0..tags.len())];
    let sig = sep_sign(p, &gm_sk, &gm, &m, Some(tau), &mut rng).unwrap();
    let dacc = dacc_keygen(p, &mut rng).unwrap();
    let mut members: BTreeSet<usize> = (1..p.big_n).filter(|_| rng.gen_bool(0.5)).collect();
    members.insert(tau as usize);
    let state = dacc_accumulate(&dacc, &members, &mut rng).unwrap();
    let dacc_w = dacc_witgen(&dacc, &state, tau as usize).unwrap();
    let b = ZqMatrix::random(p.m_d, p.n1, q1, &mut rng);
    let b_check = ZqMatrix::random(p.m_d, p.n1, q1, &mut rng);
    let mut leaf = tag_base_digest(&e1, &b, &b_check, p.iota).unwrap();
    leaf.resize(merkle.node_len(), 0);
    let count = rng.gen_range(2..6);
    let leaf_index = rng.gen_range(0..count);
    let leaves: Vec<Vec<u64>> = (0..count)
        .map(|i| if i == leaf_index { leaf.clone() } else { (0..merkle.node_len()).map(|_| rng.gen_range(0..2)).collect() })
        .collect();
    let tree = MerkleAccumulator::build(&merkle, &leaves).unwrap();
    let mw = tree.witness_at(leaf_index).unwrap();
    let t = wprf_eval(&s, &b, pp).unwrap().y;
    let c = rng.gen_range(0..pp);
    let t_prime = wprf_eval(&s, &b_check, pp).unwrap().y;
    let t_check = t_prime.iter().zip(&y).map(|(a, b)| (a + c * b) % pp).collect();
    World {
        params,
        a_prf,
        f,
        e1,
        merkle,
        tree,
        leaf_index,
        leaf,
        mw,
        u_acc: state.u,
        dacc,
        gm,
        gm_sk,
        y,
        m,
        t,
        t_prime,
        t_check,
        c,
        s,
        b,
        b_check,
        tau: tau as usize,
        dacc_w,
        sig,
    }
}

impl World {
    pub fn public(&self) -> AuthPublic<'_> {
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

    pub fn secret(&self) -> AuthSecret<'_> {
        AuthSecret {
            s: &self.s,
            b: &self.b,
            b_check: &self.b_check,
            merkle_w: &self.mw,
            dacc_w: &self.dacc_w,
            sig: &self.sig,
        }
    }
}

pub const CLAUSES: [&str; 9] = ["wprf_y", "pk_map", "dacc", "sign", "tag_t", "tag_tc", "tag_eq", "tagbase", "merkle"];

/// Compile one clause from (possibly altered) public inputs.
pub fn compile(name: &str, w: &World, pb: &Public) -> RStarInstance {
    let p = &w.params;
    match name {
        "wprf_y" => compile_wprf_key_output(&pb.a_prf, p),
        "pk_map" => compile_pk_transform(&pb.f, p),
        "dacc" => {
            let mut pk = w.dacc.pk.clone();
            pk.a = pb.dacc_a.clone();
            compile_dacc_membership(&pk, &pb.u_acc, p)
        }
        "sign" => {
            let mut pk = w.gm.clone();
            pk.u = pb.gm_u.clone();
            compile_signature_knowledge(&pk, p)
        }
        "tag_t" => compile_wprf_preimage_key(&pb.t, p),
        "tag_tc" => compile_wprf_hidden_all(p),
        "tag_eq" => compile_tag_equation(&pb.t_check, pb.c, p),
        "tagbase" => compile_tagbase_transform(&pb.e1, p),
        "merkle" => compile_static_membership(&w.merkle, &pb.root, w.tree.depth(), p.bprime_bits()),
        other => panic!("unknown clause {other}"),
    }
    .unwrap()
}

/// Honest witness of one clause.
pub fn witness(name: &str, w: &World) -> Vec<u64> {
    let p = &w.params;
    match name {
        "wprf_y" => witness_wprf_key_output(p, &w.s, &w.a_prf),
        "pk_map" => witness_pk_transform(&w.f, &w.y),
        "dacc" => witness_dacc_membership(p, &w.dacc.pk, w.tau, &w.dacc_w),
        "sign" => witness_signature_knowledge(p, &w.m, &w.sig),
        "tag_t" => witness_wprf_preimage_key(p, &w.s, &w.b),
        "tag_tc" => witness_wprf_hidden_all(p, &w.s, &w.b_check),
        "tag_eq" => Ok(witness_tag_equation(&w.t_prime, &w.y)),
        "tagbase" => witness_tagbase_transform(p, &w.e1, &w.b, &w.b_check),
        "merkle" => witness_static_membership(&w.merkle, &w.leaf, &w.mw),
        other => panic!("unknown clause {other}"),
    }
    .unwrap()
}

/// Owned copy of the public inputs so single coordinates can be altered.
#[derive(Clone)]
pub struct Public {
    pub a_prf: ZqMatrix,
    pub f: ZqMatrix,
    pub e1: ZqMatrix,
    pub dacc_a: ZqMatrix,
    pub u_acc: ZqVector,
    pub gm_u: ZqVector,
    pub t: Vec<u64>,
    pub t_check: Vec<u64>,
    pub c: u64,
    pub root: Vec<u64>,
}

impl Public {
    pub fn of(w: &World) -> Public {
        Public {
            a_prf: w.a_prf.clone(),
            f: w.f.clone(),
            e1: w.e1.clone(),
            dacc_a: w.dacc.pk.a.clone(),
            u_acc: w.u_acc.clone(),
            gm_u: w.gm.u.clone(),
            t: w.t.clone(),
            t_check: w.t_check.clone(),
            c: w.c,
            root: w.tree.root().to_vec(),
        }
    }
}

fn bump(v: &mut u64, modulus: u64, rng: &mut impl Rng) {
    *v = (*v + rng.gen_range(1..modulus)) % modulus;
}

/// Change one coordinate of the public vector that the clause's target is
/// built from. Returns false for clauses whose public inputs are matrices only.
pub fn tamper_public_vector(name: &str, w: &World, pb: &mut Public, rng: &mut impl Rng) -> bool {
    let p = &w.params;
    match name {
        "dacc" => {
            let i = rng.gen_range(0..pb.u_acc.dim());
            bump(&mut pb.u_acc.entries[i], p.q(), rng);
        }
        "sign" => {
            let i = rng.gen_range(0..pb.gm_u.dim());
            bump(&mut pb.gm_u.entries[i], p.q(), rng);
        }
        "tag_t" => {
            let i = rng.gen_range(0..pb.t.len());
            bump(&mut pb.t[i], p.p(), rng);
        }
        "tag_eq" => {
            let i = rng.gen_range(0..pb.t_check.len());
            bump(&mut pb.t_check[i], p.p(), rng);
        }
        "merkle" => {
            let i = rng.gen_range(0..pb.root.len());
            pb.root[i] ^= 1;
        }
        _ => return false,
    }
    true
}

/// Change one coordinate of an instance's public target vector.
pub fn tamper_target(inst: &mut RStarInstance, rng: &mut impl Rng) {
    let i = rng.gen_range(0..inst.target.len());
    bump(&mut inst.target[i], inst.modulus, rng);
}

/// Merkle root recomputed from scratch: each node is the bit decomposition
/// (least significant first) of A·(left ‖ right) mod q.
pub fn oracle_root(pp: &MerkleParams, leaf: &[u64], w: &MerkleWitness) -> Vec<u64> {
    let a = &pp.a;
    let q = a.modulus;
    let width = (64 - (q - 1).leading_zeros()) as usize;
    let hash = |l: &[u64], r: &[u64]| -> Vec<u64> {
        let x: Vec<u64> = l.iter().chain(r).copied().collect();
        (0..a.rows)
            .flat_map(|i| {
                let v = (0..a.cols).map(|c| a.get(i, c) as u128 * x[c] as u128).sum::<u128>() % q as u128;
                (0..width).map(move |b| (v >> b) as u64 & 1)
            })
            .collect()
    };
    let mut node = leaf.to_vec();
    for (bit, sib) in w.index_bits.iter().zip(&w.siblings).rev() {
        node = if *bit == 0 { hash(&node, sib) } else { hash(sib, &node) };
    }
    node
}

/// One random single-bit mutation of a leaf, a sibling or an index bit.
pub fn mutate_path(leaf: &mut [u64], w: &mut MerkleWitness, rng: &mut impl Rng) {
    match rng.gen_range(0..3) {
        0 => {
            let k = rng.gen_range(0..leaf.len());
            leaf[k] ^= 1;
        }
        1 => {
            let (lvl, k) = (rng.gen_range(0..w.siblings.len()), rng.gen_range(0..leaf.len()));
            w.siblings[lvl][k] ^= 1;
        }
        _ => {
            let k = rng.gen_range(0..w.index_bits.len());
            w.index_bits[k] ^= 1;
        }
    }
}
