//! Trapdoor-based dynamic accumulator over indices 0..N.
//!
//! Public key (U, A) with U = [U_0 | … | U_{N−1}], each block n × l. The
//! secret side holds the TrapGen trapdoor and derives R_i with A·R_i = U_i on
//! first use. A set X accumulates to u = U·m + A·r where m_i = 1^l for i ∈ X.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Mutex;

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::{norm_inf_int, Decode, Encode, GaussianSampler, ParamSet, Reader, Writer, ZqMatrix, ZqVector};
use crate::rng;
use crate::trapdoor::{sample_pre, trap_gen, TrapdoorPair};

#[derive(Clone, Debug, PartialEq)]
pub struct DynAccPublicKey {
    pub u: ZqMatrix,
    pub a: ZqMatrix,
    pub l: usize,
    pub big_n: usize,
    pub gamma: f64,
}

pub struct DynAccKeys {
    pub pk: DynAccPublicKey,
    pub trapdoor: TrapdoorPair,
    pub s: f64,
    block_seed: u64,
    blocks: Mutex<BTreeMap<usize, Vec<Vec<i64>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynAccState {
    pub u: ZqVector,
    pub members: BTreeSet<usize>,
    pub r: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynWitness {
    pub w: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateState {
    pub j: usize,
    pub m_star: Vec<i64>,
    pub t: Vec<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Update {
    Add,
    Remove,
}

impl Clone for DynAccKeys {
    fn clone(&self) -> Self {
        DynAccKeys {
            pk: self.pk.clone(),
            trapdoor: self.trapdoor.clone(),
            s: self.s,
            block_seed: self.block_seed,
            blocks: Mutex::new(self.blocks.lock().unwrap().clone()),
        }
    }
}

impl std::fmt::Debug for DynAccKeys {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DynAccKeys").field("pk", &self.pk).finish_non_exhaustive()
    }
}

pub fn dacc_keygen<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> Result<DynAccKeys> {
    let q = params.q();
    let trapdoor = trap_gen(params.n, params.m_a, q, rng)?;
    let u = ZqMatrix::random(params.n, params.l * params.big_n, q, rng);
    let pk = DynAccPublicKey {
        u,
        a: trapdoor.a.clone(),
        l: params.l,
        big_n: params.big_n,
        gamma: params.gamma_acc(),
    };
    Ok(DynAccKeys { pk, trapdoor, s: params.s, block_seed: rng.gen(), blocks: Mutex::new(BTreeMap::new()) })
}

impl DynAccPublicKey {
    pub fn m(&self) -> usize {
        self.a.cols
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.big_n {
            return Err(Error::IndexOutOfRange(i));
        }
        Ok(())
    }

    /// U·ϑ_j: the sum of block j's columns.
    pub fn block_sum(&self, j: usize) -> ZqVector {
        let q = self.u.modulus;
        let mut acc = ZqVector::zero(self.u.rows, q);
        for c in j * self.l..(j + 1) * self.l {
            acc = acc.add(&self.u.column(c)).expect("same shape");
        }
        acc
    }

    /// Block indicator ϑ_j ∈ {0,1}^{lN}.
    pub fn indicator(&self, j: usize) -> Vec<u64> {
        let mut y = vec![0; self.l * self.big_n];
        y[j * self.l..(j + 1) * self.l].iter_mut().for_each(|b| *b = 1);
        y
    }
}

impl DynAccKeys {
    /// R_i as l columns of length m_A, derived from the block seed on first use.
    pub fn block(&self, i: usize) -> Result<Vec<Vec<i64>>> {
        self.pk.check_index(i)?;
        if let Some(b) = self.blocks.lock().unwrap().get(&i) {
            return Ok(b.clone());
        }
        let mut rng = rng::derive(self.block_seed, &format!("dacc-block-{i}"));
        let cols = (i * self.pk.l..(i + 1) * self.pk.l)
            .map(|c| sample_pre(&self.trapdoor, &self.pk.u.column(c), self.s, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        self.blocks.lock().unwrap().insert(i, cols.clone());
        Ok(cols)
    }

    /// R_i·1^l.
    fn block_sum(&self, i: usize) -> Result<Vec<i64>> {
        let cols = self.block(i)?;
        let mut out = vec![0i64; self.pk.m()];
        for c in &cols {
            out.iter_mut().zip(c).for_each(|(o, x)| *o += x);
        }
        Ok(out)
    }
}

pub fn dacc_accumulate<R: Rng + ?Sized>(keys: &DynAccKeys, members: &BTreeSet<usize>, rng: &mut R) -> Result<DynAccState> {
    let r = GaussianSampler::new(keys.s).sample_vec(rng, keys.pk.m());
    dacc_accumulate_with(keys, members, r)
}

pub fn dacc_accumulate_with(keys: &DynAccKeys, members: &BTreeSet<usize>, r: Vec<i64>) -> Result<DynAccState> {
    if r.len() != keys.pk.m() {
        return Err(Error::WitnessLength { got: r.len(), want: keys.pk.m() });
    }
    let mut u = keys.pk.a.mul_int(&r)?;
    for &i in members {
        keys.pk.check_index(i)?;
        u = u.add(&keys.pk.block_sum(i))?;
    }
    Ok(DynAccState { u, members: members.clone(), r })
}

pub fn dacc_witgen(keys: &DynAccKeys, state: &DynAccState, i: usize) -> Result<DynWitness> {
    if !state.members.contains(&i) {
        return Err(Error::NotMember(i));
    }
    let mut w = state.r.clone();
    for &j in state.members.iter().filter(|&&j| j != i) {
        w.iter_mut().zip(keys.block_sum(j)?).for_each(|(a, b)| *a += b);
    }
    Ok(DynWitness { w })
}

pub fn dacc_verify(pk: &DynAccPublicKey, u: &ZqVector, j: usize, w: &DynWitness) -> bool {
    if j >= pk.big_n || w.w.len() != pk.m() || norm_inf_int(&w.w) as f64 > pk.gamma {
        return false;
    }
    match pk.a.mul_int(&w.w).and_then(|aw| aw.add(&pk.block_sum(j))) {
        Ok(lhs) => &lhs == u,
        Err(_) => false,
    }
}

pub fn dacc_update_acc(keys: &DynAccKeys, state: &mut DynAccState, j: usize, op: Update) -> Result<UpdateState> {
    keys.pk.check_index(j)?;
    let sign = match op {
        Update::Add if state.members.contains(&j) => return Err(Error::AlreadyMember(j)),
        Update::Remove if !state.members.contains(&j) => return Err(Error::NotMember(j)),
        Update::Add => 1,
        Update::Remove => -1,
    };
    let m_star = vec![sign; keys.pk.l];
    let t: Vec<i64> = keys.block_sum(j)?.into_iter().map(|x| sign * x).collect();
    let delta = keys.pk.block_sum(j);
    state.u = if sign > 0 { state.u.add(&delta)? } else { state.u.sub(&delta)? };
    match op {
        Update::Add => state.members.insert(j),
        Update::Remove => state.members.remove(&j),
    };
    Ok(UpdateState { j, m_star, t })
}

/// w′ = w + t_j. Refuses the updated index itself.
pub fn dacc_update_wit(i: usize, w: &DynWitness, update: &UpdateState) -> Result<DynWitness> {
    if i == update.j {
        return Err(Error::Protocol(format!("index {i} cannot apply its own update")));
    }
    if w.w.len() != update.t.len() {
        return Err(Error::WitnessLength { got: w.w.len(), want: update.t.len() });
    }
    Ok(DynWitness { w: w.w.iter().zip(&update.t).map(|(a, b)| a + b).collect() })
}

impl Encode for DynAccPublicKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.u);
        w.put(&self.a);
        w.usize(self.l);
        w.usize(self.big_n);
        w.f64(self.gamma);
    }
}

impl Decode for DynAccPublicKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let pk = DynAccPublicKey { u: r.get()?, a: r.get()?, l: r.usize()?, big_n: r.usize()?, gamma: r.f64()? };
        if pk.u.cols != pk.l * pk.big_n || pk.u.rows != pk.a.rows {
            return Err(Error::Decode("accumulator key shape".into()));
        }
        Ok(pk)
    }
}

impl Encode for DynAccKeys {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.pk);
        w.put(&self.trapdoor);
        w.f64(self.s);
        w.u64(self.block_seed);
    }
}

impl Decode for DynAccKeys {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(DynAccKeys {
            pk: r.get()?,
            trapdoor: r.get()?,
            s: r.f64()?,
            block_seed: r.u64()?,
            blocks: Mutex::new(BTreeMap::new()),
        })
    }
}

impl Encode for DynAccState {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.u);
        w.usize(self.members.len());
        self.members.iter().for_each(|&i| w.usize(i));
        w.i64s(&self.r);
    }
}

impl Decode for DynAccState {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let u = r.get()?;
        let count = r.usize()?;
        let members = (0..count).map(|_| r.usize()).collect::<Result<BTreeSet<_>>>()?;
        Ok(DynAccState { u, members, r: r.i64s()? })
    }
}

impl Encode for DynWitness {
    fn encode(&self, w: &mut Writer) {
        w.i64s(&self.w);
    }
}

impl Decode for DynWitness {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(DynWitness { w: r.i64s()? })
    }
}

impl Encode for UpdateState {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.j);
        w.i64s(&self.m_star);
        w.i64s(&self.t);
    }
}

impl Decode for UpdateState {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(UpdateState { j: r.usize()?, m_star: r.i64s()?, t: r.i64s()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn keys(seed: u64) -> (ParamSet, DynAccKeys, ChaCha20Rng) {
        let p = ParamSet::toy_27();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let k = dacc_keygen(&p, &mut rng).unwrap();
        (p, k, rng)
    }

    #[test]
    fn blocks_satisfy_defining_equation() {
        let (p, k, _) = keys(1);
        for i in 0..p.big_n {
            for (c, col) in k.block(i).unwrap().iter().enumerate() {
                assert_eq!(k.pk.a.mul_int(col).unwrap(), k.pk.u.column(i * p.l + c));
            }
        }
        // lazily derived blocks do not depend on access order
        let (_, k2, _) = keys(1);
        assert_eq!(k2.block(5).unwrap(), k.block(5).unwrap());
        let k3 = DynAccKeys::from_bytes(&k.to_bytes()).unwrap();
        assert_eq!(k3.block(2).unwrap(), k.block(2).unwrap());
    }

    #[test]
    fn direct_equation_for_one_member() {
        let (p, k, mut rng) = keys(2);
        let st = dacc_accumulate(&k, &BTreeSet::from([3]), &mut rng).unwrap();
        let diff = st.u.sub(&k.pk.a.mul_int(&st.r).unwrap()).unwrap();
        let ones = vec![1i64; p.l];
        let u3 = k.pk.u.columns(3 * p.l, p.l);
        assert_eq!(diff, u3.mul_int(&ones).unwrap());
        let empty = dacc_accumulate(&k, &BTreeSet::new(), &mut rng).unwrap();
        assert_eq!(empty.u, k.pk.a.mul_int(&empty.r).unwrap());
    }

    #[test]
    fn members_verify_and_others_do_not() {
        let (p, k, mut rng) = keys(3);
        let x = BTreeSet::from([1, 4, 6]);
        let st = dacc_accumulate(&k, &x, &mut rng).unwrap();
        for &i in &x {
            let w = dacc_witgen(&k, &st, i).unwrap();
            for j in 0..p.big_n {
                assert_eq!(dacc_verify(&k.pk, &st.u, j, &w), j == i);
            }
            let mut bumped = w.clone();
            bumped.w[0] += 1;
            assert!(!dacc_verify(&k.pk, &st.u, i, &bumped));
        }
        assert_eq!(dacc_witgen(&k, &st, 2), Err(Error::NotMember(2)));
    }

    #[test]
    fn add_remove_and_witness_updates() {
        let (_, k, mut rng) = keys(4);
        let mut st = dacc_accumulate(&k, &BTreeSet::from([1]), &mut rng).unwrap();
        let start = st.u.clone();
        let w1 = dacc_witgen(&k, &st, 1).unwrap();
        let add = dacc_update_acc(&k, &mut st, 5, Update::Add).unwrap();
        assert!(dacc_update_acc(&k, &mut st, 5, Update::Add).is_err());
        let w1 = dacc_update_wit(1, &w1, &add).unwrap();
        assert!(dacc_verify(&k.pk, &st.u, 1, &w1));
        let w5 = dacc_witgen(&k, &st, 5).unwrap();
        assert!(dacc_verify(&k.pk, &st.u, 5, &w5));
        let rem = dacc_update_acc(&k, &mut st, 5, Update::Remove).unwrap();
        assert_eq!(st.u, start);
        assert!(!dacc_verify(&k.pk, &st.u, 5, &w5));
        assert!(dacc_update_wit(5, &w5, &rem).is_err());
        let w1 = dacc_update_wit(1, &w1, &rem).unwrap();
        assert!(dacc_verify(&k.pk, &st.u, 1, &w1));
        assert!(dacc_update_acc(&k, &mut st, 5, Update::Remove).is_err());
    }
}
