//! Merkle-tree accumulator over the SIS hash h_A(u0, u1) = bin(A0·u0 + A1·u1 mod q).
//!
//! Nodes and leaves are n1·k-bit vectors; A_acc = [A0 | A1] is n1 × m_S with
//! m_S = 2·n1·k. Leaf sets are padded with the zero leaf to a power of two
//! (at least two leaves, so a lone leaf still hashes once).

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::{bin, ceil_log2, Decode, Encode, ParamSet, Reader, Writer, ZqMatrix, ZqVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleParams {
    pub a: ZqMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleWitness {
    /// j1..jℓ, top level first.
    pub index_bits: Vec<u8>,
    /// w1..wℓ, top level first.
    pub siblings: Vec<Vec<u64>>,
}

#[derive(Clone, Debug)]
pub struct MerkleAccumulator {
    pub pp: MerkleParams,
    pub leaves: Vec<Vec<u64>>,
    /// levels[0] = [root], levels[depth] = padded leaves
    levels: Vec<Vec<Vec<u64>>>,
}

pub fn macc_setup<R: Rng + ?Sized>(params: &ParamSet, rng: &mut R) -> MerkleParams {
    MerkleParams { a: ZqMatrix::random(params.n1, params.m_s, params.q(), rng) }
}

impl MerkleParams {
    pub fn node_len(&self) -> usize {
        self.a.cols / 2
    }

    pub fn a0(&self) -> ZqMatrix {
        self.a.columns(0, self.node_len())
    }

    pub fn a1(&self) -> ZqMatrix {
        self.a.columns(self.node_len(), self.node_len())
    }

    pub fn hash(&self, left: &[u64], right: &[u64]) -> Result<Vec<u64>> {
        let h = self.node_len();
        if left.len() != h || right.len() != h {
            return Err(Error::LeafLength { got: left.len().max(right.len()), want: h });
        }
        let mut x = left.to_vec();
        x.extend_from_slice(right);
        Ok(bin(&self.a.mul_vec(&ZqVector::new(x, self.a.modulus))?))
    }

    fn check_leaf(&self, d: &[u64]) -> Result<()> {
        if d.len() != self.node_len() || d.iter().any(|&b| b > 1) {
            return Err(Error::LeafLength { got: d.len(), want: self.node_len() });
        }
        Ok(())
    }
}

/// Tree depth for `count` leaves.
pub fn depth_for(count: usize) -> usize {
    (ceil_log2(count.max(2) as u64)) as usize
}

impl MerkleAccumulator {
    pub fn build(pp: &MerkleParams, leaves: &[Vec<u64>]) -> Result<Self> {
        leaves.iter().try_for_each(|d| pp.check_leaf(d))?;
        let depth = depth_for(leaves.len());
        let mut level: Vec<Vec<u64>> = leaves.to_vec();
        level.resize(1 << depth, vec![0; pp.node_len()]);
        let mut levels = vec![level];
        while levels.last().unwrap().len() > 1 {
            let below = levels.last().unwrap();
            let up = below.chunks(2).map(|p| pp.hash(&p[0], &p[1])).collect::<Result<Vec<_>>>()?;
            levels.push(up);
        }
        levels.reverse();
        Ok(MerkleAccumulator { pp: pp.clone(), leaves: leaves.to_vec(), levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root(&self) -> &[u64] {
        &self.levels[0][0]
    }

    pub fn witness_at(&self, index: usize) -> Result<MerkleWitness> {
        if index >= self.leaves.len() {
            return Err(Error::IndexOutOfRange(index));
        }
        let depth = self.depth();
        let mut index_bits = Vec::with_capacity(depth);
        let mut siblings = Vec::with_capacity(depth);
        for level in 1..=depth {
            let pos = index >> (depth - level);
            index_bits.push((pos & 1) as u8);
            siblings.push(self.levels[level][pos ^ 1].clone());
        }
        Ok(MerkleWitness { index_bits, siblings })
    }
}

pub fn macc_accumulate(pp: &MerkleParams, leaves: &[Vec<u64>]) -> Result<Vec<u64>> {
    Ok(MerkleAccumulator::build(pp, leaves)?.root().to_vec())
}

/// Witness for the first occurrence of `d`, or None if `d` was not accumulated.
pub fn macc_witness(pp: &MerkleParams, leaves: &[Vec<u64>], d: &[u64]) -> Result<Option<MerkleWitness>> {
    let Some(index) = leaves.iter().position(|x| x == d) else { return Ok(None) };
    Ok(Some(MerkleAccumulator::build(pp, leaves)?.witness_at(index)?))
}

pub fn macc_verify(pp: &MerkleParams, root: &[u64], d: &[u64], w: &MerkleWitness) -> bool {
    if pp.check_leaf(d).is_err() || w.index_bits.len() != w.siblings.len() || w.index_bits.is_empty() {
        return false;
    }
    let mut v = d.to_vec();
    for (j, sib) in w.index_bits.iter().zip(&w.siblings).rev() {
        let next = match j {
            0 => pp.hash(&v, sib),
            1 => pp.hash(sib, &v),
            _ => return false,
        };
        match next {
            Ok(h) => v = h,
            Err(_) => return false,
        }
    }
    v == root
}

impl Encode for MerkleParams {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.a);
    }
}

impl Decode for MerkleParams {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let a: ZqMatrix = r.get()?;
        if a.cols % 2 != 0 {
            return Err(Error::Decode("odd hash matrix width".into()));
        }
        Ok(MerkleParams { a })
    }
}

impl Encode for MerkleWitness {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.index_bits.len());
        self.index_bits.iter().for_each(|&b| w.u8(b));
        self.siblings.iter().for_each(|s| w.u64s(s));
    }
}

impl Decode for MerkleWitness {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let depth = r.usize()?;
        let index_bits = (0..depth).map(|_| r.u8()).collect::<Result<Vec<_>>>()?;
        let siblings = (0..depth).map(|_| r.u64s()).collect::<Result<Vec<_>>>()?;
        Ok(MerkleWitness { index_bits, siblings })
    }
}
