//! Rounding, decompositions, gadgets and norms.

use crate::error::{Error, Result};

use super::arith::{center, ZqMatrix, ZqVector};

/// Number of bits of `x` (0 for 0). For a range [0, B] this is ⌊log B⌋ + 1.
#[inline]
pub fn bit_len(x: u64) -> u32 {
    64 - x.leading_zeros()
}

/// ⌈log2 x⌉ for x ≥ 1.
#[inline]
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1);
    bit_len(x - 1)
}

/// Bits per entry used by `bin` for residues mod `m`: enough to hold m − 1.
#[inline]
pub fn bin_width(m: u64) -> usize {
    bit_len(m - 1) as usize
}

/// ⌊p_dst · x / q_src⌋ in exact integer arithmetic.
pub fn round_to(x: u64, q_src: u64, p_dst: u64) -> Result<u64> {
    if p_dst > q_src {
        return Err(Error::ModulusMismatch(format!("cannot round mod {q_src} down to {p_dst}")));
    }
    Ok(((x as u128 % q_src as u128) * p_dst as u128 / q_src as u128) as u64)
}

pub fn round_vec(v: &ZqVector, p_dst: u64) -> Result<ZqVector> {
    let entries = v.entries.iter().map(|&x| round_to(x, v.modulus, p_dst)).collect::<Result<Vec<_>>>()?;
    Ok(ZqVector { modulus: p_dst, entries })
}

/// Per-entry little-endian binary expansion.
pub fn bin(v: &ZqVector) -> Vec<u64> {
    let w = bin_width(v.modulus);
    let mut out = Vec::with_capacity(v.dim() * w);
    for &e in &v.entries {
        for b in 0..w {
            out.push((e >> b) & 1);
        }
    }
    out
}

/// Inverse of `bin`: apply I_n ⊗ (1, 2, …, 2^{w−1}) and reduce.
pub fn bin_recompose(bits: &[u64], modulus: u64) -> Result<ZqVector> {
    let w = bin_width(modulus);
    if bits.len() % w != 0 {
        return Err(Error::Dimension(format!("{} bits is not a multiple of {w}", bits.len())));
    }
    let entries = bits
        .chunks(w)
        .map(|c| c.iter().enumerate().fold(0u128, |acc, (i, &b)| acc + ((b as u128) << i)))
        .map(|x| (x % modulus as u128) as u64)
        .collect();
    Ok(ZqVector { modulus, entries })
}

/// Powers-of-two gadget row (1, 2, …, 2^{w−1}) reduced mod `modulus`.
pub fn powers_of_two(w: usize, modulus: u64) -> Vec<u64> {
    (0..w).map(|i| ((1u128 << i) % modulus as u128) as u64).collect()
}

/// The block gadget I_n ⊗ g for an arbitrary row g, as a matrix mod `modulus`.
pub fn block_gadget(n: usize, g: &[u64], modulus: u64) -> ZqMatrix {
    let k = g.len();
    let mut m = ZqMatrix::zero(n, n * k, modulus);
    for i in 0..n {
        for (j, &e) in g.iter().enumerate() {
            m.set(i, i * k + j, e);
        }
    }
    m
}

/// Chunk count k′ for base-2^ι digits of residues mod `modulus`; the last
/// chunk may be narrower than ι.
pub fn vdec_chunks(modulus: u64, iota: u32) -> Result<usize> {
    let bits = bin_width(modulus) as u32;
    if iota == 0 || iota > bits {
        return Err(Error::InvalidIota { iota, bits });
    }
    Ok(bits.div_ceil(iota) as usize)
}

/// Base-2^ι decomposition, least significant chunk first.
pub fn vdec(v: &ZqVector, iota: u32) -> Result<Vec<u64>> {
    let k = vdec_chunks(v.modulus, iota)?;
    let mask = (1u64 << iota) - 1;
    let mut out = Vec::with_capacity(v.dim() * k);
    for &e in &v.entries {
        for j in 0..k {
            out.push((e >> (j as u32 * iota)) & mask);
        }
    }
    Ok(out)
}

/// Recomposition gadget (1, 2^ι, …, 2^{(k′−1)ι}) mod `modulus`.
pub fn vdec_gadget(modulus: u64, iota: u32) -> Result<Vec<u64>> {
    let k = vdec_chunks(modulus, iota)?;
    Ok((0..k).map(|j| ((1u128 << (j as u32 * iota)) % modulus as u128) as u64).collect())
}

pub fn vdec_recompose(chunks: &[u64], modulus: u64, iota: u32) -> Result<ZqVector> {
    let g = vdec_gadget(modulus, iota)?;
    if chunks.len() % g.len() != 0 {
        return Err(Error::Dimension("chunk count".into()));
    }
    let m = modulus as u128;
    let entries = chunks
        .chunks(g.len())
        .map(|c| (c.iter().zip(&g).fold(0u128, |acc, (&x, &w)| (acc + x as u128 * w as u128) % m)) as u64)
        .collect();
    Ok(ZqVector { modulus, entries })
}

/// Column-wise vectorisation.
pub fn m2v(a: &ZqMatrix) -> ZqVector {
    let mut entries = Vec::with_capacity(a.rows * a.cols);
    for c in 0..a.cols {
        for r in 0..a.rows {
            entries.push(a.get(r, c));
        }
    }
    ZqVector { modulus: a.modulus, entries }
}

/// Inverse of `m2v`.
pub fn v2m(v: &ZqVector, rows: usize, cols: usize) -> Result<ZqMatrix> {
    if v.dim() != rows * cols {
        return Err(Error::Dimension(format!("{} entries into {rows}x{cols}", v.dim())));
    }
    let mut a = ZqMatrix::zero(rows, cols, v.modulus);
    for c in 0..cols {
        for r in 0..rows {
            a.set(r, c, v.entries[c * rows + r]);
        }
    }
    Ok(a)
}

/// Decomposition gadget for the range [0, B]: entries ⌊(B + 2^{i−1}) / 2^i⌋.
pub fn lnsw_gadget(bound: u64) -> Vec<u64> {
    assert!(bound >= 1, "gadget bound must be positive");
    let len = bit_len(bound);
    (1..=len).map(|i| ((bound as u128 + (1u128 << (i - 1))) >> i) as u64).collect()
}

/// Binary ē with ⟨lnsw_gadget(B), ē⟩ = e, for e in [0, B].
pub fn lnsw_decompose(e: u64, bound: u64) -> Result<Vec<u64>> {
    if e > bound {
        return Err(Error::Dimension(format!("{e} exceeds gadget bound {bound}")));
    }
    let g = lnsw_gadget(bound);
    let mut rest = e;
    let bits = g
        .iter()
        .map(|&gi| {
            if gi <= rest {
                rest -= gi;
                1
            } else {
                0
            }
        })
        .collect();
    debug_assert_eq!(rest, 0);
    Ok(bits)
}

pub fn norm_inf_int(v: &[i64]) -> u64 {
    v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

pub fn norm_l2_int(v: &[i64]) -> f64 {
    v.iter().map(|&x| (x as f64) * (x as f64)).sum::<f64>().sqrt()
}

/// ∞-norm of the centered representatives.
pub fn norm_inf(v: &ZqVector) -> u64 {
    v.entries.iter().map(|&x| center(x, v.modulus).unsigned_abs()).max().unwrap_or(0)
}

pub fn norm_l2(v: &ZqVector) -> f64 {
    norm_l2_int(&v.centered())
}
