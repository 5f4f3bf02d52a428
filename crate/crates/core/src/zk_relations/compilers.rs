//! One compiler per proof clause, each paired with the witness builder that
//! lays out honest values in the same segment order.
//!
//! Every instance is returned at modulus q. Clauses over Z_{q1} or Z_p are
//! built at their own modulus and lifted.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::acc_dynamic::{DynAccPublicKey, DynWitness};
use crate::acc_static::{MerkleParams, MerkleWitness};
use crate::error::{Error, Result};
use crate::lattice_core::arith::{mul_mod, reduce_i64};
use crate::lattice_core::{
    bin, bit_len, block_gadget, lnsw_decompose, lnsw_gadget, m2v, powers_of_two, vdec, vdec_gadget, ParamSet,
    ZqMatrix, ZqVector,
};
use crate::sep_sign::{SepPublicKey, SepSignature};
use crate::wprf::WprfKey;

use super::instance::{Builder, RStarInstance};

fn want_len(got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::Dimension(format!("length {got}, expected {want}")));
    }
    Ok(())
}

// ---------------------------------------------------------------- wPRF

/// Honest intermediate values of y = ⌊A·s⌉_p.
#[derive(Clone, Debug)]
pub struct WprfParts {
    pub a: Vec<u64>,
    pub v: Vec<u64>,
    pub u: Vec<u64>,
    pub e_bits: Vec<u64>,
    pub y: Vec<u64>,
}

pub fn wprf_parts(params: &ParamSet, s: &WprfKey, a: &ZqMatrix) -> Result<WprfParts> {
    let (q, gamma, n1, md) = (params.q(), params.gamma(), params.n1, params.m_d);
    if a.rows != md || a.cols != n1 || a.modulus != params.q1() {
        return Err(Error::Dimension("wPRF input must be m_D × n1 over Z_q1".into()));
    }
    let u = a.mul_vec(&s.s)?.entries;
    let y: Vec<u64> = u.iter().map(|&x| x / gamma).collect();
    let mut e_bits = Vec::with_capacity(md * bit_len(gamma) as usize);
    for (&ui, &yi) in u.iter().zip(&y) {
        e_bits.extend(lnsw_decompose(ui - gamma * yi, gamma)?);
    }
    let mut v = Vec::with_capacity(md * n1);
    for i in 0..md {
        for j in 0..n1 {
            v.push(mul_mod(a.get(i, j), s.s.entries[j], q));
        }
    }
    Ok(WprfParts { a: m2v(a).entries, v, u, e_bits, y })
}

/// Segments s, a, v, u, ē (and y when hidden) with the Hadamard rows.
pub(super) fn wprf_hidden_input(params: &ParamSet, y_pub: Option<&[u64]>) -> Builder {
    let (q, q1, gamma, n1, md) = (params.q(), params.q1(), params.gamma(), params.n1, params.m_d);
    let g1 = lnsw_gadget(gamma);
    let k1 = g1.len();
    let mut b = Builder::new(q1);
    let s = b.seg("s", n1, q1);
    let a = b.seg("a", md * n1, q1);
    let v = b.seg("v", md * n1, q);
    let u = b.seg("u", md, q1);
    let e = b.seg("e_bits", md * k1, 2);
    let y = if y_pub.is_none() { Some(b.seg("y", md, params.p())) } else { None };
    for i in 0..md {
        let mut row: Vec<(usize, u64)> = (0..n1).map(|j| (v + i * n1 + j, 1)).collect();
        row.push((u + i, b.neg(1)));
        b.row(row, 0);
    }
    for i in 0..md {
        let mut row = vec![(u + i, 1)];
        row.extend((0..k1).map(|t| (e + i * k1 + t, b.neg(g1[t]))));
        match (y, y_pub) {
            (Some(y), _) => {
                row.push((y + i, b.neg(gamma)));
                b.row(row, 0);
            }
            (None, Some(yp)) => b.row(row, gamma * yp[i] % q1),
            (None, None) => unreachable!(),
        }
    }
    b.binary(e, md * k1);
    for i in 0..md {
        for j in 0..n1 {
            b.triple(v + i * n1 + j, a + j * md + i, s + j);
        }
    }
    b
}

/// Hidden key and input, public output.
pub fn compile_wprf_preimage_key(y_pub: &[u64], params: &ParamSet) -> Result<RStarInstance> {
    want_len(y_pub.len(), params.m_d)?;
    wprf_hidden_input(params, Some(y_pub)).finish().lift(params.q())
}

pub fn witness_wprf_preimage_key(params: &ParamSet, s: &WprfKey, a: &ZqMatrix) -> Result<Vec<u64>> {
    let w = wprf_parts(params, s, a)?;
    Ok([s.s.entries.clone(), w.a, w.v, w.u, w.e_bits].concat())
}

/// Key, input and output all hidden.
pub fn compile_wprf_hidden_all(params: &ParamSet) -> Result<RStarInstance> {
    wprf_hidden_input(params, None).finish().lift(params.q())
}

pub fn witness_wprf_hidden_all(params: &ParamSet, s: &WprfKey, a: &ZqMatrix) -> Result<Vec<u64>> {
    let w = wprf_parts(params, s, a)?;
    Ok([s.s.entries.clone(), w.a, w.v, w.u, w.e_bits, w.y].concat())
}

/// Public input A, hidden key and output.
pub fn compile_wprf_key_output(a_pub: &ZqMatrix, params: &ParamSet) -> Result<RStarInstance> {
    let (q1, gamma, n1, md) = (params.q1(), params.gamma(), params.n1, params.m_d);
    if a_pub.rows != md || a_pub.cols != n1 {
        return Err(Error::Dimension("wPRF input must be m_D × n1".into()));
    }
    let g1 = lnsw_gadget(gamma);
    let k1 = g1.len();
    let mut b = Builder::new(q1);
    let s = b.seg("s", n1, q1);
    let u = b.seg("u", md, q1);
    let e = b.seg("e_bits", md * k1, 2);
    let y = b.seg("y", md, params.p());
    for i in 0..md {
        let mut row: Vec<(usize, u64)> = (0..n1).map(|j| (s + j, a_pub.get(i, j) % q1)).collect();
        row.push((u + i, b.neg(1)));
        b.row(row, 0);
    }
    for i in 0..md {
        let mut row = vec![(u + i, 1), (y + i, b.neg(gamma))];
        row.extend((0..k1).map(|t| (e + i * k1 + t, b.neg(g1[t]))));
        b.row(row, 0);
    }
    b.binary(e, md * k1);
    b.finish().lift(params.q())
}

pub fn witness_wprf_key_output(params: &ParamSet, s: &WprfKey, a_pub: &ZqMatrix) -> Result<Vec<u64>> {
    let w = wprf_parts(params, s, a_pub)?;
    Ok([s.s.entries.clone(), w.u, w.e_bits, w.y].concat())
}

// ---------------------------------------------------------------- static accumulator

struct Level {
    j: usize,
    jbar: usize,
    sib: usize,
    node: usize,
    x: usize,
    y: usize,
    jx: usize,
    jy: usize,
}

/// Merkle path of `depth` levels to the public `root`. The bottom node is
/// split into `leaf` (first `leaf_len` bits) and a zero `leaf_pad`.
pub fn compile_static_membership(pp: &MerkleParams, root: &[u64], depth: usize, leaf_len: usize) -> Result<RStarInstance> {
    let q = pp.a.modulus;
    let h = pp.node_len();
    let n1 = pp.a.rows;
    let k = h / n1;
    want_len(root.len(), h)?;
    if depth == 0 || leaf_len == 0 || leaf_len > h {
        return Err(Error::Dimension("merkle depth and leaf length must be positive".into()));
    }
    let mut b = Builder::new(q);
    let mut levels = Vec::with_capacity(depth);
    for i in 0..depth {
        let j = b.seg(&format!("j{i}"), 1, 2);
        let jbar = b.seg(&format!("jbar{i}"), 1, 2);
        let sib = b.seg(&format!("sib{i}"), h, 2);
        let node = if i == 0 {
            let start = b.seg("leaf", leaf_len, 2);
            if leaf_len < h {
                b.seg("leaf_pad", h - leaf_len, 2);
            }
            start
        } else {
            b.seg(&format!("node{i}"), h, 2)
        };
        let x = b.seg(&format!("x{i}"), n1, q);
        let y = b.seg(&format!("y{i}"), n1, q);
        let jx = b.seg(&format!("jx{i}"), n1, q);
        let jy = b.seg(&format!("jy{i}"), n1, q);
        levels.push(Level { j, jbar, sib, node, x, y, jx, jy });
    }
    let pow = powers_of_two(k, q);
    for (i, lv) in levels.iter().enumerate() {
        for r in 0..n1 {
            let mut row = vec![(lv.x + r, 1)];
            for c in 0..h {
                row.push((lv.node + c, b.neg(pp.a.get(r, c))));
                row.push((lv.sib + c, b.neg(pp.a.get(r, h + c))));
            }
            b.row(row, 0);
            let mut row = vec![(lv.y + r, 1)];
            for c in 0..h {
                row.push((lv.sib + c, b.neg(pp.a.get(r, c))));
                row.push((lv.node + c, b.neg(pp.a.get(r, h + c))));
            }
            b.row(row, 0);
        }
        b.row(vec![(lv.j, 1), (lv.jbar, 1)], 1);
        for r in 0..n1 {
            let sel = |b: &Builder| vec![(lv.x + r, b.neg(1)), (lv.jy + r, b.neg(1)), (lv.jx + r, 1)];
            if let Some(up) = levels.get(i + 1) {
                let mut row = sel(&b);
                row.extend((0..k).map(|t| (up.node + r * k + t, pow[t])));
                b.row(row, 0);
            } else {
                let folded = (0..k).fold(0, |acc, t| (acc + root[r * k + t] * pow[t]) % q);
                let row = sel(&b).into_iter().map(|(c, a)| (c, b.neg(a))).collect();
                b.row(row, folded);
            }
        }
        if i == 0 {
            for c in leaf_len..h {
                b.row(vec![(lv.node + c, 1)], 0);
            }
        }
    }
    for lv in &levels {
        b.binary(lv.j, 1);
        for r in 0..n1 {
            b.triple(lv.jx + r, lv.j, lv.x + r);
            b.triple(lv.jy + r, lv.j, lv.y + r);
        }
        b.binary(lv.sib, h);
        b.binary(lv.node, h);
    }
    Ok(b.finish())
}

/// `leaf` is the full node-length bottom node (real bits then zero padding).
pub fn witness_static_membership(pp: &MerkleParams, leaf: &[u64], w: &MerkleWitness) -> Result<Vec<u64>> {
    let q = pp.a.modulus;
    let h = pp.node_len();
    want_len(leaf.len(), h)?;
    let depth = w.index_bits.len();
    let mut node = leaf.to_vec();
    let mut out = Vec::new();
    for i in 0..depth {
        let j = w.index_bits[depth - 1 - i] as u64;
        let sib = &w.siblings[depth - 1 - i];
        want_len(sib.len(), h)?;
        let x = pp.a.mul_vec(&ZqVector::new([node.clone(), sib.clone()].concat(), q))?;
        let y = pp.a.mul_vec(&ZqVector::new([sib.clone(), node.clone()].concat(), q))?;
        let jx = x.scale(j);
        let jy = y.scale(j);
        out.extend([j, 1 - j]);
        out.extend_from_slice(sib);
        out.extend_from_slice(&node);
        out.extend([&x.entries, &y.entries, &jx.entries, &jy.entries].into_iter().flatten());
        node = bin(if j == 0 { &x } else { &y });
    }
    Ok(out)
}

// ---------------------------------------------------------------- dynamic accumulator

/// u = A·w + U·y with ∥w∥∞ ≤ γ1 and y a block indicator.
pub fn compile_dacc_membership(pk: &DynAccPublicKey, u: &ZqVector, params: &ParamSet) -> Result<RStarInstance> {
    let q = params.q();
    let gamma1 = params.gamma1();
    let g = lnsw_gadget(2 * gamma1);
    let kg = g.len();
    let (n, m) = (pk.a.rows, pk.a.cols);
    let (l, big_n) = (pk.l, pk.big_n);
    want_len(u.dim(), n)?;
    let mut b = Builder::new(q);
    let w = b.seg("w_bits", m * kg, 2);
    let y = b.seg("y_ind", l * big_n, 2);
    for r in 0..n {
        let mut row = Vec::with_capacity(m * kg + l * big_n);
        let mut shift = 0u64;
        for c in 0..m {
            let a = pk.a.get(r, c);
            shift = (shift + mul_mod(a, gamma1 % q, q)) % q;
            row.extend((0..kg).map(|t| (w + c * kg + t, mul_mod(a, g[t] % q, q))));
        }
        row.extend((0..l * big_n).map(|c| (y + c, pk.u.get(r, c))));
        b.row(row, (u.entries[r] + shift) % q);
    }
    // exactly one block, and each block constant
    b.row((0..big_n).map(|j| (y + j * l, 1)).collect(), 1);
    for j in 0..big_n {
        for t in 1..l {
            b.row(vec![(y + j * l + t, 1), (y + j * l, b.neg(1))], 0);
        }
    }
    b.binary(w, m * kg + l * big_n);
    Ok(b.finish())
}

pub fn witness_dacc_membership(params: &ParamSet, pk: &DynAccPublicKey, index: usize, w: &DynWitness) -> Result<Vec<u64>> {
    let gamma1 = params.gamma1() as i64;
    want_len(w.w.len(), pk.a.cols)?;
    if index >= pk.big_n {
        return Err(Error::IndexOutOfRange(index));
    }
    let mut out = Vec::new();
    for &x in &w.w {
        if x.abs() > gamma1 {
            return Err(Error::InvalidWitness);
        }
        out.extend(lnsw_decompose((x + gamma1) as u64, 2 * gamma1 as u64)?);
    }
    out.extend(pk.indicator(index));
    Ok(out)
}

// ---------------------------------------------------------------- signature

/// A_τ·v = u + D·m with τ, v, m hidden.
pub fn compile_signature_knowledge(pk: &SepPublicKey, params: &ParamSet) -> Result<RStarInstance> {
    let q = params.q();
    let (n, m1, m2, m3) = (params.n, params.m1, params.m2, params.m3);
    let (a1, a2) = (params.alpha1(), params.alpha2());
    let (g1, g2) = (lnsw_gadget(2 * a1), lnsw_gadget(2 * a2));
    let (k1, k2) = (g1.len(), g2.len());
    let kt = params.k_qprime();
    let big_g = block_gadget(n, &powers_of_two(params.k(), q), q);
    let mut b = Builder::new(q);
    let tau = b.seg("tau", 1, q);
    let tb = b.seg("tau_bits", kt, 2);
    let v1 = b.seg("v1_bits", m1 * k1, 2);
    let v2 = b.seg("v2_bits", m2 * k2, 2);
    let m = b.seg("m", m3, 2);
    let z = b.seg("z", n, q);
    let tz = b.seg("tau_z", n, q);

    let mut row = vec![(tau, 1)];
    row.extend((0..kt).map(|t| (tb + t, b.neg(1 << t))));
    b.row(row, 0);
    // z = G·v2
    for r in 0..n {
        let mut row = vec![(z + r, 1)];
        let mut shift = 0;
        for c in 0..m2 {
            let gc = big_g.get(r, c);
            if gc == 0 {
                continue;
            }
            shift = (shift + mul_mod(gc, a2 % q, q)) % q;
            row.extend((0..k2).map(|t| (v2 + c * k2 + t, b.neg(mul_mod(gc, g2[t] % q, q)))));
        }
        b.row(row, b.neg(shift));
    }
    // A·v1 + τ·z − B·v2 − D·m = u
    for r in 0..n {
        let mut row = vec![(tz + r, 1)];
        let mut shift = pk.u.entries[r];
        for c in 0..m1 {
            let a = pk.a.get(r, c);
            shift = (shift + mul_mod(a, a1 % q, q)) % q;
            row.extend((0..k1).map(|t| (v1 + c * k1 + t, mul_mod(a, g1[t] % q, q))));
        }
        for c in 0..m2 {
            let bb = pk.b.get(r, c);
            shift = (shift + q - mul_mod(bb, a2 % q, q)) % q;
            row.extend((0..k2).map(|t| (v2 + c * k2 + t, b.neg(mul_mod(bb, g2[t] % q, q)))));
        }
        row.extend((0..m3).map(|c| (m + c, b.neg(pk.d.get(r, c)))));
        b.row(row, shift);
    }
    b.binary(tb, kt);
    b.binary(v1, m1 * k1);
    b.binary(v2, m2 * k2);
    b.binary(m, m3);
    for r in 0..n {
        b.triple(tz + r, tau, z + r);
    }
    Ok(b.finish())
}

pub fn witness_signature_knowledge(params: &ParamSet, m: &[u64], sig: &SepSignature) -> Result<Vec<u64>> {
    let q = params.q();
    let (a1, a2) = (params.alpha1() as i64, params.alpha2() as i64);
    want_len(m.len(), params.m3)?;
    want_len(sig.v1.len(), params.m1)?;
    want_len(sig.v2.len(), params.m2)?;
    let kt = params.k_qprime();
    let mut out = vec![sig.tau % q];
    out.extend((0..kt).map(|t| (sig.tau >> t) & 1));
    for (v, a) in [(&sig.v1, a1), (&sig.v2, a2)] {
        for &x in v.iter() {
            if x.abs() > a {
                return Err(Error::InvalidWitness);
            }
            out.extend(lnsw_decompose((x + a) as u64, 2 * a as u64)?);
        }
    }
    out.extend_from_slice(m);
    let big_g = block_gadget(params.n, &powers_of_two(params.k(), q), q);
    let z = big_g.mul_int(&sig.v2)?;
    let tz = z.scale(sig.tau % q);
    out.extend(&z.entries);
    out.extend(&tz.entries);
    Ok(out)
}

// ---------------------------------------------------------------- public-key map

/// G·m = F·bin(y) mod p.
pub fn compile_pk_transform(f: &ZqMatrix, params: &ParamSet) -> Result<RStarInstance> {
    let (p, md, m3) = (params.p(), params.m_d, params.m3);
    let kp = params.k_p();
    let n_prime = params.n_prime();
    if f.rows != n_prime || f.cols != md * kp || f.modulus != p {
        return Err(Error::Dimension("F must be n′ × m_D·k_p over Z_p".into()));
    }
    let pow = powers_of_two(kp, p);
    let mut b = Builder::new(p);
    let m = b.seg("m", m3, 2);
    let yb = b.seg("y_bits", md * kp, 2);
    let y = b.seg("y", md, p);
    for r in 0..n_prime {
        let mut row: Vec<(usize, u64)> = (0..kp).map(|t| (m + r * kp + t, pow[t])).collect();
        row.extend((0..md * kp).map(|c| (yb + c, b.neg(f.get(r, c)))));
        b.row(row, 0);
    }
    for i in 0..md {
        let mut row: Vec<(usize, u64)> = (0..kp).map(|t| (yb + i * kp + t, pow[t])).collect();
        row.push((y + i, b.neg(1)));
        b.row(row, 0);
    }
    b.binary(m, m3 + md * kp);
    b.finish().lift(params.q())
}

/// m = bin(F·bin(y)) over Z_p.
pub fn pk_message(f: &ZqMatrix, y: &[u64]) -> Result<Vec<u64>> {
    let p = f.modulus;
    let yb = bin(&ZqVector::new(y.to_vec(), p));
    Ok(bin(&f.mul_vec(&ZqVector::new(yb, p))?))
}

pub fn witness_pk_transform(f: &ZqMatrix, y: &[u64]) -> Result<Vec<u64>> {
    let p = f.modulus;
    let yb = bin(&ZqVector::new(y.to_vec(), p));
    Ok([pk_message(f, y)?, yb, y.to_vec()].concat())
}

// ---------------------------------------------------------------- tag equation

/// ť′ + c·y = ť mod p.
pub fn compile_tag_equation(t_check: &[u64], c: u64, params: &ParamSet) -> Result<RStarInstance> {
    let (p, md) = (params.p(), params.m_d);
    want_len(t_check.len(), md)?;
    let mut b = Builder::new(p);
    let tp = b.seg("t_prime", md, p);
    let y = b.seg("y", md, p);
    for i in 0..md {
        b.row(vec![(tp + i, 1), (y + i, c % p)], t_check[i] % p);
    }
    b.finish().lift(params.q())
}

pub fn witness_tag_equation(t_prime: &[u64], y: &[u64]) -> Vec<u64> {
    [t_prime, y].concat()
}

// ---------------------------------------------------------------- tag-base map

/// b′ = bin(E1·vdec(M2V(B + B̌))) over Z_q1.
pub fn tag_base_digest(e1: &ZqMatrix, b: &ZqMatrix, b_check: &ZqMatrix, iota: u32) -> Result<Vec<u64>> {
    let c = m2v(&b.add(b_check)?);
    let chunks = vdec(&c, iota)?;
    Ok(bin(&e1.mul_vec(&ZqVector::new(chunks, e1.modulus))?))
}

/// Binary projection vectors for the fast-mode shortness rows, derived
/// from a fixed domain so prover and verifier agree.
fn fast_projections(total: usize, blocks: usize, lambda: usize) -> Vec<Vec<u8>> {
    let block_len = total / blocks;
    let mut h = Shake256::default();
    h.update(b"ktaa-fast-v1");
    for x in [total, blocks, lambda] {
        h.update(&(x as u64).to_le_bytes());
    }
    let mut xof = h.finalize_xof();
    let mut buf = vec![0u8; (blocks * lambda * block_len).div_ceil(8)];
    xof.read(&mut buf);
    let bit = |i: usize| (buf[i / 8] >> (i % 8)) & 1;
    (0..blocks * lambda).map(|r| (0..block_len).map(|i| bit(r * block_len + i)).collect()).collect()
}

/// Bits per fast-mode projection: enough for block_len·(2^ι − 1).
pub fn fast_bits(params: &ParamSet) -> usize {
    let total = params.m_d * params.n1 * params.k_vdec();
    bit_len((total / params.b_blocks) as u64 * ((1u64 << params.iota) - 1)) as usize
}

pub fn compile_tagbase_transform(e1: &ZqMatrix, params: &ParamSet) -> Result<RStarInstance> {
    let (q, q1, md, n1) = (params.q(), params.q1(), params.m_d, params.n1);
    let k2 = params.k2();
    let kv = params.k_vdec();
    let mn = md * n1;
    let total = mn * kv;
    let (blocks, lambda) = (params.b_blocks, params.lambda);
    if e1.rows != params.n_e1 || e1.cols != total || e1.modulus != q1 {
        return Err(Error::Dimension("E1 must be n_E1 × m_D·n1·k′ over Z_q1".into()));
    }
    if total % blocks != 0 {
        return Err(Error::Params("block count must divide the vdec length".into()));
    }
    let fb = fast_bits(params);
    let mut b = Builder::new(q1);
    let bp = b.seg("b_prime", params.n_e1 * k2, 2);
    let vd = b.seg("vdec", total, 1 << params.iota);
    let c = b.seg("c", mn, q1);
    let bb = b.seg("b", mn, q1);
    let bc = b.seg("b_check", mn, q1);
    let fast = b.seg("fast", blocks * lambda * fb, 2);
    let pow = powers_of_two(k2, q1);
    for r in 0..params.n_e1 {
        let mut row: Vec<(usize, u64)> = (0..k2).map(|t| (bp + r * k2 + t, pow[t])).collect();
        row.extend((0..total).map(|i| (vd + i, b.neg(e1.get(r, i)))));
        b.row(row, 0);
    }
    let gv = vdec_gadget(q1, params.iota)?;
    for i in 0..mn {
        let mut row: Vec<(usize, u64)> = (0..kv).map(|t| (vd + i * kv + t, gv[t] % q1)).collect();
        row.push((c + i, b.neg(1)));
        b.row(row, 0);
    }
    for i in 0..mn {
        b.row(vec![(c + i, b.neg(1)), (bb + i, 1), (bc + i, 1)], 0);
    }
    b.binary(bp, params.n_e1 * k2);
    b.binary(fast, blocks * lambda * fb);
    let mut inst = b.finish().lift(q)?;
    // fast-mode rows live natively mod q
    let block_len = total / blocks;
    let proj = fast_projections(total, blocks, lambda);
    for (r, coeffs) in proj.iter().enumerate() {
        let blk = r / lambda;
        let mut row: Vec<(usize, u64)> =
            coeffs.iter().enumerate().filter(|(_, &x)| x == 1).map(|(i, _)| (vd + blk * block_len + i, 1)).collect();
        row.extend((0..fb).map(|t| (fast + r * fb + t, q - ((1u64 << t) % q))));
        inst.add_row(row, 0);
    }
    Ok(inst)
}

pub fn witness_tagbase_transform(params: &ParamSet, e1: &ZqMatrix, b: &ZqMatrix, b_check: &ZqMatrix) -> Result<Vec<u64>> {
    let c = m2v(&b.add(b_check)?);
    let chunks = vdec(&c, params.iota)?;
    let bprime = bin(&e1.mul_vec(&ZqVector::new(chunks.clone(), e1.modulus))?);
    let total = chunks.len();
    let (blocks, lambda) = (params.b_blocks, params.lambda);
    let block_len = total / blocks;
    let fb = fast_bits(params);
    let mut fast = Vec::with_capacity(blocks * lambda * fb);
    for (r, coeffs) in fast_projections(total, blocks, lambda).iter().enumerate() {
        let blk = r / lambda;
        let val: u64 = coeffs.iter().zip(&chunks[blk * block_len..]).map(|(&a, &x)| a as u64 * x).sum();
        fast.extend((0..fb).map(|t| (val >> t) & 1));
    }
    Ok([bprime, chunks, c.entries, m2v(b).entries, m2v(b_check).entries, fast].concat())
}

/// Signed vector reduced mod q; shared by tests.
pub fn reduce_signed(v: &[i64], q: u64) -> Vec<u64> {
    v.iter().map(|&x| reduce_i64(x, q)).collect()
}
