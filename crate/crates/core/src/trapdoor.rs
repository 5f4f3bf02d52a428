//! Gadget trapdoors and Gaussian preimage sampling.
//!
//! A = [Ā | h·G − Ā·R] with short ternary R satisfies A·[R; I] = h·G, where
//! G = I_n ⊗ (1, 2, …, 2^{k−1}). Preimages are sampled as a perturbation p
//! with covariance σ²I − r²·WWᵀ (W = [R; I]) plus W·z, z drawn from the
//! gadget lattice coset by Klein's nearest-plane sampler on a short basis of
//! Λ⊥(g) that works for any modulus.
//!
//! Trapdoor material is secret. Nothing here is constant time.

use rand::Rng;

use crate::error::{Error, Result};
use crate::lattice_core::arith::{inv_mod, mul_mod, sub_mod};
use crate::lattice_core::gauss::{sample_rejection, standard_normal, DEFAULT_TAILCUT};
use crate::lattice_core::{bin_width, block_gadget, powers_of_two, Decode, Encode, Reader, Writer, ZqMatrix, ZqVector};

/// Smoothing width used for randomized rounding.
pub const ETA: f64 = 1.51;
/// Width for sampling over Λ⊥(g); the basis has Gram–Schmidt norms ≤ √5.
pub const GADGET_WIDTH: f64 = 2.236_067_977_499_79 * ETA;
/// Slack factor in the enforced width bound.
pub const QUALITY_SLACK: f64 = 1.3;

/// The secret part of a gadget trapdoor.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetTrapdoor {
    pub n: usize,
    pub m_bar: usize,
    pub k: usize,
    /// Row-major m̄ × nk matrix with entries in {−1, 0, 1}.
    pub r: Vec<i64>,
    /// Largest singular value of R, by power iteration.
    pub s1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrapdoorPair {
    pub a: ZqMatrix,
    pub t: GadgetTrapdoor,
}

pub fn ternary_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Vec<i64> {
    (0..rows * cols).map(|_| rng.gen_range(-1i64..=1)).collect()
}

/// Largest singular value of a row-major integer matrix.
pub fn largest_singular_value(r: &[i64], rows: usize, cols: usize) -> f64 {
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut x: Vec<f64> = (0..cols).map(|i| 1.0 + (i % 7) as f64 * 0.1).collect();
    let mut lambda = 0.0;
    for _ in 0..200 {
        let y: Vec<f64> = (0..rows).map(|i| (0..cols).map(|j| r[i * cols + j] as f64 * x[j]).sum()).collect();
        let z: Vec<f64> = (0..cols).map(|j| (0..rows).map(|i| r[i * cols + j] as f64 * y[i]).sum()).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = z.iter().map(|v| v / norm).collect();
        if (next - lambda).abs() < 1e-9 * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

impl GadgetTrapdoor {
    pub fn new(n: usize, m_bar: usize, k: usize, r: Vec<i64>) -> Self {
        assert_eq!(r.len(), m_bar * n * k);
        let s1 = largest_singular_value(&r, m_bar, n * k);
        GadgetTrapdoor { n, m_bar, k, r, s1 }
    }

    /// Smallest width `sample_pre` accepts for this trapdoor.
    pub fn width_bound(&self) -> f64 {
        QUALITY_SLACK * self.s1 * GADGET_WIDTH
    }

    /// Ā·R mod q.
    pub fn times(&self, abar: &ZqMatrix) -> ZqMatrix {
        let rm = ZqMatrix::from_signed(self.m_bar, self.n * self.k, &self.r, abar.modulus);
        abar.mul(&rm).expect("shapes fixed at construction")
    }

    fn w_times(&self, z: &[i64]) -> Vec<i64> {
        let nk = self.n * self.k;
        let mut out: Vec<i64> =
            (0..self.m_bar).map(|i| (0..nk).map(|j| self.r[i * nk + j] * z[j]).sum()).collect();
        out.extend_from_slice(z);
        out
    }
}

/// [Ā | h·G − B] with B = Ā·R supplied by the caller.
pub fn tagged_matrix(abar: &ZqMatrix, b: &ZqMatrix, tag: u64) -> Result<ZqMatrix> {
    let q = abar.modulus;
    let k = bin_width(q);
    if b.cols % k != 0 || b.rows != abar.rows {
        return Err(Error::Dimension("B does not match the gadget shape".into()));
    }
    let g = block_gadget(b.rows, &powers_of_two(k, q), q).scale(tag);
    abar.hcat(&g.sub(b)?)
}

/// TrapGen: A ∈ Z_q^{n×m} with m = m̄ + n·k, m̄ ≥ n.
pub fn trap_gen<R: Rng + ?Sized>(n: usize, m: usize, q: u64, rng: &mut R) -> Result<TrapdoorPair> {
    let k = bin_width(q);
    if m < n * k + n {
        return Err(Error::Dimension(format!("m = {m} below the minimum n·k + n = {}", n * k + n)));
    }
    let m_bar = m - n * k;
    let abar = ZqMatrix::random(n, m_bar, q, rng);
    let t = GadgetTrapdoor::new(n, m_bar, k, ternary_matrix(m_bar, n * k, rng));
    let a = tagged_matrix(&abar, &t.times(&abar), 1)?;
    Ok(TrapdoorPair { a, t })
}

/// Gram–Schmidt data for the basis of Λ⊥(g) mod q: columns 2e_j − e_{j+1}
/// and finally the binary digits of q.
struct GadgetBasis {
    basis: Vec<Vec<f64>>,
    gs: Vec<Vec<f64>>,
    gs_sq: Vec<f64>,
}

impl GadgetBasis {
    fn new(q: u64, k: usize) -> Self {
        let mut basis = Vec::with_capacity(k);
        for j in 0..k - 1 {
            let mut b = vec![0.0; k];
            b[j] = 2.0;
            b[j + 1] = -1.0;
            basis.push(b);
        }
        basis.push((0..k).map(|i| ((q >> i) & 1) as f64).collect());
        let mut gs: Vec<Vec<f64>> = Vec::with_capacity(k);
        for b in &basis {
            let mut v = b.clone();
            for g in &gs {
                let mu = dot(b, g) / dot(g, g);
                v.iter_mut().zip(g).for_each(|(x, y)| *x -= mu * y);
            }
            gs.push(v);
        }
        let gs_sq = gs.iter().map(|g| dot(g, g)).collect();
        GadgetBasis { basis, gs, gs_sq }
    }

    /// z with ⟨(1,2,…,2^{k−1}), z⟩ ≡ u (mod q), Gaussian of width `width`.
    fn sample<R: Rng + ?Sized>(&self, u: u64, width: f64, rng: &mut R) -> Vec<i64> {
        let k = self.basis.len();
        let t: Vec<i64> = (0..k).map(|i| ((u >> i) & 1) as i64).collect();
        let mut c: Vec<f64> = t.iter().map(|&x| -(x as f64)).collect();
        let mut v = vec![0i64; k];
        for i in (0..k).rev() {
            let ci = dot(&c, &self.gs[i]) / self.gs_sq[i];
            let si = width / self.gs_sq[i].sqrt();
            let zi = sample_rejection(rng, si, ci, DEFAULT_TAILCUT);
            for j in 0..k {
                c[j] -= zi as f64 * self.basis[i][j];
                v[j] += zi * self.basis[i][j] as i64;
            }
        }
        t.iter().zip(&v).map(|(a, b)| a + b).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower Cholesky factor, or None when the matrix is not positive definite.
fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Preimage sampling for A = [Ā | tag·G − Ā·R]: returns e with A·e = v.
pub fn sample_pre_tagged<R: Rng + ?Sized>(
    a: &ZqMatrix,
    t: &GadgetTrapdoor,
    tag: u64,
    v: &ZqVector,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<i64>> {
    let q = a.modulus;
    let (n, nk) = (t.n, t.n * t.k);
    let m = t.m_bar + nk;
    if a.rows != n || a.cols != m || v.dim() != n || v.modulus != q {
        return Err(Error::Dimension("preimage target does not match the trapdoor".into()));
    }
    if sigma < t.width_bound() {
        return Err(Error::WidthTooSmall { width: sigma, bound: t.width_bound() });
    }
    let tag_inv = inv_mod(tag % q, q).ok_or(Error::BadTag(tag))?;

    // covariance σ²I − r²WWᵀ − η²I for the continuous part of the perturbation
    let r2 = GADGET_WIDTH * GADGET_WIDTH;
    let mut cov = vec![0.0; m * m];
    let w_row = |i: usize, j: usize| -> f64 {
        // entry (i, j) of W = [R; I]
        if i < t.m_bar {
            t.r[i * nk + j] as f64
        } else {
            (i - t.m_bar == j) as u8 as f64
        }
    };
    for i in 0..m {
        for j in 0..=i {
            let ww: f64 = (0..nk).map(|c| w_row(i, c) * w_row(j, c)).sum();
            let diag = if i == j { sigma * sigma - ETA * ETA } else { 0.0 };
            cov[i * m + j] = diag - r2 * ww;
            cov[j * m + i] = cov[i * m + j];
        }
    }
    let l = cholesky(&cov, m).ok_or(Error::WidthTooSmall { width: sigma, bound: t.width_bound() })?;
    let gauss: Vec<f64> = (0..m).map(|_| standard_normal(rng)).collect();
    let p: Vec<i64> = (0..m)
        .map(|i| {
            let y: f64 = (0..=i).map(|j| l[i * m + j] * gauss[j]).sum();
            sample_rejection(rng, ETA, y, DEFAULT_TAILCUT)
        })
        .collect();

    let ap = a.mul_int(&p)?;
    let basis = GadgetBasis::new(q, t.k);
    let mut z = Vec::with_capacity(nk);
    for i in 0..n {
        let u = mul_mod(sub_mod(v.entries[i], ap.entries[i], q), tag_inv, q);
        z.extend(basis.sample(u, GADGET_WIDTH, rng));
    }
    let e: Vec<i64> = t.w_times(&z).iter().zip(&p).map(|(x, y)| x + y).collect();
    debug_assert_eq!(&a.mul_int(&e)?, v);
    Ok(e)
}

/// SamplePre for a TrapGen pair.
pub fn sample_pre<R: Rng + ?Sized>(pair: &TrapdoorPair, v: &ZqVector, sigma: f64, rng: &mut R) -> Result<Vec<i64>> {
    sample_pre_tagged(&pair.a, &pair.t, 1, v, sigma, rng)
}

impl Encode for GadgetTrapdoor {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.n);
        w.usize(self.m_bar);
        w.usize(self.k);
        w.i64s(&self.r);
    }
}

impl Decode for GadgetTrapdoor {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let (n, m_bar, k) = (r.usize()?, r.usize()?, r.usize()?);
        let m = r.i64s()?;
        if m.len() != m_bar * n * k || m.iter().any(|x| x.abs() > 1) {
            return Err(Error::Decode("malformed trapdoor".into()));
        }
        Ok(GadgetTrapdoor::new(n, m_bar, k, m))
    }
}

impl Encode for TrapdoorPair {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.a);
        w.put(&self.t);
    }
}

impl Decode for TrapdoorPair {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(TrapdoorPair { a: r.get()?, t: r.get()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_core::norm_l2_int;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn gadget_basis_is_in_the_kernel() {
        for q in [27u64, 125, 81, 97] {
            let k = bin_width(q);
            let gb = GadgetBasis::new(q, k);
            let g = powers_of_two(k, q);
            for b in &gb.basis {
                let s: i64 = b.iter().zip(&g).map(|(x, y)| *x as i64 * *y as i64).sum();
                assert_eq!(s.rem_euclid(q as i64), 0);
            }
            assert!(gb.gs_sq.iter().all(|&x| x <= 5.0 + 1e-9));
            let mut rng = ChaCha20Rng::seed_from_u64(q);
            for u in 0..q {
                let z = gb.sample(u, GADGET_WIDTH, &mut rng);
                let s: i64 = z.iter().zip(&g).map(|(x, y)| x * *y as i64).sum();
                assert_eq!(s.rem_euclid(q as i64) as u64, u);
            }
        }
    }

    #[test]
    fn trapdoor_identity() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let pair = trap_gen(4, 60, 27, &mut rng).unwrap();
        // A·[R; I] = G
        let nk = 20;
        let mut w = pair.t.r.clone();
        for i in 0..nk {
            w.extend((0..nk).map(|j| (i == j) as i64));
        }
        let wm = ZqMatrix::from_signed(60, nk, &w, 27);
        assert_eq!(pair.a.mul(&wm).unwrap(), block_gadget(4, &powers_of_two(5, 27), 27));
    }

    #[test]
    fn preimages_hit_target() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let pair = trap_gen(4, 60, 27, &mut rng).unwrap();
        let sigma = pair.t.width_bound() * 1.1;
        let x: Vec<i64> = (0..60).map(|_| rng.gen_range(-2..=2)).collect();
        let v = pair.a.mul_int(&x).unwrap();
        let e = sample_pre(&pair, &v, sigma, &mut rng).unwrap();
        assert_eq!(pair.a.mul_int(&e).unwrap(), v);
        let e2 = sample_pre(&pair, &v, sigma, &mut ChaCha20Rng::seed_from_u64(99)).unwrap();
        assert_ne!(e, e2);
        assert!(norm_l2_int(&e) <= 1.3 * sigma * 60f64.sqrt());
    }

    #[test]
    fn narrow_width_is_refused() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let pair = trap_gen(4, 60, 27, &mut rng).unwrap();
        let v = ZqVector::zero(4, 27);
        assert!(matches!(sample_pre(&pair, &v, 1.0, &mut rng), Err(Error::WidthTooSmall { .. })));
        assert!(trap_gen(4, 20, 27, &mut rng).is_err());
    }

    #[test]
    fn seeded_trapgen_is_deterministic() {
        let a = trap_gen(2, 20, 27, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        let b = trap_gen(2, 20, 27, &mut ChaCha20Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(TrapdoorPair::from_bytes(&a.to_bytes()).unwrap(), a);
    }
}
