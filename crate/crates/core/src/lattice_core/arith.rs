//! Residues, vectors and dense matrices over Z_M.
//!
//! Residues are single 64-bit limbs with 128-bit intermediates, so every
//! modulus must stay below 2^63. Moduli of the 80- and 128-bit presets never reach this code;
//! the estimator works with their logarithms instead.

use rand::Rng;

use crate::error::{Error, Result};

pub const MAX_MODULUS: u64 = 1 << 63;

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        (a - b) % m
    } else {
        neg_mod(b - a, m)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, m: u64) -> u64 {
    let a = a % m;
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Reduce a signed integer into [0, m).
#[inline]
pub fn reduce_i64(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// Centered representative in (-m/2, m/2].
#[inline]
pub fn center(x: u64, m: u64) -> i64 {
    let x = x % m;
    if x > m / 2 {
        x as i64 - m as i64
    } else {
        x as i64
    }
}

/// Multiplicative inverse, if gcd(a, m) = 1.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn check_modulus(m: u64) {
    assert!(m >= 2 && m < MAX_MODULUS, "modulus {m} outside [2, 2^63)");
}

/// A vector of residues modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZqVector {
    pub modulus: u64,
    pub entries: Vec<u64>,
}

impl ZqVector {
    pub fn zero(dim: usize, modulus: u64) -> Self {
        check_modulus(modulus);
        ZqVector { modulus, entries: vec![0; dim] }
    }

    /// Entries are reduced on the way in.
    pub fn new(entries: Vec<u64>, modulus: u64) -> Self {
        check_modulus(modulus);
        let entries = entries.into_iter().map(|e| e % modulus).collect();
        ZqVector { modulus, entries }
    }

    pub fn from_signed(v: &[i64], modulus: u64) -> Self {
        check_modulus(modulus);
        ZqVector { modulus, entries: v.iter().map(|&x| reduce_i64(x, modulus)).collect() }
    }

    pub fn random<R: Rng + ?Sized>(dim: usize, modulus: u64, rng: &mut R) -> Self {
        check_modulus(modulus);
        ZqVector { modulus, entries: (0..dim).map(|_| rng.gen_range(0..modulus)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(format!("{} vs {}", self.modulus, other.modulus)));
        }
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let m = self.modulus;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| add_mod(a, b, m)).collect();
        Ok(ZqVector { modulus: m, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let m = self.modulus;
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| sub_mod(a, b, m)).collect();
        Ok(ZqVector { modulus: m, entries })
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        ZqVector { modulus: m, entries: self.entries.iter().map(|&a| mul_mod(a, c % m, m)).collect() }
    }

    /// Reinterpret the residues modulo a divisor of the current modulus.
    pub fn reduce_to(&self, modulus: u64) -> Result<Self> {
        if self.modulus % modulus != 0 {
            return Err(Error::ModulusMismatch(format!("{} does not divide {}", modulus, self.modulus)));
        }
        Ok(ZqVector::new(self.entries.clone(), modulus))
    }

    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch(format!("{} vs {}", self.modulus, other.modulus)));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(ZqVector { modulus: self.modulus, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    pub fn centered(&self) -> Vec<i64> {
        self.entries.iter().map(|&e| center(e, self.modulus)).collect()
    }
}

/// A dense row-major matrix of residues modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZqMatrix {
    pub modulus: u64,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u64>,
}

impl ZqMatrix {
    pub fn zero(rows: usize, cols: usize, modulus: u64) -> Self {
        check_modulus(modulus);
        ZqMatrix { modulus, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: u64) -> Self {
        let mut m = Self::zero(n, n, modulus);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u64>], modulus: u64) -> Result<Self> {
        check_modulus(modulus);
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&e| e % modulus).collect();
        Ok(ZqMatrix { modulus, rows: r, cols: c, data })
    }

    pub fn from_signed(rows: usize, cols: usize, data: &[i64], modulus: u64) -> Self {
        check_modulus(modulus);
        assert_eq!(data.len(), rows * cols);
        ZqMatrix { modulus, rows, cols, data: data.iter().map(|&x| reduce_i64(x, modulus)).collect() }
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, modulus: u64, rng: &mut R) -> Self {
        check_modulus(modulus);
        let data = (0..rows * cols).map(|_| rng.gen_range(0..modulus)).collect();
        ZqMatrix { modulus, rows, cols, data }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> ZqVector {
        ZqVector { modulus: self.modulus, entries: (0..self.rows).map(|r| self.get(r, c)).collect() }
    }

    pub fn mul_vec(&self, v: &ZqVector) -> Result<ZqVector> {
        if v.modulus != self.modulus {
            return Err(Error::ModulusMismatch(format!("{} vs {}", self.modulus, v.modulus)));
        }
        if v.dim() != self.cols {
            return Err(Error::Dimension(format!("{}x{} times {}", self.rows, self.cols, v.dim())));
        }
        let m = self.modulus as u128;
        let entries = (0..self.rows)
            .map(|r| {
                let acc = self.row(r).iter().zip(&v.entries).fold(0u128, |acc, (&a, &b)| {
                    (acc + a as u128 * b as u128) % m
                });
                acc as u64
            })
            .collect();
        Ok(ZqVector { modulus: self.modulus, entries })
    }

    /// Product with a plain integer vector, reduced mod the matrix modulus.
    pub fn mul_int(&self, v: &[i64]) -> Result<ZqVector> {
        self.mul_vec(&ZqVector::from_signed(v, self.modulus))
    }

    pub fn mul(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        if self.modulus != other.modulus || self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} (mod {}) times {}x{} (mod {})",
                self.rows, self.cols, self.modulus, other.rows, other.cols, other.modulus
            )));
        }
        let m = self.modulus as u128;
        let mut out = ZqMatrix::zero(self.rows, other.cols, self.modulus);
        for r in 0..self.rows {
            let mut acc = vec![0u128; other.cols];
            for k in 0..self.cols {
                let a = self.get(r, k) as u128;
                if a == 0 {
                    continue;
                }
                for (c, slot) in acc.iter_mut().enumerate() {
                    *slot = (*slot + a * other.get(k, c) as u128) % m;
                }
            }
            for (c, v) in acc.into_iter().enumerate() {
                out.data[r * other.cols + c] = v as u64;
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        if self.modulus != other.modulus || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix add shape".into()));
        }
        let m = self.modulus;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| add_mod(a, b, m)).collect();
        Ok(ZqMatrix { modulus: m, rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        if self.modulus != other.modulus || self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix sub shape".into()));
        }
        let m = self.modulus;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| sub_mod(a, b, m)).collect();
        Ok(ZqMatrix { modulus: m, rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: u64) -> ZqMatrix {
        let m = self.modulus;
        ZqMatrix {
            modulus: m,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| mul_mod(a, c % m, m)).collect(),
        }
    }

    /// [self | other]
    pub fn hcat(&self, other: &ZqMatrix) -> Result<ZqMatrix> {
        if self.modulus != other.modulus || self.rows != other.rows {
            return Err(Error::Dimension("hcat shape".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(ZqMatrix { modulus: self.modulus, rows: self.rows, cols, data })
    }

    /// Columns [start, start+len).
    pub fn columns(&self, start: usize, len: usize) -> ZqMatrix {
        let mut out = ZqMatrix::zero(self.rows, len, self.modulus);
        for r in 0..self.rows {
            out.data[r * len..(r + 1) * len].copy_from_slice(&self.row(r)[start..start + len]);
        }
        out
    }

    pub fn transpose(&self) -> ZqMatrix {
        let mut out = ZqMatrix::zero(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn reduce_to(&self, modulus: u64) -> Result<ZqMatrix> {
        if self.modulus % modulus != 0 {
            return Err(Error::ModulusMismatch(format!("{} does not divide {}", modulus, self.modulus)));
        }
        Ok(ZqMatrix {
            modulus,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| e % modulus).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_centering() {
        assert_eq!(inv_mod(2, 27), Some(14));
        assert_eq!(inv_mod(3, 27), None);
        assert_eq!(center(26, 27), -1);
        assert_eq!(center(13, 27), 13);
        assert_eq!(center(14, 27), -13);
        assert_eq!(center(4, 8), 4);
        assert_eq!(sub_mod(1, 5, 27), 23);
    }

    #[test]
    fn matrix_vector_product() {
        let a = ZqMatrix::from_rows(&[vec![1, 2], vec![3, 4]], 7).unwrap();
        let v = ZqVector::new(vec![5, 6], 7);
        // (17, 39) mod 7
        assert_eq!(a.mul_vec(&v).unwrap().entries, vec![3, 4]);
        assert_eq!(a.mul_int(&[-1, 1]).unwrap().entries, vec![1, 1]);
        assert!(a.mul_vec(&ZqVector::new(vec![1], 7)).is_err());
    }
}
