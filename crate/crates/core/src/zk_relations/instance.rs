//! Instances of the quadratic relation A·x = y ∧ x[h] = x[i]·x[j] over Z_modulus.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{Error, Result};
use crate::lattice_core::arith::{add_mod, mul_mod};
use crate::lattice_core::{Decode, Encode, Reader, Writer};

/// A named index range of the witness. `domain` is the ring its values are
/// meant to live in (2 for bits); aliasing requires equal domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub name: String,
    pub start: usize,
    pub len: usize,
    pub domain: u64,
}

impl Segment {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

pub type SparseRow = Vec<(usize, u64)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RStarInstance {
    pub modulus: u64,
    pub width: usize,
    pub rows: Vec<SparseRow>,
    pub target: Vec<u64>,
    pub triples: Vec<(usize, usize, usize)>,
    pub segments: Vec<Segment>,
    /// (merged name, surviving name) pairs left behind by conjoin.
    pub aliases: Vec<(String, String)>,
}

/// Where a witness first fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Row(usize),
    Triple(usize),
}

impl RStarInstance {
    pub fn witness_len(&self) -> usize {
        self.width
    }

    pub fn m_size(&self) -> usize {
        self.triples.len()
    }

    pub fn segment(&self, name: &str) -> Result<&Segment> {
        if let Some(s) = self.segments.iter().find(|s| s.name == name) {
            return Ok(s);
        }
        let (_, kept) = self
            .aliases
            .iter()
            .find(|(merged, _)| merged == name)
            .ok_or_else(|| Error::UnknownSegment(name.to_string()))?;
        self.segment(kept)
    }

    pub fn range(&self, name: &str) -> Result<std::ops::Range<usize>> {
        Ok(self.segment(name)?.range())
    }

    /// Append a linear row; coefficients on the same column are merged.
    pub fn add_row(&mut self, row: SparseRow, target: u64) {
        self.rows.push(normalize(row, self.modulus));
        self.target.push(target % self.modulus);
    }

    /// Scale every linear row and the target by q / modulus.
    pub fn lift(mut self, q: u64) -> Result<Self> {
        if q % self.modulus != 0 {
            return Err(Error::ModulusMismatch(format!("{} does not divide {q}", self.modulus)));
        }
        let f = q / self.modulus;
        for row in &mut self.rows {
            row.iter_mut().for_each(|(_, c)| *c = mul_mod(*c, f, q));
            row.retain(|&(_, c)| c != 0);
        }
        self.target.iter_mut().for_each(|t| *t = mul_mod(*t, f, q));
        self.modulus = q;
        Ok(self)
    }

    pub fn first_violation(&self, x: &[u64]) -> Result<Option<Violation>> {
        if x.len() != self.width {
            return Err(Error::WitnessLength { got: x.len(), want: self.width });
        }
        let m = self.modulus;
        for (r, (row, &t)) in self.rows.iter().zip(&self.target).enumerate() {
            let acc = row.iter().fold(0, |acc, &(c, a)| add_mod(acc, mul_mod(a, x[c] % m, m), m));
            if acc != t {
                return Ok(Some(Violation::Row(r)));
            }
        }
        for (k, &(h, i, j)) in self.triples.iter().enumerate() {
            if x[h] % m != mul_mod(x[i] % m, x[j] % m, m) {
                return Ok(Some(Violation::Triple(k)));
            }
        }
        Ok(None)
    }

    /// 256-bit digest of the canonical serialization.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Shake256::default();
        h.update(b"ktaa-instance-v1");
        h.update(&self.to_bytes());
        let mut out = [0u8; 32];
        h.finalize_xof().read(&mut out);
        out
    }
}

pub fn check_instance(inst: &RStarInstance, x: &[u64]) -> Result<bool> {
    Ok(inst.first_violation(x)?.is_none())
}

pub(crate) fn normalize(mut row: SparseRow, m: u64) -> SparseRow {
    row.iter_mut().for_each(|(_, c)| *c %= m);
    row.sort_unstable_by_key(|&(c, _)| c);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (c, a) in row {
        match out.last_mut() {
            Some((lc, la)) if *lc == c => *la = add_mod(*la, a, m),
            _ => out.push((c, a)),
        }
    }
    out.retain(|&(_, a)| a != 0);
    out
}

/// Incremental construction at a fixed modulus.
pub struct Builder {
    inst: RStarInstance,
}

impl Builder {
    pub fn new(modulus: u64) -> Self {
        Builder {
            inst: RStarInstance {
                modulus,
                width: 0,
                rows: Vec::new(),
                target: Vec::new(),
                triples: Vec::new(),
                segments: Vec::new(),
                aliases: Vec::new(),
            },
        }
    }

    pub fn modulus(&self) -> u64 {
        self.inst.modulus
    }

    /// Allocate a segment and return its start.
    pub fn seg(&mut self, name: &str, len: usize, domain: u64) -> usize {
        let start = self.inst.width;
        self.inst.segments.push(Segment { name: name.to_string(), start, len, domain });
        self.inst.width += len;
        start
    }

    pub fn row(&mut self, row: SparseRow, target: u64) {
        self.inst.add_row(row, target);
    }

    pub fn triple(&mut self, h: usize, i: usize, j: usize) {
        self.inst.triples.push((h, i, j));
    }

    /// x[i] ∈ {0,1} for every i in the range.
    pub fn binary(&mut self, start: usize, len: usize) {
        (start..start + len).for_each(|i| self.triple(i, i, i));
    }

    pub fn neg(&self, a: u64) -> u64 {
        let m = self.inst.modulus;
        (m - a % m) % m
    }

    pub fn finish(self) -> RStarInstance {
        self.inst
    }
}

impl Encode for RStarInstance {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.width);
        w.usize(self.triples.len());
        w.u64(self.modulus);
        w.usize(self.rows.len());
        for (row, &t) in self.rows.iter().zip(&self.target) {
            w.usize(row.len());
            for &(c, a) in row {
                w.usize(c);
                w.u64(a);
            }
            w.u64(t);
        }
        for &(h, i, j) in &self.triples {
            w.usize(h);
            w.usize(i);
            w.usize(j);
        }
        w.usize(self.segments.len());
        for s in &self.segments {
            w.str(&s.name);
            w.usize(s.start);
            w.usize(s.len);
            w.u64(s.domain);
        }
        w.usize(self.aliases.len());
        for (a, b) in &self.aliases {
            w.str(a);
            w.str(b);
        }
    }
}

impl Decode for RStarInstance {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let width = r.usize()?;
        let n_triples = r.usize()?;
        let modulus = r.u64()?;
        if modulus < 2 {
            return Err(Error::Decode("instance modulus".into()));
        }
        let n_rows = r.usize()?;
        let mut rows = Vec::with_capacity(n_rows.min(1 << 16));
        let mut target = Vec::with_capacity(n_rows.min(1 << 16));
        for _ in 0..n_rows {
            let nnz = r.usize()?;
            let row = (0..nnz).map(|_| Ok((r.usize()?, r.u64()?))).collect::<Result<SparseRow>>()?;
            if row.iter().any(|&(c, a)| c >= width || a >= modulus) {
                return Err(Error::Decode("row entry out of range".into()));
            }
            rows.push(row);
            target.push(r.u64()?);
        }
        let triples = (0..n_triples).map(|_| Ok((r.usize()?, r.usize()?, r.usize()?))).collect::<Result<Vec<_>>>()?;
        if triples.iter().any(|&(h, i, j)| h.max(i).max(j) >= width) {
            return Err(Error::Decode("triple index out of range".into()));
        }
        let n_segs = r.usize()?;
        let segments = (0..n_segs)
            .map(|_| Ok(Segment { name: r.str()?, start: r.usize()?, len: r.usize()?, domain: r.u64()? }))
            .collect::<Result<Vec<_>>>()?;
        let n_alias = r.usize()?;
        let aliases = (0..n_alias).map(|_| Ok((r.str()?, r.str()?))).collect::<Result<Vec<_>>>()?;
        Ok(RStarInstance { modulus, width, rows, target, triples, segments, aliases })
    }
}
