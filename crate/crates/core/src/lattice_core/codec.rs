//! Canonical byte format: little-endian fixed-width integers, u64 length
//! prefixes, and matrices carried with a (rows, cols, modulus) header.

use crate::error::{Error, Result};

use super::arith::{ZqMatrix, ZqVector};

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }
    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    pub fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }
    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn i64(&mut self, v: i64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    pub fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    pub fn bytes(&mut self, v: &[u8]) {
        self.usize(v.len());
        self.buf.extend_from_slice(v);
    }
    pub fn raw(&mut self, v: &[u8]) {
        self.buf.extend_from_slice(v);
    }
    pub fn str(&mut self, v: &str) {
        self.bytes(v.as_bytes());
    }
    pub fn u64s(&mut self, v: &[u64]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.u64(x));
    }
    pub fn i64s(&mut self, v: &[i64]) {
        self.usize(v.len());
        v.iter().for_each(|&x| self.i64(x));
    }
    pub fn put<T: Encode + ?Sized>(&mut self, v: &T) {
        v.encode(self);
    }
    pub fn seq<T: Encode>(&mut self, v: &[T]) {
        self.usize(v.len());
        v.iter().for_each(|x| x.encode(self));
    }
    pub fn opt<T: Encode>(&mut self, v: &Option<T>) {
        match v {
            None => self.u8(0),
            Some(x) => {
                self.u8(1);
                x.encode(self);
            }
        }
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Decode(format!("truncated input at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::Decode(format!("{} trailing bytes", self.buf.len() - self.pos)));
        }
        Ok(())
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    pub fn bool(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(Error::Decode(format!("invalid bool byte {b}"))),
        }
    }
    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    pub fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        // a length can never exceed the remaining input
        if v > (self.buf.len() as u64) * 8 + 64 {
            return Err(Error::Decode(format!("implausible length {v}")));
        }
        Ok(v as usize)
    }
    pub fn bytes(&mut self) -> Result<Vec<u8>> {
        let n = self.usize()?;
        Ok(self.take(n)?.to_vec())
    }
    pub fn raw<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().unwrap())
    }
    pub fn str(&mut self) -> Result<String> {
        String::from_utf8(self.bytes()?).map_err(|e| Error::Decode(e.to_string()))
    }
    pub fn u64s(&mut self) -> Result<Vec<u64>> {
        let n = self.usize()?;
        (0..n).map(|_| self.u64()).collect()
    }
    pub fn i64s(&mut self) -> Result<Vec<i64>> {
        let n = self.usize()?;
        (0..n).map(|_| self.i64()).collect()
    }
    pub fn get<T: Decode>(&mut self) -> Result<T> {
        T::decode(self)
    }
    pub fn seq<T: Decode>(&mut self) -> Result<Vec<T>> {
        let n = self.usize()?;
        (0..n).map(|_| T::decode(self)).collect()
    }
    pub fn opt<T: Decode>(&mut self) -> Result<Option<T>> {
        match self.u8()? {
            0 => Ok(None),
            1 => Ok(Some(T::decode(self)?)),
            b => Err(Error::Decode(format!("invalid option tag {b}"))),
        }
    }
}

pub trait Encode {
    fn encode(&self, w: &mut Writer);

    fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        self.encode(&mut w);
        w.into_bytes()
    }
}

pub trait Decode: Sized {
    fn decode(r: &mut Reader<'_>) -> Result<Self>;

    /// Decode the whole buffer; trailing bytes are an error.
    fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        let v = Self::decode(&mut r)?;
        r.finish()?;
        Ok(v)
    }
}

impl Encode for ZqVector {
    fn encode(&self, w: &mut Writer) {
        w.u64(self.modulus);
        w.u64s(&self.entries);
    }
}

impl Decode for ZqVector {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let modulus = r.u64()?;
        let entries = r.u64s()?;
        if modulus < 2 || entries.iter().any(|&e| e >= modulus) {
            return Err(Error::Decode("unreduced vector".into()));
        }
        Ok(ZqVector { modulus, entries })
    }
}

impl Encode for ZqMatrix {
    fn encode(&self, w: &mut Writer) {
        w.usize(self.rows);
        w.usize(self.cols);
        w.u64(self.modulus);
        self.data.iter().for_each(|&x| w.u64(x));
    }
}

impl Decode for ZqMatrix {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let rows = r.usize()?;
        let cols = r.usize()?;
        let modulus = r.u64()?;
        let n = rows.checked_mul(cols).ok_or_else(|| Error::Decode("matrix too large".into()))?;
        if modulus < 2 || n > r.buf.len() {
            return Err(Error::Decode("bad matrix header".into()));
        }
        let data = (0..n).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        if data.iter().any(|&e| e >= modulus) {
            return Err(Error::Decode("unreduced matrix".into()));
        }
        Ok(ZqMatrix { modulus, rows, cols, data })
    }
}

impl Encode for String {
    fn encode(&self, w: &mut Writer) {
        w.str(self);
    }
}

impl Decode for String {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        r.str()
    }
}
