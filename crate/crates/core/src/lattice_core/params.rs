//! System parameters and the named presets.
//!
//! Toy presets run the whole protocol. The paper-80 and paper-128 presets carry moduli far
//! beyond 64 bits and are consumed only by the estimator, which works with
//! logarithms; asking one of them for an exact modulus panics.

use crate::error::{Error, Result};

use super::decomp::{bin_width, bit_len, vdec_chunks};

#[derive(Clone, Debug, PartialEq)]
pub struct ParamSet {
    pub name: String,
    pub q0: u64,
    pub e1: u32,
    pub e2: u32,
    pub e3: u32,
    /// Tag modulus; usable tags are 1..N−1 prime to q0.
    pub qprime: u64,
    pub n: usize,
    pub n1: usize,
    pub m_d: usize,
    pub m_a: usize,
    pub m_s: usize,
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub sigma: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub s: f64,
    pub big_n: usize,
    pub l: usize,
    pub iota: u32,
    /// Fast-mode block count 𝔟.
    pub b_blocks: usize,
    /// Rows of the tag-base compression matrix E1.
    pub n_e1: usize,
    /// Fast-mode projections per block.
    pub lambda: usize,
}

impl ParamSet {
    pub fn preset(name: &str) -> Result<ParamSet> {
        match name {
            "toy-27" => Ok(Self::toy_27()),
            "toy-125" => Ok(Self::toy_125()),
            "paper-80" => Ok(Self::paper_80()),
            "paper-128" => Ok(Self::paper_128()),
            other => Err(Error::Params(format!("unknown preset `{other}`"))),
        }
    }

    pub const PRESETS: [&'static str; 4] = ["toy-27", "toy-125", "paper-80", "paper-128"];

    /// q0 = 3: p = 3, q1 = 9, q = 27.
    pub fn toy_27() -> ParamSet {
        let (sigma, sigma2) = (56.0, 4.0);
        ParamSet {
            name: "toy-27".into(),
            q0: 3,
            e1: 1,
            e2: 2,
            e3: 3,
            qprime: 8,
            n: 4,
            n1: 2,
            m_d: 32,
            m_a: 60,
            m_s: 20,
            m1: 40,
            m2: 20,
            m3: 8,
            sigma,
            sigma1: f64::hypot(sigma, sigma2),
            sigma2,
            s: 56.0,
            big_n: 8,
            l: 3,
            iota: 2,
            b_blocks: 4,
            n_e1: 2,
            lambda: 8,
        }
    }

    /// q0 = 5: p = 5, q1 = 25, q = 125.
    pub fn toy_125() -> ParamSet {
        let (sigma, sigma2) = (64.0, 4.0);
        ParamSet {
            name: "toy-125".into(),
            q0: 5,
            e1: 1,
            e2: 2,
            e3: 3,
            qprime: 8,
            n: 4,
            n1: 2,
            m_d: 20,
            m_a: 84,
            m_s: 28,
            m1: 56,
            m2: 28,
            m3: 12,
            sigma,
            sigma1: f64::hypot(sigma, sigma2),
            sigma2,
            s: 64.0,
            big_n: 8,
            l: 3,
            iota: 1,
            b_blocks: 4,
            n_e1: 2,
            lambda: 8,
        }
    }

    /// The 80-bit parameter table.
    pub fn paper_80() -> ParamSet {
        ParamSet {
            name: "paper-80".into(),
            q0: 1031,
            e1: 1,
            e2: 19,
            e3: 20,
            qprime: 1024,
            n: 180,
            n1: 32,
            m_d: 1360,
            m_a: 18090,
            m_s: 88440,
            m1: 22740,
            m2: 36180,
            m3: 4096,
            sigma: 2761.34,
            sigma1: 2761.37,
            sigma2: 12.73,
            s: 1224.81,
            big_n: 1024,
            l: 10,
            iota: 10,
            b_blocks: 40,
            n_e1: 26,
            lambda: 80,
        }
    }

    /// 128-bit projection. Only n, n1 and the moduli sizes are published for
    /// this level; the remaining dimensions and widths are scaled from the
    /// 80-bit table by the rules documented in the README.
    pub fn paper_128() -> ParamSet {
        let (n, n1, k) = (175usize, 28usize, 301usize);
        let m2 = n * k;
        let m1 = (22740.0 / 36180.0 * m2 as f64).round() as usize;
        let m_a = (m2 as f64 / 2.0).round() as usize;
        let sigma = 2761.34 / (22740f64.sqrt() + 36180f64.sqrt()) * ((m1 as f64).sqrt() + (m2 as f64).sqrt());
        let s = 1224.81 / 18090f64.sqrt() * (m_a as f64).sqrt();
        let sigma2 = 12.73;
        let log_q1 = 29.0 * 1031f64.log2();
        let md_min = 2.0 * n1 as f64 * (log_q1 + 1.0) / (1031f64.log2() - 1.0);
        let m_d = ((md_min / 40.0).ceil() * 40.0) as usize;
        let m_s = (88440.0 / (32.0 * 201.0) * (n1 * k) as f64).round() as usize;
        ParamSet {
            name: "paper-128".into(),
            q0: 1031,
            e1: 1,
            e2: 29,
            e3: 30,
            qprime: 1024,
            n,
            n1,
            m_d,
            m_a,
            m_s,
            m1,
            m2,
            m3: 4096,
            sigma,
            sigma1: f64::hypot(sigma, sigma2),
            sigma2,
            s,
            big_n: 1024,
            l: 10,
            iota: 10,
            b_blocks: 40,
            n_e1: 26,
            lambda: 128,
        }
    }

    /// True when every modulus fits the 64-bit residue arithmetic.
    pub fn is_arithmetic(&self) -> bool {
        self.q0.checked_pow(self.e3).is_some_and(|q| q < (1 << 62))
    }

    fn exact(&self, e: u32) -> u64 {
        assert!(self.is_arithmetic(), "preset {} is estimator-only", self.name);
        self.q0.pow(e)
    }

    pub fn p(&self) -> u64 {
        self.exact(self.e1)
    }
    pub fn q1(&self) -> u64 {
        self.exact(self.e2)
    }
    pub fn q(&self) -> u64 {
        self.exact(self.e3)
    }
    pub fn gamma(&self) -> u64 {
        self.q1() / self.p()
    }

    pub fn log2_q0(&self) -> f64 {
        (self.q0 as f64).log2()
    }
    pub fn log2_p(&self) -> f64 {
        self.e1 as f64 * self.log2_q0()
    }
    pub fn log2_q1(&self) -> f64 {
        self.e2 as f64 * self.log2_q0()
    }
    pub fn log2_q(&self) -> f64 {
        self.e3 as f64 * self.log2_q0()
    }

    /// Gadget length for Z_q (base 2).
    pub fn k(&self) -> usize {
        bin_width(self.q())
    }
    /// Bits of the wPRF residual gadget, ⌊log γ⌋ + 1.
    pub fn k1(&self) -> usize {
        bit_len(self.gamma()) as usize
    }
    /// Bits per entry of bin(·) over Z_p.
    pub fn k_p(&self) -> usize {
        bin_width(self.p())
    }
    /// Bits per entry of bin(·) over Z_q1.
    pub fn k2(&self) -> usize {
        bin_width(self.q1())
    }
    /// Chunks per entry of vdec(·) over Z_q1.
    pub fn k_vdec(&self) -> usize {
        vdec_chunks(self.q1(), self.iota).expect("validated iota")
    }
    pub fn k_qprime(&self) -> usize {
        bit_len(self.qprime) as usize
    }
    /// Rows of F: n′ = m3 / k_p.
    pub fn n_prime(&self) -> usize {
        self.m3 / self.k_p()
    }
    pub fn m_bar_a(&self) -> usize {
        self.m_a - self.n * self.k()
    }
    pub fn leaf_bits(&self) -> usize {
        self.m_s / 2
    }
    pub fn bprime_bits(&self) -> usize {
        self.n_e1 * self.k2()
    }

    /// Verify bound on dynamic-accumulator witnesses.
    pub fn gamma_acc(&self) -> f64 {
        6.0 * self.s * ((self.l * self.big_n) as f64).sqrt()
    }
    /// Bound used inside the membership relation.
    pub fn gamma1(&self) -> u64 {
        (6.0 * self.s * ((self.m_a as f64).sqrt() + ((self.l * self.big_n) as f64).sqrt())).floor() as u64
    }
    pub fn k_gamma1(&self) -> usize {
        bit_len(2 * self.gamma1()) as usize
    }
    /// ⌊σ1 log m1⌋, the shift for v1 inside the signature relation.
    pub fn alpha1(&self) -> u64 {
        (self.sigma1 * (self.m1 as f64).log2()).floor() as u64
    }
    /// ⌊σ log m2⌋, the shift for v2 inside the signature relation.
    pub fn alpha2(&self) -> u64 {
        (self.sigma * (self.m2 as f64).log2()).floor() as u64
    }
    pub fn k_alpha1(&self) -> usize {
        bit_len(2 * self.alpha1()) as usize
    }
    pub fn k_alpha2(&self) -> usize {
        bit_len(2 * self.alpha2()) as usize
    }

    /// Tags usable by the registry: 1..N−1, invertible mod q.
    pub fn usable_tags(&self) -> Vec<u64> {
        (1..self.big_n as u64).filter(|t| t % self.q0 != 0 && *t < self.qprime.max(2)).collect()
    }

    /// Strong-uniqueness lower bound on m_D.
    pub fn m_d_bound(&self) -> f64 {
        2.0 * self.n1 as f64 * (self.log2_q1() + 1.0) / (self.log2_p() - 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Params(format!("{}: {m}", self.name)));
        if !(1 <= self.e1 && self.e1 < self.e2 && self.e2 < self.e3) {
            return fail("exponents must satisfy 1 ≤ e1 < e2 < e3".into());
        }
        if (self.sigma1 * self.sigma1 - self.sigma * self.sigma - self.sigma2 * self.sigma2).abs()
            > 1e-6 * self.sigma1 * self.sigma1
        {
            return fail("sigma1² must equal sigma² + sigma2²".into());
        }
        if self.l != (self.big_n as f64).log2().ceil() as usize {
            return fail("l must be ⌈log N⌉".into());
        }
        if (self.m_d as f64) < self.m_d_bound() {
            return fail(format!("m_D = {} below the uniqueness bound {:.2}", self.m_d, self.m_d_bound()));
        }
        if !self.is_arithmetic() {
            return Ok(());
        }
        if self.gamma() % 2 == 0 {
            return fail("q1/p must be odd".into());
        }
        if self.q() <= self.big_n as u64 {
            return fail("q must exceed N".into());
        }
        if !is_prime(self.p()) {
            return fail("tracing needs p prime (e1 = 1)".into());
        }
        if self.m2 != self.n * self.k() {
            return fail(format!("m2 must be n·k = {}", self.n * self.k()));
        }
        if self.m_a <= self.n * self.k() {
            return fail("m_A must exceed n·k".into());
        }
        if self.m3 % self.k_p() != 0 {
            return fail("m3 must be a multiple of ⌈log p⌉".into());
        }
        if self.m_s != 2 * self.n1 * self.k() {
            return fail(format!("m_S must be 2·n1·k = {}", 2 * self.n1 * self.k()));
        }
        if self.bprime_bits() > self.leaf_bits() {
            return fail("tag-base digest longer than an accumulator leaf".into());
        }
        vdec_chunks(self.q1(), self.iota)?;
        if self.k2() % self.iota as usize != 0 {
            return fail("iota must divide the bit width of q1 at arithmetic presets".into());
        }
        if (self.m_d * self.n1 * self.k_vdec()) % self.b_blocks != 0 {
            return fail("fast-mode blocks must divide the vdec length".into());
        }
        if self.usable_tags().is_empty() {
            return fail("no usable tags".into());
        }
        Ok(())
    }
}

fn is_prime(x: u64) -> bool {
    x >= 2 && (2..).take_while(|d| d * d <= x).all(|d| x % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in ParamSet::PRESETS {
            ParamSet::preset(name).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn toy_tower() {
        let p = ParamSet::toy_27();
        assert_eq!((p.p(), p.q1(), p.q(), p.gamma()), (3, 9, 27, 3));
        assert_eq!((p.k(), p.k1(), p.k_p(), p.k2(), p.k_vdec()), (5, 2, 2, 4, 2));
        assert_eq!(p.usable_tags(), vec![1, 2, 4, 5, 7]);
        let p = ParamSet::toy_125();
        assert_eq!((p.p(), p.q1(), p.q(), p.gamma()), (5, 25, 125, 5));
        assert_eq!((p.k(), p.k1(), p.k_p(), p.k2(), p.k_vdec()), (7, 3, 3, 5, 5));
    }

    #[test]
    fn paper_128_projection() {
        let p = ParamSet::paper_128();
        assert_eq!((p.m2, p.m1, p.m_a, p.m_d, p.m_s), (52675, 33108, 26338, 1840, 115885));
        // the same m_D rule reproduces the 80-bit table
        let p80 = ParamSet::paper_80();
        assert_eq!(((p80.m_d_bound() / 40.0).ceil() * 40.0) as usize, 1360);
    }

    #[test]
    #[should_panic]
    fn paper_moduli_are_not_arithmetic() {
        ParamSet::paper_80().q();
    }
}
