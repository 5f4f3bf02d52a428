//! Communication-cost estimates: the aggregate witness length 𝔫 and |M| = 𝔩
//! of the authentication statement, the resulting proof size, and the
//! witness length and proof-size lower bound of the earlier k-TAA built on
//! Stern-type proofs.
//!
//! Sizes are reported in binary units (MiB, GiB, TiB).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_core::ParamSet;
use crate::proof_backend::{proof_size_bits, ZkCostParams};
use crate::zk_relations::{clause_sizes, ClauseSize, Conjoined};

const MIB: f64 = (1u64 << 20) as f64;
const GIB: f64 = (1u64 << 30) as f64;
const TIB: f64 = (1u64 << 40) as f64;

/// Gadget widths as the estimator needs them. Exact for presets whose moduli
/// fit the residue arithmetic, otherwise from real logarithms (none of the
/// arguments is a power of two there, so ⌊log x⌋+1 and ⌈log x⌉ agree).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Widths {
    pub k1: f64,
    pub kp: f64,
    pub k2: f64,
    /// k2 / ι, kept real.
    pub kv: f64,
    pub k_gamma1: f64,
    pub k_alpha1: f64,
    pub k_alpha2: f64,
    pub log_qprime: f64,
    pub log_n: f64,
}

impl Widths {
    pub fn of(p: &ParamSet) -> Widths {
        let (k1, kp, k2) = if p.is_arithmetic() {
            (p.k1() as f64, p.k_p() as f64, p.k2() as f64)
        } else {
            (
                (p.log2_q1() - p.log2_p()).floor() + 1.0,
                p.log2_p().floor() + 1.0,
                p.log2_q1().floor() + 1.0,
            )
        };
        Widths {
            k1,
            kp,
            k2,
            kv: k2 / p.iota as f64,
            k_gamma1: p.k_gamma1() as f64,
            k_alpha1: p.k_alpha1() as f64,
            k_alpha2: p.k_alpha2() as f64,
            log_qprime: (p.qprime as f64).log2().floor(),
            log_n: (p.big_n as f64).log2().ceil(),
        }
    }
}

/// 𝔫 and 𝔩 as real numbers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub n: f64,
    pub l: f64,
}

impl Aggregates {
    /// Ceiling variant.
    pub fn ceil(&self) -> (u64, u64) {
        (self.n.ceil() as u64, self.l.ceil() as u64)
    }
}

/// Evaluate the two closed forms term by term, with ℓ the Merkle depth.
pub fn aggregate_n_l(p: &ParamSet) -> Aggregates {
    let w = Widths::of(p);
    let (n, n1, md, m3) = (p.n as f64, p.n1 as f64, p.m_d as f64, p.m3 as f64);
    let (ma, ms, m1, m2) = (p.m_a as f64, p.m_s as f64, p.m1 as f64, p.m2 as f64);
    let big_n = p.big_n as f64;
    let ell = p.l as f64;
    let b = p.b_blocks as f64;
    let fast = b * p.lambda as f64 * (md * n1 * w.kv * ((1u64 << p.iota) - 1) as f64 / b).log2().ceil();
    let e1 = p.n_e1 as f64 * w.k2;

    let agg_n = 3.0 * n1 + 7.0 * md * n1 + 8.0 * md + 3.0 * w.k1 * md + 2.0 * m3
        + md * w.kp
        + w.log_n * big_n
        + 2.0 * ell
        + (ms / 2.0) * 2.0 * ell
        + ma * w.k_gamma1
        + e1
        + 4.0 * n1 * ell
        + m1 * w.k_alpha1
        + 2.0
        + w.log_qprime
        + fast
        + m2 * w.k_alpha2
        + 2.0 * n
        + md * n1 * w.kv;
    let agg_l = 3.0 * w.k1 * md + 2.0 * md * n1 + md * w.kp
        + ma * w.k_gamma1
        + w.log_n * big_n
        + ell
        + 2.0 * n1 * ell
        + (ms / 2.0) * 2.0 * ell
        + w.log_qprime
        + 1.0
        + e1
        + fast
        + m2 * w.k_alpha2
        + n
        + 2.0 * m3
        + m1 * w.k_alpha1;
    Aggregates { n: agg_n, l: agg_l }
}

/// Cost parameters of the succinct prover at a security level.
pub fn zk_cost(level: u32) -> Result<ZkCostParams> {
    match level {
        80 => Ok(ZkCostParams::level_80()),
        128 => Ok(ZkCostParams::level_128()),
        other => Err(Error::Params(format!("no cost parameters for level {other}"))),
    }
}

/// Parameter preset for a security level.
pub fn preset_for(level: u32) -> Result<ParamSet> {
    match level {
        80 => Ok(ParamSet::paper_80()),
        128 => Ok(ParamSet::paper_128()),
        other => Err(Error::Params(format!("no preset for level {other}"))),
    }
}

/// ∥π₁∥ in bits.
pub fn pi1_bits(p: &ParamSet, cost: &ZkCostParams) -> f64 {
    let a = aggregate_n_l(p);
    proof_size_bits(a.n, a.l, cost, p.log2_q().ceil())
}

/// ∥π₁∥ in bytes.
pub fn pi1_size(p: &ParamSet, cost: &ZkCostParams) -> f64 {
    pi1_bits(p, cost) / 8.0
}

/// Parameters of the comparison scheme. Only n, q, p, q1 and N_κ are
/// published; m_D and δ_B are chosen so both levels land on the published
/// witness length and lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonParams {
    pub level: u32,
    pub n: u64,
    /// ⌈log q⌉.
    pub log_q: u64,
    pub p: u64,
    pub q1: u64,
    pub m_d: u64,
    pub delta_b: u64,
    /// Merkle depth, used for both ℓ and l.
    pub ell: u64,
    pub big_n: u64,
    pub n_kappa: u64,
}

fn delta(x: u64) -> u64 {
    64 - x.leading_zeros() as u64
}

impl ComparisonParams {
    pub fn level_80() -> Self {
        ComparisonParams { level: 80, n: 1270, log_q: 96, p: 509, q1: 27995, m_d: 5760, delta_b: 2, ell: 10, big_n: 1024, n_kappa: 137 }
    }

    /// log p = 13 and log q1 = 19 are published; p = 2^13 − 1 and
    /// q1 = 2^19 − 1 are our picks.
    pub fn level_128() -> Self {
        ComparisonParams {
            level: 128,
            n: 1565,
            log_q: 113,
            p: 8191,
            q1: 524287,
            m_d: 5760,
            delta_b: 2,
            ell: 10,
            big_n: 1024,
            n_kappa: 219,
        }
    }

    pub fn for_level(level: u32) -> Result<Self> {
        match level {
            80 => Ok(Self::level_80()),
            128 => Ok(Self::level_128()),
            other => Err(Error::Params(format!("no comparison parameters for level {other}"))),
        }
    }

    /// m″ = 2n⌈log q⌉.
    pub fn m_pp(&self) -> u64 {
        2 * self.n * self.log_q
    }
    /// β₁ = ⌊q1 / 2p⌋.
    pub fn beta1(&self) -> u64 {
        self.q1 / (2 * self.p)
    }
    /// Signature width 1.6·k·√n.
    pub fn sigma(&self) -> f64 {
        1.6 * self.log_q as f64 * (self.n as f64).sqrt()
    }
    /// Infinity bound of signatures, σ·log m″.
    pub fn beta2(&self) -> f64 {
        self.sigma() * (self.m_pp() as f64).log2()
    }
    pub fn l0(&self) -> u64 {
        let m = self.m_pp();
        self.ell + 3 * self.n + 7 * m + 3 * m * self.big_n + self.n * self.big_n
    }
}

/// Witness length L of the comparison scheme.
pub fn comparison_l(c: &ComparisonParams) -> f64 {
    let n = c.n as f64;
    let md = c.m_d as f64;
    let mpp = c.m_pp() as f64;
    let ell = c.ell as f64;
    let big_n = c.big_n as f64;
    let d1 = delta(c.q1 - 1) as f64;
    let dp = delta(c.p - 1) as f64;
    let db1 = delta(c.beta1()) as f64;
    let db2 = c.beta2().log2().floor() + 1.0;
    let db = c.delta_b as f64;
    4.0 * md * n * d1 + 6.0 * n * d1 + 9.0 * md * db1 + 8.0 * md * n * d1 * d1 + 2.0 * ell
        + 2.0 * md * dp
        + 3.0 * mpp * db2 * (2.0 * ell + 2.0)
        + 2.0 * mpp
        + 2.0 * mpp * big_n
        + 6.0 * mpp * dp
        + 3.0 * c.l0() as f64 * db
        + (5.0 * ell - 1.0) * 2.0 * n * d1
        + 4.0 * md * dp
        + (2.0 * md + 1.0) * n * d1
}

/// Lower bound on ∥π₂∥ in bytes, N_κ·L·log q with the hidden constant 1.
pub fn pi2_bound(c: &ComparisonParams) -> f64 {
    c.n_kappa as f64 * comparison_l(c) * c.log_q as f64 / 8.0
}

/// Everything the estimate table shows for one level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub preset: String,
    pub level: u32,
    pub clauses: Vec<ClauseRow>,
    pub clause_witness: u64,
    pub clause_m: u64,
    pub aggregate: Aggregates,
    /// Aggregate minus the clause sum; nonzero only through the real k2/ι.
    pub vdec_correction: Aggregates,
    /// Coordinates and |M| entries saved by merging shared variables, when a
    /// conjoined instance was measured.
    pub dedup: Option<(u64, u64)>,
    pub pi1_bits: f64,
    pub comparison_l: f64,
    pub pi2_bits: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseRow {
    pub clause: String,
    pub witness: u64,
    pub m: u64,
}

impl From<&ClauseSize> for ClauseRow {
    fn from(c: &ClauseSize) -> Self {
        ClauseRow { clause: c.clause.into(), witness: c.witness as u64, m: c.m as u64 }
    }
}

impl CostReport {
    /// Report for a preset priced with the cost parameters of `level`.
    /// Clause rows need exact widths and are left empty for estimator-only presets.
    pub fn new(p: &ParamSet, level: u32) -> Result<CostReport> {
        let cost = zk_cost(level)?;
        let cmp = ComparisonParams::for_level(level)?;
        let clauses: Vec<ClauseRow> =
            if p.is_arithmetic() { clause_sizes(p, p.l).iter().map(ClauseRow::from).collect() } else { Vec::new() };
        let clause_witness = clauses.iter().map(|c| c.witness).sum::<u64>();
        let clause_m = clauses.iter().map(|c| c.m).sum::<u64>();
        let aggregate = aggregate_n_l(p);
        let vdec_correction = if clauses.is_empty() {
            Aggregates { n: 0.0, l: 0.0 }
        } else {
            Aggregates { n: aggregate.n - clause_witness as f64, l: aggregate.l - clause_m as f64 }
        };
        let pi1 = proof_size_bits(aggregate.n, aggregate.l, &cost, p.log2_q().ceil());
        let l = comparison_l(&cmp);
        let pi2 = pi2_bound(&cmp) * 8.0;
        Ok(CostReport {
            preset: p.name.clone(),
            level,
            clauses,
            clause_witness,
            clause_m,
            aggregate,
            vdec_correction,
            dedup: None,
            pi1_bits: pi1,
            comparison_l: l,
            pi2_bits: pi2,
            ratio: pi2 / pi1,
        })
    }

    /// Estimator preset and costs of a level.
    pub fn for_level(level: u32) -> Result<CostReport> {
        CostReport::new(&preset_for(level)?, level)
    }

    pub fn with_dedup(mut self, conj: &Conjoined) -> Self {
        let (w, m) = conj.unmerged_sizes();
        self.dedup = Some(((w - conj.inst.witness_len()) as u64, (m - conj.inst.m_size()) as u64));
        self
    }

    pub fn pi1_bytes(&self) -> f64 {
        self.pi1_bits / 8.0
    }
    pub fn pi2_bytes(&self) -> f64 {
        self.pi2_bits / 8.0
    }

    /// Summary rows (key, value) in the order of the printed table.
    fn summary(&self) -> Vec<(&'static str, String)> {
        vec![
            ("preset", self.preset.clone()),
            ("level", self.level.to_string()),
            ("witness_n", format!("{:.2}", self.aggregate.n)),
            ("m_size_l", format!("{:.2}", self.aggregate.l)),
            ("witness_n_ceil", self.aggregate.ceil().0.to_string()),
            ("m_size_l_ceil", self.aggregate.ceil().1.to_string()),
            ("pi1_bits", format!("{:.0}", self.pi1_bits)),
            ("pi1", human(self.pi1_bytes())),
            ("comparison_L", format!("{:.0}", self.comparison_l)),
            ("pi2_bits", format!("{:.0}", self.pi2_bits)),
            ("pi2", format!(">= {}", human(self.pi2_bytes()))),
            ("ratio", format!("{:.0}", self.ratio)),
        ]
    }

    /// Aligned text table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.clauses.is_empty() {
            out.push_str(&format!("{:<10} {:>12} {:>12}\n", "clause", "witness", "|M|"));
            for c in &self.clauses {
                out.push_str(&format!("{:<10} {:>12} {:>12}\n", c.clause, c.witness, c.m));
            }
            out.push_str(&format!("{:<10} {:>12} {:>12}\n", "sum", self.clause_witness, self.clause_m));
            if let Some((w, m)) = self.dedup {
                out.push_str(&format!("{:<10} {:>12} {:>12}\n", "dedup", w, m));
            }
            out.push('\n');
        }
        for (k, v) in self.summary() {
            out.push_str(&format!("{k:<16} {v}\n"));
        }
        out
    }

    /// Key/value CSV of the numeric fields.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["key", "value"]).map_err(io)?;
        for (k, v) in self.numeric() {
            w.write_record([k, &format!("{v:?}")]).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?).map_err(|e| Error::Io(e.to_string()))
    }

    fn numeric(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("level", self.level as f64),
            ("witness_n", self.aggregate.n),
            ("m_size_l", self.aggregate.l),
            ("pi1_bits", self.pi1_bits),
            ("comparison_L", self.comparison_l),
            ("pi2_bits", self.pi2_bits),
            ("ratio", self.ratio),
        ]
    }
}

/// Parse the CSV written by [`CostReport::to_csv`] back into (key, value) pairs.
pub fn parse_csv(text: &str) -> Result<Vec<(String, f64)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Decode(e.to_string()))?;
        let v = rec[1].parse::<f64>().map_err(|e| Error::Decode(e.to_string()))?;
        out.push((rec[0].to_string(), v));
    }
    Ok(out)
}

/// Binary-unit rendering.
pub fn human(bytes: f64) -> String {
    if bytes >= TIB {
        format!("{:.2} TiB", bytes / TIB)
    } else if bytes >= GIB {
        format!("{:.2} GiB", bytes / GIB)
    } else if bytes >= MIB {
        format!("{:.2} MiB", bytes / MIB)
    } else {
        format!("{bytes:.0} B")
    }
}
