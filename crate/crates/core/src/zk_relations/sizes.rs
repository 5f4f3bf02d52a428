//! Closed-form witness length and |M| of every clause, as functions of the
//! parameters alone. The compilers must reproduce these counts exactly.

use crate::lattice_core::ParamSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClauseSize {
    pub clause: &'static str,
    pub witness: usize,
    pub m: usize,
}

/// ⌈log2 x⌉ on a real argument, as the closed form is written.
fn ceil_log(x: f64) -> usize {
    x.log2().ceil() as usize
}

/// Per-clause sizes for a Merkle tree of the given depth, in statement order.
pub fn clause_sizes(p: &ParamSet, depth: usize) -> Vec<ClauseSize> {
    let (n, n1, md, m3) = (p.n, p.n1, p.m_d, p.m3);
    let (k1, kp, k2, kv) = (p.k1(), p.k_p(), p.k2(), p.k_vdec());
    let fast = p.b_blocks
        * p.lambda
        * ceil_log((md * n1 * kv) as f64 * ((1u64 << p.iota) - 1) as f64 / p.b_blocks as f64);
    let l_x = 1 + p.k_qprime() + p.m1 * p.k_alpha1() + p.m2 * p.k_alpha2() + m3 + 2 * n;
    let h = p.m_s / 2;
    let lb = p.l * p.big_n;
    vec![
        ClauseSize { clause: "wprf_y", witness: n1 + md * (2 + k1), m: md * k1 },
        ClauseSize { clause: "pk_map", witness: md + m3 + md * kp, m: m3 + md * kp },
        ClauseSize { clause: "dacc", witness: p.k_gamma1() * p.m_a + lb, m: p.k_gamma1() * p.m_a + lb },
        ClauseSize { clause: "sign", witness: l_x, m: l_x - n - 1 },
        ClauseSize { clause: "tag_t", witness: n1 + md * (2 * n1 + 1 + k1), m: md * (k1 + n1) },
        ClauseSize { clause: "tag_tc", witness: n1 + md * (2 * n1 + 2 + k1), m: md * (k1 + n1) },
        ClauseSize { clause: "tag_eq", witness: 2 * md, m: 0 },
        ClauseSize {
            clause: "tagbase",
            witness: fast + p.n_e1 * k2 + md * n1 * kv + 3 * md * n1,
            m: fast + p.n_e1 * k2,
        },
        ClauseSize { clause: "merkle", witness: depth * (2 + 4 * n1 + 2 * h), m: depth * (1 + 2 * n1 + 2 * h) },
    ]
}

/// Plain sums over all clauses: (witness, |M|).
pub fn clause_totals(p: &ParamSet, depth: usize) -> (usize, usize) {
    clause_sizes(p, depth).iter().fold((0, 0), |(w, m), c| (w + c.witness, m + c.m))
}
