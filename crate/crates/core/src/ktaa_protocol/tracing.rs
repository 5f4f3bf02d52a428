use std::collections::BTreeSet;

use crate::lattice_core::inv_mod;

use super::ap::AuthRecord;
use super::gm::ListEntry;

/// Who a duplicate tag points at.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Traced {
    User(String),
    /// The recovered key is not in LIST: the GM issued it off the books.
    Gm,
}

/// Scan the log for pairs with equal t, distinct c and valid proofs; each
/// pair yields y = (c_i − c_j)^{-1}·(ť_i − ť_j) mod p. An empty set means
/// nobody is traced.
pub fn public_tracing(p: u64, list: &[ListEntry], log: &[AuthRecord]) -> BTreeSet<Traced> {
    let mut out = BTreeSet::new();
    let valid: Vec<&AuthRecord> = log.iter().filter(|r| r.valid).collect();
    for (i, a) in valid.iter().enumerate() {
        for b in &valid[i + 1..] {
            if a.t != b.t || a.c % p == b.c % p || a.t_check.len() != b.t_check.len() {
                continue;
            }
            let Some(inv) = inv_mod((a.c + p - b.c % p) % p, p) else { continue };
            let y: Vec<u64> =
                a.t_check.iter().zip(&b.t_check).map(|(x, z)| (x % p + p - z % p) % p * inv % p).collect();
            out.insert(match list.iter().find(|e| e.y == y) {
                Some(e) => Traced::User(e.id.clone()),
                None => Traced::Gm,
            });
        }
    }
    out
}
