//! Gluing several instances into one witness with shared segments.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::instance::{RStarInstance, Segment, Violation};

/// The conjoined instance plus the per-clause column maps needed to
/// assemble a global witness from clause witnesses.
#[derive(Clone, Debug)]
pub struct Conjoined {
    pub inst: RStarInstance,
    pub clauses: Vec<String>,
    /// maps[c][local] = global column
    pub maps: Vec<Vec<usize>>,
    /// witness coordinates saved by aliasing
    pub alias_dedup: usize,
    /// identical triples dropped after remapping
    pub triple_dedup: usize,
    /// cumulative row and triple counts after each clause
    pub row_ends: Vec<usize>,
    pub triple_ends: Vec<usize>,
}

fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
    let p = parent.get(x).cloned().unwrap_or_else(|| x.to_string());
    if p == x {
        return p;
    }
    let root = find(parent, &p);
    parent.insert(x.to_string(), root.clone());
    root
}

/// Conjoin `clauses` (name, instance) with `aliases` given as pairs of
/// qualified segment names "clause.segment".
pub fn conjoin(clauses: &[(&str, &RStarInstance)], aliases: &[(&str, &str)]) -> Result<Conjoined> {
    let modulus = clauses.first().map(|(_, i)| i.modulus).unwrap_or(2);
    let mut by_name: BTreeMap<String, (usize, Segment)> = BTreeMap::new();
    for (c, (name, inst)) in clauses.iter().enumerate() {
        if inst.modulus != modulus {
            return Err(Error::ModulusMismatch(format!("clause `{name}` is mod {} not {modulus}", inst.modulus)));
        }
        for s in &inst.segments {
            by_name.insert(format!("{name}.{}", s.name), (c, s.clone()));
        }
    }

    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    for &(a, b) in aliases {
        let (_, sa) = by_name.get(a).ok_or_else(|| Error::UnknownSegment(a.to_string()))?;
        let (_, sb) = by_name.get(b).ok_or_else(|| Error::UnknownSegment(b.to_string()))?;
        if sa.len != sb.len {
            return Err(Error::AliasLength(a.to_string(), b.to_string()));
        }
        if sa.domain != sb.domain {
            return Err(Error::AliasLift(a.to_string(), b.to_string()));
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            // which root wins is irrelevant; allocation order decides the kept name
            parent.insert(rb, ra);
        }
    }

    let mut out = RStarInstance {
        modulus,
        width: 0,
        rows: Vec::new(),
        target: Vec::new(),
        triples: Vec::new(),
        segments: Vec::new(),
        aliases: Vec::new(),
    };
    let mut placed: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut maps = Vec::with_capacity(clauses.len());
    let mut alias_dedup = 0;
    let mut row_ends = Vec::with_capacity(clauses.len());
    for (name, inst) in clauses {
        let mut map = vec![usize::MAX; inst.width];
        for s in &inst.segments {
            let qualified = format!("{name}.{}", s.name);
            let root = find(&mut parent, &qualified);
            let start = match placed.get(&root) {
                Some((start, kept)) => {
                    out.aliases.push((qualified.clone(), kept.clone()));
                    alias_dedup += s.len;
                    *start
                }
                None => {
                    let start = out.width;
                    out.segments.push(Segment { name: qualified.clone(), start, len: s.len, domain: s.domain });
                    out.width += s.len;
                    placed.insert(root, (start, qualified));
                    start
                }
            };
            for k in 0..s.len {
                map[s.start + k] = start + k;
            }
        }
        if map.iter().any(|&g| g == usize::MAX) {
            return Err(Error::Dimension(format!("clause `{name}` has columns outside its segments")));
        }
        for (row, &t) in inst.rows.iter().zip(&inst.target) {
            out.add_row(row.iter().map(|&(c, a)| (map[c], a)).collect(), t);
        }
        row_ends.push(out.rows.len());
        maps.push(map);
    }

    let mut seen = BTreeSet::new();
    let mut triple_dedup = 0;
    let mut triple_ends = Vec::with_capacity(clauses.len());
    for ((_, inst), map) in clauses.iter().zip(&maps) {
        for &(h, i, j) in &inst.triples {
            let (h, i, j) = (map[h], map[i], map[j]);
            // x[h] = x[i]·x[j] is symmetric in i, j
            let key = (h, i.min(j), i.max(j));
            if seen.insert(key) {
                out.triples.push((h, i, j));
            } else {
                triple_dedup += 1;
            }
        }
        triple_ends.push(out.triples.len());
    }

    Ok(Conjoined {
        inst: out,
        clauses: clauses.iter().map(|(n, _)| n.to_string()).collect(),
        maps,
        alias_dedup,
        triple_dedup,
        row_ends,
        triple_ends,
    })
}

impl Conjoined {
    /// Scatter clause witnesses into the global layout. Shared coordinates
    /// keep the first clause's value; a disagreeing later clause then fails
    /// its own rows on check.
    pub fn assemble(&self, witnesses: &[Vec<u64>]) -> Result<Vec<u64>> {
        if witnesses.len() != self.maps.len() {
            return Err(Error::Dimension(format!("{} clause witnesses for {} clauses", witnesses.len(), self.maps.len())));
        }
        let mut x = vec![0u64; self.inst.width];
        let mut set = vec![false; self.inst.width];
        for (w, map) in witnesses.iter().zip(&self.maps) {
            if w.len() != map.len() {
                return Err(Error::WitnessLength { got: w.len(), want: map.len() });
            }
            for (&v, &g) in w.iter().zip(map) {
                if !set[g] {
                    x[g] = v % self.inst.modulus;
                    set[g] = true;
                }
            }
        }
        Ok(x)
    }

    /// The clause owning a violated row or triple; rows appended after
    /// conjoining report as "link".
    pub fn clause_of(&self, v: &Violation) -> &str {
        let (k, ends) = match *v {
            Violation::Row(r) => (r, &self.row_ends),
            Violation::Triple(t) => (t, &self.triple_ends),
        };
        ends.iter().position(|&e| k < e).map_or("link", |c| self.clauses[c].as_str())
    }

    /// Sum of clause sizes before merging: (witness, |M|).
    pub fn unmerged_sizes(&self) -> (usize, usize) {
        (self.inst.width + self.alias_dedup, self.inst.triples.len() + self.triple_dedup)
    }
}
