//! Exhaustive and random generation of 1-cells over a multigraph.

use std::collections::HashMap;

use rand::Rng;

use crate::freecat::{BasicCell, Mode, Name, ObjSeq, OneCell};
use crate::signature::Multigraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub mode: Mode,
    pub max_cells: usize,
    /// Longest source sequence considered.
    pub max_source_len: usize,
}

/// A bound on the size of enumerated terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    /// At most this many basic cells.
    Cells(usize),
    /// Total cost at most this: a crossing `β_{L,R}` costs `|L|·|R|` (its
    /// length as a braid word), a trivial crossing 2, a multiarrow 1.
    /// Without multiarrows, no forward rewrite raises this cost.
    BraidLength(usize),
}

impl Budget {
    pub fn cost(&self, c: &BasicCell) -> usize {
        match (self, c) {
            (Budget::Cells(_), _) => 1,
            (Budget::BraidLength(_), BasicCell::Cross { left, right, .. }) => {
                if c.is_trivial_crossing() {
                    2
                } else {
                    left.len() * right.len()
                }
            }
            (Budget::BraidLength(_), BasicCell::Multi { .. }) => 1,
        }
    }

    pub fn limit(&self) -> usize {
        match self {
            Budget::Cells(n) | Budget::BraidLength(n) => *n,
        }
    }

    pub fn total(&self, f: &OneCell) -> usize {
        f.cells().iter().map(|c| self.cost(c)).sum()
    }

    pub fn admits(&self, f: &OneCell) -> bool {
        self.total(f) <= self.limit()
    }
}

/// Every object sequence of length at most `max_len`, shortest first.
pub fn all_sources(mg: &Multigraph, max_len: usize) -> Vec<ObjSeq> {
    let objs: Vec<Name> = mg.objects().cloned().collect();
    let mut out = vec![ObjSeq::empty()];
    let mut layer = vec![ObjSeq::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for o in &objs {
                let mut v = s.0.clone();
                v.push(o.clone());
                next.push(ObjSeq(v));
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Sources up to renaming of the objects no arrow mentions: those objects
/// must first occur in declaration order. Such renamings act freely on
/// terms, so one representative per orbit suffices.
pub fn canonical_sources(mg: &Multigraph, max_len: usize) -> Vec<ObjSeq> {
    let free = mg.free_objects();
    all_sources(mg, max_len)
        .into_iter()
        .filter(|s| {
            let mut seen = 0;
            for o in s.iter() {
                if let Some(k) = free.iter().position(|f| f == o) {
                    if k > seen {
                        return false;
                    }
                    if k == seen {
                        seen += 1;
                    }
                }
            }
            true
        })
        .collect()
}

/// Every basic cell with source `wires`, in a fixed order.
pub fn cell_choices(mg: &Multigraph, wires: &[Name], mode: Mode) -> Vec<BasicCell> {
    let n = wires.len();
    let seq = |a: usize, b: usize| ObjSeq(wires[a..b].to_vec());
    let mut out = Vec::new();
    for arrow in mg.arrows() {
        let k = arrow.inputs.len();
        for p in 0..=n.saturating_sub(k) {
            if p + k <= n && wires[p..p + k] == arrow.inputs.0[..] {
                out.push(BasicCell::multi(seq(0, p), arrow.clone(), seq(p + k, n)));
            }
        }
    }
    if mode == Mode::Braided {
        for p in 0..=n {
            for l in 0..=n - p {
                for r in 0..=n - p - l {
                    if l + r > 0 {
                        out.push(BasicCell::cross(
                            seq(0, p),
                            seq(p, p + l),
                            seq(p + l, p + l + r),
                            seq(p + l + r, n),
                        ));
                    }
                }
            }
        }
    }
    out
}

/// Calls `visit` on every term with the given source and at most
/// `max_cells` cells, including the identity.
pub fn enumerate_terms(
    mg: &Multigraph,
    source: &ObjSeq,
    mode: Mode,
    max_cells: usize,
    visit: &mut dyn FnMut(&OneCell),
) {
    enumerate_within(mg, source, mode, Budget::Cells(max_cells), visit)
}

/// Calls `visit` on every term with the given source within `budget`.
pub fn enumerate_within(
    mg: &Multigraph,
    source: &ObjSeq,
    mode: Mode,
    budget: Budget,
    visit: &mut dyn FnMut(&OneCell),
) {
    struct Walk<'a> {
        mg: &'a Multigraph,
        source: &'a ObjSeq,
        mode: Mode,
        budget: Budget,
        stack: Vec<BasicCell>,
        cache: HashMap<Vec<Name>, Vec<(BasicCell, usize)>>,
    }
    fn go(w: &mut Walk<'_>, left: usize, wires: &[Name], visit: &mut dyn FnMut(&OneCell)) {
        visit(&OneCell::from_parts_unchecked(
            w.source.clone(),
            w.stack.clone(),
        ));
        let (mg, mode, budget) = (w.mg, w.mode, w.budget);
        let choices = w
            .cache
            .entry(wires.to_vec())
            .or_insert_with(|| {
                cell_choices(mg, wires, mode)
                    .into_iter()
                    .map(|c| {
                        let k = budget.cost(&c);
                        (c, k)
                    })
                    .collect()
            })
            .clone();
        for (c, k) in choices {
            if k > left {
                continue;
            }
            let next = c.target().0;
            w.stack.push(c);
            go(w, left - k, &next, visit);
            w.stack.pop();
        }
    }
    let mut w = Walk {
        mg,
        source,
        mode,
        budget,
        stack: Vec::new(),
        cache: HashMap::new(),
    };
    go(&mut w, budget.limit(), &source.0, visit);
}

/// Compact code of a term relative to its source: four bytes per cell.
pub fn encode(mg: &Multigraph, f: &OneCell) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 * f.len());
    for c in f.cells() {
        match c {
            BasicCell::Multi { arrow, .. } => {
                let k = mg
                    .arrows()
                    .position(|a| a.name == arrow.name)
                    .expect("arrow of the multigraph");
                out.extend([k as u8 + 1, c.position() as u8, 0, 0]);
            }
            BasicCell::Cross { left, right, .. } => {
                out.extend([0, c.position() as u8, left.len() as u8, right.len() as u8]);
            }
        }
    }
    out
}

/// Inverse of [`encode`].
pub fn decode(mg: &Multigraph, source: &ObjSeq, code: &[u8]) -> OneCell {
    let arrows: Vec<_> = mg.arrows().cloned().collect();
    let mut wires = source.0.clone();
    let mut cells = Vec::with_capacity(code.len() / 4);
    for ch in code.chunks(4) {
        let p = ch[1] as usize;
        let core = if ch[0] == 0 {
            let (l, r) = (ch[2] as usize, ch[3] as usize);
            crate::freecat::CellCore::Cross {
                left: ObjSeq(wires[p..p + l].to_vec()),
                right: ObjSeq(wires[p + l..p + l + r].to_vec()),
            }
        } else {
            crate::freecat::CellCore::Multi(arrows[ch[0] as usize - 1].clone())
        };
        let c = core.place(&wires, p);
        wires = c.target().0;
        cells.push(c);
    }
    OneCell::from_parts_unchecked(source.clone(), cells)
}

/// A random valid term: a random source of at most `max_source_len`
/// objects followed by up to `max_cells` uniformly chosen cells.
pub fn random_term<R: Rng>(mg: &Multigraph, cfg: EnumConfig, rng: &mut R) -> OneCell {
    let objs: Vec<Name> = mg.objects().cloned().collect();
    let len = rng.gen_range(0..=cfg.max_source_len);
    let source = ObjSeq(
        (0..len)
            .map(|_| objs[rng.gen_range(0..objs.len())].clone())
            .collect(),
    );
    random_term_from(mg, &source, cfg.mode, cfg.max_cells, rng)
}

/// Up to `max_cells` uniformly chosen cells starting at `source`.
pub fn random_term_from<R: Rng>(
    mg: &Multigraph,
    source: &ObjSeq,
    mode: Mode,
    max_cells: usize,
    rng: &mut R,
) -> OneCell {
    let n = rng.gen_range(0..=max_cells);
    let mut wires = source.0.clone();
    let mut cells = Vec::with_capacity(n);
    for _ in 0..n {
        let choices = cell_choices(mg, &wires, mode);
        if choices.is_empty() {
            break;
        }
        let c = choices[rng.gen_range(0..choices.len())].clone();
        wires = c.target().0;
        cells.push(c);
    }
    OneCell::from_parts_unchecked(source.clone(), cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::example_g0;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn pqr() -> Multigraph {
        let mut mg = Multigraph::new();
        for o in ["P", "Q", "R"] {
            mg.add_object(o).unwrap();
        }
        mg
    }

    #[test]
    fn source_counts() {
        assert_eq!(all_sources(&pqr(), 3).len(), 1 + 3 + 9 + 27);
        // (), P, PP, PQ, PPP, PPQ, PQP, PQQ, PQR
        assert_eq!(canonical_sources(&pqr(), 3).len(), 9);
        assert_eq!(canonical_sources(&example_g0(), 2).len(), 1 + 6 + 36);
    }

    #[test]
    fn crossing_choices_on_three_wires() {
        let wires = ObjSeq::from_names(&["P", "Q", "R"]).0;
        assert_eq!(cell_choices(&pqr(), &wires, Mode::Braided).len(), 16);
        assert!(cell_choices(&pqr(), &wires, Mode::Plain).is_empty());
    }

    #[test]
    fn enumeration_count_matches_choices() {
        let mg = pqr();
        let src = ObjSeq::from_names(&["P", "Q"]);
        let mut n = 0;
        enumerate_terms(&mg, &src, Mode::Braided, 3, &mut |_| n += 1);
        assert_eq!(n, 1 + 7 + 49 + 343);
    }

    #[test]
    fn encode_decode_round_trip() {
        let mg = example_g0();
        let mut rng = StdRng::seed_from_u64(3);
        let cfg = EnumConfig {
            mode: Mode::Braided,
            max_cells: 6,
            max_source_len: 4,
        };
        for _ in 0..200 {
            let f = random_term(&mg, cfg, &mut rng);
            assert_eq!(decode(&mg, f.source(), &encode(&mg, &f)), f);
        }
    }
}
