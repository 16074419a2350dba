//! Rewriting modulo interchange: rule instances among cells that some
//! reordering of independent cells makes adjacent.
//!
//! Interchange is oriented, so a cell that commutes with its neighbours
//! can still sit between two cells that form a redex. A run therefore
//! interchange-normalizes, looks for a group of cells that can be gathered
//! into a redex, gathers them by interchanges in either direction, fires
//! the rule, and repeats. Every other rule strictly lowers the overbraid,
//! crossing and trivial-crossing components of the braided measure while
//! interchange leaves them alone, so runs terminate.

use crate::freecat::{BasicCell, Mode, OneCell};

use super::{
    first_redex, rewritten, unapply_interchange, Direction, Redex, RedexKind, RewriteStep,
};

/// `deps[c][m]`: cell `c` lies in the future of cell `m`.
///
/// Wires and the gaps between them carry identities. A cell consumes its
/// input wires, or the gap it is inserted at when it has none; a crossing
/// produces fresh gaps between its outputs, while boundary gaps pass
/// through every cell unchanged.
fn dependencies(f: &OneCell) -> Vec<Vec<bool>> {
    let cells = f.cells();
    let n = f.source().len();
    // producer of each wire and gap id; None for the source
    let mut wire_of: Vec<Option<usize>> = vec![None; n];
    let mut gap_of: Vec<Option<usize>> = vec![None; n + 1];
    let mut wires: Vec<usize> = (0..n).collect();
    let mut gaps: Vec<usize> = (0..=n).collect();
    let mut deps = vec![vec![false; cells.len()]; cells.len()];
    for (c, cell) in cells.iter().enumerate() {
        let (p, k) = (cell.position(), cell.in_len());
        let ins = wires[p..p + k].to_vec();
        let mut direct: Vec<usize> = ins.iter().filter_map(|&w| wire_of[w]).collect();
        if k == 0 {
            direct.extend(gap_of[gaps[p]]);
        }
        for m in direct {
            let past = deps[m].clone();
            for (d, p) in deps[c].iter_mut().zip(past) {
                *d |= p;
            }
            deps[c][m] = true;
        }
        let (outs, inner) = match cell {
            BasicCell::Cross { left, .. } => {
                let mut o = ins[left.len()..].to_vec();
                o.extend_from_slice(&ins[..left.len()]);
                for &w in &o {
                    wire_of[w] = Some(c);
                }
                let inner: Vec<usize> = (gap_of.len()..gap_of.len() + k - 1).collect();
                gap_of.extend(inner.iter().map(|_| Some(c)));
                (o, inner)
            }
            _ => {
                wire_of.push(Some(c));
                (vec![wire_of.len() - 1], Vec::new())
            }
        };
        let mut bounds = vec![gaps[p]];
        bounds.extend(inner);
        bounds.push(gaps[p + k]);
        wires.splice(p..p + k, outs);
        gaps.splice(p..=p + k, bounds);
    }
    deps
}

/// Order of `lo..=hi` placing `group` (ascending) contiguously, or None
/// when a cell outside the group is both after and before group members.
fn gather(deps: &[Vec<bool>], lo: usize, hi: usize, group: &[usize]) -> Option<Vec<usize>> {
    let mut before = Vec::new();
    let mut after = Vec::new();
    for (c, row) in deps.iter().enumerate().take(hi + 1).skip(lo) {
        if group.contains(&c) {
            continue;
        }
        let future = group.iter().any(|&g| g < c && row[g]);
        let past = group.iter().any(|&g| c < g && deps[g][c]);
        match (future, past) {
            (true, true) => return None,
            (true, false) => after.push(c),
            _ => before.push(c),
        }
    }
    let mut order = before;
    order.extend_from_slice(group);
    order.extend(after);
    Some(order)
}

/// A rule instance, after reordering `lo..lo + order.len()` into `order`.
struct Instance {
    lo: usize,
    order: Vec<usize>,
    redex: Redex,
}

fn rule_width(k: RedexKind) -> usize {
    match k {
        RedexKind::Interchange => 0,
        RedexKind::UnitElim | RedexKind::Underbraid(_) => 1,
        RedexKind::YangBaxter | RedexKind::HalfTwist => 3,
        _ => 2,
    }
}

/// Cells `at..at + len` as a term of their own.
fn window(f: &OneCell, at: usize, len: usize) -> OneCell {
    let cells = &f.cells()[at..at + len];
    OneCell::from_parts_unchecked(cells[0].source(), cells.to_vec())
}

/// State of one normalization run.
pub(crate) struct Run {
    pub(crate) cur: OneCell,
    pub(crate) steps: Option<Vec<RewriteStep>>,
    pub(crate) count: usize,
}

impl Run {
    pub(crate) fn new(f: OneCell, record: bool) -> Self {
        Run {
            cur: f,
            steps: record.then(Vec::new),
            count: 0,
        }
    }

    fn step(&mut self, redex: Redex, direction: Direction, next: OneCell) {
        let before = std::mem::replace(&mut self.cur, next);
        self.count += 1;
        if let Some(steps) = self.steps.as_mut() {
            steps.push(RewriteStep {
                redex,
                direction,
                before,
                after: self.cur.clone(),
            });
        }
    }

    fn settle(&mut self) {
        while let Some(r) = first_redex(&self.cur, Mode::Plain) {
            let next = rewritten(&self.cur, r, Mode::Plain).expect("redex applies");
            self.step(r, Direction::Forward, next);
        }
    }

    /// Swaps cells `k` and `k + 1`, which must be independent.
    fn swap(&mut self, k: usize) {
        let redex = Redex {
            index: k,
            kind: RedexKind::Interchange,
        };
        match rewritten(&self.cur, redex, Mode::Plain) {
            Some(g) => self.step(redex, Direction::Forward, g),
            None => {
                let g = unapply_interchange(&self.cur, k).expect("independent cells commute");
                self.step(redex, Direction::Inverse, g);
            }
        }
    }

    fn permute(&mut self, lo: usize, order: &[usize]) {
        let mut rank = vec![0; order.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c - lo] = r;
        }
        for pass in 0..rank.len() {
            for k in 0..rank.len() - 1 - pass {
                if rank[k] > rank[k + 1] {
                    self.swap(lo + k);
                    rank.swap(k, k + 1);
                }
            }
        }
    }

    /// Interchange-normalizes, then fires one rule if any group of cells
    /// can be gathered into a redex. False once the term is normal.
    pub(crate) fn advance(&mut self, mode: Mode) -> bool {
        self.settle();
        if mode == Mode::Plain {
            return false;
        }
        let Some(inst) = next_instance(&self.cur, mode) else {
            return false;
        };
        self.permute(inst.lo, &inst.order);
        let next = rewritten(&self.cur, inst.redex, mode).expect("redex applies");
        self.step(inst.redex, Direction::Forward, next);
        true
    }

    pub(crate) fn finish(mut self, mode: Mode) -> Self {
        while self.advance(mode) {}
        self
    }
}

/// The first rule instance of an interchange-normal term: adjacent ones,
/// then separated pairs, then separated triples, each in index order.
fn next_instance(f: &OneCell, mode: Mode) -> Option<Instance> {
    if let Some(redex) = first_redex(f, mode) {
        return Some(Instance {
            lo: redex.index,
            order: Vec::new(),
            redex,
        });
    }
    let cells = f.cells();
    let n = cells.len();
    if n < 3 {
        return None;
    }
    let deps = dependencies(f);
    let try_group = |group: &[usize]| -> Option<Instance> {
        let (lo, hi) = (group[0], group[group.len() - 1]);
        let order = gather(&deps, lo, hi, group)?;
        let at = lo + order.iter().position(|&c| c == lo)?;
        let mut probe = Run::new(window(f, lo, hi + 1 - lo), false);
        probe.permute(0, &order.iter().map(|c| c - lo).collect::<Vec<_>>());
        let redex = first_redex(&window(&probe.cur, at - lo, group.len()), mode)?;
        (redex.index == 0 && rule_width(redex.kind) == group.len()).then_some(Instance {
            lo,
            order,
            redex: Redex {
                index: at,
                kind: redex.kind,
            },
        })
    };
    // every rule reads outputs of its earlier cells
    let crossing = |c: usize| cells[c].is_crossing();
    let pair = (0..n)
        .flat_map(|i| (i + 2..n).map(move |j| [i, j]))
        .filter(|&[i, j]| crossing(j) && deps[j][i])
        .find_map(|g| try_group(&g));
    if pair.is_some() {
        return pair;
    }
    (0..n)
        .filter(|&i| crossing(i))
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| crossing(j) && deps[j][i])
        .flat_map(|(i, j)| (j + 1..n).map(move |k| [i, j, k]))
        .filter(|&[i, j, k]| k > i + 2 && crossing(k) && deps[k][j])
        .find_map(|g| try_group(&g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_term;
    use crate::signature::example_g0;

    fn term(text: &str) -> OneCell {
        parse_term(&example_g0(), text).unwrap()
    }

    fn run(text: &str) -> Run {
        Run::new(term(text), true).finish(Mode::Braided)
    }

    #[test]
    fn nullary_cell_inside_crossing_outputs_depends_on_it() {
        let d = dependencies(&term("() x [A | A] (A); (A) x [A | A] (); (A A) k (A)"));
        assert!(d[2][1] && d[2][0] && d[1][0]);
    }

    #[test]
    fn boundary_gaps_pass_through() {
        // k sits at the left edge of u's output: a gap the crossing made
        let d = dependencies(&term("() x [A | A] (); (A) u (); (A) k (B)"));
        assert!(d[1][0] && d[2][0] && !d[2][1]);
    }

    #[test]
    fn separated_redex_fires() {
        // the second crossing is stuck above k under oriented interchange
        let r = run("(A A) k (); () x [A | A] (A); (A) x [A | A] ()");
        assert!(first_redex(&r.cur, Mode::Braided).is_none());
        let steps = r.steps.unwrap();
        assert!(steps.iter().any(|s| s.direction == Direction::Inverse));
        assert_eq!(r.cur, run("() x [A | A] (); (A) k (A)").cur);
    }
}
