//! Directed rewriting of 1-cells: redexes, rule application,
//! normalization and the decision procedure for 2-cell existence.

use std::fmt;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::freecat::{BasicCell, CellCore, Mode, ObjSeq, OneCell};

mod critical;
mod enumerate;
mod modulo;
mod oracle;

pub use critical::{critical_pairs, CriticalPairReport, Peak, PeakFailure};
pub use enumerate::{
    all_sources, canonical_sources, cell_choices, decode, encode, enumerate_terms,
    enumerate_within, random_term, random_term_from, Budget, EnumConfig,
};
pub use oracle::{oracle_connected, OracleError, RewriteGraph};

/// Rule kinds, declared in enumeration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RedexKind {
    Interchange,
    UnitElim,
    Overbraid,
    /// Split point: the crossed block is cut after this many wires.
    Underbraid(usize),
    Pseudonat,
    /// `β_{B,C}@XA ; β_{AC,B}@X ; β_{A,C}@XB ⇒ β_{AB,C}@X ; β_{CA,B}@X`.
    /// A composite of an inverse pseudonaturality step and an overbraid;
    /// without it the overbraid / pseudonaturality peak that shares a cell
    /// has two distinct normal forms.
    YangBaxter,
    /// `β_{B,C}@XA ; β_{AC,B}@X ; β_{BA,C}@X ⇒ β_{AB,C}@X ; β_{CA,B}@X ; β_{B,C}@X`.
    /// Also a composite; joins the peak of the rule above with overbraiding.
    HalfTwist,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Redex {
    pub index: usize,
    pub kind: RedexKind,
}

impl fmt::Display for Redex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RedexKind::Underbraid(s) => write!(f, "Underbraid({})@{}", s, self.index),
            k => write!(f, "{:?}@{}", k, self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteStep {
    pub redex: Redex,
    pub direction: Direction,
    pub before: OneCell,
    pub after: OneCell,
}

impl RewriteStep {
    pub fn reversed(&self) -> RewriteStep {
        RewriteStep {
            redex: self.redex,
            direction: match self.direction {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            },
            before: self.after.clone(),
            after: self.before.clone(),
        }
    }
}

/// A composable sequence of rewrite steps starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewritePath {
    pub start: OneCell,
    pub steps: Vec<RewriteStep>,
}

impl RewritePath {
    pub fn empty(start: OneCell) -> Self {
        RewritePath {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &OneCell {
        self.steps.last().map(|s| &s.after).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> RewritePath {
        RewritePath {
            start: self.end().clone(),
            steps: self.steps.iter().rev().map(RewriteStep::reversed).collect(),
        }
    }

    /// Consecutive steps chain and each step is an instance of its redex.
    pub fn is_coherent(&self, mode: Mode) -> bool {
        let mut cur = &self.start;
        for s in &self.steps {
            if &s.before != cur {
                return false;
            }
            let (from, to) = match s.direction {
                Direction::Forward => (&s.before, &s.after),
                Direction::Inverse => (&s.after, &s.before),
            };
            if rewritten(from, s.redex, mode).as_ref() != Some(to) {
                return false;
            }
            cur = &s.after;
        }
        true
    }
}

impl fmt::Display for RewritePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "   {}", self.start)?;
        for s in &self.steps {
            let arrow = match s.direction {
                Direction::Forward => "=>",
                Direction::Inverse => "<=",
            };
            writeln!(f, "{} {}", arrow, s.redex)?;
            writeln!(f, "   {}", s.after)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("{0} is not a redex of this term")]
    NotARedex(Redex),
    #[error("boundaries differ: {0} -> {1} versus {2} -> {3}")]
    BoundaryMismatch(ObjSeq, ObjSeq, ObjSeq, ObjSeq),
}

fn interchange(a: &BasicCell, b: &BasicCell) -> bool {
    a.position() + a.out_len() <= b.position()
}

fn overbraid(a: &BasicCell, b: &BasicCell) -> bool {
    match (a, b) {
        (
            BasicCell::Cross {
                left: bl, right: c, ..
            },
            BasicCell::Cross {
                left: al,
                right: c2,
                ..
            },
        ) => {
            !al.is_empty()
                && !bl.is_empty()
                && !c.is_empty()
                && c2.len() == c.len()
                && b.position() + al.len() == a.position()
        }
        _ => false,
    }
}

fn underbraid_splits(a: &BasicCell) -> std::ops::Range<usize> {
    match a {
        BasicCell::Cross { left, right, .. } if !left.is_empty() && right.len() >= 2 => {
            1..right.len()
        }
        _ => 0..0,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Where the outputs of `a` sit among the inputs of the crossing `b`.
fn pseudonat(a: &BasicCell, b: &BasicCell) -> Option<Side> {
    let BasicCell::Cross {
        left: u, right: v, ..
    } = b
    else {
        return None;
    };
    if a.is_trivial_crossing() {
        return None;
    }
    let (s, e) = (a.position(), a.position() + a.out_len());
    let p = b.position();
    if !v.is_empty() && p <= s && e <= p + u.len() {
        Some(Side::Left)
    } else if !u.is_empty() && p + u.len() <= s && e <= p + u.len() + v.len() {
        Some(Side::Right)
    } else {
        None
    }
}

/// `β_{B,C}@XA ; β_{AC,B}@X` with `A`, `B`, `C` nonempty: returns
/// `(|X|, |A|)`.
fn slide_head(a: &BasicCell, b: &BasicCell) -> Option<(usize, usize)> {
    let (
        BasicCell::Cross {
            left: bb,
            right: cc,
            ..
        },
        BasicCell::Cross {
            left: l2,
            right: r2,
            ..
        },
    ) = (a, b)
    else {
        return None;
    };
    let x = b.position();
    if a.position() <= x || bb.is_empty() || cc.is_empty() {
        return None;
    }
    let la = a.position() - x;
    (l2.len() == la + cc.len() && r2.len() == bb.len()).then_some((x, la))
}

fn crossing_shape(c: &BasicCell) -> Option<(usize, usize, usize)> {
    match c {
        BasicCell::Cross { left, right, .. } => Some((c.position(), left.len(), right.len())),
        _ => None,
    }
}

/// Third cell `β_{A,C}@XB` after a slide head.
fn yang_baxter(a: &BasicCell, b: &BasicCell, c: &BasicCell) -> bool {
    let Some((x, la)) = slide_head(a, b) else {
        return false;
    };
    crossing_shape(c) == Some((x + block_b(a), la, block_c(a)))
}

/// Third cell `β_{BA,C}@X` after a slide head.
fn half_twist(a: &BasicCell, b: &BasicCell, c: &BasicCell) -> bool {
    let Some((x, la)) = slide_head(a, b) else {
        return false;
    };
    crossing_shape(c) == Some((x, la + block_b(a), block_c(a)))
}

fn block_b(a: &BasicCell) -> usize {
    match a {
        BasicCell::Cross { left, .. } => left.len(),
        _ => 0,
    }
}

fn block_c(a: &BasicCell) -> usize {
    match a {
        BasicCell::Cross { right, .. } => right.len(),
        _ => 0,
    }
}

/// Every redex of `f`, in the canonical order.
pub fn find_redexes(f: &OneCell, mode: Mode) -> Vec<Redex> {
    let cells = f.cells();
    let mut out = Vec::new();
    for i in 0..cells.len() {
        let a = &cells[i];
        let b = cells.get(i + 1);
        if let Some(b) = b {
            if interchange(a, b) {
                out.push(Redex {
                    index: i,
                    kind: RedexKind::Interchange,
                });
            }
        }
        if mode == Mode::Plain {
            continue;
        }
        if a.is_trivial_crossing() {
            out.push(Redex {
                index: i,
                kind: RedexKind::UnitElim,
            });
        }
        if let Some(b) = b {
            if overbraid(a, b) {
                out.push(Redex {
                    index: i,
                    kind: RedexKind::Overbraid,
                });
            }
        }
        for s in underbraid_splits(a) {
            out.push(Redex {
                index: i,
                kind: RedexKind::Underbraid(s),
            });
        }
        if let Some(b) = b {
            if pseudonat(a, b).is_some() {
                out.push(Redex {
                    index: i,
                    kind: RedexKind::Pseudonat,
                });
            }
            if let Some(c) = cells.get(i + 2) {
                if yang_baxter(a, b, c) {
                    out.push(Redex {
                        index: i,
                        kind: RedexKind::YangBaxter,
                    });
                }
                if half_twist(a, b, c) {
                    out.push(Redex {
                        index: i,
                        kind: RedexKind::HalfTwist,
                    });
                }
            }
        }
    }
    out
}

/// The first redex in canonical order, without building the full list.
pub fn first_redex(f: &OneCell, mode: Mode) -> Option<Redex> {
    let cells = f.cells();
    for i in 0..cells.len() {
        let a = &cells[i];
        let b = cells.get(i + 1);
        let at = |kind| Some(Redex { index: i, kind });
        if b.is_some_and(|b| interchange(a, b)) {
            return at(RedexKind::Interchange);
        }
        if mode == Mode::Plain {
            continue;
        }
        if a.is_trivial_crossing() {
            return at(RedexKind::UnitElim);
        }
        if b.is_some_and(|b| overbraid(a, b)) {
            return at(RedexKind::Overbraid);
        }
        if let Some(s) = underbraid_splits(a).next() {
            return at(RedexKind::Underbraid(s));
        }
        if b.is_some_and(|b| pseudonat(a, b).is_some()) {
            return at(RedexKind::Pseudonat);
        }
        if let (Some(b), Some(c)) = (b, cells.get(i + 2)) {
            if yang_baxter(a, b, c) {
                return at(RedexKind::YangBaxter);
            }
            if half_twist(a, b, c) {
                return at(RedexKind::HalfTwist);
            }
        }
    }
    None
}

/// Replaces `n_old` cells starting at `i` by the given cores placed in turn.
fn splice(f: &OneCell, i: usize, n_old: usize, new: &[(CellCore, usize)]) -> OneCell {
    let cells = f.cells();
    let mut wires = cells[i].source().0;
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..i]);
    for (core, pos) in new {
        let c = core.place(&wires, *pos);
        wires = c.target().0;
        out.push(c);
    }
    out.extend_from_slice(&cells[i + n_old..]);
    OneCell::from_parts_unchecked(f.source().clone(), out)
}

fn rewritten(f: &OneCell, r: Redex, mode: Mode) -> Option<OneCell> {
    let cells = f.cells();
    let i = r.index;
    let a = cells.get(i)?;
    let b = cells.get(i + 1);
    if mode == Mode::Plain && r.kind != RedexKind::Interchange {
        return None;
    }
    match r.kind {
        RedexKind::Interchange => {
            let b = b.filter(|b| interchange(a, b))?;
            let b_pos = b.position() - a.out_len() + a.in_len();
            Some(splice(
                f,
                i,
                2,
                &[(b.core(), b_pos), (a.core(), a.position())],
            ))
        }
        RedexKind::UnitElim => a.is_trivial_crossing().then(|| splice(f, i, 1, &[])),
        RedexKind::Overbraid => {
            let b = b.filter(|b| overbraid(a, b))?;
            let (
                BasicCell::Cross {
                    left: bl, right: c, ..
                },
                BasicCell::Cross { left: al, .. },
            ) = (a, b)
            else {
                return None;
            };
            let core = CellCore::Cross {
                left: al.concat(bl),
                right: c.clone(),
            };
            Some(splice(f, i, 2, &[(core, b.position())]))
        }
        RedexKind::Underbraid(s) => {
            if !underbraid_splits(a).contains(&s) {
                return None;
            }
            let BasicCell::Cross { left, right, .. } = a else {
                return None;
            };
            let p = a.position();
            let first = CellCore::Cross {
                left: left.clone(),
                right: right.slice(0, s),
            };
            let second = CellCore::Cross {
                left: left.clone(),
                right: right.slice(s, right.len()),
            };
            Some(splice(f, i, 1, &[(first, p), (second, p + s)]))
        }
        RedexKind::Pseudonat => {
            let b = b?;
            let side = pseudonat(a, b)?;
            let BasicCell::Cross {
                left: u, right: v, ..
            } = b
            else {
                return None;
            };
            let wires = a.source();
            let p = b.position();
            let (lu, lv) = match side {
                Side::Left => (u.len() + a.in_len() - a.out_len(), v.len()),
                Side::Right => (u.len(), v.len() + a.in_len() - a.out_len()),
            };
            let cross = CellCore::Cross {
                left: wires.slice(p, p + lu),
                right: wires.slice(p + lu, p + lu + lv),
            };
            let moved = match side {
                Side::Left => a.position() + v.len(),
                Side::Right => a.position() - u.len(),
            };
            Some(splice(f, i, 2, &[(cross, p), (a.core(), moved)]))
        }
        RedexKind::YangBaxter | RedexKind::HalfTwist => {
            let (b, c) = (b?, cells.get(i + 2)?);
            let fits = match r.kind {
                RedexKind::YangBaxter => yang_baxter(a, b, c),
                _ => half_twist(a, b, c),
            };
            if !fits {
                return None;
            }
            let BasicCell::Cross {
                left: bb,
                right: cc,
                ..
            } = a
            else {
                return None;
            };
            let x = b.position();
            let aa = a.source().slice(x, a.position());
            let mut new = vec![
                (
                    CellCore::Cross {
                        left: aa.concat(bb),
                        right: cc.clone(),
                    },
                    x,
                ),
                (
                    CellCore::Cross {
                        left: cc.concat(&aa),
                        right: bb.clone(),
                    },
                    x,
                ),
            ];
            if r.kind == RedexKind::HalfTwist {
                new.push((
                    CellCore::Cross {
                        left: bb.clone(),
                        right: cc.clone(),
                    },
                    x,
                ));
            }
            Some(splice(f, i, 3, &new))
        }
    }
}

/// Inverse interchange at `k`: cell `k + 1` sits above cell `k`; the
/// result performs it first. `apply` at `Interchange@k` undoes this.
pub fn unapply_interchange(f: &OneCell, k: usize) -> Option<OneCell> {
    let cells = f.cells();
    let (a, b) = (cells.get(k)?, cells.get(k + 1)?);
    if b.position() + b.in_len() > a.position() {
        return None;
    }
    let a_pos = a.position() + b.out_len() - b.in_len();
    Some(splice(
        f,
        k,
        2,
        &[(b.core(), b.position()), (a.core(), a_pos)],
    ))
}

/// Applies `r` forward.
pub fn apply(f: &OneCell, r: Redex, mode: Mode) -> Result<(OneCell, RewriteStep), RewriteError> {
    let after = rewritten(f, r, mode).ok_or(RewriteError::NotARedex(r))?;
    let step = RewriteStep {
        redex: r,
        direction: Direction::Forward,
        before: f.clone(),
        after: after.clone(),
    };
    Ok((after, step))
}

/// Applies `r` without recording a step. Panics if `r` is not a redex.
pub fn apply_unchecked(f: &OneCell, r: Redex, mode: Mode) -> OneCell {
    rewritten(f, r, mode).expect("redex applies")
}

/// Normalizes modulo interchange: rule instances hidden behind cells
/// that commute out of the way are gathered by interchange steps in either
/// direction. The result has no redex at all.
pub fn normalize(f: &OneCell, mode: Mode) -> (OneCell, RewritePath) {
    let run = modulo::Run::new(f.clone(), true).finish(mode);
    let path = RewritePath {
        start: f.clone(),
        steps: run.steps.unwrap_or_default(),
    };
    (run.cur, path)
}

/// The normal form alone, without recording the path.
pub fn normal_form(f: &OneCell, mode: Mode) -> OneCell {
    modulo::Run::new(f.clone(), false).finish(mode).cur
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    FirstRedex,
    LastRedex,
    Random(u64),
}

/// Normalizes by forward steps alone, picking redexes by `strategy`;
/// returns the normal form and the number of steps taken. Agrees with
/// `normalize` wherever the directed system is confluent.
pub fn normalize_with(f: &OneCell, mode: Mode, strategy: Strategy) -> (OneCell, usize) {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(StdRng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = f.clone();
    let mut steps = 0;
    loop {
        let r = match strategy {
            Strategy::FirstRedex => first_redex(&cur, mode),
            _ => {
                let all = find_redexes(&cur, mode);
                if all.is_empty() {
                    None
                } else if let Some(rng) = rng.as_mut() {
                    Some(all[rng.gen_range(0..all.len())])
                } else {
                    all.last().copied()
                }
            }
        };
        let Some(r) = r else { break };
        cur = apply_unchecked(&cur, r, mode);
        steps += 1;
    }
    (cur, steps)
}

/// The 2-cell `f ⇒ g` if one exists: `f` to its normal form, then back up
/// to `g` along the inverse of `g`'s normalization.
pub fn decide_equal(
    f: &OneCell,
    g: &OneCell,
    mode: Mode,
) -> Result<Option<RewritePath>, RewriteError> {
    let (fs, ft) = f.boundary();
    let (gs, gt) = g.boundary();
    if fs != gs || ft != gt {
        return Err(RewriteError::BoundaryMismatch(fs, ft, gs, gt));
    }
    let (nf_f, path_f) = normalize(f, mode);
    let (nf_g, path_g) = normalize(g, mode);
    if nf_f != nf_g {
        return Ok(None);
    }
    let mut path = path_f;
    path.steps
        .extend(path_g.steps.into_iter().rev().map(|s| RewriteStep {
            redex: s.redex,
            direction: match s.direction {
                Direction::Forward => Direction::Inverse,
                Direction::Inverse => Direction::Forward,
            },
            before: s.after,
            after: s.before,
        }));
    Ok(Some(path))
}
