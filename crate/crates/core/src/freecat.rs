//! The free (braided) Gray monoid on a multigraph.
//!
//! Objects are finite sequences of generating objects. A 1-cell is a
//! composable sequence of basic cells: multiarrow cells (a generating arrow
//! whiskered by bare wires on both sides) and, in braided mode, positive
//! crossings of two adjacent blocks of wires. Every basic cell stores its
//! full prefix and suffix, so positions are always derived, never stored.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::signature::Multigraph;

pub type Name = Arc<str>;

/// Which free Gray monoid a 1-cell lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Plain,
    Braided,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Plain => f.write_str("plain"),
            Mode::Braided => f.write_str("braided"),
        }
    }
}

/// A sequence of generating objects; the empty sequence is the unit object.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjSeq(pub Vec<Name>);

impl ObjSeq {
    pub fn empty() -> Self {
        ObjSeq(Vec::new())
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Self {
        ObjSeq(names.iter().map(|s| Name::from(s.as_ref())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Name] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Name> {
        self.0.iter()
    }

    pub fn concat(&self, other: &ObjSeq) -> ObjSeq {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        ObjSeq(v)
    }

    pub fn slice(&self, from: usize, to: usize) -> ObjSeq {
        ObjSeq(self.0[from..to].to_vec())
    }
}

impl From<Vec<Name>> for ObjSeq {
    fn from(v: Vec<Name>) -> Self {
        ObjSeq(v)
    }
}

impl fmt::Display for ObjSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, o) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(o)?;
        }
        f.write_str(")")
    }
}

/// A generating multiarrow together with its typing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub name: Name,
    pub inputs: ObjSeq,
    pub output: Name,
}

/// The positional content of a basic cell, without its surrounding wires.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CellCore {
    Multi(Arc<Arrow>),
    Cross { left: ObjSeq, right: ObjSeq },
}

impl CellCore {
    pub fn in_len(&self) -> usize {
        match self {
            CellCore::Multi(a) => a.inputs.len(),
            CellCore::Cross { left, right } => left.len() + right.len(),
        }
    }

    pub fn out_len(&self) -> usize {
        match self {
            CellCore::Multi(_) => 1,
            CellCore::Cross { left, right } => left.len() + right.len(),
        }
    }

    /// Places this core on `wires` at position `pos`. The caller guarantees
    /// that the input footprint fits.
    pub fn place(&self, wires: &[Name], pos: usize) -> BasicCell {
        let prefix = ObjSeq(wires[..pos].to_vec());
        let suffix = ObjSeq(wires[pos + self.in_len()..].to_vec());
        match self {
            CellCore::Multi(arrow) => BasicCell::Multi {
                prefix,
                arrow: arrow.clone(),
                suffix,
            },
            CellCore::Cross { left, right } => BasicCell::Cross {
                prefix,
                left: left.clone(),
                right: right.clone(),
                suffix,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BasicCell {
    Multi {
        prefix: ObjSeq,
        arrow: Arc<Arrow>,
        suffix: ObjSeq,
    },
    /// Positive crossing `left ⊗ right → right ⊗ left`.
    Cross {
        prefix: ObjSeq,
        left: ObjSeq,
        right: ObjSeq,
        suffix: ObjSeq,
    },
}

impl BasicCell {
    pub fn multi(prefix: ObjSeq, arrow: Arc<Arrow>, suffix: ObjSeq) -> Self {
        BasicCell::Multi {
            prefix,
            arrow,
            suffix,
        }
    }

    pub fn cross(prefix: ObjSeq, left: ObjSeq, right: ObjSeq, suffix: ObjSeq) -> Self {
        BasicCell::Cross {
            prefix,
            left,
            right,
            suffix,
        }
    }

    pub fn prefix(&self) -> &ObjSeq {
        match self {
            BasicCell::Multi { prefix, .. } | BasicCell::Cross { prefix, .. } => prefix,
        }
    }

    pub fn suffix(&self) -> &ObjSeq {
        match self {
            BasicCell::Multi { suffix, .. } | BasicCell::Cross { suffix, .. } => suffix,
        }
    }

    pub fn position(&self) -> usize {
        self.prefix().len()
    }

    pub fn core(&self) -> CellCore {
        match self {
            BasicCell::Multi { arrow, .. } => CellCore::Multi(arrow.clone()),
            BasicCell::Cross { left, right, .. } => CellCore::Cross {
                left: left.clone(),
                right: right.clone(),
            },
        }
    }

    pub fn in_len(&self) -> usize {
        match self {
            BasicCell::Multi { arrow, .. } => arrow.inputs.len(),
            BasicCell::Cross { left, right, .. } => left.len() + right.len(),
        }
    }

    pub fn out_len(&self) -> usize {
        match self {
            BasicCell::Multi { .. } => 1,
            BasicCell::Cross { left, right, .. } => left.len() + right.len(),
        }
    }

    pub fn is_crossing(&self) -> bool {
        matches!(self, BasicCell::Cross { .. })
    }

    /// A crossing with one side empty.
    pub fn is_trivial_crossing(&self) -> bool {
        matches!(self, BasicCell::Cross { left, right, .. } if left.is_empty() || right.is_empty())
    }

    pub fn source(&self) -> ObjSeq {
        let mut v = self.prefix().0.clone();
        match self {
            BasicCell::Multi { arrow, .. } => v.extend(arrow.inputs.iter().cloned()),
            BasicCell::Cross { left, right, .. } => {
                v.extend(left.iter().cloned());
                v.extend(right.iter().cloned());
            }
        }
        v.extend(self.suffix().iter().cloned());
        ObjSeq(v)
    }

    pub fn target(&self) -> ObjSeq {
        let mut v = self.prefix().0.clone();
        match self {
            BasicCell::Multi { arrow, .. } => v.push(arrow.output.clone()),
            BasicCell::Cross { left, right, .. } => {
                v.extend(right.iter().cloned());
                v.extend(left.iter().cloned());
            }
        }
        v.extend(self.suffix().iter().cloned());
        ObjSeq(v)
    }

    pub fn whiskered(&self, pre: &ObjSeq, suf: &ObjSeq) -> BasicCell {
        match self {
            BasicCell::Multi {
                prefix,
                arrow,
                suffix,
            } => BasicCell::Multi {
                prefix: pre.concat(prefix),
                arrow: arrow.clone(),
                suffix: suffix.concat(suf),
            },
            BasicCell::Cross {
                prefix,
                left,
                right,
                suffix,
            } => BasicCell::Cross {
                prefix: pre.concat(prefix),
                left: left.clone(),
                right: right.clone(),
                suffix: suffix.concat(suf),
            },
        }
    }
}

impl fmt::Display for BasicCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasicCell::Multi {
                prefix,
                arrow,
                suffix,
            } => write!(f, "{} {} {}", prefix, arrow.name, suffix),
            BasicCell::Cross {
                prefix,
                left,
                right,
                suffix,
            } => {
                write!(f, "{} x [", prefix)?;
                write_bare(f, left)?;
                f.write_str(" | ")?;
                write_bare(f, right)?;
                write!(f, "] {}", suffix)
            }
        }
    }
}

fn write_bare(f: &mut fmt::Formatter<'_>, seq: &ObjSeq) -> fmt::Result {
    for (i, o) in seq.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        f.write_str(o)?;
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FreeCatError {
    #[error("cell {index} expects source {expected} but receives {found}")]
    NotComposable {
        index: usize,
        expected: ObjSeq,
        found: ObjSeq,
    },
    #[error("boundary mismatch: target {target} is not source {source_seq}")]
    BoundaryMismatch { target: ObjSeq, source_seq: ObjSeq },
}

/// A 1-cell of the free (braided) Gray monoid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneCell {
    source: ObjSeq,
    cells: Vec<BasicCell>,
}

impl OneCell {
    pub fn identity(objects: ObjSeq) -> Self {
        OneCell {
            source: objects,
            cells: Vec::new(),
        }
    }

    /// Builds a 1-cell, checking that consecutive cells chain.
    pub fn new(source: ObjSeq, cells: Vec<BasicCell>) -> Result<Self, FreeCatError> {
        let mut wires = source.clone();
        for (index, cell) in cells.iter().enumerate() {
            let expected = cell.source();
            if expected != wires {
                return Err(FreeCatError::NotComposable {
                    index,
                    expected,
                    found: wires,
                });
            }
            wires = cell.target();
        }
        Ok(OneCell { source, cells })
    }

    /// Builds a non-empty 1-cell whose source is read off its first cell.
    pub fn from_cells(cells: Vec<BasicCell>) -> Result<Self, FreeCatError> {
        let source = cells.first().map(BasicCell::source).unwrap_or_default();
        OneCell::new(source, cells)
    }

    /// Skips the composability check; callers construct cells by `place`.
    pub(crate) fn from_parts_unchecked(source: ObjSeq, cells: Vec<BasicCell>) -> Self {
        OneCell { source, cells }
    }

    pub fn single(cell: BasicCell) -> Self {
        OneCell {
            source: cell.source(),
            cells: vec![cell],
        }
    }

    pub fn source(&self) -> &ObjSeq {
        &self.source
    }

    pub fn target(&self) -> ObjSeq {
        self.cells
            .last()
            .map(BasicCell::target)
            .unwrap_or_else(|| self.source.clone())
    }

    pub fn boundary(&self) -> (ObjSeq, ObjSeq) {
        (self.source.clone(), self.target())
    }

    pub fn cells(&self) -> &[BasicCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// The wire sequence entering each cell, followed by the final target.
    pub fn stages(&self) -> Vec<ObjSeq> {
        let mut out = Vec::with_capacity(self.cells.len() + 1);
        out.push(self.source.clone());
        for c in &self.cells {
            out.push(c.target());
        }
        out
    }

    /// `self` followed by `g`.
    pub fn compose(&self, g: &OneCell) -> Result<OneCell, FreeCatError> {
        let target = self.target();
        if target != g.source {
            return Err(FreeCatError::BoundaryMismatch {
                target,
                source_seq: g.source.clone(),
            });
        }
        let mut cells = self.cells.clone();
        cells.extend(g.cells.iter().cloned());
        Ok(OneCell {
            source: self.source.clone(),
            cells,
        })
    }

    /// `self ⊗ g`, decomposed with all cells of `self` first.
    pub fn tensor(&self, g: &OneCell) -> OneCell {
        let left = self.whisker(&ObjSeq::empty(), &g.source);
        let right = g.whisker(&self.target(), &ObjSeq::empty());
        let mut cells = left.cells;
        cells.extend(right.cells);
        OneCell {
            source: self.source.concat(&g.source),
            cells,
        }
    }

    pub fn tensor_all<'a, I: IntoIterator<Item = &'a OneCell>>(items: I) -> OneCell {
        items
            .into_iter()
            .fold(OneCell::identity(ObjSeq::empty()), |acc, f| acc.tensor(f))
    }

    pub fn whisker(&self, pre: &ObjSeq, suf: &ObjSeq) -> OneCell {
        OneCell {
            source: pre.concat(&self.source).concat(suf),
            cells: self.cells.iter().map(|c| c.whiskered(pre, suf)).collect(),
        }
    }

    pub fn crossing_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_crossing()).count()
    }

    /// Sorted list of arrow names occurring in the 1-cell.
    pub fn arrow_multiset(&self) -> Vec<Name> {
        let mut v: Vec<Name> = self
            .cells
            .iter()
            .filter_map(|c| match c {
                BasicCell::Multi { arrow, .. } => Some(arrow.name.clone()),
                BasicCell::Cross { .. } => None,
            })
            .collect();
        v.sort();
        v
    }

    pub fn wire_stats(&self) -> WireTrace {
        let mut stages = Vec::with_capacity(self.cells.len() + 1);
        let mut cur: Vec<WireStat> = (0..self.source.len()).map(|_| WireStat::fresh()).collect();
        for cell in &self.cells {
            let pos = cell.position();
            let next = match cell {
                BasicCell::Multi { arrow, .. } => {
                    let n = arrow.inputs.len();
                    let mut width = BigUint::one();
                    let mut weight = BigUint::one();
                    for w in &cur[pos..pos + n] {
                        width += &w.width;
                        weight += &w.weight;
                    }
                    let mut next = cur[..pos].to_vec();
                    next.push(WireStat { width, weight });
                    next.extend_from_slice(&cur[pos + n..]);
                    next
                }
                BasicCell::Cross { left, right, .. } => {
                    let l = left.len();
                    let r = right.len();
                    let bump = |w: &WireStat| WireStat {
                        width: w.width.clone(),
                        weight: &w.weight + &w.width,
                    };
                    let mut next = cur[..pos].to_vec();
                    next.extend(cur[pos + l..pos + l + r].iter().map(bump));
                    next.extend(cur[pos..pos + l].iter().map(bump));
                    next.extend_from_slice(&cur[pos + l + r..]);
                    next
                }
            };
            stages.push(std::mem::replace(&mut cur, next));
        }
        stages.push(cur);
        WireTrace { stages }
    }
}

impl fmt::Display for OneCell {
    /// Prints in the term syntax: `id (A B)` or `cell; cell; ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cells.is_empty() {
            return write!(f, "id {}", self.source);
        }
        for (i, c) in self.cells.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireStat {
    pub width: BigUint,
    pub weight: BigUint,
}

impl WireStat {
    fn fresh() -> Self {
        WireStat {
            width: BigUint::one(),
            weight: BigUint::zero(),
        }
    }
}

/// Width and weight of every wire at every stage; stage `i` is the wire
/// sequence entering cell `i`, the last stage is the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireTrace {
    pub stages: Vec<Vec<WireStat>>,
}

impl WireTrace {
    pub fn width_sum(&self, stage: usize, from: usize, to: usize) -> BigUint {
        self.stages[stage][from..to].iter().map(|w| &w.width).sum()
    }

    pub fn weight_sum(&self, stage: usize, from: usize, to: usize) -> BigUint {
        self.stages[stage][from..to].iter().map(|w| &w.weight).sum()
    }

    pub fn last(&self) -> &[WireStat] {
        self.stages.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CellIssue {
    NotComposable(FreeCatError),
    UnknownObject { index: Option<usize>, object: Name },
    UnknownArrow { index: usize, arrow: Name },
    ArrowTypeMismatch { index: usize, arrow: Name },
    CrossingInPlainMode { index: usize },
    EmptyCrossing { index: usize },
}

impl fmt::Display for CellIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellIssue::NotComposable(e) => write!(f, "{}", e),
            CellIssue::UnknownObject {
                index: Some(i),
                object,
            } => write!(f, "cell {}: unknown object {}", i, object),
            CellIssue::UnknownObject {
                index: None,
                object,
            } => write!(f, "source: unknown object {}", object),
            CellIssue::UnknownArrow { index, arrow } => {
                write!(f, "cell {}: unknown arrow {}", index, arrow)
            }
            CellIssue::ArrowTypeMismatch { index, arrow } => {
                write!(f, "cell {}: arrow {} used at the wrong type", index, arrow)
            }
            CellIssue::CrossingInPlainMode { index } => {
                write!(f, "cell {}: crossing not allowed in plain mode", index)
            }
            CellIssue::EmptyCrossing { index } => write!(f, "cell {}: empty crossing", index),
        }
    }
}

/// Checks every invariant of a 1-cell against a multigraph; returns all
/// issues found rather than stopping at the first.
pub fn validate(mg: &Multigraph, f: &OneCell, mode: Mode) -> Vec<CellIssue> {
    let mut issues = Vec::new();
    if let Err(e) = OneCell::new(f.source.clone(), f.cells.clone()) {
        issues.push(CellIssue::NotComposable(e));
    }
    for o in f.source.iter() {
        if !mg.has_object(o) {
            issues.push(CellIssue::UnknownObject {
                index: None,
                object: o.clone(),
            });
        }
    }
    for (index, cell) in f.cells.iter().enumerate() {
        for o in cell.prefix().iter().chain(cell.suffix().iter()) {
            if !mg.has_object(o) {
                issues.push(CellIssue::UnknownObject {
                    index: Some(index),
                    object: o.clone(),
                });
            }
        }
        match cell {
            BasicCell::Multi { arrow, .. } => match mg.arrow(&arrow.name) {
                None => issues.push(CellIssue::UnknownArrow {
                    index,
                    arrow: arrow.name.clone(),
                }),
                Some(known) if **known != **arrow => issues.push(CellIssue::ArrowTypeMismatch {
                    index,
                    arrow: arrow.name.clone(),
                }),
                Some(_) => {}
            },
            BasicCell::Cross { left, right, .. } => {
                if mode == Mode::Plain {
                    issues.push(CellIssue::CrossingInPlainMode { index });
                }
                if left.is_empty() && right.is_empty() {
                    issues.push(CellIssue::EmptyCrossing { index });
                }
                for o in left.iter().chain(right.iter()) {
                    if !mg.has_object(o) {
                        issues.push(CellIssue::UnknownObject {
                            index: Some(index),
                            object: o.clone(),
                        });
                    }
                }
            }
        }
    }
    issues
}
