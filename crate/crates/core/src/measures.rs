//! Termination measures for the two rewriting systems.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::freecat::{BasicCell, Mode, OneCell, WireTrace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Measure {
    Plain(BigUint),
    /// Overbraid width, crossing weight, prefix weight, trivial crossings.
    Braided([BigUint; 4]),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("cannot compare a plain measure with a braided one")]
pub struct ModeMismatch;

impl Measure {
    pub fn mode(&self) -> Mode {
        match self {
            Measure::Plain(_) => Mode::Plain,
            Measure::Braided(_) => Mode::Braided,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Plain(v) => write!(f, "{}", v),
            Measure::Braided([a, b, c, d]) => write!(f, "({}, {}, {}, {})", a, b, c, d),
        }
    }
}

/// Lexicographic comparison; plain measures compare as naturals.
pub fn compare(a: &Measure, b: &Measure) -> Result<Ordering, ModeMismatch> {
    match (a, b) {
        (Measure::Plain(x), Measure::Plain(y)) => Ok(x.cmp(y)),
        (Measure::Braided(x), Measure::Braided(y)) => Ok(x.cmp(y)),
        _ => Err(ModeMismatch),
    }
}

fn prefix_weight_of(f: &OneCell, trace: &WireTrace) -> BigUint {
    f.cells()
        .iter()
        .enumerate()
        .map(|(i, c)| trace.weight_sum(i, 0, c.position()))
        .sum()
}

/// Sum over cells of the weight of the wires above each cell at its stage.
pub fn prefix_weight(f: &OneCell) -> BigUint {
    prefix_weight_of(f, &f.wire_stats())
}

pub fn braided_measure(f: &OneCell) -> Measure {
    let trace = f.wire_stats();
    let mut overbraid = BigUint::zero();
    let mut crossing = BigUint::zero();
    let mut trivial = BigUint::zero();
    for (i, c) in f.cells().iter().enumerate() {
        if let BasicCell::Cross { left, right, .. } = c {
            let p = c.position();
            let (l, r) = (left.len(), right.len());
            let wd_right = trace.width_sum(i, p + l, p + l + r);
            if !wd_right.is_zero() {
                overbraid += wd_right * 2u32 - BigUint::one();
            }
            crossing += trace.width_sum(i, p, p + l + r) * trace.weight_sum(i, p, p + l + r);
            if l == 0 || r == 0 {
                trivial += 1u32;
            }
        }
    }
    Measure::Braided([overbraid, crossing, prefix_weight_of(f, &trace), trivial])
}

pub fn measure(f: &OneCell, mode: Mode) -> Measure {
    match mode {
        Mode::Plain => Measure::Plain(prefix_weight(f)),
        Mode::Braided => braided_measure(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::ObjSeq;
    use crate::signature::builtin_theory;

    fn seq(names: &[&str]) -> ObjSeq {
        ObjSeq::from_names(names)
    }

    fn g0_cell(pre: &[&str], name: &str, suf: &[&str]) -> BasicCell {
        let mg = builtin_theory("example-G0").unwrap().base;
        BasicCell::multi(seq(pre), mg.arrow(name).unwrap().clone(), seq(suf))
    }

    fn braided(m: &Measure) -> [u32; 4] {
        match m {
            Measure::Braided(v) => v.clone().map(|x| u32::try_from(x).unwrap()),
            _ => panic!("not braided"),
        }
    }

    #[test]
    fn t1_and_its_normal_form() {
        let t1 = OneCell::from_cells(vec![
            g0_cell(&[], "u", &["C", "D"]),
            g0_cell(&["B"], "g", &[]),
            g0_cell(&[], "h", &[]),
        ])
        .unwrap();
        assert_eq!(prefix_weight(&t1), BigUint::from(1u32));
        let nf = OneCell::from_cells(vec![
            g0_cell(&["A"], "g", &[]),
            g0_cell(&[], "u", &["E"]),
            g0_cell(&[], "h", &[]),
        ])
        .unwrap();
        assert_eq!(prefix_weight(&nf), BigUint::zero());
        assert_eq!(
            prefix_weight(&OneCell::identity(seq(&["A"]))),
            BigUint::zero()
        );
    }

    #[test]
    fn overbraid_fixture() {
        let s = OneCell::from_cells(vec![
            BasicCell::cross(seq(&["P"]), seq(&["Q"]), seq(&["R"]), seq(&[])),
            BasicCell::cross(seq(&[]), seq(&["P"]), seq(&["R"]), seq(&["Q"])),
        ])
        .unwrap();
        assert_eq!(braided(&braided_measure(&s))[0], 2);
        let t = OneCell::single(BasicCell::cross(
            seq(&[]),
            seq(&["P", "Q"]),
            seq(&["R"]),
            seq(&[]),
        ));
        assert_eq!(braided(&braided_measure(&t))[0], 1);
    }

    #[test]
    fn trivial_crossing() {
        let f = OneCell::single(BasicCell::cross(seq(&[]), seq(&["P"]), seq(&[]), seq(&[])));
        assert_eq!(braided(&braided_measure(&f)), [0, 0, 0, 1]);
    }

    #[test]
    fn compare_is_lexicographic() {
        let n = |v: u32| BigUint::from(v);
        let a = Measure::Braided([n(1), n(0), n(0), n(0)]);
        let b = Measure::Braided([n(0), n(9), n(9), n(9)]);
        assert_eq!(compare(&a, &b), Ok(Ordering::Greater));
        assert_eq!(compare(&a, &a), Ok(Ordering::Equal));
        assert_eq!(
            compare(&Measure::Plain(n(1)), &Measure::Plain(n(0))),
            Ok(Ordering::Greater)
        );
        assert_eq!(compare(&a, &Measure::Plain(n(0))), Err(ModeMismatch));
    }

    #[test]
    fn third_component_is_prefix_weight_without_crossings() {
        let t1 = OneCell::from_cells(vec![
            g0_cell(&[], "u", &["C", "D"]),
            g0_cell(&["B"], "g", &[]),
            g0_cell(&[], "h", &[]),
        ])
        .unwrap();
        assert_eq!(braided(&braided_measure(&t1)), [0, 0, 1, 0]);
    }
}
