//! Exhaustive peak analysis: every pair of distinct redexes of every
//! small term must rewrite to a common normal form.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rayon::prelude::*;

use super::enumerate::{canonical_sources, enumerate_terms, EnumConfig};
use super::modulo::Run;
use super::{apply_unchecked, find_redexes, Redex, RedexKind};
use crate::freecat::{Mode, OneCell};
use crate::signature::Multigraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peak {
    pub term: OneCell,
    pub left: Redex,
    pub right: Redex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeakFailure {
    pub peak: Peak,
    pub left_nf: OneCell,
    pub right_nf: OneCell,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PeakStats {
    pub count: usize,
    pub max_join: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CriticalPairReport {
    pub terms: usize,
    pub peaks: usize,
    /// Peaks per pair of rule kinds, with the longest join seen.
    pub by_kind: BTreeMap<(String, String), PeakStats>,
    pub failures: Vec<PeakFailure>,
}

impl CriticalPairReport {
    pub fn all_join(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: CriticalPairReport) {
        self.terms += other.terms;
        self.peaks += other.peaks;
        for (k, v) in other.by_kind {
            let e = self.by_kind.entry(k).or_default();
            e.count += v.count;
            e.max_join = e.max_join.max(v.max_join);
        }
        self.failures.extend(other.failures);
    }
}

impl fmt::Display for CriticalPairReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "terms: {}", self.terms)?;
        writeln!(f, "peaks: {}", self.peaks)?;
        for ((a, b), s) in &self.by_kind {
            writeln!(
                f,
                "  {} / {}: {} peaks, longest join {}",
                a, b, s.count, s.max_join
            )?;
        }
        writeln!(f, "failures: {}", self.failures.len())?;
        for fail in &self.failures {
            writeln!(
                f,
                "  {} with {} / {}: {} vs {}",
                fail.peak.term, fail.peak.left, fail.peak.right, fail.left_nf, fail.right_nf
            )?;
        }
        Ok(())
    }
}

fn kind_name(k: RedexKind) -> String {
    match k {
        RedexKind::Underbraid(_) => "Underbraid".into(),
        other => format!("{:?}", other),
    }
}

/// Normal forms with their step counts, shared by the peaks of all terms
/// over one source. A run continues the same way from the start of any of
/// its rounds, so each round's starting term is cached.
#[derive(Default)]
pub(crate) struct NfCache(HashMap<OneCell, (OneCell, usize)>);

impl NfCache {
    pub(crate) fn normalize(&mut self, f: OneCell, mode: Mode) -> (OneCell, usize) {
        let mut run = Run::new(f, false);
        let mut marks = Vec::new();
        let (nf, rest) = loop {
            if let Some(hit) = self.0.get(&run.cur) {
                break hit.clone();
            }
            marks.push((run.cur.clone(), run.count));
            if !run.advance(mode) {
                break (run.cur.clone(), 0);
            }
        };
        let total = run.count + rest;
        for (t, at) in marks {
            self.0.insert(t, (nf.clone(), total - at));
        }
        (nf, total)
    }
}

/// Checks every peak of one term.
pub(crate) fn peaks_of(
    f: &OneCell,
    mode: Mode,
    report: &mut CriticalPairReport,
    cache: &mut NfCache,
) {
    report.terms += 1;
    let redexes = find_redexes(f, mode);
    for (x, &left) in redexes.iter().enumerate() {
        for &right in &redexes[x + 1..] {
            report.peaks += 1;
            let (lnf, ln) = cache.normalize(apply_unchecked(f, left, mode), mode);
            let (rnf, rn) = cache.normalize(apply_unchecked(f, right, mode), mode);
            let stats = report
                .by_kind
                .entry((kind_name(left.kind), kind_name(right.kind)))
                .or_default();
            stats.count += 1;
            stats.max_join = stats.max_join.max(ln.max(rn));
            if lnf != rnf {
                report.failures.push(PeakFailure {
                    peak: Peak {
                        term: f.clone(),
                        left,
                        right,
                    },
                    left_nf: lnf,
                    right_nf: rnf,
                });
            }
        }
    }
}

/// Enumerates all terms within `cfg` (one per renaming orbit of the
/// objects no arrow mentions) and checks that all their peaks join.
pub fn critical_pairs(mg: &Multigraph, cfg: EnumConfig) -> CriticalPairReport {
    let sources = canonical_sources(mg, cfg.max_source_len);
    let parts: Vec<CriticalPairReport> = sources
        .par_iter()
        .map(|src| {
            let mut report = CriticalPairReport::default();
            let mut cache = NfCache::default();
            enumerate_terms(mg, src, cfg.mode, cfg.max_cells, &mut |f| {
                peaks_of(f, cfg.mode, &mut report, &mut cache)
            });
            report
        })
        .collect();
    let mut out = CriticalPairReport::default();
    for p in parts {
        out.merge(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecat::{BasicCell, ObjSeq};
    use crate::signature::example_g0;

    #[test]
    fn g0_plain_three_cells_join() {
        let report = critical_pairs(
            &example_g0(),
            EnumConfig {
                mode: Mode::Plain,
                max_cells: 3,
                max_source_len: 3,
            },
        );
        assert!(report.all_join(), "{}", report);
        assert!(report.peaks > 0);
    }

    #[test]
    fn yang_baxter_peak_joins() {
        // a crossing of R and Q that lands inside the crossed block of
        // β_{P,(Q,R)}: the pseudonat / underbraid peak on three unit wires
        let seq = |v: &[&str]| ObjSeq::from_names(v);
        let f = OneCell::from_cells(vec![
            BasicCell::cross(seq(&["P"]), seq(&["R"]), seq(&["Q"]), seq(&[])),
            BasicCell::cross(seq(&[]), seq(&["P"]), seq(&["Q", "R"]), seq(&[])),
        ])
        .unwrap();
        let mut report = CriticalPairReport::default();
        peaks_of(&f, Mode::Braided, &mut report, &mut NfCache::default());
        assert_eq!(report.peaks, 1);
        assert!(report
            .by_kind
            .contains_key(&("Pseudonat".to_string(), "Underbraid".to_string())));
        assert!(report.all_join(), "{}", report);
    }

    #[test]
    fn single_redex_has_no_peak() {
        let mg = example_g0();
        let u = OneCell::single(BasicCell::multi(
            ObjSeq::empty(),
            mg.arrow("u").unwrap().clone(),
            ObjSeq::from_names(&["C", "D"]),
        ));
        let mut report = CriticalPairReport::default();
        peaks_of(&u, Mode::Plain, &mut report, &mut NfCache::default());
        assert_eq!(report.peaks, 0);
    }
}
