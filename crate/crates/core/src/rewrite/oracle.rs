//! Brute-force reachability in the undirected rewrite graph, used to
//! cross-check the decision procedure.
//!
//! In braided mode the undirected graph is infinite (an inverse unit step
//! can insert a trivial crossing anywhere), so the graph is cut down to the
//! terms within a [`Budget`]. Paths leaving the budget are not seen; with a
//! budget that forward rewriting cannot exceed, every normalization path
//! stays inside and the bounded graph is exact for the comparison with
//! normal forms.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::enumerate::{decode, encode, enumerate_within, Budget};
use super::{apply_unchecked, find_redexes};
use crate::freecat::{Mode, ObjSeq, OneCell};
use crate::signature::Multigraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("term costs {cost}, more than the budget {limit}")]
    BoundExceeded { cost: usize, limit: usize },
    #[error("terms have different sources")]
    SourceMismatch,
}

/// All terms over one source within a budget, with an edge for every
/// rewrite step between two of them.
pub struct RewriteGraph {
    mg: Multigraph,
    source: ObjSeq,
    budget: Budget,
    codes: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, u32>,
    adjacency: Vec<Vec<u32>>,
}

impl RewriteGraph {
    pub fn build(mg: &Multigraph, source: &ObjSeq, mode: Mode, budget: Budget) -> Self {
        let mut codes = Vec::new();
        let mut index = HashMap::new();
        enumerate_within(mg, source, mode, budget, &mut |f| {
            let code = encode(mg, f);
            index.insert(code.clone(), codes.len() as u32);
            codes.push(code);
        });
        let mut adjacency = vec![Vec::new(); codes.len()];
        for (i, code) in codes.iter().enumerate() {
            let f = decode(mg, source, code);
            for r in find_redexes(&f, mode) {
                let g = apply_unchecked(&f, r, mode);
                if !budget.admits(&g) {
                    continue;
                }
                let j = index[&encode(mg, &g)];
                adjacency[i].push(j);
                adjacency[j as usize].push(i as u32);
            }
        }
        RewriteGraph {
            mg: mg.clone(),
            source: source.clone(),
            budget,
            codes,
            index,
            adjacency,
        }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn term(&self, id: usize) -> OneCell {
        decode(&self.mg, &self.source, &self.codes[id])
    }

    pub fn id_of(&self, f: &OneCell) -> Result<usize, OracleError> {
        if f.source() != &self.source {
            return Err(OracleError::SourceMismatch);
        }
        check_budget(self.budget, f)?;
        Ok(self.index[&encode(&self.mg, f)] as usize)
    }

    /// Breadth-first search from `f`, following edges in both directions.
    pub fn connected(&self, f: &OneCell, g: &OneCell) -> Result<bool, OracleError> {
        let (start, goal) = (self.id_of(f)?, self.id_of(g)?);
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            if v == goal {
                return Ok(true);
            }
            for &w in &self.adjacency[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w as usize);
                }
            }
        }
        Ok(false)
    }

    /// Connected-component label of every term, by breadth-first search.
    pub fn components(&self) -> Vec<u32> {
        let mut label = vec![u32::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            let mut queue = VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = next;
                        queue.push_back(w as usize);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

fn check_budget(budget: Budget, f: &OneCell) -> Result<(), OracleError> {
    if budget.admits(f) {
        Ok(())
    } else {
        Err(OracleError::BoundExceeded {
            cost: budget.total(f),
            limit: budget.limit(),
        })
    }
}

/// Whether `f` and `g` are joined by a zig-zag of rewrite steps through
/// terms within `budget`.
pub fn oracle_connected(
    mg: &Multigraph,
    f: &OneCell,
    g: &OneCell,
    mode: Mode,
    budget: Budget,
) -> Result<bool, OracleError> {
    if f.source() != g.source() {
        return Err(OracleError::SourceMismatch);
    }
    check_budget(budget, f)?;
    check_budget(budget, g)?;
    RewriteGraph::build(mg, f.source(), mode, budget).connected(f, g)
}
