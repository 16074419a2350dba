//! The components calculus interpreted in the free Gray monoid on a
//! theory's multigraph.
//!
//! A 1-cell expression becomes a sequence of multiarrow cells, tensors
//! decomposing left operand first. A 2-cell expression becomes a path of
//! interchange steps and opaque generator steps.

use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::components::{
    check_expr1, check_expr1_window, infer_expr2, subst_1in1, Context, Expr1, Expr2, TypeError,
};
use crate::freecat::{Arrow, BasicCell, Mode, Name, ObjSeq, OneCell};
use crate::rewrite::{
    apply, decide_equal, unapply_interchange, Direction, Redex, RedexKind, RewritePath, RewriteStep,
};
use crate::signature::Theory;

/// Interpreted boundaries of a 2-cell generator, over its own context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenBoundary {
    pub ctx: Context,
    pub source: OneCell,
    pub target: OneCell,
}

/// The canonical model of a theory in its free Gray monoid.
#[derive(Clone, Debug)]
pub struct FreeModel {
    theory: Theory,
    cells: IndexMap<Name, GenBoundary>,
}

pub fn free_model(t: &Theory) -> FreeModel {
    let mut m = FreeModel {
        theory: t.clone(),
        cells: IndexMap::new(),
    };
    for (name, def) in &t.cells {
        let source = m.expr1(&def.ctx.objects, &def.lhs, &mut 0);
        let target = m.expr1(&def.ctx.objects, &def.rhs, &mut 0);
        m.cells.insert(
            name.clone(),
            GenBoundary {
                ctx: def.ctx.clone(),
                source,
                target,
            },
        );
    }
    m
}

impl FreeModel {
    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn object(&self, name: &str) -> Option<ObjSeq> {
        self.theory
            .base
            .has_object(name)
            .then(|| ObjSeq::from_names(&[name]))
    }

    pub fn arrow(&self, name: &str) -> Option<OneCell> {
        let a = self.theory.base.arrow(name)?;
        Some(OneCell::single(BasicCell::multi(
            ObjSeq::empty(),
            a.clone(),
            ObjSeq::empty(),
        )))
    }

    pub fn cell(&self, name: &str) -> Option<&GenBoundary> {
        self.cells.get(name)
    }

    fn arrow_ref(&self, name: &str) -> &Arc<Arrow> {
        self.theory.base.arrow(name).expect("checked expression")
    }

    /// Interprets `e`, whose variables index `objs`, starting at `*next`.
    fn expr1(&self, objs: &[Name], e: &Expr1, next: &mut usize) -> OneCell {
        match e {
            Expr1::Var(_) => {
                let o = objs[*next].clone();
                *next += 1;
                OneCell::identity(ObjSeq(vec![o]))
            }
            Expr1::App(f, args) => {
                let parts: Vec<OneCell> = args.iter().map(|a| self.expr1(objs, a, next)).collect();
                let gen = OneCell::single(BasicCell::multi(
                    ObjSeq::empty(),
                    self.arrow_ref(f).clone(),
                    ObjSeq::empty(),
                ));
                OneCell::tensor_all(&parts)
                    .compose(&gen)
                    .expect("checked expression")
            }
        }
    }
}

/// `⟦e⟧ : ⟦ctx⟧ → ⟦result⟧`.
pub fn interp_expr1(m: &FreeModel, ctx: &Context, e: &Expr1) -> Result<OneCell, TypeError> {
    check_expr1(&m.theory, ctx, e)?;
    Ok(m.expr1(&ctx.objects, e, &mut 0))
}

/// A generator 2-cell applied at a position: inside `before`, the cells
/// from `at` on that form `⟦lhs⟧` (whiskered) are replaced by `⟦rhs⟧`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenStep {
    pub cell: Name,
    pub args: Vec<OneCell>,
    pub prefix: ObjSeq,
    pub suffix: ObjSeq,
    pub at: usize,
    pub direction: Direction,
    pub before: OneCell,
    pub after: OneCell,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InterpStep {
    Structural(RewriteStep),
    Gen(GenStep),
}

impl InterpStep {
    pub fn before(&self) -> &OneCell {
        match self {
            InterpStep::Structural(s) => &s.before,
            InterpStep::Gen(g) => &g.before,
        }
    }

    pub fn after(&self) -> &OneCell {
        match self {
            InterpStep::Structural(s) => &s.after,
            InterpStep::Gen(g) => &g.after,
        }
    }

    pub fn reversed(&self) -> InterpStep {
        match self {
            InterpStep::Structural(s) => InterpStep::Structural(s.reversed()),
            InterpStep::Gen(g) => InterpStep::Gen(GenStep {
                direction: flip(g.direction),
                before: g.after.clone(),
                after: g.before.clone(),
                ..g.clone()
            }),
        }
    }

    /// The same step inside a larger term: `pre_cells` run first, the
    /// step's term is whiskered by `(pre, suf)`, then `post_cells` run.
    fn embed(
        &self,
        source: &ObjSeq,
        pre_cells: &[BasicCell],
        pre: &ObjSeq,
        suf: &ObjSeq,
        post_cells: &[BasicCell],
    ) -> InterpStep {
        let wrap = |f: &OneCell| {
            assemble(
                source,
                &[pre_cells, f.whisker(pre, suf).cells(), post_cells],
            )
        };
        match self {
            InterpStep::Structural(s) => InterpStep::Structural(RewriteStep {
                redex: Redex {
                    index: s.redex.index + pre_cells.len(),
                    kind: s.redex.kind,
                },
                direction: s.direction,
                before: wrap(&s.before),
                after: wrap(&s.after),
            }),
            InterpStep::Gen(g) => InterpStep::Gen(GenStep {
                cell: g.cell.clone(),
                args: g.args.clone(),
                prefix: pre.concat(&g.prefix),
                suffix: g.suffix.concat(suf),
                at: g.at + pre_cells.len(),
                direction: g.direction,
                before: wrap(&g.before),
                after: wrap(&g.after),
            }),
        }
    }
}

fn flip(d: Direction) -> Direction {
    match d {
        Direction::Forward => Direction::Inverse,
        Direction::Inverse => Direction::Forward,
    }
}

fn assemble(source: &ObjSeq, parts: &[&[BasicCell]]) -> OneCell {
    let cells: Vec<BasicCell> = parts.iter().flat_map(|p| p.iter().cloned()).collect();
    OneCell::new(source.clone(), cells).expect("parts compose")
}

/// An interpreted 2-cell: structural and generator steps from `start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpPath {
    pub start: OneCell,
    pub steps: Vec<InterpStep>,
}

impl InterpPath {
    pub fn empty(start: OneCell) -> Self {
        InterpPath {
            start,
            steps: Vec::new(),
        }
    }

    pub fn end(&self) -> &OneCell {
        self.steps
            .last()
            .map(InterpStep::after)
            .unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn reversed(&self) -> InterpPath {
        InterpPath {
            start: self.end().clone(),
            steps: self.steps.iter().rev().map(InterpStep::reversed).collect(),
        }
    }

    pub fn then(mut self, other: InterpPath) -> InterpPath {
        debug_assert_eq!(self.end(), &other.start);
        self.steps.extend(other.steps);
        self
    }

    pub fn gen_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, InterpStep::Gen(_)))
            .count()
    }

    /// The path as a rewrite path, if it has no generator steps.
    pub fn structural(&self) -> Option<RewritePath> {
        let steps = self
            .steps
            .iter()
            .map(|s| match s {
                InterpStep::Structural(r) => Some(r.clone()),
                InterpStep::Gen(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some(RewritePath {
            start: self.start.clone(),
            steps,
        })
    }

    /// Steps chain, structural steps are plain rewrite steps, and every
    /// generator step swaps a whiskered `⟦lhs⟧` for `⟦rhs⟧` after its
    /// arguments.
    pub fn is_coherent(&self, m: &FreeModel) -> bool {
        let mut cur = &self.start;
        for s in &self.steps {
            if s.before() != cur {
                return false;
            }
            let ok = match s {
                InterpStep::Structural(r) => {
                    let (from, to) = match r.direction {
                        Direction::Forward => (&r.before, &r.after),
                        Direction::Inverse => (&r.after, &r.before),
                    };
                    matches!(apply(from, r.redex, Mode::Plain), Ok((out, _)) if &out == to)
                }
                InterpStep::Gen(g) => gen_step_ok(m, g),
            };
            if !ok {
                return false;
            }
            cur = s.after();
        }
        true
    }
}

fn gen_step_ok(m: &FreeModel, g: &GenStep) -> bool {
    let Some(b) = m.cell(&g.cell) else {
        return false;
    };
    let (from, to, old, new) = match g.direction {
        Direction::Forward => (&g.before, &g.after, &b.source, &b.target),
        Direction::Inverse => (&g.after, &g.before, &b.source, &b.target),
    };
    let args = OneCell::tensor_all(&g.args);
    let (old, new) = (
        old.whisker(&g.prefix, &g.suffix),
        new.whisker(&g.prefix, &g.suffix),
    );
    let args = args.whisker(&g.prefix, &g.suffix);
    let (fc, tc) = (from.cells(), to.cells());
    let n = args.len();
    g.at >= n
        && fc.len() >= g.at + old.len()
        && tc.len() >= g.at + new.len()
        && fc[g.at - n..g.at] == *args.cells()
        && fc[..g.at] == tc[..g.at]
        && fc[g.at..g.at + old.len()] == *old.cells()
        && tc[g.at..g.at + new.len()] == *new.cells()
        && fc[g.at + old.len()..] == tc[g.at + new.len()..]
}

/// Endpoints agree cell for cell.
pub fn check_parallel(p: &InterpPath, q: &InterpPath) -> bool {
    p.start == q.start && p.end() == q.end()
}

impl fmt::Display for InterpPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "   {}", self.start)?;
        for s in &self.steps {
            match s {
                InterpStep::Structural(r) => {
                    let arrow = match r.direction {
                        Direction::Forward => "=>",
                        Direction::Inverse => "<=",
                    };
                    writeln!(f, "{} {}", arrow, r.redex)?;
                }
                InterpStep::Gen(g) => {
                    let arrow = match g.direction {
                        Direction::Forward => "=>",
                        Direction::Inverse => "<=",
                    };
                    writeln!(f, "{} {}@{}", arrow, g.cell, g.at)?;
                }
            }
            writeln!(f, "   {}", s.after())?;
        }
        Ok(())
    }
}

fn app_count(e: &Expr1) -> usize {
    match e {
        Expr1::Var(_) => 0,
        Expr1::App(_, args) => 1 + args.iter().map(app_count).sum::<usize>(),
    }
}

struct Builder {
    cur: OneCell,
    steps: Vec<InterpStep>,
}

impl Builder {
    /// Cell `k + 1` lies above cell `k`; let it act first.
    fn lift(&mut self, k: usize) {
        let after = unapply_interchange(&self.cur, k).expect("disjoint cells");
        let redex = Redex {
            index: k,
            kind: RedexKind::Interchange,
        };
        debug_assert!(
            matches!(apply(&after, redex, Mode::Plain), Ok((ref g, _)) if g == &self.cur)
        );
        let before = std::mem::replace(&mut self.cur, after.clone());
        self.steps.push(InterpStep::Structural(RewriteStep {
            redex,
            direction: Direction::Inverse,
            before,
            after,
        }));
    }
}

/// From `⊗ inners ; ⊗ outers` at cell `off` to `⊗ (inners_j ; outer_j)`,
/// then the recursive norms of each block from left to right.
fn tensor_norm(b: &mut Builder, off: usize, outers: &[Expr1], inners: &[Expr1]) {
    let mut groups = Vec::with_capacity(outers.len());
    let mut rest = inners;
    for o in outers {
        let (g, r) = rest.split_at(o.var_count());
        groups.push(g);
        rest = r;
    }
    let g_cells: Vec<usize> = groups
        .iter()
        .map(|g| g.iter().map(app_count).sum())
        .collect();
    let mut done = off;
    for (j, o) in outers.iter().enumerate() {
        let pass: usize = g_cells[j + 1..].iter().sum();
        let first = done + g_cells[j];
        for c in 0..app_count(o) {
            for x in (first + c..first + c + pass).rev() {
                b.lift(x);
            }
        }
        done = first + app_count(o);
    }
    let mut pos = off;
    for (j, o) in outers.iter().enumerate() {
        norm_at(b, pos, o, groups[j]);
        pos += g_cells[j] + app_count(o);
    }
}

fn norm_at(b: &mut Builder, off: usize, outer: &Expr1, inners: &[Expr1]) {
    if let Expr1::App(_, args) = outer {
        tensor_norm(b, off, args, inners);
    }
}

/// Interprets each inner over consecutive windows of `objs` from `*next`.
fn inner_terms(m: &FreeModel, objs: &[Name], inners: &[Expr1], next: &mut usize) -> Vec<OneCell> {
    inners.iter().map(|g| m.expr1(objs, g, next)).collect()
}

fn result_objects(terms: &[OneCell]) -> Vec<Name> {
    terms.iter().flat_map(|t| t.target().0).collect()
}

/// The structural path from `⊗⟦inners⟧ ; ⟦outer⟧` to `⟦outer[inners]⟧`.
/// Inners consume `objs` from `start`.
fn norm_window(
    m: &FreeModel,
    objs: &[Name],
    start: usize,
    outer: &Expr1,
    inners: &[Expr1],
) -> InterpPath {
    let mut next = start;
    let parts = inner_terms(m, objs, inners, &mut next);
    let mid = result_objects(&parts);
    let top = m.expr1(&mid, outer, &mut 0);
    let init = OneCell::tensor_all(&parts)
        .compose(&top)
        .expect("arities match");
    let mut b = Builder {
        cur: init.clone(),
        steps: Vec::new(),
    };
    norm_at(&mut b, 0, outer, inners);
    InterpPath {
        start: init,
        steps: b.steps,
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("outer expression has {expected} variables but {found} inners were given")]
    Arity { expected: usize, found: usize },
    #[error("inner results do not match the outer context")]
    ContextMismatch,
}

/// The norm isomorphism `⊗⟦inners⟧ ; ⟦outer⟧ ⇒ ⟦outer[inners]⟧`; `outer`
/// lives over `outer_ctx` and the inners split `ctx` in order.
pub fn norm_path(
    m: &FreeModel,
    outer_ctx: &Context,
    outer: &Expr1,
    ctx: &Context,
    inners: &[Expr1],
) -> Result<InterpPath, InterpError> {
    check_expr1(&m.theory, outer_ctx, outer)?;
    if inners.len() != outer_ctx.len() {
        return Err(InterpError::Arity {
            expected: outer_ctx.len(),
            found: inners.len(),
        });
    }
    let mut next = 0;
    for (g, want) in inners.iter().zip(&outer_ctx.objects) {
        let (obj, end) = check_expr1_window(&m.theory, ctx, g, next)?;
        if &obj != want {
            return Err(InterpError::ContextMismatch);
        }
        next = end;
    }
    if next != ctx.len() {
        return Err(TypeError::UnusedVariables(next).into());
    }
    Ok(norm_window(m, &ctx.objects, 0, outer, inners))
}

/// `⟦e⟧` as a path from `⟦src e⟧` to `⟦tgt e⟧`.
pub fn interp_expr2(m: &FreeModel, ctx: &Context, e: &Expr2) -> Result<InterpPath, TypeError> {
    infer_expr2(&m.theory, ctx, e)?;
    Ok(m.expr2(&ctx.objects, e, &mut 0))
}

impl FreeModel {
    fn expr2(&self, objs: &[Name], e: &Expr2, next: &mut usize) -> InterpPath {
        match e {
            Expr2::Id(a) => InterpPath::empty(self.expr1(objs, a, next)),
            Expr2::Comp(phi, psi) => {
                let start = *next;
                let first = self.expr2(objs, psi, next);
                *next = start;
                first.then(self.expr2(objs, phi, next))
            }
            Expr2::Gen(t, args) => self.gen(objs, t, args, next),
            Expr2::App(f, phis) => {
                let window_start = *next;
                let mut subs = Vec::with_capacity(phis.len());
                let mut windows = Vec::with_capacity(phis.len());
                for phi in phis {
                    let s = *next;
                    subs.push(self.expr2(objs, phi, next));
                    windows.push(ObjSeq(objs[s..*next].to_vec()));
                }
                let source = ObjSeq(objs[window_start..*next].to_vec());
                let results: Vec<ObjSeq> = subs.iter().map(|p| p.start.target()).collect();
                let gen =
                    BasicCell::multi(ObjSeq::empty(), self.arrow_ref(f).clone(), ObjSeq::empty());
                let pres: Vec<ObjSeq> = (0..subs.len())
                    .map(|i| {
                        results[..i]
                            .iter()
                            .fold(ObjSeq::empty(), |a, r| a.concat(r))
                    })
                    .collect();
                let sufs: Vec<ObjSeq> = (0..subs.len())
                    .map(|i| {
                        windows[i + 1..]
                            .iter()
                            .fold(ObjSeq::empty(), |a, w| a.concat(w))
                    })
                    .collect();
                let block = |i: usize, t: &OneCell| t.whisker(&pres[i], &sufs[i]).cells().to_vec();
                let starts: Vec<Vec<BasicCell>> = subs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| block(i, &p.start))
                    .collect();
                let ends: Vec<Vec<BasicCell>> = subs
                    .iter()
                    .enumerate()
                    .map(|(i, p)| block(i, p.end()))
                    .collect();
                let whole = |k: usize| -> Vec<BasicCell> {
                    // blocks before k finished, blocks from k untouched
                    let mut cells: Vec<BasicCell> = ends[..k].concat();
                    cells.extend(starts[k..].concat());
                    cells.push(gen.clone());
                    cells
                };
                let mut path = InterpPath::empty(assemble(&source, &[&whole(0)]));
                for (i, p) in subs.iter().enumerate() {
                    let pre_cells = ends[..i].concat();
                    let mut post_cells = starts[i + 1..].concat();
                    post_cells.push(gen.clone());
                    for s in &p.steps {
                        path.steps.push(s.embed(
                            &source,
                            &pre_cells,
                            &pres[i],
                            &sufs[i],
                            &post_cells,
                        ));
                    }
                }
                debug_assert_eq!(path.end(), &assemble(&source, &[&whole(subs.len())]));
                path
            }
        }
    }

    /// Inverse norm of the source, the generator, forward norm of the target.
    fn gen(&self, objs: &[Name], t: &Name, args: &[Expr1], next: &mut usize) -> InterpPath {
        let b = self.cell(t).expect("checked expression");
        let def = &self.theory.cells[t];
        let start = *next;
        let parts = inner_terms(self, objs, args, next);
        let down = norm_window(self, objs, start, &def.lhs, args).reversed();
        let up = norm_window(self, objs, start, &def.rhs, args);
        let at = parts.iter().map(OneCell::len).sum();
        let step = GenStep {
            cell: t.clone(),
            args: parts,
            prefix: ObjSeq::empty(),
            suffix: ObjSeq::empty(),
            at,
            direction: Direction::Forward,
            before: down.end().clone(),
            after: up.start.clone(),
        };
        debug_assert_eq!(step.before.len(), at + b.source.len());
        let mut path = down;
        path.steps.push(InterpStep::Gen(step));
        path.then(up)
    }
}

/// Both composites of the double-norm square for
/// `outer[middles[inners]]`, each from `⊗⟦inners⟧ ; ⊗⟦middles⟧ ; ⟦outer⟧`
/// to the interpretation of the full substitution.
#[derive(Clone, Debug)]
pub struct DoubleNorm {
    /// Norm of outer against the middles, then against the inners.
    pub outer_first: InterpPath,
    /// Norms of the middles against the inners, then outer against those.
    pub inner_first: InterpPath,
    pub expected_end: OneCell,
}

impl DoubleNorm {
    pub fn parallel(&self) -> bool {
        check_parallel(&self.outer_first, &self.inner_first)
            && self.outer_first.end() == &self.expected_end
    }

    /// Both endpoints have a structural path between them in the decided
    /// sense, and both composites are sound rewrite paths.
    pub fn decided(&self) -> bool {
        [&self.outer_first, &self.inner_first].iter().all(|p| {
            p.structural().is_some_and(|r| r.is_coherent(Mode::Plain))
                && matches!(decide_equal(&p.start, p.end(), Mode::Plain), Ok(Some(_)))
        })
    }
}

/// Builds both double-norm composites. `middles` cover the variables of
/// `outer` in order and `inners` cover those of the middles, over `objs`.
pub fn double_norm(
    m: &FreeModel,
    objs: &[Name],
    outer: &Expr1,
    middles: &[Expr1],
    inners: &[Expr1],
) -> Result<DoubleNorm, InterpError> {
    let needed: usize = middles.iter().map(Expr1::var_count).sum();
    if middles.len() != outer.var_count() || inners.len() != needed {
        return Err(InterpError::Arity {
            expected: outer.var_count(),
            found: middles.len(),
        });
    }
    let mut next = 0;
    let inner_cells = inner_terms(m, objs, inners, &mut next);
    if next != objs.len() {
        return Err(TypeError::UnusedVariables(next).into());
    }
    let mid_objs = result_objects(&inner_cells);
    let mut k = 0;
    let middle_cells = inner_terms(m, &mid_objs, middles, &mut k);
    let top_objs = result_objects(&middle_cells);
    let top = m.expr1(&top_objs, outer, &mut 0);
    let lower = OneCell::tensor_all(&inner_cells);
    let start = lower
        .compose(&OneCell::tensor_all(&middle_cells))
        .and_then(|x| x.compose(&top))
        .expect("arities match");

    // reindex middles over the inner results so substitution lines up
    let renum = |es: &[Expr1]| -> Vec<Expr1> {
        let mut i = 0;
        es.iter().map(|e| renumber(e, &mut i)).collect()
    };
    let middles = renum(middles);
    let inners = renum(inners);
    let outer = renumber(outer, &mut 0);
    let outer_mid = subst_1in1(&outer, &middles).expect("arities match");
    let mid_inner: Vec<Expr1> = {
        let mut rest = &inners[..];
        middles
            .iter()
            .map(|b| {
                let (g, r) = rest.split_at(b.var_count());
                rest = r;
                subst_1in1(&renumber(b, &mut 0), g).expect("arities match")
            })
            .collect()
    };
    let full = subst_1in1(&outer_mid, &inners).expect("arities match");
    let expected_end = m.expr1(objs, &full, &mut 0);

    // outer first: norm(outer, middles) below the inners, then norm(outer[middles], inners)
    let mut b = Builder {
        cur: start.clone(),
        steps: Vec::new(),
    };
    norm_at(&mut b, lower.len(), &outer, &middles);
    norm_at(&mut b, 0, &outer_mid, &inners);
    let outer_first = InterpPath {
        start: start.clone(),
        steps: b.steps,
    };

    // inner first: regroup and normalize each middle, then norm(outer, middles[inners])
    let mut b = Builder {
        cur: start.clone(),
        steps: Vec::new(),
    };
    tensor_norm(&mut b, 0, &middles, &inners);
    norm_at(&mut b, 0, &outer, &mid_inner);
    let inner_first = InterpPath {
        start,
        steps: b.steps,
    };
    Ok(DoubleNorm {
        outer_first,
        inner_first,
        expected_end,
    })
}

fn renumber(e: &Expr1, i: &mut usize) -> Expr1 {
    match e {
        Expr1::Var(_) => {
            *i += 1;
            Expr1::Var(*i - 1)
        }
        Expr1::App(f, args) => Expr1::App(f.clone(), args.iter().map(|a| renumber(a, i)).collect()),
    }
}
