//! Multigraphs, theories, and the line-oriented theory language.

use std::fmt::Write as _;
use std::sync::Arc;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::components::{
    check_expr1, infer_expr2, parse_context, parse_expr1, parse_expr2, Context, Expr1, Expr2,
};
use crate::freecat::{Arrow, Name, ObjSeq};
use crate::lexer::{tokenize, Cursor, Diagnostic, Tok, Token};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("duplicate name {0}")]
    Duplicate(Name),
    #[error("unknown object {0}")]
    UnknownObject(Name),
    #[error("unknown builtin theory {0}")]
    UnknownTheory(String),
}

/// Objects and multi-input arrows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Multigraph {
    objects: IndexSet<Name>,
    arrows: IndexMap<Name, Arc<Arrow>>,
}

impl Multigraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: &str) -> Result<(), SignatureError> {
        if !self.objects.insert(name.into()) {
            return Err(SignatureError::Duplicate(name.into()));
        }
        Ok(())
    }

    pub fn add_arrow(
        &mut self,
        name: &str,
        inputs: &[&str],
        output: &str,
    ) -> Result<Arc<Arrow>, SignatureError> {
        if self.arrows.contains_key(name) {
            return Err(SignatureError::Duplicate(name.into()));
        }
        for o in inputs.iter().chain(std::iter::once(&output)) {
            if !self.has_object(o) {
                return Err(SignatureError::UnknownObject((*o).into()));
            }
        }
        let arrow = Arc::new(Arrow {
            name: name.into(),
            inputs: ObjSeq::from_names(inputs),
            output: output.into(),
        });
        self.arrows.insert(name.into(), arrow.clone());
        Ok(arrow)
    }

    pub fn has_object(&self, name: &str) -> bool {
        self.objects.contains(name)
    }

    pub fn arrow(&self, name: &str) -> Option<&Arc<Arrow>> {
        self.arrows.get(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = &Name> {
        self.objects.iter()
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arc<Arrow>> {
        self.arrows.values()
    }

    /// Objects mentioned by no arrow; terms are invariant under permuting them.
    pub fn free_objects(&self) -> Vec<Name> {
        self.objects
            .iter()
            .filter(|o| {
                !self
                    .arrows
                    .values()
                    .any(|a| &a.output == *o || a.inputs.iter().any(|i| i == *o))
            })
            .cloned()
            .collect()
    }
}

/// A 2-cell generator `t : lhs ⇒ rhs` over a context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellDef {
    pub name: Name,
    pub ctx: Context,
    pub object: Name,
    pub lhs: Expr1,
    pub rhs: Expr1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationDef {
    pub name: Name,
    pub ctx: Context,
    pub object: Name,
    pub lhs: Expr2,
    pub rhs: Expr2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Theory {
    pub name: Name,
    pub base: Multigraph,
    pub cells: IndexMap<Name, CellDef>,
    pub equations: IndexMap<Name, EquationDef>,
}

impl Theory {
    pub fn empty(name: &str, base: Multigraph) -> Self {
        Theory {
            name: name.into(),
            base,
            cells: IndexMap::new(),
            equations: IndexMap::new(),
        }
    }

    /// Re-checks every invariant; returns the problems found.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for cell in self.cells.values() {
            if let Err(e) = check_cell(self, cell) {
                out.push(format!("cell {}: {}", cell.name, e));
            }
        }
        for eq in self.equations.values() {
            if let Err(e) = check_equation(self, eq) {
                out.push(format!("equation {}: {}", eq.name, e));
            }
        }
        out
    }
}

fn check_context(t: &Theory, ctx: &Context) -> Result<(), String> {
    for o in &ctx.objects {
        if !t.base.has_object(o) {
            return Err(format!("unknown object {}", o));
        }
    }
    Ok(())
}

fn check_cell(t: &Theory, cell: &CellDef) -> Result<(), String> {
    check_context(t, &cell.ctx)?;
    let l = check_expr1(t, &cell.ctx, &cell.lhs).map_err(|e| format!("ill-typed source: {}", e))?;
    let r = check_expr1(t, &cell.ctx, &cell.rhs).map_err(|e| format!("ill-typed target: {}", e))?;
    if l != r || l != cell.object {
        return Err(format!("source has type {} but target has type {}", l, r));
    }
    Ok(())
}

fn check_equation(t: &Theory, eq: &EquationDef) -> Result<(), String> {
    check_context(t, &eq.ctx)?;
    let l = infer_expr2(t, &eq.ctx, &eq.lhs).map_err(|e| format!("ill-typed left side: {}", e))?;
    let r = infer_expr2(t, &eq.ctx, &eq.rhs).map_err(|e| format!("ill-typed right side: {}", e))?;
    if l != r || l.object != eq.object {
        return Err("sides are not parallel".into());
    }
    Ok(())
}

const KEYWORDS: [&str; 5] = ["theory", "object", "arrow", "cell", "equation"];

fn is_decl_start(tok: &Token) -> bool {
    matches!(&tok.tok, Tok::Ident(s) if KEYWORDS.contains(&s.as_str()))
}

enum Decl {
    Theory(String),
    Object(String),
    Arrow(String, Vec<String>, String),
    Cell(String, Context, Expr1, Expr1),
    Equation(String, Context, Expr2, Expr2),
}

fn parse_decl(cur: &mut Cursor<'_>) -> Result<Decl, Diagnostic> {
    let kw = cur.ident()?;
    match kw.as_str() {
        "theory" => Ok(Decl::Theory(cur.ident()?)),
        "object" => Ok(Decl::Object(cur.ident()?)),
        "arrow" => {
            let name = cur.ident()?;
            cur.expect(&Tok::Colon)?;
            let mut inputs = Vec::new();
            while let Some(Tok::Ident(_)) = cur.peek() {
                inputs.push(cur.ident()?);
            }
            cur.expect(&Tok::Arrow)?;
            Ok(Decl::Arrow(name, inputs, cur.ident()?))
        }
        "cell" => {
            let name = cur.ident()?;
            let ctx = parse_context(cur)?;
            cur.expect(&Tok::Colon)?;
            let lhs = parse_expr1(cur, &ctx)?;
            cur.expect(&Tok::FatArrow)?;
            let rhs = parse_expr1(cur, &ctx)?;
            Ok(Decl::Cell(name, ctx, lhs, rhs))
        }
        "equation" => {
            let name = cur.ident()?;
            let ctx = parse_context(cur)?;
            cur.expect(&Tok::Colon)?;
            let lhs = parse_expr2(cur, &ctx)?;
            cur.expect(&Tok::Eq)?;
            let rhs = parse_expr2(cur, &ctx)?;
            Ok(Decl::Equation(name, ctx, lhs, rhs))
        }
        other => Err(cur.error(format!("expected a declaration, found `{}`", other))),
    }
}

/// Parses and validates a theory. Declarations may appear in any order and
/// may share lines. Every problem found is reported.
pub fn parse_theory(text: &str) -> Result<Theory, Vec<Diagnostic>> {
    let toks = match tokenize(text) {
        Ok(t) => t,
        Err(d) => return Err(vec![d]),
    };
    let end = toks.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
    let mut cur = Cursor::new(&toks, end.0, end.1);
    let mut diags = Vec::new();
    let mut decls = Vec::new();
    while !cur.at_end() {
        let at = cur.here();
        match parse_decl(&mut cur) {
            Ok(d) => decls.push((at, d)),
            Err(d) => {
                diags.push(d);
                cur.bump();
                while let Some(t) = cur.peek_token() {
                    if is_decl_start(t) {
                        break;
                    }
                    cur.bump();
                }
            }
        }
    }

    let mut name = String::from("unnamed");
    let mut base = Multigraph::new();
    let diag = |at: (usize, usize), m: String| Diagnostic::new(at.0, at.1, m);
    for (at, d) in &decls {
        match d {
            Decl::Theory(n) => name = n.clone(),
            Decl::Object(o) => {
                if let Err(e) = base.add_object(o) {
                    diags.push(diag(*at, e.to_string()));
                }
            }
            _ => {}
        }
    }
    for (at, d) in &decls {
        if let Decl::Arrow(n, ins, out) = d {
            let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
            if let Err(e) = base.add_arrow(n, &ins, out) {
                diags.push(diag(*at, e.to_string()));
            }
        }
    }
    let mut theory = Theory::empty(&name, base);
    let mut taken: IndexSet<String> = theory.base.arrows().map(|a| a.name.to_string()).collect();
    for (at, d) in &decls {
        if let Decl::Cell(n, ctx, lhs, rhs) = d {
            if !taken.insert(n.clone()) {
                diags.push(diag(*at, format!("duplicate name {}", n)));
                continue;
            }
            let cell = CellDef {
                name: n.as_str().into(),
                ctx: ctx.clone(),
                object: check_expr1(&theory, ctx, lhs)
                    .map(|o| o.to_string())
                    .unwrap_or_default()
                    .into(),
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            };
            match check_cell(&theory, &cell) {
                Ok(()) => {
                    theory.cells.insert(cell.name.clone(), cell);
                }
                Err(e) => diags.push(diag(*at, format!("cell {}: {}", n, e))),
            }
        }
    }
    for (at, d) in &decls {
        if let Decl::Equation(n, ctx, lhs, rhs) = d {
            if !taken.insert(n.clone()) {
                diags.push(diag(*at, format!("duplicate name {}", n)));
                continue;
            }
            let object = infer_expr2(&theory, ctx, lhs)
                .map(|t| t.object.to_string())
                .unwrap_or_default();
            let eq = EquationDef {
                name: n.as_str().into(),
                ctx: ctx.clone(),
                object: object.into(),
                lhs: lhs.clone(),
                rhs: rhs.clone(),
            };
            match check_equation(&theory, &eq) {
                Ok(()) => {
                    theory.equations.insert(eq.name.clone(), eq);
                }
                Err(e) => diags.push(diag(*at, format!("equation {}: {}", n, e))),
            }
        }
    }
    if diags.is_empty() {
        Ok(theory)
    } else {
        diags.sort_by_key(|d| (d.line, d.col));
        Err(diags)
    }
}

/// Prints a theory in the syntax accepted by [`parse_theory`].
pub fn serialize_theory(t: &Theory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "theory {}", t.name);
    for o in t.base.objects() {
        let _ = writeln!(out, "object {}", o);
    }
    for a in t.base.arrows() {
        let mut ins = String::new();
        for i in a.inputs.iter() {
            ins.push_str(i);
            ins.push(' ');
        }
        let _ = writeln!(out, "arrow {} : {}-> {}", a.name, ins, a.output);
    }
    for c in t.cells.values() {
        let _ = writeln!(
            out,
            "cell {} {} : {} => {}",
            c.name,
            c.ctx,
            c.lhs.display(&c.ctx),
            c.rhs.display(&c.ctx)
        );
    }
    for e in t.equations.values() {
        let _ = writeln!(
            out,
            "equation {} {} :\n  {}\n  = {}",
            e.name,
            e.ctx,
            e.lhs.display(&e.ctx),
            e.rhs.display(&e.ctx)
        );
    }
    out
}

pub const PSEUDOMONOID_SOURCE: &str = include_str!("../data/pseudomonoid.gth");

pub fn example_g0() -> Multigraph {
    let mut mg = Multigraph::new();
    for o in ["A", "B", "C", "D", "E", "F"] {
        mg.add_object(o).expect("fresh object");
    }
    mg.add_arrow("u", &["A"], "B").expect("valid arrow");
    mg.add_arrow("g", &["C", "D"], "E").expect("valid arrow");
    mg.add_arrow("h", &["B", "E"], "F").expect("valid arrow");
    mg.add_arrow("k", &[], "A").expect("valid arrow");
    mg
}

pub fn builtin_theory(name: &str) -> Result<Theory, SignatureError> {
    match name {
        "pseudomonoid" => Ok(parse_theory(PSEUDOMONOID_SOURCE).expect("bundled theory is valid")),
        "example-G0" => Ok(Theory::empty("example-G0", example_g0())),
        other => Err(SignatureError::UnknownTheory(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudomonoid_shape() {
        let t = builtin_theory("pseudomonoid").unwrap();
        assert_eq!(t.base.objects().count(), 1);
        assert_eq!(t.base.arrows().count(), 2);
        assert_eq!(t.base.arrow("J").unwrap().inputs.len(), 0);
        assert_eq!(t.cells.len(), 6);
        assert_eq!(t.equations.len(), 8);
        assert!(t.validate().is_empty());
        let aa = &t.cells["aa"];
        assert_eq!(aa.ctx.len(), 3);
        assert_eq!(aa.lhs.display(&aa.ctx).to_string(), "P(A, P(B, X))");
        assert_eq!(aa.rhs.display(&aa.ctx).to_string(), "P(P(A, B), X)");
        let tri = &t.equations["triangle"];
        assert_eq!(
            tri.lhs.display(&tri.ctx).to_string(),
            "comp(P(rr[A], id X), aa[A, J(), X])"
        );
        assert_eq!(tri.rhs.display(&tri.ctx).to_string(), "P(id A, ll[X])");
    }

    #[test]
    fn trivial_theory_on_one_line() {
        let t = parse_theory("theory T object A").unwrap();
        assert_eq!(&*t.name, "T");
        assert_eq!(t.base.objects().count(), 1);
        assert_eq!(t.base.arrows().count(), 0);
        assert!(t.cells.is_empty() && t.equations.is_empty());
    }

    #[test]
    fn unknown_object_in_arrow() {
        let errs = parse_theory("theory T\nobject C\narrow P : C C -> D\n").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert!(errs[0].message.contains("unknown object D"));
    }

    #[test]
    fn duplicates_and_bad_cells() {
        let src = "object C\nobject C\narrow P : C C -> C\ncell d [A:C] : P(A, A) => A\n\
                   cell e [A:C, B:C] : P(A, B) => A\ncell P [A:C] : A => A\n";
        let errs = parse_theory(src).unwrap_err();
        assert_eq!(errs.len(), 4, "{:?}", errs);
    }

    #[test]
    fn equation_sides_must_be_parallel() {
        let src = format!(
            "{}\nequation bad [A:C] : ll[A] = rr[A]\n",
            PSEUDOMONOID_SOURCE
        );
        let errs = parse_theory(&src).unwrap_err();
        assert!(errs[0].message.contains("not parallel"), "{:?}", errs);
    }

    #[test]
    fn builtin_names() {
        let g = builtin_theory("example-G0").unwrap();
        assert_eq!(g.base.arrows().count(), 4);
        assert!(g.cells.is_empty());
        assert!(matches!(
            builtin_theory("no-such"),
            Err(SignatureError::UnknownTheory(_))
        ));
    }

    #[test]
    fn serialize_round_trip() {
        for name in ["pseudomonoid", "example-G0"] {
            let t = builtin_theory(name).unwrap();
            let text = serialize_theory(&t);
            assert_eq!(parse_theory(&text).unwrap(), t, "{}", text);
        }
    }

    #[test]
    fn mutated_boundary_fails_validation() {
        let mut t = builtin_theory("pseudomonoid").unwrap();
        let aa = t.cells.get_mut("aa").unwrap();
        aa.rhs = Expr1::app(
            "P",
            vec![
                Expr1::Var(1),
                Expr1::app("P", vec![Expr1::Var(0), Expr1::Var(2)]),
            ],
        );
        assert!(!t.validate().is_empty());
    }

    #[test]
    fn free_objects_of_g0() {
        let mut mg = example_g0();
        assert!(mg.free_objects().is_empty());
        mg.add_object("Z").unwrap();
        assert_eq!(mg.free_objects(), vec![Name::from("Z")]);
    }
}
