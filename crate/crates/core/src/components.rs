//! The calculus of components: 1-cell and 2-cell expressions over a
//! theory, their type checkers, substitution, and the equation-derivation
//! checker behind proof scripts.
//!
//! Contexts are positional. A variable is the absolute index of a context
//! entry, and every expression consumes a contiguous window of the context
//! left to right, each variable exactly once.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::freecat::Name;
use crate::lexer::{statements, Cursor, Diagnostic, Tok};
use crate::signature::Theory;

/// A typing context. Names are surface syntax only and ignored by equality.
#[derive(Clone, Debug, Default, Eq)]
pub struct Context {
    pub names: Vec<Name>,
    pub objects: Vec<Name>,
}

impl PartialEq for Context {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
    }
}

impl Context {
    pub fn new(entries: &[(&str, &str)]) -> Self {
        Context {
            names: entries.iter().map(|(n, _)| Name::from(*n)).collect(),
            objects: entries.iter().map(|(_, o)| Name::from(*o)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| &**n == name)
    }

    pub fn name(&self, i: usize) -> String {
        self.names
            .get(i)
            .map(|n| n.to_string())
            .unwrap_or_else(|| format!("#{}", i))
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", self.name(i), self.objects[i])?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr1 {
    Var(usize),
    App(Name, Vec<Expr1>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr2 {
    Id(Expr1),
    Gen(Name, Vec<Expr1>),
    /// `Comp(φ, ψ)` is φ·ψ: ψ acts first.
    Comp(Box<Expr2>, Box<Expr2>),
    App(Name, Vec<Expr2>),
}

impl Expr1 {
    pub fn app(f: &str, args: Vec<Expr1>) -> Self {
        Expr1::App(f.into(), args)
    }

    pub fn var_count(&self) -> usize {
        match self {
            Expr1::Var(_) => 1,
            Expr1::App(_, args) => args.iter().map(Expr1::var_count).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr1::Var(_) => 0,
            Expr1::App(_, args) => 1 + args.iter().map(Expr1::depth).max().unwrap_or(0),
        }
    }

    /// Adds `by` to every variable index.
    pub fn shift(&self, by: usize) -> Expr1 {
        match self {
            Expr1::Var(i) => Expr1::Var(i + by),
            Expr1::App(f, args) => {
                Expr1::App(f.clone(), args.iter().map(|a| a.shift(by)).collect())
            }
        }
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> impl fmt::Display + 'a {
        Show1(self, ctx)
    }
}

impl Expr2 {
    pub fn comp(phi: Expr2, psi: Expr2) -> Self {
        Expr2::Comp(Box::new(phi), Box::new(psi))
    }

    /// Right-nested composite of a non-empty chain, leftmost acting last.
    pub fn comp_chain(mut items: Vec<Expr2>) -> Self {
        let mut acc = items.pop().expect("non-empty chain");
        while let Some(e) = items.pop() {
            acc = Expr2::comp(e, acc);
        }
        acc
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> impl fmt::Display + 'a {
        Show2(self, ctx)
    }

    fn flatten_into(&self, out: &mut Vec<Expr2>) {
        match self {
            Expr2::Comp(a, b) => {
                a.flatten_into(out);
                b.flatten_into(out);
            }
            other => out.push(other.assoc_normal()),
        }
    }

    /// Canonical representative modulo associativity of composition.
    pub fn assoc_normal(&self) -> Expr2 {
        match self {
            Expr2::Comp(..) => {
                let mut items = Vec::new();
                self.flatten_into(&mut items);
                Expr2::comp_chain(items)
            }
            Expr2::App(f, args) => {
                Expr2::App(f.clone(), args.iter().map(Expr2::assoc_normal).collect())
            }
            other => other.clone(),
        }
    }

    pub fn eq_mod_assoc(&self, other: &Expr2) -> bool {
        self.assoc_normal() == other.assoc_normal()
    }
}

struct Show1<'a>(&'a Expr1, &'a Context);

impl fmt::Display for Show1<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Expr1::Var(i) => f.write_str(&self.1.name(*i)),
            Expr1::App(name, args) => {
                write!(f, "{}(", name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Show1(a, self.1))?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Show2<'a>(&'a Expr2, &'a Context);

impl fmt::Display for Show2<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = self.1;
        match self.0 {
            Expr2::Id(a) => write!(f, "id {}", Show1(a, ctx)),
            Expr2::Gen(t, args) => {
                write!(f, "{}[", t)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Show1(a, ctx))?;
                }
                f.write_str("]")
            }
            Expr2::Comp(a, b) => {
                write!(f, "comp({}", Show2(a, ctx))?;
                let mut rest: &Expr2 = b;
                while let Expr2::Comp(x, y) = rest {
                    write!(f, ", {}", Show2(x, ctx))?;
                    rest = y;
                }
                write!(f, ", {})", Show2(rest, ctx))
            }
            Expr2::App(name, args) => {
                write!(f, "{}(", name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", Show2(a, ctx))?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown symbol {0}")]
    UnknownSymbol(Name),
    #[error("{symbol} expects {expected} arguments, got {found}")]
    Arity {
        symbol: Name,
        expected: usize,
        found: usize,
    },
    #[error("variable #{found} used out of order or twice (expected #{expected})")]
    VariableOrder { expected: usize, found: usize },
    #[error("variable #{0} is not in the context")]
    VariableOutOfRange(usize),
    #[error("context variables from #{0} on are unused")]
    UnusedVariables(usize),
    #[error("expected an expression of type {expected}, found {found}")]
    ObjectMismatch { expected: Name, found: Name },
    #[error("composite does not typecheck: {0}")]
    CompMismatch(String),
    #[error("the two sides of a composite use different parts of the context")]
    CompWindow,
}

/// Checks `e` against the window of `ctx` starting at `*next`, advancing it.
fn check1(t: &Theory, ctx: &Context, e: &Expr1, next: &mut usize) -> Result<Name, TypeError> {
    match e {
        Expr1::Var(i) => {
            if *i >= ctx.len() {
                return Err(TypeError::VariableOutOfRange(*i));
            }
            if *i != *next {
                return Err(TypeError::VariableOrder {
                    expected: *next,
                    found: *i,
                });
            }
            *next += 1;
            Ok(ctx.objects[*i].clone())
        }
        Expr1::App(f, args) => {
            let arrow = t
                .base
                .arrow(f)
                .ok_or_else(|| TypeError::UnknownSymbol(f.clone()))?;
            if arrow.inputs.len() != args.len() {
                return Err(TypeError::Arity {
                    symbol: f.clone(),
                    expected: arrow.inputs.len(),
                    found: args.len(),
                });
            }
            for (a, want) in args.iter().zip(arrow.inputs.iter()) {
                let got = check1(t, ctx, a, next)?;
                if &got != want {
                    return Err(TypeError::ObjectMismatch {
                        expected: want.clone(),
                        found: got,
                    });
                }
            }
            Ok(arrow.output.clone())
        }
    }
}

/// Type of a 1-cell expression over a window of the context beginning at
/// `start`; returns the result object and the end of the window.
pub fn check_expr1_window(
    t: &Theory,
    ctx: &Context,
    e: &Expr1,
    start: usize,
) -> Result<(Name, usize), TypeError> {
    let mut next = start;
    let obj = check1(t, ctx, e, &mut next)?;
    Ok((obj, next))
}

/// `ctx ⊢ e ∈ result`, using every context variable exactly once in order.
pub fn check_expr1(t: &Theory, ctx: &Context, e: &Expr1) -> Result<Name, TypeError> {
    let (obj, end) = check_expr1_window(t, ctx, e, 0)?;
    if end != ctx.len() {
        return Err(TypeError::UnusedVariables(end));
    }
    Ok(obj)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typed2 {
    pub src: Expr1,
    pub tgt: Expr1,
    pub object: Name,
}

fn infer2(t: &Theory, ctx: &Context, e: &Expr2, next: &mut usize) -> Result<Typed2, TypeError> {
    match e {
        Expr2::Id(a) => {
            let object = check1(t, ctx, a, next)?;
            Ok(Typed2 {
                src: a.clone(),
                tgt: a.clone(),
                object,
            })
        }
        Expr2::Gen(name, args) => {
            let cell = t
                .cells
                .get(name)
                .ok_or_else(|| TypeError::UnknownSymbol(name.clone()))?;
            if cell.ctx.len() != args.len() {
                return Err(TypeError::Arity {
                    symbol: name.clone(),
                    expected: cell.ctx.len(),
                    found: args.len(),
                });
            }
            for (a, want) in args.iter().zip(cell.ctx.objects.iter()) {
                let got = check1(t, ctx, a, next)?;
                if &got != want {
                    return Err(TypeError::ObjectMismatch {
                        expected: want.clone(),
                        found: got,
                    });
                }
            }
            Ok(Typed2 {
                src: subst_1in1(&cell.lhs, args)?,
                tgt: subst_1in1(&cell.rhs, args)?,
                object: cell.object.clone(),
            })
        }
        Expr2::Comp(phi, psi) => {
            let start = *next;
            let second = infer2(t, ctx, psi, next)?;
            let end = *next;
            *next = start;
            let first = infer2(t, ctx, phi, next)?;
            if *next != end {
                return Err(TypeError::CompWindow);
            }
            if second.tgt != first.src {
                return Err(TypeError::CompMismatch(format!(
                    "{} is followed by a cell from {}",
                    second.tgt.display(ctx),
                    first.src.display(ctx)
                )));
            }
            Ok(Typed2 {
                src: second.src,
                tgt: first.tgt,
                object: first.object,
            })
        }
        Expr2::App(f, args) => {
            let arrow = t
                .base
                .arrow(f)
                .ok_or_else(|| TypeError::UnknownSymbol(f.clone()))?;
            if arrow.inputs.len() != args.len() {
                return Err(TypeError::Arity {
                    symbol: f.clone(),
                    expected: arrow.inputs.len(),
                    found: args.len(),
                });
            }
            let mut srcs = Vec::with_capacity(args.len());
            let mut tgts = Vec::with_capacity(args.len());
            for (a, want) in args.iter().zip(arrow.inputs.iter()) {
                let ty = infer2(t, ctx, a, next)?;
                if &ty.object != want {
                    return Err(TypeError::ObjectMismatch {
                        expected: want.clone(),
                        found: ty.object,
                    });
                }
                srcs.push(ty.src);
                tgts.push(ty.tgt);
            }
            Ok(Typed2 {
                src: Expr1::App(f.clone(), srcs),
                tgt: Expr1::App(f.clone(), tgts),
                object: arrow.output.clone(),
            })
        }
    }
}

pub fn infer_expr2_window(
    t: &Theory,
    ctx: &Context,
    e: &Expr2,
    start: usize,
) -> Result<(Typed2, usize), TypeError> {
    let mut next = start;
    let ty = infer2(t, ctx, e, &mut next)?;
    Ok((ty, next))
}

/// Source, target and object of a 2-cell expression over the whole context.
pub fn infer_expr2(t: &Theory, ctx: &Context, e: &Expr2) -> Result<Typed2, TypeError> {
    let (ty, end) = infer_expr2_window(t, ctx, e, 0)?;
    if end != ctx.len() {
        return Err(TypeError::UnusedVariables(end));
    }
    Ok(ty)
}

fn arity_check(expected: usize, found: usize) -> Result<(), TypeError> {
    if expected != found {
        return Err(TypeError::Arity {
            symbol: "substitution".into(),
            expected,
            found,
        });
    }
    Ok(())
}

fn replace_vars(e: &Expr1, args: &[Expr1]) -> Expr1 {
    match e {
        Expr1::Var(i) => args[*i].clone(),
        Expr1::App(f, xs) => Expr1::App(
            f.clone(),
            xs.iter().map(|x| replace_vars(x, args)).collect(),
        ),
    }
}

/// `e[x_i := args_i]` for a 1-cell expression.
pub fn subst_1in1(e: &Expr1, args: &[Expr1]) -> Result<Expr1, TypeError> {
    arity_check(e.var_count(), args.len())?;
    Ok(replace_vars(e, args))
}

fn replace_vars2(e: &Expr2, args: &[Expr1]) -> Expr2 {
    match e {
        Expr2::Id(a) => Expr2::Id(replace_vars(a, args)),
        Expr2::Gen(t, xs) => Expr2::Gen(
            t.clone(),
            xs.iter().map(|x| replace_vars(x, args)).collect(),
        ),
        Expr2::Comp(a, b) => Expr2::comp(replace_vars2(a, args), replace_vars2(b, args)),
        Expr2::App(f, xs) => Expr2::App(
            f.clone(),
            xs.iter().map(|x| replace_vars2(x, args)).collect(),
        ),
    }
}

fn max_var2(e: &Expr2) -> Option<usize> {
    fn max1(e: &Expr1) -> Option<usize> {
        match e {
            Expr1::Var(i) => Some(*i),
            Expr1::App(_, xs) => xs.iter().filter_map(max1).max(),
        }
    }
    match e {
        Expr2::Id(a) => max1(a),
        Expr2::Gen(_, xs) => xs.iter().filter_map(max1).max(),
        Expr2::Comp(a, b) => max_var2(a).max(max_var2(b)),
        Expr2::App(_, xs) => xs.iter().filter_map(max_var2).max(),
    }
}

/// `φ[x_i := args_i]`: substitutes 1-cell expressions into a 2-cell
/// expression over a context of `arity` variables.
pub fn subst_1in2(e: &Expr2, arity: usize, args: &[Expr1]) -> Result<Expr2, TypeError> {
    arity_check(arity, args.len())?;
    if let Some(m) = max_var2(e) {
        if m >= arity {
            return Err(TypeError::VariableOutOfRange(m));
        }
    }
    Ok(replace_vars2(e, args))
}

/// `γ[x_i := φ_i]`: substitutes 2-cell expressions for the variables of a
/// 1-cell expression.
pub fn subst_2in1(e: &Expr1, args: &[Expr2]) -> Result<Expr2, TypeError> {
    fn go(e: &Expr1, args: &[Expr2]) -> Expr2 {
        match e {
            Expr1::Var(i) => args[*i].clone(),
            Expr1::App(f, xs) => Expr2::App(f.clone(), xs.iter().map(|x| go(x, args)).collect()),
        }
    }
    arity_check(e.var_count(), args.len())?;
    Ok(go(e, args))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqDerivation {
    Refl(Expr2),
    Sym(Box<EqDerivation>),
    Trans(Box<EqDerivation>, Box<EqDerivation>),
    Axiom(Name, Vec<Expr1>),
    CompCong(Box<EqDerivation>, Box<EqDerivation>),
    AppCong(Name, Vec<EqDerivation>),
    FuncId(Name, Vec<Expr1>),
    FuncComp(Name, Vec<(Expr2, Expr2)>),
    UnitL(Expr2),
    UnitR(Expr2),
    Nat(Name, Vec<Expr2>),
}

impl EqDerivation {
    pub fn rule_name(&self) -> &'static str {
        match self {
            EqDerivation::Refl(_) => "refl",
            EqDerivation::Sym(_) => "sym",
            EqDerivation::Trans(..) => "trans",
            EqDerivation::Axiom(..) => "axiom",
            EqDerivation::CompCong(..) => "comp-cong",
            EqDerivation::AppCong(..) => "app-cong",
            EqDerivation::FuncId(..) => "func-id",
            EqDerivation::FuncComp(..) => "func-comp",
            EqDerivation::UnitL(_) => "unit-l",
            EqDerivation::UnitR(_) => "unit-r",
            EqDerivation::Nat(..) => "nat",
        }
    }

    pub fn trans_chain(mut steps: Vec<EqDerivation>) -> EqDerivation {
        let first = steps.remove(0);
        steps.into_iter().fold(first, |acc, d| {
            EqDerivation::Trans(Box::new(acc), Box::new(d))
        })
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            EqDerivation::Sym(d) => d.node_count(),
            EqDerivation::Trans(a, b) | EqDerivation::CompCong(a, b) => {
                a.node_count() + b.node_count()
            }
            EqDerivation::AppCong(_, ds) => ds.iter().map(EqDerivation::node_count).sum(),
            _ => 0,
        }
    }

    pub fn display<'a>(&'a self, ctx: &'a Context) -> impl fmt::Display + 'a {
        ShowD(self, ctx)
    }
}

struct ShowD<'a>(&'a EqDerivation, &'a Context);

impl fmt::Display for ShowD<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx = self.1;
        let list1 = |f: &mut fmt::Formatter<'_>, xs: &[Expr1]| -> fmt::Result {
            for x in xs {
                write!(f, ", {}", x.display(ctx))?;
            }
            Ok(())
        };
        match self.0 {
            EqDerivation::Refl(e) => write!(f, "refl({})", e.display(ctx)),
            EqDerivation::Sym(d) => write!(f, "sym({})", ShowD(d, ctx)),
            EqDerivation::Trans(..) => {
                let mut chain = Vec::new();
                let mut cur = self.0;
                while let EqDerivation::Trans(a, b) = cur {
                    chain.push(&**b);
                    cur = a;
                }
                chain.push(cur);
                chain.reverse();
                f.write_str("trans(")?;
                for (i, d) in chain.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}", ShowD(d, ctx))?;
                }
                f.write_str(")")
            }
            EqDerivation::Axiom(n, xs) => {
                write!(f, "axiom({}", n)?;
                list1(f, xs)?;
                f.write_str(")")
            }
            EqDerivation::CompCong(a, b) => {
                write!(f, "comp-cong({}, {})", ShowD(a, ctx), ShowD(b, ctx))
            }
            EqDerivation::AppCong(n, ds) => {
                write!(f, "app-cong({}", n)?;
                for d in ds {
                    write!(f, ", {}", ShowD(d, ctx))?;
                }
                f.write_str(")")
            }
            EqDerivation::FuncId(n, xs) => {
                write!(f, "func-id({}", n)?;
                list1(f, xs)?;
                f.write_str(")")
            }
            EqDerivation::FuncComp(n, pairs) => {
                write!(f, "func-comp({}", n)?;
                for (a, b) in pairs {
                    write!(f, ", {}, {}", a.display(ctx), b.display(ctx))?;
                }
                f.write_str(")")
            }
            EqDerivation::UnitL(e) => write!(f, "unit-l({})", e.display(ctx)),
            EqDerivation::UnitR(e) => write!(f, "unit-r({})", e.display(ctx)),
            EqDerivation::Nat(n, xs) => {
                write!(f, "nat({}", n)?;
                for x in xs {
                    write!(f, ", {}", x.display(ctx))?;
                }
                f.write_str(")")
            }
        }
    }
}

/// An equation usable as an axiom: a theory equation or a proved lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSchema {
    pub ctx: Context,
    pub lhs: Expr2,
    pub rhs: Expr2,
}

/// A concluded equation sequent `ctx ⊢ lhs = rhs : src ⇒ tgt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqSequent {
    pub lhs: Expr2,
    pub rhs: Expr2,
    pub ty: Typed2,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at {path}: {message}")]
pub struct DerivError {
    pub path: String,
    pub message: String,
}

struct EqChecker<'a> {
    theory: &'a Theory,
    ctx: &'a Context,
    axioms: &'a HashMap<Name, EquationSchema>,
}

type Checked = (EqSequent, usize);

impl EqChecker<'_> {
    fn fail<T>(&self, path: &str, message: impl Into<String>) -> Result<T, DerivError> {
        Err(DerivError {
            path: path.to_string(),
            message: message.into(),
        })
    }

    fn infer(&self, path: &str, e: &Expr2, start: usize) -> Result<(Typed2, usize), DerivError> {
        infer_expr2_window(self.theory, self.ctx, e, start).map_err(|err| DerivError {
            path: path.to_string(),
            message: format!("{} in {}", err, e.display(self.ctx)),
        })
    }

    /// Types both sides, which must be parallel.
    fn conclude(
        &self,
        path: &str,
        lhs: Expr2,
        rhs: Expr2,
        start: usize,
    ) -> Result<Checked, DerivError> {
        let (tl, el) = self.infer(path, &lhs, start)?;
        let (tr, er) = self.infer(path, &rhs, start)?;
        if el != er || tl != tr {
            return self.fail(path, "the two sides are not parallel");
        }
        Ok((EqSequent { lhs, rhs, ty: tl }, el))
    }

    fn check(&self, d: &EqDerivation, path: &str, start: usize) -> Result<Checked, DerivError> {
        let here = format!("{}/{}", path, d.rule_name());
        let sub = |i: usize| format!("{}[{}]", here, i);
        match d {
            EqDerivation::Refl(e) => self.conclude(&here, e.clone(), e.clone(), start),
            EqDerivation::Sym(inner) => {
                let (s, end) = self.check(inner, &sub(0), start)?;
                Ok((
                    EqSequent {
                        lhs: s.rhs,
                        rhs: s.lhs,
                        ty: s.ty,
                    },
                    end,
                ))
            }
            EqDerivation::Trans(a, b) => {
                let (sa, ea) = self.check(a, &sub(0), start)?;
                let (sb, eb) = self.check(b, &sub(1), start)?;
                if ea != eb {
                    return self.fail(&here, "premises use different parts of the context");
                }
                if !sa.rhs.eq_mod_assoc(&sb.lhs) {
                    return self.fail(
                        &here,
                        format!(
                            "middle terms differ: {} vs {}",
                            sa.rhs.display(self.ctx),
                            sb.lhs.display(self.ctx)
                        ),
                    );
                }
                Ok((
                    EqSequent {
                        lhs: sa.lhs,
                        rhs: sb.rhs,
                        ty: sa.ty,
                    },
                    ea,
                ))
            }
            EqDerivation::Axiom(name, args) => {
                let Some(schema) = self.axioms.get(name) else {
                    return self.fail(&here, format!("unknown equation or lemma {}", name));
                };
                if schema.ctx.len() != args.len() {
                    return self.fail(
                        &here,
                        format!(
                            "{} takes {} arguments, got {}",
                            name,
                            schema.ctx.len(),
                            args.len()
                        ),
                    );
                }
                let mut next = start;
                for (a, want) in args.iter().zip(schema.ctx.objects.iter()) {
                    let (got, end) =
                        check_expr1_window(self.theory, self.ctx, a, next).map_err(|e| {
                            DerivError {
                                path: here.clone(),
                                message: e.to_string(),
                            }
                        })?;
                    if &got != want {
                        return self.fail(
                            &here,
                            format!("argument of type {} where {} is needed", got, want),
                        );
                    }
                    next = end;
                }
                let inst = |e: &Expr2| {
                    subst_1in2(e, schema.ctx.len(), args).map_err(|e| DerivError {
                        path: here.clone(),
                        message: e.to_string(),
                    })
                };
                let (lhs, rhs) = (inst(&schema.lhs)?, inst(&schema.rhs)?);
                self.conclude(&here, lhs, rhs, start)
            }
            EqDerivation::CompCong(a, b) => {
                let (sa, ea) = self.check(a, &sub(0), start)?;
                let (sb, eb) = self.check(b, &sub(1), start)?;
                if ea != eb {
                    return self.fail(&here, "premises use different parts of the context");
                }
                self.conclude(
                    &here,
                    Expr2::comp(sa.lhs, sb.lhs),
                    Expr2::comp(sa.rhs, sb.rhs),
                    start,
                )
            }
            EqDerivation::AppCong(f, ds) => {
                let mut next = start;
                let mut lhs = Vec::new();
                let mut rhs = Vec::new();
                for (i, d) in ds.iter().enumerate() {
                    let (s, end) = self.check(d, &sub(i), next)?;
                    lhs.push(s.lhs);
                    rhs.push(s.rhs);
                    next = end;
                }
                self.conclude(
                    &here,
                    Expr2::App(f.clone(), lhs),
                    Expr2::App(f.clone(), rhs),
                    start,
                )
            }
            EqDerivation::FuncId(f, args) => {
                let lhs = Expr2::App(f.clone(), args.iter().cloned().map(Expr2::Id).collect());
                let rhs = Expr2::Id(Expr1::App(f.clone(), args.clone()));
                self.conclude(&here, lhs, rhs, start)
            }
            EqDerivation::FuncComp(f, pairs) => {
                let firsts = pairs.iter().map(|(a, _)| a.clone()).collect();
                let seconds = pairs.iter().map(|(_, b)| b.clone()).collect();
                let lhs = Expr2::comp(
                    Expr2::App(f.clone(), firsts),
                    Expr2::App(f.clone(), seconds),
                );
                let rhs = Expr2::App(
                    f.clone(),
                    pairs
                        .iter()
                        .map(|(a, b)| Expr2::comp(a.clone(), b.clone()))
                        .collect(),
                );
                self.conclude(&here, lhs, rhs, start)
            }
            EqDerivation::UnitL(e) => {
                let (ty, _) = self.infer(&here, e, start)?;
                self.conclude(
                    &here,
                    Expr2::comp(Expr2::Id(ty.tgt), e.clone()),
                    e.clone(),
                    start,
                )
            }
            EqDerivation::UnitR(e) => {
                let (ty, _) = self.infer(&here, e, start)?;
                self.conclude(
                    &here,
                    Expr2::comp(e.clone(), Expr2::Id(ty.src)),
                    e.clone(),
                    start,
                )
            }
            EqDerivation::Nat(t, phis) => {
                let Some(cell) = self.theory.cells.get(t) else {
                    return self.fail(&here, format!("unknown 2-cell {}", t));
                };
                if cell.ctx.len() != phis.len() {
                    return self.fail(
                        &here,
                        format!(
                            "{} takes {} arguments, got {}",
                            t,
                            cell.ctx.len(),
                            phis.len()
                        ),
                    );
                }
                let mut next = start;
                let mut srcs = Vec::new();
                let mut tgts = Vec::new();
                for (phi, want) in phis.iter().zip(cell.ctx.objects.iter()) {
                    let (ty, end) = self.infer(&here, phi, next)?;
                    if &ty.object != want {
                        return self.fail(
                            &here,
                            format!("argument of type {} where {} is needed", ty.object, want),
                        );
                    }
                    srcs.push(ty.src);
                    tgts.push(ty.tgt);
                    next = end;
                }
                let whisker = |e: &Expr1| {
                    subst_2in1(e, phis).map_err(|e| DerivError {
                        path: here.clone(),
                        message: e.to_string(),
                    })
                };
                let lhs = Expr2::comp(whisker(&cell.rhs)?, Expr2::Gen(t.clone(), srcs));
                let rhs = Expr2::comp(Expr2::Gen(t.clone(), tgts), whisker(&cell.lhs)?);
                self.conclude(&here, lhs, rhs, start)
            }
        }
    }
}

/// Checks a derivation over `ctx`, citing `axioms` by name. Returns the
/// concluded sequent.
pub fn check_eq_derivation(
    t: &Theory,
    ctx: &Context,
    axioms: &HashMap<Name, EquationSchema>,
    d: &EqDerivation,
) -> Result<EqSequent, DerivError> {
    let checker = EqChecker {
        theory: t,
        ctx,
        axioms,
    };
    let (seq, end) = checker.check(d, "", 0)?;
    if end != ctx.len() {
        return checker.fail(
            "/",
            format!("context variables from #{} on are unused", end),
        );
    }
    Ok(seq)
}

/// The theory's equations as citable axioms.
pub fn theory_axioms(t: &Theory) -> HashMap<Name, EquationSchema> {
    t.equations
        .values()
        .map(|e| {
            (
                e.name.clone(),
                EquationSchema {
                    ctx: e.ctx.clone(),
                    lhs: e.lhs.clone(),
                    rhs: e.rhs.clone(),
                },
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma {
    pub name: Name,
    pub ctx: Context,
    pub lhs: Expr2,
    pub rhs: Expr2,
    pub derivation: EqDerivation,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofScript {
    pub lemmas: Vec<Lemma>,
}

impl fmt::Display for ProofScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.lemmas.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            writeln!(
                f,
                "lemma {} {} : {} = {}",
                l.name,
                l.ctx,
                l.lhs.display(&l.ctx),
                l.rhs.display(&l.ctx)
            )?;
            writeln!(f, "  by {}", l.derivation.display(&l.ctx))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaResult {
    pub name: Name,
    pub passed: bool,
    pub message: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptReport {
    pub results: Vec<LemmaResult>,
}

impl ScriptReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }
}

impl fmt::Display for ScriptReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            match (&r.message, r.passed) {
                (_, true) => writeln!(f, "PASS {}", r.name)?,
                (Some(m), false) => writeln!(f, "FAIL {}: {}", r.name, m)?,
                (None, false) => writeln!(f, "FAIL {}", r.name)?,
            }
        }
        Ok(())
    }
}

fn cited(d: &EqDerivation, out: &mut Vec<Name>) {
    match d {
        EqDerivation::Axiom(n, _) => out.push(n.clone()),
        EqDerivation::Sym(a) => cited(a, out),
        EqDerivation::Trans(a, b) | EqDerivation::CompCong(a, b) => {
            cited(a, out);
            cited(b, out);
        }
        EqDerivation::AppCong(_, ds) => ds.iter().for_each(|d| cited(d, out)),
        _ => {}
    }
}

fn check_lemma(
    t: &Theory,
    axioms: &HashMap<Name, EquationSchema>,
    lemma: &Lemma,
) -> Result<(), String> {
    let goal_l = infer_expr2(t, &lemma.ctx, &lemma.lhs).map_err(|e| format!("left side: {}", e))?;
    let goal_r =
        infer_expr2(t, &lemma.ctx, &lemma.rhs).map_err(|e| format!("right side: {}", e))?;
    if goal_l != goal_r {
        return Err("the two sides of the goal are not parallel".into());
    }
    let seq =
        check_eq_derivation(t, &lemma.ctx, axioms, &lemma.derivation).map_err(|e| e.to_string())?;
    if !seq.lhs.eq_mod_assoc(&lemma.lhs) || !seq.rhs.eq_mod_assoc(&lemma.rhs) {
        return Err(format!(
            "derivation proves {} = {}",
            seq.lhs.display(&lemma.ctx),
            seq.rhs.display(&lemma.ctx)
        ));
    }
    Ok(())
}

/// Checks lemmas in order; each passed lemma becomes citable by later ones.
pub fn check_script(t: &Theory, script: &ProofScript) -> ScriptReport {
    let mut axioms = theory_axioms(t);
    let mut report = ScriptReport::default();
    for (i, lemma) in script.lemmas.iter().enumerate() {
        let mut refs = Vec::new();
        cited(&lemma.derivation, &mut refs);
        let later = refs
            .iter()
            .find(|r| !axioms.contains_key(*r) && script.lemmas[i..].iter().any(|l| &l.name == *r));
        let failed_dep = refs
            .iter()
            .find(|r| !axioms.contains_key(*r) && script.lemmas[..i].iter().any(|l| &l.name == *r));
        let outcome = if axioms.contains_key(&lemma.name) {
            Err(format!("name {} is already in use", lemma.name))
        } else if let Some(r) = later {
            Err(format!("cites lemma {} before it is proved", r))
        } else if let Some(r) = failed_dep {
            Err(format!("cites lemma {} which failed", r))
        } else {
            check_lemma(t, &axioms, lemma)
        };
        if outcome.is_ok() {
            axioms.insert(
                lemma.name.clone(),
                EquationSchema {
                    ctx: lemma.ctx.clone(),
                    lhs: lemma.lhs.clone(),
                    rhs: lemma.rhs.clone(),
                },
            );
        }
        report.results.push(LemmaResult {
            name: lemma.name.clone(),
            passed: outcome.is_ok(),
            message: outcome.err(),
        });
    }
    report
}

// ---- surface syntax ----

pub fn parse_context(cur: &mut Cursor<'_>) -> Result<Context, Diagnostic> {
    cur.expect(&Tok::LBracket)?;
    let mut ctx = Context::default();
    if cur.eat(&Tok::RBracket) {
        return Ok(ctx);
    }
    loop {
        let here = cur.here();
        let name = cur.ident()?;
        cur.expect(&Tok::Colon)?;
        let obj = cur.ident()?;
        if ctx.index_of(&name).is_some() {
            return Err(Diagnostic::new(
                here.0,
                here.1,
                format!("duplicate variable {}", name),
            ));
        }
        ctx.names.push(name.into());
        ctx.objects.push(obj.into());
        if cur.eat(&Tok::RBracket) {
            return Ok(ctx);
        }
        cur.expect(&Tok::Comma)?;
    }
}

pub fn parse_expr1(cur: &mut Cursor<'_>, ctx: &Context) -> Result<Expr1, Diagnostic> {
    let here = cur.here();
    let name = cur.ident()?;
    if cur.eat(&Tok::LParen) {
        let mut args = Vec::new();
        if !cur.eat(&Tok::RParen) {
            loop {
                args.push(parse_expr1(cur, ctx)?);
                if cur.eat(&Tok::RParen) {
                    break;
                }
                cur.expect(&Tok::Comma)?;
            }
        }
        return Ok(Expr1::App(name.into(), args));
    }
    ctx.index_of(&name)
        .map(Expr1::Var)
        .ok_or_else(|| Diagnostic::new(here.0, here.1, format!("unknown variable {}", name)))
}

fn comma_list<T>(
    cur: &mut Cursor<'_>,
    close: &Tok,
    mut item: impl FnMut(&mut Cursor<'_>) -> Result<T, Diagnostic>,
) -> Result<Vec<T>, Diagnostic> {
    let mut out = Vec::new();
    if cur.eat(close) {
        return Ok(out);
    }
    loop {
        out.push(item(cur)?);
        if cur.eat(close) {
            return Ok(out);
        }
        cur.expect(&Tok::Comma)?;
    }
}

pub fn parse_expr2(cur: &mut Cursor<'_>, ctx: &Context) -> Result<Expr2, Diagnostic> {
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "id")
        && !matches!(cur.peek2(), Some(Tok::LParen) | Some(Tok::LBracket))
    {
        cur.bump();
        return Ok(Expr2::Id(parse_expr1(cur, ctx)?));
    }
    if matches!(cur.peek(), Some(Tok::Ident(s)) if s == "comp") && cur.peek2() == Some(&Tok::LParen)
    {
        cur.bump();
        cur.bump();
        let here = cur.here();
        let items = comma_list(cur, &Tok::RParen, |c| parse_expr2(c, ctx))?;
        if items.len() < 2 {
            return Err(Diagnostic::new(
                here.0,
                here.1,
                "comp needs at least two arguments",
            ));
        }
        return Ok(Expr2::comp_chain(items));
    }
    let name = cur.ident()?;
    if cur.eat(&Tok::LBracket) {
        let args = comma_list(cur, &Tok::RBracket, |c| parse_expr1(c, ctx))?;
        return Ok(Expr2::Gen(name.into(), args));
    }
    if cur.eat(&Tok::LParen) {
        let args = comma_list(cur, &Tok::RParen, |c| parse_expr2(c, ctx))?;
        return Ok(Expr2::App(name.into(), args));
    }
    Err(cur.unexpected("`[` or `(`"))
}

pub fn parse_derivation(cur: &mut Cursor<'_>, ctx: &Context) -> Result<EqDerivation, Diagnostic> {
    let here = cur.here();
    let rule = cur.ident()?;
    cur.expect(&Tok::LParen)?;
    let err = |m: String| Diagnostic::new(here.0, here.1, m);
    let d = match rule.as_str() {
        "refl" | "unit-l" | "unit-r" => {
            let e = parse_expr2(cur, ctx)?;
            cur.expect(&Tok::RParen)?;
            match rule.as_str() {
                "refl" => EqDerivation::Refl(e),
                "unit-l" => EqDerivation::UnitL(e),
                _ => EqDerivation::UnitR(e),
            }
        }
        "sym" => {
            let d = parse_derivation(cur, ctx)?;
            cur.expect(&Tok::RParen)?;
            EqDerivation::Sym(Box::new(d))
        }
        "trans" => {
            let ds = comma_list(cur, &Tok::RParen, |c| parse_derivation(c, ctx))?;
            if ds.len() < 2 {
                return Err(err("trans needs at least two premises".into()));
            }
            EqDerivation::trans_chain(ds)
        }
        "comp-cong" => {
            let a = parse_derivation(cur, ctx)?;
            cur.expect(&Tok::Comma)?;
            let b = parse_derivation(cur, ctx)?;
            cur.expect(&Tok::RParen)?;
            EqDerivation::CompCong(Box::new(a), Box::new(b))
        }
        "axiom" | "func-id" => {
            let name: Name = cur.ident()?.into();
            let mut args = Vec::new();
            while cur.eat(&Tok::Comma) {
                args.push(parse_expr1(cur, ctx)?);
            }
            cur.expect(&Tok::RParen)?;
            if rule == "axiom" {
                EqDerivation::Axiom(name, args)
            } else {
                EqDerivation::FuncId(name, args)
            }
        }
        "app-cong" => {
            let name: Name = cur.ident()?.into();
            let mut ds = Vec::new();
            while cur.eat(&Tok::Comma) {
                ds.push(parse_derivation(cur, ctx)?);
            }
            cur.expect(&Tok::RParen)?;
            EqDerivation::AppCong(name, ds)
        }
        "func-comp" | "nat" => {
            let name: Name = cur.ident()?.into();
            let mut es = Vec::new();
            while cur.eat(&Tok::Comma) {
                es.push(parse_expr2(cur, ctx)?);
            }
            cur.expect(&Tok::RParen)?;
            if rule == "nat" {
                EqDerivation::Nat(name, es)
            } else {
                if es.len() % 2 != 0 {
                    return Err(err("func-comp takes pairs of 2-cell expressions".into()));
                }
                let pairs = es.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
                EqDerivation::FuncComp(name, pairs)
            }
        }
        other => return Err(err(format!("unknown rule {}", other))),
    };
    Ok(d)
}

/// Parses a `.gpf` proof script. Parsing is total: every error becomes a
/// diagnostic and parsing resumes at the next statement.
pub fn parse_script(text: &str) -> Result<ProofScript, Vec<Diagnostic>> {
    let (stmts, mut diags) = statements(text);
    let mut script = ProofScript::default();
    for toks in &stmts {
        let last = toks.last().expect("statements are non-empty");
        let mut cur = Cursor::new(toks, last.line, last.col + 1);
        match parse_lemma(&mut cur) {
            Ok(l) => script.lemmas.push(l),
            Err(d) => diags.push(d),
        }
    }
    if diags.is_empty() {
        Ok(script)
    } else {
        diags.sort_by_key(|d| (d.line, d.col));
        Err(diags)
    }
}

fn parse_lemma(cur: &mut Cursor<'_>) -> Result<Lemma, Diagnostic> {
    let (line, _) = cur.here();
    if !cur.eat_keyword("lemma") {
        return Err(cur.unexpected("`lemma`"));
    }
    let name: Name = cur.ident()?.into();
    let ctx = parse_context(cur)?;
    cur.expect(&Tok::Colon)?;
    let lhs = parse_expr2(cur, &ctx)?;
    cur.expect(&Tok::Eq)?;
    let rhs = parse_expr2(cur, &ctx)?;
    if !cur.eat_keyword("by") {
        return Err(cur.unexpected("`by`"));
    }
    let derivation = parse_derivation(cur, &ctx)?;
    cur.finish()?;
    Ok(Lemma {
        name,
        ctx,
        lhs,
        rhs,
        derivation,
        line,
    })
}
