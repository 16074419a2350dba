//! Command-line front end: term syntax, ASCII rendering and subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::components::{
    check_script, parse_context, parse_expr1, parse_expr2, parse_script, Context,
};
use crate::freecat::{validate, BasicCell, Mode, Name, ObjSeq, OneCell};
use crate::interp::{free_model, interp_expr1, interp_expr2};
use crate::lexer::{tokenize, Cursor, Diagnostic, Tok};
use crate::measures::measure;
use crate::rewrite::{critical_pairs, decide_equal, normalize, EnumConfig};
use crate::signature::{builtin_theory, parse_theory, Multigraph, Theory};

// ---- term syntax ----

fn parse_objseq(cur: &mut Cursor<'_>, mg: &Multigraph, close: &Tok) -> Result<ObjSeq, Diagnostic> {
    let mut out = Vec::new();
    while !cur.eat(close) {
        let here = cur.here();
        let name = cur
            .ident()
            .map_err(|_| cur.unexpected(&format!("an object name or {}", close)))?;
        if !mg.has_object(&name) {
            return Err(Diagnostic::new(
                here.0,
                here.1,
                format!("unknown object {}", name),
            ));
        }
        out.push(Name::from(name));
    }
    Ok(ObjSeq(out))
}

fn parse_cell(cur: &mut Cursor<'_>, mg: &Multigraph) -> Result<BasicCell, Diagnostic> {
    cur.expect(&Tok::LParen)?;
    let prefix = parse_objseq(cur, mg, &Tok::RParen)?;
    let here = cur.here();
    let name = cur.ident()?;
    if name == "x" && cur.peek() == Some(&Tok::LBracket) {
        cur.bump();
        let left = parse_objseq(cur, mg, &Tok::Bar)?;
        let right = parse_objseq(cur, mg, &Tok::RBracket)?;
        cur.expect(&Tok::LParen)?;
        let suffix = parse_objseq(cur, mg, &Tok::RParen)?;
        if left.is_empty() && right.is_empty() {
            return Err(Diagnostic::new(here.0, here.1, "empty crossing"));
        }
        return Ok(BasicCell::cross(prefix, left, right, suffix));
    }
    let arrow = mg
        .arrow(&name)
        .ok_or_else(|| Diagnostic::new(here.0, here.1, format!("unknown arrow {}", name)))?
        .clone();
    cur.expect(&Tok::LParen)?;
    let suffix = parse_objseq(cur, mg, &Tok::RParen)?;
    Ok(BasicCell::multi(prefix, arrow, suffix))
}

/// Parses a term: `id (A B)` or `(pre) f (suf); (pre) x [L | R] (suf); ...`.
/// Checks composability but not the mode; see [`validate`].
pub fn parse_term(mg: &Multigraph, text: &str) -> Result<OneCell, Diagnostic> {
    let toks = tokenize(text)?;
    let mut cur = Cursor::new(&toks, 1, text.chars().count() + 1);
    if cur.eat_keyword("id") {
        cur.expect(&Tok::LParen)?;
        let objs = parse_objseq(&mut cur, mg, &Tok::RParen)?;
        cur.finish()?;
        return Ok(OneCell::identity(objs));
    }
    let mut cells = vec![parse_cell(&mut cur, mg)?];
    while cur.eat(&Tok::Semi) {
        cells.push(parse_cell(&mut cur, mg)?);
    }
    cur.finish()?;
    let source = cells[0].source();
    OneCell::new(source, cells).map_err(|e| Diagnostic::new(1, 1, e.to_string()))
}

// ---- rendering ----

/// One row per basic cell over labelled wire columns. Multiarrows show as
/// `[name]` across their input columns, crossings as `X` across both blocks.
pub fn render_ascii(f: &OneCell) -> String {
    let labels = f.stages().into_iter().flat_map(|s| s.0);
    let names = f.cells().iter().filter_map(|c| match c {
        BasicCell::Multi { arrow, .. } => Some(arrow.name.chars().count() + 2),
        BasicCell::Cross { .. } => None,
    });
    let width = labels
        .map(|l| l.chars().count())
        .chain(names)
        .max()
        .unwrap_or(1)
        + 2;
    let col = |s: &str, w: usize| format!("{:^w$}", s, w = w);
    let wires = |seq: &ObjSeq| seq.iter().map(|o| col(o, width)).collect::<String>();
    let bars = |n: usize| col("|", width).repeat(n);
    let mut lines = vec![wires(f.source())];
    for c in f.cells() {
        let pos = c.position();
        let span = c.in_len();
        let mark = match c {
            BasicCell::Multi { arrow, .. } => format!("[{}]", arrow.name),
            BasicCell::Cross { .. } => "X".to_string(),
        };
        let after = c.source().len() - pos - span;
        lines.push(format!(
            "{}{}{}",
            bars(pos),
            col(&mark, width * span.max(1)),
            bars(after)
        ));
    }
    if !f.is_empty() {
        lines.push(wires(&f.target()));
    }
    let mut out = String::new();
    for l in lines {
        out.push_str(l.trim_end());
        out.push('\n');
    }
    out
}

// ---- invocation ----

#[derive(Parser, Debug)]
#[command(
    name = "graycoh",
    version,
    about = "Coherence engine and proof checker for free (braided) Gray monoids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct TermOpts {
    /// A theory file, or the name of a builtin theory.
    #[arg(long)]
    theory: String,
    /// Use the braided rewriting system.
    #[arg(long)]
    braided: bool,
}

impl TermOpts {
    fn mode(&self) -> Mode {
        if self.braided {
            Mode::Braided
        } else {
            Mode::Plain
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the normal form of a term and the number of steps.
    Normalize {
        #[command(flatten)]
        opts: TermOpts,
        term: String,
        /// Also print the rewrite path.
        #[arg(long)]
        path: bool,
    },
    /// Print the 2-cell between two terms, or NOT EQUAL.
    Decide {
        #[command(flatten)]
        opts: TermOpts,
        left: String,
        right: String,
    },
    /// Print the termination measure of a term.
    Weigh {
        #[command(flatten)]
        opts: TermOpts,
        term: String,
    },
    /// Check that every peak of every small term joins.
    Cp {
        #[command(flatten)]
        opts: TermOpts,
        #[arg(long)]
        max_cells: usize,
        /// Longest source sequence enumerated.
        #[arg(long, default_value_t = 3)]
        max_wires: usize,
    },
    /// Check a proof script.
    Check {
        #[arg(long)]
        theory: String,
        script: PathBuf,
    },
    /// Interpret `[ctx] |- expr` in the free model.
    Interp {
        #[arg(long)]
        theory: String,
        judgement: String,
    },
    /// Draw a term.
    Render {
        /// Needed for multiarrow cells; without it only crossings parse.
        #[arg(long)]
        theory: Option<String>,
        term: String,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}", render_diags(.0, .1))]
    Parse(String, Vec<Diagnostic>),
}

fn render_diags(origin: &str, ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(|d| format!("{}:{}", origin, d))
        .collect::<Vec<_>>()
        .join("\n")
}

fn load_theory(arg: &str) -> Result<Theory, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {}", arg, e)))?;
        return parse_theory(&text).map_err(|ds| CliError::Parse(arg.to_string(), ds));
    }
    builtin_theory(arg)
        .map_err(|_| CliError::Usage(format!("no theory file or builtin theory named {}", arg)))
}

fn read_term(mg: &Multigraph, text: &str, mode: Mode) -> Result<OneCell, CliError> {
    let f = parse_term(mg, text).map_err(|d| CliError::Parse("term".into(), vec![d]))?;
    let issues = validate(mg, &f, mode);
    if !issues.is_empty() {
        let msg = issues
            .iter()
            .map(|i| format!("term: {}", i))
            .collect::<Vec<_>>()
            .join("\n");
        return Err(CliError::Usage(msg));
    }
    Ok(f)
}

/// Objects of a term read without a theory: every name that is not
/// followed by `(` or `[`, minus the crossing keyword.
fn adhoc_multigraph(text: &str) -> Multigraph {
    let mut mg = Multigraph::new();
    if let Ok(toks) = tokenize(text) {
        for (i, t) in toks.iter().enumerate() {
            let next = toks.get(i + 1).map(|t| &t.tok);
            if let Tok::Ident(s) = &t.tok {
                let keyword = s == "id" && i == 0;
                let cell = matches!(next, Some(Tok::LParen) | Some(Tok::LBracket));
                if !keyword && !cell && !mg.has_object(s) {
                    mg.add_object(s).expect("fresh object");
                }
            }
        }
    }
    mg
}

fn split_judgement(text: &str) -> Result<(&str, &str), CliError> {
    text.split_once('⊢')
        .or_else(|| text.split_once("|-"))
        .ok_or_else(|| CliError::Usage("expected `[ctx] ⊢ expr`".into()))
}

fn interp(t: &Theory, judgement: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    let (ctx_text, expr_text) = split_judgement(judgement)?;
    let parse_err = |d: Diagnostic| CliError::Parse("judgement".into(), vec![d]);
    let ctx_toks = tokenize(ctx_text).map_err(parse_err)?;
    let mut cur = Cursor::new(&ctx_toks, 1, ctx_text.chars().count() + 1);
    let ctx: Context = parse_context(&mut cur).map_err(parse_err)?;
    cur.finish().map_err(parse_err)?;
    let toks = tokenize(expr_text).map_err(parse_err)?;
    let end = expr_text.chars().count() + 1;
    let model = free_model(t);
    let mut cur = Cursor::new(&toks, 1, end);
    if let Ok(e) = parse_expr1(&mut cur, &ctx).and_then(|e| cur.finish().map(|_| e)) {
        let f = interp_expr1(&model, &ctx, &e).map_err(|e| CliError::Usage(e.to_string()))?;
        writeln!(out, "{}", f).ok();
        return Ok(0);
    }
    let mut cur = Cursor::new(&toks, 1, end);
    let e = parse_expr2(&mut cur, &ctx).map_err(parse_err)?;
    cur.finish().map_err(parse_err)?;
    let p = interp_expr2(&model, &ctx, &e).map_err(|e| CliError::Usage(e.to_string()))?;
    write!(out, "{}", p).ok();
    writeln!(out, "steps: {} ({} generator)", p.len(), p.gen_count()).ok();
    Ok(0)
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Normalize { opts, term, path } => {
            let t = load_theory(&opts.theory)?;
            let f = read_term(&t.base, &term, opts.mode())?;
            let (nf, p) = normalize(&f, opts.mode());
            if path {
                write!(out, "{}", p).ok();
            }
            writeln!(out, "{}", nf).ok();
            writeln!(out, "steps: {}", p.len()).ok();
            Ok(0)
        }
        Command::Decide { opts, left, right } => {
            let t = load_theory(&opts.theory)?;
            let f = read_term(&t.base, &left, opts.mode())?;
            let g = read_term(&t.base, &right, opts.mode())?;
            match decide_equal(&f, &g, opts.mode()).map_err(|e| CliError::Usage(e.to_string()))? {
                Some(p) => {
                    write!(out, "{}", p).ok();
                    writeln!(out, "steps: {}", p.len()).ok();
                    Ok(0)
                }
                None => {
                    writeln!(out, "NOT EQUAL").ok();
                    Ok(1)
                }
            }
        }
        Command::Weigh { opts, term } => {
            let t = load_theory(&opts.theory)?;
            let f = read_term(&t.base, &term, opts.mode())?;
            writeln!(out, "{}", measure(&f, opts.mode())).ok();
            Ok(0)
        }
        Command::Cp {
            opts,
            max_cells,
            max_wires,
        } => {
            let t = load_theory(&opts.theory)?;
            let report = critical_pairs(
                &t.base,
                EnumConfig {
                    mode: opts.mode(),
                    max_cells,
                    max_source_len: max_wires,
                },
            );
            write!(out, "{}", report).ok();
            Ok(if report.all_join() { 0 } else { 1 })
        }
        Command::Check { theory, script } => {
            let t = load_theory(&theory)?;
            let origin = script.display().to_string();
            let text = std::fs::read_to_string(&script)
                .map_err(|e| CliError::Usage(format!("{}: {}", origin, e)))?;
            let s = parse_script(&text).map_err(|ds| CliError::Parse(origin, ds))?;
            let report = check_script(&t, &s);
            write!(out, "{}", report).ok();
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Interp { theory, judgement } => interp(&load_theory(&theory)?, &judgement, out),
        Command::Render { theory, term } => {
            let mg = match theory {
                Some(arg) => load_theory(&arg)?.base,
                None => adhoc_multigraph(&term),
            };
            let f = read_term(&mg, &term, Mode::Braided)?;
            write!(out, "{}", render_ascii(&f)).ok();
            Ok(0)
        }
    }
}

/// Runs one invocation, writing to the given streams. Exit codes: 0 for
/// success, equal or all-pass; 1 for not-equal or some failure; 2 for usage
/// and parse errors.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(out, "{}", e).ok();
                    0
                }
                _ => {
                    write!(err, "{}", e).ok();
                    2
                }
            }
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            writeln!(err, "error: {}", e).ok();
            2
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::example_g0;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["graycoh"];
        argv.extend_from_slice(args);
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    const T1: &str = "() u (C D); (B) g (); () h ()";

    #[test]
    fn term_round_trip() {
        let mg = example_g0();
        let f = parse_term(&mg, T1).unwrap();
        assert_eq!(f.len(), 3);
        assert_eq!(parse_term(&mg, &f.to_string()).unwrap(), f);
        let id = parse_term(&mg, "id (A B)").unwrap();
        assert_eq!(id, OneCell::identity(ObjSeq::from_names(&["A", "B"])));
        assert_eq!(parse_term(&mg, &id.to_string()).unwrap(), id);
        let c = parse_term(&mg, "(A) x [B | C D] ()").unwrap();
        assert_eq!(c.target(), ObjSeq::from_names(&["A", "C", "D", "B"]));
    }

    #[test]
    fn term_errors() {
        let mg = example_g0();
        assert!(parse_term(&mg, "() u (C D) ;").is_err());
        assert_eq!(
            parse_term(&mg, "() q ()").unwrap_err().message,
            "unknown arrow q"
        );
        assert_eq!(
            parse_term(&mg, "(Z) u ()").unwrap_err().message,
            "unknown object Z"
        );
        assert!(parse_term(&mg, "() u (); () u ()").is_err());
        assert_eq!(
            parse_term(&mg, "() x [|] ()").unwrap_err().message,
            "empty crossing"
        );
    }

    #[test]
    fn render_fixtures() {
        let mg = example_g0();
        assert_eq!(
            render_ascii(&OneCell::identity(ObjSeq::from_names(&["A", "B"]))),
            " A  B\n"
        );
        let pic = render_ascii(&parse_term(&mg, T1).unwrap());
        let lines: Vec<&str> = pic.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with(" [u]"));
        let cross = render_ascii(
            &parse_term(&adhoc_multigraph("() x [P | Q] ()"), "() x [P | Q] ()").unwrap(),
        );
        assert_eq!(cross, " P  Q\n  X\n Q  P\n");
    }

    #[test]
    fn subcommand_exit_codes() {
        let (code, out, _) = run_str(&["normalize", "--theory", "example-G0", T1]);
        assert_eq!(code, 0);
        assert_eq!(out, "(A) g (); () u (E); () h ()\nsteps: 1\n");
        let (code, out, _) = run_str(&[
            "decide",
            "--theory",
            "example-G0",
            T1,
            "(A) g (); () u (E); () h ()",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("=> Interchange@0"));
        let (code, out, _) = run_str(&["decide", "--theory", "example-G0", "(A) k ()", "() k (A)"]);
        assert_eq!((code, out.as_str()), (1, "NOT EQUAL\n"));
        let (code, _, err) = run_str(&["normalize", "--theory", "example-G0", "() u"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error: term:1:"));
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        assert_eq!(run_str(&["normalize", "--theory", "nope", T1]).0, 2);
    }

    #[test]
    fn weigh_and_interp() {
        let (code, out, _) = run_str(&["weigh", "--theory", "example-G0", T1]);
        assert_eq!((code, out.as_str()), (0, "1\n"));
        let (_, out, _) = run_str(&[
            "weigh",
            "--theory",
            "example-G0",
            "--braided",
            "(A) x [B | C] ()",
        ]);
        assert_eq!(out, "(1, 0, 0, 0)\n");
        let (code, out, _) = run_str(&[
            "interp",
            "--theory",
            "pseudomonoid",
            "[A:C, B:C, X:C] ⊢ P(A, P(B, X))",
        ]);
        assert_eq!((code, out.as_str()), (0, "(C) P (); () P ()\n"));
        let (code, out, _) = run_str(&[
            "interp",
            "--theory",
            "pseudomonoid",
            "[A:C, B:C] |- aa[A, J(), B]",
        ]);
        assert_eq!(code, 0);
        assert!(out.contains("aa"), "{}", out);
        assert_eq!(
            run_str(&["interp", "--theory", "pseudomonoid", "[A:C] ⊢ P(A, A)"]).0,
            2
        );
    }
}
