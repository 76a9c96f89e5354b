//! Problem-file syntax: a lexer and recursive-descent parser for the `.cpo`
//! declaration format, and a printer whose output parses back to the same
//! system.
//!
//! Declarations, one per line, each ended by `;`:
//!
//! ```text
//! # comment to end of line
//! sort N;
//! typeorder O >= N;                 # or `typeorder A = B;` for both ways
//! fun rec : O * A * (O -> A -> A) -> A;
//! fun B : (N -> N -> N);            # constant of arrow type
//! var F : N -> O;
//! prec rec > lim > S;               # chains may mix > and =
//! status rec mul;                   # or lex
//! rule rec(zero, U) -> U;
//! ```
//!
//! Terms are variables, `f(a, b)` for fully applied symbols, `@(h, a, b)`
//! application spines, juxtaposition `h a` (left-associated), and maximal
//! abstractions `\x:T. body`. Primed identifiers are reserved for names the
//! prover generates, so input files may not declare or use them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::prec::{PrecRel, Status};
use crate::sig::{FunDecl, SigError, Signature};
use crate::system::{RewriteSystem, Rule};
use crate::term::{SimpleType, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    Semi,
    Colon,
    Dot,
    Comma,
    LParen,
    RParen,
    Star,
    Lambda,
    At,
    Arrow,
    Gt,
    Ge,
    Eq,
    Eof,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Tok>, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut it = src.chars().peekable();
    macro_rules! bump {
        () => {{
            let c = it.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        }};
    }
    while let Some(&c) = it.peek() {
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '#' {
            while let Some(&c) = it.peek() {
                if c == '\n' {
                    break;
                }
                bump!();
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(&c) = it.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    text.push(bump!());
                } else {
                    break;
                }
            }
            toks.push(Tok { kind: TokKind::Ident, text, line: tline, col: tcol });
            continue;
        }
        let kind = match c {
            ';' => TokKind::Semi,
            ':' => TokKind::Colon,
            '.' => TokKind::Dot,
            ',' => TokKind::Comma,
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '*' => TokKind::Star,
            '\\' => TokKind::Lambda,
            '@' => TokKind::At,
            '=' => TokKind::Eq,
            '-' => {
                bump!();
                if it.peek() == Some(&'>') {
                    bump!();
                    toks.push(Tok {
                        kind: TokKind::Arrow,
                        text: "->".into(),
                        line: tline,
                        col: tcol,
                    });
                    continue;
                }
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    msg: "expected -> after -".into(),
                });
            }
            '>' => {
                bump!();
                if it.peek() == Some(&'=') {
                    bump!();
                    toks.push(Tok { kind: TokKind::Ge, text: ">=".into(), line: tline, col: tcol });
                } else {
                    toks.push(Tok { kind: TokKind::Gt, text: ">".into(), line: tline, col: tcol });
                }
                continue;
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    msg: format!("unexpected character {other:?}"),
                });
            }
        };
        let text = bump!().to_string();
        toks.push(Tok { kind, text, line: tline, col: tcol });
    }
    toks.push(Tok { kind: TokKind::Eof, text: String::new(), line, col });
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, k: TokKind) -> bool {
        self.peek().kind == k
    }

    fn eat(&mut self, k: TokKind) -> bool {
        if self.at(k) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, k: TokKind, what: &str) -> Result<Tok, ParseError> {
        if self.at(k) {
            Ok(self.advance())
        } else {
            let t = self.peek();
            Err(err_at(t, format!("expected {what}, found {}", describe(t))))
        }
    }
}

fn describe(t: &Tok) -> String {
    match t.kind {
        TokKind::Eof => "end of input".into(),
        TokKind::Ident => format!("{:?}", t.text),
        _ => format!("{:?}", t.text),
    }
}

fn err_at(t: &Tok, msg: impl Into<String>) -> ParseError {
    ParseError { line: t.line, col: t.col, msg: msg.into() }
}

fn sig_err_at(t: &Tok, e: SigError) -> ParseError {
    err_at(t, e.to_string())
}

fn ident_no_prime(p: &mut Parser, what: &str) -> Result<Tok, ParseError> {
    let t = p.expect(TokKind::Ident, what)?;
    if t.text.contains('\'') {
        return Err(err_at(&t, "primed names are reserved for generated variables"));
    }
    Ok(t)
}

fn parse_atom_type(p: &mut Parser) -> Result<SimpleType, ParseError> {
    if p.eat(TokKind::LParen) {
        let t = parse_type(p)?;
        p.expect(TokKind::RParen, ")")?;
        Ok(t)
    } else {
        let t = ident_no_prime(p, "a sort name")?;
        Ok(SimpleType::sort(&t.text))
    }
}

fn parse_type(p: &mut Parser) -> Result<SimpleType, ParseError> {
    let lhs = parse_atom_type(p)?;
    if p.eat(TokKind::Arrow) {
        Ok(SimpleType::arrow(lhs, parse_type(p)?))
    } else {
        Ok(lhs)
    }
}

/// Name resolution context for term parsing. The binder scope grows and
/// shrinks as abstractions are entered and left.
struct TermCtx<'a> {
    sig: &'a Signature,
    vars: &'a BTreeMap<String, SimpleType>,
    allow_primes: bool,
}

fn parse_term_in(
    p: &mut Parser,
    ctx: &TermCtx<'_>,
    scope: &mut Vec<(String, SimpleType)>,
) -> Result<Term, ParseError> {
    if p.at(TokKind::Lambda) {
        p.advance();
        let name = if ctx.allow_primes {
            p.expect(TokKind::Ident, "a binder name")?
        } else {
            ident_no_prime(p, "a binder name")?
        };
        if ctx.sig.fun(&name.text).is_some() || ctx.sig.has_sort(&name.text) {
            return Err(err_at(&name, format!("binder {} shadows a declared name", name.text)));
        }
        p.expect(TokKind::Colon, ":")?;
        let ty = parse_type(p)?;
        ctx.sig.check_type(&name.text, &ty).map_err(|e| sig_err_at(&name, e))?;
        p.expect(TokKind::Dot, ".")?;
        scope.push((name.text.clone(), ty.clone()));
        let body = parse_term_in(p, ctx, scope)?;
        scope.pop();
        return Ok(Term::abs(&name.text, ty, body));
    }
    let mut t = parse_term_atom(p, ctx, scope)?;
    while matches!(p.peek().kind, TokKind::Ident | TokKind::LParen | TokKind::At) {
        let arg = parse_term_atom(p, ctx, scope)?;
        t = Term::app(t, arg);
    }
    Ok(t)
}

fn parse_term_atom(
    p: &mut Parser,
    ctx: &TermCtx<'_>,
    scope: &mut Vec<(String, SimpleType)>,
) -> Result<Term, ParseError> {
    if p.eat(TokKind::At) {
        let open = p.expect(TokKind::LParen, "( after @")?;
        let head = parse_term_in(p, ctx, scope)?;
        if !p.eat(TokKind::Comma) {
            return Err(err_at(&open, "@ needs a head and at least one argument"));
        }
        let mut args = vec![parse_term_in(p, ctx, scope)?];
        while p.eat(TokKind::Comma) {
            args.push(parse_term_in(p, ctx, scope)?);
        }
        p.expect(TokKind::RParen, ")")?;
        return Ok(Term::app_spine(head, args));
    }
    if p.eat(TokKind::LParen) {
        let t = parse_term_in(p, ctx, scope)?;
        p.expect(TokKind::RParen, ")")?;
        return Ok(t);
    }
    let tok = p.expect(TokKind::Ident, "a term")?;
    if !ctx.allow_primes && tok.text.contains('\'') {
        return Err(err_at(&tok, "primed names are reserved for generated variables"));
    }
    if let Some((_, ty)) = scope.iter().rev().find(|(n, _)| *n == tok.text) {
        return Ok(Term::var(&tok.text, ty.clone()));
    }
    if let Some(ty) = ctx.vars.get(&tok.text) {
        return Ok(Term::var(&tok.text, ty.clone()));
    }
    if let Some(decl) = ctx.sig.fun(&tok.text) {
        let arity = decl.args.len();
        if arity == 0 {
            return Ok(Term::fun(&tok.text, vec![]));
        }
        if !p.at(TokKind::LParen) {
            return Err(err_at(
                &tok,
                format!("{} takes {arity} argument(s) and must be written applied", tok.text),
            ));
        }
        p.advance();
        let mut args = vec![parse_term_in(p, ctx, scope)?];
        while p.eat(TokKind::Comma) {
            args.push(parse_term_in(p, ctx, scope)?);
        }
        p.expect(TokKind::RParen, ")")?;
        if args.len() != arity {
            return Err(err_at(
                &tok,
                format!("{} takes {arity} argument(s), got {}", tok.text, args.len()),
            ));
        }
        return Ok(Term::fun(&tok.text, args));
    }
    Err(err_at(&tok, format!("unknown identifier {}", tok.text)))
}

fn binder_names(t: &Term, out: &mut std::collections::BTreeSet<String>) {
    match t {
        Term::Var { .. } => {}
        Term::Abs { var, body, .. } => {
            out.insert(var.clone());
            binder_names(body, out);
        }
        Term::App { fun, arg } => {
            binder_names(fun, out);
            binder_names(arg, out);
        }
        Term::FunApp { args, .. } => {
            for a in args {
                binder_names(a, out);
            }
        }
    }
}

/// Parses a whole problem file.
pub fn parse_problem(src: &str) -> Result<RewriteSystem, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let mut sys = RewriteSystem::default();
    let mut rule_count = 0usize;

    while !p.at(TokKind::Eof) {
        let head = p.expect(TokKind::Ident, "a declaration")?;
        match head.text.as_str() {
            "sort" => {
                let name = ident_no_prime(&mut p, "a sort name")?;
                sys.sig.add_sort(&name.text, 0).map_err(|e| sig_err_at(&name, e))?;
                p.expect(TokKind::Semi, ";")?;
            }
            "typeorder" => {
                let start = p.peek().clone();
                let a = parse_type(&mut p)?;
                sys.sig.check_type("typeorder", &a).map_err(|e| sig_err_at(&start, e))?;
                let both = if p.eat(TokKind::Ge) {
                    false
                } else if p.eat(TokKind::Eq) {
                    true
                } else {
                    let t = p.peek();
                    return Err(err_at(t, format!("expected >= or =, found {}", describe(t))));
                };
                let bstart = p.peek().clone();
                let b = parse_type(&mut p)?;
                sys.sig.check_type("typeorder", &b).map_err(|e| sig_err_at(&bstart, e))?;
                p.expect(TokKind::Semi, ";")?;
                sys.type_decls.push((a.clone(), b.clone()));
                if both {
                    sys.type_decls.push((b, a));
                }
            }
            "fun" => {
                let name = ident_no_prime(&mut p, "a function name")?;
                p.expect(TokKind::Colon, ":")?;
                let mut items = vec![parse_atom_type(&mut p)?];
                while p.eat(TokKind::Star) {
                    items.push(parse_atom_type(&mut p)?);
                }
                let decl = if p.eat(TokKind::Arrow) {
                    let out = parse_type(&mut p)?;
                    FunDecl { name: name.text.clone(), args: items, out }
                } else if items.len() == 1 {
                    FunDecl { name: name.text.clone(), args: vec![], out: items.pop().unwrap() }
                } else {
                    return Err(err_at(&name, "argument types need an -> output type"));
                };
                sys.sig.add_fun(decl).map_err(|e| sig_err_at(&name, e))?;
                p.expect(TokKind::Semi, ";")?;
            }
            "var" => {
                let name = ident_no_prime(&mut p, "a variable name")?;
                if sys.sig.fun(&name.text).is_some() || sys.sig.has_sort(&name.text) {
                    return Err(err_at(
                        &name,
                        format!("variable {} collides with a declared name", name.text),
                    ));
                }
                if sys.vars.contains_key(&name.text) {
                    return Err(err_at(&name, format!("variable {} declared twice", name.text)));
                }
                p.expect(TokKind::Colon, ":")?;
                let ty = parse_type(&mut p)?;
                sys.sig.check_type(&name.text, &ty).map_err(|e| sig_err_at(&name, e))?;
                p.expect(TokKind::Semi, ";")?;
                sys.vars.insert(name.text.clone(), ty);
            }
            "prec" => {
                let mut prev = ident_no_prime(&mut p, "a function name")?;
                check_prec_sym(&sys.sig, &prev)?;
                let mut any = false;
                loop {
                    let rel = if p.eat(TokKind::Gt) {
                        PrecRel::Gt
                    } else if p.eat(TokKind::Eq) {
                        PrecRel::Eq
                    } else {
                        break;
                    };
                    let next = ident_no_prime(&mut p, "a function name")?;
                    check_prec_sym(&sys.sig, &next)?;
                    sys.prec_decls.push((prev.text.clone(), rel, next.text.clone()));
                    prev = next;
                    any = true;
                }
                if !any {
                    let t = p.peek();
                    return Err(err_at(t, format!("expected > or =, found {}", describe(t))));
                }
                p.expect(TokKind::Semi, ";")?;
            }
            "status" => {
                let name = ident_no_prime(&mut p, "a function name")?;
                check_prec_sym(&sys.sig, &name)?;
                let word = p.expect(TokKind::Ident, "mul or lex")?;
                let status = match word.text.as_str() {
                    "mul" => Status::Mul,
                    "lex" => Status::Lex,
                    other => {
                        return Err(err_at(&word, format!("expected mul or lex, found {other}")));
                    }
                };
                p.expect(TokKind::Semi, ";")?;
                sys.status_decls.push((name.text.clone(), status));
            }
            "rule" => {
                let ctx = TermCtx { sig: &sys.sig, vars: &sys.vars, allow_primes: false };
                let mut scope = Vec::new();
                let lhs = parse_term_in(&mut p, &ctx, &mut scope)?;
                p.expect(TokKind::Arrow, "-> between rule sides")?;
                let rhs = parse_term_in(&mut p, &ctx, &mut scope)?;
                p.expect(TokKind::Semi, ";")?;
                let mut bound = std::collections::BTreeSet::new();
                binder_names(&lhs, &mut bound);
                binder_names(&rhs, &mut bound);
                for free in lhs.free_vars().keys().chain(rhs.free_vars().keys()) {
                    if bound.contains(free) {
                        return Err(err_at(
                            &head,
                            format!("rule binds {free} and also uses it free"),
                        ));
                    }
                }
                rule_count += 1;
                sys.rules.push(Rule { name: format!("r{rule_count}"), lhs, rhs });
            }
            other => {
                return Err(err_at(&head, format!("unknown declaration {other}")));
            }
        }
    }
    Ok(sys)
}

fn check_prec_sym(sig: &Signature, tok: &Tok) -> Result<(), ParseError> {
    if sig.fun(&tok.text).is_none() {
        return Err(err_at(tok, format!("{} is not a declared function symbol", tok.text)));
    }
    Ok(())
}

/// Parses a type written on its own, prefix of nothing else.
pub(crate) fn parse_type_str(src: &str) -> Result<SimpleType, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let ty = parse_type(&mut p)?;
    let t = p.peek().clone();
    if t.kind != TokKind::Eof {
        return Err(err_at(&t, format!("trailing input {}", describe(&t))));
    }
    Ok(ty)
}

/// Parses a single term against an explicit variable environment. Used to
/// read terms back out of printed traces, where generated primed names are
/// legitimate.
pub fn parse_term_with_env(
    src: &str,
    sig: &Signature,
    env: &BTreeMap<String, SimpleType>,
    allow_primes: bool,
) -> Result<Term, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    let ctx = TermCtx { sig, vars: env, allow_primes };
    let mut scope = Vec::new();
    let t = parse_term_in(&mut p, &ctx, &mut scope)?;
    let eof = p.peek().clone();
    if eof.kind != TokKind::Eof {
        return Err(err_at(&eof, format!("trailing input {}", describe(&eof))));
    }
    Ok(t)
}

pub(crate) fn fmt_arg_type(ty: &SimpleType) -> String {
    match ty {
        SimpleType::Arrow { .. } => format!("({ty})"),
        _ => ty.to_string(),
    }
}

/// Prints a system in the declaration syntax. Parsing the output yields the
/// same system up to renaming of bound variables.
pub fn print_problem(sys: &RewriteSystem) -> String {
    let mut out = String::new();
    for (name, _) in sys.sig.sorts() {
        writeln!(out, "sort {name};").unwrap();
    }
    for (a, b) in &sys.type_decls {
        writeln!(out, "typeorder {a} >= {b};").unwrap();
    }
    for name in sys.sig.fun_names() {
        let decl = sys.sig.fun(name).expect("listed symbol is declared");
        if decl.args.is_empty() {
            writeln!(out, "fun {name} : {};", fmt_arg_type(&decl.out)).unwrap();
        } else {
            let args: Vec<String> = decl.args.iter().map(fmt_arg_type).collect();
            writeln!(out, "fun {name} : {} -> {};", args.join(" * "), decl.out).unwrap();
        }
    }
    for (v, ty) in &sys.vars {
        writeln!(out, "var {v} : {ty};").unwrap();
    }
    for (a, rel, b) in &sys.prec_decls {
        let r = match rel {
            PrecRel::Gt => ">",
            PrecRel::Eq => "=",
        };
        writeln!(out, "prec {a} {r} {b};").unwrap();
    }
    for (name, status) in &sys.status_decls {
        let s = match status {
            Status::Mul => "mul",
            Status::Lex => "lex",
        };
        writeln!(out, "status {name} {s};").unwrap();
    }
    for rule in &sys.rules {
        writeln!(out, "rule {} -> {};", rule.lhs, rule.rhs).unwrap();
    }
    out
}
