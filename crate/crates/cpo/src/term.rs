//! Simply-typed algebraic lambda-terms: types, terms, typechecking and the
//! substitution machinery everything else is built on.
//!
//! Function symbols are always fully applied (a `FunApp` carries exactly the
//! declared number of arguments); partial application goes through explicit
//! `@` nodes. Binders use names, not indices; capture is avoided by drawing
//! replacement names from a [`FreshSupply`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::sig::Signature;

/// A simple type: a declared sort applied to type arguments, or an arrow.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    Sort { name: String, args: Vec<SimpleType> },
    Arrow { dom: Box<SimpleType>, cod: Box<SimpleType> },
}

impl SimpleType {
    pub fn sort(name: &str) -> SimpleType {
        SimpleType::Sort { name: name.to_string(), args: Vec::new() }
    }

    pub fn arrow(dom: SimpleType, cod: SimpleType) -> SimpleType {
        SimpleType::Arrow { dom: Box::new(dom), cod: Box::new(cod) }
    }

    /// Data types are sort-headed; everything else is an arrow.
    pub fn is_data(&self) -> bool {
        matches!(self, SimpleType::Sort { .. })
    }

    /// A simple data type in the accessibility sense: a sort with no arguments.
    pub fn is_nullary_sort(&self) -> bool {
        matches!(self, SimpleType::Sort { args, .. } if args.is_empty())
    }

    /// All structural subterms of the type, self included.
    pub fn subtypes(&self) -> Vec<&SimpleType> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            out.push(t);
            match t {
                SimpleType::Sort { args, .. } => stack.extend(args.iter()),
                SimpleType::Arrow { dom, cod } => {
                    stack.push(dom);
                    stack.push(cod);
                }
            }
        }
        out
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Sort { name, args } => {
                write!(f, "{name}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            SimpleType::Arrow { dom, cod } => {
                // arrows associate to the right; only domains need parens
                if matches!(**dom, SimpleType::Arrow { .. }) {
                    write!(f, "({dom}) -> {cod}")
                } else {
                    write!(f, "{dom} -> {cod}")
                }
            }
        }
    }
}

/// Terms. `App` is binary application; n-ary `@(h, a, b)` surface syntax is
/// desugared to a left-nested spine at parse time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var { name: String, ty: SimpleType },
    Abs { var: String, ty: SimpleType, body: Box<Term> },
    App { fun: Box<Term>, arg: Box<Term> },
    FunApp { sym: String, args: Vec<Term> },
}

/// Head shape of a term, which decides the applicable comparison cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermClass {
    Abstraction,
    Prealgebraic,
    Neutral,
}

pub fn classify(t: &Term) -> TermClass {
    match t {
        Term::Abs { .. } => TermClass::Abstraction,
        Term::FunApp { .. } => TermClass::Prealgebraic,
        Term::Var { .. } | Term::App { .. } => TermClass::Neutral,
    }
}

impl Term {
    pub fn var(name: &str, ty: SimpleType) -> Term {
        Term::Var { name: name.to_string(), ty }
    }

    pub fn abs(var: &str, ty: SimpleType, body: Term) -> Term {
        Term::Abs { var: var.to_string(), ty, body: Box::new(body) }
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App { fun: Box::new(fun), arg: Box::new(arg) }
    }

    /// Left-nested application of `head` to each of `args` in turn.
    pub fn app_spine(head: Term, args: Vec<Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn fun(sym: &str, args: Vec<Term>) -> Term {
        Term::FunApp { sym: sym.to_string(), args }
    }

    /// The type of a well-typed term. Variables carry their types, so no
    /// environment is needed.
    pub fn ty(&self) -> SimpleType {
        match self {
            Term::Var { ty, .. } => ty.clone(),
            Term::Abs { ty, body, .. } => SimpleType::arrow(ty.clone(), body.ty()),
            Term::App { fun, .. } => match fun.ty() {
                SimpleType::Arrow { cod, .. } => *cod,
                other => other, // ill-typed; typecheck reports this properly
            },
            Term::FunApp { .. } => panic!("Term::ty on a FunApp requires a signature; use ty_in"),
        }
    }

    /// The type of the term when it can be computed without a signature,
    /// i.e. when no function symbol decides the result type.
    pub fn ty_opt(&self) -> Option<SimpleType> {
        match self {
            Term::Var { ty, .. } => Some(ty.clone()),
            Term::Abs { ty, body, .. } => {
                Some(SimpleType::arrow(ty.clone(), body.ty_opt()?))
            }
            Term::App { fun, .. } => match fun.ty_opt()? {
                SimpleType::Arrow { cod, .. } => Some(*cod),
                _ => None,
            },
            Term::FunApp { .. } => None,
        }
    }

    /// Like [`Term::ty`] but resolves function symbols through `sig`.
    pub fn ty_in(&self, sig: &Signature) -> SimpleType {
        match self {
            Term::Var { ty, .. } => ty.clone(),
            Term::Abs { ty, body, .. } => SimpleType::arrow(ty.clone(), body.ty_in(sig)),
            Term::App { fun, .. } => match fun.ty_in(sig) {
                SimpleType::Arrow { cod, .. } => *cod,
                other => other,
            },
            Term::FunApp { sym, .. } => match sig.fun(sym) {
                Some(d) => d.out.clone(),
                None => panic!("undeclared symbol {sym} in Term::ty_in"),
            },
        }
    }

    /// Free variables with their types, name-ordered.
    pub fn free_vars(&self) -> BTreeMap<String, SimpleType> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut BTreeMap<String, SimpleType>) {
            match t {
                Term::Var { name, ty } => {
                    if !bound.iter().any(|b| b == name) {
                        out.insert(name.clone(), ty.clone());
                    }
                }
                Term::Abs { var, body, .. } => {
                    bound.push(var.clone());
                    go(body, bound, out);
                    bound.pop();
                }
                Term::App { fun, arg } => {
                    go(fun, bound, out);
                    go(arg, bound, out);
                }
                Term::FunApp { args, .. } => {
                    for a in args {
                        go(a, bound, out);
                    }
                }
            }
        }
        let mut out = BTreeMap::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every name occurring anywhere in the term: free, bound or binding.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var { name, .. } => {
                out.insert(name.clone());
            }
            Term::Abs { var, body, .. } => {
                out.insert(var.clone());
                body.all_names(out);
            }
            Term::App { fun, arg } => {
                fun.all_names(out);
                arg.all_names(out);
            }
            Term::FunApp { args, .. } => {
                for a in args {
                    a.all_names(out);
                }
            }
        }
    }

    /// Unfolds a left-nested application spine into its head and arguments.
    /// `@(@(h, a), b)` gives `(h, [a, b])`; a non-application is its own head.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App { fun, arg } = head {
            args.push(arg.as_ref());
            head = fun;
        }
        args.reverse();
        (head, args)
    }

    /// Number of nodes, the size measure used by generators and budgets.
    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } => 1,
            Term::Abs { body, .. } => 1 + body.size(),
            Term::App { fun, arg } => 1 + fun.size() + arg.size(),
            Term::FunApp { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, .. } => write!(f, "{name}"),
            Term::Abs { var, ty, body } => write!(f, "\\{var}:{ty}. {body}"),
            Term::App { .. } => {
                let (head, args) = self.spine();
                write!(f, "@({head}")?;
                for a in args {
                    write!(f, ", {a}")?;
                }
                write!(f, ")")
            }
            Term::FunApp { sym, args } => {
                write!(f, "{sym}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Draws names that are distinct from everything seen so far. Seeded with all
/// identifiers of the problem; primes are appended until the name is unused,
/// and primes are rejected in input identifiers, so drawn names can never
/// collide with input names or with each other.
#[derive(Debug, Clone, Default)]
pub struct FreshSupply {
    used: BTreeSet<String>,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply::default()
    }

    pub fn seed<I: IntoIterator<Item = String>>(names: I) -> FreshSupply {
        FreshSupply { used: names.into_iter().collect() }
    }

    pub fn mark_used(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, hint: &str) -> String {
        let mut cand = hint.to_string();
        while self.used.contains(&cand) {
            cand.push('\'');
        }
        self.used.insert(cand.clone());
        cand
    }
}

/// A path into a term; child slots are numbered from 1.
pub type TermPath = Vec<u32>;

fn fmt_path(p: &TermPath) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("undeclared symbol {sym} at {}", fmt_path(path))]
    UndeclaredSymbol { sym: String, path: TermPath },
    #[error("unbound variable {name} at {}", fmt_path(path))]
    UnboundVariable { name: String, path: TermPath },
    #[error("{sym} takes {expected} arguments, got {found} at {}", fmt_path(path))]
    ArityMismatch { sym: String, expected: usize, found: usize, path: TermPath },
    #[error("type mismatch at {}: expected {expected}, found {found}", fmt_path(path))]
    TypeMismatch { expected: String, found: String, path: TermPath },
}

fn mismatch(path: &TermPath, expected: &SimpleType, found: &SimpleType) -> TypeError {
    TypeError::TypeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
        path: path.clone(),
    }
}

/// Checks `t` against the signature and an environment typing its free
/// variables, returning the type. Inline variable types must agree with the
/// environment and with binders; function symbols must be declared and fully
/// applied.
pub fn typecheck(
    t: &Term,
    env: &BTreeMap<String, SimpleType>,
    sig: &Signature,
) -> Result<SimpleType, TypeError> {
    fn go(
        t: &Term,
        env: &mut BTreeMap<String, SimpleType>,
        sig: &Signature,
        path: &mut TermPath,
    ) -> Result<SimpleType, TypeError> {
        match t {
            Term::Var { name, ty } => match env.get(name) {
                None => Err(TypeError::UnboundVariable { name: clone_name(name), path: path.clone() }),
                Some(expected) if expected != ty => Err(mismatch(path, expected, ty)),
                Some(_) => Ok(ty.clone()),
            },
            Term::Abs { var, ty, body } => {
                let shadowed = env.insert(var.clone(), ty.clone());
                path.push(1);
                let body_ty = go(body, env, sig, path)?;
                path.pop();
                match shadowed {
                    Some(old) => {
                        env.insert(var.clone(), old);
                    }
                    None => {
                        env.remove(var);
                    }
                }
                Ok(SimpleType::arrow(ty.clone(), body_ty))
            }
            Term::App { fun, arg } => {
                path.push(1);
                let fun_ty = go(fun, env, sig, path)?;
                path.pop();
                path.push(2);
                let arg_ty = go(arg, env, sig, path)?;
                match fun_ty {
                    SimpleType::Arrow { dom, cod } => {
                        if *dom != arg_ty {
                            return Err(mismatch(path, &dom, &arg_ty));
                        }
                        path.pop();
                        Ok(*cod)
                    }
                    other => {
                        path.pop();
                        Err(TypeError::TypeMismatch {
                            expected: "an arrow type".to_string(),
                            found: other.to_string(),
                            path: path.clone(),
                        })
                    }
                }
            }
            Term::FunApp { sym, args } => {
                let decl = sig.fun(sym).ok_or_else(|| TypeError::UndeclaredSymbol {
                    sym: sym.clone(),
                    path: path.clone(),
                })?;
                if decl.args.len() != args.len() {
                    return Err(TypeError::ArityMismatch {
                        sym: sym.clone(),
                        expected: decl.args.len(),
                        found: args.len(),
                        path: path.clone(),
                    });
                }
                for (i, (a, want)) in args.iter().zip(decl.args.iter()).enumerate() {
                    path.push(i as u32 + 1);
                    let got = go(a, env, sig, path)?;
                    if got != *want {
                        return Err(mismatch(path, want, &got));
                    }
                    path.pop();
                }
                Ok(decl.out.clone())
            }
        }
    }
    fn clone_name(n: &str) -> String {
        n.to_string()
    }
    let mut env = env.clone();
    go(t, &mut env, sig, &mut Vec::new())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("substitution for {var}: replacement has type {found}, expected {expected}")]
    SubstTypeMismatch { var: String, expected: String, found: String },
}

/// Capture-avoiding substitution of `u` for the free variable `x` (of type
/// `x_ty`). Binders that would capture free variables of `u` are renamed with
/// names drawn from `supply`.
pub fn substitute(
    t: &Term,
    x: &str,
    x_ty: &SimpleType,
    u: &Term,
    supply: &mut FreshSupply,
) -> Result<Term, TermError> {
    // best effort: a replacement whose type needs the signature is the
    // caller's responsibility
    if let Some(ref got) = u.ty_opt() {
        if got != x_ty {
            return Err(TermError::SubstTypeMismatch {
                var: x.to_string(),
                expected: x_ty.to_string(),
                found: got.to_string(),
            });
        }
    }
    Ok(subst_raw(t, x, u, supply))
}

fn subst_raw(t: &Term, x: &str, u: &Term, supply: &mut FreshSupply) -> Term {
    match t {
        Term::Var { name, .. } if name == x => u.clone(),
        Term::Var { .. } => t.clone(),
        Term::Abs { var, ty, body } => {
            if var == x {
                // inner binder shadows the substituted variable
                return t.clone();
            }
            if u.free_vars().contains_key(var) && body_mentions(body, x) {
                let renamed = supply.fresh(var);
                let fresh_var = Term::Var { name: renamed.clone(), ty: ty.clone() };
                let body2 = subst_raw(body, var, &fresh_var, supply);
                Term::Abs { var: renamed, ty: ty.clone(), body: Box::new(subst_raw(&body2, x, u, supply)) }
            } else {
                Term::Abs { var: var.clone(), ty: ty.clone(), body: Box::new(subst_raw(body, x, u, supply)) }
            }
        }
        Term::App { fun, arg } => Term::App {
            fun: Box::new(subst_raw(fun, x, u, supply)),
            arg: Box::new(subst_raw(arg, x, u, supply)),
        },
        Term::FunApp { sym, args } => Term::FunApp {
            sym: sym.clone(),
            args: args.iter().map(|a| subst_raw(a, x, u, supply)).collect(),
        },
    }
}

fn body_mentions(t: &Term, x: &str) -> bool {
    t.free_vars().contains_key(x)
}

/// Alpha-equivalence. Binder types must agree structurally; free variables
/// must agree by name and type.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, la: &mut Vec<String>, lb: &mut Vec<String>) -> bool {
        match (a, b) {
            (Term::Var { name: na, ty: ta }, Term::Var { name: nb, ty: tb }) => {
                let ia = la.iter().rposition(|v| v == na);
                let ib = lb.iter().rposition(|v| v == nb);
                match (ia, ib) {
                    (Some(i), Some(j)) => i == j && ta == tb,
                    (None, None) => na == nb && ta == tb,
                    _ => false,
                }
            }
            (Term::Abs { var: va, ty: ta, body: ba }, Term::Abs { var: vb, ty: tb, body: bb }) => {
                if ta != tb {
                    return false;
                }
                la.push(va.clone());
                lb.push(vb.clone());
                let r = go(ba, bb, la, lb);
                la.pop();
                lb.pop();
                r
            }
            (Term::App { fun: fa, arg: aa }, Term::App { fun: fb, arg: ab }) => {
                go(fa, fb, la, lb) && go(aa, ab, la, lb)
            }
            (Term::FunApp { sym: sa, args: aa }, Term::FunApp { sym: sb, args: ab }) => {
                sa == sb
                    && aa.len() == ab.len()
                    && aa.iter().zip(ab).all(|(x, y)| go(x, y, la, lb))
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Renames every binder to a canonical numbered name (pre-order). Two terms
/// are alpha-equivalent exactly when their canonical forms are equal, which is
/// what memo keys are built from. The canonical names use `!`, which cannot
/// occur in input identifiers.
pub fn alpha_canon(t: &Term) -> Term {
    fn go(t: &Term, map: &mut Vec<(String, String)>, counter: &mut usize) -> Term {
        match t {
            Term::Var { name, ty } => {
                let name = map
                    .iter()
                    .rev()
                    .find(|(old, _)| old == name)
                    .map(|(_, new)| new.clone())
                    .unwrap_or_else(|| name.clone());
                Term::Var { name, ty: ty.clone() }
            }
            Term::Abs { var, ty, body } => {
                let new = format!("!{counter}");
                *counter += 1;
                map.push((var.clone(), new.clone()));
                let body = go(body, map, counter);
                map.pop();
                Term::Abs { var: new, ty: ty.clone(), body: Box::new(body) }
            }
            Term::App { fun, arg } => Term::App {
                fun: Box::new(go(fun, map, counter)),
                arg: Box::new(go(arg, map, counter)),
            },
            Term::FunApp { sym, args } => Term::FunApp {
                sym: sym.clone(),
                args: args.iter().map(|a| go(a, map, counter)).collect(),
            },
        }
    }
    go(t, &mut Vec::new(), &mut 0)
}

/// Recognizes `\x:a. @(v, x)` with `x` not free in `v` and returns `v`.
/// Only a literal application node counts: `\x. f(x)` has an algebraic body
/// and is not an eta-expansion of anything.
pub fn eta_view(t: &Term) -> Option<&Term> {
    if let Term::Abs { var, body, .. } = t {
        if let Term::App { fun, arg } = body.as_ref() {
            if let Term::Var { name, .. } = arg.as_ref() {
                if name == var && !fun.free_vars().contains_key(var) {
                    return Some(fun);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::{FunDecl, Signature};

    fn nat() -> SimpleType {
        SimpleType::sort("N")
    }

    fn sig_with_f() -> Signature {
        let mut sig = Signature::new();
        sig.add_sort("N", 0).unwrap();
        sig.add_fun(FunDecl { name: "f".into(), args: vec![nat()], out: nat() }).unwrap();
        sig
    }

    #[test]
    fn typecheck_accepts_simple_application() {
        let sig = sig_with_f();
        let t = Term::abs("x", nat(), Term::fun("f", vec![Term::var("x", nat())]));
        let ty = typecheck(&t, &BTreeMap::new(), &sig).unwrap();
        assert_eq!(ty, SimpleType::arrow(nat(), nat()));
    }

    #[test]
    fn typecheck_rejects_unbound_and_arity() {
        let sig = sig_with_f();
        let t = Term::var("y", nat());
        assert!(matches!(
            typecheck(&t, &BTreeMap::new(), &sig),
            Err(TypeError::UnboundVariable { .. })
        ));
        let t = Term::fun("f", vec![]);
        assert!(matches!(
            typecheck(&t, &BTreeMap::new(), &sig),
            Err(TypeError::ArityMismatch { expected: 1, found: 0, .. })
        ));
    }

    #[test]
    fn typecheck_rejects_wrong_argument_type() {
        let mut sig = sig_with_f();
        sig.add_sort("O", 0).unwrap();
        let o = SimpleType::sort("O");
        let t = Term::fun("f", vec![Term::var("y", o)]);
        let mut env = BTreeMap::new();
        env.insert("y".to_string(), SimpleType::sort("O"));
        assert!(matches!(typecheck(&t, &env, &sig), Err(TypeError::TypeMismatch { .. })));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (\y. @(x, y)){x := y} must rename the binder
        let f_ty = SimpleType::arrow(nat(), nat());
        let t = Term::abs(
            "y",
            nat(),
            Term::app(Term::var("x", f_ty.clone()), Term::var("y", nat())),
        );
        let mut supply = FreshSupply::seed(["x".into(), "y".into()]);
        let r = substitute(&t, "x", &f_ty, &Term::var("y", f_ty.clone()), &mut supply).unwrap();
        let expected = Term::abs(
            "y'",
            nat(),
            Term::app(Term::var("y", f_ty.clone()), Term::var("y'", nat())),
        );
        assert_eq!(r, expected);
    }

    #[test]
    fn substitution_respects_shadowing() {
        // (\x. x){x := z} is unchanged: the binder shadows
        let t = Term::abs("x", nat(), Term::var("x", nat()));
        let mut supply = FreshSupply::new();
        let r = substitute(&t, "x", &nat(), &Term::var("z", nat()), &mut supply).unwrap();
        assert_eq!(r, t);
    }

    #[test]
    fn substitution_checks_types() {
        let o = SimpleType::sort("O");
        let t = Term::var("x", nat());
        let mut supply = FreshSupply::new();
        assert!(substitute(&t, "x", &nat(), &Term::var("z", o), &mut supply).is_err());
    }

    #[test]
    fn alpha_eq_identifies_renamed_binders() {
        let a = Term::abs("x", nat(), Term::var("x", nat()));
        let b = Term::abs("y", nat(), Term::var("y", nat()));
        assert!(alpha_eq(&a, &b));
        assert_eq!(alpha_canon(&a), alpha_canon(&b));
    }

    #[test]
    fn alpha_eq_distinguishes_binder_types() {
        let o = SimpleType::sort("O");
        let a = Term::abs("x", nat(), Term::var("x", nat()));
        let b = Term::abs("x", o.clone(), Term::var("x", o));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn alpha_eq_keeps_free_variables_apart() {
        let a = Term::var("x", nat());
        let b = Term::var("y", nat());
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn eta_view_accepts_only_application_bodies() {
        let g_ty = SimpleType::arrow(nat(), nat());
        let g = Term::var("g", g_ty);
        let t = Term::abs("x", nat(), Term::app(g.clone(), Term::var("x", nat())));
        assert_eq!(eta_view(&t), Some(&g));

        // body is algebraic, not an application node
        let t = Term::abs("x", nat(), Term::fun("f", vec![Term::var("x", nat())]));
        assert_eq!(eta_view(&t), None);

        // bound variable occurs in the function part
        let t = Term::abs(
            "x",
            nat(),
            Term::app(
                Term::app(Term::var("h", SimpleType::arrow(nat(), SimpleType::arrow(nat(), nat()))), Term::var("x", nat())),
                Term::var("x", nat()),
            ),
        );
        assert_eq!(eta_view(&t), None);
    }

    #[test]
    fn fresh_names_use_primes_and_never_repeat() {
        let mut s = FreshSupply::seed(["n".into()]);
        assert_eq!(s.fresh("n"), "n'");
        assert_eq!(s.fresh("n"), "n''");
        assert_eq!(s.fresh("z"), "z");
        assert_eq!(s.fresh("z"), "z'");
    }

    #[test]
    fn classify_by_head() {
        let t = Term::abs("x", nat(), Term::var("x", nat()));
        assert_eq!(classify(&t), TermClass::Abstraction);
        assert_eq!(classify(&Term::fun("f", vec![Term::var("x", nat())])), TermClass::Prealgebraic);
        assert_eq!(classify(&Term::var("x", nat())), TermClass::Neutral);
        let ap = Term::app(Term::var("g", SimpleType::arrow(nat(), nat())), Term::var("x", nat()));
        assert_eq!(classify(&ap), TermClass::Neutral);
    }

    #[test]
    fn spine_unfolds_left_nested_applications() {
        let h = Term::var("h", SimpleType::arrow(nat(), SimpleType::arrow(nat(), nat())));
        let t = Term::app_spine(h.clone(), vec![Term::var("a", nat()), Term::var("b", nat())]);
        let (head, args) = t.spine();
        assert_eq!(head, &h);
        assert_eq!(args.len(), 2);
    }
}
