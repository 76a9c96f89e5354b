//! One-step rewriting for validated systems: rule application modulo alpha,
//! beta and eta contraction, and a step-bounded walk driver.
//!
//! Orientation proves every rule decreasing in a well-founded order that
//! contains beta and eta, so reduction sequences of an oriented system must
//! halt. The walk driver makes that claim observable: it follows reducts
//! chosen by a caller-supplied picker until no redex remains or a step bound
//! is hit.

use std::collections::BTreeMap;

use crate::system::{Rule, RewriteSystem};
use crate::term::{alpha_eq, eta_view, substitute, FreshSupply, SimpleType, Term};

/// Matches `pattern` against `subject` up to renaming of bound variables.
/// Free pattern variables (the rule's declared variables) bind subject
/// subterms; a candidate subterm mentioning a binder that sits between the
/// match root and the variable is rejected, since extracting it would move
/// the subterm out of that binder's scope. Repeated variables must bind
/// alpha-equal subterms.
pub fn match_rule(
    pattern: &Term,
    pvars: &BTreeMap<String, SimpleType>,
    subject: &Term,
) -> Option<BTreeMap<String, Term>> {
    fn go(
        p: &Term,
        s: &Term,
        pbound: &mut Vec<String>,
        sbound: &mut Vec<String>,
        binds: &mut BTreeMap<String, Term>,
        pvars: &BTreeMap<String, SimpleType>,
    ) -> bool {
        match (p, s) {
            (Term::Var { name, .. }, _) => {
                if let Some(i) = pbound.iter().rposition(|b| b == name) {
                    return matches!(s, Term::Var { name: sn, .. }
                        if sbound.iter().rposition(|b| b == sn) == Some(i));
                }
                if !pvars.contains_key(name) {
                    return false;
                }
                let free = s.free_vars();
                if sbound.iter().any(|b| free.contains_key(b)) {
                    return false;
                }
                match binds.get(name) {
                    Some(prev) => alpha_eq(prev, s),
                    None => {
                        binds.insert(name.clone(), s.clone());
                        true
                    }
                }
            }
            (
                Term::Abs { var: pv, ty: pt, body: pb },
                Term::Abs { var: sv, ty: st, body: sb },
            ) => {
                if pt != st {
                    return false;
                }
                pbound.push(pv.clone());
                sbound.push(sv.clone());
                let ok = go(pb, sb, pbound, sbound, binds, pvars);
                pbound.pop();
                sbound.pop();
                ok
            }
            (Term::App { fun: pf, arg: pa }, Term::App { fun: sf, arg: sa }) => {
                go(pf, sf, pbound, sbound, binds, pvars)
                    && go(pa, sa, pbound, sbound, binds, pvars)
            }
            (Term::FunApp { sym: ps, args: pa }, Term::FunApp { sym: ss, args: sa }) => {
                ps == ss
                    && pa.len() == sa.len()
                    && pa
                        .iter()
                        .zip(sa)
                        .all(|(x, y)| go(x, y, pbound, sbound, binds, pvars))
            }
            _ => false,
        }
    }
    let mut binds = BTreeMap::new();
    if go(pattern, subject, &mut Vec::new(), &mut Vec::new(), &mut binds, pvars) {
        Some(binds)
    } else {
        None
    }
}

/// Instantiates `t` with all bindings at once, renaming binders that would
/// capture a free variable of an incoming term.
pub fn apply_bindings(
    t: &Term,
    binds: &BTreeMap<String, Term>,
    supply: &mut FreshSupply,
) -> Term {
    match t {
        Term::Var { name, .. } => match binds.get(name) {
            Some(u) => u.clone(),
            None => t.clone(),
        },
        Term::Abs { var, ty, body } => {
            let mut inner = binds.clone();
            inner.remove(var);
            if inner.is_empty() {
                return t.clone();
            }
            let body_free = body.free_vars();
            let captures = inner.iter().any(|(x, u)| {
                body_free.contains_key(x) && u.free_vars().contains_key(var)
            });
            if captures {
                let renamed = supply.fresh(var);
                let fresh_var = Term::var(&renamed, ty.clone());
                let body2 = substitute(body, var, ty, &fresh_var, supply)
                    .expect("renaming keeps the binder type");
                Term::abs(&renamed, ty.clone(), apply_bindings(&body2, &inner, supply))
            } else {
                Term::abs(var, ty.clone(), apply_bindings(body, &inner, supply))
            }
        }
        Term::App { fun, arg } => Term::app(
            apply_bindings(fun, binds, supply),
            apply_bindings(arg, binds, supply),
        ),
        Term::FunApp { sym, args } => Term::fun(
            sym,
            args.iter().map(|a| apply_bindings(a, binds, supply)).collect(),
        ),
    }
}

fn seeded_supply(t: &Term, rules: &[Rule]) -> FreshSupply {
    let mut names = std::collections::BTreeSet::new();
    t.all_names(&mut names);
    for r in rules {
        r.lhs.all_names(&mut names);
        r.rhs.all_names(&mut names);
    }
    FreshSupply::seed(names)
}

/// Every term reachable from `t` in exactly one step: a rule applied at some
/// position, a beta contraction, or an eta contraction. Each redex position
/// contributes one entry, in a fixed left-to-right, outside-in order.
pub fn successors(t: &Term, sys: &RewriteSystem) -> Vec<Term> {
    let mut out = Vec::new();
    let mut supply = seeded_supply(t, &sys.rules);

    for rule in &sys.rules {
        if let Some(binds) = match_rule(&rule.lhs, &sys.vars, t) {
            out.push(apply_bindings(&rule.rhs, &binds, &mut supply));
        }
    }
    if let Term::App { fun, arg } = t {
        if let Term::Abs { var, ty, body } = &**fun {
            out.push(
                substitute(body, var, ty, arg, &mut supply)
                    .expect("a well-typed redex substitutes"),
            );
        }
    }
    if let Some(core) = eta_view(t) {
        out.push(core.clone());
    }

    match t {
        Term::Var { .. } => {}
        Term::Abs { var, ty, body } => {
            for b in successors(body, sys) {
                out.push(Term::abs(var, ty.clone(), b));
            }
        }
        Term::App { fun, arg } => {
            for f in successors(fun, sys) {
                out.push(Term::app(f, (**arg).clone()));
            }
            for a in successors(arg, sys) {
                out.push(Term::app((**fun).clone(), a));
            }
        }
        Term::FunApp { sym, args } => {
            for (i, a) in args.iter().enumerate() {
                for a2 in successors(a, sys) {
                    let mut args2 = args.clone();
                    args2[i] = a2;
                    out.push(Term::fun(sym, args2.clone()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkOutcome {
    /// No redex remained after `steps` steps.
    Halted { steps: usize },
    /// The step bound was hit with redexes still available.
    Exceeded { cap: usize },
}

/// Follows one reduction sequence from `start`. At each step the picker is
/// given the number of available reducts and returns the index to follow.
pub fn walk(
    sys: &RewriteSystem,
    start: &Term,
    max_steps: usize,
    pick: &mut dyn FnMut(usize) -> usize,
) -> WalkOutcome {
    let mut current = start.clone();
    for steps in 0..max_steps {
        let next = successors(&current, sys);
        if next.is_empty() {
            return WalkOutcome::Halted { steps };
        }
        let i = pick(next.len()) % next.len();
        current = next[i].clone();
    }
    let final_moves = successors(&current, sys);
    if final_moves.is_empty() {
        WalkOutcome::Halted { steps: max_steps }
    } else {
        WalkOutcome::Exceeded { cap: max_steps }
    }
}
