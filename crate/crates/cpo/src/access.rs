//! Accessibility machinery: polarity of sort occurrences inside a type,
//! accessible argument positions per function symbol, and the transitive
//! accessible-subterm relation that the extended definition's new clauses
//! descend through.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::sig::{FunDecl, Signature};
use crate::term::{SimpleType, Term};
use crate::typeorder::TypeOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A position inside a type: 1 descends into an arrow's domain, 2 into its
/// codomain. The empty position is the type itself.
pub type TypePos = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccessError {
    #[error("type {0} is not built from nullary sorts and arrows")]
    NonSimpleType(String),
    #[error("symbol {0} does not output a nullary sort")]
    NonSimpleOutput(String),
    #[error("sort {sort} sits above {above} in the type order, so accessibility is unavailable")]
    SeparateWorlds { sort: SimpleType, above: SimpleType },
}

/// All sort leaves of a type with their positions, left to right. Errors on
/// sorts with arguments anywhere inside.
pub fn sort_positions(ty: &SimpleType) -> Result<Vec<(TypePos, &SimpleType)>, AccessError> {
    fn walk<'a>(
        ty: &'a SimpleType,
        here: &mut TypePos,
        out: &mut Vec<(TypePos, &'a SimpleType)>,
    ) -> Result<(), AccessError> {
        match ty {
            SimpleType::Sort { args, .. } => {
                if !args.is_empty() {
                    return Err(AccessError::NonSimpleType(ty.to_string()));
                }
                out.push((here.clone(), ty));
                Ok(())
            }
            SimpleType::Arrow { dom, cod } => {
                here.push(1);
                walk(dom, here, out)?;
                here.pop();
                here.push(2);
                walk(cod, here, out)?;
                here.pop();
                Ok(())
            }
        }
    }
    let mut out = Vec::new();
    walk(ty, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// The positions of the given polarity: the sign flips through the domain
/// side of every arrow.
pub fn polar_positions(
    ty: &SimpleType,
    polarity: Polarity,
) -> Result<BTreeSet<TypePos>, AccessError> {
    fn walk(
        ty: &SimpleType,
        want: Polarity,
        current: Polarity,
        here: &mut TypePos,
        out: &mut BTreeSet<TypePos>,
    ) -> Result<(), AccessError> {
        match ty {
            SimpleType::Sort { args, .. } => {
                if !args.is_empty() {
                    return Err(AccessError::NonSimpleType(ty.to_string()));
                }
                if current == want {
                    out.insert(here.clone());
                }
                Ok(())
            }
            SimpleType::Arrow { dom, cod } => {
                here.push(1);
                walk(dom, want, current.flip(), here, out)?;
                here.pop();
                here.push(2);
                walk(cod, want, current, here, out)?;
                here.pop();
                Ok(())
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(ty, polarity, Polarity::Positive, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// Accessible argument indices (1-based) of one symbol. The output type must
/// be a nullary sort; an argument qualifies when no nullary sort strictly
/// above the output occurs in it and sorts equivalent to the output occur
/// only positively. Arguments mentioning applied sorts are skipped.
pub fn acc_positions(decl: &FunDecl, order: &TypeOrder) -> Result<Vec<usize>, AccessError> {
    if !decl.out.is_nullary_sort() {
        return Err(AccessError::NonSimpleOutput(decl.name.clone()));
    }
    let out_sort = &decl.out;
    let mut acc = Vec::new();
    for (k, arg) in decl.args.iter().enumerate() {
        let leaves = match sort_positions(arg) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let positives = polar_positions(arg, Polarity::Positive)
            .expect("leaf scan succeeded, so the polarity scan must too");
        let in_universe =
            |q: Result<bool, _>| q.expect("signature types are seeded into the order's universe");
        let mut ok = true;
        for (pos, leaf) in &leaves {
            if in_universe(order.gt(leaf, out_sort)) {
                ok = false;
                break;
            }
            if in_universe(order.eq(leaf, out_sort)) && !positives.contains(pos) {
                ok = false;
                break;
            }
        }
        if ok {
            acc.push(k + 1);
        }
    }
    Ok(acc)
}

/// Accessible argument indices for every eligible symbol. Symbols whose
/// output is not a nullary sort simply get no entries.
#[derive(Debug, Clone, Default)]
pub struct AccTable {
    map: std::collections::BTreeMap<String, Vec<usize>>,
}

impl AccTable {
    pub fn build(sig: &Signature, order: &TypeOrder) -> AccTable {
        let mut map = std::collections::BTreeMap::new();
        for name in sig.fun_names() {
            let decl = sig.fun(name).expect("iterating declared symbols");
            if let Ok(indices) = acc_positions(decl, order) {
                map.insert(name.to_string(), indices);
            }
        }
        AccTable { map }
    }

    pub fn acc(&self, f: &str) -> &[usize] {
        self.map.get(f).map_or(&[], |v| v.as_slice())
    }
}

/// Strict subterms reachable by descending through accessible argument
/// positions, transitively. Only symbol-headed terms descend; anything else
/// has no accessible subterms.
pub fn acc_subterms(table: &AccTable, v: &Term) -> Vec<Term> {
    fn descend(table: &AccTable, v: &Term, out: &mut Vec<Term>) {
        if let Term::FunApp { sym, args } = v {
            for &i in table.acc(sym) {
                let child = &args[i - 1];
                if !out.contains(child) {
                    out.push(child.clone());
                }
                descend(table, child, out);
            }
        }
    }
    let mut out = Vec::new();
    descend(table, v, &mut out);
    out
}

/// The extended definition assumes nullary-sort data stays below everything
/// else: no nullary sort may sit at or above an arrow or applied-sort type.
pub fn check_separate_worlds(order: &TypeOrder) -> Result<(), AccessError> {
    for a in order.universe() {
        if !a.is_nullary_sort() {
            continue;
        }
        for b in order.universe() {
            if b.is_nullary_sort() {
                continue;
            }
            if order.ge(a, b).expect("both types drawn from the universe") {
                return Err(AccessError::SeparateWorlds { sort: a.clone(), above: b.clone() });
            }
        }
    }
    Ok(())
}
