//! Precedence on function symbols, argument statuses, and the multiset and
//! lexicographic extensions used by status comparisons.
//!
//! The precedence is a quasi-order over the declared symbols plus the
//! application head `@`, which every named symbol is above. Declared chains
//! are closed under transitivity; a declared strict pair whose closure makes
//! the two symbols equivalent is a contradiction and rejected at load.

use std::collections::BTreeMap;

use thiserror::Error;

/// A term head, as seen by the precedence: either the application node or a
/// named function symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head<'a> {
    App,
    Sym(&'a str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecRel {
    Gt,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrecError {
    #[error("precedence mentions undeclared symbol {0}")]
    UnknownSymbol(String),
    #[error("precedence declares {0} > {1} but the closure makes them equivalent")]
    Contradiction(String, String),
    #[error("symbols {0} and {1} are equivalent in the precedence but have different statuses")]
    StatusClash(String, String),
    #[error(
        "symbols {0} and {1} are equivalent with lexicographic status but have arities {2} and {3}"
    )]
    LexArityMismatch(String, String, usize, usize),
}

#[derive(Debug, Clone)]
pub struct Precedence {
    syms: Vec<String>,
    index: BTreeMap<String, usize>,
    ge: Vec<Vec<bool>>,
}

impl Precedence {
    /// Closes the declared relations over the given symbols. `decls` entries
    /// read left-to-right: `(f, Gt, g)` means f is strictly above g.
    pub fn build(
        symbols: &[String],
        decls: &[(String, PrecRel, String)],
    ) -> Result<Precedence, PrecError> {
        let syms: Vec<String> = symbols.to_vec();
        let index: BTreeMap<String, usize> =
            syms.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let n = syms.len();
        let mut ge = vec![vec![false; n]; n];
        for (i, row) in ge.iter_mut().enumerate() {
            row[i] = true;
        }
        let look = |name: &String| {
            index.get(name).copied().ok_or_else(|| PrecError::UnknownSymbol(name.clone()))
        };
        for (a, rel, b) in decls {
            let i = look(a)?;
            let j = look(b)?;
            ge[i][j] = true;
            if *rel == PrecRel::Eq {
                ge[j][i] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                if ge[i][k] {
                    #[allow(clippy::needless_range_loop)]
                    for j in 0..n {
                        if ge[k][j] {
                            ge[i][j] = true;
                        }
                    }
                }
            }
        }
        for (a, rel, b) in decls {
            if *rel == PrecRel::Gt {
                let i = index[a];
                let j = index[b];
                if ge[j][i] {
                    return Err(PrecError::Contradiction(a.clone(), b.clone()));
                }
            }
        }
        Ok(Precedence { syms, index, ge })
    }

    fn idx(&self, name: &str) -> usize {
        *self.index.get(name).unwrap_or_else(|| panic!("symbol {name} not in precedence"))
    }

    pub fn gt(&self, a: Head<'_>, b: Head<'_>) -> bool {
        match (a, b) {
            (Head::Sym(_), Head::App) => true,
            (Head::App, _) => false,
            (Head::Sym(f), Head::Sym(g)) => {
                let (i, j) = (self.idx(f), self.idx(g));
                self.ge[i][j] && !self.ge[j][i]
            }
        }
    }

    pub fn eq(&self, a: Head<'_>, b: Head<'_>) -> bool {
        match (a, b) {
            (Head::App, Head::App) => true,
            (Head::Sym(f), Head::Sym(g)) => {
                let (i, j) = (self.idx(f), self.idx(g));
                self.ge[i][j] && self.ge[j][i]
            }
            _ => false,
        }
    }

    pub fn symbols(&self) -> &[String] {
        &self.syms
    }

    /// Equivalence classes of named symbols, each in declaration order.
    pub fn eq_classes(&self) -> Vec<Vec<String>> {
        let n = self.syms.len();
        let mut seen = vec![false; n];
        let mut classes = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut class = vec![self.syms[i].clone()];
            seen[i] = true;
            #[allow(clippy::needless_range_loop)]
            for j in i + 1..n {
                if !seen[j] && self.ge[i][j] && self.ge[j][i] {
                    class.push(self.syms[j].clone());
                    seen[j] = true;
                }
            }
            classes.push(class);
        }
        classes
    }

    /// Equivalent symbols must share a status, and a lexicographic class
    /// must be arity-uniform.
    pub fn validate_statuses(
        &self,
        arities: &BTreeMap<String, usize>,
        statuses: &StatusMap,
    ) -> Result<(), PrecError> {
        for class in self.eq_classes() {
            let first = &class[0];
            for other in &class[1..] {
                if statuses.get(first) != statuses.get(other) {
                    return Err(PrecError::StatusClash(first.clone(), other.clone()));
                }
                if statuses.get(first) == Status::Lex && arities[first] != arities[other] {
                    return Err(PrecError::LexArityMismatch(
                        first.clone(),
                        other.clone(),
                        arities[first],
                        arities[other],
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Mul,
    Lex,
}

/// Status per named symbol; anything undeclared compares by multiset.
#[derive(Debug, Clone, Default)]
pub struct StatusMap {
    map: BTreeMap<String, Status>,
}

impl StatusMap {
    pub fn new() -> StatusMap {
        StatusMap::default()
    }

    pub fn set(&mut self, name: &str, status: Status) {
        self.map.insert(name.to_string(), status);
    }

    pub fn get(&self, name: &str) -> Status {
        self.map.get(name).copied().unwrap_or(Status::Mul)
    }

    pub fn declared(&self) -> impl Iterator<Item = (&String, Status)> {
        self.map.iter().map(|(k, v)| (k, *v))
    }
}

/// Certificate for a strict multiset comparison: `kept` pairs (i, j) were
/// cancelled as equal, every remaining right element j is covered by a
/// strictly greater remaining left element i, recorded in `cover` as (i, j).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulWitness {
    pub kept: Vec<(usize, usize)>,
    pub cover: Vec<(usize, usize)>,
}

/// Strict multiset extension over precomputed comparison matrices.
/// `eq[i][j]` and `gt[i][j]` relate left element i to right element j. The
/// left multiset is strictly greater when some decomposition cancels equal
/// elements one-for-one and a nonempty remainder of the left side covers
/// every remaining right element. The search tries candidates in ascending
/// index order, so the returned witness is deterministic.
pub fn multiset_ext_matrix(eq: &[Vec<bool>], gt: &[Vec<bool>]) -> Option<MulWitness> {
    let n_left = eq.len();
    if n_left == 0 {
        return None;
    }
    let n_right = eq[0].len();

    #[allow(clippy::too_many_arguments)]
    fn assign(
        j: usize,
        n_left: usize,
        n_right: usize,
        eq: &[Vec<bool>],
        gt: &[Vec<bool>],
        used: &mut Vec<bool>,
        kept: &mut Vec<(usize, usize)>,
        deferred: &mut Vec<usize>,
    ) -> Option<MulWitness> {
        if j == n_right {
            let remaining: Vec<usize> = (0..n_left).filter(|&i| !used[i]).collect();
            if remaining.is_empty() {
                return None;
            }
            let mut cover = Vec::new();
            for &d in deferred.iter() {
                let i = remaining.iter().copied().find(|&i| gt[i][d])?;
                cover.push((i, d));
            }
            return Some(MulWitness { kept: kept.clone(), cover });
        }
        for i in 0..n_left {
            if !used[i] && eq[i][j] {
                used[i] = true;
                kept.push((i, j));
                if let Some(w) = assign(j + 1, n_left, n_right, eq, gt, used, kept, deferred) {
                    return Some(w);
                }
                kept.pop();
                used[i] = false;
            }
        }
        deferred.push(j);
        let res = assign(j + 1, n_left, n_right, eq, gt, used, kept, deferred);
        deferred.pop();
        res
    }

    let mut used = vec![false; n_left];
    let mut kept = Vec::new();
    let mut deferred = Vec::new();
    assign(0, n_left, n_right, eq, gt, &mut used, &mut kept, &mut deferred)
}

/// Strict lexicographic extension: position of the first strict decrease,
/// with all earlier positions equal. Lengths must already agree (the status
/// validation guarantees it for equivalent symbols).
pub fn lex_ext_matrix(eq: &[Vec<bool>], gt: &[Vec<bool>]) -> Option<usize> {
    let n = eq.len().min(gt.len());
    for i in 0..n {
        if gt[i][i] {
            return Some(i);
        }
        if !eq[i][i] {
            return None;
        }
    }
    None
}
