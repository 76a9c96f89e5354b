//! The quasi-order on types that comparisons consult.
//!
//! Built over a finite universe: every type of the problem, all their
//! structural subtypes, plus a configurable number of arrow-closure rounds.
//! The relation is the closure of the declared pairs under reflexivity,
//! transitivity, the right-arrow-subterm rule (an arrow is above its
//! codomain) and congruence of equivalence on arrows. Four axioms are then
//! revalidated by brute force over the whole universe; a violation names a
//! concrete witness.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::SimpleType;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    WellFoundedness,
    RightArrowSubterm,
    ArrowPreservation,
    ArrowDecreasingness,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::WellFoundedness => "well-foundedness",
            Axiom::RightArrowSubterm => "right arrow subterm",
            Axiom::ArrowPreservation => "arrow preservation",
            Axiom::ArrowDecreasingness => "arrow decreasingness",
        };
        f.write_str(s)
    }
}

/// A failed axiom with the types that exhibit the failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomViolation {
    pub axiom: Axiom,
    pub witness: Vec<SimpleType>,
    pub detail: String,
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "axiom \"{}\" violated: {}", self.axiom, self.detail)
    }
}

/// Outcome of revalidating all four axioms over the universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub universe_size: usize,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeOrderError {
    #[error("{0}")]
    Axiom(AxiomViolation),
    #[error("type universe grew to {size} types, over the limit of {max}")]
    UniverseOverflow { size: usize, max: usize },
    #[error("type {0} is outside the order's universe")]
    OutsideUniverse(String),
}

#[derive(Debug, Clone, Copy)]
pub struct TypeOrderConfig {
    /// Arrow-closure rounds over the base set. One round adds every arrow
    /// formable from the previous set.
    pub arrow_rounds: usize,
    pub max_universe: usize,
}

impl Default for TypeOrderConfig {
    fn default() -> Self {
        TypeOrderConfig { arrow_rounds: 1, max_universe: 2048 }
    }
}

/// The finished order: a universe of types and the closed `>=` relation.
#[derive(Debug, Clone)]
pub struct TypeOrder {
    universe: Vec<SimpleType>,
    index: HashMap<SimpleType, usize>,
    // ge[i] is a bitset row: bit j set iff universe[i] >= universe[j]
    ge: Vec<Vec<u64>>,
    declared: Vec<(SimpleType, SimpleType)>,
}

fn bit_get(row: &[u64], j: usize) -> bool {
    row[j / 64] >> (j % 64) & 1 == 1
}

fn bit_set(row: &mut [u64], j: usize) {
    row[j / 64] |= 1 << (j % 64);
}

impl TypeOrder {
    /// Builds and validates the order. `problem_types` seeds the universe
    /// (declared pair types are added automatically).
    pub fn build(
        problem_types: &[SimpleType],
        declared: &[(SimpleType, SimpleType)],
        cfg: TypeOrderConfig,
    ) -> Result<TypeOrder, TypeOrderError> {
        let order = TypeOrder::build_unchecked(problem_types, declared, cfg)?;
        let report = order.validate_axioms();
        if let Some(v) = report.violations.into_iter().next() {
            return Err(TypeOrderError::Axiom(v));
        }
        Ok(order)
    }

    /// Universe construction and closure without the axiom pass. Kept
    /// separate so the validator genuinely runs against a finished relation.
    pub fn build_unchecked(
        problem_types: &[SimpleType],
        declared: &[(SimpleType, SimpleType)],
        cfg: TypeOrderConfig,
    ) -> Result<TypeOrder, TypeOrderError> {
        // base set: problem types, declared pair types, all subtypes
        let mut set: Vec<SimpleType> = Vec::new();
        {
            let mut push_all = |t: &SimpleType| {
                for s in t.subtypes() {
                    set.push(s.clone());
                }
            };
            for t in problem_types {
                push_all(t);
            }
            for (a, b) in declared {
                push_all(a);
                push_all(b);
            }
        }
        set.sort();
        set.dedup();

        for _ in 0..cfg.arrow_rounds {
            let prev = set.clone();
            let projected = prev.len() * prev.len() + prev.len();
            if projected > cfg.max_universe {
                return Err(TypeOrderError::UniverseOverflow {
                    size: projected,
                    max: cfg.max_universe,
                });
            }
            for a in &prev {
                for b in &prev {
                    set.push(SimpleType::arrow(a.clone(), b.clone()));
                }
            }
            set.sort();
            set.dedup();
        }
        if set.len() > cfg.max_universe {
            return Err(TypeOrderError::UniverseOverflow { size: set.len(), max: cfg.max_universe });
        }

        let universe = set;
        let n = universe.len();
        let index: HashMap<SimpleType, usize> =
            universe.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let words = n.div_ceil(64);
        let mut ge = vec![vec![0u64; words]; n];

        for (i, row) in ge.iter_mut().enumerate() {
            bit_set(row, i);
        }
        for (a, b) in declared {
            let i = index[a];
            let j = index[b];
            bit_set(&mut ge[i], j);
        }
        // an arrow sits above its codomain
        let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
        for (i, t) in universe.iter().enumerate() {
            if let SimpleType::Arrow { dom, cod } = t {
                let d = index[dom.as_ref()];
                let c = index[cod.as_ref()];
                arrows.push((i, d, c));
                bit_set(&mut ge[i], c);
            }
        }

        // close under transitivity and arrow congruence of equivalence,
        // iterating to a fixpoint since each can enable the other
        loop {
            for k in 0..n {
                for i in 0..n {
                    if bit_get(&ge[i], k) {
                        let (head, tail) = ge.split_at_mut(k.max(i));
                        let (row_i, row_k) = if i < k {
                            (&mut head[i], &tail[0])
                        } else if i > k {
                            (&mut tail[0], &head[k])
                        } else {
                            continue;
                        };
                        for w in 0..words {
                            row_i[w] |= row_k[w];
                        }
                    }
                }
            }
            let mut changed = false;
            for &(a, da, ca) in &arrows {
                for &(b, db, cb) in &arrows {
                    if a >= b {
                        continue;
                    }
                    let doms_eq = bit_get(&ge[da], db) && bit_get(&ge[db], da);
                    let cods_eq = bit_get(&ge[ca], cb) && bit_get(&ge[cb], ca);
                    if doms_eq && cods_eq && !(bit_get(&ge[a], b) && bit_get(&ge[b], a)) {
                        bit_set(&mut ge[a], b);
                        bit_set(&mut ge[b], a);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }

        Ok(TypeOrder { universe, index, ge, declared: declared.to_vec() })
    }

    pub fn universe(&self) -> &[SimpleType] {
        &self.universe
    }

    pub fn declared_pairs(&self) -> &[(SimpleType, SimpleType)] {
        &self.declared
    }

    pub fn contains(&self, t: &SimpleType) -> bool {
        self.index.contains_key(t)
    }

    fn idx(&self, t: &SimpleType) -> Result<usize, TypeOrderError> {
        self.index
            .get(t)
            .copied()
            .ok_or_else(|| TypeOrderError::OutsideUniverse(t.to_string()))
    }

    pub fn ge(&self, a: &SimpleType, b: &SimpleType) -> Result<bool, TypeOrderError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        Ok(bit_get(&self.ge[i], j))
    }

    pub fn gt(&self, a: &SimpleType, b: &SimpleType) -> Result<bool, TypeOrderError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        Ok(bit_get(&self.ge[i], j) && !bit_get(&self.ge[j], i))
    }

    pub fn eq(&self, a: &SimpleType, b: &SimpleType) -> Result<bool, TypeOrderError> {
        let (i, j) = (self.idx(a)?, self.idx(b)?);
        Ok(bit_get(&self.ge[i], j) && bit_get(&self.ge[j], i))
    }

    fn ge_i(&self, i: usize, j: usize) -> bool {
        bit_get(&self.ge[i], j)
    }

    fn gt_i(&self, i: usize, j: usize) -> bool {
        self.ge_i(i, j) && !self.ge_i(j, i)
    }

    fn eq_i(&self, i: usize, j: usize) -> bool {
        self.ge_i(i, j) && self.ge_i(j, i)
    }

    /// Brute-force revalidation of all four axioms over every universe pair.
    pub fn validate_axioms(&self) -> AxiomReport {
        let mut violations = Vec::new();
        let n = self.universe.len();
        let arrows: Vec<(usize, usize, usize)> = self
            .universe
            .iter()
            .enumerate()
            .filter_map(|(i, t)| match t {
                SimpleType::Arrow { dom, cod } => {
                    Some((i, self.index[dom.as_ref()], self.index[cod.as_ref()]))
                }
                _ => None,
            })
            .collect();

        if let Some(cycle) = self.find_descent_cycle(&arrows) {
            let detail = format!(
                "descending cycle {}",
                cycle.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" -> ")
            );
            violations.push(AxiomViolation { axiom: Axiom::WellFoundedness, witness: cycle, detail });
        }

        for &(a, _, c) in &arrows {
            if !self.ge_i(a, c) || self.ge_i(c, a) {
                violations.push(AxiomViolation {
                    axiom: Axiom::RightArrowSubterm,
                    witness: vec![self.universe[a].clone(), self.universe[c].clone()],
                    detail: format!(
                        "{} is not strictly above its codomain {}",
                        self.universe[a], self.universe[c]
                    ),
                });
                break;
            }
        }

        'pres: for &(a, da, ca) in &arrows {
            for u in 0..n {
                if u == a || !self.eq_i(a, u) {
                    continue;
                }
                let ok = match &self.universe[u] {
                    SimpleType::Arrow { dom, cod } => {
                        let du = self.index[dom.as_ref()];
                        let cu = self.index[cod.as_ref()];
                        self.eq_i(da, du) && self.eq_i(ca, cu)
                    }
                    _ => false,
                };
                if !ok {
                    violations.push(AxiomViolation {
                        axiom: Axiom::ArrowPreservation,
                        witness: vec![self.universe[a].clone(), self.universe[u].clone()],
                        detail: format!(
                            "{} and {} are equivalent but not componentwise equivalent arrows",
                            self.universe[a], self.universe[u]
                        ),
                    });
                    break 'pres;
                }
            }
        }
        // converse direction: componentwise equivalent arrows must be equivalent
        'pres2: for &(a, da, ca) in &arrows {
            for &(b, db, cb) in &arrows {
                if a != b && self.eq_i(da, db) && self.eq_i(ca, cb) && !self.eq_i(a, b) {
                    violations.push(AxiomViolation {
                        axiom: Axiom::ArrowPreservation,
                        witness: vec![self.universe[a].clone(), self.universe[b].clone()],
                        detail: format!(
                            "{} and {} have equivalent components but are not equivalent",
                            self.universe[a], self.universe[b]
                        ),
                    });
                    break 'pres2;
                }
            }
        }

        'dec: for &(a, da, ca) in &arrows {
            for u in 0..n {
                if !self.gt_i(a, u) {
                    continue;
                }
                if self.ge_i(ca, u) {
                    continue;
                }
                let ok = match &self.universe[u] {
                    SimpleType::Arrow { dom, cod } => {
                        let du = self.index[dom.as_ref()];
                        let cu = self.index[cod.as_ref()];
                        self.eq_i(da, du) && self.gt_i(ca, cu)
                    }
                    _ => false,
                };
                if !ok {
                    violations.push(AxiomViolation {
                        axiom: Axiom::ArrowDecreasingness,
                        witness: vec![self.universe[a].clone(), self.universe[u].clone()],
                        detail: format!(
                            "{} > {} but the codomain is not >= it and it is not a compatible arrow",
                            self.universe[a], self.universe[u]
                        ),
                    });
                    break 'dec;
                }
            }
        }

        AxiomReport { universe_size: n, violations }
    }

    /// Cycle search for the descent relation: strict `>` edges plus the
    /// arrow-to-domain decomposition edge, taken over equivalence classes.
    fn find_descent_cycle(&self, arrows: &[(usize, usize, usize)]) -> Option<Vec<SimpleType>> {
        let n = self.universe.len();
        // representative (smallest index) per equivalence class
        let mut rep = vec![0usize; n];
        for (i, slot) in rep.iter_mut().enumerate() {
            *slot = (0..i).find(|&j| self.eq_i(i, j)).unwrap_or(i);
        }
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
        let add_edge = |from: usize, to: usize, edges: &mut Vec<Vec<usize>>| {
            if !edges[from].contains(&to) {
                edges[from].push(to);
            }
        };
        for i in 0..n {
            for j in 0..n {
                if self.gt_i(i, j) {
                    add_edge(rep[i], rep[j], &mut edges);
                }
            }
        }
        for &(a, d, _) in arrows {
            add_edge(rep[a], rep[d], &mut edges);
        }

        // iterative DFS with colors; on a back edge recover the path
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let mut color = vec![WHITE; n];
        for start in 0..n {
            if rep[start] != start || color[start] != WHITE {
                continue;
            }
            let mut path: Vec<usize> = Vec::new();
            let mut iters: Vec<usize> = Vec::new();
            path.push(start);
            iters.push(0);
            color[start] = GRAY;
            while let Some(&node) = path.last() {
                let it = *iters.last().unwrap();
                if it < edges[node].len() {
                    *iters.last_mut().unwrap() += 1;
                    let next = edges[node][it];
                    match color[next] {
                        WHITE => {
                            color[next] = GRAY;
                            path.push(next);
                            iters.push(0);
                        }
                        GRAY => {
                            let pos = path.iter().position(|&p| p == next).unwrap();
                            let mut cycle: Vec<SimpleType> =
                                path[pos..].iter().map(|&i| self.universe[i].clone()).collect();
                            cycle.push(self.universe[next].clone());
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color[node] = BLACK;
                    path.pop();
                    iters.pop();
                }
            }
        }
        None
    }

    /// Equivalent types agree on being data types. Returns a counterexample
    /// pair if the property fails.
    pub fn check_equiv_preserves_data(&self) -> Option<(SimpleType, SimpleType)> {
        let n = self.universe.len();
        for i in 0..n {
            for j in 0..n {
                if self.eq_i(i, j) && self.universe[i].is_data() != self.universe[j].is_data() {
                    return Some((self.universe[i].clone(), self.universe[j].clone()));
                }
            }
        }
        None
    }

    /// Comparable arrows have comparable codomains: if `a -> s >= b -> t`
    /// then `s >= t`. Returns a counterexample pair if the property fails.
    pub fn check_arrow_cod_ge(&self) -> Option<(SimpleType, SimpleType)> {
        let arrows: Vec<(usize, usize)> = self
            .universe
            .iter()
            .enumerate()
            .filter_map(|(i, t)| match t {
                SimpleType::Arrow { cod, .. } => Some((i, self.index[cod.as_ref()])),
                _ => None,
            })
            .collect();
        for &(a, ca) in &arrows {
            for &(b, cb) in &arrows {
                if self.ge_i(a, b) && !self.ge_i(ca, cb) {
                    return Some((self.universe[a].clone(), self.universe[b].clone()));
                }
            }
        }
        None
    }
}
