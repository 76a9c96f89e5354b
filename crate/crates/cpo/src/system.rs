//! Rewrite systems and the orientation driver.
//!
//! A [`RewriteSystem`] bundles a signature, variable declarations, rules, and
//! the ordering parameters declared alongside them. [`check_system`] validates
//! the bundle, builds the type order and accessibility data, and runs one
//! proof search per rule. [`search_parameters`] enumerates precedence and
//! status candidates, cheapest first, until one orients every rule, and
//! re-verifies the winner from scratch before reporting it.

use std::collections::BTreeMap;
use std::rc::Rc;

use thiserror::Error;

use crate::access::{check_separate_worlds, AccTable, AccessError};
use crate::cpo::{CmpOutcome, Definition, Derivation, Engine, EngineConfig, FailedGoal};
use crate::prec::{PrecError, PrecRel, Precedence, Status, StatusMap};
use crate::sig::Signature;
use crate::term::{typecheck, SimpleType, Term, TypeError};
use crate::typeorder::{TypeOrder, TypeOrderConfig, TypeOrderError};

/// A named rewrite rule. Both sides are closed except for declared variables.
#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub lhs: Term,
    pub rhs: Term,
}

/// A complete problem: signature, free-variable declarations shared by all
/// rules, the rules, and the declared ordering parameters.
#[derive(Debug, Clone, Default)]
pub struct RewriteSystem {
    pub sig: Signature,
    pub vars: BTreeMap<String, SimpleType>,
    pub rules: Vec<Rule>,
    /// Declared sort inequalities `a >= b`.
    pub type_decls: Vec<(SimpleType, SimpleType)>,
    pub prec_decls: Vec<(String, PrecRel, String)>,
    pub status_decls: Vec<(String, Status)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("rule {rule}: left side is a bare variable")]
    VariableLhs { rule: String },
    #[error("rule {rule}: {side} side: {source}")]
    IllTyped { rule: String, side: &'static str, source: TypeError },
    #[error("rule {rule}: left side has type {lhs}, right side has type {rhs}")]
    TypeSkew { rule: String, lhs: String, rhs: String },
    #[error("rule {rule}: variable {var} occurs only on the right side")]
    ExtraVariable { rule: String, var: String },
    #[error("status declared for undeclared symbol {0}")]
    UnknownStatusSymbol(String),
    #[error("type order: {0}")]
    TypeOrder(#[from] TypeOrderError),
    #[error("precedence: {0}")]
    Precedence(#[from] PrecError),
    #[error("accessibility: {0}")]
    Access(#[from] AccessError),
}

/// Verdict for one rule.
#[derive(Debug, Clone)]
pub enum RuleOutcome {
    Oriented(Rc<Derivation>),
    NotOriented(Vec<FailedGoal>),
    /// The depth budget ran out before the search settled, so the rule is
    /// neither oriented nor refuted at this depth.
    Truncated(Vec<FailedGoal>),
}

impl RuleOutcome {
    pub fn is_oriented(&self) -> bool {
        matches!(self, RuleOutcome::Oriented(_))
    }
}

#[derive(Debug, Clone)]
pub struct RuleReport {
    pub name: String,
    pub outcome: RuleOutcome,
}

#[derive(Debug, Clone)]
pub struct SystemReport {
    pub rules: Vec<RuleReport>,
}

impl SystemReport {
    pub fn all_oriented(&self) -> bool {
        self.rules.iter().all(|r| r.outcome.is_oriented())
    }

    pub fn any_truncated(&self) -> bool {
        self.rules.iter().any(|r| matches!(r.outcome, RuleOutcome::Truncated(_)))
    }
}

/// Everything derived from a validated system that does not depend on the
/// precedence or statuses: the type order and the accessibility table.
#[derive(Debug)]
pub struct Prepared {
    pub order: TypeOrder,
    pub acc: Option<AccTable>,
}

fn collect_types(t: &Term, sig: &Signature, out: &mut Vec<SimpleType>) {
    out.push(t.ty_in(sig));
    match t {
        Term::Var { .. } => {}
        Term::Abs { ty, body, .. } => {
            out.push(ty.clone());
            collect_types(body, sig, out);
        }
        Term::App { fun, arg } => {
            collect_types(fun, sig, out);
            collect_types(arg, sig, out);
        }
        Term::FunApp { args, .. } => {
            for a in args {
                collect_types(a, sig, out);
            }
        }
    }
}

/// Rule-shape and typing checks, then the type order (seeded with every type
/// occurring in any rule) and, for the extended definition, the world check
/// and the accessibility table.
pub fn prepare(
    sys: &RewriteSystem,
    definition: Definition,
    tcfg: TypeOrderConfig,
) -> Result<Prepared, SystemError> {
    for rule in &sys.rules {
        if matches!(rule.lhs, Term::Var { .. }) {
            return Err(SystemError::VariableLhs { rule: rule.name.clone() });
        }
        let lty = typecheck(&rule.lhs, &sys.vars, &sys.sig).map_err(|source| {
            SystemError::IllTyped { rule: rule.name.clone(), side: "left", source }
        })?;
        let rty = typecheck(&rule.rhs, &sys.vars, &sys.sig).map_err(|source| {
            SystemError::IllTyped { rule: rule.name.clone(), side: "right", source }
        })?;
        if lty != rty {
            return Err(SystemError::TypeSkew {
                rule: rule.name.clone(),
                lhs: lty.to_string(),
                rhs: rty.to_string(),
            });
        }
        let left_vars = rule.lhs.free_vars();
        for var in rule.rhs.free_vars().keys() {
            if !left_vars.contains_key(var) {
                return Err(SystemError::ExtraVariable {
                    rule: rule.name.clone(),
                    var: var.clone(),
                });
            }
        }
    }

    let mut seed = sys.sig.declared_types();
    for rule in &sys.rules {
        collect_types(&rule.lhs, &sys.sig, &mut seed);
        collect_types(&rule.rhs, &sys.sig, &mut seed);
    }
    let order = TypeOrder::build(&seed, &sys.type_decls, tcfg)?;

    let acc = match definition {
        Definition::One => None,
        Definition::Two => {
            check_separate_worlds(&order)?;
            Some(AccTable::build(&sys.sig, &order))
        }
    };
    Ok(Prepared { order, acc })
}

/// Builds the declared precedence and statuses and checks them against each
/// other: statuses must name declared symbols and agree across tied symbols.
pub fn build_parameters(sys: &RewriteSystem) -> Result<(Precedence, StatusMap), SystemError> {
    let symbols: Vec<String> = sys.sig.fun_names().map(str::to_string).collect();
    let prec = Precedence::build(&symbols, &sys.prec_decls)?;
    let mut statuses = StatusMap::new();
    for (name, status) in &sys.status_decls {
        if sys.sig.fun(name).is_none() {
            return Err(SystemError::UnknownStatusSymbol(name.clone()));
        }
        statuses.set(name, *status);
    }
    let arities: BTreeMap<String, usize> = symbols
        .iter()
        .map(|s| (s.clone(), sys.sig.fun(s).expect("listed symbol is declared").args.len()))
        .collect();
    prec.validate_statuses(&arities, &statuses)?;
    Ok((prec, statuses))
}

fn orient_rules(
    sys: &RewriteSystem,
    prepared: &Prepared,
    prec: &Precedence,
    statuses: &StatusMap,
    cfg: EngineConfig,
) -> SystemReport {
    let mut rules = Vec::new();
    for rule in &sys.rules {
        let mut engine = Engine::new(
            &sys.sig,
            &prepared.order,
            prec,
            statuses,
            prepared.acc.as_ref(),
            cfg,
        );
        let outcome = match engine.orient(&rule.lhs, &rule.rhs) {
            CmpOutcome::Proved(d) => {
                engine.replay(&d).expect("a fresh derivation replays");
                RuleOutcome::Oriented(d)
            }
            CmpOutcome::Failed => RuleOutcome::NotOriented(engine.frontier().to_vec()),
            CmpOutcome::Truncated => RuleOutcome::Truncated(engine.frontier().to_vec()),
        };
        rules.push(RuleReport { name: rule.name.clone(), outcome });
    }
    SystemReport { rules }
}

/// Validates the system and tries to orient every rule with the declared
/// parameters. Each rule gets a fresh engine, so rule verdicts and traces are
/// independent of rule order.
pub fn check_system(
    sys: &RewriteSystem,
    cfg: EngineConfig,
    tcfg: TypeOrderConfig,
) -> Result<SystemReport, SystemError> {
    let prepared = prepare(sys, cfg.definition, tcfg)?;
    let (prec, statuses) = build_parameters(sys)?;
    Ok(orient_rules(sys, &prepared, &prec, &statuses, cfg))
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Upper bound on (precedence, status) candidates examined.
    pub max_candidates: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_candidates: 100_000 }
    }
}

/// A successful search: the parameters found, in declaration form, plus the
/// report from re-running the whole check with them.
#[derive(Debug, Clone)]
pub struct SearchWitness {
    /// Tied groups of symbols, highest group first.
    pub blocks: Vec<Vec<String>>,
    pub prec_decls: Vec<(String, PrecRel, String)>,
    pub status_decls: Vec<(String, Status)>,
    pub report: SystemReport,
    pub tried: usize,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(SearchWitness),
    Exhausted { tried: usize, capped: bool },
}

/// Every way to arrange `items` into an ordered list of nonempty groups.
/// Each item either joins an existing group or opens a new group at any
/// position, so every arrangement is produced exactly once.
fn ordered_partitions(items: &[String], cap: usize) -> Vec<Vec<Vec<String>>> {
    fn go(
        items: &[String],
        i: usize,
        acc: &mut Vec<Vec<String>>,
        out: &mut Vec<Vec<Vec<String>>>,
        cap: usize,
    ) {
        if out.len() >= cap {
            return;
        }
        if i == items.len() {
            out.push(acc.clone());
            return;
        }
        let item = items[i].clone();
        for b in 0..acc.len() {
            acc[b].push(item.clone());
            go(items, i + 1, acc, out, cap);
            acc[b].pop();
        }
        for pos in 0..=acc.len() {
            acc.insert(pos, vec![item.clone()]);
            go(items, i + 1, acc, out, cap);
            acc.remove(pos);
        }
    }
    let mut out = Vec::new();
    go(items, 0, &mut Vec::new(), &mut out, cap);
    out
}

fn strict_pairs(blocks: &[Vec<String>]) -> usize {
    let mut below = 0;
    let mut pairs = 0;
    for b in blocks.iter().rev() {
        pairs += b.len() * below;
        below += b.len();
    }
    pairs
}

fn decls_for(blocks: &[Vec<String>]) -> Vec<(String, PrecRel, String)> {
    let mut decls = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        for pair in block.windows(2) {
            decls.push((pair[0].clone(), PrecRel::Eq, pair[1].clone()));
        }
        if i + 1 < blocks.len() {
            decls.push((block[0].clone(), PrecRel::Gt, blocks[i + 1][0].clone()));
        }
    }
    decls
}

/// Status choices per candidate: every way to mark some groups lexicographic.
/// Only groups whose symbols share an arity of at least two are worth marking;
/// below that the two extensions coincide. All-multiset comes first.
fn status_choices(blocks: &[Vec<String>], sig: &Signature) -> Vec<Vec<(String, Status)>> {
    let eligible: Vec<usize> = (0..blocks.len())
        .filter(|&i| {
            let arities: Vec<usize> = blocks[i]
                .iter()
                .map(|s| sig.fun(s).map_or(0, |d| d.args.len()))
                .collect();
            arities.iter().all(|&a| a == arities[0]) && arities[0] >= 2
        })
        .collect();
    let mut masks: Vec<u32> = (0..1u32 << eligible.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks
        .into_iter()
        .map(|mask| {
            let mut decls = Vec::new();
            for (k, &b) in eligible.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    for s in &blocks[b] {
                        decls.push((s.clone(), Status::Lex));
                    }
                }
            }
            decls
        })
        .collect()
}

fn satisfies_declared(
    prec: &Precedence,
    statuses: &StatusMap,
    sys: &RewriteSystem,
) -> bool {
    use crate::prec::Head;
    for (a, rel, b) in &sys.prec_decls {
        let holds = match rel {
            PrecRel::Gt => prec.gt(Head::Sym(a), Head::Sym(b)),
            PrecRel::Eq => prec.eq(Head::Sym(a), Head::Sym(b)),
        };
        if !holds {
            return false;
        }
    }
    sys.status_decls.iter().all(|(name, st)| statuses.get(name) == *st)
}

/// Enumerates total quasi-orders over the signature's symbols (with tied
/// groups), fewest strict pairs first, and for each the status choices,
/// all-multiset first. Declared precedence and status facts act as filters.
/// The first candidate that orients every rule is re-checked from scratch
/// through [`check_system`] and returned.
pub fn search_parameters(
    sys: &RewriteSystem,
    cfg: EngineConfig,
    tcfg: TypeOrderConfig,
    limits: SearchLimits,
) -> Result<SearchOutcome, SystemError> {
    let prepared = prepare(sys, cfg.definition, tcfg)?;
    build_parameters(sys)?;

    let symbols: Vec<String> = sys.sig.fun_names().map(str::to_string).collect();
    let arities: BTreeMap<String, usize> = symbols
        .iter()
        .map(|s| (s.clone(), sys.sig.fun(s).expect("listed symbol is declared").args.len()))
        .collect();

    let mut partitions = ordered_partitions(&symbols, limits.max_candidates);
    partitions.sort_by_key(|blocks| strict_pairs(blocks));

    let mut tried = 0;
    for blocks in &partitions {
        let prec_decls = decls_for(blocks);
        let prec = Precedence::build(&symbols, &prec_decls)
            .expect("group-derived declarations are consistent");
        for status_decls in status_choices(blocks, &sys.sig) {
            if tried >= limits.max_candidates {
                return Ok(SearchOutcome::Exhausted { tried, capped: true });
            }
            tried += 1;
            let mut statuses = StatusMap::new();
            for (name, st) in &status_decls {
                statuses.set(name, *st);
            }
            if prec.validate_statuses(&arities, &statuses).is_err() {
                continue;
            }
            if !satisfies_declared(&prec, &statuses, sys) {
                continue;
            }
            let report = orient_rules(sys, &prepared, &prec, &statuses, cfg);
            if !report.all_oriented() {
                continue;
            }
            let mut witness_sys = sys.clone();
            witness_sys.prec_decls = prec_decls.clone();
            let mut full_status = status_decls.clone();
            for (name, st) in &sys.status_decls {
                if !full_status.iter().any(|(n, _)| n == name) {
                    full_status.push((name.clone(), *st));
                }
            }
            witness_sys.status_decls = full_status.clone();
            let report = check_system(&witness_sys, cfg, tcfg)?;
            assert!(report.all_oriented(), "re-verification agrees with the search");
            return Ok(SearchOutcome::Found(SearchWitness {
                blocks: blocks.clone(),
                prec_decls,
                status_decls: full_status,
                report,
                tried,
            }));
        }
    }
    Ok(SearchOutcome::Exhausted { tried, capped: false })
}
