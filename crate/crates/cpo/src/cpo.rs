//! The comparison engine: a recursive ordering over simply-typed terms, in
//! its basic form (fifteen cases keyed on the left head) and an extended
//! form (a sixteenth case plus a widened status relation that can descend
//! through accessible arguments). Comparisons produce derivation trees that
//! an independent replay checker can validate, and failed searches leave a
//! frontier of the subgoals that could not be closed. Two deliberately
//! unsound variant switches reproduce known non-termination accepting
//! behaviour for regression purposes.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use thiserror::Error;

use crate::access::{acc_subterms, AccTable};
use crate::prec::{lex_ext_matrix, multiset_ext_matrix, Head, Precedence, Status, StatusMap};
use crate::sig::Signature;
use crate::term::{alpha_canon, alpha_eq, eta_view, substitute, FreshSupply, SimpleType, Term};
use crate::typeorder::TypeOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// The ordering as defined.
    Sound,
    /// Case 1b compares status elements under the goal's bound-variable set
    /// instead of the empty one. Accepts a known non-terminating rule.
    UnsoundStatX,
    /// Case 2c adds its fresh variable to the bound set. Accepts a known
    /// non-terminating rule pair.
    UnsoundAppabsZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Definition {
    /// The basic fifteen-case form.
    One,
    /// Adds case 1f and lets case 1b fall back to the accessibility
    /// ordering between status elements.
    Two,
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    pub definition: Definition,
    pub variant: Variant,
    pub max_depth: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { definition: Definition::Two, variant: Variant::Sound, max_depth: 512 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    L1a,
    L1b,
    L1c,
    L1d,
    L1e,
    L1f,
    L2a,
    L2b,
    L2c,
    L2d,
    L2e,
    L3a,
    L3b,
    L3c,
    L3d,
    L3e,
}

impl CaseLabel {
    pub fn short(self) -> &'static str {
        match self {
            CaseLabel::L1a => "1a",
            CaseLabel::L1b => "1b",
            CaseLabel::L1c => "1c",
            CaseLabel::L1d => "1d",
            CaseLabel::L1e => "1e",
            CaseLabel::L1f => "1f",
            CaseLabel::L2a => "2a",
            CaseLabel::L2b => "2b",
            CaseLabel::L2c => "2c",
            CaseLabel::L2d => "2d",
            CaseLabel::L2e => "2e",
            CaseLabel::L3a => "3a",
            CaseLabel::L3b => "3b",
            CaseLabel::L3c => "3c",
            CaseLabel::L3d => "3d",
            CaseLabel::L3e => "3e",
        }
    }

    pub fn word(self) -> &'static str {
        match self {
            CaseLabel::L1a => "funvar",
            CaseLabel::L1b => "funstat",
            CaseLabel::L1c => "funprec",
            CaseLabel::L1d => "funabs",
            CaseLabel::L1e => "funsubt",
            CaseLabel::L1f => "funacc",
            CaseLabel::L2a => "appvar",
            CaseLabel::L2b => "appstat",
            CaseLabel::L2c => "appabs",
            CaseLabel::L2d => "appsubt",
            CaseLabel::L2e => "beta",
            CaseLabel::L3a => "absvar",
            CaseLabel::L3b => "absstat",
            CaseLabel::L3c => "absprec",
            CaseLabel::L3d => "abssubt",
            CaseLabel::L3e => "eta",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.short();
        write!(f, "Case {}({}) {}", &s[..1], &s[1..], self.word())
    }
}

/// How the element pairs of a status comparison are justified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatusElemRel {
    /// Typed strict comparison under the empty bound-variable set.
    TypedEmpty,
    /// Typed strict comparison keeping the goal's bound set (unsound).
    TypedX,
    /// Typed strict comparison, falling back to the accessibility ordering.
    TypedOrAcc,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Goal {
    /// `s` strictly above `t`, the variables in `x` acting as constants any
    /// left side dominates.
    Cmp { s: Term, t: Term, x: BTreeSet<String> },
    /// Reflexive closure, recorded for leaf nodes only. `typed` remembers
    /// whether the surrounding case demanded the type condition.
    Ge { s: Term, t: Term, x: BTreeSet<String>, typed: bool },
    /// Tuple comparison under a status.
    Status {
        left: Vec<Term>,
        right: Vec<Term>,
        x: BTreeSet<String>,
        status: Status,
        elem: StatusElemRel,
    },
    /// Accessibility ordering between a status element `u` and a spine `t`,
    /// in the scope of the enclosing left side `s`.
    Acc { s: Term, u: Term, t: Term, x: BTreeSet<String> },
}

fn fmt_var_set(x: &BTreeSet<String>) -> String {
    if x.is_empty() {
        String::new()
    } else {
        format!("{{{}}}", x.iter().cloned().collect::<Vec<_>>().join(", "))
    }
}

fn fmt_terms(list: &[Term]) -> String {
    list.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Goal::Cmp { s, t, x } => write!(f, "{s} >{} {t}", fmt_var_set(x)),
            Goal::Ge { s, t, x, typed } => {
                let rel = if *typed { ">=typed" } else { ">=" };
                write!(f, "{s} {rel}{} {t}", fmt_var_set(x))
            }
            Goal::Status { left, right, x, status, elem } => {
                let rel = match elem {
                    StatusElemRel::TypedEmpty => ">typed".to_string(),
                    StatusElemRel::TypedX => format!(">typed{}", fmt_var_set(x)),
                    StatusElemRel::TypedOrAcc => format!(">typed U >acc{}", fmt_var_set(x)),
                };
                let st = match status {
                    Status::Mul => "mul",
                    Status::Lex => "lex",
                };
                write!(f, "{{{}}} ({rel}){st} {{{}}}", fmt_terms(left), fmt_terms(right))
            }
            Goal::Acc { u, t, x, .. } => write!(f, "{u} >acc{} {t}", fmt_var_set(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Case(CaseLabel),
    Refl,
    /// Multiset witness: `kept` pairs cancel as equal, `cover` pairs
    /// justify the leftover right elements.
    MulExt { kept: Vec<(usize, usize)>, cover: Vec<(usize, usize)> },
    /// First strict position of a lexicographic comparison.
    LexExt { pos: usize },
    /// Accessibility split of the right side as `v` applied to a tail.
    AccOrd { v: Term },
}

/// One node of a derivation tree. A subgoal solved once and reused appears
/// as the same shared allocation everywhere it is cited.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub goal: Goal,
    pub step: Step,
    pub children: Vec<Rc<Derivation>>,
    pub fresh: Vec<(String, SimpleType)>,
}

impl Derivation {
    /// Number of distinct nodes, counting shared subtrees once.
    pub fn count_unique(self: &Rc<Self>) -> usize {
        fn walk(d: &Rc<Derivation>, seen: &mut HashSet<*const Derivation>) -> usize {
            if !seen.insert(Rc::as_ptr(d)) {
                return 0;
            }
            1 + d.children.iter().map(|c| walk(c, seen)).sum::<usize>()
        }
        walk(self, &mut HashSet::new())
    }

    /// Case labels and accessibility steps in depth-first pre-order, paired
    /// with the right side they applied to. Shared subtrees are revisited,
    /// matching how a reader walks the printed derivation.
    pub fn waypoints(self: &Rc<Self>) -> Vec<(String, Option<Term>)> {
        fn walk(d: &Rc<Derivation>, out: &mut Vec<(String, Option<Term>)>) {
            match &d.step {
                Step::Case(label) => {
                    let rhs = match &d.goal {
                        Goal::Cmp { t, .. } | Goal::Ge { t, .. } => Some(t.clone()),
                        _ => None,
                    };
                    out.push((label.short().to_string(), rhs));
                }
                Step::AccOrd { .. } => {
                    let rhs = match &d.goal {
                        Goal::Acc { t, .. } => Some(t.clone()),
                        _ => None,
                    };
                    out.push(("acc".to_string(), rhs));
                }
                _ => {}
            }
            for c in &d.children {
                walk(c, out);
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailReason {
    /// A required type comparison did not hold.
    TypeCheck,
    /// No case closed the goal.
    NoCase,
    /// No multiset or lexicographic decomposition exists, or the right side
    /// of an accessibility goal is not an application.
    NoDecomposition,
    /// No accessible subterm heads the right side's spine.
    NoAccRoute,
    /// The depth budget ran out below this goal.
    Depth,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailReason::TypeCheck => "type check failed",
            FailReason::NoCase => "no case applies",
            FailReason::NoDecomposition => "no decomposition",
            FailReason::NoAccRoute => "no accessible route",
            FailReason::Depth => "depth budget exhausted",
        };
        f.write_str(s)
    }
}

/// An unclosed subgoal, kept as display text so the record outlives the
/// engine that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedGoal {
    pub goal: String,
    pub reason: FailReason,
}

const FRONTIER_CAP: usize = 256;

/// Outcome of one comparison. Truncation by the depth budget is kept apart
/// from definitive failure so callers never mistake one for the other.
#[derive(Debug, Clone)]
pub enum CmpOutcome {
    Proved(Rc<Derivation>),
    Failed,
    Truncated,
}

impl CmpOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, CmpOutcome::Proved(_))
    }

    pub fn proof(&self) -> Option<&Rc<Derivation>> {
        match self {
            CmpOutcome::Proved(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("replay rejected [{goal}]: {detail}")]
    Invalid { goal: String, detail: String },
}

fn bad(d: &Derivation, detail: impl Into<String>) -> ReplayError {
    ReplayError::Invalid { goal: d.goal.to_string(), detail: detail.into() }
}

enum MemoVal {
    Yes(Rc<Derivation>),
    No,
}

type MemoKey = (Term, Term, Vec<String>);

enum Conj {
    Proved(Vec<Rc<Derivation>>),
    Failed,
    Truncated,
}

fn funstat_elem(cfg: &EngineConfig) -> StatusElemRel {
    match (cfg.variant, cfg.definition) {
        (Variant::UnsoundStatX, _) => StatusElemRel::TypedX,
        (_, Definition::Two) => StatusElemRel::TypedOrAcc,
        (_, Definition::One) => StatusElemRel::TypedEmpty,
    }
}

/// One engine handles one orientation attempt. It owns the fresh-name
/// supply, the memo table and the failure frontier; every type reachable
/// from the compared terms must be inside the type order's universe.
pub struct Engine<'a> {
    sig: &'a Signature,
    order: &'a TypeOrder,
    prec: &'a Precedence,
    statuses: &'a StatusMap,
    acc: Option<&'a AccTable>,
    cfg: EngineConfig,
    supply: FreshSupply,
    memo: HashMap<MemoKey, MemoVal>,
    memo_hits: usize,
    frontier: Vec<FailedGoal>,
    frontier_seen: HashSet<String>,
    budget_events: u64,
}

impl<'a> Engine<'a> {
    pub fn new(
        sig: &'a Signature,
        order: &'a TypeOrder,
        prec: &'a Precedence,
        statuses: &'a StatusMap,
        acc: Option<&'a AccTable>,
        cfg: EngineConfig,
    ) -> Engine<'a> {
        assert!(
            cfg.definition == Definition::One || acc.is_some(),
            "the extended definition needs an accessibility table"
        );
        assert!(cfg.max_depth >= 1);
        let mut supply = FreshSupply::new();
        for n in sig.fun_names() {
            supply.mark_used(n);
        }
        for (n, _) in sig.sorts() {
            supply.mark_used(n);
        }
        Engine {
            sig,
            order,
            prec,
            statuses,
            acc,
            cfg,
            supply,
            memo: HashMap::new(),
            memo_hits: 0,
            frontier: Vec::new(),
            frontier_seen: HashSet::new(),
            budget_events: 0,
        }
    }

    pub fn frontier(&self) -> &[FailedGoal] {
        &self.frontier
    }

    pub fn memo_hits(&self) -> usize {
        self.memo_hits
    }

    pub fn config(&self) -> EngineConfig {
        self.cfg
    }

    /// The root call for a rewrite rule: the left side must dominate the
    /// right in the type order and then in the term ordering, under no
    /// bound variables.
    pub fn orient(&mut self, l: &Term, r: &Term) -> CmpOutcome {
        self.seed_names(&[l, r]);
        let (tl, tr) = (self.type_of(l), self.type_of(r));
        if !self.type_ge(&tl, &tr) {
            self.fail(format!("{l} >typed {r}"), FailReason::TypeCheck);
            return CmpOutcome::Failed;
        }
        self.cmp(l, r, &BTreeSet::new(), 0)
    }

    /// A bare comparison under an explicit bound-variable set.
    pub fn compare(&mut self, s: &Term, t: &Term, x: &BTreeSet<String>) -> CmpOutcome {
        self.seed_names(&[s, t]);
        self.cmp(s, t, x, 0)
    }

    fn seed_names(&mut self, terms: &[&Term]) {
        let mut names = BTreeSet::new();
        for t in terms {
            t.all_names(&mut names);
        }
        for n in names {
            self.supply.mark_used(&n);
        }
    }

    fn type_of(&self, t: &Term) -> SimpleType {
        t.ty_in(self.sig)
    }

    fn type_ge(&self, a: &SimpleType, b: &SimpleType) -> bool {
        self.order.ge(a, b).expect("compared types are inside the universe")
    }

    fn type_eq(&self, a: &SimpleType, b: &SimpleType) -> bool {
        self.order.eq(a, b).expect("compared types are inside the universe")
    }

    fn fail(&mut self, goal: String, reason: FailReason) {
        if self.frontier.len() >= FRONTIER_CAP || self.frontier_seen.contains(&goal) {
            return;
        }
        self.frontier_seen.insert(goal.clone());
        self.frontier.push(FailedGoal { goal, reason });
    }

    fn subst(&mut self, body: &Term, var: &str, var_ty: &SimpleType, to: &Term) -> Term {
        substitute(body, var, var_ty, to, &mut self.supply)
            .expect("replacement type matches the substituted variable")
    }

    fn cmp(&mut self, s: &Term, t: &Term, x: &BTreeSet<String>, depth: usize) -> CmpOutcome {
        let goal = Goal::Cmp { s: s.clone(), t: t.clone(), x: x.clone() };
        if depth >= self.cfg.max_depth {
            self.budget_events += 1;
            self.fail(goal.to_string(), FailReason::Depth);
            return CmpOutcome::Truncated;
        }
        if matches!(s, Term::Var { .. }) {
            // a variable dominates nothing
            self.fail(goal.to_string(), FailReason::NoCase);
            return CmpOutcome::Failed;
        }
        let key: MemoKey = (alpha_canon(s), alpha_canon(t), x.iter().cloned().collect());
        if let Some(hit) = self.memo.get(&key) {
            self.memo_hits += 1;
            return match hit {
                MemoVal::Yes(d) => CmpOutcome::Proved(Rc::clone(d)),
                MemoVal::No => CmpOutcome::Failed,
            };
        }
        let snapshot = self.budget_events;
        let res = match s {
            Term::FunApp { .. } => self.fun_cases(s, t, x, depth, &goal),
            Term::App { .. } => self.app_cases(s, t, x, depth, &goal),
            Term::Abs { .. } => self.abs_cases(s, t, x, depth, &goal),
            Term::Var { .. } => unreachable!(),
        };
        match &res {
            CmpOutcome::Proved(d) => {
                self.memo.insert(key, MemoVal::Yes(Rc::clone(d)));
            }
            CmpOutcome::Failed => {
                // a failure that involved no truncation anywhere below is
                // definitive and safe to cache
                if self.budget_events == snapshot {
                    self.memo.insert(key, MemoVal::No);
                }
                self.fail(goal.to_string(), FailReason::NoCase);
            }
            CmpOutcome::Truncated => {}
        }
        res
    }

    /// Conjunction over already-evaluated subgoals: any definitive failure
    /// decides, otherwise any truncation does.
    fn conj(results: Vec<CmpOutcome>) -> Conj {
        let mut children = Vec::with_capacity(results.len());
        let mut truncated = false;
        let mut failed = false;
        for r in results {
            match r {
                CmpOutcome::Proved(d) => children.push(d),
                CmpOutcome::Failed => failed = true,
                CmpOutcome::Truncated => truncated = true,
            }
        }
        if failed {
            Conj::Failed
        } else if truncated {
            Conj::Truncated
        } else {
            Conj::Proved(children)
        }
    }

    fn node(
        goal: &Goal,
        label: CaseLabel,
        children: Vec<Rc<Derivation>>,
        fresh: Vec<(String, SimpleType)>,
    ) -> CmpOutcome {
        CmpOutcome::Proved(Rc::new(Derivation {
            goal: goal.clone(),
            step: Step::Case(label),
            children,
            fresh,
        }))
    }

    fn fun_cases(
        &mut self,
        s: &Term,
        t: &Term,
        x: &BTreeSet<String>,
        depth: usize,
        goal: &Goal,
    ) -> CmpOutcome {
        let Term::FunApp { sym: f, args: ss } = s else { unreachable!() };
        let mut truncated = false;

        // 1a
        if let Term::Var { name, .. } = t {
            if x.contains(name) {
                return Self::node(goal, CaseLabel::L1a, Vec::new(), Vec::new());
            }
        }

        if let Term::FunApp { sym: g, args: ts } = t {
            // 1b
            if self.prec.eq(Head::Sym(f), Head::Sym(g)) {
                let mut results = Vec::new();
                for tj in ts {
                    results.push(self.cmp(s, tj, x, depth + 1));
                }
                let elem = funstat_elem(&self.cfg);
                let status = self.statuses.get(f);
                results.push(self.status_compare(s, x, ss, ts, status, elem, depth + 1));
                match Self::conj(results) {
                    Conj::Proved(children) => {
                        return Self::node(goal, CaseLabel::L1b, children, Vec::new());
                    }
                    Conj::Truncated => truncated = true,
                    Conj::Failed => {}
                }
            }
            // 1c with a symbol head below f
            if self.prec.gt(Head::Sym(f), Head::Sym(g)) {
                let mut results = Vec::new();
                for tj in ts {
                    results.push(self.cmp(s, tj, x, depth + 1));
                }
                match Self::conj(results) {
                    Conj::Proved(children) => {
                        return Self::node(goal, CaseLabel::L1c, children, Vec::new());
                    }
                    Conj::Truncated => truncated = true,
                    Conj::Failed => {}
                }
            }
        }

        // 1c with the application head, which every symbol is above
        if let Term::App { fun, arg } = t {
            let results = vec![self.cmp(s, fun, x, depth + 1), self.cmp(s, arg, x, depth + 1)];
            match Self::conj(results) {
                Conj::Proved(children) => {
                    return Self::node(goal, CaseLabel::L1c, children, Vec::new());
                }
                Conj::Truncated => truncated = true,
                Conj::Failed => {}
            }
        }

        // 1d
        if let Term::Abs { var: y, ty: beta, body: w } = t {
            let z = self.supply.fresh(y);
            let zv = Term::var(&z, beta.clone());
            let w2 = self.subst(w, y, beta, &zv);
            let mut x2 = x.clone();
            x2.insert(z.clone());
            match self.cmp(s, &w2, &x2, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L1d, vec![d], vec![(z, beta.clone())]);
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 1e
        let empty = BTreeSet::new();
        for u in ss {
            match self.ge_typed(u, t, &empty, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L1e, vec![d], Vec::new());
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 1f
        if self.cfg.definition == Definition::Two {
            let table = self.acc.expect("checked at construction");
            let mut candidates: Vec<Term> = Vec::new();
            for si in ss {
                for u in acc_subterms(table, si) {
                    if !candidates.contains(&u) {
                        candidates.push(u);
                    }
                }
            }
            for u in &candidates {
                match self.ge_typed(u, t, &empty, depth + 1) {
                    CmpOutcome::Proved(d) => {
                        return Self::node(goal, CaseLabel::L1f, vec![d], Vec::new());
                    }
                    CmpOutcome::Truncated => truncated = true,
                    CmpOutcome::Failed => {}
                }
            }
        }

        if truncated {
            CmpOutcome::Truncated
        } else {
            CmpOutcome::Failed
        }
    }

    fn app_cases(
        &mut self,
        s: &Term,
        t: &Term,
        x: &BTreeSet<String>,
        depth: usize,
        goal: &Goal,
    ) -> CmpOutcome {
        let Term::App { fun: u, arg: v } = s else { unreachable!() };
        let mut truncated = false;

        // 2a
        if let Term::Var { name, .. } = t {
            if x.contains(name) {
                return Self::node(goal, CaseLabel::L2a, Vec::new(), Vec::new());
            }
        }

        // 2b
        if let Term::App { fun: u2, arg: v2 } = t {
            let left = vec![u.as_ref().clone(), v.as_ref().clone()];
            let right = vec![u2.as_ref().clone(), v2.as_ref().clone()];
            let empty = BTreeSet::new();
            match self.status_compare(
                s,
                &empty,
                &left,
                &right,
                Status::Mul,
                StatusElemRel::TypedEmpty,
                depth + 1,
            ) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L2b, vec![d], Vec::new());
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 2c
        if let Term::Abs { var: y, ty: beta, body: w } = t {
            let z = self.supply.fresh(y);
            let zv = Term::var(&z, beta.clone());
            let w2 = self.subst(w, y, beta, &zv);
            let x2 = match self.cfg.variant {
                Variant::UnsoundAppabsZ => {
                    let mut x2 = x.clone();
                    x2.insert(z.clone());
                    x2
                }
                _ => x.clone(),
            };
            match self.cmp(s, &w2, &x2, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L2c, vec![d], vec![(z, beta.clone())]);
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 2d
        for side in [u.as_ref(), v.as_ref()] {
            match self.ge_typed(side, t, x, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L2d, vec![d], Vec::new());
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 2e
        if let Term::Abs { var: xv, ty: alpha, body: w } = u.as_ref() {
            let reduced = self.subst(w, xv, alpha, v);
            match self.ge_untyped(&reduced, t, x, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L2e, vec![d], Vec::new());
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        if truncated {
            CmpOutcome::Truncated
        } else {
            CmpOutcome::Failed
        }
    }

    fn abs_cases(
        &mut self,
        s: &Term,
        t: &Term,
        x: &BTreeSet<String>,
        depth: usize,
        goal: &Goal,
    ) -> CmpOutcome {
        let Term::Abs { var: xv, ty: alpha, body: u } = s else { unreachable!() };
        let mut truncated = false;

        // 3a
        if let Term::Var { name, .. } = t {
            if x.contains(name) {
                return Self::node(goal, CaseLabel::L3a, Vec::new(), Vec::new());
            }
        }

        if let Term::Abs { var: y, ty: beta, body: w } = t {
            if self.type_eq(alpha, beta) {
                // 3b: both bodies see one shared fresh variable. Each side
                // keeps its own binder annotation; when the two sorts are
                // merely equivalent rather than identical the occurrences
                // no longer match syntactically and the comparison fails
                // conservatively.
                let z = self.supply.fresh(xv);
                let u2 = self.subst(u, xv, alpha, &Term::var(&z, alpha.clone()));
                let w2 = self.subst(w, y, beta, &Term::var(&z, beta.clone()));
                match self.cmp(&u2, &w2, x, depth + 1) {
                    CmpOutcome::Proved(d) => {
                        return Self::node(goal, CaseLabel::L3b, vec![d], vec![(z, alpha.clone())]);
                    }
                    CmpOutcome::Truncated => truncated = true,
                    CmpOutcome::Failed => {}
                }
            } else {
                // 3c
                let z = self.supply.fresh(y);
                let zv = Term::var(&z, beta.clone());
                let w2 = self.subst(w, y, beta, &zv);
                match self.cmp(s, &w2, x, depth + 1) {
                    CmpOutcome::Proved(d) => {
                        return Self::node(goal, CaseLabel::L3c, vec![d], vec![(z, beta.clone())]);
                    }
                    CmpOutcome::Truncated => truncated = true,
                    CmpOutcome::Failed => {}
                }
            }
        }

        // 3d
        {
            let z = self.supply.fresh(xv);
            let zv = Term::var(&z, alpha.clone());
            let u2 = self.subst(u, xv, alpha, &zv);
            match self.ge_typed(&u2, t, x, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L3d, vec![d], vec![(z, alpha.clone())]);
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        // 3e
        if let Some(v) = eta_view(s) {
            let v = v.clone();
            match self.ge_untyped(&v, t, x, depth + 1) {
                CmpOutcome::Proved(d) => {
                    return Self::node(goal, CaseLabel::L3e, vec![d], Vec::new());
                }
                CmpOutcome::Truncated => truncated = true,
                CmpOutcome::Failed => {}
            }
        }

        if truncated {
            CmpOutcome::Truncated
        } else {
            CmpOutcome::Failed
        }
    }

    /// Reflexive closure with the type condition. Alpha-equal sides close
    /// immediately without consulting the type order; otherwise the types
    /// must compare and the strict ordering decides.
    fn ge_typed(&mut self, a: &Term, b: &Term, x: &BTreeSet<String>, depth: usize) -> CmpOutcome {
        if alpha_eq(a, b) {
            return CmpOutcome::Proved(Rc::new(Derivation {
                goal: Goal::Ge { s: a.clone(), t: b.clone(), x: x.clone(), typed: true },
                step: Step::Refl,
                children: Vec::new(),
                fresh: Vec::new(),
            }));
        }
        let (ta, tb) = (self.type_of(a), self.type_of(b));
        if !self.type_ge(&ta, &tb) {
            let shown = Goal::Ge { s: a.clone(), t: b.clone(), x: x.clone(), typed: true };
            self.fail(shown.to_string(), FailReason::TypeCheck);
            return CmpOutcome::Failed;
        }
        self.cmp(a, b, x, depth)
    }

    fn ge_untyped(&mut self, a: &Term, b: &Term, x: &BTreeSet<String>, depth: usize) -> CmpOutcome {
        if alpha_eq(a, b) {
            return CmpOutcome::Proved(Rc::new(Derivation {
                goal: Goal::Ge { s: a.clone(), t: b.clone(), x: x.clone(), typed: false },
                step: Step::Refl,
                children: Vec::new(),
                fresh: Vec::new(),
            }));
        }
        self.cmp(a, b, x, depth)
    }

    /// Strict typed comparison of one status element pair.
    fn typed_strict(
        &mut self,
        a: &Term,
        b: &Term,
        x: &BTreeSet<String>,
        depth: usize,
    ) -> CmpOutcome {
        let (ta, tb) = (self.type_of(a), self.type_of(b));
        if !self.type_ge(&ta, &tb) {
            self.fail(format!("{a} >typed{} {b}", fmt_var_set(x)), FailReason::TypeCheck);
            return CmpOutcome::Failed;
        }
        self.cmp(a, b, x, depth)
    }

    /// Compares two argument tuples under a status. `x` is the enclosing
    /// goal's bound set: the unsound element relation and the accessibility
    /// ordering read it, while sound typed elements use the empty set.
    #[allow(clippy::too_many_arguments)]
    fn status_compare(
        &mut self,
        s: &Term,
        x: &BTreeSet<String>,
        left: &[Term],
        right: &[Term],
        status: Status,
        elem: StatusElemRel,
        depth: usize,
    ) -> CmpOutcome {
        let goal = Goal::Status {
            left: left.to_vec(),
            right: right.to_vec(),
            x: x.clone(),
            status,
            elem,
        };
        let n = left.len();
        let m = right.len();
        let mut eq = vec![vec![false; m]; n];
        let mut gt = vec![vec![false; m]; n];
        let mut proofs: Vec<Vec<Option<Rc<Derivation>>>> = vec![vec![None; m]; n];
        let mut truncated = false;
        let empty = BTreeSet::new();
        for i in 0..n {
            for j in 0..m {
                if alpha_eq(&left[i], &right[j]) {
                    eq[i][j] = true;
                    continue;
                }
                let elem_x = match elem {
                    StatusElemRel::TypedX => x,
                    _ => &empty,
                };
                let mut res = self.typed_strict(&left[i], &right[j], elem_x, depth);
                if elem == StatusElemRel::TypedOrAcc && matches!(res, CmpOutcome::Failed) {
                    res = self.acc_ord(s, x, &left[i], &right[j], depth);
                }
                match res {
                    CmpOutcome::Proved(d) => {
                        gt[i][j] = true;
                        proofs[i][j] = Some(d);
                    }
                    CmpOutcome::Truncated => truncated = true,
                    CmpOutcome::Failed => {}
                }
            }
        }
        let step = match status {
            Status::Mul => multiset_ext_matrix(&eq, &gt)
                .map(|w| Step::MulExt { kept: w.kept, cover: w.cover }),
            Status::Lex => lex_ext_matrix(&eq, &gt).map(|pos| Step::LexExt { pos }),
        };
        match step {
            Some(step) => {
                let pairs: Vec<(usize, usize)> = match &step {
                    Step::MulExt { cover, .. } => cover.clone(),
                    Step::LexExt { pos } => vec![(*pos, *pos)],
                    _ => unreachable!(),
                };
                let children = pairs
                    .into_iter()
                    .map(|(i, j)| proofs[i][j].clone().expect("witness pairs were proved"))
                    .collect();
                CmpOutcome::Proved(Rc::new(Derivation { goal, step, children, fresh: Vec::new() }))
            }
            None => {
                if truncated {
                    CmpOutcome::Truncated
                } else {
                    self.fail(goal.to_string(), FailReason::NoDecomposition);
                    CmpOutcome::Failed
                }
            }
        }
    }

    /// The auxiliary accessibility ordering: `u` dominates an application
    /// spine whose head part is accessible in `u` while the remaining
    /// arguments fall below the enclosing left side `s`.
    fn acc_ord(
        &mut self,
        s: &Term,
        x: &BTreeSet<String>,
        u: &Term,
        t: &Term,
        depth: usize,
    ) -> CmpOutcome {
        let goal = Goal::Acc { s: s.clone(), u: u.clone(), t: t.clone(), x: x.clone() };
        if depth >= self.cfg.max_depth {
            self.budget_events += 1;
            self.fail(goal.to_string(), FailReason::Depth);
            return CmpOutcome::Truncated;
        }
        let table = self.acc.expect("only reachable under the extended definition");
        let (tu, tt) = (self.type_of(u), self.type_of(t));
        if !self.type_ge(&tu, &tt) {
            self.fail(goal.to_string(), FailReason::TypeCheck);
            return CmpOutcome::Failed;
        }
        if !matches!(t, Term::App { .. }) {
            self.fail(goal.to_string(), FailReason::NoDecomposition);
            return CmpOutcome::Failed;
        }
        let (head, args) = t.spine();
        let args: Vec<Term> = args.into_iter().cloned().collect();
        let subs = acc_subterms(table, u);
        let mut truncated = false;
        let mut v = head.clone();
        for k in 0..args.len() {
            // v is the spine prefix holding the first k arguments; the rest
            // must each fall below s
            if subs.iter().any(|c| alpha_eq(c, &v)) {
                let mut results = Vec::new();
                for w in &args[k..] {
                    results.push(self.cmp(s, w, x, depth + 1));
                }
                match Self::conj(results) {
                    Conj::Proved(children) => {
                        return CmpOutcome::Proved(Rc::new(Derivation {
                            goal,
                            step: Step::AccOrd { v },
                            children,
                            fresh: Vec::new(),
                        }));
                    }
                    Conj::Truncated => truncated = true,
                    Conj::Failed => {}
                }
            }
            v = Term::app(v, args[k].clone());
        }
        if truncated {
            CmpOutcome::Truncated
        } else {
            self.fail(goal.to_string(), FailReason::NoAccRoute);
            CmpOutcome::Failed
        }
    }

    /// Validates a derivation without re-running the search: every node's
    /// side conditions, the fit between each node and its children, witness
    /// well-formedness and freshness of introduced names. Shared subtrees
    /// are checked once.
    pub fn replay(&self, root: &Rc<Derivation>) -> Result<(), ReplayError> {
        let mut seen = HashSet::new();
        self.replay_node(root, &mut seen)
    }

    fn replay_node(
        &self,
        d: &Rc<Derivation>,
        seen: &mut HashSet<*const Derivation>,
    ) -> Result<(), ReplayError> {
        if !seen.insert(Rc::as_ptr(d)) {
            return Ok(());
        }
        self.check_node(d)?;
        for c in &d.children {
            self.replay_node(c, seen)?;
        }
        Ok(())
    }

    fn resub(
        &self,
        body: &Term,
        var: &str,
        ty: &SimpleType,
        to: &Term,
        d: &Derivation,
    ) -> Result<Term, ReplayError> {
        let mut names = BTreeSet::new();
        body.all_names(&mut names);
        to.all_names(&mut names);
        let mut supply = FreshSupply::seed(names);
        substitute(body, var, ty, to, &mut supply)
            .map_err(|e| bad(d, format!("substitution does not re-enact: {e}")))
    }

    fn check_fresh<'d>(
        &self,
        d: &'d Derivation,
        expect_ty: &SimpleType,
        scope: &[&Term],
        x: &BTreeSet<String>,
    ) -> Result<&'d str, ReplayError> {
        if d.fresh.len() != 1 {
            return Err(bad(d, "exactly one fresh name expected"));
        }
        let (z, ty) = &d.fresh[0];
        if ty != expect_ty {
            return Err(bad(d, format!("fresh name {z} carries the wrong type")));
        }
        let mut names = BTreeSet::new();
        for t in scope {
            t.all_names(&mut names);
        }
        if names.contains(z) || x.contains(z) {
            return Err(bad(d, format!("fresh name {z} is not fresh here")));
        }
        Ok(z)
    }

    fn no_fresh(&self, d: &Derivation) -> Result<(), ReplayError> {
        if d.fresh.is_empty() {
            Ok(())
        } else {
            Err(bad(d, "this step introduces no fresh names"))
        }
    }

    fn expect_cmp_child(
        &self,
        d: &Derivation,
        child: &Derivation,
        s: &Term,
        t: &Term,
        x: &BTreeSet<String>,
    ) -> Result<(), ReplayError> {
        match (&child.goal, &child.step) {
            (Goal::Cmp { s: cs, t: ct, x: cx }, Step::Case(_)) => {
                if !alpha_eq(cs, s) || !alpha_eq(ct, t) || cx != x {
                    Err(bad(d, format!("child goal mismatch, found [{}]", child.goal)))
                } else {
                    Ok(())
                }
            }
            _ => Err(bad(d, "expected a strict comparison child")),
        }
    }

    /// Checks a child produced by the reflexive closure: a reflexivity leaf
    /// or a strict comparison, with the type condition when `typed`.
    fn expect_ge_child(
        &self,
        d: &Derivation,
        child: &Derivation,
        candidates: &[Term],
        t: &Term,
        x: &BTreeSet<String>,
        typed: bool,
    ) -> Result<(), ReplayError> {
        let (cs, ct, cx, refl) = match (&child.goal, &child.step) {
            (Goal::Ge { s, t, x, typed: flag }, Step::Refl) => (s, t, x, Some(*flag)),
            (Goal::Cmp { s, t, x }, Step::Case(_)) => (s, t, x, None),
            _ => return Err(bad(d, "expected a reflexive-or-strict child")),
        };
        if cx != x {
            return Err(bad(d, "child bound-variable set mismatch"));
        }
        if !alpha_eq(ct, t) {
            return Err(bad(d, format!("child right side mismatch, found [{}]", child.goal)));
        }
        if !candidates.iter().any(|c| alpha_eq(c, cs)) {
            return Err(bad(d, format!("child left side {cs} is not among the candidates")));
        }
        match refl {
            Some(flag) => {
                if flag != typed {
                    return Err(bad(d, "reflexivity leaf has the wrong type-condition flavour"));
                }
            }
            None => {
                if typed && !self.type_ge(&self.type_of(cs), &self.type_of(ct)) {
                    return Err(bad(d, format!("type condition fails for {cs} against {ct}")));
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn expect_status_child(
        &self,
        d: &Derivation,
        child: &Derivation,
        left: &[Term],
        right: &[Term],
        x: &BTreeSet<String>,
        status: Status,
        elem: StatusElemRel,
    ) -> Result<(), ReplayError> {
        let Goal::Status { left: cl, right: cr, x: cx, status: cst, elem: cel } = &child.goal
        else {
            return Err(bad(d, "expected a status comparison child"));
        };
        let lists_match = cl.len() == left.len()
            && cr.len() == right.len()
            && cl.iter().zip(left).all(|(a, b)| alpha_eq(a, b))
            && cr.iter().zip(right).all(|(a, b)| alpha_eq(a, b));
        if !lists_match || cx != x || *cst != status || *cel != elem {
            return Err(bad(d, format!("status child mismatch, found [{}]", child.goal)));
        }
        Ok(())
    }

    fn check_strict_elem(
        &self,
        d: &Derivation,
        child: &Derivation,
        li: &Term,
        rj: &Term,
        x: &BTreeSet<String>,
        elem: StatusElemRel,
    ) -> Result<(), ReplayError> {
        let empty = BTreeSet::new();
        match (&child.goal, &child.step) {
            (Goal::Cmp { s, t, x: cx }, Step::Case(_)) => {
                let want_x = match elem {
                    StatusElemRel::TypedX => x,
                    _ => &empty,
                };
                if !alpha_eq(s, li) || !alpha_eq(t, rj) || cx != want_x {
                    return Err(bad(d, format!("witness child mismatch, found [{}]", child.goal)));
                }
                if !self.type_ge(&self.type_of(li), &self.type_of(rj)) {
                    return Err(bad(d, format!("type condition fails for {li} against {rj}")));
                }
                Ok(())
            }
            (Goal::Acc { u, t, x: cx, .. }, Step::AccOrd { .. }) => {
                if elem != StatusElemRel::TypedOrAcc {
                    return Err(bad(d, "accessibility witness under a purely typed relation"));
                }
                if !alpha_eq(u, li) || !alpha_eq(t, rj) || cx != x {
                    return Err(bad(d, format!("witness child mismatch, found [{}]", child.goal)));
                }
                Ok(())
            }
            _ => Err(bad(d, "expected a strict witness child")),
        }
    }

    fn check_node(&self, d: &Derivation) -> Result<(), ReplayError> {
        match (&d.goal, &d.step) {
            (Goal::Ge { s, t, .. }, Step::Refl) => {
                if !alpha_eq(s, t) {
                    return Err(bad(d, "reflexivity between non-alpha-equal terms"));
                }
                if !d.children.is_empty() {
                    return Err(bad(d, "reflexivity leaves have no children"));
                }
                self.no_fresh(d)
            }
            (Goal::Cmp { s, t, x }, Step::Case(label)) => self.check_case(d, s, t, x, *label),
            (Goal::Status { left, right, x, status, elem }, Step::MulExt { kept, cover }) => {
                if *status != Status::Mul {
                    return Err(bad(d, "multiset witness under a lexicographic status"));
                }
                let n = left.len();
                let m = right.len();
                let mut used_left = vec![false; n];
                let mut used_right = vec![false; m];
                for &(i, j) in kept {
                    if i >= n || j >= m {
                        return Err(bad(d, "witness index out of range"));
                    }
                    if used_left[i] || used_right[j] {
                        return Err(bad(d, "witness reuses an element"));
                    }
                    used_left[i] = true;
                    used_right[j] = true;
                    if !alpha_eq(&left[i], &right[j]) {
                        return Err(bad(d, format!("kept pair {i}:{j} is not equal")));
                    }
                }
                if used_left.iter().all(|&b| b) {
                    return Err(bad(d, "no left element remains unmatched"));
                }
                for &(i, j) in cover {
                    if i >= n || j >= m {
                        return Err(bad(d, "witness index out of range"));
                    }
                    if used_left[i] {
                        return Err(bad(d, "a kept left element also covers"));
                    }
                    if used_right[j] {
                        return Err(bad(d, "a right element is justified twice"));
                    }
                    used_right[j] = true;
                }
                if !used_right.iter().all(|&b| b) {
                    return Err(bad(d, "a right element is left unjustified"));
                }
                if d.children.len() != cover.len() {
                    return Err(bad(d, "one child per covering pair expected"));
                }
                for (child, &(i, j)) in d.children.iter().zip(cover) {
                    self.check_strict_elem(d, child, &left[i], &right[j], x, *elem)?;
                }
                self.no_fresh(d)
            }
            (Goal::Status { left, right, x, status, elem }, Step::LexExt { pos }) => {
                if *status != Status::Lex {
                    return Err(bad(d, "lexicographic witness under a multiset status"));
                }
                if *pos >= left.len() || *pos >= right.len() {
                    return Err(bad(d, "strict position out of range"));
                }
                for k in 0..*pos {
                    if !alpha_eq(&left[k], &right[k]) {
                        return Err(bad(d, format!("position {k} before the strict one differs")));
                    }
                }
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one strict child expected"));
                }
                self.check_strict_elem(d, &d.children[0], &left[*pos], &right[*pos], x, *elem)?;
                self.no_fresh(d)
            }
            (Goal::Acc { s, u, t, x }, Step::AccOrd { v }) => {
                let Some(table) = self.acc else {
                    return Err(bad(d, "accessibility step without a table"));
                };
                if !self.type_ge(&self.type_of(u), &self.type_of(t)) {
                    return Err(bad(d, "type condition fails"));
                }
                if !matches!(t, Term::App { .. }) {
                    return Err(bad(d, "right side is not an application"));
                }
                let (head, args) = t.spine();
                let args: Vec<Term> = args.into_iter().cloned().collect();
                let mut prefix = head.clone();
                let mut split = None;
                for (k, a) in args.iter().enumerate() {
                    if alpha_eq(&prefix, v) {
                        split = Some(k);
                        break;
                    }
                    prefix = Term::app(prefix, a.clone());
                }
                let Some(k) = split else {
                    return Err(bad(d, "claimed head part is not a prefix of the spine"));
                };
                if !acc_subterms(table, u).iter().any(|c| alpha_eq(c, v)) {
                    return Err(bad(d, format!("{v} is not accessible in {u}")));
                }
                if d.children.len() != args.len() - k {
                    return Err(bad(d, "one child per remaining argument expected"));
                }
                for (child, w) in d.children.iter().zip(&args[k..]) {
                    self.expect_cmp_child(d, child, s, w, x)?;
                }
                self.no_fresh(d)
            }
            _ => Err(bad(d, "step does not fit the goal")),
        }
    }

    fn check_case(
        &self,
        d: &Derivation,
        s: &Term,
        t: &Term,
        x: &BTreeSet<String>,
        label: CaseLabel,
    ) -> Result<(), ReplayError> {
        use CaseLabel::*;
        match label {
            L1a | L2a | L3a => {
                let shape_ok = match label {
                    L1a => matches!(s, Term::FunApp { .. }),
                    L2a => matches!(s, Term::App { .. }),
                    _ => matches!(s, Term::Abs { .. }),
                };
                if !shape_ok {
                    return Err(bad(d, "left head does not match the case group"));
                }
                let Term::Var { name, .. } = t else {
                    return Err(bad(d, "right side is not a variable"));
                };
                if !x.contains(name) {
                    return Err(bad(d, format!("{name} is not in the bound set")));
                }
                if !d.children.is_empty() {
                    return Err(bad(d, "variable cases have no children"));
                }
                self.no_fresh(d)
            }
            L1b => {
                let (Term::FunApp { sym: f, args: ss }, Term::FunApp { sym: g, args: ts }) = (s, t)
                else {
                    return Err(bad(d, "both sides must be algebraic"));
                };
                if !self.prec.eq(Head::Sym(f), Head::Sym(g)) {
                    return Err(bad(d, format!("{f} and {g} are not equivalent")));
                }
                if d.children.len() != ts.len() + 1 {
                    return Err(bad(d, "one child per argument plus a status child expected"));
                }
                for (child, tj) in d.children.iter().zip(ts) {
                    self.expect_cmp_child(d, child, s, tj, x)?;
                }
                let status_child = d.children.last().expect("length checked");
                let elem = funstat_elem(&self.cfg);
                self.expect_status_child(d, status_child, ss, ts, x, self.statuses.get(f), elem)?;
                for grand in &status_child.children {
                    if let Goal::Acc { s: acc_s, .. } = &grand.goal {
                        if !alpha_eq(acc_s, s) {
                            return Err(bad(
                                d,
                                "accessibility witness cites a different left side",
                            ));
                        }
                    }
                }
                self.no_fresh(d)
            }
            L1c => {
                if !matches!(s, Term::FunApp { .. }) {
                    return Err(bad(d, "left side must be algebraic"));
                }
                let subgoals: Vec<&Term> = match t {
                    Term::FunApp { sym: g, args: ts } => {
                        let Term::FunApp { sym: f, .. } = s else { unreachable!() };
                        if !self.prec.gt(Head::Sym(f), Head::Sym(g)) {
                            return Err(bad(d, format!("{f} is not above {g}")));
                        }
                        ts.iter().collect()
                    }
                    Term::App { fun, arg } => vec![fun.as_ref(), arg.as_ref()],
                    _ => return Err(bad(d, "right head admits no precedence step")),
                };
                if d.children.len() != subgoals.len() {
                    return Err(bad(d, "one child per right argument expected"));
                }
                for (child, tj) in d.children.iter().zip(subgoals) {
                    self.expect_cmp_child(d, child, s, tj, x)?;
                }
                self.no_fresh(d)
            }
            L1d => {
                if !matches!(s, Term::FunApp { .. }) {
                    return Err(bad(d, "left side must be algebraic"));
                }
                let Term::Abs { var: y, ty: beta, body: w } = t else {
                    return Err(bad(d, "right side is not an abstraction"));
                };
                let z = self.check_fresh(d, beta, &[s, t], x)?.to_string();
                let w2 = self.resub(w, y, beta, &Term::var(&z, beta.clone()), d)?;
                let mut x2 = x.clone();
                x2.insert(z);
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_cmp_child(d, &d.children[0], s, &w2, &x2)
            }
            L1e => {
                let Term::FunApp { args: ss, .. } = s else {
                    return Err(bad(d, "left side must be algebraic"));
                };
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_ge_child(d, &d.children[0], ss, t, &BTreeSet::new(), true)?;
                self.no_fresh(d)
            }
            L1f => {
                if self.cfg.definition != Definition::Two {
                    return Err(bad(d, "case outside the extended definition"));
                }
                let Some(table) = self.acc else {
                    return Err(bad(d, "accessibility case without a table"));
                };
                let Term::FunApp { args: ss, .. } = s else {
                    return Err(bad(d, "left side must be algebraic"));
                };
                let mut pool: Vec<Term> = Vec::new();
                for si in ss {
                    for c in acc_subterms(table, si) {
                        if !pool.contains(&c) {
                            pool.push(c);
                        }
                    }
                }
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_ge_child(d, &d.children[0], &pool, t, &BTreeSet::new(), true)?;
                self.no_fresh(d)
            }
            L2b => {
                let (Term::App { fun: u, arg: v }, Term::App { fun: u2, arg: v2 }) = (s, t) else {
                    return Err(bad(d, "both sides must be applications"));
                };
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one status child expected"));
                }
                let left = [u.as_ref().clone(), v.as_ref().clone()];
                let right = [u2.as_ref().clone(), v2.as_ref().clone()];
                self.expect_status_child(
                    d,
                    &d.children[0],
                    &left,
                    &right,
                    &BTreeSet::new(),
                    Status::Mul,
                    StatusElemRel::TypedEmpty,
                )?;
                self.no_fresh(d)
            }
            L2c => {
                if !matches!(s, Term::App { .. }) {
                    return Err(bad(d, "left side must be an application"));
                }
                let Term::Abs { var: y, ty: beta, body: w } = t else {
                    return Err(bad(d, "right side is not an abstraction"));
                };
                let z = self.check_fresh(d, beta, &[s, t], x)?.to_string();
                let w2 = self.resub(w, y, beta, &Term::var(&z, beta.clone()), d)?;
                let x2 = match self.cfg.variant {
                    Variant::UnsoundAppabsZ => {
                        let mut x2 = x.clone();
                        x2.insert(z);
                        x2
                    }
                    _ => x.clone(),
                };
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_cmp_child(d, &d.children[0], s, &w2, &x2)
            }
            L2d => {
                let Term::App { fun: u, arg: v } = s else {
                    return Err(bad(d, "left side must be an application"));
                };
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                let candidates = [u.as_ref().clone(), v.as_ref().clone()];
                self.expect_ge_child(d, &d.children[0], &candidates, t, x, true)?;
                self.no_fresh(d)
            }
            L2e => {
                let Term::App { fun: u, arg: v } = s else {
                    return Err(bad(d, "left side must be an application"));
                };
                let Term::Abs { var: xv, ty: alpha, body: w } = u.as_ref() else {
                    return Err(bad(d, "left side is not a redex"));
                };
                let reduced = self.resub(w, xv, alpha, v, d)?;
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_ge_child(d, &d.children[0], &[reduced], t, x, false)?;
                self.no_fresh(d)
            }
            L3b => {
                let (
                    Term::Abs { var: xv, ty: alpha, body: u },
                    Term::Abs { var: y, ty: beta, body: w },
                ) = (s, t)
                else {
                    return Err(bad(d, "both sides must be abstractions"));
                };
                if !self.type_eq(alpha, beta) {
                    return Err(bad(d, "binder types are not equivalent"));
                }
                let z = self.check_fresh(d, alpha, &[s, t], x)?.to_string();
                let u2 = self.resub(u, xv, alpha, &Term::var(&z, alpha.clone()), d)?;
                let w2 = self.resub(w, y, beta, &Term::var(&z, beta.clone()), d)?;
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_cmp_child(d, &d.children[0], &u2, &w2, x)
            }
            L3c => {
                let (Term::Abs { ty: alpha, .. }, Term::Abs { var: y, ty: beta, body: w }) = (s, t)
                else {
                    return Err(bad(d, "both sides must be abstractions"));
                };
                if self.type_eq(alpha, beta) {
                    return Err(bad(d, "equivalent binder types belong to the status case"));
                }
                let z = self.check_fresh(d, beta, &[s, t], x)?.to_string();
                let w2 = self.resub(w, y, beta, &Term::var(&z, beta.clone()), d)?;
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_cmp_child(d, &d.children[0], s, &w2, x)
            }
            L3d => {
                let Term::Abs { var: xv, ty: alpha, body: u } = s else {
                    return Err(bad(d, "left side must be an abstraction"));
                };
                let z = self.check_fresh(d, alpha, &[s, t], x)?.to_string();
                let u2 = self.resub(u, xv, alpha, &Term::var(&z, alpha.clone()), d)?;
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_ge_child(d, &d.children[0], &[u2], t, x, true)
            }
            L3e => {
                let Some(v) = eta_view(s) else {
                    return Err(bad(d, "left side is not an eta-expansion"));
                };
                if d.children.len() != 1 {
                    return Err(bad(d, "exactly one child expected"));
                }
                self.expect_ge_child(d, &d.children[0], std::slice::from_ref(v), t, x, false)?;
                self.no_fresh(d)
            }
        }
    }
}
