#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpo::access::{polar_positions, sort_positions, Polarity};
use cpo::cpo::{CmpOutcome, Definition, Engine, EngineConfig, Variant};
use cpo::parse::parse_problem;
use cpo::prec::{multiset_ext_matrix, MulWitness, Precedence, StatusMap};
use cpo::rewrite::{successors, walk, WalkOutcome};
use cpo::sig::{FunDecl, Signature};
use cpo::system::{build_parameters, prepare, Prepared, RewriteSystem};
use cpo::term::{substitute, FreshSupply, SimpleType, Term};
use cpo::typeorder::TypeOrderConfig;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn corpus_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.expect("corpus entry").path())
        .filter(|p| p.extension().is_some_and(|e| e == "cpo"))
        .collect();
    files.sort();
    files
}

pub fn load_corpus(name: &str) -> RewriteSystem {
    let path = corpus_dir().join(name);
    let src = std::fs::read_to_string(&path).expect("corpus file");
    parse_problem(&src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Owns everything an engine borrows, so tests can make engines freely.
pub struct Bench {
    pub sys: RewriteSystem,
    pub prepared: Prepared,
    pub prec: Precedence,
    pub statuses: StatusMap,
}

impl Bench {
    pub fn over(sys: RewriteSystem, definition: Definition) -> Bench {
        let prepared = prepare(&sys, definition, TypeOrderConfig::default())
            .expect("preparable system");
        let (prec, statuses) = build_parameters(&sys).expect("valid parameters");
        Bench { sys, prepared, prec, statuses }
    }

    pub fn engine(&self, definition: Definition) -> Engine<'_> {
        let cfg = EngineConfig {
            definition,
            variant: Variant::Sound,
            max_depth: 512,
        };
        Engine::new(
            &self.sys.sig,
            &self.prepared.order,
            &self.prec,
            &self.statuses,
            self.prepared.acc.as_ref(),
            cfg,
        )
    }
}

/// A fixed signature rich enough to reach every case: two related sorts,
/// constants, unary and binary symbols, a higher-order symbol, and an
/// arrow-typed constant.
pub fn gen_system() -> RewriteSystem {
    let src = "\
sort N;
sort O;
typeorder O >= N;
fun c : N;
fun d : O;
fun s : N -> N;
fun h : O -> N;
fun f : N * N -> N;
fun g : N * O -> O;
fun k : (N -> N) -> N;
fun w : (N -> N);
prec f > g > k > s > h > w > c > d;
var x0 : N;
var y0 : O;
var F0 : N -> N;
";
    parse_problem(src).expect("generator signature parses")
}

fn sort_n() -> SimpleType {
    SimpleType::sort("N")
}

fn sort_o() -> SimpleType {
    SimpleType::sort("O")
}

pub fn type_pool() -> Vec<SimpleType> {
    vec![
        sort_n(),
        sort_o(),
        SimpleType::arrow(sort_n(), sort_n()),
        SimpleType::arrow(sort_o(), sort_n()),
        SimpleType::arrow(sort_n(), SimpleType::arrow(sort_n(), sort_n())),
    ]
}

/// Types the generator may use as either side of a synthesized arrow. The
/// prepared type universe closes declared types under one round of arrows,
/// so keeping both ends of every new arrow in this set keeps every subterm
/// type inside it.
fn seed_types() -> Vec<SimpleType> {
    vec![sort_n(), sort_o(), SimpleType::arrow(sort_n(), sort_n())]
}

fn is_seed(ty: &SimpleType) -> bool {
    seed_types().contains(ty)
}

pub struct TermGen {
    pub sig: Signature,
    pub frees: Vec<(String, SimpleType)>,
    pub redex_bias: bool,
    counter: u64,
}

impl TermGen {
    pub fn new(sys: &RewriteSystem, redex_bias: bool) -> TermGen {
        TermGen {
            sig: sys.sig.clone(),
            frees: sys.vars.iter().map(|(n, t)| (n.clone(), t.clone())).collect(),
            redex_bias,
            counter: 0,
        }
    }

    fn minimal(&self, ty: &SimpleType) -> Term {
        match ty {
            SimpleType::Sort { name, .. } if name == "N" => Term::fun("c", vec![]),
            SimpleType::Sort { .. } => Term::fun("d", vec![]),
            SimpleType::Arrow { dom, cod } => {
                let x = format!("b{}", self.counter);
                Term::abs(&x, (**dom).clone(), self.minimal(cod))
            }
        }
    }

    fn fun_choices(&self, ty: &SimpleType) -> Vec<FunDecl> {
        self.sig
            .fun_names()
            .filter_map(|n| self.sig.fun(n))
            .filter(|d| d.out == *ty)
            .cloned()
            .collect()
    }

    pub fn term(
        &mut self,
        rng: &mut ChaCha8Rng,
        ty: &SimpleType,
        scope: &mut Vec<(String, SimpleType)>,
        fuel: usize,
    ) -> Term {
        if fuel == 0 {
            let in_scope: Vec<(String, SimpleType)> = scope
                .iter()
                .chain(self.frees.iter())
                .filter(|(_, t)| t == ty)
                .cloned()
                .collect();
            if let Some((n, t)) = in_scope.choose(rng) {
                return Term::var(n, t.clone());
            }
            self.counter += 1;
            return self.minimal(ty);
        }
        for _ in 0..8 {
            match rng.gen_range(0..5u8) {
                0 => {
                    let in_scope: Vec<(String, SimpleType)> = scope
                        .iter()
                        .chain(self.frees.iter())
                        .filter(|(_, t)| t == ty)
                        .cloned()
                        .collect();
                    if let Some((n, t)) = in_scope.choose(rng) {
                        return Term::var(n, t.clone());
                    }
                }
                1 => {
                    let funs = self.fun_choices(ty);
                    if let Some(decl) = funs.choose(rng).cloned() {
                        let args = decl
                            .args
                            .iter()
                            .map(|a| self.term(rng, a, scope, fuel / 2))
                            .collect();
                        return Term::fun(&decl.name, args);
                    }
                }
                2 => {
                    if let SimpleType::Arrow { dom, cod } = ty {
                        self.counter += 1;
                        let x = format!("b{}", self.counter);
                        scope.push((x.clone(), (**dom).clone()));
                        let body = self.term(rng, cod, scope, fuel - 1);
                        scope.pop();
                        return Term::abs(&x, (**dom).clone(), body);
                    }
                }
                3 => {
                    if self.redex_bias && is_seed(ty) {
                        let dom = seed_types().choose(rng).cloned().expect("seeds");
                        self.counter += 1;
                        let x = format!("b{}", self.counter);
                        scope.push((x.clone(), dom.clone()));
                        let body = self.term(rng, ty, scope, fuel / 2);
                        scope.pop();
                        let arg = self.term(rng, &dom, scope, fuel / 2);
                        return Term::app(Term::abs(&x, dom, body), arg);
                    }
                }
                _ => {
                    if is_seed(ty) {
                        let dom = seed_types().choose(rng).cloned().expect("seeds");
                        let fun_ty = SimpleType::arrow(dom.clone(), ty.clone());
                        let fun = self.term(rng, &fun_ty, scope, fuel / 2);
                        let arg = self.term(rng, &dom, scope, fuel / 2);
                        return Term::app(fun, arg);
                    }
                }
            }
        }
        self.counter += 1;
        self.minimal(ty)
    }

    pub fn closed_term(&mut self, rng: &mut ChaCha8Rng, fuel: usize) -> Term {
        let pool = type_pool();
        let ty = pool.choose(rng).expect("pool").clone();
        let mut scope = Vec::new();
        self.term(rng, &ty, &mut scope, fuel)
    }
}

/// Renames every binder in the term, leaving an alpha-equivalent copy with
/// fresh binder names.
pub fn rename_binders(t: &Term, salt: &mut u64) -> Term {
    match t {
        Term::Var { .. } => t.clone(),
        Term::FunApp { sym, args } => {
            Term::fun(sym, args.iter().map(|a| rename_binders(a, salt)).collect())
        }
        Term::App { fun, arg } => {
            Term::app(rename_binders(fun, salt), rename_binders(arg, salt))
        }
        Term::Abs { var, ty, body } => {
            *salt += 1;
            let fresh = format!("r{salt}");
            let body = rename_binders(body, salt);
            let renamed = substitute(
                &body,
                var,
                ty,
                &Term::var(&fresh, ty.clone()),
                &mut FreshSupply::new(),
            )
            .expect("renaming substitution");
            Term::abs(&fresh, ty.clone(), renamed)
        }
    }
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    match t {
        Term::Var { .. } => {}
        Term::FunApp { args, .. } => {
            for a in args {
                subterms(a, out);
            }
        }
        Term::App { fun, arg } => {
            subterms(fun, out);
            subterms(arg, out);
        }
        Term::Abs { body, .. } => subterms(body, out),
    }
}

/// Pairs with a decent chance of being ordered: mostly a term against one
/// of its own subterms, sometimes two independent terms.
fn ordered_candidates(gen: &mut TermGen, r: &mut ChaCha8Rng) -> (Term, Term) {
    let s = gen.closed_term(r, 10);
    if r.gen_range(0..4u8) < 3 {
        let mut subs = Vec::new();
        subterms(&s, &mut subs);
        let t = subs.choose(r).expect("nonempty").clone();
        (s, t)
    } else {
        let t = gen.closed_term(r, 8);
        (s, t)
    }
}

// Property-suite cores. Each checks one spec invariant over at least ten
// thousand generated cases, panicking on the first violation and returning
// how many cases it examined; the standalone property tests and the
// acceptance gate both run them.

pub fn suite_beta_eta_containment() -> usize {
    let sys = gen_system();
    let bench1 = Bench::over(gen_system(), Definition::One);
    let bench2 = Bench::over(gen_system(), Definition::Two);
    let mut gen = TermGen::new(&sys, true);
    let mut r = rng(0xBE7A);
    let empty = BTreeSet::new();

    let mut checked = 0usize;
    let mut produced = 0u64;
    while checked < 10_000 {
        produced += 1;
        assert!(produced < 400_000, "generator starved at {checked} cases");
        let t = gen.closed_term(&mut r, 10);
        for succ in successors(&t, &sys) {
            let mut e1 = bench1.engine(Definition::One);
            let out = e1.compare(&t, &succ, &empty);
            let CmpOutcome::Proved(d) = out else {
                panic!("{t} must dominate its reduct {succ}, got {out:?}");
            };
            if checked.is_multiple_of(64) {
                e1.replay(&d).unwrap();
            }
            if checked.is_multiple_of(8) {
                let mut e2 = bench2.engine(Definition::Two);
                assert!(
                    matches!(e2.compare(&t, &succ, &empty), CmpOutcome::Proved(_)),
                    "extended form lost {t} > {succ}"
                );
            }
            checked += 1;
        }
    }
    checked
}

pub fn suite_left_variables_fail() -> usize {
    let sys = gen_system();
    let bench = Bench::over(gen_system(), Definition::One);
    let mut gen = TermGen::new(&sys, false);
    let mut r = rng(0x1EF7);
    let empty = BTreeSet::new();

    let total = 10_000;
    for i in 0..total {
        let t = gen.closed_term(&mut r, 8);
        let ty = if i % 3 == 0 { t.ty_in(&sys.sig) } else { sort_n() };
        let lhs = Term::var("x0", ty);
        let mut e = bench.engine(Definition::One);
        let out = e.compare(&lhs, &t, &empty);
        assert!(
            matches!(out, CmpOutcome::Failed),
            "a variable left side must fail outright against {t}, got {out:?}"
        );
    }
    total
}

pub fn suite_irreflexivity() -> usize {
    let sys = gen_system();
    let bench1 = Bench::over(gen_system(), Definition::One);
    let bench2 = Bench::over(gen_system(), Definition::Two);
    let mut gen = TermGen::new(&sys, true);
    let mut r = rng(0x14EF);
    let empty = BTreeSet::new();
    let mut salt = 0u64;

    let total = 10_000;
    for i in 0..total {
        let s = gen.closed_term(&mut r, 10);
        let rhs = if i % 4 == 0 { rename_binders(&s, &mut salt) } else { s.clone() };
        let (bench, def) = if i % 2 == 0 {
            (&bench1, Definition::One)
        } else {
            (&bench2, Definition::Two)
        };
        let mut e = bench.engine(def);
        let out = e.compare(&s, &rhs, &empty);
        assert!(
            matches!(out, CmpOutcome::Failed),
            "{s} compared above its own copy {rhs}: {out:?}"
        );
    }
    total
}

pub fn suite_bound_set_monotone() -> usize {
    let sys = gen_system();
    let bench = Bench::over(gen_system(), Definition::One);
    let mut gen = TermGen::new(&sys, true);
    let mut r = rng(0x0A0B);

    let total = 10_000;
    let mut premises = 0usize;
    for _ in 0..total {
        let (s, t) = ordered_candidates(&mut gen, &mut r);
        let narrow: BTreeSet<String> = BTreeSet::new();
        let mut e = bench.engine(Definition::One);
        if let CmpOutcome::Proved(_) = e.compare(&s, &t, &narrow) {
            premises += 1;
            let mut wide: BTreeSet<String> = t.free_vars().into_keys().collect();
            wide.insert("zz".to_string());
            let mut e2 = bench.engine(Definition::One);
            assert!(
                matches!(e2.compare(&s, &t, &wide), CmpOutcome::Proved(_)),
                "{s} > {t} held under the empty bound set but not under {wide:?}"
            );
        }
    }
    assert!(premises >= 1_000, "only {premises} provable pairs; generator too weak");
    total
}

pub fn suite_definition_two_subsumes_one() -> usize {
    let sys = gen_system();
    let bench1 = Bench::over(gen_system(), Definition::One);
    let bench2 = Bench::over(gen_system(), Definition::Two);
    let mut gen = TermGen::new(&sys, true);
    let mut r = rng(0xD2D1);
    let empty = BTreeSet::new();

    let total = 10_000;
    let mut premises = 0usize;
    for _ in 0..total {
        let (s, t) = ordered_candidates(&mut gen, &mut r);
        let mut e1 = bench1.engine(Definition::One);
        if let CmpOutcome::Proved(_) = e1.compare(&s, &t, &empty) {
            premises += 1;
            let mut e2 = bench2.engine(Definition::Two);
            assert!(
                matches!(e2.compare(&s, &t, &empty), CmpOutcome::Proved(_)),
                "basic form proved {s} > {t} but the extended form lost it"
            );
        }
    }
    assert!(premises >= 1_000, "only {premises} provable pairs; generator too weak");
    total
}

pub type Rel = fn(usize, usize) -> bool;

/// All multisets over `0..carrier` with at most `max` elements, as sorted
/// index vectors.
fn small_multisets(carrier: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..max {
        let mut next = out.clone();
        for m in &out {
            let lo = m.last().copied().unwrap_or(0);
            for e in lo..carrier {
                let mut bigger = m.clone();
                bigger.push(e);
                next.push(bigger);
            }
        }
        next.sort();
        next.dedup();
        out = next;
    }
    out
}

/// Reference multiset extension, by exhaustive search: assign every right
/// element either a distinct equivalent left partner or no partner, require
/// the partnered left elements to miss part of the left side, and require
/// every unpartnered right element to be dominated by an unpartnered left
/// one.
fn brute_multiset(l: &[usize], r: &[usize], eq: Rel, gt: Rel) -> bool {
    fn choose(
        l: &[usize],
        r: &[usize],
        j: usize,
        kept: &mut Vec<Option<usize>>,
        eq: Rel,
        gt: Rel,
    ) -> bool {
        if j == r.len() {
            let kept_set: Vec<usize> = kept.iter().flatten().copied().collect();
            if kept_set.len() == l.len() {
                return false;
            }
            return kept.iter().enumerate().all(|(j2, slot)| {
                slot.is_some()
                    || (0..l.len()).any(|i| !kept_set.contains(&i) && gt(l[i], r[j2]))
            });
        }
        for i in 0..l.len() {
            if kept.iter().flatten().all(|used| *used != i) && eq(l[i], r[j]) {
                kept[j] = Some(i);
                if choose(l, r, j + 1, kept, eq, gt) {
                    kept[j] = None;
                    return true;
                }
                kept[j] = None;
            }
        }
        kept[j] = None;
        choose(l, r, j + 1, kept, eq, gt)
    }

    let mut kept = vec![None; r.len()];
    choose(l, r, 0, &mut kept, eq, gt)
}

fn check_mul_witness(l: &[usize], r: &[usize], w: &MulWitness, eq: Rel, gt: Rel) {
    let mut left_kept = BTreeSet::new();
    let mut right_seen = BTreeSet::new();
    for (i, j) in &w.kept {
        assert!(eq(l[*i], r[*j]), "kept pair ({i},{j}) is not equivalent");
        assert!(left_kept.insert(*i), "left index {i} kept twice");
        assert!(right_seen.insert(*j), "right index {j} placed twice");
    }
    for (i, j) in &w.cover {
        assert!(gt(l[*i], r[*j]), "cover pair ({i},{j}) does not dominate");
        assert!(!left_kept.contains(i), "cover uses a kept left index {i}");
        assert!(right_seen.insert(*j), "right index {j} placed twice");
    }
    assert_eq!(right_seen.len(), r.len(), "some right element unplaced");
    assert!(left_kept.len() < l.len(), "no left element was removed");
}

pub fn suite_multiset_matches_brute_force() -> usize {
    let carriers: Vec<(&str, Rel, Rel)> = vec![
        ("total", |a, b| a == b, |a, b| a > b),
        ("diamond", |a, b| a == b, |a, b| {
            matches!((a, b), (1, 0) | (2, 0) | (3, 0) | (3, 1) | (3, 2))
        }),
        ("discrete", |a, b| a == b, |_, _| false),
        ("glued", |a, b| a.min(1) == b.min(1), |a, b| a.min(1) > b.min(1)),
    ];
    let sets = small_multisets(4, 4);
    let mut cases = 0usize;
    for (name, eq, gt) in carriers {
        for l in &sets {
            for r in &sets {
                cases += 1;
                let eqm: Vec<Vec<bool>> =
                    l.iter().map(|a| r.iter().map(|b| eq(*a, *b)).collect()).collect();
                let gtm: Vec<Vec<bool>> =
                    l.iter().map(|a| r.iter().map(|b| gt(*a, *b)).collect()).collect();
                let fast = multiset_ext_matrix(&eqm, &gtm);
                let slow = brute_multiset(l, r, eq, gt);
                assert_eq!(
                    fast.is_some(),
                    slow,
                    "{name}: {l:?} vs {r:?} disagree (fast {fast:?})"
                );
                if let Some(w) = &fast {
                    check_mul_witness(l, r, w, eq, gt);
                }
            }
        }
    }
    assert!(cases >= 10_000, "only {cases} multiset pairs examined");
    cases
}

fn random_type(r: &mut ChaCha8Rng, depth: usize) -> SimpleType {
    if depth == 0 || r.gen_range(0..3u8) == 0 {
        if r.gen_range(0..2u8) == 0 {
            sort_n()
        } else {
            sort_o()
        }
    } else {
        SimpleType::arrow(random_type(r, depth - 1), random_type(r, depth - 1))
    }
}

pub fn suite_polarity_partition() -> usize {
    let mut r = rng(0x905E);
    let total = 10_000;
    for _ in 0..total {
        let ty = random_type(&mut r, 5);
        let pos = polar_positions(&ty, Polarity::Positive).unwrap();
        let neg = polar_positions(&ty, Polarity::Negative).unwrap();
        assert!(pos.is_disjoint(&neg), "{ty} has a doubly-polar position");
        let all: BTreeSet<_> =
            sort_positions(&ty).unwrap().into_iter().map(|(p, _)| p).collect();
        let union: BTreeSet<_> = pos.union(&neg).cloned().collect();
        assert_eq!(union, all, "{ty} has an unclassified sort position");
        for p in &all {
            let crossings = p.iter().filter(|step| **step == 1).count();
            assert_eq!(
                crossings % 2 == 0,
                pos.contains(p),
                "{ty}: position {p:?} has the wrong polarity"
            );
        }
    }
    total
}

// Start-term builders for the random-walk check, one per corpus system that
// fully orients. Each returns a well-typed term of bounded size over that
// system's own signature and declared variables.

fn nat_arith_start(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let n = sort_n();
    if depth == 0 {
        return match r.gen_range(0..3u8) {
            0 => Term::var("x", n),
            1 => Term::var("y", n),
            _ => Term::fun("zero", vec![]),
        };
    }
    match r.gen_range(0..6u8) {
        0 => Term::var("x", n),
        1 => Term::fun("zero", vec![]),
        2 | 3 => Term::fun("S", vec![nat_arith_start(r, depth - 1)]),
        4 => Term::fun(
            "plus",
            vec![nat_arith_start(r, depth - 1), nat_arith_start(r, depth - 1)],
        ),
        _ => Term::fun(
            "times",
            vec![nat_arith_start(r, depth - 1), nat_arith_start(r, depth - 1)],
        ),
    }
}

fn map_elem(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let n = sort_n();
    if depth == 0 || r.gen_range(0..2u8) == 0 {
        return Term::var("x", n);
    }
    Term::app(map_fun(r, depth - 1), map_elem(r, depth - 1))
}

fn map_fun(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let n = sort_n();
    let nn = SimpleType::arrow(sort_n(), sort_n());
    match r.gen_range(0..4u8) {
        0 | 1 => Term::var("F", nn),
        2 => Term::abs("e", n.clone(), Term::var("e", n)),
        _ => {
            if depth == 0 {
                Term::var("F", nn)
            } else {
                Term::abs(
                    "e",
                    n.clone(),
                    Term::app(map_fun(r, depth - 1), Term::var("e", n)),
                )
            }
        }
    }
}

fn map_start(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let l = SimpleType::sort("L");
    if depth == 0 {
        return if r.gen_range(0..2u8) == 0 {
            Term::fun("nil", vec![])
        } else {
            Term::var("l", l)
        };
    }
    match r.gen_range(0..5u8) {
        0 => Term::fun("nil", vec![]),
        1 => Term::var("l", l),
        2 | 3 => {
            Term::fun("cons", vec![map_elem(r, depth - 1), map_start(r, depth - 1)])
        }
        _ => Term::fun("map", vec![map_fun(r, depth - 1), map_start(r, depth - 1)]),
    }
}

fn brouwer_ord(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let o = sort_o();
    if depth == 0 {
        return if r.gen_range(0..2u8) == 0 {
            Term::fun("zero", vec![])
        } else {
            Term::var("n", o)
        };
    }
    match r.gen_range(0..5u8) {
        0 => Term::fun("zero", vec![]),
        1 => Term::var("n", o),
        2 | 3 => Term::fun("S", vec![brouwer_ord(r, depth - 1)]),
        _ => Term::fun("lim", vec![brouwer_seq(r, depth - 1)]),
    }
}

fn brouwer_seq(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let no = SimpleType::arrow(sort_n(), sort_o());
    if depth == 0 || r.gen_range(0..2u8) == 0 {
        Term::var("F", no)
    } else {
        Term::abs("q", sort_n(), brouwer_ord(r, depth - 1))
    }
}

fn brouwer_start(r: &mut ChaCha8Rng, depth: usize) -> Term {
    let a = SimpleType::sort("A");
    let x_ty = SimpleType::arrow(sort_o(), SimpleType::arrow(a.clone(), a.clone()));
    let w_ty = SimpleType::arrow(
        SimpleType::arrow(sort_n(), sort_o()),
        SimpleType::arrow(SimpleType::arrow(sort_n(), a.clone()), a.clone()),
    );
    if depth == 0 {
        return Term::var("U", a);
    }
    match r.gen_range(0..5u8) {
        0 => Term::var("U", a),
        1 | 2 => Term::fun(
            "rec",
            vec![
                brouwer_ord(r, depth - 1),
                brouwer_start(r, depth - 1),
                Term::var("X", x_ty),
                Term::var("W", w_ty),
            ],
        ),
        3 => Term::app_spine(
            Term::var("X", x_ty),
            vec![brouwer_ord(r, depth - 1), brouwer_start(r, depth - 1)],
        ),
        _ => Term::app_spine(
            Term::var("W", w_ty),
            vec![
                brouwer_seq(r, depth - 1),
                Term::abs("q", sort_n(), brouwer_start(r, depth - 1)),
            ],
        ),
    }
}

/// A start-term builder for the named corpus system, if one exists.
pub fn start_builder(name: &str) -> Option<fn(&mut ChaCha8Rng, usize) -> Term> {
    match name {
        "nat_arith.cpo" => Some(nat_arith_start),
        "map.cpo" => Some(map_start),
        "brouwer.cpo" => Some(brouwer_start),
        _ => None,
    }
}

/// Runs `count` random reduction walks on the system, each from a start
/// term of size at most `max_size`, and panics if any walk fails to halt
/// within `cap` steps.
pub fn run_walks(
    sys: &RewriteSystem,
    build: fn(&mut ChaCha8Rng, usize) -> Term,
    seed: u64,
    count: usize,
    max_size: usize,
    cap: usize,
) -> usize {
    let mut gen_rng = rng(seed);
    let mut starts = Vec::new();
    let mut attempts = 0;
    while starts.len() < count {
        attempts += 1;
        assert!(attempts < count * 100, "start-term builder starved");
        let t = build(&mut gen_rng, 3);
        if t.size() <= max_size {
            starts.push(t);
        }
    }
    let mut walk_rng = rng(seed ^ 0x5EED);
    let mut longest = 0usize;
    for t in &starts {
        let mut pick = |k: usize| walk_rng.gen_range(0..k);
        match walk(sys, t, cap, &mut pick) {
            WalkOutcome::Halted { steps } => longest = longest.max(steps),
            WalkOutcome::Exceeded { .. } => {
                panic!("walk from {t} exceeded {cap} steps")
            }
        }
    }
    longest
}
