//! Derivation rendering, in two styles, and a reader for the second one.
//!
//! The `paper` style numbers subgoals in depth-first order, indents by depth,
//! and cites a subgoal already proved as `[same as N]` instead of repeating
//! its subtree.
//!
//! The `compact` style prints one fully expanded line per node:
//!
//! ```text
//! {dots}{tag} | {goal}{extras}
//! ```
//!
//! with one leading dot per tree level, the step tag (a case short name,
//! `refl`, `mul`, `lex`, or `acc`), the goal as displayed, and `key=value`
//! extras carrying whatever the goal text leaves out: generated binder names
//! and their types, multiset witness pairs, the lexicographic position, the
//! accessibility split term, and hidden bound-variable sets. That is enough
//! to rebuild the derivation, so [`parse_compact`] turns the text back into a
//! tree that the engine's replayer can check node by node.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::cpo::{CaseLabel, Derivation, Goal, StatusElemRel, Step};
use crate::parse::{fmt_arg_type, parse_term_with_env, parse_type_str};
use crate::prec::Status;
use crate::system::RewriteSystem;
use crate::term::{SimpleType, Term};

fn step_text(step: &Step) -> String {
    match step {
        Step::Case(label) => label.to_string(),
        Step::Refl => "identical up to renaming".to_string(),
        Step::MulExt { kept, cover } => {
            let mut s = "multiset".to_string();
            if !kept.is_empty() {
                s.push_str(&format!(": kept {}", fmt_pairs(kept)));
            }
            if !cover.is_empty() {
                s.push_str(if kept.is_empty() { ": " } else { "; " });
                s.push_str(&format!("cover {}", fmt_pairs(cover)));
            }
            s
        }
        Step::LexExt { pos } => format!("lexicographic at {pos}"),
        Step::AccOrd { v } => format!("accessible subterm {v}"),
    }
}

fn fmt_pairs(pairs: &[(usize, usize)]) -> String {
    pairs.iter().map(|(i, j)| format!("{i}:{j}")).collect::<Vec<_>>().join(", ")
}

fn fresh_suffix(d: &Derivation) -> String {
    let mut s = String::new();
    for (name, ty) in &d.fresh {
        write!(s, "; fresh {name}:{}", fmt_arg_type(ty)).unwrap();
    }
    s
}

/// Human-oriented rendering: numbered subgoals, two-space indentation, and
/// shared subtrees cited by number instead of repeated.
pub fn print_paper(root: &Rc<Derivation>) -> String {
    fn walk(
        d: &Rc<Derivation>,
        depth: usize,
        next: &mut usize,
        seen: &mut BTreeMap<*const Derivation, usize>,
        out: &mut String,
    ) {
        let indent = "  ".repeat(depth);
        if let Some(&n) = seen.get(&Rc::as_ptr(d)) {
            let here = *next;
            *next += 1;
            writeln!(out, "{indent}{here}. {}  [same as {n}]", d.goal).unwrap();
            return;
        }
        let here = *next;
        *next += 1;
        seen.insert(Rc::as_ptr(d), here);
        writeln!(
            out,
            "{indent}{here}. {}  [{}{}]",
            d.goal,
            step_text(&d.step),
            fresh_suffix(d)
        )
        .unwrap();
        for c in &d.children {
            walk(c, depth + 1, next, seen, out);
        }
    }
    let mut out = String::new();
    let mut next = 1;
    walk(root, 0, &mut next, &mut BTreeMap::new(), &mut out);
    out
}

fn tag_of(step: &Step) -> &'static str {
    match step {
        Step::Case(label) => label.short(),
        Step::Refl => "refl",
        Step::MulExt { .. } => "mul",
        Step::LexExt { .. } => "lex",
        Step::AccOrd { .. } => "acc",
    }
}

/// Machine-oriented rendering: every node on its own line, shared subtrees
/// expanded at each citation, extras carrying the replay data.
pub fn print_compact(root: &Rc<Derivation>) -> String {
    fn walk(d: &Rc<Derivation>, depth: usize, out: &mut String) {
        write!(out, "{}{} | {}", ".".repeat(depth), tag_of(&d.step), d.goal).unwrap();
        for (name, ty) in &d.fresh {
            write!(out, " fresh={name}:{}", fmt_arg_type(ty)).unwrap();
        }
        match &d.step {
            Step::MulExt { kept, cover } => {
                if !kept.is_empty() {
                    write!(out, " kept={}", pairs_compact(kept)).unwrap();
                }
                if !cover.is_empty() {
                    write!(out, " cover={}", pairs_compact(cover)).unwrap();
                }
            }
            Step::LexExt { pos } => write!(out, " pos={pos}").unwrap(),
            Step::AccOrd { v } => write!(out, " v={v}").unwrap(),
            _ => {}
        }
        if let Goal::Status { x, elem: StatusElemRel::TypedEmpty, .. } = &d.goal {
            if !x.is_empty() {
                let names: Vec<&str> = x.iter().map(String::as_str).collect();
                write!(out, " x={}", names.join(",")).unwrap();
            }
        }
        out.push('\n');
        for c in &d.children {
            walk(c, depth + 1, out);
        }
    }
    let mut out = String::new();
    walk(root, 0, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct CompactError {
    pub line: usize,
    pub msg: String,
}

fn cerr(line: usize, msg: impl Into<String>) -> CompactError {
    CompactError { line, msg: msg.into() }
}

fn from_short(tag: &str) -> Option<CaseLabel> {
    use CaseLabel::*;
    Some(match tag {
        "1a" => L1a,
        "1b" => L1b,
        "1c" => L1c,
        "1d" => L1d,
        "1e" => L1e,
        "1f" => L1f,
        "2a" => L2a,
        "2b" => L2b,
        "2c" => L2c,
        "2d" => L2d,
        "2e" => L2e,
        "3a" => L3a,
        "3b" => L3b,
        "3c" => L3c,
        "3d" => L3d,
        "3e" => L3e,
        _ => return None,
    })
}

const MARKERS: [&str; 6] = [" fresh=", " kept=", " cover=", " pos=", " v=", " x="];

/// Splits a line's content into the goal text and its extras. Markers cannot
/// occur inside goal text: `=` only ever follows `>` there.
fn split_extras(content: &str) -> (String, Vec<(String, String)>) {
    let mut cuts: Vec<(usize, &str)> = Vec::new();
    for m in MARKERS {
        let mut from = 0;
        while let Some(at) = content[from..].find(m) {
            cuts.push((from + at, m));
            from += at + m.len();
        }
    }
    cuts.sort();
    let goal = match cuts.first() {
        Some(&(at, _)) => content[..at].to_string(),
        None => content.to_string(),
    };
    let mut extras = Vec::new();
    for (i, &(at, m)) in cuts.iter().enumerate() {
        let start = at + m.len();
        let end = cuts.get(i + 1).map_or(content.len(), |&(next, _)| next);
        let key = m.trim_start_matches(' ').trim_end_matches('=');
        extras.push((key.to_string(), content[start..end].to_string()));
    }
    (goal.trim_end().to_string(), extras)
}

fn parse_pairs(src: &str, line: usize) -> Result<Vec<(usize, usize)>, CompactError> {
    src.split(',')
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| cerr(line, format!("bad index pair {pair:?}")))?;
            Ok((
                a.parse().map_err(|_| cerr(line, format!("bad index {a:?}")))?,
                b.parse().map_err(|_| cerr(line, format!("bad index {b:?}")))?,
            ))
        })
        .collect()
}

fn parse_var_set(src: &str) -> BTreeSet<String> {
    src.split(", ")
        .flat_map(|s| s.split(','))
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

struct GoalReader<'a> {
    sys: &'a RewriteSystem,
    env: &'a BTreeMap<String, SimpleType>,
    line: usize,
}

impl<'a> GoalReader<'a> {
    fn term(&self, src: &str) -> Result<Term, CompactError> {
        parse_term_with_env(src.trim(), &self.sys.sig, self.env, true)
            .map_err(|e| cerr(self.line, format!("in term {src:?}: {e}")))
    }

    fn term_list(&self, src: &str) -> Result<Vec<Term>, CompactError> {
        let mut items = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b',' if depth == 0 => {
                    items.push(&src[start..i]);
                    start = i + 1;
                }
                _ => {}
            }
            i += 1;
        }
        items.push(&src[start..]);
        items
            .into_iter()
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.term(s))
            .collect()
    }

    fn braced<'s>(&self, src: &'s str) -> Result<(&'s str, &'s str), CompactError> {
        let inner = src
            .strip_prefix('{')
            .ok_or_else(|| cerr(self.line, format!("expected {{ in {src:?}")))?;
        let close = inner
            .find('}')
            .ok_or_else(|| cerr(self.line, format!("unclosed {{ in {src:?}")))?;
        Ok((&inner[..close], &inner[close + 1..]))
    }

    fn read(&self, text: &str, x_extra: Option<&str>) -> Result<Goal, CompactError> {
        if text.contains(")mul {") || text.contains(")lex {") {
            return self.read_status(text, x_extra);
        }
        for (marker, typed) in [(" >=typed", true), (" >=", false)] {
            if let Some(at) = text.find(marker) {
                let s = self.term(&text[..at])?;
                let rest = &text[at + marker.len()..];
                let (x, t_src) = self.optional_set(rest)?;
                return Ok(Goal::Ge { s, t: self.term(t_src)?, x, typed });
            }
        }
        if let Some(at) = text.find(" >acc") {
            let u = self.term(&text[..at])?;
            let rest = &text[at + " >acc".len()..];
            let (x, t_src) = self.optional_set(rest)?;
            // the enclosing left side is attached by the tree builder
            return Ok(Goal::Acc { s: u.clone(), u, t: self.term(t_src)?, x });
        }
        if let Some(at) = text.find(" >") {
            let s = self.term(&text[..at])?;
            let rest = &text[at + 2..];
            let (x, t_src) = self.optional_set(rest)?;
            return Ok(Goal::Cmp { s, t: self.term(t_src)?, x });
        }
        Err(cerr(self.line, format!("unrecognized goal {text:?}")))
    }

    fn optional_set<'s>(&self, rest: &'s str) -> Result<(BTreeSet<String>, &'s str), CompactError> {
        if rest.starts_with('{') {
            let (set, after) = self.braced(rest)?;
            Ok((parse_var_set(set), after))
        } else {
            Ok((BTreeSet::new(), rest))
        }
    }

    fn read_status(&self, text: &str, x_extra: Option<&str>) -> Result<Goal, CompactError> {
        let (left_src, rest) = self.braced(text)?;
        let rest = rest
            .strip_prefix(" (")
            .ok_or_else(|| cerr(self.line, format!("expected ( after left tuple in {text:?}")))?;
        let close = rest
            .find(')')
            .ok_or_else(|| cerr(self.line, format!("unclosed ( in {text:?}")))?;
        let rel = &rest[..close];
        let rest = &rest[close + 1..];
        let (status, rest) = if let Some(r) = rest.strip_prefix("mul ") {
            (Status::Mul, r)
        } else if let Some(r) = rest.strip_prefix("lex ") {
            (Status::Lex, r)
        } else {
            return Err(cerr(self.line, format!("expected mul or lex in {text:?}")));
        };
        let (right_src, _) = self.braced(rest)?;

        let (elem, x) = if let Some(after) = rel.strip_prefix(">typed U >acc") {
            let x = after.strip_prefix('{').map_or_else(BTreeSet::new, |inner| {
                parse_var_set(inner.trim_end_matches('}'))
            });
            (StatusElemRel::TypedOrAcc, x)
        } else if let Some(after) = rel.strip_prefix(">typed{") {
            (StatusElemRel::TypedX, parse_var_set(after.trim_end_matches('}')))
        } else if rel == ">typed" {
            let x = x_extra.map(parse_var_set).unwrap_or_default();
            (StatusElemRel::TypedEmpty, x)
        } else {
            return Err(cerr(self.line, format!("unknown element relation {rel:?}")));
        };
        Ok(Goal::Status {
            left: self.term_list(left_src)?,
            right: self.term_list(right_src)?,
            x,
            status,
            elem,
        })
    }
}

struct PNode {
    goal: Goal,
    step: Step,
    fresh: Vec<(String, SimpleType)>,
    children: Vec<PNode>,
}

fn to_rc(n: PNode) -> Rc<Derivation> {
    Rc::new(Derivation {
        goal: n.goal,
        step: n.step,
        children: n.children.into_iter().map(to_rc).collect(),
        fresh: n.fresh,
    })
}

/// Reads a compact rendering back into a derivation tree. The result has no
/// shared subtrees (citations were printed expanded), which leaves replay
/// verdicts unchanged.
pub fn parse_compact(
    text: &str,
    sys: &RewriteSystem,
) -> Result<Rc<Derivation>, CompactError> {
    let mut stack: Vec<(PNode, BTreeMap<String, SimpleType>)> = Vec::new();
    let mut root: Option<PNode> = None;

    fn reduce_to(
        depth: usize,
        stack: &mut Vec<(PNode, BTreeMap<String, SimpleType>)>,
        root: &mut Option<PNode>,
        line: usize,
    ) -> Result<(), CompactError> {
        while stack.len() > depth {
            let (done, _) = stack.pop().unwrap();
            match stack.last_mut() {
                Some((parent, _)) => parent.children.push(done),
                None => {
                    if root.is_some() {
                        return Err(cerr(line, "more than one root"));
                    }
                    *root = Some(done);
                }
            }
        }
        Ok(())
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let depth = raw.len() - raw.trim_start_matches('.').len();
        let rest = &raw[depth..];
        let (tag, content) = rest
            .split_once(" | ")
            .ok_or_else(|| cerr(line, "expected `tag | goal`"))?;
        reduce_to(depth, &mut stack, &mut root, line)?;
        if stack.len() != depth {
            return Err(cerr(line, format!("line at depth {depth} has no parent")));
        }
        if depth == 0 && root.is_some() {
            return Err(cerr(line, "more than one root"));
        }

        let env = match stack.last() {
            Some((_, env)) => env.clone(),
            None => sys.vars.clone(),
        };
        let (goal_text, extras) = split_extras(content);
        let extra = |key: &str| -> Option<&str> {
            extras.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
        };

        let reader = GoalReader { sys, env: &env, line };
        let mut goal = reader.read(&goal_text, extra("x"))?;

        if let Goal::Acc { s, .. } = &mut goal {
            let enclosing = stack
                .iter()
                .rev()
                .find_map(|(n, _)| match &n.goal {
                    Goal::Cmp { s, .. } => Some(s.clone()),
                    _ => None,
                })
                .ok_or_else(|| {
                    cerr(line, "accessibility goal outside any comparison")
                })?;
            *s = enclosing;
        }

        let step = match tag {
            "refl" => Step::Refl,
            "mul" => Step::MulExt {
                kept: parse_pairs(extra("kept").unwrap_or(""), line)?,
                cover: parse_pairs(extra("cover").unwrap_or(""), line)?,
            },
            "lex" => Step::LexExt {
                pos: extra("pos")
                    .and_then(|p| p.trim().parse().ok())
                    .ok_or_else(|| cerr(line, "lex node needs pos="))?,
            },
            "acc" => Step::AccOrd {
                v: reader
                    .term(extra("v").ok_or_else(|| cerr(line, "acc node needs v="))?)?,
            },
            short => Step::Case(
                from_short(short)
                    .ok_or_else(|| cerr(line, format!("unknown step tag {short:?}")))?,
            ),
        };

        let mut fresh = Vec::new();
        for (k, v) in &extras {
            if k == "fresh" {
                let (name, ty_src) = v
                    .split_once(':')
                    .ok_or_else(|| cerr(line, format!("bad fresh binding {v:?}")))?;
                let ty = parse_type_str(ty_src.trim())
                    .map_err(|e| cerr(line, format!("in fresh type {ty_src:?}: {e}")))?;
                fresh.push((name.trim().to_string(), ty));
            }
        }

        let mut child_env = env;
        for (name, ty) in &fresh {
            child_env.insert(name.clone(), ty.clone());
        }
        stack.push((PNode { goal, step, fresh, children: Vec::new() }, child_env));
    }
    reduce_to(0, &mut stack, &mut root, text.lines().count())?;
    let root = root.ok_or_else(|| cerr(1, "empty trace"))?;
    Ok(to_rc(root))
}

fn pairs_compact(pairs: &[(usize, usize)]) -> String {
    pairs.iter().map(|(i, j)| format!("{i}:{j}")).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cpo::{CmpOutcome, Definition, Engine, EngineConfig};
    use crate::parse::parse_problem;
    use crate::system::{build_parameters, prepare, RewriteSystem};
    use crate::typeorder::TypeOrderConfig;

    fn orient_first_rule(
        sys: &RewriteSystem,
        definition: Definition,
    ) -> (Rc<Derivation>, crate::system::Prepared) {
        let prepared = prepare(sys, definition, TypeOrderConfig::default()).unwrap();
        let (prec, statuses) = build_parameters(sys).unwrap();
        let cfg = EngineConfig { definition, ..EngineConfig::default() };
        let mut engine = Engine::new(
            &sys.sig,
            &prepared.order,
            &prec,
            &statuses,
            prepared.acc.as_ref(),
            cfg,
        );
        let rule = &sys.rules[0];
        let CmpOutcome::Proved(d) = engine.orient(&rule.lhs, &rule.rhs) else {
            panic!("rule {} orients", rule.name);
        };
        (d, prepared)
    }

    fn replay_ok(
        sys: &RewriteSystem,
        prepared: &crate::system::Prepared,
        definition: Definition,
        d: &Rc<Derivation>,
    ) -> Result<(), crate::cpo::ReplayError> {
        let (prec, statuses) = build_parameters(sys).unwrap();
        let cfg = EngineConfig { definition, ..EngineConfig::default() };
        let engine = Engine::new(
            &sys.sig,
            &prepared.order,
            &prec,
            &statuses,
            prepared.acc.as_ref(),
            cfg,
        );
        engine.replay(d)
    }

    const PLUS: &str = "\
sort N;
fun zero : N;
fun S : N -> N;
fun plus : N * N -> N;
prec plus > S;
rule plus(S(x), y) -> S(plus(x, y));
var x : N;
var y : N;
";

    fn plus_sys() -> RewriteSystem {
        let src = {
            // vars must be declared before use; reorder the sample
            let mut lines: Vec<&str> = PLUS.lines().collect();
            let rule = lines.remove(5);
            lines.push(rule);
            lines.join("\n")
        };
        parse_problem(&src).unwrap()
    }

    const BROUWER: &str = "\
sort N;
sort O;
sort A;
typeorder O >= N;
fun zero : O;
fun S : O -> O;
fun lim : (N -> O) -> O;
fun rec : O * A * (O -> A -> A) * ((N -> O) -> (N -> A) -> A) -> A;
var n : O;
var U : A;
var X : O -> A -> A;
var W : (N -> O) -> (N -> A) -> A;
var F : N -> O;
rule rec(lim(F), U, X, W) -> @(W, F, \\m:N. rec(@(F, m), U, X, W));
";

    #[test]
    fn paper_style_numbers_and_cites_shared_subgoals() {
        let sys = plus_sys();
        let (d, _) = orient_first_rule(&sys, Definition::One);
        let text = print_paper(&d);
        assert!(text.starts_with("1. plus(S(x), y) > S(plus(x, y))  [Case 1(c) funprec]"));
        assert!(text.contains("[same as "), "{text}");
        assert!(text.contains("[multiset"), "{text}");
        let second = text.lines().nth(1).unwrap();
        assert!(second.starts_with("  2. "), "{second:?}");
    }

    #[test]
    fn compact_style_round_trips_through_replay() {
        let sys = parse_problem(BROUWER).unwrap();
        let (d, prepared) = orient_first_rule(&sys, Definition::Two);
        let text = print_compact(&d);
        assert!(text.contains("fresh=m':N"), "{text}");
        assert!(text.contains(" v="), "{text}");
        let rebuilt = parse_compact(&text, &sys).unwrap();
        replay_ok(&sys, &prepared, Definition::Two, &rebuilt).unwrap();
        assert_eq!(print_compact(&rebuilt), text);
    }

    #[test]
    fn hidden_bound_sets_survive_the_round_trip() {
        let src = "\
sort N;
fun c : N;
fun g : N -> N;
fun p : N * N -> N;
fun q : (N -> N) -> N;
prec p > q;
prec q > g;
prec g > c;
rule p(g(c), c) -> q(\\y:N. p(c, c));
";
        let sys = parse_problem(src).unwrap();
        let (d, prepared) = orient_first_rule(&sys, Definition::One);
        let text = print_compact(&d);
        assert!(text.contains(" x=y'"), "a nested tuple goal hides its bound set: {text}");
        let rebuilt = parse_compact(&text, &sys).unwrap();
        replay_ok(&sys, &prepared, Definition::One, &rebuilt).unwrap();
        assert_eq!(print_compact(&rebuilt), text);
    }

    #[test]
    fn tampered_compact_text_fails_replay() {
        let sys = plus_sys();
        let (d, prepared) = orient_first_rule(&sys, Definition::One);
        let text = print_compact(&d);
        let tampered = text.replacen("1c |", "1e |", 1);
        let rebuilt = parse_compact(&tampered, &sys).unwrap();
        assert!(replay_ok(&sys, &prepared, Definition::One, &rebuilt).is_err());
    }

    #[test]
    fn case_tags_round_trip() {
        use CaseLabel::*;
        for label in [
            L1a, L1b, L1c, L1d, L1e, L1f, L2a, L2b, L2c, L2d, L2e, L3a, L3b, L3c, L3d,
            L3e,
        ] {
            assert_eq!(from_short(label.short()), Some(label));
        }
        assert_eq!(from_short("9z"), None);
    }

    #[test]
    fn malformed_compact_lines_are_diagnosed() {
        let sys = plus_sys();
        assert!(parse_compact("", &sys).is_err());
        assert!(parse_compact("nonsense", &sys).is_err());
        let err = parse_compact("..1a | x > y", &sys).unwrap_err();
        assert!(err.msg.contains("no parent"), "{err}");
    }
}
