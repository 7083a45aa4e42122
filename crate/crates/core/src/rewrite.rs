//! Beta and permutative reduction, permutative normal forms, head reduction.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::name::Name;
use crate::term::{alpha_eq_up_to_names, app, canonical_key, cbv, choice, lam, nu, substitute, Path, Term};

/// Which calculus the term lives in. `Braces` admits `{t} u` and drops the
/// garbage-collection rule for unused generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Pe,
    Braces,
}

impl Mode {
    /// The smallest mode accepting `t`.
    pub fn for_term(t: &Term) -> Mode {
        if t.contains_cbv() {
            Mode::Braces
        } else {
            Mode::Pe
        }
    }

    pub fn check(self, t: &Term) -> Result<()> {
        if self == Mode::Pe && t.contains_cbv() {
            return Err(Error::ModeViolation(format!("CbV application in `{t}`")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Beta,
    Idem,
    C1,
    C2,
    PlusLam,
    PlusF,
    PlusA,
    PlusPlus1,
    PlusPlus2,
    PlusNu,
    NotNu,
    NuLam,
    NuF,
    BracesNu,
    BracesPlus1,
    BracesPlus2,
}

impl Rule {
    pub const ALL: [Rule; 16] = [
        Rule::Beta,
        Rule::Idem,
        Rule::C1,
        Rule::C2,
        Rule::PlusLam,
        Rule::PlusF,
        Rule::PlusA,
        Rule::PlusPlus1,
        Rule::PlusPlus2,
        Rule::PlusNu,
        Rule::NotNu,
        Rule::NuLam,
        Rule::NuF,
        Rule::BracesNu,
        Rule::BracesPlus1,
        Rule::BracesPlus2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Rule::Beta => "beta",
            Rule::Idem => "i",
            Rule::C1 => "c1",
            Rule::C2 => "c2",
            Rule::PlusLam => "plus_lam",
            Rule::PlusF => "plus_f",
            Rule::PlusA => "plus_a",
            Rule::PlusPlus1 => "plus_plus1",
            Rule::PlusPlus2 => "plus_plus2",
            Rule::PlusNu => "plus_nu",
            Rule::NotNu => "not_nu",
            Rule::NuLam => "nu_lam",
            Rule::NuF => "nu_f",
            Rule::BracesNu => "braces_nu",
            Rule::BracesPlus1 => "braces_plus1",
            Rule::BracesPlus2 => "braces_plus2",
        }
    }

    pub fn from_tag(s: &str) -> Option<Rule> {
        Rule::ALL.into_iter().find(|r| r.tag() == s)
    }

    pub fn is_permutative(self) -> bool {
        self != Rule::Beta
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: Rule,
    pub path: Path,
    pub before: Term,
    pub after: Term,
}

pub fn fmt_path(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|k| k.to_string()).collect();
    format!("[{}]", parts.join(","))
}

impl ReductionStep {
    fn new(rule: Rule, path: Path, before: &Term, reduct: Term) -> Self {
        let after = before.replace_at(&path, reduct);
        ReductionStep { rule, path, before: before.clone(), after }
    }

    /// The contractum, i.e. the subterm of `after` at `path`.
    pub fn reduct(&self) -> &Term {
        self.after.subterm(&self.path).expect("step path valid in result")
    }

    pub fn redex(&self) -> &Term {
        self.before.subterm(&self.path).expect("step path valid")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.tag(),
            "path": self.path,
            "before": self.before.to_string(),
            "after": self.after.to_string(),
        })
    }
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {} : {} ~> {}", self.rule, fmt_path(&self.path), self.before, self.after)
    }
}

/// Position of a choice label in the permutation order. Free names come
/// first (by creation order), then bound names by binder depth.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Free(Name),
    Bound(usize),
}

fn key(a: Name, scope: &[Name]) -> Key {
    match scope.iter().rposition(|b| *b == a) {
        Some(d) => Key::Bound(d),
        None => Key::Free(a),
    }
}

fn less(a: Name, i: u32, b: Name, j: u32, scope: &[Name]) -> bool {
    (key(a, scope), i) < (key(b, scope), j)
}

/// Rules whose redex is exactly `t`, in a fixed order (beta first).
pub(crate) fn root_redexes(t: &Term, scope: &[Name], mode: Mode, perm_only: bool) -> Vec<(Rule, Term)> {
    let mut out = Vec::new();
    match t {
        Term::App(f, u) => {
            if let (false, Term::Lam(x, body)) = (perm_only, &**f) {
                out.push((Rule::Beta, substitute(body, *x, u)));
            }
            if let Term::Choice(l, r, a, i) = &**f {
                out.push((
                    Rule::PlusF,
                    choice(app((**l).clone(), (**u).clone()), app((**r).clone(), (**u).clone()), *a, *i),
                ));
            }
            if let Term::Choice(l, r, a, i) = &**u {
                out.push((
                    Rule::PlusA,
                    choice(app((**f).clone(), (**l).clone()), app((**f).clone(), (**r).clone()), *a, *i),
                ));
            }
            if let Term::Nu(a, body) = &**f {
                let (a2, body2) = if u.has_free_name(*a) {
                    let a2 = a.fresh();
                    (a2, body.rename_name(*a, a2))
                } else {
                    (*a, (**body).clone())
                };
                out.push((Rule::NuF, nu(a2, app(body2, (**u).clone()))));
            }
        }
        Term::Choice(l, r, a, i) => {
            if alpha_eq_up_to_names(l, r) {
                out.push((Rule::Idem, (**l).clone()));
            }
            if let Term::Choice(t1, _, b, j) = &**l {
                if b == a && j == i {
                    out.push((Rule::C1, choice((**t1).clone(), (**r).clone(), *a, *i)));
                }
            }
            if let Term::Choice(_, v, b, j) = &**r {
                if b == a && j == i {
                    out.push((Rule::C2, choice((**l).clone(), (**v).clone(), *a, *i)));
                }
            }
            // (t +c.k u) +a.i v  with (c,k) < (a,i)
            if let Term::Choice(t1, u1, c, k) = &**l {
                if less(*c, *k, *a, *i, scope) {
                    let v = (**r).clone();
                    out.push((
                        Rule::PlusPlus1,
                        choice(choice((**t1).clone(), v.clone(), *a, *i), choice((**u1).clone(), v, *a, *i), *c, *k),
                    ));
                }
            }
            // t +a.i (u +c.k v)  with (c,k) < (a,i)
            if let Term::Choice(u1, v1, c, k) = &**r {
                if less(*c, *k, *a, *i, scope) {
                    let t1 = (**l).clone();
                    out.push((
                        Rule::PlusPlus2,
                        choice(choice(t1.clone(), (**u1).clone(), *a, *i), choice(t1, (**v1).clone(), *a, *i), *c, *k),
                    ));
                }
            }
        }
        Term::Lam(x, body) => match &**body {
            Term::Choice(l, r, a, i) => {
                out.push((Rule::PlusLam, choice(lam(*x, (**l).clone()), lam(*x, (**r).clone()), *a, *i)));
            }
            Term::Nu(a, inner) => out.push((Rule::NuLam, nu(*a, lam(*x, (**inner).clone())))),
            _ => {}
        },
        Term::Nu(b, body) => {
            if let Term::Choice(l, r, a, i) = &**body {
                if a != b {
                    out.push((Rule::PlusNu, choice(nu(*b, (**l).clone()), nu(*b, (**r).clone()), *a, *i)));
                }
            }
            if mode == Mode::Pe && !body.has_free_name(*b) {
                out.push((Rule::NotNu, (**body).clone()));
            }
        }
        Term::CbvApp(f, u) if mode == Mode::Braces => {
            if let Term::Choice(l, r, a, i) = &**f {
                out.push((
                    Rule::BracesPlus1,
                    choice(cbv((**l).clone(), (**u).clone()), cbv((**r).clone(), (**u).clone()), *a, *i),
                ));
            }
            if let Term::Choice(l, r, a, i) = &**u {
                out.push((
                    Rule::BracesPlus2,
                    choice(cbv((**f).clone(), (**l).clone()), cbv((**f).clone(), (**r).clone()), *a, *i),
                ));
            }
            if let Term::Nu(a, body) = &**u {
                let (a2, body2) = if f.has_free_name(*a) {
                    let a2 = a.fresh();
                    (a2, body.rename_name(*a, a2))
                } else {
                    (*a, (**body).clone())
                };
                out.push((Rule::BracesNu, nu(a2, app((**f).clone(), body2))));
            }
        }
        _ => {}
    }
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Filter {
    All,
    Perm,
    Beta,
}

/// Preorder walk collecting redexes; stops after the first when `first` is set.
fn collect(
    t: &Term,
    path: &mut Path,
    scope: &mut Vec<Name>,
    mode: Mode,
    filter: Filter,
    first: bool,
    out: &mut Vec<(Rule, Path, Term)>,
) {
    let here: Vec<(Rule, Term)> = match filter {
        Filter::Beta => match t {
            Term::App(f, u) => match &**f {
                Term::Lam(x, body) => vec![(Rule::Beta, substitute(body, *x, u))],
                _ => vec![],
            },
            _ => vec![],
        },
        Filter::Perm => root_redexes(t, scope, mode, true),
        Filter::All => root_redexes(t, scope, mode, false),
    };
    for (r, u) in here {
        out.push((r, path.clone(), u));
        if first {
            return;
        }
    }
    let bound = match t {
        Term::Nu(a, _) => Some(*a),
        _ => None,
    };
    if let Some(a) = bound {
        scope.push(a);
    }
    for k in 0..2 {
        let Some(c) = t.child(k) else { break };
        path.push(k);
        collect(c, path, scope, mode, filter, first, out);
        path.pop();
        if first && !out.is_empty() {
            break;
        }
    }
    if bound.is_some() {
        scope.pop();
    }
}

fn find(t: &Term, mode: Mode, filter: Filter, first: bool) -> Vec<(Rule, Path, Term)> {
    let mut out = Vec::new();
    collect(t, &mut Vec::new(), &mut Vec::new(), mode, filter, first, &mut out);
    out
}

/// Every one-step redex of full reduction, outermost-leftmost first.
pub fn step(t: &Term, mode: Mode) -> Result<Vec<ReductionStep>> {
    mode.check(t)?;
    Ok(find(t, mode, Filter::All, false).into_iter().map(|(r, p, u)| ReductionStep::new(r, p, t, u)).collect())
}

/// All permutative redexes as `(rule, path, contractum)`.
pub fn permutative_redexes(t: &Term, mode: Mode) -> Vec<(Rule, Path, Term)> {
    find(t, mode, Filter::Perm, false)
}

pub fn is_pnf(t: &Term, mode: Mode) -> bool {
    find(t, mode, Filter::Perm, true).is_empty()
}

pub const DEFAULT_STEP_CAP: usize = 1_000_000;

/// Permutative normal form with the full trace, outermost-leftmost strategy.
pub fn pnf(t: &Term, mode: Mode) -> Result<(Term, Vec<ReductionStep>)> {
    pnf_with_cap(t, mode, DEFAULT_STEP_CAP)
}

pub fn pnf_with_cap(t: &Term, mode: Mode, cap: usize) -> Result<(Term, Vec<ReductionStep>)> {
    mode.check(t)?;
    let mut cur = t.clone();
    let mut trace = Vec::new();
    while let Some((r, p, u)) = find(&cur, mode, Filter::Perm, true).pop() {
        if trace.len() >= cap {
            return Err(Error::Fuel(format!("permutative step cap {cap} exceeded")));
        }
        let s = ReductionStep::new(r, p, &cur, u);
        cur = s.after.clone();
        trace.push(s);
    }
    Ok((cur, trace))
}

/// Permutative normal form without a trace, normalizing bottom-up.
pub fn pnf_fast(t: &Term, mode: Mode) -> Result<Term> {
    mode.check(t)?;
    let mut budget = DEFAULT_STEP_CAP;
    norm(t, &mut Vec::new(), mode, &mut budget)
}

/// Permutative normal form contracting a uniformly chosen redex at each step.
pub fn pnf_random<R: Rng>(t: &Term, mode: Mode, rng: &mut R, cap: usize) -> Result<Term> {
    mode.check(t)?;
    let mut cur = t.clone();
    for _ in 0..=cap {
        let mut redexes = permutative_redexes(&cur, mode);
        if redexes.is_empty() {
            return Ok(cur);
        }
        let (_, path, u) = redexes.swap_remove(rng.random_range(0..redexes.len()));
        cur = cur.replace_at(&path, u);
    }
    Err(Error::Fuel(format!("permutative step cap {cap} exceeded")))
}

/// Whether `l` and `r` have a common full-reduction reduct (up to bound
/// names). Both sides are first normalized with `fuel` steps of the full
/// strategy; failing that, each side explores at most `fuel` terms breadth-first.
pub fn joinable(l: &Term, r: &Term, mode: Mode, fuel: usize) -> Result<bool> {
    let (a, b) = (reduce(l, mode, Strategy::Full, fuel)?, reduce(r, mode, Strategy::Full, fuel)?);
    if !a.exhausted && !b.exhausted {
        return Ok(alpha_eq_up_to_names(&a.term, &b.term));
    }
    let mut seen = [HashSet::new(), HashSet::new()];
    let mut queues = [VecDeque::from([l.clone()]), VecDeque::from([r.clone()])];
    for (k, t) in [l, r].into_iter().enumerate() {
        seen[k].insert(canonical_key(t, true));
    }
    if seen[0].contains(&canonical_key(r, true)) {
        return Ok(true);
    }
    let mut visited = 0;
    while visited < fuel && queues.iter().any(|q| !q.is_empty()) {
        for k in 0..2 {
            let Some(t) = queues[k].pop_front() else { continue };
            visited += 1;
            for s in step(&t, mode)? {
                let key = canonical_key(&s.after, true);
                if seen[1 - k].contains(&key) {
                    return Ok(true);
                }
                if seen[k].insert(key) {
                    queues[k].push_back(s.after);
                }
            }
        }
    }
    Ok(false)
}

fn norm(t: &Term, scope: &mut Vec<Name>, mode: Mode, budget: &mut usize) -> Result<Term> {
    use std::sync::Arc;
    let mut go =
        |c: &Arc<Term>, scope: &mut Vec<Name>| -> Result<Arc<Term>> { Ok(Arc::new(norm(c, scope, mode, budget)?)) };
    let t1 = match t {
        Term::Var(_) | Term::Const => return Ok(t.clone()),
        Term::Lam(x, b) => Term::Lam(*x, go(b, scope)?),
        Term::Nu(a, b) => {
            scope.push(*a);
            let b = go(b, scope);
            scope.pop();
            Term::Nu(*a, b?)
        }
        Term::App(f, u) => Term::App(go(f, scope)?, go(u, scope)?),
        Term::CbvApp(f, u) => Term::CbvApp(go(f, scope)?, go(u, scope)?),
        Term::Choice(l, r, a, i) => Term::Choice(go(l, scope)?, go(r, scope)?, *a, *i),
    };
    match root_redexes(&t1, scope, mode, true).into_iter().next() {
        Some((_, r)) => {
            if *budget == 0 {
                return Err(Error::Fuel("permutative step cap exceeded".into()));
            }
            *budget -= 1;
            norm(&r, scope, mode, budget)
        }
        None => Ok(t1),
    }
}

/// A PNF that does not start with a generator.
pub fn is_pseudo_value(t: &Term) -> bool {
    !matches!(t, Term::Nu(..) | Term::Choice(..))
}

/// The head beta step of a permutative normal form, if any: descend the
/// randomized context, then the head context of the first leaf that has one.
pub(crate) fn head_redex_in_pnf(t: &Term, mode: Mode) -> Option<(Path, Term)> {
    let mut path = Vec::new();
    r_descend(t, &mut path, mode).map(|u| (path, u))
}

fn r_descend(t: &Term, path: &mut Path, mode: Mode) -> Option<Term> {
    match t {
        Term::Nu(_, b) => {
            path.push(0);
            let r = r_descend(b, path, mode);
            if r.is_none() {
                path.pop();
            }
            r
        }
        Term::Choice(l, r, _, _) => {
            for (k, c) in [(0, l), (1, r)] {
                path.push(k);
                if let Some(u) = r_descend(c, path, mode) {
                    return Some(u);
                }
                path.pop();
            }
            None
        }
        _ => h_descend(t, path, mode),
    }
}

fn h_descend(t: &Term, path: &mut Path, mode: Mode) -> Option<Term> {
    let k = match t {
        Term::Lam(_, b) => {
            path.push(0);
            let r = h_descend(b, path, mode);
            if r.is_none() {
                path.pop();
            }
            return r;
        }
        Term::App(f, u) => {
            if let Term::Lam(x, body) = &**f {
                return Some(substitute(body, *x, u));
            }
            0
        }
        Term::CbvApp(_, u) if mode == Mode::Braces => {
            path.push(1);
            if let Some(r) = r_descend(u, path, mode) {
                return Some(r);
            }
            // the argument must be fully normal before the application is stuck
            if let Some((_, p, r)) = find(u, mode, Filter::All, true).pop() {
                path.extend(p);
                return Some(r);
            }
            path.pop();
            return None;
        }
        _ => return None,
    };
    path.push(k);
    let r = h_descend(t.child(k).unwrap(), path, mode);
    if r.is_none() {
        path.pop();
    }
    r
}

/// A pseudo-value in head normal form.
pub fn is_hnv(t: &Term, mode: Mode) -> bool {
    is_pseudo_value(t) && is_pnf(t, mode) && h_descend(t, &mut Vec::new(), mode).is_none()
}

/// One head step: the first permutative redex if there is one, else the head beta step.
pub fn head_step(t: &Term, mode: Mode) -> Result<Option<ReductionStep>> {
    mode.check(t)?;
    if let Some((r, p, u)) = find(t, mode, Filter::Perm, true).pop() {
        return Ok(Some(ReductionStep::new(r, p, t, u)));
    }
    Ok(head_redex_in_pnf(t, mode).map(|(p, u)| ReductionStep::new(Rule::Beta, p, t, u)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Head,
    /// Outermost-leftmost, permutative redexes before beta redexes.
    Full,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub term: Term,
    pub trace: Vec<ReductionStep>,
    /// Fuel ran out while a further step was available.
    pub exhausted: bool,
}

pub fn full_step(t: &Term, mode: Mode) -> Result<Option<ReductionStep>> {
    mode.check(t)?;
    let found = find(t, mode, Filter::Perm, true).pop().or_else(|| find(t, mode, Filter::Beta, true).pop());
    Ok(found.map(|(r, p, u)| ReductionStep::new(r, p, t, u)))
}

pub fn reduce(t: &Term, mode: Mode, strategy: Strategy, fuel: usize) -> Result<Reduction> {
    mode.check(t)?;
    let mut cur = t.clone();
    let mut trace = Vec::new();
    loop {
        let next = match strategy {
            Strategy::Head => head_step(&cur, mode)?,
            Strategy::Full => full_step(&cur, mode)?,
        };
        let Some(s) = next else {
            return Ok(Reduction { term: cur, trace, exhausted: false });
        };
        if trace.len() == fuel {
            return Ok(Reduction { term: cur, trace, exhausted: true });
        }
        cur = s.after.clone();
        trace.push(s);
    }
}

/// Apply one named rule at `path`, if it matches there.
pub fn apply_at(t: &Term, mode: Mode, rule: Rule, path: &[usize]) -> Option<Term> {
    let sub = t.subterm(path)?;
    let mut scope = Vec::new();
    let mut cur = t;
    for &k in path {
        if let Term::Nu(a, _) = cur {
            scope.push(*a);
        }
        cur = cur.child(k)?;
    }
    root_redexes(sub, &scope, mode, false).into_iter().find(|(r, _)| *r == rule).map(|(_, u)| t.replace_at(path, u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::term::alpha_eq;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn idempotence_step() {
        let t = p("(\\x. x) (+a.0) (\\y. y)");
        let steps = step(&t, Mode::Pe).unwrap();
        assert!(steps.iter().any(|s| s.rule == Rule::Idem && alpha_eq(&s.after, &p("\\x. x"))));
    }

    #[test]
    fn correlated_choices_expand() {
        let t = p("nu a. (t1 (+a.0) t2) (u1 (+a.1) u2)");
        assert!(step(&t, Mode::Pe).unwrap().iter().any(|s| s.rule == Rule::PlusF));
        let (n, _) = pnf(&t, Mode::Pe).unwrap();
        assert!(alpha_eq(&n, &p("nu a. (t1 u1 (+a.1) t1 u2) (+a.0) (t2 u1 (+a.1) t2 u2)")), "{n}");
    }

    #[test]
    fn braces_nu_step() {
        let t = p("{t} nu a. u (+a.0) v");
        let s = step(&t, Mode::Braces).unwrap();
        let bn = s.iter().find(|s| s.rule == Rule::BracesNu).unwrap();
        assert!(alpha_eq(&bn.after, &p("nu a. t (u (+a.0) v)")));
        assert_eq!(step(&t, Mode::Pe).unwrap_err().code(), "E_MODE_VIOLATION");
    }

    #[test]
    fn pnf_examples() {
        let (n, tr) = pnf(&p("nu a. \\x. u (+a.0) v"), Mode::Pe).unwrap();
        assert_eq!(tr[0].rule, Rule::PlusLam);
        assert!(alpha_eq(&n, &p("nu a. (\\x. u) (+a.0) (\\x. v)")));
        let (n, _) = pnf(&p("nu a. x y"), Mode::Pe).unwrap();
        assert_eq!(n, p("x y"));
        let (n, _) = pnf(&p("nu a. x y"), Mode::Braces).unwrap();
        assert_eq!(n, p("nu a. x y"));
        let v = p("\\x. x (\\y. y)");
        let (n, tr) = pnf(&v, Mode::Pe).unwrap();
        assert!(tr.is_empty() && n == v);
    }

    #[test]
    fn fast_and_traced_pnf_agree() {
        for s in [
            "nu a. nu b. ((x (+b.0) y) (+a.0) z) w",
            "\\z. nu a. (z (+a.1) (\\x. x)) (nu b. y (+b.0) (z (+a.0) y))",
            "{f (+a.0) g} nu b. x (+b.1) y",
        ] {
            let t = p(s);
            let m = Mode::for_term(&t);
            let (a, _) = pnf(&t, m).unwrap();
            let b = pnf_fast(&t, m).unwrap();
            assert!(alpha_eq_up_to_names(&a, &b), "{s}: {a} vs {b}");
            assert!(is_pnf(&a, m));
        }
    }

    #[test]
    fn order_puts_outer_binders_first() {
        // inner b-choice sits above the a-choice although nu a is outermost
        let t = p("nu a. nu b. (x (+a.0) y) (+b.0) z");
        let n = pnf_fast(&t, Mode::Pe).unwrap();
        assert!(matches!(n, Term::Nu(..)));
        if let Term::Nu(_, b) = &n {
            assert!(matches!(&**b, Term::Choice(_, _, a, 0) if *a == Name::new("a")), "{n}");
        }
    }

    #[test]
    fn head_steps() {
        let t = p("nu a. (\\x. x) y (+a.0) z");
        let s = head_step(&t, Mode::Pe).unwrap().unwrap();
        assert_eq!(s.rule, Rule::Beta);
        assert_eq!(s.path, vec![0, 0]);
        assert!(head_step(&p("\\x. \\y. y x (x x)"), Mode::Pe).unwrap().is_none());
        let om = p("OMEGA");
        let s = head_step(&om, Mode::Pe).unwrap().unwrap();
        assert!(alpha_eq(&s.after, &om));
    }

    #[test]
    fn reduce_zero_fuel() {
        let t = p("OMEGA");
        let r = reduce(&t, Mode::Pe, Strategy::Full, 0).unwrap();
        assert!(r.trace.is_empty() && r.exhausted && r.term == t);
    }

    #[test]
    fn braces_hnv_requires_normal_argument() {
        assert!(is_hnv(&p("{f} x"), Mode::Braces));
        assert!(!is_hnv(&p("{f} ((\\x. x) y)"), Mode::Braces));
        assert!(is_hnv(&p("{\\x. x} y"), Mode::Braces));
    }

    #[test]
    fn trace_line_format() {
        let t = p("(\\x. x) y");
        let s = &step(&t, Mode::Pe).unwrap()[0];
        assert_eq!(s.to_string(), "beta @ [] : (\\x. x) y ~> y");
    }
}
