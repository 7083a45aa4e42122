//! Terms of the calculus with binding-aware operations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::name::{Name, Var};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Lam(Var, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    /// `left (+name.index) right`
    Choice(Arc<Term>, Arc<Term>, Name, u32),
    Nu(Name, Arc<Term>),
    /// `{fun} arg`
    CbvApp(Arc<Term>, Arc<Term>),
    Const,
}

/// Child indices from the root. `Lam`/`Nu` have child 0; binary nodes 0 and 1.
pub type Path = Vec<usize>;

pub fn var(x: &str) -> Term {
    Term::Var(Var::new(x))
}

pub fn lam(x: Var, body: Term) -> Term {
    Term::Lam(x, Arc::new(body))
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Arc::new(f), Arc::new(a))
}

pub fn choice(l: Term, r: Term, a: Name, i: u32) -> Term {
    Term::Choice(Arc::new(l), Arc::new(r), a, i)
}

pub fn nu(a: Name, t: Term) -> Term {
    Term::Nu(a, Arc::new(t))
}

pub fn cbv(f: Term, a: Term) -> Term {
    Term::CbvApp(Arc::new(f), Arc::new(a))
}

pub fn identity() -> Term {
    let x = Var::new("x");
    lam(x, Term::Var(x))
}

pub fn omega() -> Term {
    let x = Var::new("x");
    let delta = lam(x, app(Term::Var(x), Term::Var(x)));
    app(delta.clone(), delta)
}

/// The numeral `\f.\x. f (f x)`.
pub fn two() -> Term {
    let f = Var::new("f");
    let x = Var::new("x");
    lam(f, lam(x, app(Term::Var(f), app(Term::Var(f), Term::Var(x)))))
}

/// Finite partial map from bits `(a, i)` to their value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    bits: BTreeMap<(Name, u32), bool>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, a: Name, i: u32, bit: bool) {
        self.bits.insert((a, i), bit);
    }

    pub fn with(mut self, a: Name, i: u32, bit: bool) -> Self {
        self.set(a, i, bit);
        self
    }

    pub fn get(&self, a: Name, i: u32) -> Option<bool> {
        self.bits.get(&(a, i)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Name, u32), &bool)> {
        self.bits.iter()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl Term {
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const => 1,
            Term::Lam(_, b) | Term::Nu(_, b) => 1 + b.size(),
            Term::App(f, a) | Term::CbvApp(f, a) | Term::Choice(f, a, _, _) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_fv(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fv(&self, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(x) => {
                if !bound.contains(x) {
                    out.insert(*x);
                }
            }
            Term::Lam(x, b) => {
                bound.push(*x);
                b.collect_fv(bound, out);
                bound.pop();
            }
            Term::Nu(_, b) => b.collect_fv(bound, out),
            Term::App(f, a) | Term::CbvApp(f, a) | Term::Choice(f, a, _, _) => {
                f.collect_fv(bound, out);
                a.collect_fv(bound, out);
            }
            Term::Const => {}
        }
    }

    pub fn has_free_var(&self, x: Var) -> bool {
        match self {
            Term::Var(y) => *y == x,
            Term::Lam(y, b) => *y != x && b.has_free_var(x),
            Term::Nu(_, b) => b.has_free_var(x),
            Term::App(f, a) | Term::CbvApp(f, a) | Term::Choice(f, a, _, _) => f.has_free_var(x) || a.has_free_var(x),
            Term::Const => false,
        }
    }

    /// Names occurring in choices outside the scope of a `nu` binding them.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_fn(&mut Vec::new(), &mut out);
        out
    }

    fn collect_fn(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        match self {
            Term::Choice(l, r, a, _) => {
                if !bound.contains(a) {
                    out.insert(*a);
                }
                l.collect_fn(bound, out);
                r.collect_fn(bound, out);
            }
            Term::Nu(a, b) => {
                bound.push(*a);
                b.collect_fn(bound, out);
                bound.pop();
            }
            Term::Lam(_, b) => b.collect_fn(bound, out),
            Term::App(f, a) | Term::CbvApp(f, a) => {
                f.collect_fn(bound, out);
                a.collect_fn(bound, out);
            }
            Term::Var(_) | Term::Const => {}
        }
    }

    pub fn has_free_name(&self, a: Name) -> bool {
        match self {
            Term::Choice(l, r, b, _) => *b == a || l.has_free_name(a) || r.has_free_name(a),
            Term::Nu(b, t) => *b != a && t.has_free_name(a),
            Term::Lam(_, b) => b.has_free_name(a),
            Term::App(f, x) | Term::CbvApp(f, x) => f.has_free_name(a) || x.has_free_name(a),
            Term::Var(_) | Term::Const => false,
        }
    }

    /// Indices `i` of choices `(+a.i)` with `a` free.
    pub fn free_indices(&self, a: Name) -> BTreeSet<u32> {
        fn go(t: &Term, a: Name, out: &mut BTreeSet<u32>) {
            match t {
                Term::Choice(l, r, b, i) => {
                    if *b == a {
                        out.insert(*i);
                    }
                    go(l, a, out);
                    go(r, a, out);
                }
                Term::Nu(b, body) => {
                    if *b != a {
                        go(body, a, out)
                    }
                }
                Term::Lam(_, b) => go(b, a, out),
                Term::App(f, x) | Term::CbvApp(f, x) => {
                    go(f, a, out);
                    go(x, a, out);
                }
                Term::Var(_) | Term::Const => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, a, &mut out);
        out
    }

    pub fn contains_cbv(&self) -> bool {
        match self {
            Term::CbvApp(..) => true,
            Term::Lam(_, b) | Term::Nu(_, b) => b.contains_cbv(),
            Term::App(f, a) | Term::Choice(f, a, _, _) => f.contains_cbv() || a.contains_cbv(),
            Term::Var(_) | Term::Const => false,
        }
    }

    pub fn child(&self, k: usize) -> Option<&Term> {
        match (self, k) {
            (Term::Lam(_, b), 0) | (Term::Nu(_, b), 0) => Some(b),
            (Term::App(f, a), _) | (Term::CbvApp(f, a), _) | (Term::Choice(f, a, _, _), _) => match k {
                0 => Some(f),
                1 => Some(a),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        path.iter().try_fold(self, |t, &k| t.child(k))
    }

    /// Rebuild `self` with the subterm at `path` replaced. No capture checks.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        let Some((&k, rest)) = path.split_first() else {
            return new;
        };
        let sub = |c: &Arc<Term>| Arc::new(c.replace_at(rest, new.clone()));
        match (self, k) {
            (Term::Lam(x, b), 0) => Term::Lam(*x, sub(b)),
            (Term::Nu(a, b), 0) => Term::Nu(*a, sub(b)),
            (Term::App(f, a), 0) => Term::App(sub(f), a.clone()),
            (Term::App(f, a), 1) => Term::App(f.clone(), sub(a)),
            (Term::CbvApp(f, a), 0) => Term::CbvApp(sub(f), a.clone()),
            (Term::CbvApp(f, a), 1) => Term::CbvApp(f.clone(), sub(a)),
            (Term::Choice(l, r, n, i), 0) => Term::Choice(sub(l), r.clone(), *n, *i),
            (Term::Choice(l, r, n, i), 1) => Term::Choice(l.clone(), sub(r), *n, *i),
            _ => panic!("replace_at: invalid path"),
        }
    }

    /// Rename free occurrences of the name `a` to `b`. `b` must not be bound in `self`.
    pub fn rename_name(&self, a: Name, b: Name) -> Term {
        match self {
            Term::Choice(l, r, c, i) => Term::Choice(
                Arc::new(l.rename_name(a, b)),
                Arc::new(r.rename_name(a, b)),
                if *c == a { b } else { *c },
                *i,
            ),
            Term::Nu(c, t) if *c == a => self.clone(),
            Term::Nu(c, t) => Term::Nu(*c, Arc::new(t.rename_name(a, b))),
            Term::Lam(x, t) => Term::Lam(*x, Arc::new(t.rename_name(a, b))),
            Term::App(f, x) => Term::App(Arc::new(f.rename_name(a, b)), Arc::new(x.rename_name(a, b))),
            Term::CbvApp(f, x) => Term::CbvApp(Arc::new(f.rename_name(a, b)), Arc::new(x.rename_name(a, b))),
            Term::Var(_) | Term::Const => self.clone(),
        }
    }

    pub fn alpha_eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

/// Capture-avoiding `t[u/x]`. Binders of `t` are renamed when they would capture
/// variables of `u`, and `nu` binders when they would capture free names of `u`.
pub fn substitute(t: &Term, x: Var, u: &Term) -> Term {
    let fv = u.free_vars();
    let fnames = u.free_names();
    subst(t, x, u, &fv, &fnames)
}

fn subst(t: &Term, x: Var, u: &Term, fv: &BTreeSet<Var>, fnames: &BTreeSet<Name>) -> Term {
    if !t.has_free_var(x) {
        return t.clone();
    }
    let go = |s: &Arc<Term>| Arc::new(subst(s, x, u, fv, fnames));
    match t {
        Term::Var(_) => u.clone(),
        Term::Lam(y, b) => {
            if fv.contains(y) {
                let y2 = y.fresh();
                let b2 = subst(b, *y, &Term::Var(y2), &BTreeSet::from([y2]), &BTreeSet::new());
                Term::Lam(y2, Arc::new(subst(&b2, x, u, fv, fnames)))
            } else {
                Term::Lam(*y, go(b))
            }
        }
        Term::Nu(a, b) => {
            if fnames.contains(a) {
                let a2 = a.fresh();
                let b2 = b.rename_name(*a, a2);
                Term::Nu(a2, Arc::new(subst(&b2, x, u, fv, fnames)))
            } else {
                Term::Nu(*a, go(b))
            }
        }
        Term::App(f, a) => Term::App(go(f), go(a)),
        Term::CbvApp(f, a) => Term::CbvApp(go(f), go(a)),
        Term::Choice(l, r, a, i) => Term::Choice(go(l), go(r), *a, *i),
        Term::Const => Term::Const,
    }
}

fn lookup<T: PartialEq + Copy>(env: &[(T, T)], x: T, left: bool) -> Option<usize> {
    env.iter().rposition(|p| if left { p.0 == x } else { p.1 == x })
}

fn same_binding<T: PartialEq + Copy>(env: &[(T, T)], x: T, y: T) -> bool {
    match (lookup(env, x, true), lookup(env, y, false)) {
        (Some(i), Some(j)) => i == j,
        (None, None) => x == y,
        _ => false,
    }
}

fn aeq(t: &Term, u: &Term, vs: &mut Vec<(Var, Var)>, ns: &mut Vec<(Name, Name)>, rename_names: bool) -> bool {
    match (t, u) {
        (Term::Var(x), Term::Var(y)) => same_binding(vs, *x, *y),
        (Term::Const, Term::Const) => true,
        (Term::Lam(x, b), Term::Lam(y, c)) => {
            vs.push((*x, *y));
            let r = aeq(b, c, vs, ns, rename_names);
            vs.pop();
            r
        }
        (Term::Nu(a, b), Term::Nu(c, d)) => {
            if !rename_names && a != c {
                return false;
            }
            ns.push((*a, *c));
            let r = aeq(b, d, vs, ns, rename_names);
            ns.pop();
            r
        }
        (Term::App(f, a), Term::App(g, b)) | (Term::CbvApp(f, a), Term::CbvApp(g, b)) => {
            aeq(f, g, vs, ns, rename_names) && aeq(a, b, vs, ns, rename_names)
        }
        (Term::Choice(l1, r1, a, i), Term::Choice(l2, r2, b, j)) => {
            i == j && same_binding(ns, *a, *b) && aeq(l1, l2, vs, ns, rename_names) && aeq(r1, r2, vs, ns, rename_names)
        }
        _ => false,
    }
}

/// Equality up to renaming of bound variables. Names are rigid.
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    aeq(t, u, &mut Vec::new(), &mut Vec::new(), false)
}

/// Like [`alpha_eq`] but `nu`-bound names may also be renamed.
pub fn alpha_eq_up_to_names(t: &Term, u: &Term) -> bool {
    aeq(t, u, &mut Vec::new(), &mut Vec::new(), true)
}

/// A string identifying `t` up to bound variables (and, optionally, bound names).
pub fn canonical_key(t: &Term, rename_names: bool) -> String {
    fn go(t: &Term, vs: &mut Vec<Var>, ns: &mut Vec<Name>, rn: bool, out: &mut String) {
        use std::fmt::Write;
        match t {
            Term::Var(x) => match vs.iter().rposition(|y| y == x) {
                Some(k) => write!(out, "#{}", vs.len() - 1 - k).unwrap(),
                None => write!(out, "{x}").unwrap(),
            },
            Term::Const => out.push_str("#c"),
            Term::Lam(x, b) => {
                out.push_str("(L ");
                vs.push(*x);
                go(b, vs, ns, rn, out);
                vs.pop();
                out.push(')');
            }
            Term::Nu(a, b) => {
                if rn {
                    out.push_str("(N ");
                } else {
                    write!(out, "(N {a} ").unwrap();
                }
                ns.push(*a);
                go(b, vs, ns, rn, out);
                ns.pop();
                out.push(')');
            }
            Term::App(f, a) | Term::CbvApp(f, a) => {
                out.push_str(if matches!(t, Term::App(..)) { "(A " } else { "(B " });
                go(f, vs, ns, rn, out);
                out.push(' ');
                go(a, vs, ns, rn, out);
                out.push(')');
            }
            Term::Choice(l, r, a, i) => {
                out.push_str("(C ");
                go(l, vs, ns, rn, out);
                out.push(' ');
                go(r, vs, ns, rn, out);
                match ns.iter().rposition(|b| b == a) {
                    Some(k) if rn => write!(out, " @{} {i})", ns.len() - 1 - k).unwrap(),
                    _ => write!(out, " {a} {i})").unwrap(),
                }
            }
        }
    }
    let mut out = String::new();
    go(t, &mut Vec::new(), &mut Vec::new(), rename_names, &mut out);
    out
}

/// Resolve every choice on a name of `x` by the bit `omega` assigns to it.
/// Under `nu b` the name `b` is removed from `x`, since it is a different name there.
pub fn project(t: &Term, x: &BTreeSet<Name>, omega: &Valuation) -> Result<Term> {
    Ok(match t {
        Term::Choice(l, r, a, i) if x.contains(a) => match omega.get(*a, *i) {
            Some(true) => project(l, x, omega)?,
            Some(false) => project(r, x, omega)?,
            None => return Err(Error::UndefinedBit(format!("{a}.{i}"))),
        },
        Term::Choice(l, r, a, i) => {
            Term::Choice(Arc::new(project(l, x, omega)?), Arc::new(project(r, x, omega)?), *a, *i)
        }
        Term::Nu(b, body) => {
            if x.contains(b) {
                let mut inner = x.clone();
                inner.remove(b);
                Term::Nu(*b, Arc::new(project(body, &inner, omega)?))
            } else {
                Term::Nu(*b, Arc::new(project(body, x, omega)?))
            }
        }
        Term::Lam(v, body) => Term::Lam(*v, Arc::new(project(body, x, omega)?)),
        Term::App(f, a) => Term::App(Arc::new(project(f, x, omega)?), Arc::new(project(a, x, omega)?)),
        Term::CbvApp(f, a) => Term::CbvApp(Arc::new(project(f, x, omega)?), Arc::new(project(a, x, omega)?)),
        Term::Var(_) | Term::Const => t.clone(),
    })
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parse::print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn substitution_cases() {
        let x = Var::new("x");
        assert_eq!(substitute(&var("x"), x, &Term::Const), Term::Const);
        let id = p("\\x. x");
        assert_eq!(substitute(&id, x, &Term::Const), id);
        let t = p("\\y. x y");
        let r = substitute(&t, x, &var("y"));
        match &r {
            Term::Lam(y2, body) => {
                assert_ne!(*y2, Var::new("y"));
                assert_eq!(**body, app(var("y"), Term::Var(*y2)));
            }
            _ => panic!("{r}"),
        }
    }

    #[test]
    fn substitution_freshens_nu() {
        let t = p("nu a. x (+a.0) y");
        let r = substitute(&t, Var::new("x"), &p("z (+a.0) w"));
        assert_eq!(r.free_names(), BTreeSet::from([Name::new("a")]));
        assert!(alpha_eq_up_to_names(&r, &p("nu b. (z (+a.0) w) (+b.0) y")));
    }

    #[test]
    fn alpha_cases() {
        assert!(alpha_eq(&p("\\x. x"), &p("\\y. y")));
        assert!(!alpha_eq(&p("nu a. x (+a.0) y"), &p("nu b. x (+b.0) y")));
        assert!(alpha_eq_up_to_names(&p("nu a. x (+a.0) y"), &p("nu b. x (+b.0) y")));
        assert!(!alpha_eq(&p("\\x. x"), &p("\\x. \\y. x")));
    }

    #[test]
    fn projection_cases() {
        let a = Name::new("a");
        let w = Valuation::new().with(a, 0, true);
        assert_eq!(project(&p("x (+a.0) y"), &BTreeSet::from([a]), &w).unwrap(), var("x"));
        let t = p("x (+a.0) y");
        assert_eq!(project(&t, &BTreeSet::from([Name::new("b")]), &Valuation::new()).unwrap(), t);
        let w0 = Valuation::new().with(a, 0, false);
        assert_eq!(
            project(&p("nu b. (x (+a.0) y) (+b.0) z"), &BTreeSet::from([a]), &w0).unwrap(),
            p("nu b. y (+b.0) z")
        );
        assert_eq!(project(&t, &BTreeSet::from([a]), &Valuation::new()).unwrap_err().code(), "E_UNDEFINED_BIT");
        // under nu a, the bound a is not the projected one
        let t = p("nu a. x (+a.0) y");
        assert_eq!(project(&t, &BTreeSet::from([a]), &w).unwrap(), t);
    }

    #[test]
    fn keys_identify_alpha_classes() {
        assert_eq!(canonical_key(&p("\\x. x"), false), canonical_key(&p("\\y. y"), false));
        assert_ne!(canonical_key(&p("nu a. x (+a.0) y"), false), canonical_key(&p("nu b. x (+b.0) y"), false));
        assert_eq!(canonical_key(&p("nu a. x (+a.0) y"), true), canonical_key(&p("nu b. x (+b.0) y"), true));
    }
}
