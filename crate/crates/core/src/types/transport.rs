//! Carry a CbV typing derivation across one reduction step.
//!
//! Every case first flattens `or` nodes down to the rule that actually types
//! the redex, rebuilds the reduct for each leaf, and joins the pieces again
//! with `or`. Weakening a constraint is a unary `or`.

use std::collections::{BTreeMap, BTreeSet};

use super::derivation::{check_derivation, Derivation, Judgement, System, TypeRule};
use super::Type;
use crate::boolean::BoolFormula;
use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::rewrite::{ReductionStep, Rule};
use crate::term::{alpha_eq, alpha_eq_up_to_names, substitute, Term};

/// Given a derivation for `step.before`, build one for `step.after` with the
/// same context, names, constraint and type. Bound names in the new subject
/// may differ from `step.after` when the latter shadows a name it must bind.
pub fn transport_subject_reduction(d: &Derivation, step: &ReductionStep) -> Result<Derivation> {
    if !alpha_eq(&d.judgement.term, &step.before) {
        return Err(Error::Precondition("derivation does not type the reduced term".into()));
    }
    check_derivation(d, System::Cbv)?;
    let mut cx = Renamer::default();
    let out = cx.at(d, &step.path, step.rule, step.reduct())?;
    let out = retarget(&out, &step.after).unwrap_or(out);
    let j = check_derivation(&out, System::Cbv)?;
    let same = j.same_ctx(&d.judgement)
        && j.names == d.judgement.names
        && j.constraint == d.judgement.constraint
        && j.ty == d.judgement.ty
        && alpha_eq_up_to_names(&j.term, &step.after);
    if !same {
        return Err(Error::UnsupportedStep(format!("{} changed the judgement", step.rule.tag())));
    }
    Ok(out)
}

fn unsupported<T>(rule: Rule, msg: &str) -> Result<T> {
    Err(Error::UnsupportedStep(format!("{}: {msg}", rule.tag())))
}

fn judgement(tpl: &Judgement, term: Term, constraint: BoolFormula, ty: Type) -> Judgement {
    Judgement { ctx: tpl.ctx.clone(), names: tpl.names.clone(), term, constraint, ty }
}

fn node(
    rule: TypeRule,
    tpl: &Judgement,
    term: Term,
    constraint: BoolFormula,
    ty: Type,
    premises: Vec<Derivation>,
) -> Derivation {
    Derivation::new(rule, judgement(tpl, term, constraint, ty), premises)
}

/// Join `parts` (all typing the same term) under `constraint`.
fn join(constraint: BoolFormula, parts: Vec<Derivation>, tpl: &Judgement) -> Derivation {
    if parts.len() == 1 && parts[0].judgement.constraint == constraint {
        return parts.into_iter().next().unwrap();
    }
    let term = parts.first().map_or_else(|| tpl.term.clone(), |p| p.judgement.term.clone());
    node(TypeRule::Or, tpl, term, constraint, tpl.ty.clone(), parts)
}

fn any(parts: &[Derivation]) -> BoolFormula {
    parts.iter().fold(BoolFormula::Bot, |acc, p| BoolFormula::or_s(acc, p.judgement.constraint.clone()))
}

/// The non-`or` derivations below the `or` nodes at the root.
fn leaves(d: &Derivation) -> Vec<&Derivation> {
    if d.rule == TypeRule::Or {
        d.premises.iter().flat_map(leaves).collect()
    } else {
        vec![d]
    }
}

/// For a derivation of `l (+a.i) r` with constraint `b`, derivations `L` of `l`
/// and `R` of `r` with `b |= (x & cL) | (~x & cR)`.
fn split_choice(d: &Derivation) -> Result<(Derivation, Derivation)> {
    let Term::Choice(l, r, ..) = &d.judgement.term else {
        return Err(Error::UnsupportedStep("expected a choice".into()));
    };
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for leaf in leaves(d) {
        match leaf.rule {
            TypeRule::PlusL => left.push(leaf.premises[0].clone()),
            TypeRule::PlusR => right.push(leaf.premises[0].clone()),
            TypeRule::Plus => {
                left.push(leaf.premises[0].clone());
                right.push(leaf.premises[1].clone());
            }
            other => return Err(Error::UnsupportedStep(format!("choice typed by {}", other.tag()))),
        }
    }
    let side = |parts: Vec<Derivation>, t: &Term| {
        let tpl = Judgement { term: t.clone(), ..d.judgement.clone() };
        join(any(&parts), parts, &tpl)
    };
    Ok((side(left, l), side(right, r)))
}

fn plus(b: BoolFormula, tpl: &Judgement, a: Name, i: u32, l: Derivation, r: Derivation) -> Derivation {
    let term = Term::Choice(l.judgement.term.clone().into(), r.judgement.term.clone().into(), a, i);
    node(TypeRule::Plus, tpl, term, b, tpl.ty.clone(), vec![l, r])
}

fn choice_parts(t: &Term) -> Option<(Name, u32)> {
    match t {
        Term::Choice(_, _, a, i) => Some((*a, *i)),
        _ => None,
    }
}

/// Recompute the subject of `d` from its premises, keeping untyped parts.
fn rebuild_term(d: &mut Derivation) {
    let p = |k: usize| -> Term { d.premises[k].judgement.term.clone() };
    let t = &d.judgement.term;
    let new = match (d.rule, t) {
        (TypeRule::Or | TypeRule::Hn | TypeRule::N, _) if !d.premises.is_empty() => p(0),
        (TypeRule::PlusL, Term::Choice(_, r, a, i)) => Term::Choice(p(0).into(), r.clone(), *a, *i),
        (TypeRule::PlusR, Term::Choice(l, _, a, i)) => Term::Choice(l.clone(), p(0).into(), *a, *i),
        (TypeRule::Plus, Term::Choice(_, _, a, i)) => Term::Choice(p(0).into(), p(1).into(), *a, *i),
        (TypeRule::Lam, Term::Lam(x, _)) => Term::Lam(*x, p(0).into()),
        (TypeRule::App, _) => Term::App(p(0).into(), p(1).into()),
        (TypeRule::Cbv, _) => Term::CbvApp(p(0).into(), p(1).into()),
        (TypeRule::AppInt, Term::App(_, u)) => {
            let u = if d.premises.len() > 1 { p(1).into() } else { u.clone() };
            Term::App(p(0).into(), u)
        }
        (TypeRule::Mu | TypeRule::MuPrime | TypeRule::MuSigma, Term::Nu(a, _)) => Term::Nu(*a, p(0).into()),
        _ => return,
    };
    d.judgement.term = new;
}

fn map_judgements(
    d: &Derivation,
    f: &mut impl FnMut(&Judgement) -> Judgement,
    g: &mut impl FnMut(&BoolFormula) -> BoolFormula,
) -> Derivation {
    let mut out = d.clone();
    out.judgement = f(&d.judgement);
    out.side.d = d.side.d.as_ref().map(&mut *g);
    out.side.ds = d.side.ds.iter().map(&mut *g).collect();
    out.premises = d.premises.iter().map(|p| map_judgements(p, f, g)).collect();
    out
}

/// Rename the free name `a` to `b` everywhere in `d`.
fn rename_name(d: &Derivation, a: Name, b: Name) -> Derivation {
    map_judgements(
        d,
        &mut |j| Judgement {
            ctx: j.ctx.clone(),
            names: j.names.iter().map(|&n| if n == a { b } else { n }).collect(),
            term: j.term.rename_name(a, b),
            constraint: j.constraint.rename_name(a, b),
            ty: j.ty.clone(),
        },
        &mut |f| f.rename_name(a, b),
    )
}

/// Rename the context variable `x` to `y` everywhere in `d`.
fn rename_var(d: &Derivation, x: Var, y: Var) -> Derivation {
    map_judgements(
        d,
        &mut |j| Judgement {
            ctx: j.ctx.iter().map(|(v, t)| (if *v == x { y } else { *v }, t.clone())).collect(),
            names: j.names.clone(),
            term: substitute(&j.term, x, &Term::Var(y)),
            constraint: j.constraint.clone(),
            ty: j.ty.clone(),
        },
        &mut |f| f.clone(),
    )
}

/// Make `d` type exactly `target`, which must equal its subject up to bound
/// names and variables.
fn retarget(d: &Derivation, target: &Term) -> Result<Derivation> {
    let fail = || Error::UnsupportedStep("cannot align bound names".into());
    let mut out = d.clone();
    match (d.rule, target) {
        (TypeRule::Or | TypeRule::Hn | TypeRule::N, _) => {
            out.premises = d.premises.iter().map(|p| retarget(p, target)).collect::<Result<_>>()?;
        }
        (TypeRule::Id | TypeRule::IdLe, Term::Var(_)) => {}
        (TypeRule::PlusL, Term::Choice(l, ..)) => out.premises = vec![retarget(&d.premises[0], l)?],
        (TypeRule::PlusR, Term::Choice(_, r, ..)) => out.premises = vec![retarget(&d.premises[0], r)?],
        (TypeRule::Plus, Term::Choice(l, r, ..)) => {
            out.premises = vec![retarget(&d.premises[0], l)?, retarget(&d.premises[1], r)?];
        }
        (TypeRule::Lam, Term::Lam(y2, body)) => {
            let Term::Lam(y, _) = &d.judgement.term else { return Err(fail()) };
            let body = if y == y2 { (**body).clone() } else { substitute(body, *y2, &Term::Var(*y)) };
            out.premises = vec![retarget(&d.premises[0], &body)?];
            out.judgement.term = Term::Lam(*y, body.into());
            return Ok(out);
        }
        (TypeRule::App | TypeRule::Cbv | TypeRule::AppInt, Term::App(f, u) | Term::CbvApp(f, u)) => {
            out.premises = d
                .premises
                .iter()
                .enumerate()
                .map(|(k, p)| retarget(p, if k == 0 { f } else { u }))
                .collect::<Result<_>>()?;
        }
        (TypeRule::Mu | TypeRule::MuPrime | TypeRule::MuSigma, Term::Nu(c, body)) => {
            let Term::Nu(a, _) = &d.judgement.term else { return Err(fail()) };
            if d.judgement.names.contains(c) {
                return Err(fail());
            }
            out.premises = d
                .premises
                .iter()
                .map(|p| retarget(&if a == c { p.clone() } else { rename_name(p, *a, *c) }, body))
                .collect::<Result<_>>()?;
            if a != c {
                out.side.d = d.side.d.as_ref().map(|f| f.rename_name(*a, *c));
                out.side.ds = d.side.ds.iter().map(|f| f.rename_name(*a, *c)).collect();
            }
        }
        _ => return Err(fail()),
    }
    out.judgement.term = target.clone();
    Ok(out)
}

/// Fresh names and variables chosen once per transport, so that parallel
/// branches of an `or` rename identically.
#[derive(Default)]
struct Renamer {
    names: BTreeMap<Name, Name>,
    vars: BTreeMap<Var, Var>,
}

impl Renamer {
    fn name(&mut self, a: Name) -> Name {
        *self.names.entry(a).or_insert_with(|| a.fresh())
    }

    fn var(&mut self, x: Var) -> Var {
        *self.vars.entry(x).or_insert_with(|| x.fresh())
    }

    /// Add `extra` to every name set, renaming generators that bind one of them.
    fn weaken_names(&mut self, d: &Derivation, extra: &BTreeSet<Name>) -> Derivation {
        let mut out = d.clone();
        out.judgement.names.extend(extra.iter().copied());
        let bound = match &d.judgement.term {
            Term::Nu(a, _) if matches!(d.rule, TypeRule::Mu | TypeRule::MuPrime | TypeRule::MuSigma) => Some(*a),
            _ => None,
        };
        match bound {
            Some(a) if extra.contains(&a) => {
                let a2 = self.name(a);
                let Term::Nu(_, body) = &d.judgement.term else { unreachable!() };
                out.judgement.term = Term::Nu(a2, body.rename_name(a, a2).into());
                out.side.d = d.side.d.as_ref().map(|f| f.rename_name(a, a2));
                out.side.ds = d.side.ds.iter().map(|f| f.rename_name(a, a2)).collect();
                out.premises = d.premises.iter().map(|p| self.weaken_names(&rename_name(p, a, a2), extra)).collect();
            }
            _ => out.premises = d.premises.iter().map(|p| self.weaken_names(p, extra)).collect(),
        }
        rebuild_term(&mut out);
        out
    }

    /// Add `x : ty` to every context, renaming abstractions that bind `x`.
    fn weaken_ctx(&mut self, d: &Derivation, x: Var, ty: &Type) -> Derivation {
        let mut out = d.clone();
        out.judgement.ctx.push((x, ty.clone()));
        match &d.judgement.term {
            Term::Lam(y, body) if d.rule == TypeRule::Lam && *y == x => {
                let y2 = self.var(x);
                out.judgement.term = Term::Lam(y2, substitute(body, x, &Term::Var(y2)).into());
                out.premises = vec![self.weaken_ctx(&rename_var(&d.premises[0], x, y2), x, ty)];
            }
            _ => out.premises = d.premises.iter().map(|p| self.weaken_ctx(p, x, ty)).collect(),
        }
        rebuild_term(&mut out);
        out
    }

    /// From `G, x : s |- t : c` and `G |- u : d`, a derivation of
    /// `G |- t[u/x] : c & d`.
    fn subst(&mut self, d: &Derivation, x: Var, u: &Derivation) -> Result<Derivation> {
        let c = BoolFormula::and_s(d.judgement.constraint.clone(), u.judgement.constraint.clone());
        let mut j = d.judgement.clone();
        j.ctx.retain(|(y, _)| *y != x);
        j.constraint = c.clone();
        let mut out = Derivation { rule: d.rule, judgement: j, side: d.side.clone(), premises: Vec::new() };
        match (d.rule, &d.judgement.term) {
            (TypeRule::Id, Term::Var(y)) => {
                if *y == x {
                    return Ok(join(c, vec![u.clone()], &out.judgement));
                }
                return Ok(out);
            }
            (TypeRule::Or, _) => {
                out.premises = d.premises.iter().map(|p| self.subst(p, x, u)).collect::<Result<_>>()?;
                if out.premises.is_empty() {
                    out.judgement.term = substitute(&d.judgement.term, x, &u.judgement.term);
                }
            }
            (TypeRule::PlusL | TypeRule::PlusR | TypeRule::Plus, Term::Choice(l, r, a, i)) => {
                let ut = &u.judgement.term;
                out.judgement.term = Term::Choice(substitute(l, x, ut).into(), substitute(r, x, ut).into(), *a, *i);
                out.premises = d.premises.iter().map(|p| self.subst(p, x, u)).collect::<Result<_>>()?;
            }
            (TypeRule::Lam, Term::Lam(y, _)) => {
                let (mut y, mut p) = (*y, d.premises[0].clone());
                if u.judgement.term.has_free_var(y) {
                    let y2 = self.var(y);
                    p = rename_var(&p, y, y2);
                    y = y2;
                }
                out.judgement.term = Term::Lam(y, p.judgement.term.clone().into());
                let ty = p
                    .judgement
                    .lookup(y)
                    .cloned()
                    .ok_or_else(|| Error::UnsupportedStep("unbound abstraction".into()))?;
                let u2 = self.weaken_ctx(u, y, &ty);
                out.premises = vec![self.subst(&p, x, &u2)?];
            }
            (TypeRule::App | TypeRule::Cbv, _) => {
                out.premises = d.premises.iter().map(|p| self.subst(p, x, u)).collect::<Result<_>>()?;
            }
            (TypeRule::Mu, Term::Nu(a, _)) => {
                let u2 = self.weaken_names(u, &BTreeSet::from([*a]));
                out.premises = vec![self.subst(&d.premises[0], x, &u2)?];
            }
            (rule, _) => return Err(Error::UnsupportedStep(format!("substitution through {}", rule.tag()))),
        }
        rebuild_term(&mut out);
        Ok(out)
    }

    /// Descend along `path` and rewrite the redex there.
    fn at(&mut self, d: &Derivation, path: &[usize], rule: Rule, reduct: &Term) -> Result<Derivation> {
        if path.is_empty() {
            return self.local(d, rule, reduct);
        }
        let mut out = d.clone();
        let k = path[0];
        let (targets, rest): (Vec<usize>, &[usize]) = match (d.rule, k) {
            (TypeRule::Or | TypeRule::Hn | TypeRule::N, _) => ((0..d.premises.len()).collect(), path),
            (TypeRule::PlusL, 0) | (TypeRule::PlusR, 1) | (TypeRule::Lam, 0) => (vec![0], &path[1..]),
            (TypeRule::Mu | TypeRule::MuPrime | TypeRule::MuSigma, 0) => ((0..d.premises.len()).collect(), &path[1..]),
            (TypeRule::Plus | TypeRule::App | TypeRule::Cbv, k) => (vec![k], &path[1..]),
            (TypeRule::AppInt, 0) => (vec![0], &path[1..]),
            (TypeRule::AppInt, _) => ((1..d.premises.len()).collect(), &path[1..]),
            _ => (vec![], &path[1..]),
        };
        out.judgement.term = d.judgement.term.replace_at(path, reduct.clone());
        for t in targets {
            out.premises[t] = self.at(&d.premises[t], rest, rule, reduct)?;
        }
        rebuild_term(&mut out);
        Ok(out)
    }

    /// Rewrite at the root: `d` types the redex, the result types the reduct.
    fn local(&mut self, d: &Derivation, rule: Rule, reduct: &Term) -> Result<Derivation> {
        if d.rule == TypeRule::Or {
            let mut out = d.clone();
            out.premises = d.premises.iter().map(|p| self.local(p, rule, reduct)).collect::<Result<_>>()?;
            out.judgement.term = reduct.clone();
            rebuild_term(&mut out);
            return Ok(out);
        }
        let j = &d.judgement;
        let b = j.constraint.clone();
        let tpl = Judgement { term: reduct.clone(), ..j.clone() };
        match rule {
            Rule::Beta => {
                let f = &d.premises[0];
                let u = &d.premises[1];
                let mut parts = Vec::new();
                for l in leaves(f) {
                    let Term::Lam(x, _) = &l.judgement.term else {
                        return unsupported(rule, "abstraction not typed by lam");
                    };
                    parts.push(self.subst(&l.premises[0], *x, u)?);
                }
                Ok(join(b, parts, &tpl))
            }
            Rule::Idem => {
                let (l, r) = split_choice(d)?;
                let r = retarget(&r, &l.judgement.term)?;
                Ok(join(b, vec![l, r], &tpl))
            }
            Rule::C1 | Rule::C2 => {
                let (a, i) = choice_parts(&j.term).unwrap();
                let (l, r) = split_choice(d)?;
                let (l, r) = if rule == Rule::C1 { (split_choice(&l)?.0, r) } else { (l, split_choice(&r)?.1) };
                Ok(plus(b, &tpl, a, i, l, r))
            }
            Rule::PlusPlus1 | Rule::PlusPlus2 => {
                let (a, i) = choice_parts(&j.term).unwrap();
                let (l, r) = split_choice(d)?;
                let inner_term = if rule == Rule::PlusPlus1 { &l.judgement.term } else { &r.judgement.term };
                let (c, k) = choice_parts(inner_term).unwrap();
                let x = BoolFormula::atom(a, i);
                let pair = |p: &Derivation, q: &Derivation| {
                    let cp = BoolFormula::or_s(
                        BoolFormula::and_s(x.clone(), p.judgement.constraint.clone()),
                        BoolFormula::and_s(BoolFormula::not_s(x.clone()), q.judgement.constraint.clone()),
                    );
                    plus(cp, &tpl, a, i, p.clone(), q.clone())
                };
                let (first, second) = if rule == Rule::PlusPlus1 {
                    let (lt, lu) = split_choice(&l)?;
                    (pair(&lt, &r), pair(&lu, &r))
                } else {
                    let (ru, rv) = split_choice(&r)?;
                    (pair(&l, &ru), pair(&l, &rv))
                };
                Ok(plus(b, &tpl, c, k, first, second))
            }
            Rule::PlusLam => {
                let Term::Lam(x, _) = &j.term else { return unsupported(rule, "expected an abstraction") };
                let (a, i) = choice_parts(&d.premises[0].judgement.term).unwrap();
                let (l, r) = split_choice(&d.premises[0])?;
                let wrap = |p: Derivation| {
                    let term = Term::Lam(*x, p.judgement.term.clone().into());
                    node(TypeRule::Lam, j, term, p.judgement.constraint.clone(), j.ty.clone(), vec![p])
                };
                Ok(plus(b, &tpl, a, i, wrap(l), wrap(r)))
            }
            Rule::PlusF | Rule::PlusA | Rule::BracesPlus1 | Rule::BracesPlus2 => {
                let k = usize::from(matches!(rule, Rule::PlusA | Rule::BracesPlus2));
                let (a, i) = choice_parts(&d.premises[k].judgement.term).unwrap();
                let (l, r) = split_choice(&d.premises[k])?;
                let other = &d.premises[1 - k];
                let wrap = |p: Derivation| {
                    let mut ps = vec![other.clone(), other.clone()];
                    ps[k] = p;
                    let c = BoolFormula::and_s(ps[0].judgement.constraint.clone(), ps[1].judgement.constraint.clone());
                    let term = match d.rule {
                        TypeRule::Cbv => {
                            Term::CbvApp(ps[0].judgement.term.clone().into(), ps[1].judgement.term.clone().into())
                        }
                        _ => Term::App(ps[0].judgement.term.clone().into(), ps[1].judgement.term.clone().into()),
                    };
                    node(d.rule, j, term, c, j.ty.clone(), ps)
                };
                Ok(plus(b, &tpl, a, i, wrap(l), wrap(r)))
            }
            Rule::PlusNu => {
                let Term::Nu(_, body) = &j.term else { return unsupported(rule, "expected a generator") };
                let (a, i) = choice_parts(body).unwrap();
                let (l, r) = split_choice(&d.premises[0])?;
                let x = BoolFormula::atom(a, i);
                let wrap = |p: Derivation, lit: BoolFormula| {
                    let mut m = d.clone();
                    m.judgement.constraint = BoolFormula::and_s(b.clone(), lit);
                    m.premises = vec![p];
                    rebuild_term(&mut m);
                    m
                };
                Ok(plus(b.clone(), &tpl, a, i, wrap(l, x.clone()), wrap(r, BoolFormula::not_s(x))))
            }
            Rule::NuLam => {
                let Term::Lam(x, _) = &j.term else { return unsupported(rule, "expected an abstraction") };
                let sx = d.premises[0].judgement.lookup(*x).cloned().unwrap();
                let mut parts = Vec::new();
                for m in leaves(&d.premises[0]) {
                    let q = &m.premises[0];
                    let (qs, tau) = q.judgement.ty.split_prefix();
                    let lam_ty = Type::prefixed(&qs, Type::arrow(sx.clone(), tau.clone()));
                    let inner = Judgement { ctx: j.ctx.clone(), ..q.judgement.clone() };
                    let lam = node(
                        TypeRule::Lam,
                        &inner,
                        Term::Lam(*x, q.judgement.term.clone().into()),
                        q.judgement.constraint.clone(),
                        lam_ty.clone(),
                        vec![q.clone()],
                    );
                    let mut mu = m.clone();
                    mu.judgement.ctx = j.ctx.clone();
                    mu.judgement.ty = Type::prefixed(&m.judgement.ty.split_prefix().0[..1], lam_ty);
                    mu.premises = vec![lam];
                    rebuild_term(&mut mu);
                    parts.push(mu);
                }
                Ok(join(b, parts, &tpl))
            }
            Rule::NuF | Rule::BracesNu => {
                // index of the generator premise
                let k = usize::from(rule == Rule::BracesNu);
                let other = &d.premises[1 - k];
                let mut parts = Vec::new();
                for m in leaves(&d.premises[k]) {
                    let Term::Nu(a, _) = &m.judgement.term else {
                        return unsupported(rule, "generator not typed by mu");
                    };
                    let q = &m.premises[0];
                    let o = self.weaken_names(other, &BTreeSet::from([*a]));
                    let ps = if k == 0 { vec![q.clone(), o] } else { vec![o, q.clone()] };
                    let c = BoolFormula::and_s(ps[0].judgement.constraint.clone(), ps[1].judgement.constraint.clone());
                    let (qs, arrow) = ps[0].judgement.ty.split_prefix();
                    let Type::Arrow(_, cod) = arrow else { return unsupported(rule, "function type expected") };
                    let app_ty = Type::prefixed(&qs, (**cod).clone());
                    let term = Term::App(ps[0].judgement.term.clone().into(), ps[1].judgement.term.clone().into());
                    let app = node(TypeRule::App, &q.judgement, term, c, app_ty.clone(), ps);
                    let s = m.judgement.ty.split_prefix().0[0].clone();
                    let mut mu = m.clone();
                    mu.judgement.constraint = BoolFormula::and_s(b.clone(), m.judgement.constraint.clone());
                    mu.judgement.ty = Type::counted(s, app_ty);
                    mu.premises = vec![app];
                    rebuild_term(&mut mu);
                    parts.push(mu);
                }
                Ok(join(b, parts, &tpl))
            }
            Rule::NotNu => unsupported(rule, "dropping a generator is not a CbV step"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::typed_fixtures;
    use crate::rewrite::{step, Mode};

    /// Transport along every step reachable within `depth` steps.
    fn closure(d: &Derivation, depth: usize, count: &mut usize) {
        if depth == 0 {
            return;
        }
        for s in step(&d.judgement.term, Mode::Braces).unwrap() {
            let out = transport_subject_reduction(d, &s)
                .unwrap_or_else(|e| panic!("{} at {:?} on {}: {e}", s.rule.tag(), s.path, s.before));
            assert_eq!(out.judgement.ty, d.judgement.ty);
            *count += 1;
            closure(&out, depth - 1, count);
        }
    }

    #[test]
    fn fixtures_transport() {
        let mut count = 0;
        for fx in typed_fixtures().into_iter().filter(|f| f.system == System::Cbv) {
            closure(&fx.derivation, 4, &mut count);
        }
        eprintln!("transported {count}");
        assert!(count > 100, "{count}");
    }

    #[test]
    fn random_derivations_transport() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut count = 0;
        for _ in 0..150 {
            let d = crate::gen::random_cbv_derivation(&mut rng, 4);
            closure(&d, 2, &mut count);
        }
        eprintln!("transported {count}");
    }

    #[test]
    fn rejects_foreign_term() {
        let fx = &typed_fixtures()[0].derivation;
        let s =
            ReductionStep { rule: Rule::Beta, path: vec![], before: crate::term::omega(), after: crate::term::omega() };
        assert_eq!(transport_subject_reduction(fx, &s).unwrap_err().code(), "E_PRECONDITION");
    }
}
