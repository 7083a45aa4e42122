//! Constructors that compute a rule's conclusion from its premises.
//!
//! Nothing is checked here; run the result through `check_derivation`.

use std::collections::BTreeSet;

use super::derivation::{Derivation, Judgement, TypeRule};
use super::Type;
use crate::boolean::{measure, BoolFormula};
use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::rational::Rational;
use crate::term::Term;

pub type Ctx = Vec<(Var, Type)>;

fn shape(msg: &str) -> Error {
    Error::RuleShape { path: "[]".into(), msg: msg.into() }
}

fn conclude(
    rule: TypeRule,
    tpl: &Judgement,
    term: Term,
    c: BoolFormula,
    ty: Type,
    premises: Vec<Derivation>,
) -> Derivation {
    let j = Judgement { ctx: tpl.ctx.clone(), names: tpl.names.clone(), term, constraint: c, ty };
    Derivation::new(rule, j, premises)
}

fn t(d: &Derivation) -> Term {
    d.judgement.term.clone()
}

pub fn id(ctx: &Ctx, names: &BTreeSet<Name>, x: Var, c: BoolFormula) -> Result<Derivation> {
    let ty = ctx.iter().find(|(y, _)| *y == x).map(|(_, t)| t.clone()).ok_or_else(|| shape("unbound variable"))?;
    Ok(Derivation::new(TypeRule::Id, Judgement::new(ctx.clone(), names.clone(), Term::Var(x), c, ty), vec![]))
}

/// `x` at `ty`, chosen below one of the declared types.
pub fn id_le(ctx: &Ctx, names: &BTreeSet<Name>, x: Var, ty: Type, c: BoolFormula) -> Derivation {
    Derivation::new(TypeRule::IdLe, Judgement::new(ctx.clone(), names.clone(), Term::Var(x), c, ty), vec![])
}

pub fn or(c: BoolFormula, premises: Vec<Derivation>) -> Result<Derivation> {
    let first = premises.first().ok_or_else(|| shape("or needs a premise to read the subject from"))?;
    let (term, ty, tpl) = (t(first), first.judgement.ty.clone(), first.judgement.clone());
    Ok(conclude(TypeRule::Or, &tpl, term, c, ty, premises))
}

/// The empty `or`: any term at any type under an unsatisfiable constraint.
pub fn absurd(ctx: &Ctx, names: &BTreeSet<Name>, term: Term, ty: Type) -> Derivation {
    Derivation::new(TypeRule::Or, Judgement::new(ctx.clone(), names.clone(), term, BoolFormula::Bot, ty), vec![])
}

pub fn plus_l(p: Derivation, right: Term, a: Name, i: u32, c: BoolFormula) -> Derivation {
    let term = Term::Choice(t(&p).into(), right.into(), a, i);
    let ty = p.judgement.ty.clone();
    conclude(TypeRule::PlusL, &p.judgement.clone(), term, c, ty, vec![p])
}

pub fn plus_r(left: Term, p: Derivation, a: Name, i: u32, c: BoolFormula) -> Derivation {
    let term = Term::Choice(left.into(), t(&p).into(), a, i);
    let ty = p.judgement.ty.clone();
    conclude(TypeRule::PlusR, &p.judgement.clone(), term, c, ty, vec![p])
}

pub fn plus(l: Derivation, r: Derivation, a: Name, i: u32, c: BoolFormula) -> Derivation {
    let term = Term::Choice(t(&l).into(), t(&r).into(), a, i);
    let (ty, tpl) = (l.judgement.ty.clone(), l.judgement.clone());
    conclude(TypeRule::Plus, &tpl, term, c, ty, vec![l, r])
}

pub fn lam(x: Var, p: Derivation, c: BoolFormula) -> Result<Derivation> {
    let sx = p.judgement.lookup(x).cloned().ok_or_else(|| shape("bound variable missing from the premise"))?;
    let (qs, tau) = p.judgement.ty.split_prefix();
    let ty = Type::prefixed(&qs, Type::arrow(sx, tau.clone()));
    let mut tpl = p.judgement.clone();
    tpl.ctx.retain(|(y, _)| *y != x);
    Ok(conclude(TypeRule::Lam, &tpl, Term::Lam(x, t(&p).into()), c, ty, vec![p]))
}

fn codomain(f: &Derivation) -> Result<(Vec<Rational>, Type)> {
    let (qs, arrow) = f.judgement.ty.split_prefix();
    match arrow {
        Type::Arrow(_, cod) => Ok((qs, (**cod).clone())),
        _ => Err(shape("function premise must have an arrow type")),
    }
}

pub fn app(f: Derivation, u: Derivation, c: BoolFormula) -> Result<Derivation> {
    let (qs, cod) = codomain(&f)?;
    let term = Term::App(t(&f).into(), t(&u).into());
    let tpl = f.judgement.clone();
    Ok(conclude(TypeRule::App, &tpl, term, c, Type::prefixed(&qs, cod), vec![f, u]))
}

pub fn cbv(f: Derivation, u: Derivation, c: BoolFormula) -> Result<Derivation> {
    let (qs, cod) = codomain(&f)?;
    let Type::Counted(r, _) = &u.judgement.ty else { return Err(shape("argument must be quantified")) };
    let ty = Type::counted(r.clone(), Type::prefixed(&qs, cod));
    let term = Term::CbvApp(t(&f).into(), t(&u).into());
    let tpl = f.judgement.clone();
    Ok(conclude(TypeRule::Cbv, &tpl, term, c, ty, vec![f, u]))
}

pub fn app_int(f: Derivation, args: Vec<Derivation>, arg: Term, c: BoolFormula) -> Result<Derivation> {
    let (qs, cod) = codomain(&f)?;
    let term = Term::App(t(&f).into(), arg.into());
    let tpl = f.judgement.clone();
    let mut premises = vec![f];
    premises.extend(args);
    Ok(conclude(TypeRule::AppInt, &tpl, term, c, Type::prefixed(&qs, cod), premises))
}

fn unbind(p: &Judgement, a: Name) -> Judgement {
    let mut tpl = p.clone();
    tpl.names.remove(&a);
    tpl
}

/// CbV counting rule at quantifier `q` (defaults to `mu(d)`).
pub fn mu(p: Derivation, a: Name, d: BoolFormula, q: Option<Rational>, c: BoolFormula) -> Result<Derivation> {
    let q = match q {
        Some(q) => q,
        None => measure(&d)?,
    };
    let tpl = unbind(&p.judgement, a);
    let ty = Type::counted(q, p.judgement.ty.clone());
    Ok(conclude(TypeRule::Mu, &tpl, Term::Nu(a, t(&p).into()), c, ty, vec![p]).with_d(d))
}

/// CbN counting rule multiplying the single quantifier by `s` (defaults to `mu(d)`).
pub fn mu_prime(p: Derivation, a: Name, d: BoolFormula, s: Option<Rational>, c: BoolFormula) -> Result<Derivation> {
    let s = match s {
        Some(s) => s,
        None => measure(&d)?,
    };
    let Type::Counted(q, sigma) = &p.judgement.ty else { return Err(shape("premise must be quantified")) };
    let ty = Type::counted(q * &s, (**sigma).clone());
    let tpl = unbind(&p.judgement, a);
    Ok(conclude(TypeRule::MuPrime, &tpl, Term::Nu(a, t(&p).into()), c, ty, vec![p]).with_d(d).with_s(s))
}

/// Summed counting rule; each bound defaults to the measure of its event.
pub fn mu_sigma(ps: Vec<Derivation>, a: Name, ds: Vec<BoolFormula>, c: BoolFormula) -> Result<Derivation> {
    let first = ps.first().ok_or_else(|| shape("mu_sigma needs a premise"))?;
    let Type::Counted(_, sigma) = &first.judgement.ty else { return Err(shape("premise must be quantified")) };
    let mut total = Rational::from_integer(0.into());
    for (p, d) in ps.iter().zip(&ds) {
        let Type::Counted(q, _) = &p.judgement.ty else { return Err(shape("premise must be quantified")) };
        total += q * measure(d)?;
    }
    let ty = Type::counted(total, (**sigma).clone());
    let tpl = unbind(&first.judgement, a);
    let term = Term::Nu(a, t(first).into());
    Ok(conclude(TypeRule::MuSigma, &tpl, term, c, ty, ps).with_ds(ds, vec![]))
}

/// `hn` when `ground` is `Type::Hn`, `n` when it is `Type::N`.
pub fn ground(p: Derivation, ground: Type, c: BoolFormula) -> Result<Derivation> {
    let rule = match ground {
        Type::Hn => TypeRule::Hn,
        Type::N => TypeRule::N,
        _ => return Err(shape("ground must be hn or n")),
    };
    let Type::Counted(q, _) = &p.judgement.ty else { return Err(shape("premise must be quantified")) };
    let ty = Type::counted(q.clone(), ground);
    let tpl = p.judgement.clone();
    Ok(conclude(rule, &tpl, t(&p), c, ty, vec![p]))
}
