//! Constructors that compute a proof rule's conclusion from its premises.
//!
//! Nothing is checked here; run the result through `check_proof`.

use std::collections::BTreeSet;

use super::kernel::{ProofDerivation, ProofRule, ProofSide, Sequent};
use super::Formula;
use crate::boolean::BoolFormula;
use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::rational::Rational;

pub type Hyps = Vec<(Var, Formula)>;

fn shape(msg: &str) -> Error {
    Error::RuleShape { path: "[]".into(), msg: msg.into() }
}

fn with(tpl: &Sequent, c: BoolFormula, formula: Formula) -> Sequent {
    Sequent { constraint: c, formula, ..tpl.clone() }
}

pub fn id(ctx: &Hyps, names: &BTreeSet<Name>, x: Var, c: BoolFormula) -> Result<ProofDerivation> {
    let f = ctx.iter().find(|(y, _)| *y == x).map(|(_, f)| f.clone()).ok_or_else(|| shape("unknown hypothesis"))?;
    let side = ProofSide { var: Some(x), ..Default::default() };
    Ok(ProofDerivation::new(ProofRule::Id, Sequent::new(ctx.clone(), names.clone(), c, f), side, vec![]))
}

pub fn bot(ctx: &Hyps, names: &BTreeSet<Name>, c: BoolFormula, f: Formula) -> ProofDerivation {
    ProofDerivation::new(ProofRule::Bot, Sequent::new(ctx.clone(), names.clone(), c, f), ProofSide::default(), vec![])
}

pub fn m(a: Name, i: u32, l: ProofDerivation, r: ProofDerivation, c: BoolFormula) -> ProofDerivation {
    let s = with(&l.sequent, c, l.sequent.formula.clone());
    let side = ProofSide { pivot: Some((a, i)), ..Default::default() };
    ProofDerivation::new(ProofRule::M, s, side, vec![l, r])
}

pub fn imp_i(x: Var, p: ProofDerivation, c: BoolFormula) -> Result<ProofDerivation> {
    let a = p.sequent.lookup(x).cloned().ok_or_else(|| shape("discharged hypothesis missing from the premise"))?;
    let mut s = with(&p.sequent, c, Formula::implies(a, p.sequent.formula.clone()));
    s.ctx.retain(|(y, _)| *y != x);
    let side = ProofSide { var: Some(x), ..Default::default() };
    Ok(ProofDerivation::new(ProofRule::ImpI, s, side, vec![p]))
}

pub fn imp_e(f: ProofDerivation, u: ProofDerivation, c: BoolFormula) -> Result<ProofDerivation> {
    let Formula::Implies(_, b) = &f.sequent.formula else { return Err(shape("major premise must be an implication")) };
    let s = with(&f.sequent, c, (**b).clone());
    Ok(ProofDerivation::new(ProofRule::ImpE, s, ProofSide::default(), vec![f, u]))
}

/// Counting introduction binding `a`, with event `d` and quantifier `q`.
pub fn ci(a: Name, d: BoolFormula, q: Rational, p: ProofDerivation, c: BoolFormula) -> ProofDerivation {
    let mut s = with(&p.sequent, c, Formula::count(q, p.sequent.formula.clone()));
    s.names.remove(&a);
    let side = ProofSide { name: Some(a), d: Some(d), ..Default::default() };
    ProofDerivation::new(ProofRule::Ci, s, side, vec![p])
}

/// Counting elimination; `minor` proves from the extra hypothesis `x`.
pub fn ce(x: Var, major: ProofDerivation, minor: ProofDerivation, c: BoolFormula) -> Result<ProofDerivation> {
    let Formula::Count(q, _) = &major.sequent.formula else { return Err(shape("major premise must be quantified")) };
    let s = with(&major.sequent, c, Formula::count(q.clone(), minor.sequent.formula.clone()));
    let side = ProofSide { var: Some(x), ..Default::default() };
    Ok(ProofDerivation::new(ProofRule::Ce, s, side, vec![major, minor]))
}
