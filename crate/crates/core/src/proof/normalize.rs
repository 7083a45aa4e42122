//! Proof normalization: the two detour reductions and the permutations of `m`.

use std::collections::BTreeSet;
use std::fmt;

use super::kernel::{check_proof, ProofDerivation, ProofRule, ProofSide, Sequent};
use super::Formula;
use crate::boolean::BoolFormula;
use crate::error::{Error, Result};
use crate::name::{Name, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofRedex {
    /// `imp_e` on an `imp_i`.
    ImpCut,
    /// `ce` on a `ci`.
    CountCut,
    /// `m` of two identical proofs.
    MIdem,
    MMergeLeft,
    MMergeRight,
    MOverImpI,
    MOverImpEMajor,
    MOverImpEMinor,
    MOverCi,
    MOverCeMajor,
    MOverCeMinor,
}

impl ProofRedex {
    pub fn tag(self) -> &'static str {
        match self {
            ProofRedex::ImpCut => "imp_cut",
            ProofRedex::CountCut => "count_cut",
            ProofRedex::MIdem => "m_idem",
            ProofRedex::MMergeLeft => "m_merge_left",
            ProofRedex::MMergeRight => "m_merge_right",
            ProofRedex::MOverImpI => "m_over_imp_i",
            ProofRedex::MOverImpEMajor => "m_over_imp_e_major",
            ProofRedex::MOverImpEMinor => "m_over_imp_e_minor",
            ProofRedex::MOverCi => "m_over_ci",
            ProofRedex::MOverCeMajor => "m_over_ce_major",
            ProofRedex::MOverCeMinor => "m_over_ce_minor",
        }
    }
}

impl fmt::Display for ProofRedex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One normalization step: which redex fired, where, and the whole new proof.
#[derive(Clone, Debug)]
pub struct ProofStep {
    pub redex: ProofRedex,
    pub path: Vec<usize>,
    pub result: ProofDerivation,
}

fn node(rule: ProofRule, sequent: Sequent, side: ProofSide, premises: Vec<ProofDerivation>) -> ProofDerivation {
    ProofDerivation::new(rule, sequent, side, premises)
}

/// Replace the root constraint. Sound whenever the new one entails the old.
fn at(mut p: ProofDerivation, c: BoolFormula) -> ProofDerivation {
    p.sequent.constraint = c;
    p
}

fn with_constraint(s: &Sequent, c: BoolFormula) -> Sequent {
    Sequent { constraint: c, ..s.clone() }
}

fn and(b: &BoolFormula, c: &BoolFormula) -> BoolFormula {
    BoolFormula::and_simplify(b.clone(), c.clone())
}

fn rename_var(p: &ProofDerivation, x: Var, y: Var) -> ProofDerivation {
    let mut out = p.clone();
    for (z, _) in &mut out.sequent.ctx {
        if *z == x {
            *z = y;
        }
    }
    if out.side.var == Some(x) {
        out.side.var = Some(y);
    }
    out.premises = p.premises.iter().map(|q| rename_var(q, x, y)).collect();
    out
}

fn rename_name(p: &ProofDerivation, a: Name, b: Name) -> ProofDerivation {
    let mut out = p.clone();
    if out.sequent.names.remove(&a) {
        out.sequent.names.insert(b);
    }
    out.sequent.constraint = p.sequent.constraint.rename_name(a, b);
    if let Some((n, i)) = out.side.pivot {
        if n == a {
            out.side.pivot = Some((b, i));
        }
    }
    if out.side.name == Some(a) {
        out.side.name = Some(b);
    }
    out.side.d = p.side.d.as_ref().map(|d| d.rename_name(a, b));
    out.premises = p.premises.iter().map(|q| rename_name(q, a, b)).collect();
    out
}

/// The premise index where `p` discharges a hypothesis, if any.
fn binder_premise(p: &ProofDerivation) -> Option<usize> {
    match p.rule {
        ProofRule::ImpI => Some(0),
        ProofRule::Ce => Some(1),
        _ => None,
    }
}

/// Add hypotheses and names throughout `p`, renaming inner binders that would clash.
fn weaken(p: &ProofDerivation, hyps: &[(Var, Formula)], names: &BTreeSet<Name>) -> ProofDerivation {
    let mut p = p.clone();
    if let (Some(k), Some(x)) = (binder_premise(&p), p.side.var) {
        if hyps.iter().any(|(y, _)| *y == x) {
            let y = x.fresh();
            p.premises[k] = rename_var(&p.premises[k], x, y);
            p.side.var = Some(y);
        }
    }
    if p.rule == ProofRule::Ci {
        if let Some(a) = p.side.name.filter(|a| names.contains(a)) {
            let b = a.fresh();
            p.premises[0] = rename_name(&p.premises[0], a, b);
            p.side.name = Some(b);
            p.side.d = p.side.d.map(|d| d.rename_name(a, b));
        }
    }
    p.sequent.ctx.extend(hyps.iter().cloned());
    p.sequent.names.extend(names.iter().copied());
    p.premises = p.premises.iter().map(|q| weaken(q, hyps, names)).collect();
    p
}

/// The admissible substitution rule: `sigma` proves `x`'s formula from the
/// hypotheses of `pi` minus `x`; the result proves `pi`'s conclusion without
/// `x`, every constraint strengthened by `sigma`'s.
pub fn subst(sigma: &ProofDerivation, x: Var, pi: &ProofDerivation) -> ProofDerivation {
    fn go(
        sigma: &ProofDerivation,
        x: Var,
        p: &ProofDerivation,
        hyps: &mut Vec<(Var, Formula)>,
        names: &mut BTreeSet<Name>,
    ) -> ProofDerivation {
        let c = and(&p.sequent.constraint, &sigma.sequent.constraint);
        if p.rule == ProofRule::Id && p.side.var == Some(x) {
            return at(weaken(sigma, hyps, names), c);
        }
        let mut out = at(p.clone(), c);
        out.sequent.ctx.retain(|(y, _)| *y != x);
        out.premises = p
            .premises
            .iter()
            .enumerate()
            .map(|(k, q)| {
                let bound = match (binder_premise(p), p.side.var) {
                    (Some(j), Some(y)) if j == k => q.sequent.lookup(y).map(|f| (y, f.clone())),
                    _ => None,
                };
                let fresh_name = match p.rule {
                    ProofRule::Ci => p.side.name.filter(|a| names.insert(*a)),
                    _ => None,
                };
                if let Some(h) = &bound {
                    hyps.push(h.clone());
                }
                let r = go(sigma, x, q, hyps, names);
                if bound.is_some() {
                    hyps.pop();
                }
                if let Some(a) = fresh_name {
                    names.remove(&a);
                }
                r
            })
            .collect();
        out
    }
    go(sigma, x, pi, &mut Vec::new(), &mut BTreeSet::new())
}

/// Split along `m`'s premises, applying `make` to each with its constraint.
fn split(
    s: &Sequent,
    m: &ProofDerivation,
    make: impl Fn(&ProofDerivation, BoolFormula) -> ProofDerivation,
) -> ProofDerivation {
    let (l, r) = (&m.premises[0], &m.premises[1]);
    let b = &s.constraint;
    let left = make(l, and(b, &l.sequent.constraint));
    let right = make(r, and(b, &r.sequent.constraint));
    node(ProofRule::M, s.clone(), m.side.clone(), vec![left, right])
}

fn local(p: &ProofDerivation) -> Option<(ProofRedex, ProofDerivation)> {
    let s = &p.sequent;
    let b = &s.constraint;
    let ps = &p.premises;
    let is_m = |k: usize| ps[k].rule == ProofRule::M;
    match p.rule {
        ProofRule::ImpE => {
            let (f, u) = (&ps[0], &ps[1]);
            if f.rule == ProofRule::ImpI {
                let x = f.side.var?;
                let body = at(f.premises[0].clone(), b.clone());
                return Some((ProofRedex::ImpCut, subst(u, x, &body)));
            }
            if is_m(0) {
                let out = split(s, f, |q, c| {
                    node(ProofRule::ImpE, with_constraint(s, c), ProofSide::default(), vec![q.clone(), u.clone()])
                });
                return Some((ProofRedex::MOverImpEMajor, out));
            }
            if is_m(1) {
                let out = split(s, u, |q, c| {
                    node(ProofRule::ImpE, with_constraint(s, c), ProofSide::default(), vec![f.clone(), q.clone()])
                });
                return Some((ProofRedex::MOverImpEMinor, out));
            }
            None
        }
        ProofRule::M => {
            let (l, r) = (&ps[0], &ps[1]);
            if l == r {
                return Some((ProofRedex::MIdem, at(l.clone(), b.clone())));
            }
            if l.rule == ProofRule::M && l.side.pivot == p.side.pivot {
                let out = node(ProofRule::M, s.clone(), p.side.clone(), vec![l.premises[0].clone(), r.clone()]);
                return Some((ProofRedex::MMergeLeft, out));
            }
            if r.rule == ProofRule::M && r.side.pivot == p.side.pivot {
                let out = node(ProofRule::M, s.clone(), p.side.clone(), vec![l.clone(), r.premises[1].clone()]);
                return Some((ProofRedex::MMergeRight, out));
            }
            None
        }
        ProofRule::ImpI if is_m(0) => {
            let m = &ps[0];
            let make = |q: &ProofDerivation| {
                node(ProofRule::ImpI, with_constraint(s, q.sequent.constraint.clone()), p.side.clone(), vec![q.clone()])
            };
            let out = node(ProofRule::M, s.clone(), m.side.clone(), vec![make(&m.premises[0]), make(&m.premises[1])]);
            Some((ProofRedex::MOverImpI, out))
        }
        ProofRule::Ci if is_m(0) => {
            let m = &ps[0];
            let (a, i) = m.side.pivot?;
            if Some(a) == p.side.name {
                return None;
            }
            let x = BoolFormula::atom(a, i);
            let make = |q: &ProofDerivation, c: BoolFormula| {
                node(ProofRule::Ci, with_constraint(s, c), p.side.clone(), vec![q.clone()])
            };
            let left = make(&m.premises[0], and(b, &x));
            let right = make(&m.premises[1], and(b, &BoolFormula::negate(x)));
            Some((ProofRedex::MOverCi, node(ProofRule::M, s.clone(), m.side.clone(), vec![left, right])))
        }
        ProofRule::Ce => {
            let (major, minor) = (&ps[0], &ps[1]);
            if major.rule == ProofRule::Ci {
                let x = p.side.var?;
                let a = major.side.name?;
                let d = major.side.d.clone()?;
                let bd = BoolFormula::and_s(b.clone(), d);
                let pi = at(weaken(minor, &[], &BTreeSet::from([a])), bd.clone());
                let sigma = at(major.premises[0].clone(), bd);
                let inner = subst(&sigma, x, &pi);
                return Some((ProofRedex::CountCut, node(ProofRule::Ci, s.clone(), major.side.clone(), vec![inner])));
            }
            if is_m(0) {
                let out = split(s, major, |q, c| {
                    node(ProofRule::Ce, with_constraint(s, c), p.side.clone(), vec![q.clone(), minor.clone()])
                });
                return Some((ProofRedex::MOverCeMajor, out));
            }
            if is_m(1) {
                let out = split(s, minor, |q, c| {
                    node(ProofRule::Ce, with_constraint(s, c), p.side.clone(), vec![major.clone(), q.clone()])
                });
                return Some((ProofRedex::MOverCeMinor, out));
            }
            None
        }
        _ => None,
    }
}

fn find(p: &ProofDerivation, path: &mut Vec<usize>) -> Option<(ProofRedex, Vec<usize>, ProofDerivation)> {
    if let Some((r, q)) = local(p) {
        return Some((r, path.clone(), q));
    }
    for (k, q) in p.premises.iter().enumerate() {
        path.push(k);
        let found = find(q, path);
        path.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn replace_at(p: &ProofDerivation, path: &[usize], new: ProofDerivation) -> ProofDerivation {
    match path.split_first() {
        None => new,
        Some((k, rest)) => {
            let mut out = p.clone();
            out.premises[*k] = replace_at(&p.premises[*k], rest, new);
            out
        }
    }
}

/// The leftmost-outermost step, with the redex kind and position.
pub fn normalize_step_traced(p: &ProofDerivation) -> Result<Option<ProofStep>> {
    check_proof(p).map_err(|e| Error::IllFormed(format!("input proof does not check: {e}")))?;
    let Some((redex, path, local)) = find(p, &mut Vec::new()) else { return Ok(None) };
    let result = replace_at(p, &path, local);
    check_proof(&result).map_err(|e| Error::IllFormed(format!("{redex} at {path:?} broke the proof: {e}")))?;
    Ok(Some(ProofStep { redex, path, result }))
}

pub fn normalize_step(p: &ProofDerivation) -> Result<Option<ProofDerivation>> {
    Ok(normalize_step_traced(p)?.map(|s| s.result))
}

/// Normalize to a normal proof within `fuel` steps; returns it with the step count.
pub fn normalize(p: &ProofDerivation, fuel: usize) -> Result<(ProofDerivation, usize)> {
    let mut cur = p.clone();
    for n in 0..=fuel {
        match normalize_step(&cur)? {
            None => return Ok((cur, n)),
            Some(next) if n < fuel => cur = next,
            Some(_) => break,
        }
    }
    Err(Error::Fuel(format!("proof not normal after {fuel} steps")))
}
