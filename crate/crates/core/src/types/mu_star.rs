//! The generalized counting rule, built from `or` and the summed counting rule.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::derivation::{check_derivation, Derivation, Judgement, System, TypeRule};
use super::Type;
use crate::boolean::{entails, measure, BoolFormula};
use crate::error::{Error, Result};
use crate::name::Name;
use crate::rational::{pow2_inv, Rational};
use crate::term::Term;

/// From `G |-^{a1..an} t : b >-> C[q] s` in the intersection system, derive
/// `G |- nu a1 ... nu an. t : T >-> C[q * mu(b)] s`. `b` defaults to the
/// constraint of `d`; a given `b` must entail it.
pub fn apply_mu_star(d: &Derivation, b: Option<BoolFormula>) -> Result<Derivation> {
    check_derivation(d, System::Int)?;
    let j = &d.judgement;
    let Type::Counted(_, sigma) = &j.ty else {
        return Err(Error::Precondition("conclusion must be quantified".into()));
    };
    let b = b.unwrap_or_else(|| j.constraint.clone());
    if !entails(&b, &j.constraint)? {
        return Err(Error::Precondition(format!("`{b}` does not entail `{}`", j.constraint)));
    }
    if measure(&b)?.is_zero() {
        return Err(Error::Precondition(format!("`{b}` has measure 0")));
    }
    let mut names: Vec<Name> = j.names.iter().copied().collect();
    names.sort_by_key(|a| a.as_string());
    let builder = Builder { d, b: &b, sigma, names: &names };
    let out =
        builder.level(0, BoolFormula::Top)?.ok_or_else(|| Error::Precondition("no satisfying assignment".into()))?;
    check_derivation(&out, System::Int)?;
    Ok(out)
}

struct Builder<'a> {
    d: &'a Derivation,
    b: &'a BoolFormula,
    sigma: &'a Type,
    names: &'a [Name],
}

impl Builder<'_> {
    fn judgement(&self, k: usize, constraint: BoolFormula, q: Rational) -> Judgement {
        let term = self.names[k..].iter().rev().fold(self.d.judgement.term.clone(), |t, a| Term::Nu(*a, t.into()));
        Judgement {
            ctx: self.d.judgement.ctx.clone(),
            names: self.names[..k].iter().copied().collect::<BTreeSet<_>>(),
            term,
            constraint,
            ty: Type::counted(q, self.sigma.clone()),
        }
    }

    /// A derivation under the partial minterm `m` over the first `k` names,
    /// or `None` when no completion of `m` satisfies `b`.
    fn level(&self, k: usize, m: BoolFormula) -> Result<Option<Derivation>> {
        if k == self.names.len() {
            if !entails(&m, self.b)? {
                return Ok(None);
            }
            let j = Judgement { constraint: m, ..self.d.judgement.clone() };
            return Ok(Some(Derivation::new(TypeRule::Or, j, vec![self.d.clone()])));
        }
        let a = self.names[k];
        let atoms: Vec<u32> = self.b.atoms().into_iter().filter(|(n, _)| *n == a).map(|(_, i)| i).collect();
        let weight = pow2_inv(atoms.len());
        let mut premises = Vec::new();
        let mut ds = Vec::new();
        let mut total = Rational::zero();
        for bits in 0u64..(1u64 << atoms.len()) {
            let e = atoms.iter().enumerate().fold(BoolFormula::Top, |acc, (n, &i)| {
                let lit = BoolFormula::atom(a, i);
                let lit = if bits >> n & 1 == 1 { lit } else { BoolFormula::not_s(lit) };
                BoolFormula::and_s(acc, lit)
            });
            if let Some(p) = self.level(k + 1, BoolFormula::and_s(m.clone(), e.clone()))? {
                let Type::Counted(qp, _) = &p.judgement.ty else { unreachable!() };
                total += qp * &weight;
                premises.push(p);
                ds.push(e);
            }
        }
        if premises.is_empty() {
            return Ok(None);
        }
        let ss = vec![weight; ds.len()];
        let j = self.judgement(k, m, total);
        Ok(Some(Derivation::new(TypeRule::MuSigma, j, premises).with_ds(ds, ss)))
    }
}
