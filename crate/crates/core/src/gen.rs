//! Random terms and random typed derivations for property tests and benches.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::boolean::BoolFormula;
use crate::name::{Name, Var};
use crate::proof::{self, build::Hyps, Formula, ProofDerivation};
use crate::rational::{pow2_inv, Rational};
use crate::term::{identity, omega, Term};
use crate::types::build::{self, Ctx};
use crate::types::{Derivation, Type};

const VARS: [&str; 3] = ["x", "y", "z"];
const NAMES: [&str; 3] = ["a", "b", "c"];

/// A random term with at most `size` nodes. Variables and names are drawn
/// from small pools so that binders, choices and generators collide often.
pub fn random_term<R: Rng>(rng: &mut R, size: usize, braces: bool) -> Term {
    let vars: Vec<Var> = VARS.iter().map(|x| Var::new(x)).collect();
    let names: Vec<Name> = NAMES.iter().map(|a| Name::new(a)).collect();
    term_of(rng, size.max(1), braces, &vars, &names)
}

fn term_of<R: Rng>(rng: &mut R, size: usize, braces: bool, vars: &[Var], names: &[Name]) -> Term {
    if size <= 1 {
        return Term::Var(*vars.choose(rng).unwrap());
    }
    let kinds = if size < 3 {
        2
    } else if braces {
        5
    } else {
        4
    };
    match rng.random_range(0..kinds) {
        0 => Term::Lam(*vars.choose(rng).unwrap(), term_of(rng, size - 1, braces, vars, names).into()),
        1 => Term::Nu(*names.choose(rng).unwrap(), term_of(rng, size - 1, braces, vars, names).into()),
        k => {
            let left = rng.random_range(1..size - 1);
            let l = term_of(rng, left, braces, vars, names);
            let r = term_of(rng, size - 1 - left, braces, vars, names);
            match k {
                2 => Term::App(l.into(), r.into()),
                3 => Term::Choice(l.into(), r.into(), *names.choose(rng).unwrap(), rng.random_range(0..2)),
                _ => Term::CbvApp(l.into(), r.into()),
            }
        }
    }
}

/// A random closed derivation in the CbV system. Choices reuse names and
/// indices, so every permutation gets exercised by reduction.
pub fn random_cbv_derivation<R: Rng>(rng: &mut R, depth: usize) -> Derivation {
    loop {
        let ty = random_type(rng, 2, true);
        let mut g = Gen { rng, fresh: 0 };
        if let Some(d) = g.at(&Vec::new(), &BTreeSet::new(), BoolFormula::Top, &ty, depth) {
            return d;
        }
    }
}

fn random_quantifier<R: Rng>(rng: &mut R) -> Rational {
    pow2_inv(rng.random_range(0..3))
}

/// A random type of nesting depth at most `depth`; `prefixed` allows quantifier prefixes.
pub fn random_type<R: Rng>(rng: &mut R, depth: usize, prefixed: bool) -> Type {
    let mut qs = Vec::new();
    if prefixed {
        for _ in 0..rng.random_range(0..3) {
            qs.push(random_quantifier(rng));
        }
    }
    let base = if depth == 0 || rng.random_bool(0.4) {
        Type::O
    } else {
        Type::arrow(random_type(rng, depth - 1, true), random_type(rng, depth - 1, false))
    };
    Type::prefixed(&qs, base)
}

struct Gen<'r, R> {
    rng: &'r mut R,
    fresh: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn junk(&mut self) -> Term {
        if self.rng.random_bool(0.5) {
            omega()
        } else {
            identity()
        }
    }

    /// A derivation of some term at `ty` under `c`, or `None` if the budget ran out.
    fn at(&mut self, ctx: &Ctx, names: &BTreeSet<Name>, c: BoolFormula, ty: &Type, depth: usize) -> Option<Derivation> {
        let (qs, sigma) = ty.split_prefix();
        let mut options: Vec<u8> = Vec::new();
        if ctx.iter().any(|(_, t)| t == ty) {
            options.extend([0, 0, 0]);
        }
        if !qs.is_empty() {
            options.extend([1, 1]);
        }
        if matches!(sigma, Type::Arrow(..)) {
            options.extend([2, 2]);
        }
        if depth > 0 {
            if !names.is_empty() {
                options.extend([3, 4, 5]);
            }
            options.extend([6, 6]);
            if !qs.is_empty() {
                options.push(7);
            }
            options.push(8);
        }
        // bounded retries keep generation linear in the derivation size
        for _ in 0..3 {
            if options.is_empty() {
                break;
            }
            let k = self.rng.random_range(0..options.len());
            let pick = options.swap_remove(k);
            if let Some(d) = self.rule(pick, ctx, names, c.clone(), ty, depth) {
                return Some(d);
            }
        }
        None
    }

    fn atom(&mut self, names: &BTreeSet<Name>) -> (Name, u32, BoolFormula) {
        let ns: Vec<Name> = names.iter().copied().collect();
        let a = *ns.choose(self.rng).unwrap();
        let i = self.rng.random_range(0..2);
        (a, i, BoolFormula::atom(a, i))
    }

    fn rule(
        &mut self,
        pick: u8,
        ctx: &Ctx,
        names: &BTreeSet<Name>,
        c: BoolFormula,
        ty: &Type,
        depth: usize,
    ) -> Option<Derivation> {
        let (qs, sigma) = ty.split_prefix();
        let sub = depth.saturating_sub(1);
        match pick {
            0 => {
                let xs: Vec<Var> = ctx.iter().filter(|(_, t)| t == ty).map(|(x, _)| *x).collect();
                build::id(ctx, names, *xs.choose(self.rng)?, c).ok()
            }
            1 => {
                self.fresh += 1;
                let a = Name::new(&format!("{}{}", NAMES[self.fresh % 3], self.fresh));
                let mut d = BoolFormula::Top;
                let mut k = 0;
                for i in 0..2 {
                    if pow2_inv(k + 1) >= qs[0] && self.rng.random_bool(0.5) {
                        let lit = BoolFormula::atom(a, i);
                        let lit = if self.rng.random_bool(0.5) { lit } else { BoolFormula::not_s(lit) };
                        d = BoolFormula::and_s(d, lit);
                        k += 1;
                    }
                }
                let mut inner = names.clone();
                inner.insert(a);
                let rest = Type::prefixed(&qs[1..], sigma.clone());
                let p = self.at(ctx, &inner, BoolFormula::and_s(c.clone(), d.clone()), &rest, sub)?;
                build::mu(p, a, d, Some(qs[0].clone()), c).ok()
            }
            2 => {
                let Type::Arrow(dom, cod) = sigma else { return None };
                self.fresh += 1;
                let x = Var::new(&format!("{}{}", VARS[self.fresh % 3], self.fresh));
                let mut inner = ctx.clone();
                inner.push((x, (**dom).clone()));
                let p = self.at(&inner, names, c.clone(), &Type::prefixed(&qs, (**cod).clone()), sub)?;
                build::lam(x, p, c).ok()
            }
            3 => {
                let (a, i, _) = self.atom(names);
                let l = self.at(ctx, names, c.clone(), ty, sub)?;
                let r = self.at(ctx, names, c.clone(), ty, sub)?;
                Some(build::plus(l, r, a, i, c))
            }
            4 => {
                let (a, i, x) = self.atom(names);
                let cl = BoolFormula::and_s(c.clone(), x.clone());
                let cr = BoolFormula::and_s(c.clone(), BoolFormula::not_s(x));
                let dl = self.at(ctx, names, cl.clone(), ty, sub)?;
                let dr = self.at(ctx, names, cr.clone(), ty, sub)?;
                let (lt, rt) = (dl.judgement.term.clone(), dr.judgement.term.clone());
                let l = build::plus_l(dl, rt, a, i, cl);
                let r = build::plus_r(lt, dr, a, i, cr);
                build::or(c, vec![l, r]).ok()
            }
            5 => {
                let d = self.at(ctx, names, c.clone(), ty, sub)?;
                build::or(c, vec![d.clone(), d]).ok()
            }
            6 => {
                let dom = random_type(self.rng, 1, true);
                let f =
                    self.at(ctx, names, c.clone(), &Type::prefixed(&qs, Type::arrow(dom.clone(), sigma.clone())), sub)?;
                let u = self.at(ctx, names, c.clone(), &dom, sub)?;
                build::app(f, u, c).ok()
            }
            7 => {
                let dom = random_type(self.rng, 1, true);
                let fty = Type::prefixed(&qs[1..], Type::arrow(dom.clone(), sigma.clone()));
                let f = self.at(ctx, names, c.clone(), &fty, sub)?;
                let u = self.at(ctx, names, c.clone(), &Type::counted(qs[0].clone(), dom), sub)?;
                build::cbv(f, u, c).ok()
            }
            8 => {
                // a choice already decided by `c`: the other branch stays untyped
                let (a, i, _) = c
                    .atoms()
                    .into_iter()
                    .find(|&(a, i)| crate::boolean::entails(&c, &BoolFormula::atom(a, i)).unwrap_or(false))
                    .map(|(a, i)| (a, i, ()))?;
                let d = self.at(ctx, names, c.clone(), ty, sub)?;
                Some(build::plus_l(d, self.junk(), a, i, c))
            }
            _ => None,
        }
    }
}

fn random_formula<R: Rng>(rng: &mut R, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.4) {
        return Formula::prop("p");
    }
    if rng.random_bool(0.5) {
        Formula::implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1))
    } else {
        Formula::count(random_quantifier(rng), random_formula(rng, depth - 1))
    }
}

/// A random closed proof of `p -> A` of height at most `depth`. Detours are
/// favoured: eliminations are mostly fed by matching introductions.
pub fn random_proof<R: Rng>(rng: &mut R, depth: usize) -> ProofDerivation {
    let h = Var::new("h");
    let hyps: Hyps = vec![(h, Formula::prop("p"))];
    loop {
        let goal = random_formula(rng, 2);
        let mut g = ProofGen { rng, fresh: 0 };
        if let Some(body) = g.prove(&hyps, &BTreeSet::new(), BoolFormula::Top, &goal, depth.saturating_sub(1)) {
            if let Ok(p) = proof::build::imp_i(h, body, BoolFormula::Top) {
                return p;
            }
        }
    }
}

struct ProofGen<'r, R> {
    rng: &'r mut R,
    fresh: usize,
}

impl<R: Rng> ProofGen<'_, R> {
    fn var(&mut self) -> Var {
        self.fresh += 1;
        Var::new(&format!("v{}", self.fresh))
    }

    /// A proof of height at most `height`, or `None`.
    fn prove(
        &mut self,
        hyps: &Hyps,
        names: &BTreeSet<Name>,
        c: BoolFormula,
        goal: &Formula,
        height: usize,
    ) -> Option<ProofDerivation> {
        if height == 0 {
            return None;
        }
        if crate::boolean::entails(&c, &BoolFormula::Bot).unwrap_or(false) {
            return Some(proof::build::bot(hyps, names, c, goal.clone()));
        }
        let mut options: Vec<u8> = Vec::new();
        if hyps.iter().any(|(_, f)| f == goal) {
            options.extend([0, 0]);
        }
        if !matches!(goal, Formula::Prop(_)) {
            options.extend([1, 1]);
        }
        if height > 1 {
            if !names.is_empty() {
                options.extend([2, 3]);
            }
            options.extend([4, 4]);
            if matches!(goal, Formula::Count(..)) {
                options.extend([5, 5]);
            }
        }
        for _ in 0..3 {
            if options.is_empty() {
                break;
            }
            let k = self.rng.random_range(0..options.len());
            let pick = options.swap_remove(k);
            if let Some(p) = self.rule(pick, hyps, names, c.clone(), goal, height) {
                return Some(p);
            }
        }
        None
    }

    /// Introduction of the goal's main connective.
    fn intro(
        &mut self,
        hyps: &Hyps,
        names: &BTreeSet<Name>,
        c: BoolFormula,
        goal: &Formula,
        height: usize,
    ) -> Option<ProofDerivation> {
        let sub = height - 1;
        match goal {
            Formula::Implies(a, b) => {
                let x = self.var();
                let mut inner = hyps.clone();
                inner.push((x, (**a).clone()));
                let p = self.prove(&inner, names, c.clone(), b, sub)?;
                proof::build::imp_i(x, p, c).ok()
            }
            Formula::Count(q, a) => {
                self.fresh += 1;
                let n = Name::new(&format!("{}{}", NAMES[self.fresh % 3], self.fresh));
                let events = [
                    BoolFormula::Top,
                    BoolFormula::atom(n, 0),
                    BoolFormula::disj(BoolFormula::atom(n, 0), BoolFormula::atom(n, 1)),
                    BoolFormula::conj(BoolFormula::atom(n, 0), BoolFormula::negate(BoolFormula::atom(n, 1))),
                ];
                let fit: Vec<&BoolFormula> =
                    events.iter().filter(|d| crate::boolean::measure(d).is_ok_and(|m| m >= *q)).collect();
                let d = (*fit.choose(self.rng)?).clone();
                let mut inner = names.clone();
                inner.insert(n);
                let p = self.prove(hyps, &inner, BoolFormula::and_s(c.clone(), d.clone()), a, sub)?;
                Some(proof::build::ci(n, d, q.clone(), p, c))
            }
            Formula::Prop(_) => None,
        }
    }

    fn rule(
        &mut self,
        pick: u8,
        hyps: &Hyps,
        names: &BTreeSet<Name>,
        c: BoolFormula,
        goal: &Formula,
        height: usize,
    ) -> Option<ProofDerivation> {
        let sub = height - 1;
        match pick {
            0 => {
                let xs: Vec<Var> = hyps.iter().filter(|(_, f)| f == goal).map(|(x, _)| *x).collect();
                proof::build::id(hyps, names, *xs.choose(self.rng)?, c).ok()
            }
            1 => self.intro(hyps, names, c, goal, height),
            2 => {
                // pivot on a bit the constraint already mentions when there is one
                let atoms: Vec<(Name, u32)> = c.atoms().into_iter().collect();
                let (a, i) = match atoms.choose(self.rng) {
                    Some(&(a, i)) if self.rng.random_bool(0.6) => (a, i),
                    _ => {
                        let ns: Vec<Name> = names.iter().copied().collect();
                        (*ns.choose(self.rng)?, self.rng.random_range(0..2))
                    }
                };
                let x = BoolFormula::atom(a, i);
                let l = self.prove(hyps, names, BoolFormula::and_simplify(c.clone(), x.clone()), goal, sub)?;
                let r =
                    self.prove(hyps, names, BoolFormula::and_simplify(c.clone(), BoolFormula::negate(x)), goal, sub)?;
                Some(proof::build::m(a, i, l, r, c))
            }
            3 => {
                let ns: Vec<Name> = names.iter().copied().collect();
                let a = *ns.choose(self.rng)?;
                let p = self.prove(hyps, names, c.clone(), goal, sub)?;
                Some(proof::build::m(a, self.rng.random_range(0..2), p.clone(), p, c))
            }
            4 => {
                let a = random_formula(self.rng, 1);
                let fun = Formula::implies(a.clone(), goal.clone());
                let f = if self.rng.random_bool(0.7) {
                    self.intro(hyps, names, c.clone(), &fun, sub)?
                } else {
                    self.prove(hyps, names, c.clone(), &fun, sub)?
                };
                let u = self.prove(hyps, names, c.clone(), &a, sub)?;
                proof::build::imp_e(f, u, c).ok()
            }
            5 => {
                let Formula::Count(q, m) = goal else { return None };
                let a = random_formula(self.rng, 1);
                let major_goal = Formula::count(q.clone(), a.clone());
                let major = if self.rng.random_bool(0.7) {
                    self.intro(hyps, names, c.clone(), &major_goal, sub)?
                } else {
                    self.prove(hyps, names, c.clone(), &major_goal, sub)?
                };
                let x = self.var();
                let mut inner = hyps.clone();
                inner.push((x, a));
                let minor = self.prove(&inner, names, c.clone(), m, sub)?;
                proof::build::ce(x, major, minor, c).ok()
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{check_derivation, System};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_derivations_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let d = random_cbv_derivation(&mut rng, 4);
            check_derivation(&d, System::Cbv).unwrap_or_else(|e| panic!("{e}\n{}", d.judgement));
        }
    }

    #[test]
    fn random_proofs_check_and_simulate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut steps = 0;
        for _ in 0..60 {
            let p = random_proof(&mut rng, 6);
            assert!(p.height() <= 6);
            crate::proof::check_proof(&p).unwrap_or_else(|e| panic!("{e}\n{}", p.sequent));
            let report = crate::proof::verify_simulation(&p, 1000).unwrap();
            assert!(report.normalized && report.failures().is_empty(), "{}", report.to_json());
            steps += report.steps.len();
        }
        assert!(steps > 60, "only {steps} normalization steps");
    }

    #[test]
    fn random_terms_respect_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            assert!(random_term(&mut rng, 40, true).size() <= 40);
        }
    }
}
