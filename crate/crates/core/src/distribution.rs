//! Value distributions of permutative normal forms, termination
//! probabilities and a Monte Carlo cross-check.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::name::Name;
use crate::rational::Rational;
use crate::rewrite::{head_redex_in_pnf, is_hnv, is_pnf, is_pseudo_value, pnf_fast, Mode};
use crate::term::{canonical_key, Term};

/// Decomposition of a name-closed PNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PnfView {
    PseudoValue(Term),
    /// `nu name. tree`, where `tree` is a tree of `name`-choices over `support`.
    Generator {
        name: Name,
        tree: Term,
        support: Vec<Term>,
    },
}

fn check_closed_pnf(t: &Term, mode: Mode) -> Result<()> {
    mode.check(t)?;
    let fns = t.free_names();
    if !fns.is_empty() {
        let names: Vec<String> = fns.iter().map(|a| a.to_string()).collect();
        return Err(Error::OpenNames(names.join(", ")));
    }
    if !is_pnf(t, mode) {
        return Err(Error::NotPnf(t.to_string()));
    }
    Ok(())
}

fn leaves<'a>(t: &'a Term, a: Name, out: &mut Vec<&'a Term>) {
    match t {
        Term::Choice(l, r, b, _) if *b == a => {
            leaves(l, a, out);
            leaves(r, a, out);
        }
        _ => out.push(t),
    }
}

pub fn classify_pnf(t: &Term, mode: Mode) -> Result<PnfView> {
    check_closed_pnf(t, mode)?;
    Ok(match t {
        Term::Nu(a, tree) => {
            let mut ls = Vec::new();
            leaves(tree, *a, &mut ls);
            let mut seen = HashSet::new();
            let support = ls.into_iter().filter(|u| seen.insert(canonical_key(u, true))).cloned().collect();
            PnfView::Generator { name: *a, tree: (**tree).clone(), support }
        }
        _ => PnfView::PseudoValue(t.clone()),
    })
}

/// Finite sub-distribution over pseudo-values, keyed up to bound variables and names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Distribution {
    entries: BTreeMap<String, (Term, Rational)>,
}

impl Distribution {
    pub fn dirac(v: Term) -> Self {
        let mut d = Distribution::default();
        d.add(v, Rational::one());
        d
    }

    /// Add `w` to the class of `v`.
    pub fn add(&mut self, v: Term, w: Rational) {
        let k = canonical_key(&v, true);
        match self.entries.get_mut(&k) {
            Some((_, acc)) => *acc += w,
            None => {
                self.entries.insert(k, (v, w));
            }
        }
    }

    pub fn mass(&self) -> Rational {
        self.entries.values().map(|(_, w)| w.clone()).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.entries.values().map(|(t, w)| (t, w))
    }

    /// Weight of the class of `v`, zero when absent.
    pub fn weight(&self, v: &Term) -> Rational {
        self.entries.get(&canonical_key(v, true)).map(|(_, w)| w.clone()).unwrap_or_else(Rational::zero)
    }
}

/// Resolve the `a`-tree carrying the bits decided so far; each newly decided
/// index halves the weight.
fn walk_tree<'a>(
    t: &'a Term,
    a: Name,
    bits: &mut HashMap<u32, bool>,
    w: &Rational,
    out: &mut Vec<(&'a Term, Rational)>,
) {
    match t {
        Term::Choice(l, r, b, i) if *b == a => match bits.get(i) {
            Some(true) => walk_tree(l, a, bits, w, out),
            Some(false) => walk_tree(r, a, bits, w, out),
            None => {
                let half = w / Rational::from_integer(BigInt::from(2));
                for (bit, c) in [(true, l), (false, r)] {
                    bits.insert(*i, bit);
                    walk_tree(c, a, bits, &half, out);
                }
                bits.remove(i);
            }
        },
        _ => out.push((t, w.clone())),
    }
}

/// `(leaf, weight)` pairs of a generator, equal leaves not yet merged.
fn generator_branches(a: Name, tree: &Term) -> Vec<(&Term, Rational)> {
    let mut out = Vec::new();
    walk_tree(tree, a, &mut HashMap::new(), &Rational::one(), &mut out);
    out
}

pub fn distribution(t: &Term, mode: Mode) -> Result<Distribution> {
    check_closed_pnf(t, mode)?;
    let mut d = Distribution::default();
    accumulate(t, Rational::one(), &mut d)?;
    Ok(d)
}

fn accumulate(t: &Term, w: Rational, d: &mut Distribution) -> Result<()> {
    match t {
        Term::Nu(a, tree) => {
            for (leaf, lw) in generator_branches(*a, tree) {
                if !leaf.free_names().is_empty() {
                    return Err(Error::NotPnf(format!("leaf `{leaf}` keeps a free name")));
                }
                accumulate(leaf, &w * lw, d)?;
            }
            Ok(())
        }
        _ if is_pseudo_value(t) => {
            d.add(t.clone(), w);
            Ok(())
        }
        _ => Err(Error::NotPnf(t.to_string())),
    }
}

pub fn hnv_mass(t: &Term, mode: Mode) -> Result<Rational> {
    Ok(distribution(t, mode)?.iter().filter(|(v, _)| is_hnv(v, mode)).map(|(_, w)| w.clone()).sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerminationEstimate {
    pub value: Rational,
    /// Head beta steps performed over all explored branches.
    pub fuel_used: usize,
    /// No branch ran out of fuel.
    pub exact: bool,
}

impl TerminationEstimate {
    fn known(value: Rational) -> Self {
        TerminationEstimate { value, fuel_used: 0, exact: true }
    }
}

/// Branch-wise lower bound on the head normal value mass. Each path of head
/// reduction gets `fuel` beta steps. A pseudo-value that recurs along a path
/// with no probabilistic branching in between is divergent and counts 0 exactly.
pub fn hnv_lower_bound(t: &Term, mode: Mode, fuel: usize) -> Result<TerminationEstimate> {
    mode.check(t)?;
    closed(t)?;
    let mut seen = HashSet::new();
    hnv_rec(&pnf_fast(t, mode)?, mode, fuel, &mut seen)
}

fn closed(t: &Term) -> Result<()> {
    let fns = t.free_names();
    if fns.is_empty() {
        Ok(())
    } else {
        let names: Vec<String> = fns.iter().map(|a| a.to_string()).collect();
        Err(Error::OpenNames(names.join(", ")))
    }
}

fn over_branches(
    a: Name,
    tree: &Term,
    mut f: impl FnMut(&Term, bool) -> Result<TerminationEstimate>,
) -> Result<TerminationEstimate> {
    let mut acc = TerminationEstimate::known(Rational::zero());
    let branches = generator_branches(a, tree);
    let split = branches.len() > 1;
    for (leaf, w) in branches {
        let e = f(leaf, split)?;
        acc.value += w * e.value;
        acc.fuel_used += e.fuel_used;
        acc.exact &= e.exact;
    }
    Ok(acc)
}

fn hnv_rec(t: &Term, mode: Mode, fuel: usize, seen: &mut HashSet<String>) -> Result<TerminationEstimate> {
    if let Term::Nu(a, tree) = t {
        return over_branches(*a, tree, |leaf, split| {
            if split {
                hnv_rec(leaf, mode, fuel, &mut HashSet::new())
            } else {
                hnv_rec(leaf, mode, fuel, seen)
            }
        });
    }
    let Some((path, reduct)) = head_redex_in_pnf(t, mode) else {
        return Ok(TerminationEstimate::known(Rational::one()));
    };
    if !seen.insert(canonical_key(t, true)) {
        return Ok(TerminationEstimate::known(Rational::zero()));
    }
    if fuel == 0 {
        return Ok(TerminationEstimate { value: Rational::zero(), fuel_used: 0, exact: false });
    }
    let next = pnf_fast(&t.replace_at(&path, reduct), mode)?;
    let mut e = hnv_rec(&next, mode, fuel - 1, seen)?;
    e.fuel_used += 1;
    Ok(e)
}

/// Branch-wise lower bound on the probability of reaching a normal form,
/// recursing into the arguments of head normal values.
pub fn nf_mass(t: &Term, fuel: usize) -> Result<TerminationEstimate> {
    if t.contains_cbv() {
        return Err(Error::ModeViolation("normal-form mass is defined only without CbV application".into()));
    }
    closed(t)?;
    let mut seen = HashSet::new();
    nf_rec(&pnf_fast(t, Mode::Pe)?, fuel, &mut seen)
}

fn head_args(t: &Term) -> Vec<&Term> {
    let mut cur = t;
    while let Term::Lam(_, b) = cur {
        cur = b;
    }
    let mut args = Vec::new();
    while let Term::App(f, a) = cur {
        args.push(&**a);
        cur = f;
    }
    args.reverse();
    args
}

fn nf_rec(t: &Term, fuel: usize, seen: &mut HashSet<String>) -> Result<TerminationEstimate> {
    if let Term::Nu(a, tree) = t {
        return over_branches(*a, tree, |leaf, split| {
            if split {
                nf_rec(leaf, fuel, &mut HashSet::new())
            } else {
                nf_rec(leaf, fuel, seen)
            }
        });
    }
    match head_redex_in_pnf(t, Mode::Pe) {
        None => {
            let mut acc = TerminationEstimate::known(Rational::one());
            for u in head_args(t) {
                let e = nf_rec(u, fuel, &mut HashSet::new())?;
                if e.value.is_zero() && e.exact {
                    return Ok(TerminationEstimate {
                        value: Rational::zero(),
                        fuel_used: acc.fuel_used + e.fuel_used,
                        exact: true,
                    });
                }
                acc.value *= e.value;
                acc.fuel_used += e.fuel_used;
                acc.exact &= e.exact;
            }
            Ok(acc)
        }
        Some((path, reduct)) => {
            if !seen.insert(canonical_key(t, true)) {
                return Ok(TerminationEstimate::known(Rational::zero()));
            }
            if fuel == 0 {
                return Ok(TerminationEstimate { value: Rational::zero(), fuel_used: 0, exact: false });
            }
            let next = pnf_fast(&t.replace_at(&path, reduct), Mode::Pe)?;
            let mut e = nf_rec(&next, fuel - 1, seen)?;
            e.fuel_used += 1;
            Ok(e)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleOutcome {
    HeadNormal(Term),
    /// A term recurred with no bit drawn in between, so the run loops.
    Diverged,
    Exhausted,
}

/// One random run of head reduction, with generator bits drawn lazily from `rng`.
pub fn sample_with(t: &Term, mode: Mode, fuel: usize, rng: &mut impl Rng) -> Result<SampleOutcome> {
    mode.check(t)?;
    closed(t)?;
    let mut cur = pnf_fast(t, mode)?;
    let mut left = fuel;
    let mut seen = HashSet::new();
    loop {
        while let Term::Nu(a, tree) = &cur {
            seen.clear();
            let mut bits: HashMap<u32, bool> = HashMap::new();
            let mut node: &Term = tree;
            while let Term::Choice(l, r, b, i) = node {
                if b != a {
                    break;
                }
                let bit = *bits.entry(*i).or_insert_with(|| rng.random::<bool>());
                node = if bit { l } else { r };
            }
            cur = node.clone();
        }
        match head_redex_in_pnf(&cur, mode) {
            None => return Ok(SampleOutcome::HeadNormal(cur)),
            Some(_) if !seen.insert(canonical_key(&cur, true)) => return Ok(SampleOutcome::Diverged),
            Some(_) if left == 0 => return Ok(SampleOutcome::Exhausted),
            Some((path, reduct)) => {
                left -= 1;
                cur = pnf_fast(&cur.replace_at(&path, reduct), mode)?;
            }
        }
    }
}

pub fn sample_run(t: &Term, mode: Mode, seed: u64, fuel: usize) -> Result<SampleOutcome> {
    sample_with(t, mode, fuel, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnvEstimate {
    pub estimate: Rational,
    /// Binomial standard error, rounded to 1e-9.
    pub stderr: Rational,
    pub hits: usize,
    pub samples: usize,
}

/// Fraction of head-normalizing runs. Sample `i` uses stream `i` of the seeded
/// generator, so the result does not depend on scheduling.
pub fn estimate_hnv(t: &Term, mode: Mode, samples: usize, fuel: usize, seed: u64) -> Result<HnvEstimate> {
    if samples == 0 {
        return Err(Error::Precondition("at least one sample is required".into()));
    }
    mode.check(t)?;
    closed(t)?;
    let start = pnf_fast(t, mode)?;
    let outcomes: Result<Vec<bool>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            Ok(matches!(sample_with(&start, mode, fuel, &mut rng)?, SampleOutcome::HeadNormal(_)))
        })
        .collect();
    let hits = outcomes?.into_iter().filter(|h| *h).count();
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    let scale = 1_000_000_000i64;
    Ok(HnvEstimate {
        estimate: Rational::new(BigInt::from(hits), BigInt::from(samples)),
        stderr: Rational::new(BigInt::from((se * scale as f64).round() as i64), BigInt::from(scale)),
        hits,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::rational::rat;
    use crate::term::alpha_eq;
    use num_traits::Signed;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn one_fair_bit() {
        let t = p("nu a. I (+a.0) OMEGA");
        let d = distribution(&t, Mode::Pe).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.weight(&p("I")), rat(1, 2));
        assert_eq!(d.weight(&p("OMEGA")), rat(1, 2));
        assert_eq!(hnv_mass(&t, Mode::Pe).unwrap(), rat(1, 2));
        match classify_pnf(&t, Mode::Pe).unwrap() {
            PnfView::Generator { support, .. } => {
                assert_eq!(support.len(), 2);
                assert!(alpha_eq(&support[0], &p("I")));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn dirac_and_errors() {
        let id = p("\\x. x");
        assert_eq!(distribution(&id, Mode::Pe).unwrap(), Distribution::dirac(id.clone()));
        assert_eq!(classify_pnf(&id, Mode::Pe).unwrap(), PnfView::PseudoValue(id));
        assert_eq!(
            classify_pnf(&p("x (nu a. y (+a.0) z)"), Mode::Pe).unwrap(),
            PnfView::PseudoValue(p("x (nu a. y (+a.0) z)"))
        );
        assert_eq!(distribution(&p("x (+a.0) y"), Mode::Pe).unwrap_err().code(), "E_OPEN_NAMES");
        assert_eq!(distribution(&p("nu a. \\x. x (+a.0) y"), Mode::Pe).unwrap_err().code(), "E_NOT_PNF");
    }

    #[test]
    fn equal_leaves_aggregate() {
        let t = p("nu a. (I (+a.1) OMEGA) (+a.0) (OMEGA (+a.1) \\y. y)");
        let d = distribution(&t, Mode::Pe).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.mass(), rat(1, 1));
        assert_eq!(d.weight(&p("I")), rat(1, 2));
    }

    #[test]
    fn repeated_index_is_correlated() {
        // not a PNF, but the tree walk must still read a.0 once
        let a = Name::new("a");
        let tree = p("I (+a.0) (OMEGA (+a.0) I)");
        let br = generator_branches(a, &tree);
        assert_eq!(br.len(), 2);
        assert_eq!(br[1].1, rat(1, 2));
        assert!(alpha_eq(br[1].0, &p("I")));
    }

    #[test]
    fn hnv_bounds() {
        let e = hnv_lower_bound(&p("OMEGA"), Mode::Pe, 50).unwrap();
        assert_eq!(e.value, rat(0, 1));
        assert!(e.exact);
        let e = hnv_lower_bound(&p("nu a. I (+a.0) (I (+a.0) OMEGA)"), Mode::Pe, 50).unwrap();
        assert_eq!(e.value, rat(1, 2));
        let e = hnv_lower_bound(&p("nu a. I (+a.0) (I (+a.1) OMEGA)"), Mode::Pe, 50).unwrap();
        assert_eq!(e.value, rat(3, 4));
        let t = p("nu a. (\\x. \\y. (y (+a.0) I) x) (nu b. I (+b.0) OMEGA)");
        let e = hnv_lower_bound(&t, Mode::Pe, 100).unwrap();
        assert_eq!((e.value, e.exact), (rat(3, 4), true));
    }

    #[test]
    fn probabilistic_loop_is_not_claimed_exact() {
        // Y-style retry: halts with probability 1 but never in bounded depth
        let t = p("(\\f. f f) (\\g. nu a. I (+a.0) (g g))");
        let e5 = hnv_lower_bound(&t, Mode::Pe, 5).unwrap();
        let e20 = hnv_lower_bound(&t, Mode::Pe, 20).unwrap();
        assert!(!e5.exact);
        assert!(e5.value <= e20.value && e20.value < rat(1, 1));
        assert!(e20.value > rat(9, 10));
    }

    #[test]
    fn nf_examples() {
        let t = p("nu a. (\\x. \\y. (y (+a.0) I) x) (nu b. I (+b.0) OMEGA)");
        let e = nf_mass(&t, 100).unwrap();
        assert_eq!((e.value, e.exact), (rat(1, 2), true));
        assert_eq!(nf_mass(&p("\\x. x (nu a. I (+a.0) OMEGA)"), 100).unwrap().value, rat(1, 2));
        assert_eq!(nf_mass(&p("\\x. x"), 0).unwrap().value, rat(1, 1));
        assert_eq!(nf_mass(&p("{f} x"), 10).unwrap_err().code(), "E_MODE_VIOLATION");
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = p("nu a. I (+a.0) OMEGA");
        assert_eq!(sample_run(&t, Mode::Pe, 3, 20).unwrap(), sample_run(&t, Mode::Pe, 3, 20).unwrap());
        assert_eq!(sample_run(&p("OMEGA"), Mode::Pe, 0, 10).unwrap(), SampleOutcome::Diverged);
        let growing = p("(\\x. x x x) (\\x. x x x)");
        assert_eq!(sample_run(&growing, Mode::Pe, 0, 10).unwrap(), SampleOutcome::Exhausted);
        let v = p("\\x. x y");
        assert_eq!(sample_run(&v, Mode::Pe, 9, 0).unwrap(), SampleOutcome::HeadNormal(v));
        let e = estimate_hnv(&p("I"), Mode::Pe, 10, 5, 1).unwrap();
        assert_eq!((e.estimate, e.stderr), (rat(1, 1), rat(0, 1)));
        let a = estimate_hnv(&t, Mode::Pe, 2000, 50, 7).unwrap();
        let b = estimate_hnv(&t, Mode::Pe, 2000, 50, 7).unwrap();
        assert_eq!(a, b);
        let diff = (a.estimate - rat(1, 2)).abs();
        assert!(diff <= a.stderr * Rational::from_integer(3.into()));
    }
}
