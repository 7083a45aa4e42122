//! Hand-built terms and typing derivations used by tests, benches and the CLI.

use std::collections::BTreeSet;

use num_traits::One;

use crate::boolean::{parse_formula, BoolFormula};
use crate::name::{Name, Var};
use crate::parse::parse_term;
use crate::proof::{self, build::Hyps, Formula, ProofDerivation};
use crate::rational::{rat, Rational};
use crate::term::Term;
use crate::types::build::{self, Ctx};
use crate::types::{apply_mu_star, parse_type, Derivation, System, Type};

fn ty(s: &str) -> Type {
    parse_type(s).expect("fixture type")
}

fn tm(s: &str) -> Term {
    parse_term(s).expect("fixture term")
}

fn f(s: &str) -> BoolFormula {
    parse_formula(s).expect("fixture formula")
}

fn names(ns: &[&str]) -> BTreeSet<Name> {
    ns.iter().map(|a| Name::new(a)).collect()
}

fn top() -> BoolFormula {
    BoolFormula::Top
}

/// `\x. x` with `x` declared at `x_ty` and used at `use_ty`.
fn identity(system: System, ns: &BTreeSet<Name>, x_ty: &str, use_ty: &str, c: BoolFormula) -> Derivation {
    let x = Var::new("x");
    let body = match system {
        System::Int => build::id_le(&vec![(x, ty(&format!("[{x_ty}]")))], ns, x, ty(use_ty), top()),
        _ => build::id(&vec![(x, ty(x_ty))], ns, x, top()).expect("declared"),
    };
    build::lam(x, body, c).expect("identity")
}

/// `(\x.x) (+a.i) OMEGA` typed through its left branch under `x_a^i`.
fn left_identity(system: System, ns: &BTreeSet<Name>, a: &str, i: u32, x_ty: &str, use_ty: &str) -> Derivation {
    let a = Name::new(a);
    let c = BoolFormula::atom(a, i);
    build::plus_l(identity(system, ns, x_ty, use_ty, top()), tm("OMEGA"), a, i, c)
}

/// The two-level choice term over names `a`, `b` whose exact termination
/// probability is 3/8 while nested single-quantifier counting only certifies 1/4.
pub fn counting_comparison_term() -> Term {
    tm("nu a. nu b. (((\\x.x) (+b.1) OMEGA) (+b.0) OMEGA) (+a.0) (OMEGA (+b.0) (\\x.x))")
}

/// The two branch derivations of the body at names `{a, b}`:
/// under `a.0 & b.0 & b.1` and under `!a.0 & !b.0`.
fn comparison_branches(system: System, x_ty: &str, use_ty: &str) -> (Derivation, Derivation) {
    let ns = names(&["a", "b"]);
    let (a, b) = (Name::new("a"), Name::new("b"));
    let id = || identity(system, &ns, x_ty, use_ty, top());
    let l1 = build::plus_l(id(), tm("OMEGA"), b, 1, f("b.1"));
    let l2 = build::plus_l(l1, tm("OMEGA"), b, 0, f("b.0 & b.1"));
    let left = build::plus_l(l2, tm("OMEGA (+b.0) (\\x.x)"), a, 0, f("a.0 & b.0 & b.1"));
    let r1 = build::plus_r(tm("OMEGA"), id(), b, 0, f("!b.0"));
    let right = build::plus_r(tm("((\\x.x) (+b.1) OMEGA) (+b.0) OMEGA"), r1, a, 0, f("!a.0 & !b.0"));
    (left, right)
}

/// Single-quantifier counting: `C[1/4] (C[1] o => o)`.
pub fn counting_comparison_cn() -> Derivation {
    let (a, b) = (Name::new("a"), Name::new("b"));
    let (left, right) = comparison_branches(System::Cn, "C[1] o", "C[1] o");
    let quarter = Some(rat(1, 4));
    let l = build::mu_prime(left, b, f("b.0 & b.1"), quarter.clone(), f("a.0")).expect("mu'");
    let r = build::mu_prime(right, b, f("!b.0"), quarter, f("!a.0")).expect("mu'");
    let both = build::or(f("a.0 | !a.0"), vec![l, r]).expect("or");
    build::mu_prime(both, a, f("a.0 | !a.0"), Some(Rational::one()), top()).expect("mu'")
}

/// Summed counting in the intersection system: `C[3/8] ([C[1] o] => o)`.
pub fn counting_comparison_int() -> Derivation {
    let (a, b) = (Name::new("a"), Name::new("b"));
    let (left, right) = comparison_branches(System::Int, "C[1] o", "C[1] o");
    let l = build::mu_sigma(vec![left], b, vec![f("b.0 & b.1")], f("a.0")).expect("mu_sigma");
    let r = build::mu_sigma(vec![right], b, vec![f("!b.0")], f("!a.0")).expect("mu_sigma");
    build::mu_sigma(vec![l, r], a, vec![f("a.0"), f("!a.0")], top()).expect("mu_sigma")
}

/// The open body of the comparison term typed by `plus` under the disjunction
/// of both branch events, ready for the generalized counting rule.
pub fn counting_comparison_open() -> Derivation {
    let (left, right) = comparison_branches(System::Int, "C[1] o", "C[1] o");
    let (l, r) = (left.premises[0].clone(), right.premises[0].clone());
    build::plus(l, r, Name::new("a"), 0, f("(a.0 & b.0 & b.1) | (!a.0 & !b.0)"))
}

/// `\y. \x. {y} (y x)`, the call-by-name numeral two, at quantifier `q`.
pub fn church_two_cbn(q: &Rational) -> Derivation {
    let (y, x) = (Var::new("y"), Var::new("x"));
    let ctx: Ctx = vec![(y, Type::counted(q.clone(), ty("(o => o)"))), (x, Type::O)];
    let ns = BTreeSet::new();
    let yv = || build::id(&ctx, &ns, y, top()).expect("y");
    let yx = build::app(yv(), build::id(&ctx, &ns, x, top()).expect("x"), top()).expect("y x");
    let body = build::cbv(yv(), yx, top()).expect("{y} (y x)");
    let inner = build::lam(x, body, top()).expect("lam x");
    build::lam(y, inner, top()).expect("lam y")
}

/// `\f. \x. f (f x)` at `((o => o) => (o => o))` in context `ctx`.
fn church_two_plain(ctx: &Ctx) -> Derivation {
    let (fv, x) = (Var::new("f"), Var::new("x"));
    let mut inner = ctx.clone();
    inner.push((fv, ty("(o => o)")));
    inner.push((x, Type::O));
    let ns = BTreeSet::new();
    let fd = || build::id(&inner, &ns, fv, top()).expect("f");
    let fx = build::app(fd(), build::id(&inner, &ns, x, top()).expect("x"), top()).expect("f x");
    let ffx = build::app(fd(), fx, top()).expect("f (f x)");
    build::lam(fv, build::lam(x, ffx, top()).expect("lam x"), top()).expect("lam f")
}

/// `\y. {\f.\x. f (f x)} y`, the call-by-value numeral two, at quantifier `q`.
pub fn church_two_cbv(q: &Rational) -> Derivation {
    let y = Var::new("y");
    let ctx: Ctx = vec![(y, Type::counted(q.clone(), ty("(o => o)")))];
    let two = church_two_plain(&ctx);
    let yd = build::id(&ctx, &BTreeSet::new(), y, top()).expect("y");
    let body = build::cbv(two, yd, top()).expect("{2} y");
    build::lam(y, body, top()).expect("lam y")
}

/// `nu a. I (+a.0) OMEGA` in the CbV system at `C[1/2] (o => o)`.
fn half_identity_cbv() -> Derivation {
    let body = left_identity(System::Cbv, &names(&["a"]), "a", 0, "o", "o");
    build::mu(body, Name::new("a"), f("a.0"), None, top()).expect("mu")
}

/// A closed, checked typing derivation with the probability its type certifies.
#[derive(Clone, Debug)]
pub struct TypedFixture {
    pub name: &'static str,
    pub system: System,
    pub derivation: Derivation,
}

impl TypedFixture {
    /// Product of the root quantifier prefix.
    pub fn certified(&self) -> Rational {
        self.derivation.judgement.ty.split_prefix().0.iter().fold(Rational::one(), |acc, q| acc * q)
    }
}

fn cn_fixtures() -> Vec<TypedFixture> {
    let empty = BTreeSet::new();
    let a = Name::new("a");
    let mut out = Vec::new();
    let mut push = |name, derivation| out.push(TypedFixture { name, system: System::Cn, derivation });

    push("cn_identity", identity(System::Cn, &empty, "C[1] o", "C[1] o", top()));

    let half = left_identity(System::Cn, &names(&["a"]), "a", 0, "C[1] o", "C[1] o");
    push("cn_half", build::mu_prime(half, a, f("a.0"), None, top()).expect("mu'"));

    push("cn_counting_comparison", counting_comparison_cn());

    // nu a. I (+a.0) (I (+a.1) OMEGA): two events summed by or.
    let ns = names(&["a"]);
    let id = || identity(System::Cn, &ns, "C[1] o", "C[1] o", top());
    let l = build::plus_l(id(), tm("(\\x.x) (+a.1) OMEGA"), a, 0, f("a.0"));
    let inner = build::plus_l(id(), tm("OMEGA"), a, 1, f("a.1"));
    let r = build::plus_r(tm("\\x.x"), inner, a, 0, f("!a.0 & a.1"));
    let both = build::or(f("a.0 | (!a.0 & a.1)"), vec![l, r]).expect("or");
    push("cn_three_quarters", build::mu_prime(both, a, f("a.0 | (!a.0 & a.1)"), None, top()).expect("mu'"));

    // \x. \y. x
    let (x, y) = (Var::new("x"), Var::new("y"));
    let ctx: Ctx = vec![(x, ty("C[1] o")), (y, ty("C[1] o"))];
    let body = build::id(&ctx, &empty, x, top()).expect("x");
    let k = build::lam(x, build::lam(y, body, top()).expect("y"), top()).expect("x");
    push("cn_konst", k);

    // (\x.x) (\x.x)
    let big = identity(System::Cn, &empty, "C[1] (C[1] o => o)", "C[1] (C[1] o => o)", top());
    let small = identity(System::Cn, &empty, "C[1] o", "C[1] o", top());
    push("cn_self_application", build::app(big, small, top()).expect("app"));

    // nu a. (\x.x) (I (+a.0) OMEGA)
    let big = identity(System::Cn, &ns, "C[1] (C[1] o => o)", "C[1] (C[1] o => o)", top());
    let arg = left_identity(System::Cn, &ns, "a", 0, "C[1] o", "C[1] o");
    let body = build::app(big, arg, f("a.0")).expect("app");
    push("cn_identity_on_choice", build::mu_prime(body, a, f("a.0"), None, top()).expect("mu'"));
    out
}

fn cbv_fixtures() -> Vec<TypedFixture> {
    let half = rat(1, 2);
    let empty = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |name, derivation| out.push(TypedFixture { name, system: System::Cbv, derivation });

    push("cbv_church_two_cbn", church_two_cbn(&half));
    push("cbv_church_two_cbv", church_two_cbv(&half));
    push("cbv_half", half_identity_cbv());
    push("cbv_identity", identity(System::Cbv, &empty, "o", "o", top()));

    // {\x.x} (nu a. I (+a.0) OMEGA)
    let id = identity(System::Cbv, &empty, "(o => o)", "(o => o)", top());
    push("cbv_strict_identity", build::cbv(id, half_identity_cbv(), top()).expect("cbv"));

    // (\y. {2} y) (nu a. I (+a.0) OMEGA)
    let app = build::app(church_two_cbv(&half), half_identity_cbv(), top()).expect("app");
    push("cbv_two_cbv_applied", app);

    // (\y. \x. {y} (y x)) (nu a. I (+a.0) OMEGA)
    let app = build::app(church_two_cbn(&half), half_identity_cbv(), top()).expect("app");
    push("cbv_two_cbn_applied", app);

    // nu a. nu b. I (+a.0) (I (+b.0) OMEGA), one generator at a time
    let (a, b) = (Name::new("a"), Name::new("b"));
    let ns = names(&["a", "b"]);
    let id = || identity(System::Cbv, &ns, "o", "o", top());
    let l = build::plus_l(id(), tm("(\\x.x) (+b.0) OMEGA"), a, 0, f("a.0 & b.0"));
    let inner = build::plus_l(id(), tm("OMEGA"), b, 0, f("b.0"));
    let r = build::plus_r(tm("\\x.x"), inner, a, 0, f("!a.0 & b.0"));
    let both = build::or(f("b.0"), vec![l, r]).expect("or");
    let nb = build::mu(both, b, f("b.0"), None, top()).expect("mu");
    push("cbv_nested_generators", build::mu(nb, a, top(), None, top()).expect("mu"));
    out
}

fn int_fixtures() -> Vec<TypedFixture> {
    let empty = BTreeSet::new();
    let mut out = Vec::new();
    let mut push = |name, derivation| out.push(TypedFixture { name, system: System::Int, derivation });

    push("int_counting_comparison", counting_comparison_int());
    push("int_mu_star_comparison", apply_mu_star(&counting_comparison_open(), None).expect("mu*"));

    let id = identity(System::Int, &empty, "C[1] o", "C[1] o", top());
    push("int_identity_hn", build::ground(id.clone(), Type::Hn, top()).expect("hn"));
    push("int_identity_n", build::ground(id, Type::N, top()).expect("n"));

    // nu a. I (+a.0) (I (+a.1) OMEGA) through the generalized counting rule
    let a = Name::new("a");
    let ns = names(&["a"]);
    let idn = || identity(System::Int, &ns, "C[1] o", "C[1] o", top());
    let l = build::plus_l(idn(), tm("(\\x.x) (+a.1) OMEGA"), a, 0, f("a.0"));
    let inner = build::plus_l(idn(), tm("OMEGA"), a, 1, f("a.1"));
    let r = build::plus_r(tm("\\x.x"), inner, a, 0, f("!a.0 & a.1"));
    let both = build::or(f("a.0 | (!a.0 & a.1)"), vec![l, r]).expect("or");
    push("int_three_quarters", apply_mu_star(&both, None).expect("mu*"));
    out
}

/// Every closed typed fixture, across the three systems.
pub fn typed_fixtures() -> Vec<TypedFixture> {
    let mut out = cn_fixtures();
    out.extend(cbv_fixtures());
    out.extend(int_fixtures());
    out
}

/// `nu a. (\x.\y.(y (+a.0) I) x) (nu b. I (+b.0) OMEGA)`: head-normalizes with
/// probability 3/4 and normalizes with probability 1/2.
pub fn two_generator_term() -> Term {
    tm("nu a. (\\x. \\y. (y (+a.0) (\\z.z)) x) (nu b. (\\z.z) (+b.0) OMEGA)")
}

/// `nu a. I (+a.0) OMEGA`
pub fn fair_identity() -> Term {
    tm("nu a. (\\x.x) (+a.0) OMEGA")
}

/// Closed terms with known exact head-normalization probability.
pub fn exact_hnv_fixtures() -> Vec<(&'static str, Term, Rational)> {
    vec![
        ("fair_identity", fair_identity(), rat(1, 2)),
        ("two_generators", two_generator_term(), rat(3, 4)),
        ("counting_comparison", Term::App(counting_comparison_term().into(), tm("\\x.x").into()), rat(3, 8)),
        ("cbn_two_on_choice", Term::App(tm("\\y.\\x. y (y x)").into(), fair_identity().into()), rat(1, 4)),
        ("three_quarters", tm("nu a. (\\x.x) (+a.0) ((\\x.x) (+a.1) OMEGA)"), rat(3, 4)),
    ]
}

fn p() -> Formula {
    Formula::prop("p")
}

/// `\x. x` proving `p -> p` over hypotheses `ctx` and names `ns`.
fn identity_proof(ctx: &Hyps, ns: &BTreeSet<Name>, c: BoolFormula) -> ProofDerivation {
    let x = Var::new("x");
    let mut inner = ctx.clone();
    inner.push((x, p()));
    proof::build::imp_i(x, proof::build::id(&inner, ns, x, top()).expect("x"), c).expect("identity")
}

/// A correct proof of `p -> p` mixed with a dummy one on bit `a.0`, then
/// quantified by binding `a`: proves `C[1/2] (p -> p)`.
pub fn half_identity_proof(a: &str) -> ProofDerivation {
    let an = Name::new(a);
    let ns = names(&[a]);
    let x = BoolFormula::atom(an, 0);
    let mixed = proof::build::m(
        an,
        0,
        identity_proof(&vec![], &ns, x.clone()),
        proof::build::bot(&vec![], &ns, BoolFormula::Bot, Formula::implies(p(), p())),
        x.clone(),
    );
    proof::build::ci(an, x, rat(1, 2), mixed, top())
}

/// Applying a quantified function twice by two counting eliminations:
/// proves `C[q] (p -> p) -> p -> C[q] C[q] p`.
pub fn twice_proof(q: &Rational) -> ProofDerivation {
    let [fv, y, h, g] = ["f", "y", "h", "g"].map(Var::new);
    let ns = BTreeSet::new();
    let fun = Formula::count(q.clone(), Formula::implies(p(), p()));
    let base: Hyps = vec![(fv, fun), (y, p())];
    let with = |extra: &[(Var, Formula)]| {
        let mut c = base.clone();
        c.extend(extra.iter().cloned());
        c
    };
    let pp = Formula::implies(p(), p());
    let inner_ctx = with(&[(h, pp.clone()), (g, pp.clone())]);
    let var = |ctx: &Hyps, v: Var| proof::build::id(ctx, &ns, v, top()).expect("hypothesis");
    let hy = proof::build::imp_e(var(&inner_ctx, h), var(&inner_ctx, y), top()).expect("h y");
    let ghy = proof::build::imp_e(var(&inner_ctx, g), hy, top()).expect("g (h y)");
    let mid_ctx = with(&[(h, pp)]);
    let inner = proof::build::ce(g, var(&mid_ctx, fv), ghy, top()).expect("ce g");
    let outer = proof::build::ce(h, var(&base, fv), inner, top()).expect("ce h");
    let lam_y = proof::build::imp_i(y, outer, top()).expect("imp_i y");
    proof::build::imp_i(fv, lam_y, top()).expect("imp_i f")
}

/// The twice proof at 1/2 cut against the half identity.
pub fn twice_half_cut() -> ProofDerivation {
    proof::build::imp_e(twice_proof(&rat(1, 2)), half_identity_proof("a"), top()).expect("cut")
}

/// Every proof fixture, each closed with constraint `T`.
pub fn proof_fixtures() -> Vec<(&'static str, ProofDerivation)> {
    let pb = |a: &str| Name::new(a);
    let a = pb("a");
    let na = names(&["a"]);
    let xa = BoolFormula::atom(a, 0);
    let pp = Formula::implies(p(), p());
    let dummy = |ns: &BTreeSet<Name>, f: Formula| proof::build::bot(&vec![], ns, BoolFormula::Bot, f);
    let close = |inner: ProofDerivation, d: BoolFormula, q: Rational| proof::build::ci(a, d, q, inner, top());

    let y = Var::new("y");
    let hy: Hyps = vec![(y, p())];

    let identity = identity_proof(&vec![], &BTreeSet::new(), top());

    let half_inside = {
        let x = Var::new("x");
        let ctx: Hyps = vec![(x, p())];
        let mixed = proof::build::m(
            a,
            0,
            proof::build::id(&ctx, &na, x, top()).unwrap(),
            proof::build::bot(&ctx, &na, BoolFormula::Bot, p()),
            xa.clone(),
        );
        close(proof::build::imp_i(x, mixed, xa.clone()).unwrap(), xa.clone(), rat(1, 2))
    };

    let apply_twice_identity = {
        let h = Var::new("h");
        let ctx: Hyps = vec![(y, p()), (h, pp.clone())];
        let ns = BTreeSet::new();
        let var = |v| proof::build::id(&ctx, &ns, v, top()).unwrap();
        let body = proof::build::imp_e(var(h), proof::build::imp_e(var(h), var(y), top()).unwrap(), top()).unwrap();
        let f = proof::build::imp_i(h, body, top()).unwrap();
        let cut = proof::build::imp_e(f, identity_proof(&hy, &ns, top()), top()).unwrap();
        proof::build::imp_i(y, cut, top()).unwrap()
    };

    let mixed_applied = {
        let mixed = proof::build::m(
            a,
            0,
            identity_proof(&hy, &na, top()),
            proof::build::bot(&hy, &na, BoolFormula::Bot, pp.clone()),
            xa.clone(),
        );
        let app = proof::build::imp_e(mixed, proof::build::id(&hy, &na, y, top()).unwrap(), xa.clone()).unwrap();
        close(proof::build::imp_i(y, app, xa.clone()).unwrap(), xa.clone(), rat(1, 2))
    };

    let mixed_argument = {
        let ctx: Hyps = vec![(y, p())];
        let arg = proof::build::m(
            a,
            0,
            proof::build::id(&ctx, &na, y, top()).unwrap(),
            proof::build::bot(&ctx, &na, BoolFormula::Bot, p()),
            xa.clone(),
        );
        let app = proof::build::imp_e(identity_proof(&ctx, &na, top()), arg, xa.clone()).unwrap();
        close(proof::build::imp_i(y, app, xa.clone()).unwrap(), xa.clone(), rat(1, 2))
    };

    let merged = {
        let inner = proof::build::m(a, 0, identity_proof(&vec![], &na, top()), dummy(&na, pp.clone()), xa.clone());
        let outer = proof::build::m(a, 0, inner, identity_proof(&vec![], &na, top()), top());
        close(outer, top(), Rational::one())
    };

    let merged_right = {
        let inner = proof::build::m(
            a,
            0,
            dummy(&na, pp.clone()),
            identity_proof(&vec![], &na, top()),
            BoolFormula::negate(xa.clone()),
        );
        let outer = proof::build::m(a, 0, identity_proof(&vec![], &na, top()), inner, top());
        close(outer, top(), Rational::one())
    };

    let idem = close(
        proof::build::m(a, 0, identity_proof(&vec![], &na, top()), identity_proof(&vec![], &na, top()), top()),
        top(),
        Rational::one(),
    );

    let nested_generators = {
        let b = pb("b");
        let nab = names(&["a", "b"]);
        let mixed = proof::build::m(a, 0, identity_proof(&vec![], &nab, top()), dummy(&nab, pp.clone()), xa.clone());
        let inner = proof::build::ci(b, BoolFormula::atom(b, 0), rat(1, 2), mixed, xa.clone());
        close(inner, xa.clone(), rat(1, 2))
    };

    let mixed_major = {
        let x = Var::new("x");
        let major = proof::build::m(
            a,
            0,
            weaken_names(half_identity_proof("b"), &na),
            dummy(&na, Formula::count(rat(1, 2), pp.clone())),
            xa.clone(),
        );
        let minor = proof::build::id(&vec![(x, pp.clone())], &na, x, top()).unwrap();
        close(proof::build::ce(x, major, minor, xa.clone()).unwrap(), xa.clone(), rat(1, 2))
    };

    let mixed_minor = {
        let x = Var::new("x");
        let ctx: Hyps = vec![(x, pp.clone())];
        let minor = proof::build::m(
            a,
            0,
            proof::build::id(&ctx, &na, x, top()).unwrap(),
            proof::build::bot(&ctx, &na, BoolFormula::Bot, pp.clone()),
            xa.clone(),
        );
        let fv = Var::new("f");
        let half = Formula::count(rat(1, 2), pp.clone());
        let with_f = |mut c: Hyps| {
            c.insert(0, (fv, half.clone()));
            c
        };
        let minor = weaken_ctx(minor, &with_f);
        let major = proof::build::id(&with_f(vec![]), &na, fv, top()).unwrap();
        let elim = proof::build::ce(x, major, minor, xa.clone()).unwrap();
        close(proof::build::imp_i(fv, elim, xa.clone()).unwrap(), xa.clone(), rat(1, 2))
    };

    vec![
        ("identity", identity),
        ("half_identity", half_identity_proof("a")),
        ("half_identity_inside", half_inside),
        ("twice_half", twice_proof(&rat(1, 2))),
        ("twice_one", twice_proof(&Rational::one())),
        ("twice_half_cut", twice_half_cut()),
        ("apply_twice_identity", apply_twice_identity),
        ("mixed_applied", mixed_applied),
        ("mixed_argument", mixed_argument),
        ("merged_left", merged),
        ("merged_right", merged_right),
        ("idempotent_mix", idem),
        ("nested_generators", nested_generators),
        ("mixed_major", mixed_major),
        ("mixed_minor", mixed_minor),
    ]
}

fn weaken_ctx(mut p: ProofDerivation, extend: &impl Fn(Hyps) -> Hyps) -> ProofDerivation {
    p.sequent.ctx = extend(p.sequent.ctx);
    p.premises = p.premises.into_iter().map(|q| weaken_ctx(q, extend)).collect();
    p
}

/// Declare extra names at every node of a proof that does not bind them.
fn weaken_names(mut p: ProofDerivation, ns: &BTreeSet<Name>) -> ProofDerivation {
    p.sequent.names.extend(ns.iter().copied());
    p.premises = p.premises.into_iter().map(|q| weaken_names(q, ns)).collect();
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::check_derivation;

    #[test]
    fn all_fixtures_check() {
        let all = typed_fixtures();
        assert!(all.len() >= 15);
        for fx in &all {
            let j = check_derivation(&fx.derivation, fx.system).unwrap_or_else(|e| panic!("{}: {e}", fx.name));
            assert!(j.ctx.is_empty() && j.names.is_empty(), "{} is open", fx.name);
            assert_eq!(j.constraint, BoolFormula::Top, "{}", fx.name);
        }
    }

    #[test]
    fn comparison_types() {
        let cn = check_derivation(&counting_comparison_cn(), System::Cn).unwrap();
        assert_eq!(cn.ty, ty("C[1/4] (C[1] o => o)"));
        let int = check_derivation(&counting_comparison_int(), System::Int).unwrap();
        assert_eq!(int.ty, ty("C[3/8] ([C[1] o] => o)"));
        assert!(crate::term::alpha_eq(&int.term, &counting_comparison_term()));
        let star = apply_mu_star(&counting_comparison_open(), None).unwrap();
        assert_eq!(star.judgement.ty, int.ty);
    }

    #[test]
    fn numeral_types() {
        let q = rat(1, 2);
        let cbn = check_derivation(&church_two_cbn(&q), System::Cbv).unwrap();
        assert_eq!(cbn.ty, ty("C[1/2] C[1/2] (C[1/2] (o => o) => (o => o))"));
        let cbv = check_derivation(&church_two_cbv(&q), System::Cbv).unwrap();
        assert_eq!(cbv.ty, ty("C[1/2] (C[1/2] (o => o) => (o => o))"));
    }
}
