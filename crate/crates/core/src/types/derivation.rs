//! Typing derivations and their checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};

use super::{is_safe, parse_type, subtype, Type};
use crate::boolean::{disjoint, entails, measure, parse_formula, BoolFormula};
use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::parse::parse_term;
use crate::rational::{fmt_rational, parse_rational, Rational};
use crate::rewrite::fmt_path;
use crate::term::{alpha_eq, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum System {
    /// One quantifier per type.
    Cn,
    /// Quantifier prefixes and CbV application.
    Cbv,
    /// Intersection types.
    Int,
}

impl System {
    pub fn parse(s: &str) -> Option<System> {
        match s.to_ascii_lowercase().as_str() {
            "cn" => Some(System::Cn),
            "cbv" => Some(System::Cbv),
            "int" => Some(System::Int),
            _ => None,
        }
    }

    fn allows(self, r: TypeRule) -> bool {
        use TypeRule::*;
        match r {
            Or | Plus | PlusL | PlusR | Lam => true,
            Id | App => self != System::Int,
            Cbv | Mu => self == System::Cbv,
            MuPrime => self == System::Cn,
            IdLe | AppInt | MuSigma | Hn | N => self == System::Int,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeRule {
    Id,
    IdLe,
    Or,
    Plus,
    PlusL,
    PlusR,
    Lam,
    App,
    AppInt,
    Cbv,
    Mu,
    MuPrime,
    MuSigma,
    Hn,
    N,
}

impl TypeRule {
    const ALL: [TypeRule; 15] = [
        TypeRule::Id,
        TypeRule::IdLe,
        TypeRule::Or,
        TypeRule::Plus,
        TypeRule::PlusL,
        TypeRule::PlusR,
        TypeRule::Lam,
        TypeRule::App,
        TypeRule::AppInt,
        TypeRule::Cbv,
        TypeRule::Mu,
        TypeRule::MuPrime,
        TypeRule::MuSigma,
        TypeRule::Hn,
        TypeRule::N,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            TypeRule::Id => "id",
            TypeRule::IdLe => "id_le",
            TypeRule::Or => "or",
            TypeRule::Plus => "plus",
            TypeRule::PlusL => "plus_l",
            TypeRule::PlusR => "plus_r",
            TypeRule::Lam => "lam",
            TypeRule::App => "app",
            TypeRule::AppInt => "app_int",
            TypeRule::Cbv => "cbv",
            TypeRule::Mu => "mu",
            TypeRule::MuPrime => "mu_prime",
            TypeRule::MuSigma => "mu_sigma",
            TypeRule::Hn => "hn",
            TypeRule::N => "n",
        }
    }

    pub fn from_tag(s: &str) -> Option<TypeRule> {
        TypeRule::ALL.into_iter().find(|r| r.tag() == s)
    }
}

/// `ctx |-^names term : constraint >-> ty`
#[derive(Clone, PartialEq, Eq)]
pub struct Judgement {
    pub ctx: Vec<(Var, Type)>,
    pub names: BTreeSet<Name>,
    pub term: Term,
    pub constraint: BoolFormula,
    pub ty: Type,
}

impl Judgement {
    pub fn new(ctx: Vec<(Var, Type)>, names: BTreeSet<Name>, term: Term, constraint: BoolFormula, ty: Type) -> Self {
        Judgement { ctx, names, term, constraint, ty }
    }

    pub fn lookup(&self, x: Var) -> Option<&Type> {
        self.ctx.iter().find(|(y, _)| *y == x).map(|(_, t)| t)
    }

    fn ctx_map(&self) -> BTreeMap<Var, &Type> {
        self.ctx.iter().map(|(x, t)| (*x, t)).collect()
    }

    pub fn same_ctx(&self, other: &Judgement) -> bool {
        self.ctx.len() == other.ctx.len() && self.ctx_map() == other.ctx_map()
    }

    fn ctx_json(&self) -> Vec<String> {
        self.ctx.iter().map(|(x, t)| format!("{x} : {t}")).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ctx": self.ctx_json(),
            "names": self.names.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "term": self.term.to_string(),
            "constraint": self.constraint.to_string(),
            "type": self.ty.to_string(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Judgement> {
        let ctx = array(v, "ctx")?
            .iter()
            .map(|e| {
                let s = e.as_str().ok_or_else(|| ill("context entry must be a string"))?;
                let (x, t) = s.split_once(':').ok_or_else(|| ill(format!("bad context entry `{s}`")))?;
                Ok((Var::new(x.trim()), parse_type(t)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let names = array(v, "names")?
            .iter()
            .map(|e| e.as_str().map(Name::new).ok_or_else(|| ill("name must be a string")))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(Judgement {
            ctx,
            names,
            term: parse_term(string(v, "term")?)?,
            constraint: parse_formula(string(v, "constraint")?)?,
            ty: parse_type(string(v, "type")?)?,
        })
    }
}

impl fmt::Display for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.names.iter().map(|a| a.to_string()).collect();
        write!(
            f,
            "{} |-{{{}}} {} : {} >-> {}",
            self.ctx_json().join(", "),
            names.join(","),
            self.term,
            self.constraint,
            self.ty
        )
    }
}

impl fmt::Debug for Judgement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Rule-specific data: the event `d` of a counting rule, the events `ds` and
/// lower bounds `ss` of the summed counting rule, and the factor `s`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Side {
    pub d: Option<BoolFormula>,
    pub ds: Vec<BoolFormula>,
    pub s: Option<Rational>,
    pub ss: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub rule: TypeRule,
    pub judgement: Judgement,
    pub side: Side,
    pub premises: Vec<Derivation>,
}

fn ill(msg: impl Into<String>) -> Error {
    Error::IllFormed(msg.into())
}

fn field<'a>(v: &'a Value, k: &str) -> Result<&'a Value> {
    v.get(k).ok_or_else(|| ill(format!("missing field `{k}`")))
}

fn string<'a>(v: &'a Value, k: &str) -> Result<&'a str> {
    field(v, k)?.as_str().ok_or_else(|| ill(format!("field `{k}` must be a string")))
}

fn array<'a>(v: &'a Value, k: &str) -> Result<&'a Vec<Value>> {
    field(v, k)?.as_array().ok_or_else(|| ill(format!("field `{k}` must be an array")))
}

impl Derivation {
    pub fn new(rule: TypeRule, judgement: Judgement, premises: Vec<Derivation>) -> Self {
        Derivation { rule, judgement, side: Side::default(), premises }
    }

    pub fn with_d(mut self, d: BoolFormula) -> Self {
        self.side.d = Some(d);
        self
    }

    pub fn with_s(mut self, s: Rational) -> Self {
        self.side.s = Some(s);
        self
    }

    pub fn with_ds(mut self, ds: Vec<BoolFormula>, ss: Vec<Rational>) -> Self {
        self.side.ds = ds;
        self.side.ss = ss;
        self
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn to_json(&self) -> Value {
        let mut side = Map::new();
        if let Some(d) = &self.side.d {
            side.insert("d".into(), json!(d.to_string()));
        }
        if !self.side.ds.is_empty() {
            side.insert("ds".into(), json!(self.side.ds.iter().map(|d| d.to_string()).collect::<Vec<_>>()));
        }
        if let Some(s) = &self.side.s {
            side.insert("s".into(), json!(fmt_rational(s)));
        }
        if !self.side.ss.is_empty() {
            side.insert("ss".into(), json!(self.side.ss.iter().map(fmt_rational).collect::<Vec<_>>()));
        }
        json!({
            "rule": self.rule.tag(),
            "judgement": self.judgement.to_json(),
            "side": Value::Object(side),
            "premises": self.premises.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Derivation> {
        let tag = string(v, "rule")?;
        let rule = TypeRule::from_tag(tag).ok_or_else(|| ill(format!("unknown rule `{tag}`")))?;
        let judgement = Judgement::from_json(field(v, "judgement")?)?;
        let mut side = Side::default();
        if let Some(s) = v.get("side") {
            if let Some(d) = s.get("d").and_then(Value::as_str) {
                side.d = Some(parse_formula(d)?);
            }
            if let Some(ds) = s.get("ds").and_then(Value::as_array) {
                side.ds = ds
                    .iter()
                    .map(|d| parse_formula(d.as_str().ok_or_else(|| ill("ds entries must be strings"))?))
                    .collect::<Result<_>>()?;
            }
            if let Some(q) = s.get("s").and_then(Value::as_str) {
                side.s = Some(parse_rational(q)?);
            }
            if let Some(ss) = s.get("ss").and_then(Value::as_array) {
                side.ss = ss
                    .iter()
                    .map(|q| parse_rational(q.as_str().ok_or_else(|| ill("ss entries must be strings"))?))
                    .collect::<Result<_>>()?;
            }
        }
        let premises = match v.get("premises") {
            Some(p) => p
                .as_array()
                .ok_or_else(|| ill("`premises` must be an array"))?
                .iter()
                .map(Derivation::from_json)
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Ok(Derivation { rule, judgement, side, premises })
    }
}

fn in_unit(q: &Rational) -> bool {
    *q > Rational::zero() && *q <= Rational::one()
}

/// A type of the form `s` (possibly prefixed) for the system.
fn wf_s(sys: System, t: &Type) -> bool {
    match sys {
        System::Cn | System::Int => matches!(t, Type::Counted(q, s) if in_unit(q) && wf_sigma(sys, s)),
        System::Cbv => {
            let (qs, s) = t.split_prefix();
            qs.iter().all(in_unit) && wf_sigma(sys, s)
        }
    }
}

fn wf_sigma(sys: System, t: &Type) -> bool {
    match t {
        Type::O => true,
        Type::Hn | Type::N => sys == System::Int,
        Type::Arrow(a, b) => {
            let dom = match (sys, &**a) {
                (System::Int, Type::Multi(ts)) => ts.iter().all(|s| wf_s(sys, s)),
                (System::Int, _) => false,
                (_, a) => wf_s(sys, a),
            };
            dom && wf_sigma(sys, b)
        }
        Type::Counted(..) | Type::Multi(_) => false,
    }
}

fn wf_ctx_entry(sys: System, t: &Type) -> bool {
    match sys {
        System::Int => matches!(t, Type::Multi(ts) if ts.iter().all(|s| wf_s(sys, s))),
        _ => wf_s(sys, t),
    }
}

struct Ctx<'a> {
    path: &'a [usize],
}

impl Ctx<'_> {
    fn p(&self) -> String {
        fmt_path(self.path)
    }

    fn shape<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::RuleShape { path: self.p(), msg: msg.into() })
    }

    fn side<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SideCondition { path: self.p(), msg: msg.into() })
    }

    fn mismatch<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SystemMismatch { path: self.p(), msg: msg.into() })
    }

    fn arity(&self, d: &Derivation, n: usize) -> Result<()> {
        if d.premises.len() != n {
            return self.shape(format!("{} expects {n} premises, got {}", d.rule.tag(), d.premises.len()));
        }
        Ok(())
    }

    fn entails(&self, b: &BoolFormula, c: &BoolFormula) -> Result<()> {
        if entails(b, c)? {
            Ok(())
        } else {
            self.side(format!("`{b}` does not entail `{c}`"))
        }
    }

    /// The premise types `term` in the same context and names.
    fn premise_for(&self, j: &Judgement, p: &Judgement, term: &Term, names: &BTreeSet<Name>) -> Result<()> {
        if !alpha_eq(&p.term, term) {
            return self.shape(format!("premise subject `{}` should be `{term}`", p.term));
        }
        if !j.same_ctx(p) {
            return self.shape("premise context differs");
        }
        if p.names != *names {
            return self.side("premise name set differs");
        }
        Ok(())
    }
}

/// Check every node of `d` in `system`; returns the root judgement.
pub fn check_derivation(d: &Derivation, system: System) -> Result<Judgement> {
    check_node(d, system, &mut Vec::new())?;
    Ok(d.judgement.clone())
}

fn check_node(d: &Derivation, sys: System, path: &mut Vec<usize>) -> Result<()> {
    check_local(d, sys, &Ctx { path })?;
    for (k, p) in d.premises.iter().enumerate() {
        path.push(k);
        check_node(p, sys, path)?;
        path.pop();
    }
    Ok(())
}

fn check_local(d: &Derivation, sys: System, cx: &Ctx) -> Result<()> {
    let j = &d.judgement;
    if !sys.allows(d.rule) {
        return cx.mismatch(format!("rule {} is not part of {sys:?}", d.rule.tag()));
    }
    if sys != System::Cbv && j.term.contains_cbv() {
        return cx.mismatch("CbV application outside the CbV system");
    }
    if !wf_s(sys, &j.ty) {
        return cx.mismatch(format!("type `{}` is not a {sys:?} type", j.ty));
    }
    let mut seen = BTreeSet::new();
    for (x, t) in &j.ctx {
        if !seen.insert(*x) {
            return cx.side(format!("variable {x} declared twice"));
        }
        if !wf_ctx_entry(sys, t) {
            return cx.mismatch(format!("context type `{t}` is not a {sys:?} declaration"));
        }
    }
    if !j.term.free_names().is_subset(&j.names) {
        return cx.side("free names of the subject are not declared");
    }
    if !j.constraint.names().is_subset(&j.names) {
        return cx.side("names of the constraint are not declared");
    }
    let ps: Vec<&Judgement> = d.premises.iter().map(|p| &p.judgement).collect();
    match d.rule {
        TypeRule::Id | TypeRule::IdLe => {
            cx.arity(d, 0)?;
            let Term::Var(x) = &j.term else { return cx.shape("subject must be a variable") };
            let Some(t) = j.lookup(*x) else { return cx.side(format!("{x} is not declared")) };
            if d.rule == TypeRule::Id {
                if *t != j.ty {
                    return cx.shape(format!("{x} is declared `{t}`, not `{}`", j.ty));
                }
            } else {
                let Type::Multi(ss) = t else { return cx.mismatch("declaration must be a multiset") };
                if !ss.iter().any(|s| subtype(s, &j.ty)) {
                    return cx.side(format!("no declared type of {x} is below `{}`", j.ty));
                }
            }
        }
        TypeRule::Or => {
            for p in &ps {
                cx.premise_for(j, p, &j.term, &j.names)?;
                if p.ty != j.ty {
                    return cx.shape("premise types differ");
                }
            }
            let any = ps.iter().fold(BoolFormula::Bot, |acc, p| BoolFormula::or_s(acc, p.constraint.clone()));
            cx.entails(&j.constraint, &any)?;
        }
        TypeRule::Plus | TypeRule::PlusL | TypeRule::PlusR => {
            let Term::Choice(l, r, a, i) = &j.term else { return cx.shape("subject must be a choice") };
            let x = BoolFormula::atom(*a, *i);
            let nx = BoolFormula::negate(x.clone());
            let branch = |p: &Judgement, t: &Term| -> Result<()> {
                cx.premise_for(j, p, t, &j.names)?;
                if p.ty != j.ty {
                    return cx.shape("premise type differs");
                }
                Ok(())
            };
            match d.rule {
                TypeRule::Plus => {
                    cx.arity(d, 2)?;
                    branch(ps[0], l)?;
                    branch(ps[1], r)?;
                    let target = BoolFormula::disj(
                        BoolFormula::conj(x, ps[0].constraint.clone()),
                        BoolFormula::conj(nx, ps[1].constraint.clone()),
                    );
                    cx.entails(&j.constraint, &target)?;
                }
                TypeRule::PlusL => {
                    cx.arity(d, 1)?;
                    branch(ps[0], l)?;
                    cx.entails(&j.constraint, &BoolFormula::conj(ps[0].constraint.clone(), x))?;
                }
                _ => {
                    cx.arity(d, 1)?;
                    branch(ps[0], r)?;
                    cx.entails(&j.constraint, &BoolFormula::conj(ps[0].constraint.clone(), nx))?;
                }
            }
        }
        TypeRule::Lam => {
            cx.arity(d, 1)?;
            let Term::Lam(x, body) = &j.term else { return cx.shape("subject must be an abstraction") };
            let p = ps[0];
            if !alpha_eq(&p.term, body) {
                return cx.shape("premise subject is not the body");
            }
            if j.lookup(*x).is_some() {
                return cx.side(format!("bound variable {x} clashes with the context"));
            }
            let Some(sx) = p.lookup(*x) else { return cx.shape(format!("premise does not declare {x}")) };
            let mut expect = j.ctx.clone();
            expect.push((*x, sx.clone()));
            let expect = Judgement { ctx: expect, ..j.clone() };
            if !expect.same_ctx(p) {
                return cx.shape("premise context is not the context extended by the bound variable");
            }
            if p.names != j.names {
                return cx.side("premise name set differs");
            }
            let (qs, tau) = p.ty.split_prefix();
            if j.ty != Type::prefixed(&qs, Type::arrow(sx.clone(), tau.clone())) {
                return cx
                    .shape(format!("expected type `{}`", Type::prefixed(&qs, Type::arrow(sx.clone(), tau.clone()))));
            }
            cx.entails(&j.constraint, &p.constraint)?;
        }
        TypeRule::App | TypeRule::Cbv => {
            cx.arity(d, 2)?;
            let (t, u) = match (&j.term, d.rule) {
                (Term::App(t, u), TypeRule::App) | (Term::CbvApp(t, u), TypeRule::Cbv) => (t, u),
                _ => return cx.shape("subject does not match the application rule"),
            };
            cx.premise_for(j, ps[0], t, &j.names)?;
            cx.premise_for(j, ps[1], u, &j.names)?;
            let (qs, arrow) = ps[0].ty.split_prefix();
            let Type::Arrow(dom, cod) = arrow else { return cx.shape("function premise must have an arrow type") };
            let expect = if d.rule == TypeRule::App {
                if ps[1].ty != **dom {
                    return cx.shape(format!("argument has `{}`, expected `{dom}`", ps[1].ty));
                }
                Type::prefixed(&qs, (**cod).clone())
            } else {
                let Type::Counted(r, s) = &ps[1].ty else { return cx.shape("argument must be quantified") };
                if **s != **dom {
                    return cx.shape(format!("argument has `{}`, expected C[r] `{dom}`", ps[1].ty));
                }
                Type::counted(r.clone(), Type::prefixed(&qs, (**cod).clone()))
            };
            if j.ty != expect {
                return cx.shape(format!("expected type `{expect}`"));
            }
            let both = BoolFormula::conj(ps[0].constraint.clone(), ps[1].constraint.clone());
            cx.entails(&j.constraint, &both)?;
        }
        TypeRule::AppInt => {
            let Term::App(t, u) = &j.term else { return cx.shape("subject must be an application") };
            if ps.is_empty() {
                return cx.shape("app_int needs the function premise");
            }
            cx.premise_for(j, ps[0], t, &j.names)?;
            let Type::Counted(q, arrow) = &ps[0].ty else { return cx.shape("function type must be quantified") };
            let Type::Arrow(dom, cod) = &**arrow else { return cx.shape("function premise must have an arrow type") };
            let Type::Multi(ss) = &**dom else { return cx.mismatch("domain must be a multiset") };
            cx.arity(d, 1 + ss.len())?;
            for (k, s) in ss.iter().enumerate() {
                let p = ps[k + 1];
                cx.premise_for(j, p, u, &j.names)?;
                if p.ty != *s {
                    return cx.shape(format!("argument premise {k} has `{}`, expected `{s}`", p.ty));
                }
                cx.entails(&j.constraint, &p.constraint)?;
            }
            cx.entails(&j.constraint, &ps[0].constraint)?;
            if j.ty != Type::counted(q.clone(), (**cod).clone()) {
                return cx.shape("conclusion type must drop the domain");
            }
        }
        TypeRule::Mu | TypeRule::MuPrime | TypeRule::MuSigma => {
            let Term::Nu(a, body) = &j.term else { return cx.shape("subject must be a generator") };
            if j.names.contains(a) {
                return cx.side(format!("{a} is already declared"));
            }
            if ps.is_empty() {
                return cx.shape("counting rule needs a premise");
            }
            let mut inner = j.names.clone();
            inner.insert(*a);
            for p in &ps {
                cx.premise_for(j, p, body, &inner)?;
            }
            let only_a = |f: &BoolFormula| -> Result<()> {
                if f.names().iter().any(|n| n != a) {
                    return cx.side(format!("event `{f}` mentions names other than {a}"));
                }
                Ok(())
            };
            match d.rule {
                TypeRule::Mu | TypeRule::MuPrime => {
                    cx.arity(d, 1)?;
                    let Some(ev) = &d.side.d else { return cx.shape("missing event d") };
                    only_a(ev)?;
                    cx.entails(&BoolFormula::conj(j.constraint.clone(), ev.clone()), &ps[0].constraint)?;
                    let need = if d.rule == TypeRule::Mu {
                        let Type::Counted(q, s) = &j.ty else { return cx.shape("conclusion must be quantified") };
                        if **s != ps[0].ty {
                            return cx.shape("conclusion must quantify the premise type");
                        }
                        q.clone()
                    } else {
                        let (Type::Counted(qc, s1), Type::Counted(qp, s2)) = (&j.ty, &ps[0].ty) else {
                            return cx.shape("types must be quantified");
                        };
                        if s1 != s2 {
                            return cx.shape("premise and conclusion must share the body type");
                        }
                        let s = qc / qp;
                        if d.side.s.as_ref().is_some_and(|given| *given != s) {
                            return cx.shape("side s does not match the quantifiers");
                        }
                        s
                    };
                    if measure(ev)? < need {
                        return cx.side(format!("measure of `{ev}` is below {}", fmt_rational(&need)));
                    }
                }
                _ => {
                    let ds = &d.side.ds;
                    if ds.len() != ps.len() {
                        return cx.shape("one event per premise is required");
                    }
                    let ss: Vec<Rational> = if d.side.ss.is_empty() {
                        ds.iter().map(measure).collect::<Result<_>>()?
                    } else if d.side.ss.len() == ds.len() {
                        d.side.ss.clone()
                    } else {
                        return cx.shape("one bound per event is required");
                    };
                    let Type::Counted(_, sigma) = &j.ty else { return cx.shape("conclusion must be quantified") };
                    let mut total = Rational::zero();
                    for (k, p) in ps.iter().enumerate() {
                        only_a(&ds[k])?;
                        if measure(&ds[k])? < ss[k] {
                            return cx.side(format!("measure of `{}` is below {}", ds[k], fmt_rational(&ss[k])));
                        }
                        for e in &ds[k + 1..] {
                            if !disjoint(&ds[k], e)? {
                                return cx.side(format!("events `{}` and `{e}` overlap", ds[k]));
                            }
                        }
                        cx.entails(&BoolFormula::conj(j.constraint.clone(), ds[k].clone()), &p.constraint)?;
                        let Type::Counted(q, s) = &p.ty else { return cx.shape("premise must be quantified") };
                        if s != sigma {
                            return cx.shape("premises must share the body type");
                        }
                        total += q * &ss[k];
                    }
                    if j.ty != Type::counted(total.clone(), (**sigma).clone()) {
                        return cx.shape(format!("expected quantifier {}", fmt_rational(&total)));
                    }
                }
            }
        }
        TypeRule::Hn | TypeRule::N => {
            cx.arity(d, 1)?;
            let p = ps[0];
            cx.premise_for(j, p, &j.term, &j.names)?;
            let Type::Counted(q, sigma) = &p.ty else { return cx.shape("premise must be quantified") };
            let ground = if d.rule == TypeRule::Hn { Type::Hn } else { Type::N };
            if j.ty != Type::counted(q.clone(), ground) {
                return cx.shape("conclusion must keep the quantifier");
            }
            if d.rule == TypeRule::N && !is_safe(sigma) {
                return cx.side(format!("`{sigma}` is not safe"));
            }
            cx.entails(&j.constraint, &p.constraint)?;
        }
    }
    Ok(())
}
