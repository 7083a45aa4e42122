//! Sequents, proof derivations and the proof checker.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};

use super::Formula;
use crate::boolean::{entails, measure, parse_formula, BoolFormula};
use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::rational::fmt_rational;
use crate::rewrite::fmt_path;

/// `ctx |-^names constraint >-> formula`, hypotheses labelled by variables.
#[derive(Clone, PartialEq, Eq)]
pub struct Sequent {
    pub ctx: Vec<(Var, Formula)>,
    pub names: BTreeSet<Name>,
    pub constraint: BoolFormula,
    pub formula: Formula,
}

impl Sequent {
    pub fn new(ctx: Vec<(Var, Formula)>, names: BTreeSet<Name>, constraint: BoolFormula, formula: Formula) -> Self {
        Sequent { ctx, names, constraint, formula }
    }

    pub fn lookup(&self, x: Var) -> Option<&Formula> {
        self.ctx.iter().find(|(y, _)| *y == x).map(|(_, f)| f)
    }

    fn ctx_map(&self) -> BTreeMap<Var, &Formula> {
        self.ctx.iter().map(|(x, f)| (*x, f)).collect()
    }

    /// Same hypotheses, ignoring order.
    pub fn same_ctx(&self, other: &Sequent) -> bool {
        self.ctx.len() == other.ctx.len() && self.ctx_map() == other.ctx_map()
    }

    fn extended(&self, x: Var, a: &Formula) -> Sequent {
        let mut s = self.clone();
        s.ctx.push((x, a.clone()));
        s
    }

    fn ctx_strings(&self) -> Vec<String> {
        self.ctx.iter().map(|(x, f)| format!("{x} : {f}")).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ctx": self.ctx_strings(),
            "names": self.names.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            "constraint": self.constraint.to_string(),
            "formula": self.formula.to_string(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Sequent> {
        let ctx = array(v, "ctx")?
            .iter()
            .map(|e| {
                let s = e.as_str().ok_or_else(|| ill("context entry must be a string"))?;
                let (x, f) = s.split_once(':').ok_or_else(|| ill(format!("bad context entry `{s}`")))?;
                Ok((Var::new(x.trim()), Formula::parse(f)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let names = match v.get("names") {
            Some(ns) => ns
                .as_array()
                .ok_or_else(|| ill("`names` must be an array"))?
                .iter()
                .map(|e| e.as_str().map(Name::new).ok_or_else(|| ill("name must be a string")))
                .collect::<Result<BTreeSet<_>>>()?,
            None => BTreeSet::new(),
        };
        let constraint = match v.get("constraint") {
            Some(c) => parse_formula(c.as_str().ok_or_else(|| ill("`constraint` must be a string"))?)?,
            None => BoolFormula::Top,
        };
        Ok(Sequent { ctx, names, constraint, formula: Formula::parse(string(v, "formula")?)? })
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.names.iter().map(|a| a.to_string()).collect();
        write!(
            f,
            "{} |-{{{}}} {} >-> {}",
            self.ctx_strings().join(", "),
            names.join(","),
            self.constraint,
            self.formula
        )
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofRule {
    Id,
    Bot,
    /// Merge two proofs along a choice bit.
    M,
    ImpI,
    ImpE,
    /// Counting introduction, binding a fresh name.
    Ci,
    /// Counting elimination.
    Ce,
}

impl ProofRule {
    pub const ALL: [ProofRule; 7] =
        [ProofRule::Id, ProofRule::Bot, ProofRule::M, ProofRule::ImpI, ProofRule::ImpE, ProofRule::Ci, ProofRule::Ce];

    pub fn tag(self) -> &'static str {
        match self {
            ProofRule::Id => "id",
            ProofRule::Bot => "bot",
            ProofRule::M => "m",
            ProofRule::ImpI => "imp_i",
            ProofRule::ImpE => "imp_e",
            ProofRule::Ci => "ci",
            ProofRule::Ce => "ce",
        }
    }

    pub fn from_tag(s: &str) -> Option<ProofRule> {
        ProofRule::ALL.into_iter().find(|r| r.tag() == s)
    }
}

/// Rule data: the hypothesis used or discharged (`id`, `imp_i`, `ce`), the
/// pivot bit of `m`, and the bound name and event of `ci`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofSide {
    pub var: Option<Var>,
    pub pivot: Option<(Name, u32)>,
    pub name: Option<Name>,
    pub d: Option<BoolFormula>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofDerivation {
    pub rule: ProofRule,
    pub sequent: Sequent,
    pub side: ProofSide,
    pub premises: Vec<ProofDerivation>,
}

fn ill(msg: impl Into<String>) -> Error {
    Error::IllFormed(msg.into())
}

fn string<'a>(v: &'a Value, k: &str) -> Result<&'a str> {
    v.get(k)
        .ok_or_else(|| ill(format!("missing field `{k}`")))?
        .as_str()
        .ok_or_else(|| ill(format!("field `{k}` must be a string")))
}

fn array<'a>(v: &'a Value, k: &str) -> Result<&'a Vec<Value>> {
    v.get(k)
        .ok_or_else(|| ill(format!("missing field `{k}`")))?
        .as_array()
        .ok_or_else(|| ill(format!("field `{k}` must be an array")))
}

impl ProofDerivation {
    pub fn new(rule: ProofRule, sequent: Sequent, side: ProofSide, premises: Vec<ProofDerivation>) -> Self {
        ProofDerivation { rule, sequent, side, premises }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofDerivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofDerivation::height).max().unwrap_or(0)
    }

    pub fn constraint(&self) -> &BoolFormula {
        &self.sequent.constraint
    }

    pub fn formula(&self) -> &Formula {
        &self.sequent.formula
    }

    pub fn to_json(&self) -> Value {
        let mut side = Map::new();
        if let Some(x) = self.side.var {
            side.insert("var".into(), json!(x.to_string()));
        }
        if let Some((a, i)) = self.side.pivot {
            side.insert("pivot".into(), json!(format!("{a}.{i}")));
        }
        if let Some(a) = self.side.name {
            side.insert("name".into(), json!(a.to_string()));
        }
        if let Some(d) = &self.side.d {
            side.insert("d".into(), json!(d.to_string()));
        }
        json!({
            "rule": self.rule.tag(),
            "sequent": self.sequent.to_json(),
            "side": Value::Object(side),
            "premises": self.premises.iter().map(ProofDerivation::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<ProofDerivation> {
        let tag = string(v, "rule")?;
        let rule = ProofRule::from_tag(tag).ok_or_else(|| ill(format!("unknown rule `{tag}`")))?;
        let sequent = Sequent::from_json(v.get("sequent").ok_or_else(|| ill("missing field `sequent`"))?)?;
        let mut side = ProofSide::default();
        if let Some(s) = v.get("side") {
            if let Some(x) = s.get("var").and_then(Value::as_str) {
                side.var = Some(Var::new(x));
            }
            if let Some(p) = s.get("pivot").and_then(Value::as_str) {
                match parse_formula(p)? {
                    BoolFormula::Atom(a, i) => side.pivot = Some((a, i)),
                    _ => return Err(ill(format!("pivot `{p}` is not an atom"))),
                }
            }
            if let Some(a) = s.get("name").and_then(Value::as_str) {
                side.name = Some(Name::new(a));
            }
            if let Some(d) = s.get("d").and_then(Value::as_str) {
                side.d = Some(parse_formula(d)?);
            }
        }
        let premises = match v.get("premises") {
            Some(p) => p
                .as_array()
                .ok_or_else(|| ill("`premises` must be an array"))?
                .iter()
                .map(ProofDerivation::from_json)
                .collect::<Result<_>>()?,
            None => Vec::new(),
        };
        Ok(ProofDerivation { rule, sequent, side, premises })
    }
}

struct Here<'a> {
    path: &'a [usize],
}

impl Here<'_> {
    fn shape<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::RuleShape { path: fmt_path(self.path), msg: msg.into() })
    }

    fn side<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::SideCondition { path: fmt_path(self.path), msg: msg.into() })
    }

    fn arity(&self, p: &ProofDerivation, n: usize) -> Result<()> {
        if p.premises.len() != n {
            return self.shape(format!("{} expects {n} premises, got {}", p.rule.tag(), p.premises.len()));
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

    /// Same hypotheses and names as `s`.
    fn alongside(&self, s: &Sequent, p: &Sequent) -> Result<()> {
        if !s.same_ctx(p) {
            return self.shape("premise context differs");
        }
        if s.names != p.names {
            return self.side("premise name set differs");
        }
        Ok(())
    }

    fn var(&self, p: &ProofDerivation) -> Result<Var> {
        match p.side.var {
            Some(x) => Ok(x),
            None => self.shape(format!("{} needs side `var`", p.rule.tag())),
        }
    }

    /// The premise discharges `x : a` on top of the conclusion's hypotheses.
    fn discharging(&self, s: &Sequent, p: &Sequent, x: Var, a: &Formula) -> Result<()> {
        if s.lookup(x).is_some() {
            return self.side(format!("discharged hypothesis {x} clashes with the context"));
        }
        if !s.extended(x, a).same_ctx(p) {
            return self.shape(format!("premise context must extend the conclusion by {x} : {a}"));
        }
        if s.names != p.names {
            return self.side("premise name set differs");
        }
        Ok(())
    }
}

/// Check every node of `p`; returns the root sequent.
pub fn check_proof(p: &ProofDerivation) -> Result<Sequent> {
    check_node(p, &mut Vec::new())?;
    Ok(p.sequent.clone())
}

fn check_node(p: &ProofDerivation, path: &mut Vec<usize>) -> Result<()> {
    check_local(p, &Here { path })?;
    for (k, q) in p.premises.iter().enumerate() {
        path.push(k);
        check_node(q, path)?;
        path.pop();
    }
    Ok(())
}

fn check_local(p: &ProofDerivation, h: &Here) -> Result<()> {
    let s = &p.sequent;
    let mut seen = BTreeSet::new();
    for (x, f) in &s.ctx {
        if !seen.insert(*x) {
            return h.side(format!("hypothesis {x} declared twice"));
        }
        if !f.is_well_formed() {
            return h.shape(format!("hypothesis `{f}` has a quantifier outside (0,1]"));
        }
    }
    if !s.formula.is_well_formed() {
        return h.shape(format!("`{}` has a quantifier outside (0,1]", s.formula));
    }
    if !s.constraint.names().is_subset(&s.names) {
        return h.side("names of the constraint are not declared");
    }
    let ps: Vec<&Sequent> = p.premises.iter().map(|q| &q.sequent).collect();
    match p.rule {
        ProofRule::Id => {
            h.arity(p, 0)?;
            let x = h.var(p)?;
            match s.lookup(x) {
                None => return h.side(format!("{x} is not a hypothesis")),
                Some(a) if *a != s.formula => return h.shape(format!("{x} proves `{a}`, not `{}`", s.formula)),
                Some(_) => {}
            }
        }
        ProofRule::Bot => {
            h.arity(p, 0)?;
            h.entails(&s.constraint, &BoolFormula::Bot)?;
        }
        ProofRule::M => {
            h.arity(p, 2)?;
            let Some((a, i)) = p.side.pivot else { return h.shape("m needs side `pivot`") };
            if !s.names.contains(&a) {
                return h.side(format!("pivot name {a} is not declared"));
            }
            for q in &ps {
                h.alongside(s, q)?;
                if q.formula != s.formula {
                    return h.shape("premise formula differs");
                }
            }
            let x = BoolFormula::atom(a, i);
            let target = BoolFormula::disj(
                BoolFormula::conj(ps[0].constraint.clone(), x.clone()),
                BoolFormula::conj(ps[1].constraint.clone(), BoolFormula::negate(x)),
            );
            h.entails(&s.constraint, &target)?;
        }
        ProofRule::ImpI => {
            h.arity(p, 1)?;
            let Formula::Implies(a, b) = &s.formula else { return h.shape("conclusion must be an implication") };
            let x = h.var(p)?;
            h.discharging(s, ps[0], x, a)?;
            if ps[0].formula != **b {
                return h.shape(format!("premise must prove `{b}`"));
            }
            h.entails(&s.constraint, &ps[0].constraint)?;
        }
        ProofRule::ImpE => {
            h.arity(p, 2)?;
            h.alongside(s, ps[0])?;
            h.alongside(s, ps[1])?;
            let Formula::Implies(a, b) = &ps[0].formula else { return h.shape("major premise must be an implication") };
            if **b != s.formula {
                return h.shape(format!("major premise concludes `{b}`, not `{}`", s.formula));
            }
            if ps[1].formula != **a {
                return h.shape(format!("minor premise must prove `{a}`"));
            }
            h.entails(&s.constraint, &BoolFormula::conj(ps[0].constraint.clone(), ps[1].constraint.clone()))?;
        }
        ProofRule::Ci => {
            h.arity(p, 1)?;
            let Formula::Count(q, a) = &s.formula else { return h.shape("conclusion must be quantified") };
            let Some(name) = p.side.name else { return h.shape("ci needs side `name`") };
            let Some(d) = &p.side.d else { return h.shape("ci needs side `d`") };
            if s.names.contains(&name) {
                return h.side(format!("{name} is already declared"));
            }
            if d.names().iter().any(|n| *n != name) {
                return h.side(format!("event `{d}` mentions names other than {name}"));
            }
            if !s.same_ctx(ps[0]) {
                return h.shape("premise context differs");
            }
            let mut inner = s.names.clone();
            inner.insert(name);
            if ps[0].names != inner {
                return h.side(format!("premise must declare exactly the names plus {name}"));
            }
            if ps[0].formula != **a {
                return h.shape(format!("premise must prove `{a}`"));
            }
            h.entails(&BoolFormula::conj(s.constraint.clone(), d.clone()), &ps[0].constraint)?;
            if measure(d)? < *q {
                return h.side(format!("measure of `{d}` is below {}", fmt_rational(q)));
            }
        }
        ProofRule::Ce => {
            h.arity(p, 2)?;
            h.alongside(s, ps[0])?;
            let Formula::Count(q, a) = &ps[0].formula else { return h.shape("major premise must be quantified") };
            let x = h.var(p)?;
            h.discharging(s, ps[1], x, a)?;
            let expect = Formula::count(q.clone(), ps[1].formula.clone());
            if s.formula != expect {
                return h.shape(format!("expected conclusion `{expect}`"));
            }
            h.entails(&s.constraint, &BoolFormula::conj(ps[0].constraint.clone(), ps[1].constraint.clone()))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{half_identity_proof, proof_fixtures, twice_half_cut, twice_proof};
    use crate::proof::build;
    use crate::rational::rat;

    fn formula(s: &str) -> Formula {
        Formula::parse(s).unwrap()
    }

    #[test]
    fn fixtures_check() {
        for (name, p) in proof_fixtures() {
            let s = check_proof(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!(s.ctx.is_empty() && s.names.is_empty() && s.constraint == BoolFormula::Top, "{name}");
        }
        assert_eq!(check_proof(&half_identity_proof("a")).unwrap().formula, formula("C[1/2] (p -> p)"));
        let twice = check_proof(&twice_proof(&rat(1, 2))).unwrap();
        assert_eq!(twice.formula, formula("C[1/2] (p -> p) -> p -> C[1/2] C[1/2] p"));
        assert_eq!(check_proof(&twice_half_cut()).unwrap().formula, formula("p -> C[1/2] C[1/2] p"));
    }

    #[test]
    fn identity_under_any_constraint() {
        let x = Var::new("x");
        let ns: BTreeSet<Name> = [Name::new("a"), Name::new("b")].into();
        for c in ["T", "F", "a.0", "a.0 & !b.3", "a.1 | b.0"] {
            let p = build::id(&vec![(x, formula("p -> p"))], &ns, x, parse_formula(c).unwrap()).unwrap();
            assert!(check_proof(&p).is_ok(), "{c}");
        }
    }

    #[test]
    fn rejects_bad_side_conditions() {
        let ns = BTreeSet::new();
        let bot = build::bot(&vec![], &ns, BoolFormula::Top, formula("p"));
        assert_eq!(check_proof(&bot).unwrap_err().code(), "E_SIDE_CONDITION");

        let mut greedy = half_identity_proof("a");
        greedy.sequent.formula = formula("C[3/4] (p -> p)");
        assert_eq!(check_proof(&greedy).unwrap_err().code(), "E_SIDE_CONDITION");

        let mut wrong = twice_proof(&rat(1, 2));
        wrong.sequent.formula = formula("C[1/2] (p -> p) -> p -> C[1/4] p");
        assert_eq!(check_proof(&wrong).unwrap_err().code(), "E_RULE_SHAPE");

        let mut clash = half_identity_proof("a");
        clash.sequent.names.insert(Name::new("a"));
        assert_eq!(check_proof(&clash).unwrap_err().code(), "E_SIDE_CONDITION");
        assert_eq!(crate::proof::normalize_step(&clash).unwrap_err().code(), "E_ILL_FORMED");
    }

    #[test]
    fn json_round_trip() {
        for (name, p) in proof_fixtures() {
            let back = ProofDerivation::from_json(&p.to_json()).unwrap();
            assert_eq!(check_proof(&back).unwrap(), check_proof(&p).unwrap(), "{name}");
            assert_eq!(back.to_json(), p.to_json(), "{name}");
        }
        let bad = serde_json::json!({"rule": "cut", "sequent": {"ctx": [], "formula": "p"}});
        assert_eq!(ProofDerivation::from_json(&bad).unwrap_err().code(), "E_ILL_FORMED");
    }
}
