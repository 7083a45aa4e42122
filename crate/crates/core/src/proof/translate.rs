//! Proofs as programs: each proof becomes a term with a CbV typing derivation,
//! and each normalization step becomes a short reduction sequence.

use std::collections::{HashSet, VecDeque};

use serde_json::{json, Value};

use super::kernel::{check_proof, ProofDerivation, ProofRule};
use super::normalize::normalize_step_traced;
use super::Formula;
use crate::error::{Error, Result};
use crate::rewrite::{step, Mode, ReductionStep};
use crate::term::{alpha_eq_up_to_names, canonical_key, Term};
use crate::types::build::{self, Ctx};
use crate::types::{check_derivation, Derivation, Judgement, System, Type, TypeRule};

/// The type of a formula: atoms are `o`, an implication carries the prefix of its
/// conclusion outside the arrow, and quantifiers map to quantifiers.
pub fn formula_type(f: &Formula) -> Type {
    match f {
        Formula::Prop(_) => Type::O,
        Formula::Implies(a, b) => {
            let sb = formula_type(b);
            let (qs, tau) = sb.split_prefix();
            Type::prefixed(&qs, Type::arrow(formula_type(a), tau.clone()))
        }
        Formula::Count(q, a) => Type::counted(q.clone(), formula_type(a)),
    }
}

fn ill(msg: impl Into<String>) -> Error {
    Error::IllFormed(msg.into())
}

fn build(p: &ProofDerivation) -> Result<Derivation> {
    let s = &p.sequent;
    let ctx: Ctx = s.ctx.iter().map(|(x, f)| (*x, formula_type(f))).collect();
    let b = s.constraint.clone();
    let missing = || ill(format!("{} node lacks side data", p.rule.tag()));
    let prem = |k: usize| build(&p.premises[k]);
    Ok(match p.rule {
        ProofRule::Id => build::id(&ctx, &s.names, p.side.var.ok_or_else(missing)?, b)?,
        ProofRule::Bot => {
            let j = Judgement::new(ctx, s.names.clone(), Term::Const, b, formula_type(&s.formula));
            Derivation::new(TypeRule::Or, j, vec![])
        }
        ProofRule::M => {
            let (a, i) = p.side.pivot.ok_or_else(missing)?;
            build::plus(prem(0)?, prem(1)?, a, i, b)
        }
        ProofRule::ImpI => build::lam(p.side.var.ok_or_else(missing)?, prem(0)?, b)?,
        ProofRule::ImpE => build::app(prem(0)?, prem(1)?, b)?,
        ProofRule::Ci => {
            let Formula::Count(q, _) = &s.formula else { return Err(ill("ci must conclude a quantified formula")) };
            let a = p.side.name.ok_or_else(missing)?;
            let d = p.side.d.clone().ok_or_else(missing)?;
            build::mu(prem(0)?, a, d, Some(q.clone()), b)?
        }
        ProofRule::Ce => {
            let x = p.side.var.ok_or_else(missing)?;
            let minor = prem(1)?;
            let c = minor.judgement.constraint.clone();
            build::cbv(build::lam(x, minor, c)?, prem(0)?, b)?
        }
    })
}

/// The term of `p` and its checked CbV derivation, whose judgement is the
/// image of `p`'s sequent.
pub fn translate(p: &ProofDerivation) -> Result<(Term, Derivation)> {
    check_proof(p).map_err(|e| ill(format!("proof does not check: {e}")))?;
    let d = build(p)?;
    let j = check_derivation(&d, System::Cbv).map_err(|e| ill(format!("translation does not type: {e}")))?;
    let s = &p.sequent;
    let expect_ctx: Vec<_> = s.ctx.iter().map(|(x, f)| (*x, formula_type(f))).collect();
    let expect =
        Judgement::new(expect_ctx, s.names.clone(), j.term.clone(), s.constraint.clone(), formula_type(&s.formula));
    if !j.same_ctx(&expect) || j.names != expect.names || j.constraint != expect.constraint || j.ty != expect.ty {
        return Err(ill(format!("translated judgement `{j}` is not the image of `{s}`")));
    }
    Ok((j.term, d))
}

/// One normalization step and the reduction found between the translations.
#[derive(Clone, Debug)]
pub struct SimulationStep {
    pub redex: String,
    pub path: Vec<usize>,
    pub before: Term,
    pub after: Term,
    /// `None` when no reduction sequence was found within the fuel.
    pub trace: Option<Vec<ReductionStep>>,
}

#[derive(Clone, Debug, Default)]
pub struct SimulationReport {
    pub steps: Vec<SimulationStep>,
    /// Whether a normal proof was reached within the fuel.
    pub normalized: bool,
}

impl SimulationReport {
    pub fn failures(&self) -> Vec<&SimulationStep> {
        self.steps.iter().filter(|s| s.trace.is_none()).collect()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                json!({
                    "redex": s.redex,
                    "path": s.path,
                    "before": s.before.to_string(),
                    "after": s.after.to_string(),
                    "trace": s.trace.as_ref().map(|t| t.iter().map(|r| r.rule.tag()).collect::<Vec<_>>()),
                })
            })
            .collect();
        json!({ "normalized": self.normalized, "failures": self.failures().len(), "steps": steps })
    }
}

/// Breadth-first search for `from ->* to` (up to bound names), visiting at most `fuel` terms.
fn reduces_to(from: &Term, to: &Term, fuel: usize) -> Result<Option<Vec<ReductionStep>>> {
    let mut queue = VecDeque::from([(from.clone(), Vec::new())]);
    let mut seen = HashSet::from([canonical_key(from, true)]);
    let mut visited = 0;
    while let Some((t, trace)) = queue.pop_front() {
        if alpha_eq_up_to_names(&t, to) {
            return Ok(Some(trace));
        }
        visited += 1;
        if visited > fuel {
            break;
        }
        for s in step(&t, Mode::Braces)? {
            if seen.insert(canonical_key(&s.after, true)) {
                let mut next = trace.clone();
                let after = s.after.clone();
                next.push(s);
                queue.push_back((after, next));
            }
        }
    }
    Ok(None)
}

/// Normalize `p` step by step and check that each step is matched by a
/// reduction of the translated terms. At most `fuel` steps are taken, and each
/// search visits at most `fuel` terms.
pub fn verify_simulation(p: &ProofDerivation, fuel: usize) -> Result<SimulationReport> {
    let mut report = SimulationReport::default();
    let mut cur = p.clone();
    let mut before = translate(&cur)?.0;
    for _ in 0..fuel {
        let Some(st) = normalize_step_traced(&cur)? else {
            report.normalized = true;
            return Ok(report);
        };
        let after = translate(&st.result)?.0;
        let trace = reduces_to(&before, &after, fuel)?;
        report.steps.push(SimulationStep {
            redex: st.redex.tag().to_string(),
            path: st.path,
            before: before.clone(),
            after: after.clone(),
            trace,
        });
        cur = st.result;
        before = after;
    }
    report.normalized = normalize_step_traced(&cur)?.is_none();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{half_identity_proof, proof_fixtures, twice_half_cut, twice_proof};
    use crate::parse::parse_term;
    use crate::proof::{normalize, normalize_step_traced, ProofRedex};
    use crate::rational::rat;
    use crate::term::alpha_eq;
    use crate::types::parse_type;

    #[test]
    fn fixture_translations_type() {
        for (name, p) in proof_fixtures() {
            let (t, d) = translate(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(d.judgement.ty, formula_type(&p.sequent.formula), "{name}");
            assert!(t.free_vars().is_empty(), "{name}");
        }
    }

    #[test]
    fn half_identity_term() {
        let (t, d) = translate(&half_identity_proof("a")).unwrap();
        assert!(alpha_eq(&t, &parse_term("nu a. (\\x. x) (+a.0) #c").unwrap()));
        assert_eq!(d.judgement.ty, parse_type("C[1/2] (o => o)").unwrap());
    }

    #[test]
    fn twice_term_uses_two_cbv_applications() {
        let (t, d) = translate(&twice_proof(&rat(1, 2))).unwrap();
        let expect = parse_term("\\f. \\y. {\\h. {\\g. g (h y)} f} f").unwrap();
        assert!(alpha_eq(&t, &expect), "{t}");
        assert_eq!(d.judgement.ty, parse_type("C[1/2] C[1/2] (C[1/2] (o => o) => (o => o))").unwrap());
    }

    #[test]
    fn cut_simulation_steps() {
        let cut = twice_half_cut();
        let first = normalize_step_traced(&cut).unwrap().unwrap();
        assert_eq!(first.redex, ProofRedex::ImpCut);
        let report = verify_simulation(&cut, 1000).unwrap();
        assert!(report.normalized);
        assert!(report.failures().is_empty());
        let imp = &report.steps[0];
        assert_eq!(imp.trace.as_ref().unwrap().len(), 1);
        let count = report.steps.iter().find(|s| s.redex == "count_cut").unwrap();
        let rules: Vec<&str> = count.trace.as_ref().unwrap().iter().map(|s| s.rule.tag()).collect();
        assert_eq!(rules, ["braces_nu", "beta"]);
    }

    #[test]
    fn fixtures_simulate() {
        let mut seen = std::collections::BTreeSet::new();
        for (name, p) in proof_fixtures() {
            let report = verify_simulation(&p, 1000).unwrap();
            assert!(report.normalized, "{name}");
            assert!(report.failures().is_empty(), "{name}: {:?}", report.to_json());
            let (n, _) = normalize(&p, 1000).unwrap();
            assert_eq!(n.sequent, p.sequent, "{name}");
            seen.extend(report.steps.iter().map(|s| s.redex.clone()));
        }
        for tag in ["imp_cut", "count_cut", "m_idem", "m_merge_left", "m_merge_right", "m_over_imp_i"] {
            assert!(seen.contains(tag), "{tag} never fired");
        }
        for tag in ["m_over_imp_e_major", "m_over_imp_e_minor", "m_over_ci", "m_over_ce_major", "m_over_ce_minor"] {
            assert!(seen.contains(tag), "{tag} never fired");
        }
    }

    #[test]
    fn normal_proof_reports_nothing() {
        let report = verify_simulation(&half_identity_proof("a"), 100).unwrap();
        assert!(report.normalized && report.steps.is_empty());
    }
}
