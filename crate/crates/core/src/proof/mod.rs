//! Intuitionistic counting propositions, their natural deduction proofs,
//! proof normalization and the translation of proofs into typed terms.

pub mod build;
mod kernel;
mod normalize;
mod translate;

pub use kernel::{check_proof, ProofDerivation, ProofRule, ProofSide, Sequent};
pub use normalize::{normalize, normalize_step, normalize_step_traced, subst, ProofRedex, ProofStep};
pub use translate::{formula_type, translate, verify_simulation, SimulationReport, SimulationStep};

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::parse::Cursor;
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Implies(Box<Formula>, Box<Formula>),
    Count(Rational, Box<Formula>),
}

impl Formula {
    pub fn prop(p: &str) -> Formula {
        Formula::Prop(p.to_string())
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn count(q: Rational, a: Formula) -> Formula {
        Formula::Count(q, Box::new(a))
    }

    /// Every quantifier lies in `(0, 1]`.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Formula::Prop(_) => true,
            Formula::Implies(a, b) => a.is_well_formed() && b.is_well_formed(),
            Formula::Count(q, a) => *q > Rational::zero() && *q <= Rational::one() && a.is_well_formed(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Prop(_) => 1,
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::Count(_, a) => 1 + a.size(),
        }
    }

    pub fn parse(text: &str) -> Result<Formula> {
        let mut c = Cursor::new(text);
        let f = implication(&mut c)?;
        if !c.at_end() {
            return c.err("unexpected trailing input");
        }
        Ok(f)
    }
}

fn implication(c: &mut Cursor) -> Result<Formula> {
    let left = prefixed(c)?;
    if c.eat_str("->") {
        return Ok(Formula::implies(left, implication(c)?));
    }
    Ok(left)
}

fn prefixed(c: &mut Cursor) -> Result<Formula> {
    match c.peek() {
        Some(b'C') => {
            c.pos += 1;
            c.expect(b'[')?;
            let start = c.pos;
            while c.peek_at(0).is_some_and(|b| b != b']') {
                c.pos += 1;
            }
            let text = std::str::from_utf8(&c.src[start..c.pos]).unwrap_or("");
            let q = parse_rational(text).map_err(|_| Error::syntax(start, "bad rational"))?;
            if q <= Rational::zero() || q > Rational::one() {
                return Err(Error::syntax(start, "quantifier outside (0,1]"));
            }
            c.expect(b']')?;
            Ok(Formula::count(q, prefixed(c)?))
        }
        Some(b'(') => {
            c.pos += 1;
            let f = implication(c)?;
            c.expect(b')')?;
            Ok(f)
        }
        _ => Ok(Formula::Prop(c.ident()?)),
    }
}

fn write_formula(f: &Formula, atomic: bool, out: &mut String) {
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Implies(a, b) => {
            if atomic {
                out.push('(');
            }
            write_formula(a, true, out);
            out.push_str(" -> ");
            write_formula(b, false, out);
            if atomic {
                out.push(')');
            }
        }
        Formula::Count(q, a) => {
            out.push_str(&format!("C[{}] ", fmt_rational(q)));
            write_formula(a, true, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, false, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn parse_print() {
        let f = Formula::parse("C[1/2] (p -> p) -> p -> C[1/2] C[1/2] p").unwrap();
        let half = || rat(1, 2);
        let p = || Formula::prop("p");
        let expect = Formula::implies(
            Formula::count(half(), Formula::implies(p(), p())),
            Formula::implies(p(), Formula::count(half(), Formula::count(half(), p()))),
        );
        assert_eq!(f, expect);
        assert_eq!(f.to_string(), "C[1/2] (p -> p) -> p -> C[1/2] C[1/2] p");
        assert_eq!(Formula::parse("(p -> q) -> r").unwrap().to_string(), "(p -> q) -> r");
        assert!(Formula::parse("C[0] p").is_err());
        assert!(Formula::parse("p ->").is_err());
    }
}
