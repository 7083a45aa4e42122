//! Probabilistic event lambda calculus: terms, reduction, exact termination
//! semantics, counting type systems and the proof-to-term translation.

pub mod boolean;
pub mod distribution;
pub mod error;
pub mod fixtures;
pub mod gen;
pub mod name;
pub mod parse;
pub mod proof;
pub mod rational;
pub mod rewrite;
pub mod term;
pub mod types;

pub use boolean::{entails, measure, parse_formula, BoolFormula};
pub use error::{Error, Result};
pub use name::{Name, Var};
pub use parse::{parse_term, print_term};
pub use proof::{check_proof, translate, Formula, ProofDerivation, Sequent};
pub use rational::{fmt_rational, parse_rational, Rational};
pub use term::{alpha_eq, project, substitute, Term, Valuation};
pub use types::{check_derivation, parse_type, Derivation, Judgement, System, Type, TypeRule};
