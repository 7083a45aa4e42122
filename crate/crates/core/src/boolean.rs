//! Boolean formulas over atoms `a.i` and their exact measure.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::name::Name;
use crate::parse::Cursor;
use crate::rational::Rational;
use crate::term::Valuation;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum BoolFormula {
    Top,
    Bot,
    Atom(Name, u32),
    Not(Box<BoolFormula>),
    And(Box<BoolFormula>, Box<BoolFormula>),
    Or(Box<BoolFormula>, Box<BoolFormula>),
}

pub const DEFAULT_ATOM_CAP: usize = 24;

impl BoolFormula {
    pub fn atom(a: Name, i: u32) -> Self {
        BoolFormula::Atom(a, i)
    }

    pub fn negate(b: BoolFormula) -> Self {
        BoolFormula::Not(Box::new(b))
    }

    pub fn conj(b: BoolFormula, c: BoolFormula) -> Self {
        BoolFormula::And(Box::new(b), Box::new(c))
    }

    pub fn disj(b: BoolFormula, c: BoolFormula) -> Self {
        BoolFormula::Or(Box::new(b), Box::new(c))
    }

    /// `b & c` with units and zeros folded away.
    pub fn and_s(b: BoolFormula, c: BoolFormula) -> Self {
        match (b, c) {
            (BoolFormula::Top, x) | (x, BoolFormula::Top) => x,
            (BoolFormula::Bot, _) | (_, BoolFormula::Bot) => BoolFormula::Bot,
            (x, y) if x == y => x,
            (x, y) => Self::conj(x, y),
        }
    }

    pub fn or_s(b: BoolFormula, c: BoolFormula) -> Self {
        match (b, c) {
            (BoolFormula::Bot, x) | (x, BoolFormula::Bot) => x,
            (BoolFormula::Top, _) | (_, BoolFormula::Top) => BoolFormula::Top,
            (x, y) if x == y => x,
            (x, y) => Self::disj(x, y),
        }
    }

    pub fn not_s(b: BoolFormula) -> Self {
        match b {
            BoolFormula::Top => BoolFormula::Bot,
            BoolFormula::Bot => BoolFormula::Top,
            BoolFormula::Not(x) => *x,
            x => Self::negate(x),
        }
    }

    /// Conjunction that drops a conjunct already implied by the other.
    pub fn and_simplify(b: BoolFormula, c: BoolFormula) -> Self {
        if entails(&b, &c).unwrap_or(false) {
            b
        } else if entails(&c, &b).unwrap_or(false) {
            c
        } else {
            Self::and_s(b, c)
        }
    }

    pub fn atoms(&self) -> BTreeSet<(Name, u32)> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<(Name, u32)>) {
        match self {
            BoolFormula::Top | BoolFormula::Bot => {}
            BoolFormula::Atom(a, i) => {
                out.insert((*a, *i));
            }
            BoolFormula::Not(b) => b.collect_atoms(out),
            BoolFormula::And(b, c) | BoolFormula::Or(b, c) => {
                b.collect_atoms(out);
                c.collect_atoms(out);
            }
        }
    }

    pub fn names(&self) -> BTreeSet<Name> {
        self.atoms().into_iter().map(|(a, _)| a).collect()
    }

    pub fn rename_name(&self, from: Name, to: Name) -> BoolFormula {
        match self {
            BoolFormula::Atom(a, i) if *a == from => BoolFormula::Atom(to, *i),
            BoolFormula::Top | BoolFormula::Bot | BoolFormula::Atom(..) => self.clone(),
            BoolFormula::Not(b) => Self::negate(b.rename_name(from, to)),
            BoolFormula::And(b, c) => Self::conj(b.rename_name(from, to), c.rename_name(from, to)),
            BoolFormula::Or(b, c) => Self::disj(b.rename_name(from, to), c.rename_name(from, to)),
        }
    }

    pub fn eval(&self, omega: &Valuation) -> Result<bool> {
        eval_formula(self, omega)
    }
}

pub fn eval_formula(b: &BoolFormula, omega: &Valuation) -> Result<bool> {
    Ok(match b {
        BoolFormula::Top => true,
        BoolFormula::Bot => false,
        BoolFormula::Atom(a, i) => omega.get(*a, *i).ok_or_else(|| Error::UndefinedBit(format!("{a}.{i}")))?,
        BoolFormula::Not(c) => !eval_formula(c, omega)?,
        BoolFormula::And(c, d) => eval_formula(c, omega)? && eval_formula(d, omega)?,
        BoolFormula::Or(c, d) => eval_formula(c, omega)? || eval_formula(d, omega)?,
    })
}

const PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Bitset of satisfying rows; row `r` assigns atom `k` the bit `(r >> k) & 1`.
struct Table<'a> {
    atoms: &'a [(Name, u32)],
    words: usize,
    mask: u64,
}

impl Table<'_> {
    fn new(atoms: &[(Name, u32)]) -> Table<'_> {
        let n = atoms.len();
        let (words, mask) = if n < 6 { (1, (1u64 << (1u32 << n)).wrapping_sub(1)) } else { (1 << (n - 6), !0) };
        let mask = if n == 6 { !0 } else { mask };
        Table { atoms, words, mask }
    }

    fn eval(&self, b: &BoolFormula) -> Vec<u64> {
        match b {
            BoolFormula::Top => self.fill(!0),
            BoolFormula::Bot => vec![0; self.words],
            BoolFormula::Atom(a, i) => {
                let k = self.atoms.binary_search(&(*a, *i)).expect("atom indexed");
                let mut v: Vec<u64> = if k < 6 {
                    vec![PATTERNS[k]; self.words]
                } else {
                    (0..self.words).map(|w| if (w >> (k - 6)) & 1 == 1 { !0 } else { 0 }).collect()
                };
                self.trim(&mut v);
                v
            }
            BoolFormula::Not(c) => {
                let mut v: Vec<u64> = self.eval(c).into_iter().map(|w| !w).collect();
                self.trim(&mut v);
                v
            }
            BoolFormula::And(c, d) => {
                let mut v = self.eval(c);
                for (x, y) in v.iter_mut().zip(self.eval(d)) {
                    *x &= y;
                }
                v
            }
            BoolFormula::Or(c, d) => {
                let mut v = self.eval(c);
                for (x, y) in v.iter_mut().zip(self.eval(d)) {
                    *x |= y;
                }
                v
            }
        }
    }

    fn fill(&self, w: u64) -> Vec<u64> {
        let mut v = vec![w; self.words];
        self.trim(&mut v);
        v
    }

    fn trim(&self, v: &mut [u64]) {
        if let Some(last) = v.last_mut() {
            *last &= self.mask;
        }
    }
}

fn sorted_atoms(fs: &[&BoolFormula], cap: usize) -> Result<Vec<(Name, u32)>> {
    let mut all = BTreeSet::new();
    for f in fs {
        f.collect_atoms(&mut all);
    }
    if all.len() > cap {
        return Err(Error::TooManyAtoms { count: all.len(), cap });
    }
    Ok(all.into_iter().collect())
}

pub fn measure(b: &BoolFormula) -> Result<Rational> {
    measure_with_cap(b, DEFAULT_ATOM_CAP)
}

pub fn measure_with_cap(b: &BoolFormula, cap: usize) -> Result<Rational> {
    let atoms = sorted_atoms(&[b], cap)?;
    let table = Table::new(&atoms);
    let count: u64 = table.eval(b).iter().map(|w| w.count_ones() as u64).sum();
    Ok(Rational::new(BigInt::from(count), BigInt::from(1u64) << atoms.len()))
}

pub fn entails(b: &BoolFormula, c: &BoolFormula) -> Result<bool> {
    let atoms = sorted_atoms(&[b, c], DEFAULT_ATOM_CAP)?;
    let table = Table::new(&atoms);
    Ok(table.eval(b).iter().zip(table.eval(c)).all(|(x, y)| x & !y == 0))
}

pub fn equivalent(b: &BoolFormula, c: &BoolFormula) -> Result<bool> {
    Ok(entails(b, c)? && entails(c, b)?)
}

/// No assignment satisfies both.
pub fn disjoint(b: &BoolFormula, c: &BoolFormula) -> Result<bool> {
    entails(&BoolFormula::conj(b.clone(), c.clone()), &BoolFormula::Bot)
}

pub fn parse_formula(text: &str) -> Result<BoolFormula> {
    let mut c = Cursor::new(text);
    let b = disjunction(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(b)
}

pub(crate) fn disjunction(c: &mut Cursor) -> Result<BoolFormula> {
    let mut b = conjunction(c)?;
    while c.peek() == Some(b'|') {
        c.pos += 1;
        b = BoolFormula::disj(b, conjunction(c)?);
    }
    Ok(b)
}

fn conjunction(c: &mut Cursor) -> Result<BoolFormula> {
    let mut b = unary(c)?;
    while c.peek() == Some(b'&') {
        c.pos += 1;
        b = BoolFormula::conj(b, unary(c)?);
    }
    Ok(b)
}

fn unary(c: &mut Cursor) -> Result<BoolFormula> {
    match c.peek() {
        Some(b'!') => {
            c.pos += 1;
            Ok(BoolFormula::negate(unary(c)?))
        }
        Some(b'(') => {
            c.pos += 1;
            let b = disjunction(c)?;
            c.expect(b')')?;
            Ok(b)
        }
        Some(b'T') if c.at_keyword("T") => {
            c.pos += 1;
            Ok(BoolFormula::Top)
        }
        Some(b'F') if c.at_keyword("F") => {
            c.pos += 1;
            Ok(BoolFormula::Bot)
        }
        Some(b) if b.is_ascii_lowercase() => {
            let a = c.ident()?;
            if c.peek() != Some(b'.') {
                return c.err("expected `.` in atom");
            }
            c.pos += 1;
            let i = c.natural()?;
            Ok(BoolFormula::Atom(Name::new(&a), i))
        }
        _ => c.err("expected formula"),
    }
}

fn pr(b: &BoolFormula, level: u8, out: &mut String) {
    match b {
        BoolFormula::Top => out.push('T'),
        BoolFormula::Bot => out.push('F'),
        BoolFormula::Atom(a, i) => out.push_str(&format!("{a}.{i}")),
        BoolFormula::Not(c) => {
            out.push('!');
            pr(c, 2, out);
        }
        BoolFormula::And(c, d) => {
            if level > 1 {
                out.push('(');
            }
            pr(c, 1, out);
            out.push_str(" & ");
            pr(d, 2, out);
            if level > 1 {
                out.push(')');
            }
        }
        BoolFormula::Or(c, d) => {
            if level > 0 {
                out.push('(');
            }
            pr(c, 0, out);
            out.push_str(" | ");
            pr(d, 1, out);
            if level > 0 {
                out.push(')');
            }
        }
    }
}

pub fn print_formula(b: &BoolFormula) -> String {
    let mut s = String::new();
    pr(b, 0, &mut s);
    s
}

impl fmt::Display for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Debug for BoolFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn f(s: &str) -> BoolFormula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let a = Name::new("a");
        let b = Name::new("b");
        let w = Valuation::new().with(a, 0, true).with(a, 1, false);
        assert!(f("a.0 & !a.1").eval(&w).unwrap());
        assert!(!f("F").eval(&Valuation::new()).unwrap());
        let w = Valuation::new().with(a, 0, false).with(b, 0, true);
        assert!(f("(a.0 & b.0) | !a.0").eval(&w).unwrap());
        assert_eq!(f("a.3").eval(&w).unwrap_err().code(), "E_UNDEFINED_BIT");
    }

    #[test]
    fn measure_examples() {
        assert_eq!(measure(&f("a.0")).unwrap(), rat(1, 2));
        assert_eq!(measure(&f("a.0 & b.0")).unwrap(), rat(1, 4));
        assert_eq!(measure(&f("a.0 | b.0")).unwrap(), rat(3, 4));
        assert_eq!(measure(&f("T")).unwrap(), rat(1, 1));
        assert_eq!(measure(&f("F")).unwrap(), rat(0, 1));
        assert_eq!(measure(&f("a.0 | !a.0")).unwrap(), rat(1, 1));
    }

    #[test]
    fn measure_large_tables() {
        // 7 and 10 atoms exercise the multi-word layout
        let conj7 = (0..7).map(|i| format!("a.{i}")).collect::<Vec<_>>().join(" & ");
        assert_eq!(measure(&f(&conj7)).unwrap(), rat(1, 128));
        let disj10 = (0..10).map(|i| format!("b.{i}")).collect::<Vec<_>>().join(" | ");
        assert_eq!(measure(&f(&disj10)).unwrap(), rat(1023, 1024));
        assert_eq!(measure(&f("c.9 & !c.6")).unwrap(), rat(1, 4));
    }

    #[test]
    fn cap_is_enforced() {
        let big = (0..25).map(|i| format!("a.{i}")).collect::<Vec<_>>().join(" | ");
        assert_eq!(measure(&f(&big)).unwrap_err().code(), "E_TOO_MANY_ATOMS");
        assert_eq!(measure_with_cap(&f("a.0 & a.1"), 1).unwrap_err().code(), "E_TOO_MANY_ATOMS");
    }

    #[test]
    fn entails_examples() {
        assert!(entails(&f("a.0 & a.1"), &f("a.0")).unwrap());
        assert!(!entails(&f("a.0"), &f("F")).unwrap());
        assert!(entails(&f("a.0"), &f("(a.0 & a.0) | (!a.0 & F)")).unwrap());
    }

    #[test]
    fn printing_round_trips() {
        for s in ["a.0 & !a.1", "(a.0 | b.0) & c.1", "a.0 | b.0 & c.2", "!(a.0 | T)", "F"] {
            let b = f(s);
            assert_eq!(f(&print_formula(&b)), b, "{s}");
        }
        assert_eq!(print_formula(&f("a.0 | b.0 & c.2")), "a.0 | b.0 & c.2");
    }
}
