//! Counting types for the three systems, their order and rank.

pub mod build;
mod derivation;
mod mu_star;
mod transport;

pub use derivation::{check_derivation, Derivation, Judgement, Side, System, TypeRule};
pub use mu_star::apply_mu_star;
pub use transport::transport_subject_reduction;

use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::parse::Cursor;
use crate::rational::{fmt_rational, parse_rational, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Type {
    O,
    Hn,
    N,
    /// `(domain => codomain)`; the domain is a multiset in the intersection system.
    Arrow(Box<Type>, Box<Type>),
    Counted(Rational, Box<Type>),
    Multi(Vec<Type>),
}

impl Type {
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn counted(q: Rational, t: Type) -> Type {
        Type::Counted(q, Box::new(t))
    }

    /// Wrap `t` in the quantifier prefix `qs`, outermost first.
    pub fn prefixed(qs: &[Rational], t: Type) -> Type {
        qs.iter().rev().fold(t, |acc, q| Type::counted(q.clone(), acc))
    }

    /// Split off the full quantifier prefix.
    pub fn split_prefix(&self) -> (Vec<Rational>, &Type) {
        let mut qs = Vec::new();
        let mut cur = self;
        while let Type::Counted(q, t) = cur {
            qs.push(q.clone());
            cur = t;
        }
        (qs, cur)
    }

    fn walk(&self, f: &mut impl FnMut(&Type) -> bool) -> bool {
        if !f(self) {
            return false;
        }
        match self {
            Type::O | Type::Hn | Type::N => true,
            Type::Arrow(a, b) => a.walk(f) && b.walk(f),
            Type::Counted(_, t) => t.walk(f),
            Type::Multi(ts) => ts.iter().all(|t| t.walk(f)),
        }
    }
}

/// `|s|`: the quantifier (product of a prefix), with `hn` and `[]` at 0.
pub fn srank(s: &Type) -> Rational {
    match s {
        Type::Counted(q, t) => match &**t {
            Type::Counted(..) => q * srank(t),
            _ => q.clone(),
        },
        Type::Hn => Rational::zero(),
        Type::Multi(ts) => ts.iter().map(srank).max().unwrap_or_else(Rational::zero),
        Type::O | Type::N | Type::Arrow(..) => Rational::one(),
    }
}

fn arguments(sigma: &Type) -> Vec<&Type> {
    let mut out = Vec::new();
    let mut cur = sigma;
    while let Type::Arrow(a, b) = cur {
        out.push(&**a);
        cur = b;
    }
    out
}

pub fn is_balanced(s: &Type) -> bool {
    let (qs, sigma) = s.split_prefix();
    if let Type::Multi(ts) = sigma {
        return qs.is_empty() && ts.iter().all(is_balanced);
    }
    let args = arguments(sigma);
    if !args.iter().all(|a| is_balanced(a)) {
        return false;
    }
    if qs.is_empty() {
        return true;
    }
    let q: Rational = qs.iter().product();
    let bound: Rational = args.iter().map(|a| srank(a)).product();
    q <= bound
}

/// Balanced and free of `hn` and `[]`.
pub fn is_safe(s: &Type) -> bool {
    is_balanced(s) && s.walk(&mut |t| !matches!(t, Type::Hn) && !matches!(t, Type::Multi(v) if v.is_empty()))
}

/// The preorder on intersection types.
pub fn subtype(s: &Type, t: &Type) -> bool {
    match (s, t) {
        (Type::O, Type::O) | (Type::N, Type::N) | (Type::Hn, Type::Hn) => true,
        (Type::Counted(q, a), Type::Counted(r, b)) => q <= r && subtype(a, b),
        (Type::Arrow(m, a), Type::Arrow(n, b)) => subtype(a, b) && subtype_multi(n, m),
        (Type::Multi(_), Type::Multi(_)) => subtype_multi(s, t),
        _ => false,
    }
}

/// `[s1..sn] <=* [t1..tm]`: an injection picking an `s` below each `t`.
pub fn subtype_multi(m: &Type, n: &Type) -> bool {
    match (m, n) {
        (Type::Multi(ss), Type::Multi(ts)) => {
            fn place(ss: &[Type], ts: &[Type], used: &mut Vec<bool>) -> bool {
                let Some((t, rest)) = ts.split_first() else { return true };
                for (k, s) in ss.iter().enumerate() {
                    if !used[k] && subtype(s, t) {
                        used[k] = true;
                        if place(ss, rest, used) {
                            return true;
                        }
                        used[k] = false;
                    }
                }
                false
            }
            ts.len() <= ss.len() && place(ss, ts, &mut vec![false; ss.len()])
        }
        _ => subtype(m, n),
    }
}

pub fn parse_type(text: &str) -> Result<Type> {
    let mut c = Cursor::new(text);
    let t = ty(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(t)
}

fn ty(c: &mut Cursor) -> Result<Type> {
    let left = prefix_ty(c)?;
    if c.eat_str("=>") {
        return Ok(Type::arrow(left, ty(c)?));
    }
    Ok(left)
}

fn prefix_ty(c: &mut Cursor) -> Result<Type> {
    match c.peek() {
        Some(b'C') => {
            c.pos += 1;
            c.expect(b'[')?;
            let start = c.pos;
            while c.peek_at(0).is_some_and(|b| b != b']') {
                c.pos += 1;
            }
            let text = std::str::from_utf8(&c.src[start..c.pos]).unwrap_or("");
            let q = parse_rational(text).map_err(|_| crate::Error::syntax(start, "bad rational"))?;
            if q <= Rational::zero() || q > Rational::one() {
                return Err(crate::Error::syntax(start, "quantifier outside (0,1]"));
            }
            c.expect(b']')?;
            Ok(Type::counted(q, prefix_ty(c)?))
        }
        Some(b'(') => {
            c.pos += 1;
            let t = ty(c)?;
            c.expect(b')')?;
            Ok(t)
        }
        Some(b'[') => {
            c.pos += 1;
            let mut items = Vec::new();
            if c.peek() != Some(b']') {
                items.push(ty(c)?);
                while c.peek() == Some(b',') {
                    c.pos += 1;
                    items.push(ty(c)?);
                }
            }
            c.expect(b']')?;
            Ok(Type::Multi(items))
        }
        _ if c.at_keyword("o") => {
            c.pos += 1;
            Ok(Type::O)
        }
        _ if c.at_keyword("hn") => {
            c.pos += 2;
            Ok(Type::Hn)
        }
        _ if c.at_keyword("n") => {
            c.pos += 1;
            Ok(Type::N)
        }
        _ => c.err("expected type"),
    }
}

pub fn print_type(t: &Type) -> String {
    match t {
        Type::O => "o".into(),
        Type::Hn => "hn".into(),
        Type::N => "n".into(),
        Type::Arrow(a, b) => format!("({} => {})", print_type(a), print_type(b)),
        Type::Counted(q, b) => format!("C[{}] {}", fmt_rational(q), print_type(b)),
        Type::Multi(ts) => {
            let items: Vec<String> = ts.iter().map(print_type).collect();
            format!("[{}]", items.join(", "))
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn t(s: &str) -> Type {
        parse_type(s).unwrap()
    }

    #[test]
    fn parse_print() {
        for s in ["o", "C[1/2] (o => o)", "(C[1/1] o => o)", "C[1/3] C[1/2] ([C[1/1] o, hn] => n)", "[]"] {
            let ty = t(s);
            assert_eq!(t(&print_type(&ty)), ty, "{s}");
        }
        assert_eq!(t("C[1] o => o"), Type::arrow(Type::counted(rat(1, 1), Type::O), Type::O));
        assert_eq!(t("o => o => o"), t("(o => (o => o))"));
        assert!(parse_type("C[3/2] o").is_err());
        assert!(parse_type("C[0] o").is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(srank(&t("C[1/2] (o => o)")), rat(1, 2));
        assert_eq!(srank(&Type::Hn), rat(0, 1));
        assert_eq!(srank(&t("[C[1/3] o, C[1/2] o]")), rat(1, 2));
        assert_eq!(srank(&t("[]")), rat(0, 1));
        assert_eq!(srank(&Type::N), rat(1, 1));
        assert_eq!(srank(&t("C[1/2] C[1/3] o")), rat(1, 6));
    }

    #[test]
    fn balance() {
        assert!(is_balanced(&t("C[1/2] (C[1/2] o => o)")));
        let sigma = "(o => o)";
        let unbalanced = format!("C[1] (C[1/2] {sigma} => {sigma})");
        assert!(!is_balanced(&t(&unbalanced)));
        assert!(is_balanced(&Type::O) && is_safe(&Type::O));
        assert!(!is_safe(&t("C[1] (hn => o)")));
        assert!(!is_safe(&t("C[1/2] ([] => o)")));
    }

    #[test]
    fn subtyping() {
        assert!(subtype(&t("C[1/2] o"), &t("C[1] o")));
        assert!(!subtype(&t("C[1] o"), &t("C[1/2] o")));
        assert!(subtype_multi(&t("[C[1] o]"), &t("[]")));
        assert!(subtype_multi(&t("[C[1/2] o, C[1] o]"), &t("[C[1] o]")));
        assert!(!subtype_multi(&t("[C[1] o]"), &t("[C[1] o, C[1] o]")));
        assert!(subtype(&t("C[1] ([C[1] o] => o)"), &t("C[1] ([C[1] o, C[1/2] o] => o)")));
    }
}
