//! Concrete syntax for terms.

use crate::error::{Error, Result};
use crate::name::{Name, Var};
use crate::term::{self, Term};

pub(crate) struct Cursor<'a> {
    pub(crate) src: &'a [u8],
    pub(crate) pos: usize,
}

impl<'a> Cursor<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Cursor { src: text.as_bytes(), pos: 0 }
    }

    pub(crate) fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.src.get(self.pos).copied()
    }

    pub(crate) fn peek_at(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::syntax(self.pos, msg))
    }

    pub(crate) fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    pub(crate) fn eat_str(&mut self, s: &str) -> bool {
        self.ws();
        if self.src[self.pos..].starts_with(s.as_bytes()) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub(crate) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    /// `[a-z][a-zA-Z0-9_]*`, without consuming on failure.
    pub(crate) fn ident(&mut self) -> Result<String> {
        self.ws();
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return self.err("expected identifier"),
        }
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        if s == "nu" {
            self.pos = start;
            return self.err("`nu` is reserved");
        }
        Ok(s)
    }

    pub(crate) fn natural(&mut self) -> Result<u32> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return self.err("expected index");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::syntax(start, "index out of range"))
    }

    /// Is the next word the keyword `kw` (not a prefix of a longer identifier)?
    pub(crate) fn at_keyword(&mut self, kw: &str) -> bool {
        self.ws();
        let rest = &self.src[self.pos..];
        rest.starts_with(kw.as_bytes()) && !rest.get(kw.len()).is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut c = Cursor::new(text);
    let t = expr(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(t)
}

fn at_choice_op(c: &mut Cursor) -> bool {
    if c.peek() != Some(b'(') {
        return false;
    }
    let mut k = 1;
    while c.peek_at(k).is_some_and(|b| b.is_ascii_whitespace()) {
        k += 1;
    }
    c.peek_at(k) == Some(b'+')
}

fn binder_expr(c: &mut Cursor) -> Result<Option<Term>> {
    if c.peek() == Some(b'\\') {
        c.pos += 1;
        let x = Var::new(&c.ident()?);
        c.expect(b'.')?;
        return Ok(Some(term::lam(x, expr(c)?)));
    }
    if c.at_keyword("nu") {
        c.pos += 2;
        let a = Name::new(&c.ident()?);
        c.expect(b'.')?;
        return Ok(Some(term::nu(a, expr(c)?)));
    }
    Ok(None)
}

fn expr(c: &mut Cursor) -> Result<Term> {
    if let Some(t) = binder_expr(c)? {
        return Ok(t);
    }
    let left = application(c)?;
    if at_choice_op(c) {
        c.expect(b'(')?;
        c.expect(b'+')?;
        let a = c.ident()?;
        c.expect(b'.')?;
        let i = c.natural()?;
        c.expect(b')')?;
        let right = expr(c)?;
        return Ok(term::choice(left, right, Name::new(&a), i));
    }
    Ok(left)
}

fn starts_item(c: &mut Cursor) -> bool {
    match c.peek() {
        Some(b'(') => !at_choice_op(c),
        Some(b'{') | Some(b'#') => true,
        Some(b) if b.is_ascii_uppercase() || b.is_ascii_digit() => true,
        Some(b) if b.is_ascii_lowercase() => !c.at_keyword("nu"),
        _ => false,
    }
}

fn application(c: &mut Cursor) -> Result<Term> {
    if !starts_item(c) {
        return c.err("expected term");
    }
    let mut t = item(c)?;
    loop {
        if starts_item(c) {
            t = term::app(t, item(c)?);
        } else if let Some(last) = binder_expr(c)? {
            return Ok(term::app(t, last));
        } else {
            return Ok(t);
        }
    }
}

fn item(c: &mut Cursor) -> Result<Term> {
    if c.peek() == Some(b'{') {
        c.pos += 1;
        let f = expr(c)?;
        c.expect(b'}')?;
        if let Some(arg) = binder_expr(c)? {
            return Ok(term::cbv(f, arg));
        }
        if !starts_item(c) || c.peek() == Some(b'{') {
            return c.err("expected argument after `{..}`");
        }
        return Ok(term::cbv(f, atom(c)?));
    }
    atom(c)
}

fn atom(c: &mut Cursor) -> Result<Term> {
    match c.peek() {
        Some(b'(') => {
            c.pos += 1;
            let t = expr(c)?;
            c.expect(b')')?;
            Ok(t)
        }
        Some(b'#') => {
            if c.eat_str("#c") && !c.peek_at(0).is_some_and(|b| b.is_ascii_alphanumeric()) {
                Ok(Term::Const)
            } else {
                c.err("expected `#c`")
            }
        }
        Some(b) if b.is_ascii_lowercase() => Ok(Term::Var(Var::new(&c.ident()?))),
        Some(b) if b.is_ascii_uppercase() || b.is_ascii_digit() => {
            let start = c.pos;
            while c.peek_at(0).is_some_and(|b| b.is_ascii_alphanumeric() || b == b'_') {
                c.pos += 1;
            }
            match &c.src[start..c.pos] {
                b"OMEGA" => Ok(term::omega()),
                b"I" => Ok(term::identity()),
                b"2" => Ok(term::two()),
                _ => Err(Error::syntax(start, "unknown builtin")),
            }
        }
        _ => c.err("expected term"),
    }
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    pr(t, 0, &mut out);
    out
}

fn pr(t: &Term, level: u8, out: &mut String) {
    let wrap = |needed: bool, out: &mut String, f: &dyn Fn(&mut String)| {
        if needed {
            out.push('(');
        }
        f(out);
        if needed {
            out.push(')');
        }
    };
    match t {
        Term::Var(x) => out.push_str(&x.as_string()),
        Term::Const => out.push_str("#c"),
        Term::Lam(x, b) => wrap(level > 0, out, &|o| {
            o.push('\\');
            o.push_str(&x.as_string());
            o.push_str(". ");
            pr(b, 0, o);
        }),
        Term::Nu(a, b) => wrap(level > 0, out, &|o| {
            o.push_str("nu ");
            o.push_str(&a.as_string());
            o.push_str(". ");
            pr(b, 0, o);
        }),
        Term::Choice(l, r, a, i) => wrap(level > 0, out, &|o| {
            pr(l, 1, o);
            o.push_str(&format!(" (+{a}.{i}) "));
            pr(r, 0, o);
        }),
        Term::App(f, a) => wrap(level > 1, out, &|o| {
            pr(f, 1, o);
            o.push(' ');
            pr(a, 2, o);
        }),
        Term::CbvApp(f, a) => wrap(level > 1, out, &|o| {
            o.push('{');
            pr(f, 0, o);
            o.push_str("} ");
            pr(a, 2, o);
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{alpha_eq, app, cbv, choice, lam, nu, var};

    #[test]
    fn spec_examples() {
        let x = Var::new("x");
        let y = Var::new("y");
        let a = Name::new("a");
        assert_eq!(parse_term("\\x.\\y. x (+a.0) y").unwrap(), lam(x, lam(y, choice(var("x"), var("y"), a, 0))));
        assert_eq!(parse_term("#c").unwrap(), Term::Const);
        let t = parse_term("nu a. {(\\f.f)} ((\\x.x) (+a.1) ((\\x.x x)(\\x.x x)))").unwrap();
        let f = Var::new("f");
        let expected = nu(a, cbv(lam(f, var("f")), choice(lam(x, var("x")), term::omega(), a, 1)));
        assert_eq!(t, expected);
    }

    #[test]
    fn precedence() {
        let t = parse_term("f x y (+a.0) z (+b.1) w").unwrap();
        let a = Name::new("a");
        let b = Name::new("b");
        let fxy = app(app(var("f"), var("x")), var("y"));
        assert_eq!(t, choice(fxy, choice(var("z"), var("w"), b, 1), a, 0));
        assert_eq!(parse_term("f \\x. x").unwrap(), app(var("f"), lam(Var::new("x"), var("x"))));
        assert_eq!(print_term(&parse_term("(x (+a.0) y) (+a.1) z").unwrap()), "(x (+a.0) y) (+a.1) z");
        assert_eq!(print_term(&parse_term("{f} x y").unwrap()), "{f} x y");
        assert_eq!(print_term(&parse_term("g ({f} x)").unwrap()), "g ({f} x)");
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_term("\\x x").unwrap_err();
        assert_eq!(e, Error::Syntax { pos: 3, msg: "expected `.`".into() });
        assert_eq!(parse_term("x )").unwrap_err().code(), "E_SYNTAX");
        assert_eq!(parse_term("nu nu. x").unwrap_err().code(), "E_SYNTAX");
        assert!(parse_term("").is_err());
        assert!(parse_term("FOO").is_err());
    }

    #[test]
    fn round_trips_builtins() {
        for s in ["OMEGA", "I", "2", "nu a. I (+a.0) OMEGA", "\\x. {2} (x (+b.3) #c)"] {
            let t = parse_term(s).unwrap();
            assert!(alpha_eq(&parse_term(&print_term(&t)).unwrap(), &t), "{s}");
        }
    }
}
