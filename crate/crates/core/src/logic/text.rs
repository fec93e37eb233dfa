//! ASCII formula syntax.
//!
//! ```text
//! formula := disj ("->" formula)?
//! disj    := conj ("\/" conj)*
//! conj    := unary ("/\" unary)*
//! unary   := "forall" var "." unary | "exists" var "." unary
//!          | "(" formula ")" | "_|_" | "T" | Pred ("(" term ("," term)* ")")?
//! term    := var | numeral
//! ```
//!
//! Quantifiers bind tighter than every connective, so a compound body needs
//! parentheses.

use std::fmt;

use super::syntax::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        ParseError { line, column, message: message.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{tok}'")))
        }
    }

    fn peek_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let r = self.rest();
        r.starts_with(kw) && !r[kw.len()..].starts_with(is_ident_char)
    }

    fn ident(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        let len = self.rest().find(|c: char| !is_ident_char(c)).unwrap_or(self.rest().len());
        self.pos += len;
        &self.src[start..start + len]
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disj()?;
        if self.eat("->") {
            let rhs = self.formula()?;
            return Ok(Formula::Imp(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conj()?;
        while self.eat("\\/") {
            let g = self.conj()?;
            f = Formula::Or(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.eat("/\\") {
            let g = self.unary()?;
            f = Formula::And(Box::new(f), Box::new(g));
        }
        Ok(f)
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let at = self.pos;
        let name = self.ident().to_string();
        let ok = name.starts_with(|c: char| c.is_ascii_lowercase() || c == '_')
            && name != "forall"
            && name != "exists";
        if !ok {
            self.pos = at;
            return Err(self.error("expected a variable"));
        }
        Ok(name)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        for (kw, universal) in [("forall", true), ("exists", false)] {
            if self.peek_keyword(kw) {
                self.pos += kw.len();
                let x = self.variable()?;
                self.expect(".")?;
                let body = Box::new(self.unary()?);
                return Ok(if universal { Formula::Forall(x, body) } else { Formula::Exists(x, body) });
            }
        }
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("_|_") {
            return Ok(Formula::Bottom);
        }
        let at = self.pos;
        let name = self.ident().to_string();
        if !name.starts_with(|c: char| c.is_ascii_uppercase()) {
            self.pos = at;
            return Err(self.error("expected a formula"));
        }
        self.skip_ws();
        if !self.rest().starts_with('(') {
            return Ok(if name == "T" { Formula::Top } else { Formula::Atom(name, Vec::new()) });
        }
        self.pos += 1;
        let mut args = Vec::new();
        if !self.eat(")") {
            loop {
                args.push(self.term()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(Formula::Atom(name, args))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        if self.rest().starts_with(|c: char| c.is_ascii_digit()) {
            let at = self.pos;
            let digits = self.ident().to_string();
            return digits.parse().map(Term::Const).map_err(|_| {
                self.pos = at;
                self.error("bad numeral")
            });
        }
        self.variable().map(Term::Var)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::Const(k) => write!(f, "{k}"),
        }
    }
}

// Binding strength, loosest first.
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

fn write_at(f: &mut fmt::Formatter<'_>, a: &Formula, ctx: u8) -> fmt::Result {
    use Formula::*;
    let own = match a {
        Imp(..) => IMP,
        Or(..) => OR,
        And(..) => AND,
        _ => UNARY,
    };
    if own < ctx {
        f.write_str("(")?;
    }
    match a {
        Bottom => f.write_str("_|_")?,
        Top => f.write_str("T")?,
        Atom(p, args) => {
            f.write_str(p)?;
            if !args.is_empty() || p == "T" {
                f.write_str("(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")?;
            }
        }
        And(l, r) => {
            write_at(f, l, AND)?;
            f.write_str(" /\\ ")?;
            write_at(f, r, UNARY)?;
        }
        Or(l, r) => {
            write_at(f, l, OR)?;
            f.write_str(" \\/ ")?;
            write_at(f, r, AND)?;
        }
        Imp(l, r) => {
            write_at(f, l, OR)?;
            f.write_str(" -> ")?;
            write_at(f, r, IMP)?;
        }
        Forall(x, b) => {
            write!(f, "forall {x}. ")?;
            write_at(f, b, UNARY)?;
        }
        Exists(x, b) => {
            write!(f, "exists {x}. ")?;
            write_at(f, b, UNARY)?;
        }
    }
    if own < ctx {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, IMP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::syntax::*;

    #[test]
    fn round_trips() {
        for s in [
            "forall x. (Q(x) -> exists z. P(x,z))",
            "P(3) \\/ _|_",
            "(A -> B) -> A -> B",
            "A /\\ B /\\ C \\/ D",
            "A /\\ (B \\/ C)",
            "forall x. forall y. (R(x,y) -> T)",
            "T(1) /\\ T",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn structure() {
        assert_eq!(
            parse_formula("P(3) \\/ _|_").unwrap(),
            or(atom("P", vec![Term::Const(3)]), Formula::Bottom)
        );
        let f = parse_formula("A -> B -> C").unwrap();
        assert_eq!(f, imp(atom("A", vec![]), imp(atom("B", vec![]), atom("C", vec![]))));
        let g = parse_formula("forall x. P(x) -> Q").unwrap();
        assert!(matches!(g, Formula::Imp(..)));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_formula("(P(x) -> Q(x)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 14));
        let e = parse_formula("P(x) ->\n  q").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(parse_formula("forall X. P").is_err());
        assert!(parse_formula("P(x) Q").is_err());
    }
}
