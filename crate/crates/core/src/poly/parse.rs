//! Expression parsing and canonical printing.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | integer '/' integer | identifier | '(' expr ')'
//! ```
//!
//! Identifiers match `[a-zA-Z][a-zA-Z0-9_]*`. There is no implicit
//! multiplication: `x y` and `2x` are syntax errors.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{Monomial, MonomialOrder, Polynomial, Rational};
use crate::error::{Error, Result};

/// An ordered list of variable names, fixing the meaning of exponent slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variables {
    names: Vec<String>,
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Variables {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
        if names.is_empty() {
            return Err(Error::Precondition(
                "at least one variable is required".into(),
            ));
        }
        for (i, n) in names.iter().enumerate() {
            if !valid_name(n) {
                return Err(Error::Syntax {
                    pos: 0,
                    message: format!("invalid variable name `{n}`"),
                });
            }
            if names[..i].contains(n) {
                return Err(Error::Precondition(format!("duplicate variable `{n}`")));
            }
        }
        Ok(Variables { names })
    }

    /// `x1, x2, ...`, used for debug output.
    pub fn generic(nvars: usize) -> Self {
        Variables {
            names: (1..=nvars).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial> {
        let tokens = tokenize(text)?;
        let mut parser = Parser {
            vars: self,
            tokens,
            next: 0,
            end: text.chars().count(),
        };
        let p = parser.expr()?;
        if let Some(tok) = parser.tokens.get(parser.next) {
            return Err(Error::Syntax {
                pos: tok.pos,
                message: format!("unexpected {}", tok.kind.describe()),
            });
        }
        Ok(p)
    }

    /// Canonical form: terms in descending graded-reverse-lexicographic order.
    pub fn format(&self, p: &Polynomial) -> String {
        assert_eq!(p.nvars(), self.len(), "variable count mismatch in format");
        if p.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in p
            .sorted_terms(MonomialOrder::GrevLex)
            .into_iter()
            .enumerate()
        {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mag = c.abs();
            if m.is_one() {
                out.push_str(&mag.to_string());
                continue;
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            self.write_monomial(&mut out, m);
        }
        out
    }

    fn write_monomial(&self, out: &mut String, m: &Monomial) {
        let mut first = true;
        for (name, &e) in self.names.iter().zip(m.exponents()) {
            if e == 0 {
                continue;
            }
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(name);
            if e > 1 {
                out.push('^');
                out.push_str(&e.to_string());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Number(n) => format!("number `{n}`"),
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Plus => "`+`".into(),
            TokenKind::Minus => "`-`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        let single = match c {
            '+' => Some(TokenKind::Plus),
            '-' | '\u{2212}' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            '^' => Some(TokenKind::Caret),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, pos });
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: BigInt = chars[start..i].iter().collect::<String>().parse().unwrap();
            let mut value = Rational::from_integer(num);
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                let dstart = i + 1;
                i = dstart;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let den: BigInt = chars[dstart..i].iter().collect::<String>().parse().unwrap();
                if den.is_zero() {
                    return Err(Error::Syntax {
                        pos: dstart,
                        message: "zero denominator".into(),
                    });
                }
                value /= Rational::from_integer(den);
            }
            out.push(Token {
                kind: TokenKind::Number(value),
                pos,
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                pos,
            });
        } else {
            return Err(Error::Syntax {
                pos,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    vars: &'a Variables,
    tokens: Vec<Token>,
    next: usize,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.next).map(|t| &t.kind)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.next).map_or(self.end, |t| t.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.next).cloned();
        self.next += 1;
        t
    }

    fn expected(&self, what: &str) -> Error {
        let found = match self.peek() {
            Some(k) => k.describe(),
            None => "end of input".into(),
        };
        Error::Syntax {
            pos: self.pos(),
            message: format!("expected {what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(TokenKind::Plus) => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Some(TokenKind::Minus) => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(TokenKind::Star) = self.peek() {
            self.bump();
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(TokenKind::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(TokenKind::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(TokenKind::Caret) = self.peek() {
            self.bump();
            let pos = self.pos();
            match self.bump().map(|t| t.kind) {
                Some(TokenKind::Number(n)) if n.is_integer() => {
                    let e: u32 = n.to_integer().try_into().map_err(|_| Error::Syntax {
                        pos,
                        message: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                }
                _ => Err(Error::Syntax {
                    pos,
                    message: "expected a non-negative integer exponent".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.vars.len();
        let pos = self.pos();
        match self.peek().cloned() {
            Some(TokenKind::Number(c)) => {
                self.bump();
                Ok(Polynomial::constant(n, c))
            }
            Some(TokenKind::Ident(name)) => {
                self.bump();
                match self.vars.names.iter().position(|v| *v == name) {
                    Some(i) => Ok(Polynomial::variable(n, i)),
                    None => Err(Error::UnknownVariable { name, pos }),
                }
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let inner = self.expr()?;
                match self.peek() {
                    Some(TokenKind::RParen) => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.expected("`)`")),
                }
            }
            _ => Err(self.expected("a number, variable or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{integer, rational};

    fn xy() -> Variables {
        Variables::new(["x", "y"]).unwrap()
    }

    #[test]
    fn parses_worked_example_factor() {
        let p = xy().parse("x*y + y + 1").unwrap();
        let expected = Polynomial::from_terms(
            2,
            [
                (Monomial::new(vec![1, 1]), integer(1)),
                (Monomial::new(vec![0, 1]), integer(1)),
                (Monomial::new(vec![0, 0]), integer(1)),
            ],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_and_powers() {
        assert!(xy().parse("0").unwrap().is_zero());
        assert_eq!(
            xy().parse("(x+1)^2").unwrap(),
            xy().parse("x^2 + 2*x + 1").unwrap()
        );
        assert_eq!(xy().parse("x^0").unwrap(), Polynomial::one(2));
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let p = xy().parse("-1/2*x + 3/4").unwrap();
        assert_eq!(p.coefficient(&Monomial::new(vec![1, 0])), rational(-1, 2));
        assert_eq!(p.coefficient(&Monomial::one(2)), rational(3, 4));
        assert_eq!(xy().parse("\u{2212}x").unwrap(), -xy().parse("x").unwrap());
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        match xy().parse("x y") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            xy().parse("2x"),
            Err(Error::Syntax { pos: 1, .. })
        ));
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            xy().parse("x + z"),
            Err(Error::UnknownVariable { ref name, pos: 4 }) if name == "z"
        ));
        assert!(matches!(
            xy().parse("(x+1"),
            Err(Error::Syntax { pos: 4, .. })
        ));
        assert!(matches!(
            xy().parse("x^y"),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert!(matches!(
            xy().parse("x # 1"),
            Err(Error::Syntax { pos: 2, .. })
        ));
        assert!(matches!(xy().parse(""), Err(Error::Syntax { pos: 0, .. })));
        assert!(matches!(
            xy().parse("x/2"),
            Err(Error::Syntax { pos: 1, .. })
        ));
    }

    #[test]
    fn canonical_printing() {
        let v = xy();
        assert_eq!(v.format(&v.parse("1 + y + x*y").unwrap()), "x*y + y + 1");
        assert_eq!(v.format(&v.parse("-x + 1").unwrap()), "-x + 1");
        assert_eq!(v.format(&v.parse("-1").unwrap()), "-1");
        assert_eq!(v.format(&v.parse("x - 1/2*y^2").unwrap()), "-1/2*y^2 + x");
        assert_eq!(v.format(&Polynomial::zero(2)), "0");
        assert_eq!(v.format(&v.parse("2*x^2*y - x").unwrap()), "2*x^2*y - x");
    }

    #[test]
    fn variable_names_are_validated() {
        assert!(Variables::new(["x", "x"]).is_err());
        assert!(Variables::new(["1x"]).is_err());
        assert!(Variables::new(Vec::<String>::new()).is_err());
        assert!(Variables::new(["D_1", "d2"]).is_ok());
    }
}
