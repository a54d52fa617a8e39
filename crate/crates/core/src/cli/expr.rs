//! Lie and polynomial expression grammars.
//!
//! ```text
//! lie   := sign? lterm (("+" | "-") lterm)*
//! lterm := coeff ("*" latom)? | latom
//! latom := name | "[" lie "," lie "]" | "(" lie ")"
//!
//! poly  := sign? pterm (("+" | "-") pterm)*
//! pterm := (coeff | pfac) ("*" pfac)*
//! pfac  := (name | "(" poly ")") ("^" integer)?
//!
//! coeff := integer ("/" integer)?
//! ```
//!
//! Whitespace is ignored between tokens. Decimals are rejected.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::free_lie::{LieExpr, LieTree};
use crate::graded::{Degree, LinComb};
use crate::scalar::{q, Coeff, Q};
use crate::sullivan::{multiply, Element};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(BigInt),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

/// Position of the first character of an expression inside a larger text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Origin {
    pub line: usize,
    pub column: usize,
}

impl Default for Origin {
    fn default() -> Self {
        Origin { line: 1, column: 1 }
    }
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str, origin: Origin) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut line = origin.line;
    let mut column = origin.column;
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                return Err(parse_error(l0, c0, "decimal literals are not accepted; write p/q"));
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            column += i - start;
            out.push(Token {
                tok: Tok::Name(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^[](),".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
            column += 1;
            i += 1;
            continue;
        }
        return Err(parse_error(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    lookup: &'a dyn Fn(&str) -> Option<(usize, Degree)>,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, c: char) -> bool {
        self.peek().tok == Tok::Sym(c)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = self.peek();
        Err(parse_error(t.line, t.column, message))
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.at(c) {
            self.next();
            Ok(())
        } else {
            let found = describe(&self.peek().tok);
            self.fail(format!("expected `{c}`, found {found}"))
        }
    }

    fn finish(&self) -> Result<()> {
        match &self.peek().tok {
            Tok::End => Ok(()),
            t => self.fail(format!("unexpected {}", describe(t))),
        }
    }

    fn coeff(&mut self) -> Result<Q> {
        let Tok::Int(n) = self.next().tok else {
            unreachable!("coeff called on a non-integer token")
        };
        if self.at('/') {
            self.next();
            match self.next() {
                Token {
                    tok: Tok::Int(d),
                    line,
                    column,
                } => {
                    if d == BigInt::from(0) {
                        return Err(parse_error(line, column, "zero denominator"));
                    }
                    Ok(Q::new(n, d))
                }
                t => Err(parse_error(t.line, t.column, "expected a denominator")),
            }
        } else {
            Ok(Q::from_integer(n))
        }
    }

    fn name(&mut self) -> Result<(String, usize)> {
        let t = self.next();
        let Tok::Name(n) = t.tok else {
            return Err(parse_error(
                t.line,
                t.column,
                format!("expected a generator, found {}", describe(&t.tok)),
            ));
        };
        match (self.lookup)(&n) {
            Some((i, _)) => Ok((n, i)),
            None => Err(parse_error(t.line, t.column, format!("unknown generator `{n}`"))),
        }
    }

    /// Leading sign, then the sign before each further term.
    fn signed_terms<T>(&mut self, mut term: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<(Q, T)>> {
        let mut out = Vec::new();
        let mut sign = q(1);
        if (self.at('-') || self.at('+')) && self.next().tok == Tok::Sym('-') {
            sign = q(-1);
        }
        loop {
            out.push((sign.clone(), term(self)?));
            if self.at('+') {
                self.next();
                sign = q(1);
            } else if self.at('-') {
                self.next();
                sign = q(-1);
            } else {
                return Ok(out);
            }
        }
    }

    fn lie(&mut self) -> Result<LieExpr> {
        let terms = self.signed_terms(|p| p.lie_term())?;
        let mut out = LieExpr::zero();
        for (s, e) in terms {
            for (c, t) in e.terms {
                out.terms.push((&s * &c, t));
            }
        }
        Ok(out)
    }

    fn lie_term(&mut self) -> Result<LieExpr> {
        if let Tok::Int(_) = self.peek().tok {
            let (line, column) = (self.peek().line, self.peek().column);
            let c = self.coeff()?;
            if self.at('*') {
                self.next();
                let e = self.lie_atom()?;
                return Ok(LieExpr {
                    terms: e.terms.into_iter().map(|(x, t)| (&c * &x, t)).collect(),
                });
            }
            if c.is_zero() {
                return Ok(LieExpr::zero());
            }
            return Err(parse_error(line, column, "a Lie expression has no constant terms"));
        }
        self.lie_atom()
    }

    fn lie_atom(&mut self) -> Result<LieExpr> {
        if self.at('[') {
            self.next();
            let a = self.lie()?;
            self.expect(',')?;
            let b = self.lie()?;
            self.expect(']')?;
            return Ok(a.bracket(&b));
        }
        if self.at('(') {
            self.next();
            let a = self.lie()?;
            self.expect(')')?;
            return Ok(a);
        }
        let (n, _) = self.name()?;
        Ok(LieExpr::tree(LieTree::leaf(n)))
    }

    fn poly(&mut self, degrees: &[Degree]) -> Result<Element<Q>> {
        let terms = self.signed_terms(|p| p.poly_term(degrees))?;
        let mut out = Element::zero();
        for (s, e) in terms {
            out.add_scaled(&e, &s);
        }
        Ok(out)
    }

    fn poly_term(&mut self, degrees: &[Degree]) -> Result<Element<Q>> {
        let mut acc = if let Tok::Int(_) = self.peek().tok {
            let c = self.coeff()?;
            if !self.at('*') {
                return Ok(LinComb::term(Vec::new(), c));
            }
            self.next();
            LinComb::term(Vec::new(), c)
        } else {
            LinComb::term(Vec::new(), q(1))
        };
        loop {
            let f = self.poly_factor(degrees)?;
            acc = multiply(&acc, &f, degrees);
            if !self.at('*') {
                return Ok(acc);
            }
            self.next();
        }
    }

    fn poly_factor(&mut self, degrees: &[Degree]) -> Result<Element<Q>> {
        let base = if self.at('(') {
            self.next();
            let p = self.poly(degrees)?;
            self.expect(')')?;
            p
        } else {
            let (_, i) = self.name()?;
            LinComb::term(vec![i], q(1))
        };
        if !self.at('^') {
            return Ok(base);
        }
        self.next();
        let t = self.next();
        let Tok::Int(n) = t.tok else {
            return Err(parse_error(t.line, t.column, "expected an exponent"));
        };
        let n: u32 = n
            .try_into()
            .map_err(|_| parse_error(t.line, t.column, "exponent too large"))?;
        let mut out = LinComb::term(Vec::new(), q(1));
        for _ in 0..n {
            out = multiply(&out, &base, degrees);
        }
        Ok(out)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("`{n}`"),
        Tok::Int(n) => format!("`{n}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Generator table used to resolve names: `(name, degree)` in order.
pub struct Names<'a>(pub &'a [(String, Degree)]);

impl Names<'_> {
    fn lookup(&self, n: &str) -> Option<(usize, Degree)> {
        self.0.iter().position(|(m, _)| m == n).map(|i| (i, self.0[i].1))
    }

    fn degrees(&self) -> Vec<Degree> {
        self.0.iter().map(|(_, d)| *d).collect()
    }
}

pub fn parse_lie(text: &str, names: &Names, origin: Origin) -> Result<LieExpr> {
    let lookup = |n: &str| names.lookup(n);
    let mut p = Parser {
        toks: tokenize(text, origin)?,
        pos: 0,
        lookup: &lookup,
    };
    let e = p.lie()?;
    p.finish()?;
    Ok(LieExpr {
        terms: e.terms.into_iter().filter(|(c, _)| !c.is_zero()).collect(),
    })
}

/// Comma-separated Lie expressions; commas inside brackets belong to the
/// brackets.
pub fn parse_lie_list(text: &str, names: &Names, origin: Origin) -> Result<Vec<LieExpr>> {
    let lookup = |n: &str| names.lookup(n);
    let mut p = Parser {
        toks: tokenize(text, origin)?,
        pos: 0,
        lookup: &lookup,
    };
    let mut out = vec![p.lie()?];
    while p.at(',') {
        p.next();
        out.push(p.lie()?);
    }
    p.finish()?;
    Ok(out)
}

pub fn parse_poly(text: &str, names: &Names, origin: Origin) -> Result<Element<Q>> {
    let lookup = |n: &str| names.lookup(n);
    let mut p = Parser {
        toks: tokenize(text, origin)?,
        pos: 0,
        lookup: &lookup,
    };
    let e = p.poly(&names.degrees())?;
    p.finish()?;
    Ok(e)
}

/// A linear combination of generators, written as a polynomial of length one.
pub fn parse_linear(text: &str, names: &Names, origin: Origin) -> Result<LinComb<usize, Q>> {
    let e = parse_poly(text, names, origin)?;
    let mut out = LinComb::zero();
    for (w, c) in e.iter() {
        if w.len() != 1 {
            return Err(parse_error(
                origin.line,
                origin.column,
                "expected a linear combination of generators",
            ));
        }
        out.add_term(w[0], c.clone());
    }
    Ok(out)
}

/// Degree of each tree of a Lie expression; `None` for the zero expression.
pub fn lie_degree(e: &LieExpr, names: &Names) -> Result<Option<Degree>> {
    let mut found: Option<Degree> = None;
    for (c, t) in &e.terms {
        if c.is_zero() {
            continue;
        }
        let d: Degree = t
            .leaves()
            .iter()
            .map(|n| {
                names
                    .lookup(n)
                    .map(|(_, d)| d)
                    .ok_or_else(|| Error::UnknownGenerator(n.to_string()))
            })
            .sum::<Result<Degree>>()?;
        match found {
            Some(f) if f != d => return Err(Error::Inhomogeneous { first: f, second: d }),
            _ => found = Some(d),
        }
    }
    Ok(found)
}

/// Splits on commas outside brackets and parentheses.
pub fn split_top_level(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&text[start..]);
    out
}
