//! Polynomial expressions and the small list syntaxes used by the flags.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! sum     := product (("+" | "-") product)*
//! product := unary ("*" unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" INTEGER)?
//! atom    := INTEGER | VARIABLE | "(" sum ")"
//! ```
//!
//! Variables are `t1, t2, ...`; with [`ParseOptions::generator`] the name `g`
//! is also accepted and stands for the generator of a finite field.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rvw_core::ring::IntegerRing;
use rvw_core::MultiPoly;
use std::fmt::{self, Display};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Arity of the result; by default the largest variable index used.
    pub nvars: Option<usize>,
    /// Accept `g` as the field generator.
    pub generator: bool,
}

/// A parsed expression. When the generator was allowed it occupies the last slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Parsed {
    pub poly: MultiPoly<BigInt>,
    pub nvars: usize,
    pub has_generator: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Gen,
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str, generator: bool) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token {
                tok: Tok::Int(digits.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let name: String = chars[start..i].iter().collect();
            col += i - start;
            let tok = if generator && name == "g" {
                Tok::Gen
            } else {
                match name.strip_prefix('t').and_then(|d| d.parse::<usize>().ok()) {
                    Some(k) if k >= 1 && !name[1..].starts_with('0') => Tok::Var(k - 1),
                    _ => return Err(err(l0, c0, format!("unknown variable `{name}`"))),
                }
            };
            out.push(Token {
                tok,
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(err(l0, c0, format!("unexpected character `{c}`")));
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

/// Expression tree; lowered to a polynomial once the arity is known.
enum Ast {
    Int(BigInt),
    Var(usize),
    Gen,
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u64),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, at: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: at.line,
            column: at.column,
            message: message.into(),
        })
    }

    fn sum(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.product()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.product()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Ast, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek().tok == Tok::Star {
            self.bump();
            lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast, ParseError> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let t = self.bump();
        match t.tok {
            Tok::Int(ref k) => match u64::try_from(k) {
                Ok(k) => Ok(Ast::Pow(Box::new(base), k)),
                Err(_) => self.fail(&t, "exponent too large"),
            },
            _ => self.fail(&t, "exponent must be a non-negative integer literal"),
        }
    }

    fn atom(&mut self) -> Result<Ast, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => Ok(Ast::Int(v)),
            Tok::Var(k) => Ok(Ast::Var(k)),
            Tok::Gen => Ok(Ast::Gen),
            Tok::Open => {
                let inner = self.sum()?;
                let close = self.bump();
                if close.tok != Tok::Close {
                    return self.fail(&close, "expected `)`");
                }
                Ok(inner)
            }
            Tok::End => self.fail(&t, "unexpected end of input"),
            _ => self.fail(&t, "expected a number, variable or `(`"),
        }
    }
}

fn max_var(ast: &Ast) -> Option<usize> {
    match ast {
        Ast::Var(k) => Some(*k),
        Ast::Int(_) | Ast::Gen => None,
        Ast::Neg(a) | Ast::Pow(a, _) => max_var(a),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) => max_var(a).max(max_var(b)),
    }
}

fn uses_gen(ast: &Ast) -> bool {
    match ast {
        Ast::Gen => true,
        Ast::Int(_) | Ast::Var(_) => false,
        Ast::Neg(a) | Ast::Pow(a, _) => uses_gen(a),
        Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) => uses_gen(a) || uses_gen(b),
    }
}

fn lower(ast: &Ast, width: usize) -> MultiPoly<BigInt> {
    let z = IntegerRing;
    match ast {
        Ast::Int(v) => MultiPoly::constant(&z, v.clone(), width),
        Ast::Var(k) => MultiPoly::var(&z, *k, width),
        Ast::Gen => MultiPoly::var(&z, width - 1, width),
        Ast::Neg(a) => lower(a, width).neg(&z),
        Ast::Add(a, b) => lower(a, width)
            .add(&lower(b, width), &z)
            .expect("same arity"),
        Ast::Sub(a, b) => lower(a, width)
            .sub(&lower(b, width), &z)
            .expect("same arity"),
        Ast::Mul(a, b) => lower(a, width)
            .mul(&lower(b, width), &z)
            .expect("same arity"),
        Ast::Pow(a, k) => lower(a, width).pow(*k, &z),
    }
}

pub fn parse_with(text: &str, opts: ParseOptions) -> Result<Parsed, ParseError> {
    let toks = lex(text, opts.generator)?;
    let mut p = Parser { toks, pos: 0 };
    let ast = p.sum()?;
    let end = p.peek().clone();
    if end.tok != Tok::End {
        return p.fail(&end, "unexpected token after expression");
    }
    let used = max_var(&ast).map_or(0, |k| k + 1);
    let nvars = match opts.nvars {
        Some(n) if used > n => {
            return Err(ParseError {
                line: 1,
                column: 1,
                message: format!("expression uses t{used} but only {n} variables are declared"),
            })
        }
        Some(n) => n,
        None => used,
    };
    let has_generator = uses_gen(&ast);
    let width = nvars + usize::from(opts.generator);
    Ok(Parsed {
        poly: lower(&ast, width),
        nvars,
        has_generator,
    })
}

/// Parses an integer polynomial in `t1..tk`, `k` the largest index used.
pub fn parse_poly(text: &str) -> Result<MultiPoly<BigInt>, ParseError> {
    Ok(parse_with(text, ParseOptions::default())?.poly)
}

/// Parses an integer polynomial in exactly `nvars` variables.
pub fn parse_poly_in(text: &str, nvars: usize) -> Result<MultiPoly<BigInt>, ParseError> {
    let opts = ParseOptions {
        nvars: Some(nvars),
        generator: false,
    };
    Ok(parse_with(text, opts)?.poly)
}

/// Writes `f` in the grammar above, leading term first. `is_negative` and
/// `abs` describe how to split a coefficient into sign and magnitude.
pub fn format_poly<E, N, A, D>(f: &MultiPoly<E>, is_negative: N, abs: A) -> String
where
    E: Clone + PartialEq + fmt::Debug + Send + Sync,
    N: Fn(&E) -> bool,
    A: Fn(&E) -> D,
    D: Display,
{
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (m, c)) in f.terms().rev().enumerate() {
        let neg = is_negative(c);
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = abs(c).to_string();
        let vars: Vec<String> = m
            .exponents()
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| match e {
                1 => format!("t{}", i + 1),
                _ => format!("t{}^{}", i + 1, e),
            })
            .collect();
        if vars.is_empty() {
            out.push_str(&mag);
        } else {
            if mag != "1" {
                out.push_str(&mag);
                out.push('*');
            }
            out.push_str(&vars.join("*"));
        }
    }
    out
}

pub fn format_int_poly(f: &MultiPoly<BigInt>) -> String {
    format_poly(f, |c| c < &BigInt::zero(), |c| c.magnitude().clone())
}

/// `"3,3,2"` as unsigned integers.
pub fn parse_u64_list(text: &str) -> Result<Vec<u64>, String> {
    split_items(text, ',')
        .map(|s| s.parse::<u64>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

/// `"0,-1,5"` as integers.
pub fn parse_int_list(text: &str) -> Result<Vec<BigInt>, String> {
    split_items(text, ',')
        .map(|s| s.parse::<BigInt>().map_err(|e| format!("`{s}`: {e}")))
        .collect()
}

/// A list of groups separated by `;`, each a comma list: `"1,0;0,1"`.
pub fn parse_nested_u64(text: &str) -> Result<Vec<Vec<u64>>, String> {
    split_items(text, ';').map(parse_u64_list).collect()
}

fn split_items(text: &str, sep: char) -> impl Iterator<Item = &str> {
    text.split(sep).map(str::trim).filter(|s| !s.is_empty())
}

/// `"2:1,1"` as a prime and exponent list.
pub fn parse_group(text: &str) -> Result<(u64, Vec<u32>), String> {
    let (p, exps) = text
        .split_once(':')
        .ok_or_else(|| format!("group `{text}` is not of the form p:v1,v2,..."))?;
    let p = p
        .trim()
        .parse::<u64>()
        .map_err(|e| format!("prime `{p}`: {e}"))?;
    let exps = split_items(exps, ',')
        .map(|s| s.parse::<u32>().map_err(|e| format!("exponent `{s}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((p, exps))
}

/// `"p,ell"` for a finite field.
pub fn parse_field(text: &str) -> Result<(u64, u32), String> {
    let parts = parse_u64_list(text)?;
    match parts.as_slice() {
        [p] => Ok((*p, 1)),
        [p, ell] => u32::try_from(*ell)
            .map(|ell| (*p, ell))
            .map_err(|_| format!("degree {ell} too large")),
        _ => Err(format!("field `{text}` is not of the form p,ell")),
    }
}

/// The monomial `t^e` coefficient `1`, handy for tests.
pub fn monomial(exps: &[u32]) -> MultiPoly<BigInt> {
    MultiPoly::from_terms(&IntegerRing, exps.len(), [(exps.to_vec(), BigInt::one())])
        .expect("arity matches")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly<BigInt> {
        parse_poly(s).unwrap()
    }

    fn terms(n: usize, ts: &[(i64, &[u32])]) -> MultiPoly<BigInt> {
        MultiPoly::from_terms(
            &IntegerRing,
            n,
            ts.iter().map(|(c, e)| (e.to_vec(), BigInt::from(*c))),
        )
        .unwrap()
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(p("t1 + t2"), terms(2, &[(1, &[1, 0]), (1, &[0, 1])]));
        assert_eq!(
            p("(t1+t2)^2"),
            terms(2, &[(1, &[2, 0]), (2, &[1, 1]), (1, &[0, 2])])
        );
        assert_eq!(p("3*t1^2 - t2"), terms(2, &[(3, &[2, 0]), (-1, &[0, 1])]));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-t1^2"), terms(1, &[(-1, &[2])]));
        assert_eq!(p("t1 - t1 - t1"), terms(1, &[(-1, &[1])]));
        assert_eq!(p("2*3*t1"), terms(1, &[(6, &[1])]));
        assert_eq!(p("--t1"), terms(1, &[(1, &[1])]));
        assert_eq!(p("(t1)^0"), terms(0, &[(1, &[])]).widen(1).unwrap());
        assert!(p("t1 - t1").is_zero());
        assert_eq!(parse_poly_in("t1", 3).unwrap().nvars(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_poly("t1 +\n  * t2").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        let e = parse_poly("t1^t2").unwrap_err();
        assert!(e.message.contains("literal"), "{e}");
        assert_eq!((e.line, e.column), (1, 4));
        assert!(parse_poly("(t1 + 2").is_err());
        assert!(parse_poly("t0").is_err());
        assert!(parse_poly("x").is_err());
        assert!(parse_poly("2 t1").is_err());
        assert!(parse_poly("t1^2^3").is_err());
        assert!(parse_poly_in("t3", 2).is_err());
        assert!(parse_poly("").is_err());
    }

    #[test]
    fn generator_slot() {
        let opts = ParseOptions {
            nvars: Some(1),
            generator: true,
        };
        let r = parse_with("g*t1 + g^2", opts).unwrap();
        assert!(r.has_generator);
        assert_eq!(r.poly, terms(2, &[(1, &[1, 1]), (1, &[0, 2])]));
        assert!(parse_poly("g").is_err());
    }

    #[test]
    fn formatting_round_trip() {
        for s in [
            "3*t1^2 - t2",
            "-t1*t2 + 7",
            "t1^3 - 2*t1*t2^2 + t3 - 1",
            "0",
            "-5",
        ] {
            let f = p(s);
            assert_eq!(
                parse_poly_in(&format_int_poly(&f), f.nvars()).unwrap(),
                f,
                "{s}"
            );
        }
        assert_eq!(format_int_poly(&p("3*t1^2 - t2")), "3*t1^2 - t2");
    }

    #[test]
    fn lists() {
        assert_eq!(parse_u64_list("3, 3,2").unwrap(), vec![3, 3, 2]);
        assert_eq!(
            parse_int_list("0,-1").unwrap(),
            vec![BigInt::from(0), BigInt::from(-1)]
        );
        assert_eq!(
            parse_nested_u64("1,0;0,1").unwrap(),
            vec![vec![1, 0], vec![0, 1]]
        );
        assert_eq!(parse_group("2:1,1").unwrap(), (2, vec![1, 1]));
        assert_eq!(parse_field("3,2").unwrap(), (3, 2));
        assert_eq!(parse_field("5").unwrap(), (5, 1));
        assert!(parse_group("2").is_err());
        assert!(parse_u64_list("a").is_err());
    }
}
