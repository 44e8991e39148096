//! Polynomial expressions: integers, `a/b` literals, variables, `+ - * / ^`
//! and parentheses. Multiplication must be written out.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qasdyn_core::{Monomial, Polynomial};

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "'{n}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
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
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line: l0, column: c0 });
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
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        return Err(ParseError {
            line: l0,
            column: c0,
            message: format!("unexpected character '{c}'"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

/// Polynomial with rational coefficients, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl RationalPoly {
    fn constant(nvars: usize, c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; nvars], c);
        }
        RationalPoly { nvars, terms }
    }

    fn var(nvars: usize, v: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        RationalPoly {
            nvars,
            terms: BTreeMap::from([(e, BigRational::one())]),
        }
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(e, _)| e.iter().all(|&x| x == 0))
                .map(|(_, c)| c.clone()),
            _ => None,
        }
    }

    fn add(mut self, o: &Self, sign: i32) -> Self {
        for (e, c) in &o.terms {
            let entry = self.terms.entry(e.clone()).or_insert_with(BigRational::zero);
            if sign < 0 {
                *entry -= c;
            } else {
                *entry += c;
            }
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
        self
    }

    fn mul(&self, o: &Self) -> Self {
        let mut out = RationalPoly::constant(self.nvars, BigRational::zero());
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                let e: Vec<u32> = a.iter().zip(b).map(|(p, q)| p + q).collect();
                let entry = out.terms.entry(e.clone()).or_insert_with(BigRational::zero);
                *entry += x * y;
                if entry.is_zero() {
                    out.terms.remove(&e);
                }
            }
        }
        out
    }

    fn scale(mut self, s: &BigRational) -> Self {
        if s.is_zero() {
            self.terms.clear();
        }
        for c in self.terms.values_mut() {
            *c *= s;
        }
        self
    }

    fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = RationalPoly::constant(self.nvars, BigRational::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()))
    }

    /// `self * scale` as an integer polynomial; `scale` must clear every
    /// denominator.
    pub fn to_integer(&self, scale: &BigInt) -> Polynomial {
        let s = BigRational::from_integer(scale.clone());
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().map(|(e, c)| {
                let v = c * &s;
                debug_assert!(v.is_integer());
                (Monomial::new(e.clone()), v.to_integer())
            }),
        )
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    vars: &'a [String],
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

    fn err<T>(t: &Token, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn expr(&mut self, min_bp: u8) -> Result<RationalPoly, ParseError> {
        let t = self.next();
        let mut lhs = match &t.tok {
            Tok::Int(n) => RationalPoly::constant(self.vars.len(), BigRational::from_integer(n.clone())),
            Tok::Ident(name) => match self.vars.iter().position(|v| v == name) {
                Some(i) => RationalPoly::var(self.vars.len(), i),
                None => return Self::err(&t, format!("unknown variable '{name}'")),
            },
            Tok::LParen => {
                let inner = self.expr(0)?;
                let close = self.next();
                if close.tok != Tok::RParen {
                    return Self::err(&close, format!("expected ')', found {}", close.tok));
                }
                inner
            }
            Tok::Minus => self.expr(3)?.scale(&-BigRational::one()),
            Tok::Plus => self.expr(3)?,
            other => return Self::err(&t, format!("expected an operand, found {other}")),
        };
        loop {
            let op = self.peek().clone();
            let (l_bp, r_bp) = match op.tok {
                Tok::Plus | Tok::Minus => (1, 2),
                Tok::Star | Tok::Slash => (3, 4),
                Tok::Caret => (6, 5),
                Tok::RParen | Tok::End => break,
                Tok::Int(_) | Tok::Ident(_) | Tok::LParen => {
                    return Self::err(&op, "implicit multiplication is not supported; write '*'");
                }
            };
            if l_bp < min_bp {
                break;
            }
            self.next();
            if op.tok == Tok::Caret {
                let e = self.next();
                let Tok::Int(n) = &e.tok else {
                    return Self::err(&e, "exponent must be a nonnegative integer literal");
                };
                let Some(n) = n.to_u32().filter(|&n| n <= MAX_EXPONENT) else {
                    return Self::err(&e, format!("exponent exceeds {MAX_EXPONENT}"));
                };
                lhs = lhs.pow(n);
                continue;
            }
            let rhs = self.expr(r_bp)?;
            lhs = match op.tok {
                Tok::Plus => lhs.add(&rhs, 1),
                Tok::Minus => lhs.add(&rhs, -1),
                Tok::Star => lhs.mul(&rhs),
                Tok::Slash => match rhs.as_constant() {
                    Some(c) if !c.is_zero() => lhs.scale(&c.recip()),
                    Some(_) => return Self::err(&op, "division by zero"),
                    None => return Self::err(&op, "only division by a constant is allowed"),
                },
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }
}

/// Parses one expression over the given variables.
pub fn parse_expr(src: &str, vars: &[String]) -> Result<RationalPoly, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, vars };
    let out = p.expr(0)?;
    let t = p.peek().clone();
    match t.tok {
        Tok::End => Ok(out),
        Tok::RParen => Parser::err(&t, "unmatched ')'"),
        ref other => Parser::err(&t, format!("unexpected {other}")),
    }
}

/// Parses and clears denominators of a single polynomial (scaled to be
/// integral, not canonicalized).
pub fn parse_polynomial(src: &str, vars: &[String]) -> Result<Polynomial, ParseError> {
    let p = parse_expr(src, vars)?;
    Ok(p.to_integer(&p.denominator_lcm()))
}

/// Parses several expressions and scales them jointly to integers.
pub fn parse_joint(srcs: &[String], vars: &[String]) -> Result<Vec<Polynomial>, (usize, ParseError)> {
    let parsed: Vec<RationalPoly> = srcs
        .iter()
        .enumerate()
        .map(|(i, s)| parse_expr(s, vars).map_err(|e| (i, e)))
        .collect::<Result<_, _>>()?;
    let l = parsed
        .iter()
        .fold(BigInt::one(), |acc, p| num_integer::Integer::lcm(&acc, &p.denominator_lcm()));
    Ok(parsed.iter().map(|p| p.to_integer(&l)).collect())
}

/// Decimal, scientific or `a/b` notation.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().ok()?;
        let b: BigInt = b.trim().parse().ok()?;
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    if shift >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -q } else { q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zwt() -> Vec<String> {
        ["z", "w", "t"].iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn precedence_and_associativity() {
        let v = zwt();
        let p = parse_polynomial("2*t*z - z^2 - w^2", &v).unwrap();
        assert_eq!(p.display_with(&v).to_string(), "-z^2 + 2*z*t - w^2");
        let p = parse_polynomial("-z^2", &v).unwrap();
        assert_eq!(p.display_with(&v).to_string(), "-z^2");
        let p = parse_polynomial("(z+w)^2 - z*(z+2*w)", &v).unwrap();
        assert_eq!(p.display_with(&v).to_string(), "w^2");
        let p = parse_polynomial("z - w - t", &v).unwrap();
        assert_eq!(p.display_with(&v).to_string(), "z - w - t");
    }

    #[test]
    fn rational_literals_are_cleared() {
        let v = zwt();
        let ps = parse_joint(&["(1/2)*z^2".into(), "w^2".into(), "t^2".into()], &v).unwrap();
        let shown: Vec<String> = ps.iter().map(|p| p.display_with(&v).to_string()).collect();
        assert_eq!(shown, ["z^2", "2*w^2", "2*t^2"]);
        let p = parse_polynomial("z/3 + w/6", &v).unwrap();
        assert_eq!(p.display_with(&v).to_string(), "2*z + w");
    }

    #[test]
    fn errors_carry_positions() {
        let v = zwt();
        let e = parse_expr("2 z", &v).unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
        assert!(e.message.contains("implicit multiplication"));
        let e = parse_expr("z +\n  q", &v).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.message.contains("unknown variable"));
        let e = parse_expr("(z + w", &v).unwrap_err();
        assert!(e.message.contains("expected ')'"));
        let e = parse_expr("z / w", &v).unwrap_err();
        assert_eq!(e.column, 3);
        assert!(parse_expr("z ^ w", &v).is_err());
        assert!(parse_expr("z # w", &v).is_err());
        assert!(parse_expr("z)", &v).is_err());
        assert!(parse_expr("", &v).is_err());
    }

    #[test]
    fn rationals_in_several_notations() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(parse_rational("1e-12"), Some(q(1, 1_000_000_000_000)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("3/6"), Some(q(1, 2)));
        assert_eq!(parse_rational("-2.5E1"), Some(q(-25, 1)));
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational("1/0"), None);
    }
}
