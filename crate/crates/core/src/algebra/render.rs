use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Expression, Generator, Monomial, Rational};

/// One term of the JSON rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coefficient: String,
    pub exponents: Vec<(String, i32)>,
}

fn fmt_abs(c: &Rational) -> String {
    format!("{}/{}", c.numer().abs(), c.denom())
}

fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let bad = || AlgebraError::Parse(format!("bad rational `{s}`"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

fn parse_factor(s: &str) -> Result<(Generator, i32), AlgebraError> {
    // Exponents follow the last '^' outside brackets; labels never contain '^'.
    match s.rsplit_once('^') {
        Some((g, e)) => {
            let e: i32 = e.trim().parse().map_err(|_| AlgebraError::Parse(format!("bad exponent in `{s}`")))?;
            Ok((g.parse()?, e))
        }
        None => Ok((s.parse()?, 1)),
    }
}

/// One term per line: `<sign> <num>/<den> * <factor> * ...`.
impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return writeln!(f, "+ 0/1");
        }
        for (m, c) in self.terms() {
            let sign = if c.is_negative() { '-' } else { '+' };
            if m.is_one() {
                writeln!(f, "{sign} {}", fmt_abs(c))?;
            } else {
                writeln!(f, "{sign} {} * {m}", fmt_abs(c))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Expression {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Expression::zero();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (neg, rest) = match line.as_bytes()[0] {
                b'+' => (false, &line[1..]),
                b'-' => (true, &line[1..]),
                _ => (false, line),
            };
            let mut parts = rest.split(" * ");
            let mut c = parse_rational(parts.next().unwrap_or("").trim())?;
            if neg {
                c = -c;
            }
            let factors = parts.map(|p| parse_factor(p.trim())).collect::<Result<Vec<_>, _>>()?;
            out.add_term(Monomial::from_factors(factors)?, c);
        }
        Ok(out)
    }
}

impl Expression {
    pub fn to_json_terms(&self) -> Vec<TermJson> {
        self.terms()
            .map(|(m, c)| TermJson {
                coefficient: format!("{}/{}", c.numer(), c.denom()),
                exponents: m.factors().iter().map(|(g, e)| (g.to_string(), *e)).collect(),
            })
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_terms()).expect("terms serialize")
    }

    pub fn from_json_terms(terms: &[TermJson]) -> Result<Expression, AlgebraError> {
        let mut out = Expression::zero();
        for t in terms {
            let factors = t
                .exponents
                .iter()
                .map(|(g, e)| Ok((g.parse::<Generator>()?, *e)))
                .collect::<Result<Vec<_>, AlgebraError>>()?;
            out.add_term(Monomial::from_factors(factors)?, parse_rational(&t.coefficient)?);
        }
        Ok(out)
    }

    /// Single-line human form, e.g. `-21/160 y2^3 y1^-5 + 29/128 y2 y3 y1^-4`.
    pub fn to_inline(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            if a.denom().is_one() {
                s.push_str(&a.numer().to_string());
            } else {
                s.push_str(&fmt_abs(&a));
            }
            if !m.is_one() {
                s.push(' ');
                s.push_str(&m.to_string().replace(" * ", " "));
            }
        }
        s
    }
}
