use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{AlgebraError, Generator, Monomial, PointLabel, Rational};

/// Exact sparse sum of monomials with rational coefficients.
///
/// Zero coefficients are never stored, so two expressions are equal exactly
/// when their term maps are equal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expression {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

impl Expression {
    pub fn zero() -> Self {
        Expression::default()
    }

    pub fn one() -> Self {
        Expression::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expression::term(c, Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expression { terms }
    }

    pub fn generator(g: Generator) -> Self {
        Expression::power(g, 1)
    }

    pub fn power(g: Generator, e: i32) -> Self {
        Expression::term(Rational::one(), Monomial::power(g, e))
    }

    /// Collects terms, merging equal monomials.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut out = Expression::zero();
        for (m, c) in it {
            out.add_term(m, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Adds `c * other` in place.
    pub fn add_scaled(&mut self, other: &Expression, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (m, k) in &other.terms {
            self.add_term(m.clone(), k * c);
        }
    }

    pub fn scale(&self, c: &Rational) -> Expression {
        if c.is_zero() {
            return Expression::zero();
        }
        Expression { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    /// Product, rejecting results that would contain `(log y1)^2`.
    pub fn try_mul(&self, other: &Expression) -> Result<Expression, AlgebraError> {
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.len() * other.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb)?;
                let c = ca * cb;
                match acc.entry(m) {
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(c);
                    }
                    std::collections::hash_map::Entry::Occupied(mut o) => *o.get_mut() += c,
                }
            }
        }
        Ok(Expression { terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    /// Formal partial derivative by a moment generator.
    ///
    /// `log y_{1,i}` differentiates to `1/y_{1,i}` under `y_{1,i}`; every
    /// other generator is independent of `v`.
    pub fn diff(&self, v: &Generator) -> Expression {
        let log_partner = match v {
            Generator::Moment { f: 1, i } => Some(Generator::LogMoment { i: *i }),
            _ => None,
        };
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e != 0 {
                out.add_term(m.shifted(v, -1), c * BigInt::from(e));
            }
            if let Some(log) = &log_partner {
                if m.exponent(log) == 1 {
                    out.add_term(m.shifted(log, -1).shifted(v, -1), c.clone());
                }
            }
        }
        out
    }

    /// Exponent of the index-free `y1` in a monomial.
    pub fn y1_exponent(m: &Monomial) -> i32 {
        m.exponent(&Generator::moment(1))
    }

    /// The sub-sum whose (index-free) `y1` exponent is exactly `-r`.
    pub fn project_y1(&self, r: i32) -> Expression {
        Expression {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| Self::y1_exponent(m) == -r)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits into `(r, P_r e)` pairs, ascending in `r`.
    pub fn y1_grades(&self) -> BTreeMap<i32, Expression> {
        let mut out: BTreeMap<i32, Expression> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(-Self::y1_exponent(m)).or_default().terms.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn contains_log(&self) -> bool {
        self.generators().iter().any(|g| matches!(g, Generator::LogMoment { .. }))
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms.keys().flat_map(|m| m.factors().iter().map(|(g, _)| g.clone())).collect()
    }

    pub fn map_generators<F: Fn(&Generator) -> Generator>(&self, f: F) -> Result<Expression, AlgebraError> {
        let mut out = Expression::zero();
        for (m, c) in &self.terms {
            out.add_term(m.map_generators(&f)?, c.clone());
        }
        Ok(out)
    }

    /// Relabels every external propagator argument `from` as `to`.
    pub fn substitute_point(&self, from: &PointLabel, to: &PointLabel) -> Expression {
        self.map_generators(|g| match g {
            Generator::ExtProp { i, f, p } if p == from => Generator::ext_prop(*i, *f, to.clone()),
            other => other.clone(),
        })
        .expect("relabeling points cannot create log powers")
    }

    /// Attaches cut index `i` to every index-free moment and log-moment.
    pub fn at_cut(&self, i: u32) -> Expression {
        self.map_generators(|g| match g {
            Generator::Moment { f, i: None } => Generator::moment_at(*f, i),
            Generator::LogMoment { i: None } => Generator::LogMoment { i: Some(i) },
            other => other.clone(),
        })
        .expect("indexing cannot create log powers")
    }

    /// Numeric value; `log y_{1,i}` falls back to the principal log of the
    /// bound `y_{1,i}` when not bound itself.
    pub fn evaluate(&self, env: &HashMap<Generator, Complex64>) -> Result<Complex64, AlgebraError> {
        let lookup = |g: &Generator| -> Option<Complex64> {
            env.get(g).copied().or_else(|| match g {
                Generator::LogMoment { i } => env.get(&Generator::Moment { f: 1, i: *i }).map(|v| v.ln()),
                _ => None,
            })
        };
        let missing: Vec<Generator> = self.generators().into_iter().filter(|g| lookup(g).is_none()).collect();
        if !missing.is_empty() {
            return Err(AlgebraError::UnboundGenerator(missing));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut v = Complex64::new(rational_to_f64(c), 0.0);
            for (g, e) in m.factors() {
                v *= lookup(g).unwrap().powi(*e);
            }
            total += v;
        }
        Ok(total)
    }

    /// Largest absolute numerator/denominator bit length, for diagnostics.
    pub fn max_coefficient_bits(&self) -> u64 {
        self.terms.values().map(|c| c.numer().abs().bits().max(c.denom().bits())).max().unwrap_or(0)
    }
}

pub fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: scale both down by a common power of two.
        let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(1000);
        let n = (c.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (c.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl From<Generator> for Expression {
    fn from(g: Generator) -> Self {
        Expression::generator(g)
    }
}

impl From<Rational> for Expression {
    fn from(c: Rational) -> Self {
        Expression::constant(c)
    }
}

impl Add for &Expression {
    type Output = Expression;
    fn add(self, rhs: &Expression) -> Expression {
        let (big, small) = if self.len() >= rhs.len() { (self, rhs) } else { (rhs, self) };
        let mut out = big.clone();
        out += small;
        out
    }
}

impl Add for Expression {
    type Output = Expression;
    fn add(mut self, rhs: Expression) -> Expression {
        self += &rhs;
        self
    }
}

impl AddAssign<&Expression> for Expression {
    fn add_assign(&mut self, rhs: &Expression) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign<Expression> for Expression {
    fn add_assign(&mut self, rhs: Expression) {
        if self.is_zero() {
            *self = rhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Neg for &Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        Expression { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for Expression {
    type Output = Expression;
    fn neg(self) -> Expression {
        -&self
    }
}

impl Sub for &Expression {
    type Output = Expression;
    fn sub(self, rhs: &Expression) -> Expression {
        self + &(-rhs)
    }
}

impl Sub for Expression {
    type Output = Expression;
    fn sub(self, rhs: Expression) -> Expression {
        &self - &rhs
    }
}

/// Panics if the product would square a log; use [`Expression::try_mul`]
/// where that can happen.
impl Mul for &Expression {
    type Output = Expression;
    fn mul(self, rhs: &Expression) -> Expression {
        self.try_mul(rhs).expect("product creates (log y1)^2")
    }
}

impl Mul for Expression {
    type Output = Expression;
    fn mul(self, rhs: Expression) -> Expression {
        &self * &rhs
    }
}

impl std::iter::Sum for Expression {
    fn sum<I: Iterator<Item = Expression>>(iter: I) -> Expression {
        iter.fold(Expression::zero(), |acc, e| acc + e)
    }
}
