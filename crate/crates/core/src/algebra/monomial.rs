use std::cmp::Ordering;
use std::fmt;

use super::{AlgebraError, Generator};

/// Product of generator powers, kept sorted by generator with no zero exponents.
///
/// Ordering is graded: larger total degree first, then the smaller exponent
/// of the first generator (in generator order) where two monomials differ,
/// so that higher powers of `1/y1` come first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(Generator, i32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn power(g: Generator, e: i32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        Monomial { factors: vec![(g.canonical(), e)] }
    }

    /// Builds a monomial from arbitrary (possibly repeated) factors.
    pub fn from_factors<I: IntoIterator<Item = (Generator, i32)>>(factors: I) -> Result<Self, AlgebraError> {
        let mut out = Monomial::one();
        for (g, e) in factors {
            if matches!(g, Generator::LogMoment { .. }) && e > 1 {
                return Err(AlgebraError::LogDegree);
            }
            out = out.mul(&Monomial::power(g, e))?;
        }
        Ok(out)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Generator, i32)] {
        &self.factors
    }

    pub fn exponent(&self, g: &Generator) -> i32 {
        self.factors.binary_search_by(|(h, _)| h.cmp(g)).map(|idx| self.factors[idx].1).unwrap_or(0)
    }

    pub fn degree(&self) -> i32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Result<Monomial, AlgebraError> {
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if matches!(a[i].0, Generator::LogMoment { .. }) && e > 1 {
                        return Err(AlgebraError::LogDegree);
                    }
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Monomial { factors: out })
    }

    /// Same monomial with the exponent of `g` shifted by `delta`.
    pub fn shifted(&self, g: &Generator, delta: i32) -> Monomial {
        let mut factors = self.factors.clone();
        match factors.binary_search_by(|(h, _)| h.cmp(g)) {
            Ok(idx) => {
                factors[idx].1 += delta;
                if factors[idx].1 == 0 {
                    factors.remove(idx);
                }
            }
            Err(idx) => {
                if delta != 0 {
                    factors.insert(idx, (g.clone(), delta));
                }
            }
        }
        Monomial { factors }
    }

    /// Drops every factor matching `pred`, returning the removed factors.
    pub fn split_off<F: Fn(&Generator) -> bool>(&self, pred: F) -> (Monomial, Vec<(Generator, i32)>) {
        let (taken, kept): (Vec<_>, Vec<_>) = self.factors.iter().cloned().partition(|(g, _)| pred(g));
        (Monomial { factors: kept }, taken)
    }

    /// Applies `f` to every generator and re-canonicalizes.
    pub fn map_generators<F: Fn(&Generator) -> Generator>(&self, f: F) -> Result<Monomial, AlgebraError> {
        Monomial::from_factors(self.factors.iter().map(|(g, e)| (f(g), *e)))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.degree().cmp(&self.degree()).then_with(|| {
            let (a, b) = (&self.factors, &other.factors);
            let (mut i, mut j) = (0, 0);
            loop {
                let step = match (a.get(i), b.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some((_, ea)), None) => {
                        i += 1;
                        ea.cmp(&0)
                    }
                    (None, Some((_, eb))) => {
                        j += 1;
                        0.cmp(eb)
                    }
                    (Some((ga, ea)), Some((gb, eb))) => match ga.cmp(gb) {
                        Ordering::Less => {
                            i += 1;
                            ea.cmp(&0)
                        }
                        Ordering::Greater => {
                            j += 1;
                            0.cmp(eb)
                        }
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                            ea.cmp(eb)
                        }
                    },
                };
                if step != Ordering::Equal {
                    return step;
                }
            }
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, g: &Generator, e: i32) -> fmt::Result {
    if e == 1 {
        write!(f, "{g}")
    } else {
        write!(f, "{g}^{e}")
    }
}

/// Positive powers first, then negative ones, each group in generator order.
impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for positive in [true, false] {
            for (g, e) in self.factors.iter().filter(|(_, e)| (*e > 0) == positive) {
                if !first {
                    f.write_str(" * ")?;
                }
                first = false;
                write_factor(f, g, *e)?;
            }
        }
        Ok(())
    }
}
