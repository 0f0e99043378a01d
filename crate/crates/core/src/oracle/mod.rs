//! Independent matrix-model pipeline: loop insertion on propagators and
//! moments, and the residue recursion for the one-point function.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::algebra::{rat, AlgebraError, Expression, Generator, Monomial, PointLabel, Rational};
use crate::coupling::z_poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("loop insertion is undefined on log(y1)")]
    LogPresent,
    #[error("generator {0} carries no cut index")]
    Unindexed(Generator),
    #[error("point {0} already occurs in the expression")]
    PointInUse(PointLabel),
    #[error("the recursion needs the one-point function of order one as a seed")]
    SeedMissing,
    #[error("term {0} is not a bilinear in propagators at the merged point")]
    NotBilinear(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Cut count and the label of the leg being inserted.
#[derive(Clone, Debug)]
pub struct LoopContext {
    pub s: u32,
    pub new_point: PointLabel,
}

impl LoopContext {
    pub fn new(s: u32, new_point: impl Into<PointLabel>) -> Self {
        LoopContext { s, new_point: new_point.into() }
    }
}

fn gen(g: Generator) -> Expression {
    Expression::generator(g)
}

fn inv_y1(i: u32) -> Expression {
    Expression::power(Generator::moment_at(1, i), -1)
}

fn odd(f: u32) -> Rational {
    Rational::from_integer(BigInt::from(2 * f + 1))
}

/// Rule `which` (1..=7) applied to one generator; incompatible pairs give zero.
pub fn delta_apply(which: u8, target: &Generator, ctx: &LoopContext) -> Expression {
    let q = &ctx.new_point;
    let b0q = |i: u32| gen(Generator::ext_prop(i, 0, q.clone()));
    match (which, target) {
        (1, Generator::Moment { f, i: Some(i) }) => {
            (gen(Generator::moment_at(f + 1, *i)) * inv_y1(*i) * b0q(*i)).scale(&odd(*f))
        }
        (2, Generator::Moment { f, i: Some(i) }) => -gen(Generator::ext_prop(*i, *f, q.clone())),
        (3, Generator::ExtProp { i, f, p }) => {
            (gen(Generator::ext_prop(*i, f + 1, p.clone())) * b0q(*i) * inv_y1(*i)).scale(&odd(*f))
        }
        (4, Generator::ExtProp { i, f, p }) => (1..=2 * ctx.s)
            .map(|j| {
                gen(Generator::int_prop(*i, j, *f, 0)) * gen(Generator::ext_prop(j, 0, p.clone())) * b0q(j) * inv_y1(j)
            })
            .sum(),
        (5, Generator::IntProp { i, j, f, g }) => {
            (gen(Generator::int_prop(*i, *j, f + 1, *g)) * b0q(*i) * inv_y1(*i)).scale(&odd(*f))
        }
        (6, Generator::IntProp { i, j, f, g }) => {
            (gen(Generator::int_prop(*i, *j, *f, g + 1)) * b0q(*j) * inv_y1(*j)).scale(&odd(*g))
        }
        (7, Generator::IntProp { i, j, f, g }) => (1..=2 * ctx.s)
            .map(|k| {
                gen(Generator::int_prop(*i, k, *f, 0)) * gen(Generator::int_prop(*j, k, *g, 0)) * b0q(k) * inv_y1(k)
            })
            .sum(),
        _ => Expression::zero(),
    }
}

/// Full variation `δg/δV(q)` of one generator.
pub fn variation(target: &Generator, ctx: &LoopContext) -> Result<Expression, OracleError> {
    match target {
        Generator::LogMoment { .. } => Err(OracleError::LogPresent),
        Generator::Moment { i: None, .. } => Err(OracleError::Unindexed(target.clone())),
        _ => Ok((1..=7).map(|w| delta_apply(w, target, ctx)).sum()),
    }
}

/// Loop insertion `∂/∂V(q)` extended to products by the Leibniz rule.
pub fn loop_apply(e: &Expression, ctx: &LoopContext) -> Result<Expression, OracleError> {
    let gens = e.generators();
    if gens.iter().any(|g| matches!(g, Generator::LogMoment { .. })) {
        return Err(OracleError::LogPresent);
    }
    if let Some(g) = gens.iter().find(|g| g.cut_index().is_none()) {
        return Err(OracleError::Unindexed(g.clone()));
    }
    if gens.iter().any(|g| matches!(g, Generator::ExtProp { p, .. } if *p == ctx.new_point)) {
        return Err(OracleError::PointInUse(ctx.new_point.clone()));
    }
    let vars: HashMap<Generator, Expression> =
        gens.iter().map(|g| Ok((g.clone(), variation(g, ctx)?))).collect::<Result<_, OracleError>>()?;
    let terms: Vec<(&Monomial, &Rational)> = e.terms().collect();
    let parts: Vec<Expression> = terms
        .par_iter()
        .map(|(m, c)| -> Result<Expression, OracleError> {
            let mut out = Expression::zero();
            for (g, k) in m.factors() {
                let rest = Expression::term((*c).clone() * BigInt::from(*k), m.shifted(g, -1));
                out += rest.try_mul(&vars[g])?;
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().sum())
}

/// `Res_{x→a_i} dS(p,x)/(dp y(x)) · B_j^f(x) B_k^g(x)` via the contour-twist identity.
#[allow(clippy::too_many_arguments)]
pub fn residue_step(f: u32, g: u32, j: u32, k: u32, i: u32, p: &PointLabel) -> Expression {
    let bp = |r: u32| gen(Generator::ext_prop(i, r, p.clone()));
    let z = |t: u32| z_poly(t as i64).at_cut(i);
    let inv_odd = |r: u32| Rational::new(BigInt::from(1), BigInt::from(2 * r + 1));
    let mut out = (gen(Generator::int_prop(j, i, f, 0)) * bp(0) * inv_y1(i) * gen(Generator::int_prop(i, k, 0, g)))
        .scale(&rat(1, 2));
    // δ_{k,i} (g+1/2) Σ_{r+m+t=g+1} B_i^r(p) B_{j,i}^{f,m} Z_{t,i} / (2r+1), and its mirror
    let mut half_sum = |on: bool, f: u32, g: u32, j: u32| {
        if !on {
            return;
        }
        let pre = Rational::new(BigInt::from(2 * g + 1), BigInt::from(2));
        for r in 0..=g + 1 {
            for m in 0..=g + 1 - r {
                let t = g + 1 - r - m;
                let term = bp(r) * gen(Generator::int_prop(j, i, f, m)) * z(t);
                out.add_scaled(&term, &(&pre * inv_odd(r)));
            }
        }
    };
    half_sum(k == i, f, g, j);
    half_sum(j == i, g, f, k);
    if j == i && k == i {
        let pre = Rational::new(BigInt::from((2 * g + 1) * (2 * f + 1)), BigInt::from(2));
        for r in 0..=f + g + 2 {
            let l = f + g + 2 - r;
            out.add_scaled(&(bp(r) * z(l)), &(&pre * inv_odd(r)));
        }
    }
    out
}

/// Maps every `(coefficient) · B_j^f(x) B_k^g(x)` term through the residue
/// identity, summed over the branch points.
pub fn residue_sum(e: &Expression, x: &PointLabel, p: &PointLabel, s: u32) -> Result<Expression, OracleError> {
    let terms: Vec<(&Monomial, &Rational)> = e.terms().collect();
    let parts: Vec<Expression> = terms
        .par_iter()
        .map(|(m, c)| -> Result<Expression, OracleError> {
            let (rest, at_x) = m.split_off(|g| matches!(g, Generator::ExtProp { p, .. } if p == x));
            let props: Vec<(u32, u32)> = at_x
                .iter()
                .flat_map(|(g, e)| {
                    let fi = match g {
                        Generator::ExtProp { i, f, .. } => (*f, *i),
                        _ => unreachable!(),
                    };
                    std::iter::repeat_n(fi, (*e).max(0) as usize)
                })
                .collect();
            if props.len() != 2 || at_x.iter().any(|(_, e)| *e < 0) {
                return Err(OracleError::NotBilinear(m.to_string()));
            }
            let ((f, j), (g, k)) = (props[0], props[1]);
            let coeff = Expression::term((*c).clone(), rest);
            let mut out = Expression::zero();
            for i in 1..=2 * s {
                out += coeff.try_mul(&residue_step(f, g, j, k, i, p))?;
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    Ok(parts.into_iter().sum())
}

/// `W_1^(1..=h)(p1)` from the order-one seed by the residue recursion.
pub fn w1_series(h: u32, s: u32, seed: Option<&Expression>) -> Result<Vec<Expression>, OracleError> {
    let seed = seed.ok_or(OracleError::SeedMissing)?;
    let p1 = PointLabel::leg(1);
    let p2 = PointLabel::leg(2);
    let x = PointLabel::new("x");
    // index 0 unused so that w[m] is W_1^(m)
    let mut w = vec![Expression::zero(), seed.clone()];
    for order in 2..=h {
        let mut source = Expression::zero();
        for m in 1..order {
            let a = w[(order - m) as usize].substitute_point(&p1, &x);
            let b = w[m as usize].substitute_point(&p1, &x);
            source += a.try_mul(&b)?;
        }
        let w2 = loop_apply(&w[(order - 1) as usize], &LoopContext::new(s, p2.clone()))?;
        source += w2.substitute_point(&p1, &x).substitute_point(&p2, &x);
        w.push(residue_sum(&source, &x, &p1, s)?);
    }
    Ok(w)
}

/// `W_1^(h)(p1)` for `h >= 2`, seeded with `W_1^(1)(p1)`.
pub fn w1_recursion(h: u32, s: u32, seed: Option<&Expression>) -> Result<Expression, OracleError> {
    Ok(w1_series(h, s, seed)?.pop().unwrap())
}
