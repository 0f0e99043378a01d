use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use num_complex::Complex64;
use rayon::prelude::*;

use super::quad::{moment, prop_ext, prop_int};
use super::{CurveData, CurveError, QuadratureSpec};
use crate::algebra::{Expression, Generator, PointLabel};

/// Numeric value of a single cut-indexed generator.
pub fn generator_value(
    curve: &CurveData,
    g: &Generator,
    points: &HashMap<PointLabel, Complex64>,
    q: &QuadratureSpec,
) -> Result<Complex64, CurveError> {
    let unindexed = || CurveError::Unindexed(g.clone());
    match g {
        Generator::Moment { f, i } => moment(curve, *f, i.ok_or_else(unindexed)?, q),
        Generator::LogMoment { i } => Ok(moment(curve, 1, i.ok_or_else(unindexed)?, q)?.ln()),
        Generator::ExtProp { i, f, p } => {
            let at = points.get(p).ok_or_else(|| CurveError::UnboundPoint(p.clone()))?;
            prop_ext(curve, *i, *f, *at, q)
        }
        Generator::IntProp { i, j, f, g } => prop_int(curve, *i, *j, *f, *g, q),
    }
}

/// Values of every generator in `gens`, computed in parallel.
pub fn generator_environment(
    curve: &CurveData,
    gens: &BTreeSet<Generator>,
    points: &HashMap<PointLabel, Complex64>,
    q: &QuadratureSpec,
) -> Result<Vec<(Generator, Complex64)>, CurveError> {
    gens.par_iter().map(|g| Ok((g.clone(), generator_value(curve, g, points, q)?))).collect()
}

/// Evaluates a cut-indexed expression with the given point bindings.
pub fn eval_expression(
    curve: &CurveData,
    e: &Expression,
    points: &HashMap<PointLabel, Complex64>,
    q: &QuadratureSpec,
) -> Result<Complex64, CurveError> {
    let env: HashMap<Generator, Complex64> =
        generator_environment(curve, &e.generators(), points, q)?.into_iter().collect();
    Ok(e.evaluate(&env)?)
}

/// `generator,value_re,value_im` rows in generator order.
pub fn report_csv(values: &[(Generator, Complex64)]) -> String {
    let mut rows = values.to_vec();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = String::from("generator,value_re,value_im\n");
    for (g, v) in rows {
        let name = g.to_string();
        let name = if name.contains(',') { format!("\"{name}\"") } else { name };
        writeln!(out, "{name},{:.17e},{:.17e}", v.re, v.im).unwrap();
    }
    out
}
