use rayon::prelude::*;

use super::{enumerate_diagrams, symmetry_factor, Diagram, DiagramError};
use crate::algebra::{Expression, Generator};
use crate::coupling::CouplingTable;

/// `S_D`: the propagator and coupling product summed over cut indices `1..=2s`.
pub fn assemble_sd(d: &Diagram, s: u32, table: &CouplingTable) -> Result<Expression, DiagramError> {
    let n = d.vertices.len();
    if n == 0 {
        return Ok(Expression::one());
    }
    let couplings = d.vertices.iter().map(|v| table.d_alpha(v.h, &v.alpha)).collect::<Result<Vec<_>, _>>()?;
    let cuts = 2 * s;
    let mut total = Expression::zero();
    let mut idx = vec![1u32; n];
    loop {
        let mut term = Expression::one();
        for x in &d.external {
            term = term.try_mul(&Expression::generator(Generator::ext_prop(idx[x.v], x.m, x.label.clone())))?;
        }
        for e in &d.edges {
            let g = Generator::int_prop(idx[e.a.v], idx[e.b.v], e.a.f, e.b.f);
            term = term.try_mul(&Expression::generator(g))?;
        }
        for (v, c) in couplings.iter().enumerate() {
            term = term.try_mul(&c.at_cut(idx[v]))?;
        }
        total += term;
        // odometer over cut assignments
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(total);
            }
            if idx[pos] < cuts {
                idx[pos] += 1;
                break;
            }
            idx[pos] = 1;
            pos += 1;
        }
    }
}

/// `W_k^(h) = Σ_D Π_D S_D` over the `(k,h)` catalog.
pub fn correlator(k: u32, h: u32, s: u32, table: &CouplingTable) -> Result<Expression, DiagramError> {
    let parts = enumerate_diagrams(k, h)?
        .par_iter()
        .map(|d| Ok(assemble_sd(d, s, table)?.scale(&symmetry_factor(d).value)))
        .collect::<Result<Vec<_>, DiagramError>>()?;
    Ok(parts.into_iter().sum())
}
