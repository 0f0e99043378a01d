//! Seeded random checks of the algebraic invariants, usable without a test harness.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::algebra::{rat, Expression, Generator, Monomial};
use crate::coupling::{gradings, max_moment, z_poly, CouplingTable};
use crate::oracle::{loop_apply, LoopContext};

fn random_generator(rng: &mut StdRng) -> Generator {
    let i = rng.gen_range(1..=2);
    match rng.gen_range(0..5) {
        0 | 1 => Generator::moment_at(rng.gen_range(1..=4), i),
        2 | 3 => Generator::ext_prop(i, rng.gen_range(0..=2), "p1"),
        _ => Generator::int_prop(i, rng.gen_range(1..=2), rng.gen_range(0..=2), rng.gen_range(0..=2)),
    }
}

/// A small random cut-indexed expression; `with_log` allows one `log y1` factor per term.
pub fn random_expression(rng: &mut StdRng, with_log: bool) -> Expression {
    let mut e = Expression::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let mut factors = Vec::new();
        for _ in 0..rng.gen_range(0..=3) {
            let g = random_generator(rng);
            let exp = if g.is_moment() {
                *[-3, -2, -1, 1, 2].get(rng.gen_range(0..5)).unwrap()
            } else {
                rng.gen_range(1..=2)
            };
            factors.push((g, exp));
        }
        if with_log && rng.gen_bool(0.3) {
            factors.push((Generator::LogMoment { i: Some(rng.gen_range(1..=2)) }, 1));
        }
        let m = Monomial::from_factors(factors).expect("at most one log factor");
        let mut num = rng.gen_range(-6..=6);
        if num == 0 {
            num = 1;
        }
        e.add_term(m, rat(num, rng.gen_range(1..=5)));
    }
    e
}

/// `∂(ab) = ∂a·b + a·∂b` on `cases` random pairs; returns the first failing case.
pub fn leibniz_diff(cases: u64, seed: u64) -> Result<(), String> {
    for c in 0..cases {
        let mut rng = StdRng::seed_from_u64(seed ^ c);
        let a = random_expression(&mut rng, true);
        let b = random_expression(&mut rng, false);
        let v = if rng.gen_bool(0.2) { Generator::moment_at(1, 1) } else { random_generator(&mut rng) };
        let lhs = (&a * &b).diff(&v);
        let rhs = &a.diff(&v) * &b + &a * &b.diff(&v);
        if lhs != rhs {
            return Err(format!("case {c}: d/d{v} of ({}) * ({})", a.to_inline(), b.to_inline()));
        }
    }
    Ok(())
}

/// Leibniz rule for the loop insertion operator.
pub fn leibniz_loop(cases: u64, seed: u64) -> Result<(), String> {
    let ctx = LoopContext::new(1, "q");
    for c in 0..cases {
        let mut rng = StdRng::seed_from_u64(seed ^ c);
        let a = random_expression(&mut rng, false);
        let b = random_expression(&mut rng, false);
        let run = || -> Result<bool, crate::oracle::OracleError> {
            let lhs = loop_apply(&(&a * &b), &ctx)?;
            let rhs = &loop_apply(&a, &ctx)? * &b + &a * &loop_apply(&b, &ctx)?;
            Ok(lhs == rhs)
        };
        match run() {
            Ok(true) => {}
            Ok(false) => return Err(format!("case {c}: ({}) * ({})", a.to_inline(), b.to_inline())),
            Err(e) => return Err(format!("case {c}: {e}")),
        }
    }
    Ok(())
}

/// `P_r P_r = P_r`, `P_r P_s = 0` for `r != s` and `Σ_r P_r = id` on random log-free input.
pub fn projector_algebra(cases: u64, seed: u64) -> Result<(), String> {
    for c in 0..cases {
        let mut rng = StdRng::seed_from_u64(seed ^ c);
        let e = random_expression(&mut rng, false);
        let mut resum = Expression::zero();
        for r in -8..=8 {
            let p = e.project_y1(r);
            if p.project_y1(r) != p {
                return Err(format!("case {c}: P_{r} not idempotent"));
            }
            for s in [r - 1, r + 1, r + 3] {
                if !p.project_y1(s).is_zero() {
                    return Err(format!("case {c}: P_{s} P_{r} != 0"));
                }
            }
            resum += p;
        }
        if resum != e {
            return Err(format!("case {c}: projections do not re-sum"));
        }
    }
    Ok(())
}

/// `Σ_{m=0}^{n} Z_m y_{n-m+1} = δ_{n,0}` for `n <= max_n`.
pub fn z_convolution(max_n: u32) -> Result<(), String> {
    for n in 0..=max_n {
        let mut sum = Expression::zero();
        for m in 0..=n {
            sum += &z_poly(m as i64) * &Expression::generator(Generator::moment(n - m + 1));
        }
        let expect = if n == 0 { Expression::one() } else { Expression::zero() };
        if sum != expect {
            return Err(format!("n = {n}: {}", sum.to_inline()));
        }
    }
    Ok(())
}

/// Double grading and moment cutoff of `λ^(h)`, `2 <= h <= max_h`.
pub fn lambda_gradings(table: &CouplingTable, max_h: u32) -> Result<(), String> {
    table.extend_to(max_h).map_err(|e| e.to_string())?;
    for h in 2..=max_h {
        let l = table.lambda(h).map_err(|e| e.to_string())?;
        if max_moment(&l) > 3 * h - 2 {
            return Err(format!("order {h}: moment y{} beyond the cutoff", max_moment(&l)));
        }
        let want = (2 - 2 * h as i32, h as i32 - 1);
        let off = l.terms().find(|(m, _)| gradings(m) != want).map(|(m, _)| m.clone());
        if let Some(m) = off {
            return Err(format!("order {h}: monomial {m} graded {:?}", gradings(&m)));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_runs() {
        assert_eq!(leibniz_diff(20, 1), Ok(()));
        assert_eq!(leibniz_loop(20, 1), Ok(()));
        assert_eq!(projector_algebra(20, 1), Ok(()));
        assert_eq!(z_convolution(5), Ok(()));
    }
}
