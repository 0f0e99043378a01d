use num_complex::Complex64;

use super::{CurveData, CurveError, Potential};

/// Coefficients `e_n` of `(1 - s₁u + s₂u²)^{-1/2} = Σ e_n u^n`, so that
/// `1/√σ(w) = Σ e_n w^{-n-1}` at infinity.
fn laurent(s1: f64, s2: f64, count: usize) -> Vec<f64> {
    let mut e = vec![0.0; count.max(2)];
    e[0] = 1.0;
    e[1] = 0.5 * s1;
    for n in 1..count.saturating_sub(1) {
        let nf = n as f64;
        e[n + 1] = (s1 * (nf + 0.5) * e[n] - s2 * nf * e[n - 1]) / (nf + 1.0);
    }
    e.truncate(count);
    e
}

/// Coefficients of `w^{-1}` and `w^{-2}` in `V'(w)/√σ(w)`, minus their
/// targets `0` and `2`: both vanish exactly when `W₁⁽⁰⁾(z) ~ 1/z`.
pub fn endpoint_residuals(pot: &Potential, a1: f64, a2: f64) -> [f64; 2] {
    let vp = pot.derivative_coeffs();
    let e = laurent(a1 + a2, a1 * a2, vp.len() + 2);
    let r = |k: usize| vp.iter().enumerate().map(|(m, c)| c * e[m + k]).sum::<f64>();
    [r(0), r(1) - 2.0]
}

/// Polynomial part of `V'(x)/√σ(x)` at infinity.
fn m_poly(pot: &Potential, a1: f64, a2: f64) -> Vec<f64> {
    let vp = pot.derivative_coeffs();
    let e = laurent(a1 + a2, a1 * a2, vp.len() + 1);
    // x^m collects c_n e_j with n - 1 - j = m, where c_n multiplies x^n
    (0..vp.len().saturating_sub(1)).map(|m| (m + 1..vp.len()).map(|n| vp[n] * e[n - 1 - m]).sum()).collect()
}

fn newton(pot: &Potential, mut x: [f64; 2]) -> Option<[f64; 2]> {
    let norm = |r: [f64; 2]| r[0].hypot(r[1]);
    let mut r = endpoint_residuals(pot, x[0], x[1]);
    for _ in 0..200 {
        if norm(r) < 1e-14 {
            return Some(x);
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-7 * x[k].abs().max(1.0);
            let (mut up, mut dn) = (x, x);
            up[k] += h;
            dn[k] -= h;
            let (ru, rd) = (endpoint_residuals(pot, up[0], up[1]), endpoint_residuals(pot, dn[0], dn[1]));
            for row in 0..2 {
                jac[row][k] = (ru[row] - rd[row]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return None;
        }
        let dx = [-(jac[1][1] * r[0] - jac[0][1] * r[1]) / det, -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det];
        let mut lambda = 1.0;
        loop {
            let cand = [x[0] + lambda * dx[0], x[1] + lambda * dx[1]];
            let rc = endpoint_residuals(pot, cand[0], cand[1]);
            if rc.iter().all(|v| v.is_finite()) && norm(rc) < norm(r) {
                x = cand;
                r = rc;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                // stalled at the noise floor is still a solution
                return (norm(r) < 1e-12).then_some(x);
            }
        }
    }
    (norm(r) < 1e-12).then_some(x)
}

/// Cut endpoints from the one-cut normalization, by damped Newton iteration
/// from a few starting widths.
pub fn solve_endpoints(pot: &Potential) -> Result<CurveData, CurveError> {
    let vp = pot.derivative_coeffs();
    if vp.last().is_none_or(|&c| c == 0.0) || vp.len() < 2 {
        return Err(CurveError::NoOneCutSolution(
            "V' must be a polynomial of degree at least one with nonzero leading coefficient".into(),
        ));
    }
    let (t1, t2) = (pot.t[0], pot.t.get(1).copied().unwrap_or(0.0));
    let centre = if t2 > 0.0 { -t1 / (2.0 * t2) } else { 0.0 };
    let base = if t2 > 0.0 { 2.0 / (2.0 * t2).sqrt() } else { 1.0 };
    let mut rejected = Vec::new();
    for scale in [1.0, 0.5, 2.0, 0.25, 4.0, 0.1, 10.0] {
        let w = base * scale;
        let Some([a1, a2]) = newton(pot, [centre - w, centre + w]) else {
            continue;
        };
        if a1.partial_cmp(&a2) != Some(std::cmp::Ordering::Less) {
            continue;
        }
        let curve = CurveData { a1, a2, m_poly: m_poly(pot, a1, a2), potential: pot.clone() };
        match m_positive_on_cut(&curve) {
            Ok(()) => return Ok(curve),
            Err(why) => rejected.push(why),
        }
    }
    Err(CurveError::NoOneCutSolution(if rejected.is_empty() {
        "Newton iteration did not converge".into()
    } else {
        rejected.join("; ")
    }))
}

fn m_positive_on_cut(c: &CurveData) -> Result<(), String> {
    let n = 2000;
    for k in 0..=n {
        let x = c.a1 + (c.a2 - c.a1) * k as f64 / n as f64;
        let m = c.m(Complex64::new(x, 0.0)).re;
        if m <= 0.0 {
            return Err(format!("M({x:.6}) = {m:.3e} on the cut [{:.6}, {:.6}]", c.a1, c.a2));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_matches_direct_expansion() {
        // σ = w² - 4: (1 - 4u²)^{-1/2} = 1 + 2u² + 6u⁴ + ...
        let e = laurent(0.0, -4.0, 6);
        assert_eq!(e, vec![1.0, 0.0, 2.0, 0.0, 6.0, 0.0]);
    }

    #[test]
    fn gaussian_endpoints() {
        let c = solve_endpoints(&Potential::new(vec![0.0, 0.5])).unwrap();
        assert!((c.a1 + 2.0).abs() < 1e-12 && (c.a2 - 2.0).abs() < 1e-12);
        assert_eq!(c.m_poly.len(), 1);
        assert!((c.m_poly[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn shifted_gaussian() {
        // V = (x - 1)²/2 up to a constant
        let c = solve_endpoints(&Potential::new(vec![-1.0, 0.5])).unwrap();
        assert!((c.a1 + 1.0).abs() < 1e-12 && (c.a2 - 3.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_matches_closed_form() {
        // V = x²/2 + g x⁴: a² = (√(1 + 48g) - 1)/(24g)
        let g = 0.1;
        let c = solve_endpoints(&Potential::new(vec![0.0, 0.5, 0.0, g])).unwrap();
        let a2 = ((1.0 + 48.0 * g).sqrt() - 1.0) / (24.0 * g);
        assert!((c.a2 * c.a2 - 4.0 * a2).abs() < 1e-12, "{c:?}");
        let r = endpoint_residuals(&c.potential, c.a1, c.a2);
        assert!(r[0].abs() < 1e-12 && r[1].abs() < 1e-12);
    }

    #[test]
    fn deep_double_well_has_no_one_cut_solution() {
        let err = solve_endpoints(&Potential::new(vec![0.0, -5.0, 0.0, 1.0])).unwrap_err();
        assert!(matches!(err, CurveError::NoOneCutSolution(_)), "{err}");
    }
}
