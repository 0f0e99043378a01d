use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{CurveData, CurveError, QuadratureSpec, MAX_POINTS};

fn nodes(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64))
}

/// Accepts `new` against the previous estimate: relative tolerance with an
/// absolute floor set by the size of the summed terms.
fn converged(old: Complex64, new: Complex64, scale: f64) -> bool {
    (new - old).norm() <= 1e-10 * new.norm() + 1e-13 * scale
}

/// `(1/2πi) ∮ F(z) (z - c)^{-k} dz` on `|z - c| = r`, doubling the nodes from
/// `q.points` until two estimates agree.
fn circle_coefficient(
    what: impl Fn() -> String,
    centre: f64,
    radius: f64,
    k: i32,
    q: &QuadratureSpec,
    f: impl Fn(Complex64) -> Complex64,
) -> Result<Complex64, CurveError> {
    let estimate = |n: usize| -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for u in nodes(n) {
            let t = f(centre + radius * u) * (radius * u).powi(1 - k);
            scale += t.norm();
            sum += t;
        }
        (sum / n as f64, scale / n as f64)
    };
    let mut n = q.points;
    let (mut prev, _) = estimate(n);
    let mut change = f64::INFINITY;
    while n < MAX_POINTS.max(q.points) {
        n *= 2;
        let (cur, scale) = estimate(n);
        change = (cur - prev).norm();
        if converged(prev, cur, scale) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(CurveError::Convergence { what: what(), change })
}

/// `y_{f,i} = ∮_{a_i} dz/(2πi) y(z)/(z - a_i)^{f+1/2}`.
pub fn moment(curve: &CurveData, f: u32, i: u32, q: &QuadratureSpec) -> Result<Complex64, CurveError> {
    let a = curve.endpoint(i)?;
    circle_coefficient(|| format!("y{f}_{i}"), a, q.radius, f as i32, q, |z| curve.m(z) * curve.local_cofactor(i, z))
}

fn kernel_numerator(curve: &CurveData, p: Complex64, q: Complex64) -> Complex64 {
    let (s, prod) = (curve.a1 + curve.a2, curve.a1 * curve.a2);
    p * q - 0.5 * s * (p + q) + prod
}

/// `B̃(p,q) = B(p,q)/(dp dq) - ½(p-q)^{-2}` on the physical sheet.
///
/// For one cut this equals `(pq - (a₁+a₂)(p+q)/2 + a₁a₂) / (2 (p-q)² √σ(p) √σ(q))`,
/// which still has a `½(p-q)^{-2}` pole on the diagonal.
pub fn bergmann_reg(curve: &CurveData, p: Complex64, q: Complex64) -> Result<Complex64, CurveError> {
    for x in [p, q] {
        if curve.is_on_cut(x) {
            return Err(CurveError::OnCut(x));
        }
    }
    if (p - q).norm() <= 1e-12 * (curve.a2 - curve.a1) {
        return Err(CurveError::Coincident(p));
    }
    let d = p - q;
    Ok(kernel_numerator(curve, p, q) / (2.0 * d * d * curve.sqrt_sigma(p) * curve.sqrt_sigma(q)))
}

/// `B_i^f(p) = 2 ∮_{a_i} dz/(2πi) B̃(p,z)/(z - a_i)^{f+1/2}`. The circle
/// shrinks to `|p - a_i|/2` when `p` is closer than the configured radius allows.
pub fn prop_ext(curve: &CurveData, i: u32, f: u32, p: Complex64, q: &QuadratureSpec) -> Result<Complex64, CurveError> {
    let a = curve.endpoint(i)?;
    if curve.is_on_cut(p) {
        return Err(CurveError::OnCut(p));
    }
    let radius = q.radius.min(0.5 * (p - a).norm());
    let sp = curve.sqrt_sigma(p);
    circle_coefficient(
        || format!("B[{i};{f}]({p})"),
        a,
        radius,
        f as i32 + 1,
        q,
        |z| {
            let d = p - z;
            kernel_numerator(curve, p, z) / (d * d * sp * curve.local_cofactor(i, z))
        },
    )
}

/// `B^{f,g}_{i,j} = 4 ∮_{a_i} ∮_{a_j} B̃(z,z') / ((z-a_i)^{f+1/2} (z'-a_j)^{g+1/2})`,
/// with the inner circle at half radius when both sit on the same endpoint.
pub fn prop_int(
    curve: &CurveData,
    i: u32,
    j: u32,
    f: u32,
    g: u32,
    q: &QuadratureSpec,
) -> Result<Complex64, CurveError> {
    let (ai, aj) = (curve.endpoint(i)?, curve.endpoint(j)?);
    let (ri, rj) = if i == j { (q.radius, 0.5 * q.radius) } else { (q.radius, q.radius) };
    let estimate = |n: usize| -> (Complex64, f64) {
        let outer: Vec<Complex64> = nodes(n).collect();
        let inner: Vec<(Complex64, Complex64)> = nodes(n)
            .map(|u| {
                let z = aj + rj * u;
                (z, (rj * u).powi(-(g as i32)) / curve.local_cofactor(j, z))
            })
            .collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut scale = 0.0;
        for &u in &outer {
            let z = ai + ri * u;
            let wz = (ri * u).powi(-(f as i32)) / curve.local_cofactor(i, z);
            for &(zp, wzp) in &inner {
                let d = z - zp;
                let t = 2.0 * kernel_numerator(curve, z, zp) / (d * d) * wz * wzp;
                scale += t.norm();
                sum += t;
            }
        }
        let nn = (n * n) as f64;
        (sum / nn, scale / nn)
    };
    let mut n = q.points;
    let (mut prev, _) = estimate(n);
    let mut change = f64::INFINITY;
    while n < MAX_POINTS.max(q.points) {
        n *= 2;
        let (cur, scale) = estimate(n);
        change = (cur - prev).norm();
        if converged(prev, cur, scale) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(CurveError::Convergence { what: format!("B[{i},{j};{f},{g}]"), change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{solve_endpoints, Potential};

    fn gaussian() -> (CurveData, QuadratureSpec) {
        let c = solve_endpoints(&Potential::new(vec![0.0, 0.5])).unwrap();
        let q = QuadratureSpec::for_curve(&c);
        (c, q)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn gaussian_right_moments() {
        let (c, q) = gaussian();
        assert!(close(moment(&c, 1, 2, &q).unwrap(), Complex64::new(2.0, 0.0), 1e-10));
        assert!(close(moment(&c, 2, 2, &q).unwrap(), Complex64::new(0.25, 0.0), 1e-10));
        assert!(close(moment(&c, 3, 2, &q).unwrap(), Complex64::new(-1.0 / 64.0, 0.0), 1e-10));
        assert!(close(moment(&c, 4, 2, &q).unwrap(), Complex64::new(1.0 / 512.0, 0.0), 1e-10));
    }

    #[test]
    fn moments_survive_radius_halving() {
        let (c, q) = gaussian();
        let half = QuadratureSpec { radius: q.radius / 2.0, ..q };
        for i in 1..=2 {
            for f in 1..=5 {
                let (a, b) = (moment(&c, f, i, &q).unwrap(), moment(&c, f, i, &half).unwrap());
                assert!(close(a, b, 1e-10 * a.norm().max(1.0)), "f={f} i={i}");
            }
        }
    }

    #[test]
    fn kernel_symmetry_decay_and_pole() {
        let (c, _) = gaussian();
        let pts =
            [Complex64::new(3.0, 0.5), Complex64::new(-2.5, -1.0), Complex64::new(0.3, 2.0), Complex64::new(5.0, 0.0)];
        for &p in &pts {
            for &r in &pts {
                if p != r {
                    let (a, b) = (bergmann_reg(&c, p, r).unwrap(), bergmann_reg(&c, r, p).unwrap());
                    assert!(close(a, b, 1e-12 * a.norm().max(1.0)));
                }
            }
        }
        let far = bergmann_reg(&c, Complex64::new(1e3, 0.0), Complex64::new(0.0, 1e3)).unwrap();
        assert!(far.norm() < 1e-5);
        // the regularized kernel keeps half of the double pole
        let p = Complex64::new(3.0, 0.0);
        let eps = 1e-4;
        let near = bergmann_reg(&c, p, p + eps).unwrap();
        assert!(((near * eps * eps) - 0.5).norm() < 1e-3);
        assert!(matches!(bergmann_reg(&c, p, p), Err(CurveError::Coincident(_))));
        assert!(matches!(bergmann_reg(&c, Complex64::new(0.5, 0.0), p), Err(CurveError::OnCut(_))));
    }

    #[test]
    fn external_propagators_converge_and_reflect() {
        let (c, q) = gaussian();
        let p = Complex64::new(3.0, 0.0);
        let b = prop_ext(&c, 2, 0, p, &q).unwrap();
        let fine = QuadratureSpec { points: 2048, ..q };
        assert!(close(b, prop_ext(&c, 2, 0, p, &fine).unwrap(), 1e-10));
        // x -> -x swaps the endpoints; with the local roots used here
        // B_1^f(-p) = i (-1)^f B_2^f(p)
        for f in 0..4 {
            let l = prop_ext(&c, 1, f, -p, &q).unwrap();
            let r = prop_ext(&c, 2, f, p, &q).unwrap();
            let expect = r * Complex64::i() * if f % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(l, expect, 1e-10 * r.norm().max(1.0)), "f={f}: {l} vs {r}");
        }
        let tiny = prop_ext(&c, 2, 1, Complex64::new(1e4, 0.0), &q).unwrap();
        assert!(tiny.norm() < 1e-6);
    }

    #[test]
    fn internal_propagators_symmetric_and_radius_stable() {
        let (c, q) = gaussian();
        let small = QuadratureSpec { radius: 0.6 * q.radius, ..q };
        for (i, j, f, g) in [(1, 2, 0, 0), (1, 2, 1, 0), (2, 2, 0, 1), (1, 1, 2, 0), (2, 1, 1, 2)] {
            let a = prop_int(&c, i, j, f, g, &q).unwrap();
            let b = prop_int(&c, j, i, g, f, &q).unwrap();
            assert!(close(a, b, 1e-10 * a.norm().max(1.0)), "({i},{j},{f},{g})");
            let s = prop_int(&c, i, j, f, g, &small).unwrap();
            assert!(close(a, s, 1e-9 * a.norm().max(1.0)), "({i},{j},{f},{g}) radius");
        }
    }
}
