use std::collections::HashMap;
use std::sync::{Arc, Mutex, RwLock};

use num_bigint::BigInt;
use rayon::prelude::*;

use super::multiindex::{a_factor, enumerate_mset, n_index, MultiIndex};
use super::zpoly::z_poly;
use super::CouplingError;
use crate::algebra::{rat, Expression, Generator, Monomial, Rational};

/// `λ^(h)` by order plus memoized derived couplings `λ_α^(h) = D_α λ^(h)`.
///
/// Orders are appended in sequence; the memo tables are shared between
/// worker threads behind locks.
pub struct CouplingTable {
    orders: RwLock<Vec<Arc<Expression>>>,
    derived: Mutex<HashMap<(u32, MultiIndex), Arc<Expression>>>,
    z: Mutex<HashMap<i64, Arc<Expression>>>,
}

impl Default for CouplingTable {
    fn default() -> Self {
        Self::new()
    }
}

/// `Σ_f (2f+1) (y_{f+1}/y1) ∂/∂y_f`, applied once.
pub fn delta_remnant(e: &Expression) -> Expression {
    let inv_y1 = Monomial::power(Generator::moment(1), -1);
    let mut out = Expression::zero();
    let fs: Vec<u32> = e
        .generators()
        .into_iter()
        .filter_map(|g| match g {
            Generator::Moment { f, i: None } => Some(f),
            Generator::LogMoment { i: None } => Some(1),
            _ => None,
        })
        .collect();
    let mut seen = Vec::new();
    for f in fs {
        if seen.contains(&f) {
            continue;
        }
        seen.push(f);
        let d = e.diff(&Generator::moment(f));
        let factor = inv_y1.shifted(&Generator::moment(f + 1), 1);
        let c = Rational::from_integer(BigInt::from(2 * f + 1));
        for (m, k) in d.terms() {
            let m = m.mul(&factor).expect("log-free factor");
            out.add_term(m, k * &c);
        }
    }
    out
}

/// Antiderivative in `y1` of a log-free expression with no `1/y1` term.
fn integrate_y1(e: &Expression) -> Result<Expression, CouplingError> {
    let y1 = Generator::moment(1);
    let mut out = Expression::zero();
    for (m, c) in e.terms() {
        let p = m.exponent(&y1) + 1;
        if p == 0 {
            return Err(CouplingError::DivisionByZeroGuard(m.to_string()));
        }
        out.add_term(m.shifted(&y1, 1), c / Rational::from_integer(BigInt::from(p)));
    }
    Ok(out)
}

/// `(n, coefficient, first factor, optional second factor)` of one source term.
type SourceJob = (u32, Rational, (u32, MultiIndex), Option<(u32, MultiIndex)>);

impl CouplingTable {
    /// Seeded with `λ^(0) = 1/y1` and `λ^(1) = -(1/24) log y1`.
    pub fn new() -> Self {
        let l0 = Expression::power(Generator::moment(1), -1);
        let l1 = Expression::generator(Generator::log_y1()).scale(&rat(-1, 24));
        CouplingTable {
            orders: RwLock::new(vec![Arc::new(l0), Arc::new(l1)]),
            derived: Mutex::new(HashMap::new()),
            z: Mutex::new(HashMap::new()),
        }
    }

    /// Highest order present.
    pub fn max_order(&self) -> u32 {
        self.orders.read().unwrap().len() as u32 - 1
    }

    pub fn lambda(&self, h: u32) -> Result<Arc<Expression>, CouplingError> {
        self.orders.read().unwrap().get(h as usize).cloned().ok_or(CouplingError::MissingOrder(h))
    }

    /// Appends `λ^(h)`; `h` must be the next missing order.
    pub fn insert(&self, h: u32, lambda: Expression) -> Result<(), CouplingError> {
        let mut orders = self.orders.write().unwrap();
        if h as usize != orders.len() {
            return Err(CouplingError::MissingOrder(orders.len() as u32));
        }
        orders.push(Arc::new(lambda));
        Ok(())
    }

    pub fn z(&self, n: i64) -> Arc<Expression> {
        if let Some(z) = self.z.lock().unwrap().get(&n) {
            return z.clone();
        }
        let z = Arc::new(z_poly(n));
        self.z.lock().unwrap().insert(n, z.clone());
        z
    }

    /// `D_α λ^(h)`: the remnant operator `α_0 - 3δ_{h,0}` times, then `∏ (-∂_f)^{α_f}`.
    pub fn d_alpha(&self, h: u32, alpha: &MultiIndex) -> Result<Arc<Expression>, CouplingError> {
        if !alpha.is_member(alpha.valence(), h) {
            return Err(CouplingError::Admissibility { h, alpha: alpha.clone() });
        }
        let key = (h, alpha.clone());
        if let Some(e) = self.derived.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let lambda = self.lambda(h)?;
        let remnant = alpha.get(0) - if h == 0 { 3 } else { 0 };
        let mut e = (*lambda).clone();
        for _ in 0..remnant {
            e = delta_remnant(&e);
        }
        for (f, &a) in alpha.entries().iter().enumerate().skip(1) {
            for _ in 0..a {
                e = -e.diff(&Generator::moment(f as u32));
            }
        }
        let e = Arc::new(e);
        self.derived.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    /// `Σ_n Z_{n+shift} · S_n` where `S_n` gathers every quadratic and linear
    /// source term of order `h` with first index `n`, weighted by its `A` factors.
    fn loop_source(&self, h: u32, shift: i64) -> Result<Expression, CouplingError> {
        if h < 2 {
            return Err(CouplingError::OrderTooLow(h));
        }
        for m in 1..h {
            self.lambda(m)?;
        }
        let mut jobs: Vec<SourceJob> = Vec::new();
        for m in 1..h {
            for a in enumerate_mset(1, h - m) {
                for b in enumerate_mset(1, m) {
                    let c = a_factor(&a) * a_factor(&b);
                    jobs.push((n_index(&a, Some(&b)), c, (h - m, a.clone()), Some((m, b))));
                }
            }
        }
        for a in enumerate_mset(2, h - 1) {
            let twos = a.entries().iter().filter(|&&x| x == 2).count() as i64;
            let c = a_factor(&a) * Rational::from_integer(BigInt::from(2 - twos));
            jobs.push((n_index(&a, None), c, (h - 1, a), None));
        }
        let mut by_n: HashMap<u32, Vec<usize>> = HashMap::new();
        for (idx, job) in jobs.iter().enumerate() {
            by_n.entry(job.0).or_default().push(idx);
        }
        let mut ns: Vec<u32> = by_n.keys().copied().collect();
        ns.sort_unstable();
        let parts: Vec<Expression> = ns
            .par_iter()
            .map(|n| -> Result<Expression, CouplingError> {
                let mut s = Expression::zero();
                for &idx in &by_n[n] {
                    let (_, c, (ha, a), second) = &jobs[idx];
                    let da = self.d_alpha(*ha, a)?;
                    match second {
                        Some((hb, b)) => {
                            let db = self.d_alpha(*hb, b)?;
                            s.add_scaled(&da.try_mul(&db)?, c);
                        }
                        None => s.add_scaled(&da, c),
                    }
                }
                let z = self.z(*n as i64 + shift);
                Ok(z.try_mul(&s)?)
            })
            .collect::<Result<_, _>>()?;
        let mut total = Expression::zero();
        for p in parts {
            total += p;
        }
        Ok(total)
    }

    /// `λ^(h)` from the integrated loop equation. Requires every lower order.
    pub fn lambda_order(&self, h: u32) -> Result<Expression, CouplingError> {
        // -∂λ/∂y1 = (2/3) Σ Z_n S_n, integrated term by term; the
        // 1/(k+r+r') weights are the reciprocal y1 powers of each term.
        let rhs = self.loop_source(h, 0)?.scale(&rat(-2, 3));
        integrate_y1(&rhs)
    }

    /// Checks `D_{α'} λ^(h)` with `α'_j = δ_{j,k'}` against the pre-integration
    /// loop equation, `Z` subscripts shifted by `1 - k'`.
    pub fn lambda_consistency(&self, h: u32, kp: u32) -> Result<bool, CouplingError> {
        let lhs = self.d_alpha(h, &MultiIndex::unit(kp as usize))?;
        let rhs = self.loop_source(h, 1 - kp as i64)?.scale(&Rational::new(BigInt::from(2), BigInt::from(2 * kp + 1)));
        Ok(*lhs == rhs)
    }

    /// Computes every missing order up to `h`.
    pub fn extend_to(&self, h: u32) -> Result<(), CouplingError> {
        while self.max_order() < h {
            let next = self.max_order() + 1;
            let l = self.lambda_order(next)?;
            self.insert(next, l)?;
        }
        Ok(())
    }

    /// `F̂^(h) = Σ_{i=1}^{2s} λ^(h)_{(0),i}`.
    pub fn free_energy_hat(&self, h: u32, s: u32) -> Result<Expression, CouplingError> {
        let l = self.lambda(h)?;
        let mut out = Expression::zero();
        for i in 1..=2 * s {
            out += l.at_cut(i);
        }
        Ok(out)
    }
}

/// `Σ e_f` and `Σ f e_f` over the moment exponents of a monomial.
pub fn gradings(m: &Monomial) -> (i32, i32) {
    m.factors().iter().fold((0, 0), |(a, b), (g, e)| match g {
        Generator::Moment { f, .. } => (a + e, b + *f as i32 * e),
        _ => (a, b),
    })
}

pub fn max_moment(e: &Expression) -> u32 {
    e.generators()
        .iter()
        .filter_map(|g| match g {
            Generator::Moment { f, .. } => Some(*f),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(f: u32, e: i32) -> Expression {
        Expression::power(Generator::moment(f), e)
    }

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn lambda2() -> Expression {
        (y(2, 3) * y(1, -5)).scale(&rat(-21, 160)) + (y(2, 1) * y(3, 1) * y(1, -4)).scale(&rat(29, 128))
            - (y(4, 1) * y(1, -3)).scale(&rat(35, 384))
    }

    #[test]
    fn derived_couplings() {
        let t = CouplingTable::new();
        assert_eq!(*t.d_alpha(0, &mi(&[3])).unwrap(), y(1, -1));
        assert_eq!(*t.d_alpha(1, &mi(&[0, 1])).unwrap(), y(1, -1).scale(&rat(1, 24)));
        assert_eq!(*t.d_alpha(1, &mi(&[1])).unwrap(), (y(2, 1) * y(1, -2)).scale(&rat(-1, 8)));
        assert!(matches!(t.d_alpha(0, &mi(&[2])), Err(CouplingError::Admissibility { .. })));
        assert!(matches!(t.d_alpha(2, &mi(&[1])), Err(CouplingError::MissingOrder(2))));
    }

    #[test]
    fn second_order() {
        let t = CouplingTable::new();
        assert_eq!(t.lambda_order(2).unwrap(), lambda2());
        t.extend_to(2).unwrap();
        for kp in 0..=4 {
            assert!(t.lambda_consistency(2, kp).unwrap(), "k'={kp}");
        }
    }

    #[test]
    fn third_order_shape() {
        let t = CouplingTable::new();
        t.extend_to(3).unwrap();
        let l3 = t.lambda(3).unwrap();
        assert_eq!(l3.len(), 11);
        assert_eq!(
            l3.coefficient(&Monomial::from_factors([(Generator::moment(2), 6), (Generator::moment(1), -10)]).unwrap()),
            rat(2205, 256)
        );
        assert_eq!(
            l3.coefficient(&Monomial::from_factors([(Generator::moment(7), 1), (Generator::moment(1), -5)]).unwrap()),
            rat(-5005, 3072)
        );
        assert!(t.lambda_consistency(3, 1).unwrap());
    }

    #[test]
    fn remnant_on_log() {
        let l1 = Expression::generator(Generator::log_y1()).scale(&rat(-1, 24));
        assert_eq!(delta_remnant(&l1), (y(2, 1) * y(1, -2)).scale(&rat(-1, 8)));
    }
}
