use num_bigint::BigInt;

use super::multiindex::factorial;
use crate::algebra::{Expression, Generator, Monomial, Rational};

/// Partitions of `n` as multiplicity vectors `k[l-1]` of part size `l`.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(left: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for l in (1..=max.min(left)).rev() {
            cur[l as usize - 1] += 1;
            rec(left - l, l, cur, out);
            cur[l as usize - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut vec![0; n as usize], &mut out);
    out
}

/// `Z_n^[k]`: the `y1`-free coefficient of `1/y1^{k+1}` in `Z_n`.
///
/// Summed over partitions of `n` with `k` parts, each weighted by
/// `(-1)^k k!/∏ k_l!` times `∏ y_{1+l}^{k_l}`.
pub fn z_split(n: u32, k: u32) -> Expression {
    let mut out = Expression::zero();
    for part in partitions(n) {
        let parts: u32 = part.iter().sum();
        if parts != k {
            continue;
        }
        out.add_term(partition_monomial(&part), partition_coefficient(&part));
    }
    out
}

fn partition_coefficient(part: &[u32]) -> Rational {
    let k: u32 = part.iter().sum();
    let denom: BigInt = part.iter().map(|&m| factorial(m)).product();
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    Rational::new(factorial(k) * sign, denom)
}

fn partition_monomial(part: &[u32]) -> Monomial {
    Monomial::from_factors(
        part.iter().enumerate().filter(|(_, &m)| m > 0).map(|(l, &m)| (Generator::moment(l as u32 + 2), m as i32)),
    )
    .expect("moments only")
}

/// `Z_n = Σ_k Z_n^[k] / y1^{k+1}`; zero for negative `n`.
pub fn z_poly(n: i64) -> Expression {
    if n < 0 {
        return Expression::zero();
    }
    let mut out = Expression::zero();
    for part in partitions(n as u32) {
        let k: i32 = part.iter().sum::<u32>() as i32;
        let m = partition_monomial(&part).shifted(&Generator::moment(1), -(k + 1));
        out.add_term(m, partition_coefficient(&part));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn y(f: u32, e: i32) -> Expression {
        Expression::power(Generator::moment(f), e)
    }

    /// Coefficients of `1/Σ_l y_{1+l} u^l` by long division.
    fn series_inverse(n: usize) -> Vec<Expression> {
        let inv_y1 = y(1, -1);
        let mut z: Vec<Expression> = vec![inv_y1.clone()];
        for m in 1..=n {
            let mut acc = Expression::zero();
            for l in 1..=m {
                acc += &z[m - l] * &y(l as u32 + 1, 1);
            }
            z.push(-(&acc * &inv_y1));
        }
        z
    }

    #[test]
    fn low_orders() {
        assert_eq!(z_poly(0), y(1, -1));
        assert_eq!(z_poly(1), -(y(2, 1) * y(1, -2)));
        assert_eq!(z_poly(2), y(2, 2) * y(1, -3) - y(3, 1) * y(1, -2));
        assert!(z_poly(-1).is_zero());
        assert_eq!(z_split(0, 0), Expression::one());
        assert_eq!(z_split(2, 1), -y(3, 1));
        assert_eq!(z_split(2, 2), y(2, 2));
    }

    #[test]
    fn matches_series_inverse() {
        let inv = series_inverse(9);
        for (n, z) in inv.iter().enumerate() {
            assert_eq!(&z_poly(n as i64), z, "n={n}");
        }
    }

    #[test]
    fn split_resums() {
        for n in 0..=8u32 {
            let mut acc = Expression::zero();
            for k in 0..=n {
                acc += z_split(n, k) * y(1, -(k as i32) - 1);
            }
            assert_eq!(acc, z_poly(n as i64));
        }
    }

    #[test]
    fn convolution_with_moments_is_delta() {
        for n in 0..=8i64 {
            let mut acc = Expression::zero();
            for m in 0..=n {
                acc += z_poly(m) * y((n - m) as u32 + 1, 1);
            }
            let expected = if n == 0 { Expression::one() } else { Expression::zero() };
            assert_eq!(acc, expected, "n={n}");
        }
        assert_eq!(
            z_poly(3).coefficient(&Monomial::power(Generator::moment(2), 3).shifted(&Generator::moment(1), -4)),
            rat(-1, 1)
        );
    }
}
