use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::Rational;

/// `(α_0, α_1, ...)`: `α_j` lines carrying a `j`-th derivative.
///
/// Trailing zeros are trimmed, so equal vertex structures compare equal
/// regardless of how many slots they were written with.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u32>", into = "Vec<u32>")]
pub struct MultiIndex {
    // shared, since diagrams clone their vertex structures freely
    entries: Arc<[u32]>,
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex::new(v)
    }
}

impl From<MultiIndex> for Vec<u32> {
    fn from(m: MultiIndex) -> Self {
        m.entries.to_vec()
    }
}

impl MultiIndex {
    pub fn new(mut entries: Vec<u32>) -> Self {
        while entries.last() == Some(&0) {
            entries.pop();
        }
        MultiIndex { entries: entries.into() }
    }

    pub fn zero() -> Self {
        MultiIndex::default()
    }

    /// `α_j = δ_{j,k}`.
    pub fn unit(k: usize) -> Self {
        let mut e = vec![0; k + 1];
        e[k] = 1;
        MultiIndex::new(e)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn get(&self, j: usize) -> u32 {
        self.entries.get(j).copied().unwrap_or(0)
    }

    /// `Σ α_j`, the number of lines at the vertex.
    pub fn valence(&self) -> u32 {
        self.entries.iter().sum()
    }

    /// `Σ j α_j`, the total number of derivatives.
    pub fn weight(&self) -> u32 {
        self.entries.iter().enumerate().map(|(j, a)| j as u32 * a).sum()
    }

    pub fn is_member(&self, k: u32, h: u32) -> bool {
        let bound = k as i64 + 3 * h as i64 - 3;
        bound >= 0 && self.valence() == k && self.weight() as i64 <= bound
    }

    /// Derivative orders of the lines, ascending, with multiplicity.
    pub fn orders(&self) -> Vec<u32> {
        self.entries.iter().enumerate().flat_map(|(j, &a)| std::iter::repeat_n(j as u32, a as usize)).collect()
    }

    pub fn from_orders<I: IntoIterator<Item = u32>>(orders: I) -> Self {
        let mut e: Vec<u32> = Vec::new();
        for f in orders {
            let f = f as usize;
            if e.len() <= f {
                e.resize(f + 1, 0);
            }
            e[f] += 1;
        }
        MultiIndex::new(e)
    }

    /// `α! = ∏ α_j!`.
    pub fn factorial(&self) -> BigInt {
        self.entries.iter().map(|&a| factorial(a)).product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(MultiIndex::zero());
        }
        inner
            .split(',')
            .map(|p| p.trim().parse::<u32>().map_err(|_| format!("bad multi-index `{s}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(MultiIndex::new)
    }
}

pub(crate) fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// All `α` with `Σ α_j = k` and `Σ j α_j <= k + 3h - 3`, in ascending order.
pub fn enumerate_mset(k: u32, h: u32) -> Vec<MultiIndex> {
    let bound = k as i64 + 3 * h as i64 - 3;
    if bound < 0 {
        return Vec::new();
    }
    let bound = bound as u32;
    let mut out = Vec::new();
    let mut orders = Vec::with_capacity(k as usize);
    // Non-decreasing derivative orders; the multiset determines α.
    fn rec(left: u32, min: u32, budget: u32, orders: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(MultiIndex::from_orders(orders.iter().copied()));
            return;
        }
        // every remaining line costs at least `min`
        let mut f = min;
        while f * left <= budget {
            orders.push(f);
            rec(left - 1, f, budget - f, orders, out);
            orders.pop();
            f += 1;
        }
    }
    rec(k, 0, bound, &mut orders, &mut out);
    out.sort();
    out
}

/// `|M_k^(h)|` from the coefficients of `∏_{n≥1} 1/(1 - x q^n)`.
pub fn count_terms(k: u32, h: u32) -> u64 {
    let bound = k as i64 + 3 * h as i64 - 3;
    if bound < 0 {
        return 0;
    }
    let (mmax, rmax) = (bound as usize, k as usize);
    // p[m][r]: coefficient of q^m x^r, truncated.
    let mut p = vec![vec![0u64; rmax + 1]; mmax + 1];
    p[0][0] = 1;
    for n in 1..=mmax {
        // multiply by 1/(1 - x q^n) = Σ_t x^t q^{nt}
        for m in n..=mmax {
            for r in 1..=rmax {
                p[m][r] += p[m - n][r - 1];
            }
        }
    }
    p.iter().map(|row| row.iter().sum::<u64>()).sum()
}

/// `A_α = ∏ (f + 1/2)^{α_f}`.
pub fn a_factor(alpha: &MultiIndex) -> Rational {
    let mut num = BigInt::from(1);
    let mut den = BigInt::from(1);
    for (f, &a) in alpha.entries().iter().enumerate() {
        for _ in 0..a {
            num *= 2 * f as i64 + 1;
            den *= 2;
        }
    }
    Rational::new(num, den)
}

/// `n(α) = 1 + Σ j α_j`, or `1 + Σ j α_j + Σ j β_j` with a second index.
pub fn n_index(alpha: &MultiIndex, beta: Option<&MultiIndex>) -> u32 {
    1 + alpha.weight() + beta.map_or(0, MultiIndex::weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn trimming_and_parsing() {
        assert_eq!(mi(&[1, 0, 0]), mi(&[1]));
        assert_eq!("(1,0)".parse::<MultiIndex>().unwrap(), mi(&[1]));
        assert_eq!("()".parse::<MultiIndex>().unwrap(), MultiIndex::zero());
        assert_eq!(mi(&[0, 2, 1]).to_string(), "(0,2,1)");
        assert_eq!(mi(&[0, 2, 1]).orders(), vec![1, 1, 2]);
    }

    #[test]
    fn small_sets() {
        assert_eq!(enumerate_mset(3, 0), vec![mi(&[3])]);
        assert_eq!(enumerate_mset(1, 1), vec![mi(&[0, 1]), mi(&[1])]);
        assert_eq!(enumerate_mset(0, 4), vec![MultiIndex::zero()]);
        assert!(enumerate_mset(1, 0).is_empty());
        assert!(enumerate_mset(0, 0).is_empty());
        assert_eq!(enumerate_mset(2, 1).len(), 4);
    }

    #[test]
    fn counts_match_enumeration() {
        for k in 0..=8 {
            for h in 0..=6 {
                assert_eq!(count_terms(k, h), enumerate_mset(k, h).len() as u64, "k={k} h={h}");
            }
        }
        assert_eq!(count_terms(1, 1), 2);
        assert_eq!(count_terms(0, 3), 1);
    }

    #[test]
    fn factors_and_indices() {
        assert_eq!(a_factor(&mi(&[3])), rat(1, 8));
        assert_eq!(a_factor(&mi(&[1, 0, 1])), rat(5, 4));
        assert_eq!(a_factor(&MultiIndex::zero()), rat(1, 1));
        assert_eq!(n_index(&mi(&[2]), None), 1);
        assert_eq!(n_index(&mi(&[1, 1]), None), 2);
        assert_eq!(n_index(&mi(&[0, 1]), Some(&mi(&[1, 0]))), 2);
    }
}
