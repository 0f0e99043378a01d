//! Published reference data shipped with the crate.

const LAMBDA: [(u32, &str); 4] = [
    (2, include_str!("../../data/lambda_2.txt")),
    (3, include_str!("../../data/lambda_3.txt")),
    (4, include_str!("../../data/lambda_4.txt")),
    (5, include_str!("../../data/lambda_5.txt")),
];

const TERM_COUNTS: &str = include_str!("../../data/term_counts.csv");

/// Canonical text of the tabulated `λ^(h)`, comment header included.
pub fn published_lambda_text(h: u32) -> Option<&'static str> {
    LAMBDA.iter().find(|(o, _)| *o == h).map(|(_, t)| *t)
}

pub fn published_orders() -> impl Iterator<Item = u32> {
    LAMBDA.iter().map(|(h, _)| *h)
}

/// `(h, number of terms of λ^(h))` for `h = 2..=10`.
pub fn published_term_counts() -> Vec<(u32, usize)> {
    TERM_COUNTS
        .lines()
        .skip(1)
        .filter_map(|l| {
            let (h, c) = l.split_once(',')?;
            Some((h.trim().parse().ok()?, c.trim().parse().ok()?))
        })
        .collect()
}

/// Expected weight multisets of the (0,2) and (2,1) catalogs, as `(numerator, denominator, count)`.
pub const FREE_ENERGY_2_WEIGHTS: [(i64, i64, usize); 4] = [(1, 1, 4), (1, 2, 7), (1, 8, 2), (1, 12, 1)];
pub const W2_1_WEIGHTS: [(i64, i64, usize); 2] = [(1, 1, 9), (1, 2, 5)];
