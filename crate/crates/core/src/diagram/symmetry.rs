use num_bigint::BigInt;
use serde::Serialize;

use itertools::Itertools;

use super::canon::{cells, refined_colours};
use super::{Diagram, Edge, Slot};
use crate::algebra::Rational;

/// `Π_D = π_D / (c_D d_D)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymFactor {
    #[serde(serialize_with = "ser_big")]
    pub pi: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub c: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub d: BigInt,
    #[serde(serialize_with = "ser_rat")]
    pub value: Rational,
}

fn ser_big<S: serde::Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn ser_rat<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", x.numer(), x.denom()))
}

fn fact(n: u64) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `Π num_i! / (Π den_i! · 2^two)`, assumed integral.
fn factorial_ratio(num: &[u64], den: &[u64], two: u32) -> BigInt {
    fn small(num: &[u64], den: &[u64], two: u32) -> Option<u128> {
        let prod =
            |xs: &[u64]| xs.iter().try_fold(1u128, |acc, &n| (2..=n as u128).try_fold(acc, |a, k| a.checked_mul(k)));
        let d = prod(den)?.checked_mul(1u128.checked_shl(two)?)?;
        Some(prod(num)? / d)
    }
    small(num, den, two).map(BigInt::from).unwrap_or_else(|| {
        let n: BigInt = num.iter().map(|&x| fact(x)).product();
        let d: BigInt = den.iter().map(|&x| fact(x)).product();
        n / (d << two as usize)
    })
}

/// Relabelings among identical structures that map `d` onto itself. Any such
/// relabeling preserves the refined colours, so only in-cell permutations are tried.
fn vertex_stabilizer(d: &Diagram) -> u64 {
    let cs = cells(&refined_colours(d));
    if cs.iter().all(|c| c.len() == 1) {
        return 1;
    }
    let mut edges = d.edges.clone();
    edges.sort_unstable();
    let mut image = Vec::with_capacity(edges.len());
    let mut count = 0;
    let per_cell: Vec<Vec<Vec<usize>>> = cs.iter().map(|c| c.iter().copied().permutations(c.len()).collect()).collect();
    let mut perm: Vec<usize> = (0..d.vertices.len()).collect();
    for choice in per_cell.iter().map(|v| v.iter()).multi_cartesian_product() {
        for (cell, img) in cs.iter().zip(choice) {
            for (&old, &new) in cell.iter().zip(img) {
                perm[old] = new;
            }
        }
        if d.external.iter().any(|x| perm[x.v] != x.v) {
            continue;
        }
        image.clear();
        image.extend(edges.iter().map(|e| Edge::new(Slot::new(perm[e.a.v], e.a.f), Slot::new(perm[e.b.v], e.b.f))));
        image.sort_unstable();
        if image == edges {
            count += 1;
        }
    }
    count
}

/// Wick counting: `π_D` is the number of ways to pair the fields of the
/// expanded interaction that produce `d`.
///
/// Distinct vertex labelings of `d` (the orbit under relabeling identical
/// vertices) times the pairings realizing one labeled multigraph: each slot's
/// distinguishable fields are distributed over its lines, lines between two
/// slots are matched in `m!` ways and self-lines at a slot in `(2m-1)!!` ways.
pub fn symmetry_factor(d: &Diagram) -> SymFactor {
    let mut blocks: Vec<u64> = Vec::new();
    for (v, s) in d.vertices.iter().enumerate() {
        if v > 0 && d.vertices[v - 1] == *s {
            *blocks.last_mut().unwrap() += 1;
        } else {
            blocks.push(1);
        }
    }
    let c = factorial_ratio(&blocks, &[], 0);
    let alpha_orders: Vec<u64> = d.vertices.iter().flat_map(|s| s.alpha.entries().iter().map(|&a| a as u64)).collect();
    let dd = factorial_ratio(&alpha_orders, &[], 0);
    let orbit = &c / BigInt::from(vertex_stabilizer(d));

    // line multiplicities between unordered slot pairs
    let mut edges = d.edges.clone();
    edges.sort_unstable();
    let mult: Vec<(Edge, u64)> = edges.iter().dedup_with_count().map(|(m, e)| (*e, m as u64)).collect();
    // per slot: a! / Π (lines to other slots)! (2·self lines)!
    let mut num = alpha_orders;
    let mut den = Vec::new();
    let mut two = 0;
    for &(e, m) in &mult {
        if e.is_self_slot() {
            den.push(2 * m);
            // (2m-1)!! = (2m)! / (m! 2^m)
            num.push(2 * m);
            den.push(m);
            two += m as u32;
        } else {
            den.push(m);
            den.push(m);
            num.push(m);
        }
    }
    let pairings = factorial_ratio(&num, &den, two);
    let pi = orbit * pairings;
    let value = Rational::new(pi.clone(), &c * &dd);
    SymFactor { pi, c, d: dd, value }
}

#[derive(Clone, Copy)]
enum Partner {
    Internal(usize),
    External(usize),
}

/// Order of the automorphism group of the half-edge structure of `d`: vertex
/// bijections between identical structures together with half-edge bijections
/// that preserve derivative orders, lines and the labeled legs.
pub fn automorphism_count(d: &Diagram) -> u64 {
    // half-edges grouped by slot; `next_free[slot]` walks each slot's range
    let mut he_vertex = Vec::new();
    let mut he_order = Vec::new();
    let mut slot_start: Vec<Vec<usize>> = Vec::with_capacity(d.vertices.len());
    for (v, s) in d.vertices.iter().enumerate() {
        let mut starts = Vec::with_capacity(s.alpha.entries().len());
        for (f, &a) in s.alpha.entries().iter().enumerate() {
            starts.push(he_vertex.len());
            for _ in 0..a {
                he_vertex.push(v);
                he_order.push(f as u32);
            }
        }
        slot_start.push(starts);
    }
    let n = he_vertex.len();
    let mut partner: Vec<Option<Partner>> = vec![None; n];
    let mut take = |v: usize, f: u32| {
        let id = &mut slot_start[v][f as usize];
        *id += 1;
        *id - 1
    };
    for e in &d.edges {
        let x = take(e.a.v, e.a.f);
        let y = take(e.b.v, e.b.f);
        partner[x] = Some(Partner::Internal(y));
        partner[y] = Some(Partner::Internal(x));
    }
    for (leg, x) in d.external.iter().enumerate() {
        let h = take(x.v, x.m);
        partner[h] = Some(Partner::External(leg));
    }
    let partner: Vec<Partner> = partner.into_iter().map(|p| p.expect("half-edge unpaired")).collect();

    // Undo entries: a half-edge image, or a vertex image when tagged.
    #[derive(Clone, Copy)]
    enum Undo {
        HalfEdge(usize),
        Vertex(usize),
    }

    struct Search<'a> {
        d: &'a Diagram,
        he_vertex: Vec<usize>,
        he_order: Vec<u32>,
        partner: Vec<Partner>,
        img: Vec<Option<usize>>,
        used: Vec<bool>,
        vmap: Vec<Option<usize>>,
        vinv: Vec<Option<usize>>,
        log: Vec<Undo>,
    }

    impl Search<'_> {
        fn bind(&mut self, h: usize, t: usize) -> bool {
            if self.used[t] || self.he_order[h] != self.he_order[t] {
                return false;
            }
            let (v, w) = (self.he_vertex[h], self.he_vertex[t]);
            match self.vmap[v] {
                Some(x) if x != w => return false,
                Some(_) => {}
                None => {
                    if self.vinv[w].is_some() || self.d.vertices[v] != self.d.vertices[w] {
                        return false;
                    }
                    self.vmap[v] = Some(w);
                    self.vinv[w] = Some(v);
                    self.log.push(Undo::Vertex(v));
                }
            }
            self.img[h] = Some(t);
            self.used[t] = true;
            self.log.push(Undo::HalfEdge(h));
            true
        }

        fn undo_to(&mut self, mark: usize) {
            while self.log.len() > mark {
                match self.log.pop().unwrap() {
                    Undo::Vertex(v) => {
                        let w = self.vmap[v].take().unwrap();
                        self.vinv[w] = None;
                    }
                    Undo::HalfEdge(h) => {
                        let t = self.img[h].take().unwrap();
                        self.used[t] = false;
                    }
                }
            }
        }

        fn count(&mut self, mut h: usize) -> u64 {
            while h < self.img.len() && self.img[h].is_some() {
                h += 1;
            }
            if h == self.img.len() {
                return 1;
            }
            let mut total = 0;
            for t in 0..self.img.len() {
                let mark = self.log.len();
                if self.bind(h, t) {
                    let ok = match (self.partner[h], self.partner[t]) {
                        (Partner::External(a), Partner::External(b)) => a == b,
                        (Partner::Internal(q), Partner::Internal(qt)) => match self.img[q] {
                            Some(x) => x == qt,
                            None => self.bind(q, qt),
                        },
                        _ => false,
                    };
                    if ok {
                        total += self.count(h + 1);
                    }
                }
                self.undo_to(mark);
            }
            total
        }
    }

    let nv = d.vertices.len();
    let mut s = Search {
        d,
        he_vertex,
        he_order,
        partner,
        img: vec![None; n],
        used: vec![false; n],
        vmap: vec![None; nv],
        vinv: vec![None; nv],
        log: Vec::with_capacity(2 * n),
    };
    s.count(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PointLabel;
    use crate::coupling::MultiIndex;
    use crate::diagram::{enumerate_diagrams, Edge, ExternalLeg, Slot, VertexStructure};

    fn tadpole() -> Diagram {
        Diagram {
            vertices: vec![VertexStructure::new(0, MultiIndex::new(vec![3]))],
            edges: vec![Edge::new(Slot::new(0, 0), Slot::new(0, 0))],
            external: vec![ExternalLeg { label: PointLabel::leg(1), v: 0, m: 0 }],
        }
    }

    #[test]
    fn trivalent_tadpole() {
        let s = symmetry_factor(&tadpole());
        assert_eq!(s.pi, BigInt::from(3));
        assert_eq!(s.c, BigInt::from(1));
        assert_eq!(s.d, BigInt::from(6));
        assert_eq!(s.value, crate::algebra::rat(1, 2));
        assert_eq!(automorphism_count(&tadpole()), 2);
    }

    #[test]
    fn routes_agree_on_small_catalogs() {
        for (k, h) in [(3, 0), (4, 0), (5, 0), (1, 1), (2, 1), (3, 1), (0, 2), (1, 2), (0, 3)] {
            for d in enumerate_diagrams(k, h).unwrap() {
                let s = symmetry_factor(&d);
                let aut = automorphism_count(&d);
                assert_eq!(s.value, Rational::new(BigInt::from(1), BigInt::from(aut)), "{d:?}");
            }
        }
    }
}
