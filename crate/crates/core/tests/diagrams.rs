use std::collections::BTreeMap;

use mmlag_core::algebra::rat;
use mmlag_core::diagram::{
    automorphism_count, canonical_form, catalog_json, enumerate_diagrams, symmetry_factor, Diagram, Edge, ExternalLeg,
    Slot,
};
use mmlag_core::verify::{golden, worked_free_energy_diagram, worked_two_point_diagram};
use mmlag_core::Rational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn weights(k: u32, h: u32) -> BTreeMap<Rational, usize> {
    let mut m = BTreeMap::new();
    for d in enumerate_diagrams(k, h).unwrap() {
        *m.entry(symmetry_factor(&d).value).or_insert(0) += 1;
    }
    m
}

#[test]
fn catalog_sizes() {
    let expected = [
        ((3, 0), 1),
        ((4, 0), 8),
        ((5, 0), 86),
        ((1, 1), 3),
        ((2, 1), 14),
        ((3, 1), 106),
        ((0, 2), 14),
        ((1, 2), 76),
        ((0, 3), 282),
    ];
    for ((k, h), n) in expected {
        assert_eq!(enumerate_diagrams(k, h).unwrap().len(), n, "({k},{h})");
    }
}

#[test]
fn catalog_weight_multisets() {
    for (k, h, table) in [(0, 2, &golden::FREE_ENERGY_2_WEIGHTS[..]), (2, 1, &golden::W2_1_WEIGHTS[..])] {
        let want: BTreeMap<Rational, usize> = table.iter().map(|&(n, d, c)| (rat(n, d), c)).collect();
        assert_eq!(weights(k, h), want, "({k},{h})");
    }
}

#[test]
fn tree_level_four_point_weights() {
    // labeled legs leave a tree no symmetry
    let w = weights(4, 0);
    assert!(w.keys().all(|v| *v == rat(1, 1)));
}

#[test]
fn worked_examples() {
    let f = worked_free_energy_diagram();
    assert_eq!(symmetry_factor(&f).value, rat(1, 2));
    assert_eq!(automorphism_count(&f), 2);
    let w = worked_two_point_diagram();
    assert_eq!(symmetry_factor(&w).value, rat(1, 1));
    assert_eq!(automorphism_count(&w), 1);
}

#[test]
fn catalog_json_shape() {
    let json = catalog_json(&enumerate_diagrams(0, 2).unwrap());
    let arr = json.as_array().unwrap();
    assert_eq!(arr.len(), 14);
    for d in arr {
        for key in ["vertices", "internal_edges", "external", "pi", "c", "d", "weight"] {
            assert!(d.get(key).is_some(), "{key}");
        }
    }
    assert_eq!(
        serde_json::to_string(&json).unwrap(),
        serde_json::to_string(&catalog_json(&enumerate_diagrams(0, 2).unwrap())).unwrap()
    );
}

fn relabel(d: &Diagram, perm: &[usize]) -> Diagram {
    let mut vertices = d.vertices.clone();
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = d.vertices[old].clone();
    }
    let mut edges: Vec<Edge> =
        d.edges.iter().map(|e| Edge::new(Slot::new(perm[e.a.v], e.a.f), Slot::new(perm[e.b.v], e.b.f))).collect();
    edges.sort();
    let external = d.external.iter().map(|x| ExternalLeg { label: x.label.clone(), v: perm[x.v], m: x.m }).collect();
    Diagram { vertices, edges, external }
}

fn catalog_member() -> impl Strategy<Value = Diagram> {
    let cases: Vec<Diagram> = [(6, 0), (4, 1), (2, 2), (1, 2), (0, 3)]
        .into_iter()
        .flat_map(|(k, h)| enumerate_diagrams(k, h).unwrap())
        .collect();
    prop::sample::select(cases)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn relabeled_copies_canonicalize_back(d in catalog_member(), seed in any::<u64>()) {
        // shuffle vertices inside each block of identical structures
        let n = d.vertices.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut x = seed;
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && d.vertices[end] == d.vertices[start] {
                end += 1;
            }
            for i in (start + 1..end).rev() {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
                let j = start + (x >> 33) as usize % (i - start + 1);
                perm.swap(i, j);
            }
            start = end;
        }
        let q = relabel(&d, &perm);
        prop_assert_eq!(canonical_form(&q), d.clone());
        prop_assert_eq!(symmetry_factor(&q).value, symmetry_factor(&d).value);
        prop_assert_eq!(automorphism_count(&q), automorphism_count(&d));
    }

    #[test]
    fn weight_is_inverse_automorphism_order(d in catalog_member()) {
        let s = symmetry_factor(&d);
        prop_assert_eq!(s.value.clone(), Rational::new(s.pi.clone(), &s.c * &s.d));
        prop_assert_eq!(s.value * BigInt::from(automorphism_count(&d)), rat(1, 1));
        prop_assert!(d.is_connected() && d.is_well_formed());
    }
}
