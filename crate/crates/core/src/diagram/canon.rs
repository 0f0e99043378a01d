use std::collections::BTreeMap;

use itertools::Itertools;

use super::{Diagram, Edge, ExternalLeg, Slot};

/// Isomorphism-invariant vertex colouring by iterated neighbourhood refinement,
/// starting from the structure classes.
pub(crate) fn refined_colours(d: &Diagram) -> Vec<usize> {
    let n = d.vertices.len();
    let mut colour: Vec<usize> = rank(&d.vertices.iter().collect::<Vec<_>>());
    let mut classes = colour.iter().copied().max().map_or(0, |m| m + 1);
    let mut adj: Vec<Vec<(u32, usize, u32)>> = vec![Vec::new(); n];
    for e in &d.edges {
        adj[e.a.v].push((e.a.f, e.b.v, e.b.f));
        adj[e.b.v].push((e.b.f, e.a.v, e.a.f));
    }
    // externals carry leg numbers, which are part of the invariant
    let mut ext: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for (idx, x) in d.external.iter().enumerate() {
        ext[x.v].push((idx, x.m));
    }
    let mut nb: Vec<Vec<(u32, usize, u32)>> = vec![Vec::new(); n];
    loop {
        for v in 0..n {
            nb[v].clear();
            nb[v].extend(adj[v].iter().map(|&(f, w, g)| (f, colour[w], g)));
            nb[v].sort_unstable();
        }
        let sigs: Vec<_> = (0..n).map(|v| (colour[v], &ext[v], &nb[v])).collect();
        let next = rank(&sigs);
        let next_classes = next.iter().copied().max().map_or(0, |m| m + 1);
        colour = next;
        if next_classes == classes {
            return colour;
        }
        classes = next_classes;
    }
}

fn rank<T: Ord>(items: &[T]) -> Vec<usize> {
    let distinct: Vec<&T> = items.iter().sorted().dedup().collect();
    items.iter().map(|x| distinct.binary_search(&x).unwrap()).collect()
}

/// Applies `perm` (old index -> new index) and re-sorts.
pub(crate) fn relabel(d: &Diagram, perm: &[usize]) -> Diagram {
    let mut vertices = d.vertices.clone();
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = d.vertices[old].clone();
    }
    let mut edges: Vec<Edge> =
        d.edges.iter().map(|e| Edge::new(Slot::new(perm[e.a.v], e.a.f), Slot::new(perm[e.b.v], e.b.f))).collect();
    edges.sort_unstable();
    let external = d.external.iter().map(|x| ExternalLeg { label: x.label.clone(), v: perm[x.v], m: x.m }).collect();
    Diagram { vertices, edges, external }
}

/// Colour cells (old vertex indices) in colour order.
pub(crate) fn cells(colour: &[usize]) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colour.iter().enumerate() {
        by.entry(c).or_default().push(v);
    }
    by.into_values().collect()
}

/// Calls `f` with every relabeling that orders cells by colour and permutes
/// freely inside each cell.
pub(crate) fn for_each_cell_labeling(cells: &[Vec<usize>], n: usize, mut f: impl FnMut(&[usize])) {
    let mut offsets = Vec::with_capacity(cells.len());
    let mut acc = 0;
    for c in cells {
        offsets.push(acc);
        acc += c.len();
    }
    let per_cell: Vec<Vec<Vec<usize>>> =
        cells.iter().map(|c| c.iter().copied().permutations(c.len()).collect()).collect();
    let mut perm = vec![0; n];
    for choice in per_cell.iter().map(|v| v.iter()).multi_cartesian_product() {
        for (ci, order) in choice.iter().enumerate() {
            for (pos, &old) in order.iter().enumerate() {
                perm[old] = offsets[ci] + pos;
            }
        }
        f(&perm);
    }
    if cells.is_empty() {
        f(&perm);
    }
}

/// Canonical representative of the isomorphism class of `d`.
///
/// Colour cells are ordered by colour (which refines the structure order, so
/// vertices stay sorted by structure); ties inside cells are broken by the
/// lexicographically smallest relabeled diagram.
pub fn canonical_form(d: &Diagram) -> Diagram {
    let colour = refined_colours(d);
    let cs = cells(&colour);
    let mut best: Option<Diagram> = None;
    for_each_cell_labeling(&cs, d.vertices.len(), |perm| {
        let cand = relabel(d, perm);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    });
    best.unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::enumerate_diagrams;

    #[test]
    fn catalog_entries_are_fixed_points() {
        for (k, h) in [(6, 0), (4, 1), (2, 2), (0, 3)] {
            for d in enumerate_diagrams(k, h).unwrap() {
                assert_eq!(canonical_form(&d), d);
            }
        }
    }

    #[test]
    fn permuted_copies_canonicalize_back() {
        for (k, h) in [(4, 0), (5, 0), (2, 1), (0, 2), (1, 2)] {
            for d in enumerate_diagrams(k, h).unwrap() {
                let n = d.vertices.len();
                for p in (0..n).permutations(n).take(24) {
                    // only structure-preserving relabelings keep vertices sorted
                    let q = relabel(&d, &p);
                    if q.vertices != d.vertices {
                        continue;
                    }
                    assert_eq!(canonical_form(&q), d);
                }
            }
        }
    }
}
