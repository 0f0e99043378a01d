use std::collections::BTreeSet;

use rayon::prelude::*;

use super::canon::canonical_form;
use super::{Diagram, DiagramError, Edge, ExternalLeg, Slot, VertexStructure};
use crate::algebra::PointLabel;
use crate::coupling::enumerate_mset;

pub fn is_excluded(k: u32, h: u32) -> bool {
    matches!((k, h), (0, 0) | (1, 0) | (2, 0) | (0, 1))
}

/// Admissible vertex structures with `h_v <= h` and weight at most `max_weight`.
pub fn vertex_structures(h: u32, max_weight: i64) -> Vec<VertexStructure> {
    let mut out = Vec::new();
    for hv in 0..=h {
        let mut n = 0u32;
        loop {
            let w = 2 * hv as i64 - 2 + n as i64;
            if w > max_weight {
                break;
            }
            if w >= 1 {
                for a in enumerate_mset(n, hv) {
                    let s = VertexStructure::new(hv, a);
                    if s.is_admissible() {
                        out.push(s);
                    }
                }
            }
            n += 1;
        }
    }
    out.sort();
    out
}

/// Nondecreasing structure multisets of total weight `2h - 2 + k` with a valid
/// half-edge count.
fn structure_multisets(k: u32, h: u32) -> Vec<Vec<VertexStructure>> {
    let total = 2 * h as i64 - 2 + k as i64;
    let structs = vertex_structures(h, total);
    let mut out = Vec::new();
    fn rec(
        structs: &[VertexStructure],
        start: usize,
        left: i64,
        cur: &mut Vec<VertexStructure>,
        out: &mut Vec<Vec<VertexStructure>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..structs.len() {
            let w = structs[i].weight();
            if w <= left {
                cur.push(structs[i].clone());
                rec(structs, i, left - w, cur, out);
                cur.pop();
            }
        }
    }
    rec(&structs, 0, total, &mut Vec::new(), &mut out);
    out.retain(|vs| {
        let legs: i64 = vs.iter().map(|v| v.legs() as i64).sum();
        let internal = legs - k as i64;
        if internal < 0 || internal % 2 != 0 {
            return false;
        }
        // a zero-leg vertex can only stand alone
        vs.len() == 1 || vs.iter().all(|v| v.legs() > 0)
    });
    out
}

struct Builder<'a> {
    vertices: &'a [VertexStructure],
    /// index of the first vertex in each vertex's structure block
    block_start: Vec<usize>,
    slots: Vec<Slot>,
    labels: Vec<PointLabel>,
}

impl Builder<'_> {
    fn assign_externals(
        &self,
        leg: u32,
        caps: &mut Vec<u32>,
        used: &mut Vec<bool>,
        ext: &mut Vec<ExternalLeg>,
        sink: &mut dyn FnMut(&[u32], &[ExternalLeg]),
    ) {
        if leg as usize == self.labels.len() {
            sink(caps, ext);
            return;
        }
        for (si, slot) in self.slots.iter().enumerate() {
            if caps[si] == 0 {
                continue;
            }
            // within a block, fresh vertices are opened in index order
            let v = slot.v;
            if !used[v] && v > self.block_start[v] && !used[v - 1] {
                continue;
            }
            caps[si] -= 1;
            let was = used[v];
            used[v] = true;
            ext.push(ExternalLeg { label: self.labels[leg as usize].clone(), v, m: slot.f });
            self.assign_externals(leg + 1, caps, used, ext, sink);
            ext.pop();
            used[v] = was;
            caps[si] += 1;
        }
    }

    fn match_internal(
        &self,
        caps: &mut Vec<u32>,
        min_partner: usize,
        edges: &mut Vec<Edge>,
        sink: &mut dyn FnMut(&[Edge]),
    ) {
        let first = match caps.iter().position(|&c| c > 0) {
            None => {
                sink(edges);
                return;
            }
            Some(i) => i,
        };
        let start = min_partner.max(first);
        for t in start..self.slots.len() {
            let need = if t == first { 2 } else { 1 };
            if caps[t] < need || (t != first && caps[first] == 0) {
                continue;
            }
            caps[first] -= 1;
            caps[t] -= 1;
            edges.push(Edge::new(self.slots[first], self.slots[t]));
            // next pair with the same first slot must not go back
            let next_min = if caps[first] > 0 { t } else { 0 };
            self.match_internal(caps, next_min, edges, sink);
            edges.pop();
            caps[first] += 1;
            caps[t] += 1;
        }
    }
}

/// Runs `sink` once per vertex-structure multiset with that multiset's
/// canonical, deduplicated diagrams. Groups never share a diagram.
pub fn for_each_structure_group<F>(k: u32, h: u32, sink: F) -> Result<(), DiagramError>
where
    F: Fn(Vec<Diagram>) + Sync,
{
    if is_excluded(k, h) {
        return Err(DiagramError::ExcludedCase(k, h));
    }
    structure_multisets(k, h).into_par_iter().for_each(|vs| sink(group_diagrams(k, &vs)));
    Ok(())
}

fn group_diagrams(k: u32, vertices: &[VertexStructure]) -> Vec<Diagram> {
    let mut block_start = vec![0; vertices.len()];
    for v in 1..vertices.len() {
        block_start[v] = if vertices[v] == vertices[v - 1] { block_start[v - 1] } else { v };
    }
    let mut slots = Vec::new();
    let mut caps = Vec::new();
    for (v, s) in vertices.iter().enumerate() {
        for (f, &a) in s.alpha.entries().iter().enumerate() {
            if a > 0 {
                slots.push(Slot::new(v, f as u32));
                caps.push(a);
            }
        }
    }
    let labels = (1..=k as usize).map(PointLabel::leg).collect();
    let b = Builder { vertices, block_start, slots, labels };
    let mut unique: Vec<Diagram> = Vec::new();
    let mut found: BTreeSet<Diagram> = BTreeSet::new();
    let mut used = vec![false; vertices.len()];
    b.assign_externals(0, &mut caps, &mut used, &mut Vec::new(), &mut |caps_left, ext| {
        // With a leg on every vertex the leg-ordered labeling is already
        // canonical and distinct edge sets are non-isomorphic.
        let all_legged = (0..b.vertices.len()).all(|v| ext.iter().any(|x| x.v == v));
        let mut caps = caps_left.to_vec();
        b.match_internal(&mut caps, 0, &mut Vec::new(), &mut |edges| {
            if !connected(b.vertices.len(), edges) {
                return;
            }
            let d = Diagram { vertices: b.vertices.to_vec(), edges: edges.to_vec(), external: ext.to_vec() };
            if all_legged {
                unique.push(d);
            } else {
                found.insert(canonical_form(&d));
            }
        });
    });
    unique.extend(found);
    unique.sort_unstable();
    unique
}

fn connected(n: usize, edges: &[Edge]) -> bool {
    if n > 64 {
        return super::is_connected(n, edges);
    }
    let mut reach = 1u64;
    loop {
        let before = reach;
        for e in edges {
            if reach >> e.a.v & 1 == 1 || reach >> e.b.v & 1 == 1 {
                reach |= 1 << e.a.v | 1 << e.b.v;
            }
        }
        if reach == before {
            return reach.count_ones() as usize == n;
        }
    }
}

/// All connected diagrams with `k` labeled legs and `l + Σ h_j = h`, sorted.
pub fn enumerate_diagrams(k: u32, h: u32) -> Result<Vec<Diagram>, DiagramError> {
    let all = std::sync::Mutex::new(Vec::new());
    for_each_structure_group(k, h, |g| all.lock().unwrap().extend(g))?;
    let mut all = all.into_inner().unwrap();
    all.sort();
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn excluded_cases() {
        for (k, h) in [(0, 0), (1, 0), (2, 0), (0, 1)] {
            assert_eq!(enumerate_diagrams(k, h), Err(DiagramError::ExcludedCase(k, h)));
        }
    }

    #[test]
    fn small_catalog_sizes() {
        assert_eq!(enumerate_diagrams(3, 0).unwrap().len(), 1);
        assert_eq!(enumerate_diagrams(1, 1).unwrap().len(), 3);
        assert_eq!(enumerate_diagrams(2, 1).unwrap().len(), 14);
        assert_eq!(enumerate_diagrams(0, 2).unwrap().len(), 14);
    }

    #[test]
    fn catalog_diagrams_are_well_formed() {
        for (k, h) in [(4, 0), (1, 1), (2, 1), (0, 2), (1, 2), (3, 1)] {
            for d in enumerate_diagrams(k, h).unwrap() {
                assert!(d.is_well_formed(), "{d:?}");
                assert!(d.is_connected());
                assert_eq!(d.order(), h as i64);
                assert!(d.loops() >= 0);
                assert_eq!(d.external.len(), k as usize);
            }
        }
    }
}
