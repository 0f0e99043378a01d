//! Connected decorated multigraphs, their symmetry factors and the correlators they assemble.

mod assemble;
mod canon;
mod enumerate;
mod render;
mod symmetry;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble_sd, correlator};
pub use canon::canonical_form;
pub use enumerate::{enumerate_diagrams, for_each_structure_group, is_excluded, vertex_structures};
pub use render::{catalog_json, render_catalog_dot, render_dot};
pub use symmetry::{automorphism_count, symmetry_factor, SymFactor};

use crate::algebra::{AlgebraError, PointLabel};
use crate::coupling::{CouplingError, MultiIndex};

/// `μ = (h, α)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexStructure {
    pub h: u32,
    pub alpha: MultiIndex,
}

impl VertexStructure {
    pub fn new(h: u32, alpha: MultiIndex) -> Self {
        VertexStructure { h, alpha }
    }

    pub fn legs(&self) -> u32 {
        self.alpha.valence()
    }

    /// `2h - 2 + n`, positive for every admissible vertex.
    pub fn weight(&self) -> i64 {
        2 * self.h as i64 - 2 + self.legs() as i64
    }

    pub fn is_admissible(&self) -> bool {
        let k = self.legs();
        let min_legs = match self.h {
            0 => 3,
            1 => 1,
            _ => 0,
        };
        k >= min_legs && self.alpha.is_member(k, self.h)
    }
}

impl fmt::Display for VertexStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.h, self.alpha)
    }
}

/// A half-edge class: vertex `v`, derivative order `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Slot {
    pub v: usize,
    pub f: u32,
}

impl Slot {
    pub fn new(v: usize, f: u32) -> Self {
        Slot { v, f }
    }
}

/// Internal line; endpoints stored with `a <= b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: Slot,
    pub b: Slot,
}

impl Edge {
    pub fn new(x: Slot, y: Slot) -> Self {
        if x <= y {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.a.v == self.b.v
    }

    /// Both ends in the same half-edge class.
    pub fn is_self_slot(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExternalLeg {
    pub label: PointLabel,
    pub v: usize,
    pub m: u32,
}

/// Vertices are kept sorted by structure; `external[n]` is the leg at `p{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    pub vertices: Vec<VertexStructure>,
    pub edges: Vec<Edge>,
    pub external: Vec<ExternalLeg>,
}

impl Diagram {
    pub fn loops(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + 1
    }

    /// `l + Σ h_j`.
    pub fn order(&self) -> i64 {
        self.loops() + self.vertices.iter().map(|v| v.h as i64).sum::<i64>()
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.vertices.len(), &self.edges)
    }

    /// Derivative orders of all half-edges at `v`, ascending.
    pub fn half_edge_orders(&self, v: usize) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for e in &self.edges {
            for s in [e.a, e.b] {
                if s.v == v {
                    out.push(s.f);
                }
            }
        }
        out.extend(self.external.iter().filter(|x| x.v == v).map(|x| x.m));
        out.sort_unstable();
        out
    }

    /// Every vertex's half-edge orders reproduce its `α`, and structures are admissible.
    pub fn is_well_formed(&self) -> bool {
        self.vertices
            .iter()
            .enumerate()
            .all(|(v, s)| s.is_admissible() && MultiIndex::from_orders(self.half_edge_orders(v)) == s.alpha)
    }
}

pub(crate) fn is_connected(n: usize, edges: &[Edge]) -> bool {
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    let mut comps = n;
    for e in edges {
        let (ra, rb) = (find(&mut parent, e.a.v), find(&mut parent, e.b.v));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps == 1
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagramError {
    #[error("(k,h) = ({0},{1}) is one of the four special cases outside the diagram expansion")]
    ExcludedCase(u32, u32),
    #[error(transparent)]
    Coupling(#[from] CouplingError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
