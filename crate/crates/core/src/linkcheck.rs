//! Local admissibility of partial surfaces encoded as cell complexes.

use std::collections::BTreeMap;

use crate::cellalg::{CellComplex, EdgeId, EdgeKind, Letter};
use crate::complex::Vertex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    AdmissibleIncomplete,
    Violating,
}

impl Status {
    pub fn admissible(self) -> bool {
        self != Status::Violating
    }
}

/// Shape of the corner graph around a vertex. Path entries list the end letters, as entering `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CornerShape {
    Empty,
    Paths(Vec<(Letter, Letter)>),
    Cycle,
    Violating,
}

/// Nodes are oriented edge-ends entering `v`; each corner `x y` with `head(x) = v` joins `x` and `y^-1`.
pub fn corner_shape(cc: &CellComplex, v: Vertex) -> CornerShape {
    let mut adj: BTreeMap<Letter, Vec<Letter>> = BTreeMap::new();
    for f in &cc.faces {
        for c in &f.comps {
            let n = c.len();
            for i in 0..n {
                let (x, y) = (c[i], c[(i + 1) % n]);
                if cc.head(x) != Some(v) {
                    continue;
                }
                let yi = y.inverse();
                adj.entry(x).or_default().push(yi);
                adj.entry(yi).or_default().push(x);
            }
        }
    }
    if adj.is_empty() {
        return CornerShape::Empty;
    }
    if adj.values().any(|a| a.len() > 2) {
        return CornerShape::Violating;
    }
    let mut seen: BTreeMap<Letter, bool> = adj.keys().map(|&k| (k, false)).collect();
    let mut paths = Vec::new();
    let mut cycles = 0;
    let nodes: Vec<Letter> = adj.keys().copied().collect();
    for &start in &nodes {
        if seen[&start] {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start, true);
        let mut i = 0;
        while i < comp.len() {
            for &y in &adj[&comp[i]] {
                if !seen[&y] {
                    seen.insert(y, true);
                    comp.push(y);
                }
            }
            i += 1;
        }
        let ends: Vec<Letter> = comp.iter().copied().filter(|x| adj[x].len() == 1).collect();
        match ends.len() {
            0 => cycles += 1,
            2 => paths.push((ends[0], ends[1])),
            _ => return CornerShape::Violating,
        }
    }
    match (cycles, paths.is_empty()) {
        (0, _) => CornerShape::Paths(paths),
        (1, true) => CornerShape::Cycle,
        _ => CornerShape::Violating,
    }
}

/// Status of vertex `v`; `is_boundary_edge` tells which real edges belong to the prescribed boundary.
pub fn vertex_link_status(cc: &CellComplex, v: Vertex, in_boundary: bool, is_boundary_edge: &dyn Fn(Vertex, Vertex) -> bool) -> Status {
    let ends_ok = |l: Letter| match cc.edges[l.edge as usize] {
        EdgeKind::Real { u, v } => is_boundary_edge(u, v),
        EdgeKind::BoundaryDummy { .. } => true,
        EdgeKind::InteriorDummy { .. } => false,
    };
    match corner_shape(cc, v) {
        CornerShape::Empty if !in_boundary => Status::Complete,
        CornerShape::Cycle if !in_boundary => Status::Complete,
        CornerShape::Paths(p) if in_boundary && p.len() == 1 && ends_ok(p[0].0) && ends_ok(p[0].1) => Status::Complete,
        CornerShape::Empty | CornerShape::Paths(_) => Status::AdmissibleIncomplete,
        CornerShape::Cycle | CornerShape::Violating => Status::Violating,
    }
}

pub fn edge_multiplicity(cc: &CellComplex, e: EdgeId) -> usize {
    cc.letters().filter(|l| l.edge == e).count()
}

pub fn edge_status(cc: &CellComplex, a: Vertex, b: Vertex, in_boundary: bool) -> Status {
    let m = cc.find_real(a, b).map_or(0, |e| edge_multiplicity(cc, e));
    match (in_boundary, m) {
        (true, 1) => Status::Complete,
        (true, 0) => Status::AdmissibleIncomplete,
        (false, 0 | 2) => Status::Complete,
        (false, 1) => Status::AdmissibleIncomplete,
        _ => Status::Violating,
    }
}
