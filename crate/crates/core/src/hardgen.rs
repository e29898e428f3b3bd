//! Hard instances: a reduction from vertex-disjoint directed cycle packing to subsurface problems.
//!
//! Every digraph vertex becomes a ring of cylinders that can only be closed off through one
//! incoming and one outgoing edge gadget. Junctions where three cylinders meet along a circle
//! carry a pinched vertex so that the edge cylinder and the pass-through cylinder never both
//! appear in a surface. Closed subsurfaces are then exactly disjoint unions of tori, one per
//! directed cycle in a vertex-disjoint family.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{build_complex, complex_boundary, hasse_diagram, Simplex, SimplicialComplex, SurfaceSummary, Vertex};
use crate::decomp::{validate_td, TreeDecomposition};
use crate::dpengine::ProblemSpec;
use crate::oracle::{search_subsurfaces, BoundaryRule, Digraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HardgenError {
    #[error("path decomposition is invalid: {0}")]
    InvalidNpd(String),
    #[error("gadget template {0} failed verification")]
    Gadget(&'static str),
    #[error("emitted path decomposition is invalid: {0}")]
    OutputDecomposition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NpdOp {
    Introduce(usize),
    Forget(usize),
}

/// A nice path decomposition of a digraph: an empty leaf bag followed by one bag per operation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Npd {
    pub ops: Vec<NpdOp>,
}

impl Npd {
    pub fn bags(&self) -> Vec<BTreeSet<usize>> {
        let mut cur = BTreeSet::new();
        let mut out = vec![cur.clone()];
        for op in &self.ops {
            match *op {
                NpdOp::Introduce(v) => cur.insert(v),
                NpdOp::Forget(v) => cur.remove(&v),
            };
            out.push(cur.clone());
        }
        out
    }

    pub fn width(&self) -> isize {
        self.bags().iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    pub fn validate(&self, d: &Digraph) -> Result<(), HardgenError> {
        let err = |m: String| Err(HardgenError::InvalidNpd(m));
        let mut intro = vec![None; d.n];
        let mut forget = vec![None; d.n];
        for (i, op) in self.ops.iter().enumerate() {
            match *op {
                NpdOp::Introduce(v) if v < d.n && intro[v].is_none() => intro[v] = Some(i),
                NpdOp::Forget(v) if v < d.n && intro[v].is_some() && forget[v].is_none() => forget[v] = Some(i),
                op => return err(format!("operation {op:?} at step {i} is out of order")),
            }
        }
        if let Some(v) = forget.iter().position(Option::is_none) {
            return err(format!("vertex {v} is never forgotten"));
        }
        for &(u, v) in &d.edges {
            let overlap = intro[u].unwrap().max(intro[v].unwrap()) < forget[u].unwrap().min(forget[v].unwrap());
            if !overlap {
                return err(format!("edge ({u}, {v}) has no common bag"));
            }
        }
        Ok(())
    }
}

/// Introduces all vertices in id order, then forgets them in id order.
pub fn trivial_npd(d: &Digraph) -> Npd {
    let mut ops: Vec<NpdOp> = (0..d.n).map(NpdOp::Introduce).collect();
    ops.extend((0..d.n).map(NpdOp::Forget));
    Npd { ops }
}

/// Introduces vertices in id order and forgets each as soon as all its neighbours have been introduced.
pub fn greedy_npd(d: &Digraph) -> Npd {
    let mut nbrs = vec![BTreeSet::new(); d.n];
    for &(u, v) in &d.edges {
        nbrs[u].insert(v);
        nbrs[v].insert(u);
    }
    let mut ops = Vec::new();
    let mut bag = BTreeSet::new();
    for v in 0..d.n {
        ops.push(NpdOp::Introduce(v));
        bag.insert(v);
        let done: Vec<usize> = bag.iter().copied().filter(|&x| nbrs[x].iter().all(|&y| y <= v)).collect();
        for x in done {
            ops.push(NpdOp::Forget(x));
            bag.remove(&x);
        }
    }
    Npd { ops }
}

/// The supplied decomposition when valid, otherwise the narrower of the two heuristics.
pub fn choose_npd(d: &Digraph, supplied: Option<&Npd>) -> Result<Npd, HardgenError> {
    if let Some(p) = supplied {
        p.validate(d)?;
        return Ok(p.clone());
    }
    let g = greedy_npd(d);
    if g.validate(d).is_ok() && g.width() <= trivial_npd(d).width() {
        Ok(g)
    } else {
        Ok(trivial_npd(d))
    }
}

type Circle = [Vertex; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// Flow leaves the vertex ring here (outgoing edges).
    Out,
    /// Flow enters the vertex ring here (incoming edges).
    In,
}

#[derive(Default)]
struct Gen {
    next: Vertex,
    tris: Vec<Simplex>,
}

impl Gen {
    fn circle(&mut self) -> Circle {
        let c = [self.next, self.next + 1, self.next + 2];
        self.next += 3;
        c
    }

    fn circle_through(&mut self, s: Vertex) -> Circle {
        let c = [s, self.next, self.next + 1];
        self.next += 2;
        c
    }

    /// Annulus between two disjoint circles; induced orientation runs along `a` and against `b`.
    fn band(&mut self, a: Circle, b: Circle) -> Vec<Simplex> {
        let mut out = Vec::with_capacity(6);
        for i in 0..3 {
            let j = (i + 1) % 3;
            out.push(Simplex::triangle(a[i], a[j], b[i]));
            out.push(Simplex::triangle(a[j], b[i], b[j]));
        }
        self.tris.extend(&out);
        out
    }

    fn cylinder(&mut self, circles: &[Circle]) -> Vec<Simplex> {
        circles.windows(2).flat_map(|w| self.band(w[0], w[1])).collect()
    }
}

/// The pieces of one junction: three cylinders meeting along `j`.
struct Junction {
    /// Cylinder from `j` out to the shared middle circle of the edge gadget.
    x1: Vec<Simplex>,
    /// Cylinder from `j` back to the previous open circle.
    x2: Vec<Simplex>,
    /// Cylinder from `j` to the new open circle.
    x3: Vec<Simplex>,
    open: Circle,
}

/// Builds a junction attached to `old`, whose edge cylinder ends at `mid`.
/// On the outgoing side flow runs `open -> j -> old | mid`; on the incoming side `old | mid -> j -> open`.
fn junction(g: &mut Gen, side: Side, old: Circle, mid: Circle) -> Junction {
    let j = g.circle();
    let open = g.circle();
    let s = g.next;
    g.next += 1;
    let c1 = g.circle();
    let c2 = g.circle_through(s);
    let d1 = g.circle();
    let d2 = g.circle_through(s);
    match side {
        Side::Out => Junction { x3: g.cylinder(&[open, j]), x2: g.cylinder(&[j, c1, c2, old]), x1: g.cylinder(&[j, d1, d2, mid]), open },
        Side::In => Junction { x2: g.cylinder(&[old, c2, c1, j]), x1: g.cylinder(&[mid, d2, d1, j]), x3: g.cylinder(&[j, open]), open },
    }
}

fn set_of(tris: &[Simplex]) -> BTreeSet<Simplex> {
    tris.iter().copied().collect()
}

/// Checks that the only surfaces inside a template whose boundary lies on the template boundary
/// are the expected ones.
fn inventory_matches(template: &[Simplex], expected: &[Vec<Simplex>]) -> bool {
    let k = build_complex(template);
    let bd = complex_boundary(&k);
    let found: BTreeSet<BTreeSet<Simplex>> = search_subsurfaces(&k, &BoundaryRule::Within(bd))
        .into_iter()
        .filter(|s| !s.triangles.is_empty())
        .map(|s| set_of(&s.triangles))
        .collect();
    let want: BTreeSet<BTreeSet<Simplex>> = expected.iter().map(|e| set_of(e)).collect();
    found == want
}

/// Verifies the four gadget templates for both junction orientations:
/// a cylinder; two cylinders pinched at a vertex; three cylinders on one circle; and the full junction.
pub fn verify_gadget_properties() -> Result<(), HardgenError> {
    static RESULT: OnceLock<Result<(), HardgenError>> = OnceLock::new();
    RESULT.get_or_init(verify_templates).clone()
}

fn verify_templates() -> Result<(), HardgenError> {
    for side in [Side::Out, Side::In] {
        let mut g = Gen::default();
        let (a, b, c) = (g.circle(), g.circle(), g.circle());
        let s1 = g.cylinder(&[a, b, c]);
        if !inventory_matches(&s1, std::slice::from_ref(&s1)) {
            return Err(HardgenError::Gadget("cylinder"));
        }
        let mut g = Gen::default();
        let (old, mid) = (g.circle(), g.circle());
        let jn = junction(&mut g, side, old, mid);
        let verts = |x: &[Simplex]| -> BTreeSet<Vertex> { x.iter().flat_map(|t| t.vertices().to_vec()).collect() };
        let jverts: BTreeSet<Vertex> = verts(&jn.x1).intersection(&verts(&jn.x3)).copied().collect();
        let near = |t: &Simplex| t.vertices().iter().any(|v| jverts.contains(v));
        let split = |x: &[Simplex]| -> (Vec<Simplex>, Vec<Simplex>) { x.iter().partition(|t| near(t)) };
        let (x1n, x1f) = split(&jn.x1);
        let (x2n, x2f) = split(&jn.x2);
        let s2: Vec<Simplex> = x1f.iter().chain(&x2f).copied().collect();
        if !inventory_matches(&s2, &[x1f.clone(), x2f.clone()]) {
            return Err(HardgenError::Gadget("pinched pair"));
        }
        let s3: Vec<Simplex> = x1n.iter().chain(&x2n).chain(&jn.x3).copied().collect();
        let pair = |a: &[Simplex], b: &[Simplex]| a.iter().chain(b).copied().collect::<Vec<_>>();
        if !inventory_matches(&s3, &[pair(&x1n, &x2n), pair(&x1n, &jn.x3), pair(&x2n, &jn.x3)]) {
            return Err(HardgenError::Gadget("three cylinders on a circle"));
        }
        let s4: Vec<Simplex> = jn.x1.iter().chain(&jn.x2).chain(&jn.x3).copied().collect();
        if !inventory_matches(&s4, &[pair(&jn.x1, &jn.x3), pair(&jn.x2, &jn.x3)]) {
            return Err(HardgenError::Gadget("junction"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct HardInstance {
    pub complex: SimplicialComplex,
    pub npd: Npd,
    /// Triangles of the edge cylinder for each digraph edge, in input order.
    pub edge_gadgets: Vec<Vec<Simplex>>,
    /// Triangles of each vertex ring, including its junction pieces.
    pub vertex_gadgets: Vec<Vec<Simplex>>,
    /// Path decomposition of the Hasse diagram of `complex`, following the construction order.
    pub path_decomposition: TreeDecomposition,
    pub ell: u32,
}

impl HardInstance {
    pub fn sp_spec(&self) -> ProblemSpec {
        ProblemSpec::Sp { components: self.ell }
    }

    pub fn sog_spec(&self) -> ProblemSpec {
        ProblemSpec::Sog { genus: self.ell, components: self.ell }
    }

    pub fn sr_spec(&self) -> ProblemSpec {
        ProblemSpec::Sr { targets: vec![SurfaceSummary::new(true, 1, 0); self.ell as usize] }
    }
}

struct Ring {
    a_open: Circle,
    b_open: Circle,
    tris: Vec<Simplex>,
}

/// Builds the complex whose closed subsurfaces correspond to vertex-disjoint cycle families of `d`.
pub fn reduce_dcp(d: &Digraph, npd: Option<&Npd>, ell: u32) -> Result<HardInstance, HardgenError> {
    verify_gadget_properties()?;
    let npd = choose_npd(d, npd)?;
    let mut g = Gen::default();
    let mut rings: BTreeMap<usize, Ring> = BTreeMap::new();
    let mut finished: Vec<Vec<Simplex>> = vec![Vec::new(); d.n];
    let mut edge_gadgets: Vec<Vec<Simplex>> = vec![Vec::new(); d.edges.len()];
    let mut forgotten = vec![false; d.n];
    let mut steps: Vec<(Vec<Simplex>, Vec<Circle>)> = Vec::new();
    let open_circles = |rings: &BTreeMap<usize, Ring>| -> Vec<Circle> { rings.values().flat_map(|r| [r.a_open, r.b_open]).collect() };

    for op in &npd.ops {
        match *op {
            NpdOp::Introduce(w) => {
                let start = g.tris.len();
                let others: Vec<usize> = rings.keys().copied().collect();
                for x in others {
                    let (na, nb) = (g.circle(), g.circle());
                    let r = &rings[&x];
                    let (ao, bo) = (r.a_open, r.b_open);
                    let mut t = g.cylinder(&[ao, na]);
                    t.extend(g.cylinder(&[nb, bo]));
                    let r = rings.get_mut(&x).unwrap();
                    r.tris.extend(t);
                    r.a_open = na;
                    r.b_open = nb;
                }
                let (fa, a, b, fb) = (g.circle(), g.circle(), g.circle(), g.circle());
                let mut tris = g.cylinder(&[fa, a]);
                tris.extend(g.cylinder(&[b, fb]));
                rings.insert(w, Ring { a_open: a, b_open: b, tris });
                steps.push((g.tris[start..].to_vec(), open_circles(&rings)));
            }
            NpdOp::Forget(v) => {
                for (ei, &(x, y)) in d.edges.iter().enumerate() {
                    let other = if x == v {
                        y
                    } else if y == v {
                        x
                    } else {
                        continue;
                    };
                    if forgotten[other] || (other != v && !rings.contains_key(&other)) {
                        continue;
                    }
                    let start = g.tris.len();
                    let mid = g.circle();
                    let old_b = rings[&x].b_open;
                    let out = junction(&mut g, Side::Out, old_b, mid);
                    let old_a = rings[&y].a_open;
                    let inn = junction(&mut g, Side::In, old_a, mid);
                    edge_gadgets[ei] = out.x1.iter().chain(&inn.x1).copied().collect();
                    let rx = rings.get_mut(&x).unwrap();
                    rx.tris.extend(out.x2.iter().chain(&out.x3));
                    rx.b_open = out.open;
                    let ry = rings.get_mut(&y).unwrap();
                    ry.tris.extend(inn.x2.iter().chain(&inn.x3));
                    ry.a_open = inn.open;
                    let mut open = open_circles(&rings);
                    open.extend([old_a, old_b]);
                    steps.push((g.tris[start..].to_vec(), open));
                }
                let start = g.tris.len();
                let r = rings.remove(&v).unwrap();
                let mut tris = r.tris;
                tris.extend(g.cylinder(&[r.a_open, r.b_open]));
                finished[v] = tris;
                forgotten[v] = true;
                let mut open = open_circles(&rings);
                open.extend([r.a_open, r.b_open]);
                steps.push((g.tris[start..].to_vec(), open));
            }
        }
    }
    let complex = build_complex(&g.tris);
    let path_decomposition = path_decomposition(&complex, &steps)?;
    Ok(HardInstance { complex, npd, edge_gadgets, vertex_gadgets: finished, path_decomposition, ell })
}

fn path_decomposition(k: &SimplicialComplex, steps: &[(Vec<Simplex>, Vec<Circle>)]) -> Result<TreeDecomposition, HardgenError> {
    let h = hasse_diagram(k);
    let mut bags = Vec::new();
    for (tris, open) in steps {
        let mut set = BTreeSet::new();
        for t in tris {
            for f in t.faces() {
                set.insert(h.id(&f).unwrap());
            }
        }
        for c in open {
            for i in 0..3 {
                set.insert(h.id(&Simplex::vertex(c[i])).unwrap());
                set.insert(h.id(&Simplex::edge(c[i], c[(i + 1) % 3])).unwrap());
            }
        }
        bags.push(set.into_iter().collect());
    }
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    let td = TreeDecomposition { bags, edges };
    validate_td(&h.adj, &td).map_err(|e| HardgenError::OutputDecomposition(e.to_string()))?;
    Ok(td)
}
