//! Simplicial 2-complexes: construction, links, boundaries, surface checks and classification.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex must have 1 to 3 vertices, got {0}")]
    BadArity(usize),
    #[error("simplex has repeated vertex {0}")]
    RepeatedVertex(Vertex),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("not a combinatorial surface: {0}")]
    NotSurface(String),
    #[error("invalid boundary specification: {0}")]
    BadBoundary(String),
}

/// A simplex of dimension at most 2, stored as sorted vertex ids.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Simplex {
    v: [Vertex; 3],
    len: u8,
}

impl Simplex {
    pub fn new(verts: &[Vertex]) -> Result<Self, ComplexError> {
        if verts.is_empty() || verts.len() > 3 {
            return Err(ComplexError::BadArity(verts.len()));
        }
        let mut v = [0; 3];
        v[..verts.len()].copy_from_slice(verts);
        v[..verts.len()].sort_unstable();
        for w in v[..verts.len()].windows(2) {
            if w[0] == w[1] {
                return Err(ComplexError::RepeatedVertex(w[0]));
            }
        }
        Ok(Simplex { v, len: verts.len() as u8 })
    }

    pub fn vertex(a: Vertex) -> Self {
        Simplex { v: [a, 0, 0], len: 1 }
    }

    /// Panics if `a == b`.
    pub fn edge(a: Vertex, b: Vertex) -> Self {
        assert_ne!(a, b, "degenerate edge");
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        Simplex { v: [a, b, 0], len: 2 }
    }

    /// Panics on repeated vertices.
    pub fn triangle(a: Vertex, b: Vertex, c: Vertex) -> Self {
        Simplex::new(&[a, b, c]).expect("degenerate triangle")
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.v[..self.len as usize]
    }

    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    pub fn contains_vertex(&self, x: Vertex) -> bool {
        self.vertices().contains(&x)
    }

    /// Codimension-1 faces.
    pub fn facets(&self) -> Vec<Simplex> {
        let vs = self.vertices();
        if vs.len() == 1 {
            return Vec::new();
        }
        (0..vs.len())
            .map(|skip| {
                let rest: Vec<Vertex> = vs.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
                Simplex::new(&rest).unwrap()
            })
            .collect()
    }

    /// All nonempty faces including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let vs = self.vertices();
        let mut out = Vec::new();
        for mask in 1u8..(1 << vs.len()) {
            let sub: Vec<Vertex> = (0..vs.len()).filter(|i| mask >> i & 1 == 1).map(|i| vs[i]).collect();
            out.push(Simplex::new(&sub).unwrap());
        }
        out.sort();
        out
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices().iter().all(|x| other.contains_vertex(*x))
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| self.vertices().cmp(other.vertices()))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.vertices().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A finite face-closed set of simplices of dimension at most 2.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SimplicialComplex {
    simplices: BTreeSet<Simplex>,
}

impl SimplicialComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_triangles(tris: &[[Vertex; 3]]) -> Self {
        let simps: Vec<Simplex> = tris.iter().map(|t| Simplex::triangle(t[0], t[1], t[2])).collect();
        build_complex(&simps)
    }

    pub fn insert(&mut self, s: Simplex) {
        for f in s.faces() {
            self.simplices.insert(f);
        }
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.simplices.contains(s)
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplices ordered by dimension, then lexicographically.
    pub fn iter(&self) -> impl Iterator<Item = &Simplex> + '_ {
        self.simplices.iter()
    }

    pub fn of_dim(&self, d: usize) -> impl Iterator<Item = Simplex> + '_ {
        self.simplices.iter().copied().filter(move |s| s.dim() == d)
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        self.of_dim(0).map(|s| s.vertices()[0]).collect()
    }

    pub fn edges(&self) -> Vec<Simplex> {
        self.of_dim(1).collect()
    }

    pub fn triangles(&self) -> Vec<Simplex> {
        self.of_dim(2).collect()
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.iter().next_back().map(|s| s.dim())
    }

    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.simplices.is_subset(&other.simplices)
    }

    pub fn union(&self, other: &SimplicialComplex) -> SimplicialComplex {
        SimplicialComplex { simplices: self.simplices.union(&other.simplices).copied().collect() }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices.iter().map(|s| if s.dim() % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// Simplices strictly containing `s`.
    pub fn cofaces(&self, s: &Simplex) -> Vec<Simplex> {
        self.simplices.iter().filter(|t| t.len > s.len && s.is_face_of(t)).copied().collect()
    }

    /// Triangles containing `e`.
    pub fn edge_degree(&self, e: &Simplex) -> usize {
        self.of_dim(2).filter(|t| e.is_face_of(t)).count()
    }

    /// Connected components as vertex sets, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let verts = self.vertices();
        let idx: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(verts.len());
        for e in self.of_dim(1) {
            let vs = e.vertices();
            uf.union(idx[&vs[0]], idx[&vs[1]]);
        }
        let mut groups: BTreeMap<usize, Vec<Vertex>> = BTreeMap::new();
        for (i, &v) in verts.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(v);
        }
        let mut out: Vec<Vec<Vertex>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Subcomplex of simplices all of whose vertices lie in `verts`.
    pub fn induced(&self, verts: &BTreeSet<Vertex>) -> SimplicialComplex {
        SimplicialComplex { simplices: self.simplices.iter().filter(|s| s.vertices().iter().all(|v| verts.contains(v))).copied().collect() }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

/// Closure of a list of simplices.
pub fn build_complex(simplices: &[Simplex]) -> SimplicialComplex {
    let mut k = SimplicialComplex::new();
    for s in simplices {
        k.insert(*s);
    }
    k
}

/// The link of a simplex as a complex: all `t` disjoint from `s` with `s ∪ t ∈ K`.
pub fn link(k: &SimplicialComplex, s: &Simplex) -> SimplicialComplex {
    let mut out = SimplicialComplex::new();
    for t in k.cofaces(s) {
        let rest: Vec<Vertex> = t.vertices().iter().copied().filter(|x| !s.contains_vertex(*x)).collect();
        out.insert(Simplex::new(&rest).unwrap());
    }
    out
}

/// Shape of a 1-dimensional complex, as used for vertex links.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkShape {
    Empty,
    Path,
    Cycle,
    Other,
}

/// Classifies a complex of dimension at most 1 as empty, a simple path, a simple cycle, or neither.
pub fn link_shape(l: &SimplicialComplex) -> LinkShape {
    if l.is_empty() {
        return LinkShape::Empty;
    }
    if l.dim() == Some(2) || l.components().len() != 1 {
        return LinkShape::Other;
    }
    let mut deg: BTreeMap<Vertex, usize> = l.vertices().into_iter().map(|v| (v, 0)).collect();
    for e in l.of_dim(1) {
        for v in e.vertices() {
            *deg.get_mut(v).unwrap() += 1;
        }
    }
    if deg.values().any(|&d| d > 2) {
        return LinkShape::Other;
    }
    let ones = deg.values().filter(|&&d| d == 1).count();
    match ones {
        0 if deg.len() == 1 => LinkShape::Path,
        0 if deg.len() >= 3 => LinkShape::Cycle,
        2 => LinkShape::Path,
        _ => LinkShape::Other,
    }
}

/// A reason why a complex fails to be a combinatorial surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SurfaceViolation {
    NotInTriangle(String),
    EdgeOverloaded { edge: String, triangles: usize },
    BadVertexLink(Vertex),
}

impl fmt::Display for SurfaceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SurfaceViolation::NotInTriangle(s) => write!(f, "simplex {s} lies in no triangle"),
            SurfaceViolation::EdgeOverloaded { edge, triangles } => write!(f, "edge {edge} lies in {triangles} triangles"),
            SurfaceViolation::BadVertexLink(v) => write!(f, "link of vertex {v} is neither a simple path nor a simple cycle"),
        }
    }
}

/// Lists every local obstruction to `k` being a combinatorial surface.
pub fn surface_violations(k: &SimplicialComplex) -> Vec<SurfaceViolation> {
    let mut out = Vec::new();
    let mut edge_deg: BTreeMap<Simplex, usize> = k.of_dim(1).map(|e| (e, 0)).collect();
    let mut vert_in_tri: BTreeSet<Vertex> = BTreeSet::new();
    let mut star: BTreeMap<Vertex, Vec<Simplex>> = BTreeMap::new();
    for t in k.of_dim(2) {
        for e in t.facets() {
            *edge_deg.get_mut(&e).unwrap() += 1;
        }
        for &v in t.vertices() {
            vert_in_tri.insert(v);
            star.entry(v).or_default().push(t);
        }
    }
    for v in k.vertices() {
        if !vert_in_tri.contains(&v) {
            out.push(SurfaceViolation::NotInTriangle(Simplex::vertex(v).to_string()));
        }
    }
    for (e, &d) in &edge_deg {
        if d == 0 {
            out.push(SurfaceViolation::NotInTriangle(e.to_string()));
        } else if d > 2 {
            out.push(SurfaceViolation::EdgeOverloaded { edge: e.to_string(), triangles: d });
        }
    }
    for (v, tris) in &star {
        let l = link_from_star(*v, tris);
        if !matches!(link_shape(&l), LinkShape::Path | LinkShape::Cycle) {
            out.push(SurfaceViolation::BadVertexLink(*v));
        }
    }
    out
}

fn link_from_star(v: Vertex, tris: &[Simplex]) -> SimplicialComplex {
    let mut l = SimplicialComplex::new();
    for t in tris {
        let rest: Vec<Vertex> = t.vertices().iter().copied().filter(|&x| x != v).collect();
        l.insert(Simplex::edge(rest[0], rest[1]));
    }
    l
}

/// Pure 2-dimensional with every vertex link a simple path or cycle. The empty complex counts.
pub fn is_combinatorial_surface(k: &SimplicialComplex) -> bool {
    surface_violations(k).is_empty()
}

/// Closure of the edges lying in exactly one triangle.
pub fn complex_boundary(k: &SimplicialComplex) -> SimplicialComplex {
    let mut deg: BTreeMap<Simplex, usize> = BTreeMap::new();
    for t in k.of_dim(2) {
        for e in t.facets() {
            *deg.entry(e).or_default() += 1;
        }
    }
    let edges: Vec<Simplex> = deg.into_iter().filter(|(_, d)| *d == 1).map(|(e, _)| e).collect();
    build_complex(&edges)
}

/// Checks that `b` is a subcomplex of `k` that is a disjoint union of simple cycles.
pub fn validate_boundary_spec(k: &SimplicialComplex, b: &SimplicialComplex) -> Result<(), ComplexError> {
    if !b.is_subcomplex_of(k) {
        return Err(ComplexError::BadBoundary("boundary is not a subcomplex of the input".into()));
    }
    if b.dim() == Some(2) {
        return Err(ComplexError::BadBoundary("boundary contains a triangle".into()));
    }
    let mut deg: BTreeMap<Vertex, usize> = b.vertices().into_iter().map(|v| (v, 0)).collect();
    for e in b.of_dim(1) {
        for v in e.vertices() {
            *deg.get_mut(v).unwrap() += 1;
        }
    }
    if let Some((v, d)) = deg.iter().find(|(_, &d)| d != 2) {
        return Err(ComplexError::BadBoundary(format!("vertex {v} has {d} boundary edges, expected 2")));
    }
    Ok(())
}

/// Number of cycles in a valid boundary specification.
pub fn boundary_cycle_count(b: &SimplicialComplex) -> usize {
    b.components().len()
}

/// Topological type of one connected surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SurfaceSummary {
    pub orientable: bool,
    pub genus: u32,
    pub boundaries: u32,
}

impl SurfaceSummary {
    pub fn new(orientable: bool, genus: u32, boundaries: u32) -> Self {
        SurfaceSummary { orientable, genus, boundaries }
    }

    pub fn euler_characteristic(&self) -> i64 {
        let g = self.genus as i64;
        let b = self.boundaries as i64;
        if self.orientable {
            2 - 2 * g - b
        } else {
            2 - g - b
        }
    }
}

impl Ord for SurfaceSummary {
    fn cmp(&self, other: &Self) -> Ordering {
        other.orientable.cmp(&self.orientable).then(self.genus.cmp(&other.genus)).then(self.boundaries.cmp(&other.boundaries))
    }
}

impl PartialOrd for SurfaceSummary {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SurfaceSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.orientable { "orientable" } else { "non-orientable" };
        write!(f, "({o},{},{})", self.genus, self.boundaries)
    }
}

pub fn format_summaries(s: &[SurfaceSummary]) -> String {
    let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Classifies every connected component of a combinatorial surface, sorted.
pub fn classify_surface(k: &SimplicialComplex) -> Result<Vec<SurfaceSummary>, ComplexError> {
    let viol = surface_violations(k);
    if let Some(v) = viol.first() {
        return Err(ComplexError::NotSurface(v.to_string()));
    }
    let bd = complex_boundary(k);
    let mut out = Vec::new();
    for comp in k.components() {
        let set: BTreeSet<Vertex> = comp.iter().copied().collect();
        let sub = k.induced(&set);
        let chi = sub.euler_characteristic();
        let b = bd.induced(&set).components().len() as i64;
        let orientable = is_orientable(&sub);
        let genus = if orientable { (2 - b - chi) / 2 } else { 2 - b - chi };
        debug_assert!(genus >= 0);
        out.push(SurfaceSummary::new(orientable, genus as u32, b as u32));
    }
    out.sort();
    Ok(out)
}

/// Consistent orientation propagation across triangles sharing an edge.
fn is_orientable(k: &SimplicialComplex) -> bool {
    let tris = k.triangles();
    let mut by_edge: HashMap<Simplex, Vec<usize>> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for e in t.facets() {
            by_edge.entry(e).or_default().push(i);
        }
    }
    // orientation[i]: +1 means the sorted vertex order (a,b,c) is positive.
    let mut orient: Vec<i8> = vec![0; tris.len()];
    let dir = |t: &Simplex, e: &Simplex| -> i8 {
        // sign with which the cyclic order (a,b,c) traverses e = (x<y) as x->y
        let v = t.vertices();
        let (x, y) = (e.vertices()[0], e.vertices()[1]);
        let pos = |z| v.iter().position(|&w| w == z).unwrap();
        let (px, py) = (pos(x), pos(y));
        if (px + 1) % 3 == py {
            1
        } else {
            -1
        }
    };
    for start in 0..tris.len() {
        if orient[start] != 0 {
            continue;
        }
        orient[start] = 1;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for e in tris[i].facets() {
                for &j in &by_edge[&e] {
                    if j == i {
                        continue;
                    }
                    let want = -dir(&tris[i], &e) * orient[i] * dir(&tris[j], &e);
                    if orient[j] == 0 {
                        orient[j] = want;
                        stack.push(j);
                    } else if orient[j] != want {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Hasse diagram: nodes are simplices in sorted order, edges join codimension-1 incidences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HasseGraph {
    pub simplices: Vec<Simplex>,
    pub adj: Vec<Vec<usize>>,
    index: HashMap<Simplex, usize>,
}

impl HasseGraph {
    pub fn id(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn node_count(&self) -> usize {
        self.simplices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.len()).sum::<usize>() / 2
    }
}

pub fn hasse_diagram(k: &SimplicialComplex) -> HasseGraph {
    let simplices: Vec<Simplex> = k.iter().copied().collect();
    let index: HashMap<Simplex, usize> = simplices.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let mut adj = vec![Vec::new(); simplices.len()];
    for (i, s) in simplices.iter().enumerate() {
        for f in s.facets() {
            let j = index[&f];
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    HasseGraph { simplices, adj, index }
}

fn parse_ids(line: &str, lineno: usize) -> Result<Vec<Vertex>, ComplexError> {
    line.split_whitespace()
        .map(|t| t.parse::<Vertex>().map_err(|_| ComplexError::Parse { line: lineno, msg: format!("bad vertex id {t:?}") }))
        .collect()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap().trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Parses a complex file: one simplex per line as 1-3 vertex ids, `#` starts a comment.
pub fn parse_complex(text: &str) -> Result<SimplicialComplex, ComplexError> {
    let mut k = SimplicialComplex::new();
    for (lineno, line) in content_lines(text) {
        let ids = parse_ids(line, lineno)?;
        let s = Simplex::new(&ids).map_err(|e| ComplexError::Parse { line: lineno, msg: e.to_string() })?;
        k.insert(s);
    }
    Ok(k)
}

pub fn write_complex(k: &SimplicialComplex) -> String {
    let mut out = String::new();
    for s in k.iter() {
        if k.cofaces(s).is_empty() {
            let parts: Vec<String> = s.vertices().iter().map(|v| v.to_string()).collect();
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Parses a boundary file: each line lists the vertices of one cycle in order.
pub fn parse_boundary(text: &str) -> Result<SimplicialComplex, ComplexError> {
    let mut b = SimplicialComplex::new();
    for (lineno, line) in content_lines(text) {
        let ids = parse_ids(line, lineno)?;
        if ids.len() < 3 {
            return Err(ComplexError::Parse { line: lineno, msg: "a cycle needs at least 3 vertices".into() });
        }
        for i in 0..ids.len() {
            let (a, c) = (ids[i], ids[(i + 1) % ids.len()]);
            if a == c {
                return Err(ComplexError::Parse { line: lineno, msg: format!("repeated vertex {a}") });
            }
            b.insert(Simplex::edge(a, c));
        }
    }
    Ok(b)
}
