//! Exhaustive reference answers: subsurface enumeration and directed cycle packing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::complex::{build_complex, classify_surface, complex_boundary, surface_violations, Simplex, SimplicialComplex, SurfaceSummary};
use crate::dpengine::ProblemSpec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{count} triangles exceed the brute-force cap of {cap}")]
    TooManyTriangles { count: usize, cap: usize },
    #[error("{count} vertices exceed the cycle-packing cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub const DEFAULT_TRIANGLE_CAP: usize = 22;
pub const DCP_VERTEX_CAP: usize = 12;

/// A subsurface found by enumeration, with its component types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsurface {
    pub triangles: Vec<Simplex>,
    pub summary: Vec<SurfaceSummary>,
}

struct Incidence {
    tris: Vec<Simplex>,
    edges: Vec<Simplex>,
    tri_edges: Vec<[usize; 3]>,
    edge_tris: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(k: &SimplicialComplex) -> Self {
        let tris = k.triangles();
        let edges = k.edges();
        let idx: HashMap<Simplex, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut edge_tris = vec![Vec::new(); edges.len()];
        let tri_edges = tris
            .iter()
            .enumerate()
            .map(|(ti, t)| {
                let f = t.facets();
                let ids = [idx[&f[0]], idx[&f[1]], idx[&f[2]]];
                for &e in &ids {
                    edge_tris[e].push(ti);
                }
                ids
            })
            .collect();
        Incidence { tris, edges, tri_edges, edge_tris }
    }
}

fn check_candidate(tris: &[Simplex], b: &SimplicialComplex) -> Option<Subsurface> {
    let s = build_complex(tris);
    if !surface_violations(&s).is_empty() || complex_boundary(&s) != *b {
        return None;
    }
    Some(Subsurface { triangles: tris.to_vec(), summary: classify_surface(&s).ok()? })
}

/// Every subsurface of `k` with boundary exactly `b`, by enumerating all triangle subsets.
/// Subsets are screened by edge degree before the full surface check.
pub fn all_subsurfaces(k: &SimplicialComplex, b: &SimplicialComplex, cap: usize) -> Result<Vec<Subsurface>, OracleError> {
    let inc = Incidence::new(k);
    let n = inc.tris.len();
    if n > cap || n > 63 {
        return Err(OracleError::TooManyTriangles { count: n, cap });
    }
    let masks: Vec<(u64, bool)> =
        inc.edges.iter().zip(&inc.edge_tris).map(|(e, ts)| (ts.iter().fold(0u64, |m, &t| m | 1 << t), b.contains(e))).collect();
    let mut out = Vec::new();
    for m in 0u64..(1u64 << n) {
        let degrees_ok = masks.iter().all(|&(tm, in_b)| {
            let d = (m & tm).count_ones();
            if in_b {
                d == 1
            } else {
                d == 0 || d == 2
            }
        });
        if !degrees_ok {
            continue;
        }
        let tris: Vec<Simplex> = (0..n).filter(|&i| m >> i & 1 == 1).map(|i| inc.tris[i]).collect();
        if let Some(s) = check_candidate(&tris, b) {
            out.push(s);
        }
    }
    Ok(out)
}

/// Reference predicate, written independently of the solver.
pub fn spec_holds(spec: &ProblemSpec, comps: &[SurfaceSummary], b_cycles: usize) -> bool {
    match spec {
        ProblemSpec::Sp { components } => comps.len() == *components as usize,
        ProblemSpec::Csr { orientable, genus } => {
            comps.len() == 1 && comps[0].orientable == *orientable && comps[0].genus == *genus && comps[0].boundaries as usize == b_cycles
        }
        ProblemSpec::Sog { genus, components } => {
            if comps.len() != *components as usize {
                return false;
            }
            let non = comps.iter().any(|c| !c.orientable);
            let g: u32 = comps.iter().map(|c| c.genus * if non && c.orientable { 2 } else { 1 }).sum();
            g == *genus
        }
        ProblemSpec::Sr { targets } => {
            let mut a: Vec<(bool, u32, u32)> = comps.iter().map(|c| (c.orientable, c.genus, c.boundaries)).collect();
            let mut t: Vec<(bool, u32, u32)> = targets.iter().map(|c| (c.orientable, c.genus, c.boundaries)).collect();
            a.sort();
            t.sort();
            a == t
        }
    }
}

/// Answers a problem by exhaustive enumeration; returns a witness on yes.
pub fn brute_force_subsurfaces(
    k: &SimplicialComplex,
    b: &SimplicialComplex,
    spec: &ProblemSpec,
    cap: usize,
) -> Result<Option<Subsurface>, OracleError> {
    let nb = b.components().len();
    Ok(all_subsurfaces(k, b, cap)?.into_iter().find(|s| spec_holds(spec, &s.summary, nb)))
}

/// Which edges may end up on the boundary of a searched subsurface.
#[derive(Clone, Debug)]
pub enum BoundaryRule {
    /// The boundary must be exactly this complex.
    Exactly(SimplicialComplex),
    /// The boundary may be any subcomplex of this one.
    Within(SimplicialComplex),
}

/// Exhaustive search over triangle subsets with unit propagation on edge degrees.
/// Complete for subsurfaces: a subset is discarded only when some edge degree
/// can no longer take an allowed value.
pub fn search_subsurfaces(k: &SimplicialComplex, rule: &BoundaryRule) -> Vec<Subsurface> {
    let inc = Incidence::new(k);
    let allowed: Vec<u8> = inc
        .edges
        .iter()
        .map(|e| match rule {
            BoundaryRule::Exactly(b) if b.contains(e) => 0b010,
            BoundaryRule::Within(c) if c.contains(e) => 0b011,
            _ => 0b101,
        })
        .collect();
    let mut s = Search {
        inc: &inc,
        allowed,
        state: vec![0; inc.tris.len()],
        cnt_in: vec![0; inc.edges.len()],
        cnt_und: inc.edge_tris.iter().map(|t| t.len()).collect(),
        trail: Vec::new(),
        found: Vec::new(),
    };
    let ok = (0..inc.edges.len()).all(|e| s.propagate_edge(e));
    if ok {
        s.descend();
    }
    let mut out = Vec::new();
    for tris in s.found {
        let sub = build_complex(&tris);
        if !surface_violations(&sub).is_empty() {
            continue;
        }
        let bd = complex_boundary(&sub);
        let ok = match rule {
            BoundaryRule::Exactly(b) => bd == *b,
            BoundaryRule::Within(c) => bd.is_subcomplex_of(c),
        };
        if ok {
            out.push(Subsurface { summary: classify_surface(&sub).unwrap(), triangles: tris });
        }
    }
    out
}

struct Search<'a> {
    inc: &'a Incidence,
    allowed: Vec<u8>,
    /// 0 undecided, 1 in, 2 out.
    state: Vec<u8>,
    cnt_in: Vec<usize>,
    cnt_und: Vec<usize>,
    trail: Vec<usize>,
    found: Vec<Vec<Simplex>>,
}

impl Search<'_> {
    fn set(&mut self, t: usize, v: u8) -> bool {
        if self.state[t] != 0 {
            return self.state[t] == v;
        }
        self.state[t] = v;
        self.trail.push(t);
        for &e in &self.inc.tri_edges[t] {
            self.cnt_und[e] -= 1;
            if v == 1 {
                self.cnt_in[e] += 1;
            }
        }
        self.inc.tri_edges[t].iter().all(|&e| self.propagate_edge(e))
    }

    fn propagate_edge(&mut self, e: usize) -> bool {
        let (lo, hi) = (self.cnt_in[e], self.cnt_in[e] + self.cnt_und[e]);
        let feasible: Vec<usize> = (lo..=hi.min(2)).filter(|d| self.allowed[e] >> d & 1 == 1).collect();
        if feasible.is_empty() {
            return false;
        }
        if self.cnt_und[e] == 0 || feasible.len() > 1 {
            return true;
        }
        let force = if feasible[0] == lo {
            2
        } else if feasible[0] == hi {
            1
        } else {
            return true;
        };
        let tris: Vec<usize> = self.inc.edge_tris[e].iter().copied().filter(|&t| self.state[t] == 0).collect();
        tris.into_iter().all(|t| self.set(t, force))
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let t = self.trail.pop().unwrap();
            let v = self.state[t];
            self.state[t] = 0;
            for &e in &self.inc.tri_edges[t] {
                self.cnt_und[e] += 1;
                if v == 1 {
                    self.cnt_in[e] -= 1;
                }
            }
        }
    }

    fn descend(&mut self) {
        let Some(t) = self.state.iter().position(|&s| s == 0) else {
            let tris = (0..self.state.len()).filter(|&i| self.state[i] == 1).map(|i| self.inc.tris[i]).collect();
            self.found.push(tris);
            return;
        };
        for v in [2, 1] {
            let mark = self.trail.len();
            if self.set(t, v) {
                self.descend();
            }
            self.undo(mark);
        }
    }
}

/// All nonempty closed subsurfaces.
pub fn enumerate_boundaryless_subsurfaces(k: &SimplicialComplex) -> Vec<Subsurface> {
    search_subsurfaces(k, &BoundaryRule::Exactly(SimplicialComplex::new())).into_iter().filter(|s| !s.triangles.is_empty()).collect()
}

/// A directed multigraph on vertices `0..n`; self-loops are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        assert!(edges.iter().all(|&(u, v)| u < n && v < n));
        Digraph { n, edges }
    }

    pub fn parse(text: &str) -> Result<Self, OracleError> {
        let mut lines = text.lines().enumerate().filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap().trim();
            (!l.is_empty()).then_some((i + 1, l))
        });
        let perr = |line: usize, msg: &str| OracleError::Parse { line, msg: msg.into() };
        let nums = |line: usize, l: &str| -> Result<Vec<usize>, OracleError> {
            let v: Result<Vec<usize>, _> = l.split_whitespace().map(|t| t.parse::<usize>()).collect();
            let v = v.map_err(|_| perr(line, "expected non-negative integers"))?;
            if v.len() != 2 {
                return Err(perr(line, "expected two integers"));
            }
            Ok(v)
        };
        let (hl, h) = lines.next().ok_or_else(|| perr(1, "missing header `n m`"))?;
        let h = nums(hl, h)?;
        let (n, m) = (h[0], h[1]);
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, "fewer edges than declared"))?;
            let e = nums(ln, l)?;
            if e[0] >= n || e[1] >= n {
                return Err(perr(ln, "edge endpoint out of range"));
            }
            edges.push((e[0], e[1]));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "more edges than declared"));
        }
        Ok(Digraph { n, edges })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Vertex sets of all simple directed cycles, deduplicated.
    pub fn cycle_vertex_sets(&self) -> Vec<u32> {
        let mut out: BTreeSet<u32> = BTreeSet::new();
        let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.n];
        for &(u, v) in &self.edges {
            succ[u].insert(v);
        }
        for s in 0..self.n {
            let mut stack: Vec<(usize, u32, Vec<usize>)> = vec![(s, 1 << s, succ[s].iter().copied().collect())];
            while let Some((x, mask, mut rest)) = stack.pop() {
                let Some(y) = rest.pop() else { continue };
                stack.push((x, mask, rest));
                if y == s {
                    out.insert(mask);
                } else if y > s && mask >> y & 1 == 0 {
                    stack.push((y, mask | 1 << y, succ[y].iter().copied().collect()));
                }
            }
        }
        out.into_iter().collect()
    }
}

/// Largest number of vertex-disjoint directed cycles, computed by two independent searches.
pub fn dcp_bruteforce(d: &Digraph) -> Result<usize, OracleError> {
    if d.n > DCP_VERTEX_CAP {
        return Err(OracleError::TooManyVertices { count: d.n, cap: DCP_VERTEX_CAP });
    }
    let cycles = d.cycle_vertex_sets();
    let a = pack_backtrack(&cycles, 0, 0);
    let b = pack_subsets(d.n, &cycles);
    assert_eq!(a, b, "cycle packing searches disagree");
    Ok(a)
}

fn pack_backtrack(cycles: &[u32], from: usize, used: u32) -> usize {
    let mut best = 0;
    for i in from..cycles.len() {
        if cycles[i] & used == 0 {
            best = best.max(1 + pack_backtrack(cycles, i + 1, used | cycles[i]));
        }
    }
    best
}

fn pack_subsets(n: usize, cycles: &[u32]) -> usize {
    let mut by_low: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &c in cycles {
        by_low.entry(c.trailing_zeros()).or_default().push(c);
    }
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut f = vec![0usize; full as usize + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros();
        let mut best = f[(mask & !(1 << low)) as usize];
        for &c in by_low.get(&low).map(|v| v.as_slice()).unwrap_or(&[]) {
            if c & mask == c {
                best = best.max(1 + f[(mask & !c) as usize]);
            }
        }
        f[mask as usize] = best;
    }
    f[full as usize]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> SimplicialComplex {
        SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    }

    #[test]
    fn tetrahedron_subsurfaces() {
        let k = tetra();
        let closed = all_subsurfaces(&k, &SimplicialComplex::new(), 22).unwrap();
        assert_eq!(closed.len(), 2);
        assert_eq!(closed[1].summary, vec![SurfaceSummary::new(true, 0, 0)]);
        let b = complex_boundary(&SimplicialComplex::from_triangles(&[[0, 1, 2]]));
        let disks = all_subsurfaces(&k, &b, 22).unwrap();
        assert_eq!(disks.len(), 2);
    }

    #[test]
    fn search_matches_naive() {
        let k = SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3], [0, 1, 4], [0, 2, 4], [1, 2, 4]]);
        for b in [SimplicialComplex::new(), complex_boundary(&SimplicialComplex::from_triangles(&[[0, 1, 2]]))] {
            let a = all_subsurfaces(&k, &b, 22).unwrap();
            let s = search_subsurfaces(&k, &BoundaryRule::Exactly(b.clone()));
            let mut x: Vec<_> = a.iter().map(|s| s.triangles.clone()).collect();
            let mut y: Vec<_> = s.iter().map(|s| s.triangles.clone()).collect();
            x.sort();
            y.sort();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(all_subsurfaces(&tetra(), &SimplicialComplex::new(), 3), Err(OracleError::TooManyTriangles { .. })));
    }

    #[test]
    fn digraph_packing() {
        let d = Digraph::new(4, vec![(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)]);
        assert_eq!(dcp_bruteforce(&d).unwrap(), 2);
        let tri = Digraph::new(3, vec![(0, 1), (1, 2), (2, 0)]);
        assert_eq!(dcp_bruteforce(&tri).unwrap(), 1);
        assert_eq!(dcp_bruteforce(&Digraph::new(3, vec![(0, 1), (1, 2)])).unwrap(), 0);
        assert_eq!(dcp_bruteforce(&Digraph::new(2, vec![(0, 0), (1, 1)])).unwrap(), 2);
        assert_eq!(dcp_bruteforce(&Digraph::new(0, vec![])).unwrap(), 0);
    }

    #[test]
    fn digraph_parse() {
        let d = Digraph::parse("3 2\n0 1\n1 2\n").unwrap();
        assert_eq!(d.edges, vec![(0, 1), (1, 2)]);
        assert_eq!(Digraph::parse(&d.to_text()).unwrap(), d);
        assert!(Digraph::parse("2 1\n0 5\n").is_err());
        assert!(Digraph::parse("2 2\n0 1\n").is_err());
    }
}
