//! Dynamic programming over a nice closed tree decomposition of the Hasse diagram.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cellalg::{CanonicalKey, CellComplex, CellError};
use crate::complex::{
    boundary_cycle_count, build_complex, classify_surface, complex_boundary, hasse_diagram, validate_boundary_spec, ComplexError,
    HasseGraph, Simplex, SimplicialComplex, SurfaceSummary, Vertex,
};
use crate::decomp::{close_td, heuristic_td, make_nice_closed, validate_td, DecompError, NiceKind, NiceNode, NiceTd, TreeDecomposition};
use crate::linkcheck::{edge_status, vertex_link_status, Status};

#[derive(Debug, Error)]
pub enum DpError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("supplied tree decomposition is invalid: {0}")]
    Decomposition(#[from] DecompError),
    #[error("table at node {node} reached {size} entries, above the cap of {cap}")]
    TableCap { node: usize, size: usize, cap: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<CellError> for DpError {
    fn from(e: CellError) -> Self {
        DpError::Internal(e.to_string())
    }
}

/// The four decision problems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ProblemSpec {
    /// A surface whose components are exactly the given types (as a multiset).
    Sr { targets: Vec<SurfaceSummary> },
    /// A connected surface of the given orientability and genus.
    Csr { orientable: bool, genus: u32 },
    /// A surface of total genus `genus` with `components` components.
    Sog { genus: u32, components: u32 },
    /// A surface with `components` components, any type.
    Sp { components: u32 },
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), DpError> {
        let bad = |s: &SurfaceSummary| !s.orientable && s.genus == 0;
        match self {
            ProblemSpec::Sr { targets } if targets.iter().any(bad) => Err(DpError::Input("non-orientable target with genus 0".into())),
            ProblemSpec::Csr { orientable: false, genus: 0 } => Err(DpError::Input("non-orientable genus must be at least 1".into())),
            _ => Ok(()),
        }
    }

    fn annotated(&self) -> bool {
        !matches!(self, ProblemSpec::Sp { .. })
    }

    fn targets(&self, b_cycles: u32) -> Option<Vec<SurfaceSummary>> {
        match self {
            ProblemSpec::Sr { targets } => {
                let mut t = targets.clone();
                t.sort();
                Some(t)
            }
            ProblemSpec::Csr { orientable, genus } => Some(vec![SurfaceSummary::new(*orientable, *genus, b_cycles)]),
            _ => None,
        }
    }

    /// Whether a surface with these component types and the prescribed boundary answers yes.
    pub fn accepts(&self, comps: &[SurfaceSummary], b_cycles: u32) -> bool {
        match self {
            ProblemSpec::Sr { .. } | ProblemSpec::Csr { .. } => {
                let mut c = comps.to_vec();
                c.sort();
                Some(c) == self.targets(b_cycles)
            }
            ProblemSpec::Sog { genus, components } => comps.len() as u32 == *components && total_genus(comps) == *genus,
            ProblemSpec::Sp { components } => comps.len() as u32 == *components,
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::Sr { targets } => write!(f, "sr {}", crate::complex::format_summaries(targets)),
            ProblemSpec::Csr { orientable, genus } => write!(f, "csr orientable={orientable} genus={genus}"),
            ProblemSpec::Sog { genus, components } => write!(f, "sog genus={genus} components={components}"),
            ProblemSpec::Sp { components } => write!(f, "sp components={components}"),
        }
    }
}

/// Genus of a disconnected surface: plain sum if all components are orientable,
/// otherwise orientable genera count twice.
pub fn total_genus(comps: &[SurfaceSummary]) -> u32 {
    let any_non = comps.iter().any(|c| !c.orientable);
    comps.iter().map(|c| if any_non && c.orientable { 2 * c.genus } else { c.genus }).sum()
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub complex: SimplicialComplex,
    pub boundary: SimplicialComplex,
    pub spec: ProblemSpec,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub want_witness: bool,
    pub table_cap: usize,
    /// 0 runs sequentially; otherwise the number of worker threads.
    pub threads: usize,
    pub td: Option<TreeDecomposition>,
    pub td_seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { want_witness: true, table_cap: 1 << 22, threads: 0, td: None, td_seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NodeStat {
    pub kind: &'static str,
    pub bag: usize,
    pub table: usize,
    pub max_word: usize,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveStats {
    pub hasse_nodes: usize,
    pub width: isize,
    pub closed_width: isize,
    pub nice_nodes: usize,
    pub max_table: usize,
    pub total_entries: usize,
    pub per_node: Vec<NodeStat>,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub answer: bool,
    pub witness: Option<SimplicialComplex>,
    /// Component types of the accepted surface, sorted; for SP only known when a witness is built.
    pub classification: Option<Vec<SurfaceSummary>>,
    pub stats: SolveStats,
}

enum Wit {
    Empty,
    Tri(Simplex, Arc<Wit>),
    Join(Arc<Wit>, Arc<Wit>),
}

fn witness_triangles(w: &Arc<Wit>) -> Vec<Simplex> {
    let mut out = Vec::new();
    let mut stack = vec![w.clone()];
    while let Some(x) = stack.pop() {
        match &*x {
            Wit::Empty => {}
            Wit::Tri(t, p) => {
                out.push(*t);
                stack.push(p.clone());
            }
            Wit::Join(a, b) => {
                stack.push(a.clone());
                stack.push(b.clone());
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone)]
struct Entry {
    cc: CellComplex,
    wit: Option<Arc<Wit>>,
}

type Table = BTreeMap<CanonicalKey, Entry>;

/// A snapshot of one table, passed to an observer after each node is processed.
pub struct NodeView<'a> {
    pub node: usize,
    pub nice: &'a NiceNode,
    pub hasse: &'a HasseGraph,
    /// Each entry's cell complex with the triangles of the partial surface it represents.
    pub entries: Vec<(&'a CellComplex, Vec<Simplex>)>,
}

pub type Observer<'o> = &'o mut (dyn FnMut(&NodeView<'_>) + Send);

struct Ctx<'a> {
    spec: &'a ProblemSpec,
    b_edges: HashSet<(Vertex, Vertex)>,
    b_verts: HashSet<Vertex>,
    b_cycles: u32,
    targets: Option<Vec<SurfaceSummary>>,
    track: bool,
    par: bool,
}

impl Ctx<'_> {
    fn in_b_edge(&self, a: Vertex, b: Vertex) -> bool {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.b_edges.contains(&(u, v))
    }

    fn vertex_ok(&self, cc: &CellComplex, v: Vertex) -> Status {
        vertex_link_status(cc, v, self.b_verts.contains(&v), &|a, b| self.in_b_edge(a, b))
    }

    /// Whether the candidate can still grow into a yes-instance.
    fn keep(&self, cc: &CellComplex) -> bool {
        let empties = cc.empty_faces().count() as u32;
        match (self.spec, &self.targets) {
            (ProblemSpec::Sp { components }, _) => empties <= *components,
            (ProblemSpec::Sog { genus, components }, _) => {
                empties <= *components && cc.faces.iter().all(|f| f.ann.genus <= *genus && f.ann.boundaries <= self.b_cycles)
            }
            (_, Some(targets)) => {
                let maxg = targets.iter().map(|t| t.genus).max().unwrap_or(0);
                let maxb = targets.iter().map(|t| t.boundaries).max().unwrap_or(0);
                let any_non = targets.iter().any(|t| !t.orientable);
                if !cc.faces.iter().all(|f| f.ann.genus <= maxg && f.ann.boundaries <= maxb && (any_non || f.ann.orientable)) {
                    return false;
                }
                let mut pool = targets.clone();
                for f in cc.empty_faces() {
                    match pool.iter().position(|t| *t == f.ann.summary()) {
                        Some(i) => {
                            pool.swap_remove(i);
                        }
                        None => return false,
                    }
                }
                true
            }
            _ => unreachable!(),
        }
    }

    fn finish(&self, mut cc: CellComplex, wit: Option<Arc<Wit>>) -> Option<(CanonicalKey, Entry)> {
        cc.compact();
        if !self.spec.annotated() {
            cc.strip_annotations();
        }
        if !self.keep(&cc) {
            return None;
        }
        let key = cc.canonical_key(self.spec.annotated());
        Some((key, Entry { cc, wit: if self.track { wit } else { None } }))
    }

    fn expand<F>(&self, items: &[Entry], f: F) -> Result<Vec<(CanonicalKey, Entry)>, DpError>
    where
        F: Fn(&Entry) -> Result<Vec<(CanonicalKey, Entry)>, DpError> + Sync,
    {
        let parts: Vec<Result<Vec<(CanonicalKey, Entry)>, DpError>> =
            if self.par { items.par_iter().map(&f).collect() } else { items.iter().map(&f).collect() };
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }
}

fn insert_all(items: Vec<(CanonicalKey, Entry)>) -> Table {
    let mut t = Table::new();
    for (k, e) in items {
        t.entry(k).or_insert(e);
    }
    t
}

/// Hasse diagram plus the nice closed decomposition the solver runs on.
pub struct Prepared {
    pub hasse: HasseGraph,
    pub nice: NiceTd,
    pub width: isize,
    pub closed_width: isize,
}

pub fn prepare(k: &SimplicialComplex, td: Option<&TreeDecomposition>, seed: u64) -> Result<Prepared, DpError> {
    let hasse = hasse_diagram(k);
    let td = match td {
        Some(td) => {
            validate_td(&hasse.adj, td)?;
            td.clone()
        }
        None => heuristic_td(&hasse.adj, seed),
    };
    let closed = close_td(&hasse, &td);
    let nice = make_nice_closed(&hasse, &closed, true);
    Ok(Prepared { width: td.width(), closed_width: closed.width(), hasse, nice })
}

pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult, DpError> {
    solve_observed(inst, opts, None)
}

pub fn solve_observed(inst: &Instance, opts: &SolveOptions, observer: Option<Observer<'_>>) -> Result<SolveResult, DpError> {
    if opts.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build().map_err(|e| DpError::Internal(e.to_string()))?;
        pool.install(|| run(inst, opts, observer, true))
    } else {
        run(inst, opts, observer, false)
    }
}

fn run(inst: &Instance, opts: &SolveOptions, mut observer: Option<Observer<'_>>, par: bool) -> Result<SolveResult, DpError> {
    inst.spec.validate()?;
    if inst.complex.dim().is_some_and(|d| d > 2) {
        return Err(DpError::Input("complex has dimension above 2".into()));
    }
    validate_boundary_spec(&inst.complex, &inst.boundary)?;
    let prep = prepare(&inst.complex, opts.td.as_ref(), opts.td_seed)?;
    let h = &prep.hasse;
    let b_cycles = boundary_cycle_count(&inst.boundary) as u32;
    let ctx = Ctx {
        spec: &inst.spec,
        b_edges: inst.boundary.edges().iter().map(|e| (e.vertices()[0], e.vertices()[1])).collect(),
        b_verts: inst.boundary.vertices().into_iter().collect(),
        b_cycles,
        targets: inst.spec.targets(b_cycles),
        track: opts.want_witness || observer.is_some(),
        par,
    };
    let nodes = &prep.nice.nodes;
    let mut tables: Vec<Option<Table>> = vec![None; nodes.len()];
    let mut stats = SolveStats {
        hasse_nodes: h.node_count(),
        width: prep.width,
        closed_width: prep.closed_width,
        nice_nodes: nodes.len(),
        ..Default::default()
    };
    for (i, node) in nodes.iter().enumerate() {
        let table = match node.kind {
            NiceKind::Leaf => {
                let mut t = Table::new();
                let e = CellComplex::new();
                t.insert(e.canonical_key(inst.spec.annotated()), Entry { cc: e, wit: ctx.track.then(|| Arc::new(Wit::Empty)) });
                t
            }
            NiceKind::Introduce(_) => tables[node.children[0]].take().unwrap(),
            NiceKind::Forget(s) => {
                let child = tables[node.children[0]].take().unwrap();
                forget(&ctx, h.simplices[s], child)?
            }
            NiceKind::Join => {
                let l = tables[node.children[0]].take().unwrap();
                let r = tables[node.children[1]].take().unwrap();
                join(&ctx, l, r)?
            }
        };
        if table.len() > opts.table_cap {
            return Err(DpError::TableCap { node: i, size: table.len(), cap: opts.table_cap });
        }
        let max_word = table.values().map(|e| e.cc.max_word_len()).max().unwrap_or(0);
        stats.per_node.push(NodeStat {
            kind: match node.kind {
                NiceKind::Leaf => "leaf",
                NiceKind::Introduce(_) => "introduce",
                NiceKind::Forget(_) => "forget",
                NiceKind::Join => "join",
            },
            bag: node.bag.len(),
            table: table.len(),
            max_word,
        });
        stats.max_table = stats.max_table.max(table.len());
        stats.total_entries += table.len();
        if let Some(obs) = observer.as_mut() {
            let entries = table.values().map(|e| (&e.cc, witness_triangles(e.wit.as_ref().unwrap()))).collect();
            obs(&NodeView { node: i, nice: node, hasse: h, entries });
        }
        tables[i] = Some(table);
    }
    let root = tables[prep.nice.root()].take().unwrap();
    let mut found: Option<(&Entry, Vec<SurfaceSummary>)> = None;
    for e in root.values() {
        if e.cc.faces.iter().any(|f| !f.is_empty_face()) {
            return Err(DpError::Internal("root table holds an unfinished face".into()));
        }
        let mut comps: Vec<SurfaceSummary> = e.cc.faces.iter().map(|f| f.ann.summary()).collect();
        comps.sort();
        let ok = match &inst.spec {
            ProblemSpec::Sp { components } => comps.len() as u32 == *components,
            spec => spec.accepts(&comps, b_cycles),
        };
        if ok {
            found = Some((e, comps));
            break;
        }
    }
    let mut res = SolveResult { answer: found.is_some(), witness: None, classification: None, stats };
    let Some((e, comps)) = found else { return Ok(res) };
    let tracked = !matches!(inst.spec, ProblemSpec::Sp { .. });
    if tracked {
        res.classification = Some(comps);
    }
    if opts.want_witness {
        let tris = witness_triangles(e.wit.as_ref().unwrap());
        let w = build_complex(&tris);
        let summary = classify_surface(&w).map_err(|e| DpError::Internal(format!("witness is not a surface: {e}")))?;
        if complex_boundary(&w) != inst.boundary {
            return Err(DpError::Internal("witness boundary differs from the prescribed boundary".into()));
        }
        if !inst.spec.accepts(&summary, b_cycles) {
            return Err(DpError::Internal("witness does not satisfy the problem".into()));
        }
        if tracked && res.classification.as_ref() != Some(&summary) {
            return Err(DpError::Internal("witness type differs from the accepted table entry".into()));
        }
        res.witness = Some(w);
        res.classification = Some(summary);
    }
    Ok(res)
}

fn forget(ctx: &Ctx<'_>, s: Simplex, child: Table) -> Result<Table, DpError> {
    let items: Vec<Entry> = child.into_values().collect();
    let vs = s.vertices().to_vec();
    let out = match s.dim() {
        2 => {
            let tri = CellComplex::from_triangle(vs[0], vs[1], vs[2]);
            ctx.expand(&items, |e| {
                let mut v = Vec::with_capacity(2);
                v.extend(ctx.finish(e.cc.clone(), e.wit.clone()));
                let ext = e.cc.disjoint_union(&tri);
                let edges_ok = [(vs[0], vs[1]), (vs[1], vs[2]), (vs[0], vs[2])]
                    .iter()
                    .all(|&(a, b)| edge_status(&ext, a, b, ctx.in_b_edge(a, b)).admissible());
                if edges_ok && vs.iter().all(|&x| ctx.vertex_ok(&ext, x).admissible()) {
                    let wit = e.wit.as_ref().map(|w| Arc::new(Wit::Tri(s, w.clone())));
                    v.extend(ctx.finish(ext, wit));
                }
                Ok(v)
            })?
        }
        1 => {
            let (a, b) = (vs[0], vs[1]);
            let in_b = ctx.in_b_edge(a, b);
            ctx.expand(&items, |e| {
                if edge_status(&e.cc, a, b, in_b) != Status::Complete {
                    return Ok(Vec::new());
                }
                let cc = e.cc.remove_real_edge(a, b, in_b)?;
                Ok(ctx.finish(cc, e.wit.clone()).into_iter().collect())
            })?
        }
        _ => {
            let x = vs[0];
            let in_b = ctx.b_verts.contains(&x);
            ctx.expand(&items, |e| {
                if ctx.vertex_ok(&e.cc, x) != Status::Complete {
                    return Ok(Vec::new());
                }
                let cc = e.cc.remove_vertex(x, in_b)?;
                Ok(ctx.finish(cc, e.wit.clone()).into_iter().collect())
            })?
        }
    };
    Ok(insert_all(out))
}

fn touched(cc: &CellComplex) -> (HashSet<Vertex>, HashSet<(Vertex, Vertex)>) {
    let mut vs = HashSet::new();
    let mut es = HashSet::new();
    for l in cc.letters() {
        if let crate::cellalg::EdgeKind::Real { u, v } = cc.edges[l.edge as usize] {
            es.insert((u, v));
        }
        vs.extend(cc.tail(l));
        vs.extend(cc.head(l));
    }
    (vs, es)
}

type Touched = (Entry, HashSet<Vertex>, HashSet<(Vertex, Vertex)>);

fn join(ctx: &Ctx<'_>, l: Table, r: Table) -> Result<Table, DpError> {
    let left: Vec<Entry> = l.into_values().collect();
    let right: Vec<Touched> = r
        .into_values()
        .map(|e| {
            let (v, s) = touched(&e.cc);
            (e, v, s)
        })
        .collect();
    let out = ctx.expand(&left, |a| {
        let (av, ae) = touched(&a.cc);
        let mut v = Vec::new();
        for (b, bv, be) in &right {
            let u = a.cc.disjoint_union(&b.cc);
            let edges_ok = ae.intersection(be).all(|&(x, y)| edge_status(&u, x, y, ctx.in_b_edge(x, y)).admissible());
            if !edges_ok || !av.intersection(bv).all(|&x| ctx.vertex_ok(&u, x).admissible()) {
                continue;
            }
            let wit = match (&a.wit, &b.wit) {
                (Some(x), Some(y)) => Some(Arc::new(Wit::Join(x.clone(), y.clone()))),
                _ => None,
            };
            v.extend(ctx.finish(u, wit));
        }
        Ok(v)
    })?;
    Ok(insert_all(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> SimplicialComplex {
        SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    }

    fn run(k: &SimplicialComplex, b: &SimplicialComplex, spec: ProblemSpec) -> SolveResult {
        solve(&Instance { complex: k.clone(), boundary: b.clone(), spec }, &SolveOptions::default()).unwrap()
    }

    #[test]
    fn tetrahedron_contains_a_sphere() {
        let k = tetra();
        let e = SimplicialComplex::new();
        let r = run(&k, &e, ProblemSpec::Csr { orientable: true, genus: 0 });
        assert!(r.answer);
        assert_eq!(r.witness.unwrap(), k);
        assert!(!run(&k, &e, ProblemSpec::Csr { orientable: true, genus: 1 }).answer);
        assert!(run(&k, &e, ProblemSpec::Sp { components: 1 }).answer);
        assert!(!run(&k, &e, ProblemSpec::Sp { components: 2 }).answer);
        assert!(run(&k, &e, ProblemSpec::Sp { components: 0 }).answer);
    }

    #[test]
    fn disk_with_prescribed_boundary() {
        let k = SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 2, 3], [0, 1, 3]]);
        let b = build_complex(&[Simplex::edge(1, 2), Simplex::edge(2, 3), Simplex::edge(1, 3)]);
        let r = run(&k, &b, ProblemSpec::Sr { targets: vec![SurfaceSummary::new(true, 0, 1)] });
        assert!(r.answer);
        assert_eq!(r.classification.unwrap(), vec![SurfaceSummary::new(true, 0, 1)]);
    }

    #[test]
    fn bowtie_is_not_a_surface() {
        let k = SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 3, 4]]);
        let b = complex_boundary(&k);
        assert!(validate_boundary_spec(&k, &b).is_err());
        let b1 = complex_boundary(&SimplicialComplex::from_triangles(&[[0, 1, 2]]));
        assert!(run(&k, &b1, ProblemSpec::Sp { components: 1 }).answer);
    }

    #[test]
    fn total_genus_rule() {
        let t = SurfaceSummary::new(true, 1, 0);
        let p = SurfaceSummary::new(false, 1, 0);
        assert_eq!(total_genus(&[t, t]), 2);
        assert_eq!(total_genus(&[t, p]), 3);
    }

    #[test]
    fn table_cap_is_reported() {
        let opts = SolveOptions { table_cap: 1, ..Default::default() };
        let inst = Instance { complex: tetra(), boundary: SimplicialComplex::new(), spec: ProblemSpec::Sp { components: 1 } };
        assert!(matches!(solve(&inst, &opts), Err(DpError::TableCap { .. })));
    }

    #[test]
    fn threads_match_sequential() {
        let inst = Instance { complex: tetra(), boundary: SimplicialComplex::new(), spec: ProblemSpec::Sp { components: 1 } };
        let a = solve(&inst, &SolveOptions::default()).unwrap();
        let b = solve(&inst, &SolveOptions { threads: 2, ..Default::default() }).unwrap();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.stats.total_entries, b.stats.total_entries);
    }
}
