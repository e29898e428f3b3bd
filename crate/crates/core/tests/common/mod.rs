#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use subsurf_core::cellalg::{Annotation, CellComplex, EdgeKind, Face, Letter};
use subsurf_core::complex::{
    build_complex, complex_boundary, is_combinatorial_surface, validate_boundary_spec, Simplex, SimplicialComplex, SurfaceSummary,
};
use subsurf_core::dpengine::ProblemSpec;
use subsurf_core::fixtures;
use subsurf_core::oracle::all_subsurfaces;

pub fn tetra() -> SimplicialComplex {
    SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
}

pub fn octahedron() -> SimplicialComplex {
    let mut t = Vec::new();
    for a in [0, 1] {
        for b in [2, 3] {
            for c in [4, 5] {
                t.push([a, b, c]);
            }
        }
    }
    SimplicialComplex::from_triangles(&t)
}

pub fn rp2() -> SimplicialComplex {
    SimplicialComplex::from_triangles(&[
        [1, 2, 3],
        [1, 3, 4],
        [1, 4, 5],
        [1, 5, 6],
        [1, 6, 2],
        [2, 3, 5],
        [3, 4, 6],
        [4, 5, 2],
        [5, 6, 3],
        [6, 2, 4],
    ])
}

pub fn k5_skeleton() -> SimplicialComplex {
    let mut t = Vec::new();
    for a in 0..5 {
        for b in a + 1..5 {
            for c in b + 1..5 {
                t.push([a, b, c]);
            }
        }
    }
    SimplicialComplex::from_triangles(&t)
}

pub fn seeds() -> Vec<SimplicialComplex> {
    vec![tetra(), octahedron(), rp2(), k5_skeleton()]
}

/// Closures of all triangle subsets of `k`.
pub fn all_closures(k: &SimplicialComplex) -> Vec<SimplicialComplex> {
    let tris = k.triangles();
    (0u32..1 << tris.len())
        .map(|m| build_complex(&(0..tris.len()).filter(|i| m >> i & 1 == 1).map(|i| tris[i]).collect::<Vec<_>>()))
        .collect()
}

pub fn random_complex<R: Rng>(rng: &mut R, nverts: u32, ntris: usize) -> SimplicialComplex {
    let mut set = BTreeSet::new();
    let mut guard = 0;
    while set.len() < ntris && guard < 10_000 {
        guard += 1;
        let mut v: Vec<u32> = (0..nverts).collect();
        v.shuffle(rng);
        set.insert(Simplex::triangle(v[0], v[1], v[2]));
    }
    build_complex(&set.into_iter().collect::<Vec<_>>())
}

/// A random simple cycle in the 1-skeleton, if one is found.
pub fn random_cycle<R: Rng>(rng: &mut R, k: &SimplicialComplex) -> Option<SimplicialComplex> {
    let edges = k.edges();
    if edges.is_empty() {
        return None;
    }
    for _ in 0..20 {
        let e = edges[rng.random_range(0..edges.len())];
        let mut path = vec![e.vertices()[0], e.vertices()[1]];
        for _ in 0..12 {
            let last = *path.last().unwrap();
            let nbrs: Vec<u32> = edges
                .iter()
                .filter(|f| f.contains_vertex(last))
                .map(|f| if f.vertices()[0] == last { f.vertices()[1] } else { f.vertices()[0] })
                .filter(|&w| w != path[path.len() - 2])
                .collect();
            if nbrs.is_empty() {
                break;
            }
            let w = nbrs[rng.random_range(0..nbrs.len())];
            if let Some(p) = path.iter().position(|&x| x == w) {
                let cyc = &path[p..];
                if cyc.len() >= 3 {
                    let es: Vec<Simplex> = (0..cyc.len()).map(|i| Simplex::edge(cyc[i], cyc[(i + 1) % cyc.len()])).collect();
                    return Some(build_complex(&es));
                }
                break;
            }
            path.push(w);
        }
    }
    None
}

/// A random valid boundary specification: empty, a random cycle, or the boundary of a random subsurface.
pub fn random_boundary<R: Rng>(rng: &mut R, k: &SimplicialComplex) -> SimplicialComplex {
    match rng.random_range(0..3) {
        0 => SimplicialComplex::new(),
        1 => random_cycle(rng, k).unwrap_or_default(),
        _ => {
            let surfaces = surfaces_with_boundary(k);
            if surfaces.is_empty() {
                SimplicialComplex::new()
            } else {
                surfaces[rng.random_range(0..surfaces.len())].clone()
            }
        }
    }
}

fn surfaces_with_boundary(k: &SimplicialComplex) -> Vec<SimplicialComplex> {
    let tris = k.triangles();
    let mut out = BTreeSet::new();
    for m in 1u32..(1 << tris.len().min(12)) {
        let sub = build_complex(&(0..tris.len()).filter(|i| m >> i & 1 == 1).map(|i| tris[i]).collect::<Vec<_>>());
        if is_combinatorial_surface(&sub) {
            let b = complex_boundary(&sub);
            if !b.is_empty() && validate_boundary_spec(k, &b).is_ok() {
                out.insert(b.iter().copied().collect::<Vec<_>>());
            }
        }
    }
    out.into_iter().map(|v| build_complex(&v)).collect()
}

/// The problem variants exercised against the oracle.
pub fn spec_variants(k: &SimplicialComplex, b: &SimplicialComplex) -> Vec<ProblemSpec> {
    let mut v = Vec::new();
    for c in 1..=3 {
        v.push(ProblemSpec::Sp { components: c });
    }
    for g in 0..=3 {
        for c in 1..=3 {
            v.push(ProblemSpec::Sog { genus: g, components: c });
        }
        v.push(ProblemSpec::Csr { orientable: true, genus: g });
        if g > 0 {
            v.push(ProblemSpec::Csr { orientable: false, genus: g });
        }
    }
    let mut targets: BTreeSet<Vec<SurfaceSummary>> = BTreeSet::new();
    if let Ok(all) = all_subsurfaces(k, b, 22) {
        for s in all {
            targets.insert(s.summary);
        }
    }
    let nb = b.components().len() as u32;
    targets.insert(vec![SurfaceSummary::new(true, 0, nb)]);
    targets.insert(vec![SurfaceSummary::new(true, 0, 0), SurfaceSummary::new(true, 0, nb)]);
    targets.insert(vec![SurfaceSummary::new(false, 1, nb)]);
    for t in targets {
        v.push(ProblemSpec::Sr { targets: t });
    }
    v
}

/// A random word system: labels used once or twice with random signs, spread over
/// one to three faces of one or two components, with random annotations.
pub fn random_word_system<R: Rng>(rng: &mut R) -> CellComplex {
    let mut cc = CellComplex::new();
    let nlabels = rng.random_range(1..=8u32);
    let mut occ: Vec<Letter> = Vec::new();
    for k in 0..nlabels {
        let id = cc.push_edge(EdgeKind::Real { u: 2 * k, v: 2 * k + 1 });
        let uses = if rng.random_bool(0.75) { 2 } else { 1 };
        for _ in 0..uses {
            occ.push(Letter { edge: id, inv: rng.random_bool(0.5) });
        }
    }
    occ.shuffle(rng);
    let nfaces = rng.random_range(1..=3usize).min(occ.len());
    let mut pieces: Vec<Vec<Letter>> = vec![Vec::new(); nfaces];
    for (i, l) in occ.into_iter().enumerate() {
        let p = if i < nfaces { i } else { rng.random_range(0..nfaces) };
        pieces[p].push(l);
    }
    for w in pieces {
        let mut comps = vec![w];
        if comps[0].len() >= 2 && rng.random_bool(0.3) {
            let cut = rng.random_range(1..comps[0].len());
            let tail = comps[0].split_off(cut);
            comps.push(tail);
        }
        let orientable = rng.random_bool(0.6);
        let genus = if orientable { rng.random_range(0..=2) } else { rng.random_range(1..=2) };
        let ann = if rng.random_bool(0.5) { Annotation::default() } else { Annotation::new(orientable, genus, rng.random_range(0..=1)) };
        cc.faces.push(Face { comps, ann });
    }
    cc
}

/// A random connected piece of a small closed or bounded surface, if the piece is itself a surface.
pub fn random_surface_piece<R: Rng>(rng: &mut R) -> SimplicialComplex {
    let bases: Vec<SimplicialComplex> =
        fixtures::standard_surfaces().into_iter().map(|(_, k, _)| k).filter(|k| k.triangles().len() <= 16).chain([octahedron()]).collect();
    let base = &bases[rng.random_range(0..bases.len())];
    let tris = base.triangles();
    let want = rng.random_range(1..=tris.len());
    let mut chosen = vec![tris[rng.random_range(0..tris.len())]];
    while chosen.len() < want {
        let cand: Vec<Simplex> = tris
            .iter()
            .filter(|t| !chosen.contains(t) && chosen.iter().any(|c| c.vertices().iter().filter(|v| t.contains_vertex(**v)).count() >= 2))
            .copied()
            .collect();
        if cand.is_empty() {
            break;
        }
        chosen.push(cand[rng.random_range(0..cand.len())]);
    }
    let k = build_complex(&chosen);
    if is_combinatorial_surface(&k) {
        k
    } else {
        base.clone()
    }
}

/// The cell complex of a surface: one triangular face per triangle, glued along shared edges.
pub fn triangle_cells(k: &SimplicialComplex) -> CellComplex {
    k.triangles().iter().fold(CellComplex::new(), |acc, t| {
        let v = t.vertices();
        acc.disjoint_union(&CellComplex::from_triangle(v[0], v[1], v[2]))
    })
}

/// Real edges of `cc` that still occur in some word.
pub fn live_real_edges(cc: &CellComplex) -> Vec<u32> {
    let mut out: Vec<u32> = cc.letters().filter(|l| matches!(cc.edges[l.edge as usize], EdgeKind::Real { .. })).map(|l| l.edge).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Vertices still touched by some letter but by no real edge.
pub fn dummy_only_vertices(cc: &CellComplex, candidates: &[u32]) -> Vec<u32> {
    candidates
        .iter()
        .copied()
        .filter(|&x| {
            cc.vertex_is_used(x) && !cc.letters().any(|l| matches!(cc.edges[l.edge as usize], EdgeKind::Real { .. }) && cc.touches(l, x))
        })
        .collect()
}

/// Eliminates every edge and vertex of the triangle cells of surface `k` in random order,
/// returning each intermediate complex.
pub fn random_elimination<R: Rng>(rng: &mut R, k: &SimplicialComplex) -> Result<Vec<CellComplex>, String> {
    let boundary = complex_boundary(k);
    let verts = k.vertices();
    let mut cc = triangle_cells(k);
    let mut out = Vec::new();
    loop {
        let live = live_real_edges(&cc);
        if live.is_empty() {
            break;
        }
        let e = live[rng.random_range(0..live.len())];
        let EdgeKind::Real { u, v } = cc.edges[e as usize] else { unreachable!() };
        cc = cc.remove_edge(e, boundary.contains(&Simplex::edge(u, v))).map_err(|err| format!("edge {u}-{v}: {err}"))?;
        out.push(cc.clone());
        for x in dummy_only_vertices(&cc, &verts) {
            cc = cc.remove_vertex(x, boundary.contains(&Simplex::vertex(x))).map_err(|err| format!("vertex {x}: {err}"))?;
            out.push(cc.clone());
        }
    }
    Ok(out)
}
