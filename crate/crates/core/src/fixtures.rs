//! Standard triangulated surfaces and a direct triangulation of polygon word systems.

use std::collections::HashMap;

use crate::cellalg::{Annotation, CellComplex};
use crate::complex::{build_complex, classify_surface, ComplexError, Simplex, SimplicialComplex, SurfaceSummary, UnionFind, Vertex};

/// Signed label: `(label, inverted)`.
pub type SignedLabel = (u32, bool);

/// Small triangulations of the classical surfaces with their expected types.
pub fn standard_surfaces() -> Vec<(&'static str, SimplicialComplex, SurfaceSummary)> {
    let torus: Vec<[u32; 3]> = (0..7).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]).collect();
    let rp2 = [[1, 2, 3], [1, 3, 4], [1, 4, 5], [1, 5, 6], [1, 6, 2], [2, 3, 5], [3, 4, 6], [4, 5, 2], [5, 6, 3], [6, 2, 4]];
    let mobius: Vec<[u32; 3]> = (0..5).map(|i| [i, (i + 1) % 5, (i + 2) % 5]).collect();
    let annulus = [[0, 1, 3], [1, 3, 4], [1, 2, 4], [2, 4, 5], [2, 0, 5], [0, 5, 3]];
    vec![
        ("sphere", SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]), SurfaceSummary::new(true, 0, 0)),
        ("torus", SimplicialComplex::from_triangles(&torus), SurfaceSummary::new(true, 1, 0)),
        (
            "genus-2",
            realize_words(&[(
                vec![vec![(1, false), (2, false), (1, true), (2, true), (3, false), (4, false), (3, true), (4, true)]],
                Annotation::default(),
            )]),
            SurfaceSummary::new(true, 2, 0),
        ),
        ("projective-plane", SimplicialComplex::from_triangles(&rp2), SurfaceSummary::new(false, 1, 0)),
        (
            "klein-bottle",
            realize_words(&[(vec![vec![(1, false), (1, false), (2, false), (2, false)]], Annotation::default())]),
            SurfaceSummary::new(false, 2, 0),
        ),
        ("disk", SimplicialComplex::from_triangles(&[[0, 1, 2]]), SurfaceSummary::new(true, 0, 1)),
        ("annulus", SimplicialComplex::from_triangles(&annulus), SurfaceSummary::new(true, 0, 2)),
        ("mobius-strip", SimplicialComplex::from_triangles(&mobius), SurfaceSummary::new(false, 1, 1)),
    ]
}

/// Triangulates a system of faces, each a list of boundary words over signed labels plus an
/// annotation realised by extra handles, crosscaps and holes. Labels used twice are glued;
/// labels used once become boundary. Each label is subdivided into three segments and each
/// face is coned off through an inner ring, so the result is a genuine simplicial complex.
pub fn realize_words(faces: &[(Vec<Vec<SignedLabel>>, Annotation)]) -> SimplicialComplex {
    let mut fresh = faces.iter().flat_map(|(c, _)| c.iter().flatten().map(|l| l.0)).max().unwrap_or(0) + 1;
    let mut take = || {
        fresh += 1;
        fresh - 1
    };
    let words: Vec<Vec<SignedLabel>> = faces
        .iter()
        .map(|(comps, ann)| {
            let mut w: Vec<SignedLabel> = Vec::new();
            for (i, c) in comps.iter().enumerate() {
                if i == 0 {
                    w.extend(c);
                } else {
                    let b = take();
                    w.push((b, false));
                    w.extend(c);
                    w.push((b, true));
                }
            }
            for _ in 0..ann.genus {
                if ann.orientable {
                    let (p, q) = (take(), take());
                    w.extend([(p, false), (q, false), (p, true), (q, true)]);
                } else {
                    let r = take();
                    w.extend([(r, false), (r, false)]);
                }
            }
            for _ in 0..ann.boundaries {
                let (t, u) = (take(), take());
                w.extend([(t, false), (u, false), (t, true)]);
            }
            if w.is_empty() {
                let x = take();
                w.extend([(x, false), (x, true)]);
            }
            w
        })
        .collect();

    // Points: for each label, tail/head corners and two interior points.
    let mut label_ix: HashMap<u32, usize> = HashMap::new();
    for w in &words {
        for &(l, _) in w {
            let n = label_ix.len();
            label_ix.entry(l).or_insert(n);
        }
    }
    let nl = label_ix.len();
    let corner = |l: u32, head: bool| 2 * label_ix[&l] + head as usize;
    let mut uf = UnionFind::new(2 * nl);
    for w in &words {
        let n = w.len();
        for i in 0..n {
            let (x, y) = (w[i], w[(i + 1) % n]);
            uf.union(corner(x.0, !x.1), corner(y.0, y.1));
        }
    }
    let mut ids: HashMap<(u8, usize), Vertex> = HashMap::new();
    let mut next: Vertex = 0;
    let mut vid = |key: (u8, usize)| -> Vertex {
        *ids.entry(key).or_insert_with(|| {
            next += 1;
            next - 1
        })
    };
    let mut tris = Vec::new();
    for (fi, w) in words.iter().enumerate() {
        let mut ring: Vec<Vertex> = Vec::new();
        for &(l, inv) in w {
            let li = label_ix[&l];
            ring.push(vid((0, uf.find(corner(l, inv)))));
            let (p, q) = if inv { (2, 1) } else { (1, 2) };
            ring.push(vid((p, li)));
            ring.push(vid((q, li)));
        }
        let m = ring.len();
        let inner: Vec<Vertex> = (0..m).map(|i| vid((3, fi * 1_000_000 + i))).collect();
        let c = vid((4, fi));
        for i in 0..m {
            let j = (i + 1) % m;
            tris.push(Simplex::triangle(c, inner[i], inner[j]));
            tris.push(Simplex::triangle(inner[i], ring[i], ring[j]));
            tris.push(Simplex::triangle(inner[i], inner[j], ring[j]));
        }
    }
    build_complex(&tris)
}

/// Words of a cell complex as signed labels, with edge ids as labels.
pub fn cell_complex_words(cc: &CellComplex) -> Vec<(Vec<Vec<SignedLabel>>, Annotation)> {
    cc.faces.iter().map(|f| (f.comps.iter().map(|c| c.iter().map(|l| (l.edge, l.inv)).collect()).collect(), f.ann)).collect()
}

/// Topological type of a cell complex, computed by triangulating its words.
pub fn word_classification(cc: &CellComplex) -> Result<Vec<SurfaceSummary>, ComplexError> {
    classify_surface(&realize_words(&cell_complex_words(cc)))
}
