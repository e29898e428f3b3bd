mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subsurf_core::complex::{build_complex, link, Simplex, SimplicialComplex};
use subsurf_core::dpengine::{solve_observed, Instance, NodeView, ProblemSpec, SolveOptions};
use subsurf_core::linkcheck::{edge_status, vertex_link_status, Status};

/// Vertices of degree one and whether `l` is a single simple path or cycle.
fn link_kind(l: &SimplicialComplex) -> (usize, Vec<u32>, bool) {
    let verts = l.vertices();
    let edges = l.edges();
    let deg = |v: u32| edges.iter().filter(|e| e.contains_vertex(v)).count();
    let ends: Vec<u32> = verts.iter().copied().filter(|&v| deg(v) == 1).collect();
    let simple = verts.iter().all(|&v| (1..=2).contains(&deg(v))) && l.components().len() == 1;
    (verts.len(), ends, simple)
}

fn vertex_complete(sigma: &SimplicialComplex, b: &SimplicialComplex, v: u32) -> bool {
    let in_b = b.contains(&Simplex::vertex(v));
    if !sigma.contains(&Simplex::vertex(v)) {
        return !in_b;
    }
    let (n, ends, simple) = link_kind(&link(sigma, &Simplex::vertex(v)));
    if !simple || n == 0 {
        return false;
    }
    if in_b {
        ends.len() == 2 && ends.iter().all(|&x| b.contains(&Simplex::edge(v, x)))
    } else {
        ends.is_empty()
    }
}

fn edge_complete(sigma: &SimplicialComplex, b: &SimplicialComplex, e: Simplex) -> bool {
    let d = sigma.edge_degree(&e);
    if b.contains(&e) {
        d == 1
    } else {
        d == 0 || d == 2
    }
}

fn shadow(k: &SimplicialComplex, b: &SimplicialComplex) -> usize {
    let mut checked = 0;
    let mut failures: Vec<String> = Vec::new();
    let mut obs = |view: &NodeView<'_>| {
        for (cc, tris) in &view.entries {
            let sigma = build_complex(tris);
            for &x in &view.nice.bag {
                let s = view.hasse.simplices[x];
                match s.dim() {
                    0 => {
                        let v = s.vertices()[0];
                        let got = vertex_link_status(cc, v, b.contains(&s), &|p, q| b.contains(&Simplex::edge(p, q))) == Status::Complete;
                        if got != vertex_complete(&sigma, b, v) {
                            failures.push(format!("vertex {v} in {sigma:?}: linkcheck {got}"));
                        }
                        checked += 1;
                    }
                    1 => {
                        let [p, q] = [s.vertices()[0], s.vertices()[1]];
                        let got = edge_status(cc, p, q, b.contains(&s)) == Status::Complete;
                        if got != edge_complete(&sigma, b, s) {
                            failures.push(format!("edge {s} in {sigma:?}: linkcheck {got}"));
                        }
                        checked += 1;
                    }
                    _ => {}
                }
            }
        }
    };
    let inst = Instance { complex: k.clone(), boundary: b.clone(), spec: ProblemSpec::Sp { components: 1 } };
    solve_observed(&inst, &SolveOptions { want_witness: false, ..Default::default() }, Some(&mut obs)).unwrap();
    assert!(failures.is_empty(), "{} disagreements on {k:?} with boundary {b:?}, first: {}", failures.len(), failures[0]);
    checked
}

#[test]
fn linkcheck_agrees_with_links_on_small_complexes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut complexes = 0;
    for seed in common::seeds() {
        for k in common::all_closures(&seed) {
            if k.triangles().len() > 7 {
                continue;
            }
            complexes += 1;
            checked += shadow(&k, &SimplicialComplex::new());
            let b = common::random_boundary(&mut rng, &k);
            if !b.is_empty() {
                checked += shadow(&k, &b);
            }
        }
    }
    assert!(complexes > 2000);
    assert!(checked > 10_000);
}
