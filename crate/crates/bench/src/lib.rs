//! Benchmark workloads shared by the criterion benches.

use subsurf_core::complex::{build_complex, Simplex, SimplicialComplex};
use subsurf_core::fixtures::standard_surfaces;
use subsurf_core::hardgen::reduce_dcp;
use subsurf_core::oracle::Digraph;

/// Named standard surfaces.
pub fn surfaces() -> Vec<(&'static str, SimplicialComplex)> {
    standard_surfaces().into_iter().map(|(n, k, _)| (n, k)).collect()
}

/// The hard instance of a directed cycle on `n` vertices with one chord back.
pub fn hard_cycle(n: usize) -> SimplicialComplex {
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    if n > 2 {
        edges.push((1, 0));
    }
    reduce_dcp(&Digraph::new(n, edges), None, 1).expect("reduction succeeds").complex
}

/// A strip of `n` consecutive triangles.
pub fn strip(n: u32) -> SimplicialComplex {
    build_complex(&(0..n).map(|i| Simplex::triangle(i, i + 1, i + 2)).collect::<Vec<_>>())
}
