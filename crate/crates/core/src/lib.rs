//! Deciding whether a simplicial 2-complex contains a subsurface of a prescribed type,
//! by dynamic programming over a nice tree decomposition of its Hasse diagram.

pub mod cellalg;
pub mod complex;
pub mod decomp;
pub mod dpengine;
pub mod fixtures;
pub mod hardgen;
pub mod linkcheck;
pub mod oracle;

pub use complex::{Simplex, SimplicialComplex, SurfaceSummary, Vertex};
pub use dpengine::{solve, Instance, ProblemSpec, SolveOptions, SolveResult};
