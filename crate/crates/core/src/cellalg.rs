//! Annotated cell complexes: faces bounded by cyclic words over real and dummy edges,
//! each face carrying the topology already absorbed into it.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::complex::{SurfaceSummary, Vertex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("edge {0} occurs {1} times")]
    BadMultiplicity(EdgeId, usize),
    #[error("rewrite precondition failed: {0}")]
    Precondition(&'static str),
    #[error("edge {0} occurs once but is not a boundary edge")]
    NotBoundary(EdgeId),
    #[error("vertex {0} cannot be removed: {1}")]
    VertexRemoval(Vertex, &'static str),
}

pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    /// A 1-simplex `{u, v}` with `u < v`, oriented `u -> v`.
    Real { u: Vertex, v: Vertex },
    /// Stands for a forgotten stretch of the prescribed boundary; may be a loop.
    BoundaryDummy { tail: Vertex, head: Vertex },
    /// Keeps an interior vertex alive after all its real edges are gone.
    InteriorDummy { anchor: Vertex },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub edge: EdgeId,
    pub inv: bool,
}

impl Letter {
    pub fn fwd(edge: EdgeId) -> Self {
        Letter { edge, inv: false }
    }

    pub fn inverse(self) -> Self {
        Letter { edge: self.edge, inv: !self.inv }
    }
}

pub type Word = Vec<Letter>;

pub fn invert_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Topology absorbed into a face. Non-orientable genus counts crosscaps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Annotation {
    pub orientable: bool,
    pub genus: u32,
    pub boundaries: u32,
}

impl Default for Annotation {
    fn default() -> Self {
        Annotation { orientable: true, genus: 0, boundaries: 0 }
    }
}

impl Annotation {
    pub fn new(orientable: bool, genus: u32, boundaries: u32) -> Self {
        Annotation { orientable, genus, boundaries }
    }

    pub fn summary(self) -> SurfaceSummary {
        SurfaceSummary::new(self.orientable, self.genus, self.boundaries)
    }

    /// Connected sum of the two annotated pieces.
    pub fn merge(self, o: Annotation) -> Annotation {
        let boundaries = self.boundaries + o.boundaries;
        match (self.orientable, o.orientable) {
            (true, true) => Annotation::new(true, self.genus + o.genus, boundaries),
            (false, false) => Annotation::new(false, self.genus + o.genus, boundaries),
            (true, false) => Annotation::new(false, 2 * self.genus + o.genus, boundaries),
            (false, true) => Annotation::new(false, self.genus + 2 * o.genus, boundaries),
        }
    }

    pub fn with_handle(self) -> Annotation {
        let g = if self.orientable { self.genus + 1 } else { self.genus + 2 };
        Annotation { genus: g, ..self }
    }

    pub fn with_crosscap(self) -> Annotation {
        let g = if self.orientable { 2 * self.genus + 1 } else { self.genus + 1 };
        Annotation { orientable: false, genus: g, boundaries: self.boundaries }
    }

    pub fn with_crosshandle(self) -> Annotation {
        let g = if self.orientable { 2 * self.genus + 2 } else { self.genus + 2 };
        Annotation { orientable: false, genus: g, boundaries: self.boundaries }
    }

    pub fn with_boundary(self) -> Annotation {
        Annotation { boundaries: self.boundaries + 1, ..self }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.orientable { "or" } else { "nonor" };
        write!(f, "[{o} g={} b={}]", self.genus, self.boundaries)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Face {
    pub comps: Vec<Word>,
    pub ann: Annotation,
}

impl Face {
    pub fn invert(&mut self) {
        for c in &mut self.comps {
            *c = invert_word(c);
        }
    }

    pub fn is_empty_face(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn max_word_len(&self) -> usize {
        self.comps.iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub face: usize,
    pub comp: usize,
    pub pos: usize,
    pub inv: bool,
}

/// The rewrite that applies to an edge, in the order they are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteCase {
    MergeFaces,
    SplitComponents,
    Crosscap,
    Handle,
    Crosshandle,
    CancelAdjacent,
    BoundaryDummy,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CellComplex {
    pub edges: Vec<EdgeKind>,
    pub faces: Vec<Face>,
}

fn rotate_to_end(w: &[Letter], p: usize) -> Word {
    let n = w.len();
    (0..n).map(|i| w[(p + 1 + i) % n]).collect()
}

impl CellComplex {
    pub fn new() -> Self {
        Self::default()
    }

    /// A single triangular face with boundary `a -> b -> c -> a` for sorted `a < b < c`.
    pub fn from_triangle(a: Vertex, b: Vertex, c: Vertex) -> Self {
        let mut v = [a, b, c];
        v.sort_unstable();
        let [a, b, c] = v;
        let mut cc = CellComplex::new();
        let ab = cc.real_edge(a, b);
        let bc = cc.real_edge(b, c);
        let ac = cc.real_edge(a, c);
        cc.faces
            .push(Face { comps: vec![vec![Letter::fwd(ab), Letter::fwd(bc), Letter { edge: ac, inv: true }]], ann: Annotation::default() });
        cc
    }

    pub fn find_real(&self, a: Vertex, b: Vertex) -> Option<EdgeId> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().position(|e| *e == EdgeKind::Real { u, v }).map(|i| i as EdgeId)
    }

    /// Id of the real edge `{a, b}`, adding it to the table if needed.
    pub fn real_edge(&mut self, a: Vertex, b: Vertex) -> EdgeId {
        assert_ne!(a, b);
        if let Some(id) = self.find_real(a, b) {
            return id;
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.push_edge(EdgeKind::Real { u, v })
    }

    pub fn push_edge(&mut self, k: EdgeKind) -> EdgeId {
        self.edges.push(k);
        (self.edges.len() - 1) as EdgeId
    }

    pub fn tail(&self, l: Letter) -> Option<Vertex> {
        if l.inv {
            self.head_fwd(l.edge)
        } else {
            self.tail_fwd(l.edge)
        }
    }

    pub fn head(&self, l: Letter) -> Option<Vertex> {
        if l.inv {
            self.tail_fwd(l.edge)
        } else {
            self.head_fwd(l.edge)
        }
    }

    fn tail_fwd(&self, e: EdgeId) -> Option<Vertex> {
        match self.edges[e as usize] {
            EdgeKind::Real { u, .. } => Some(u),
            EdgeKind::BoundaryDummy { tail, .. } => Some(tail),
            EdgeKind::InteriorDummy { anchor } => Some(anchor),
        }
    }

    fn head_fwd(&self, e: EdgeId) -> Option<Vertex> {
        match self.edges[e as usize] {
            EdgeKind::Real { v, .. } => Some(v),
            EdgeKind::BoundaryDummy { head, .. } => Some(head),
            EdgeKind::InteriorDummy { .. } => None,
        }
    }

    pub fn touches(&self, l: Letter, x: Vertex) -> bool {
        self.tail(l) == Some(x) || self.head(l) == Some(x)
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.faces.iter().flat_map(|f| f.comps.iter().flat_map(|c| c.iter().copied()))
    }

    pub fn occurrences(&self, e: EdgeId) -> Vec<Occurrence> {
        let mut out = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (ci, c) in f.comps.iter().enumerate() {
                for (pi, l) in c.iter().enumerate() {
                    if l.edge == e {
                        out.push(Occurrence { face: fi, comp: ci, pos: pi, inv: l.inv });
                    }
                }
            }
        }
        out
    }

    pub fn vertex_is_used(&self, x: Vertex) -> bool {
        self.letters().any(|l| self.touches(l, x))
    }

    pub fn empty_faces(&self) -> impl Iterator<Item = &Face> + '_ {
        self.faces.iter().filter(|f| f.is_empty_face())
    }

    pub fn max_word_len(&self) -> usize {
        self.faces.iter().map(|f| f.max_word_len()).max().unwrap_or(0)
    }

    /// Disjoint union of faces; real edges with equal endpoints are identified.
    pub fn disjoint_union(&self, other: &CellComplex) -> CellComplex {
        let mut out = self.clone();
        let map: Vec<EdgeId> = other
            .edges
            .iter()
            .map(|k| match *k {
                EdgeKind::Real { u, v } => out.real_edge(u, v),
                k => out.push_edge(k),
            })
            .collect();
        for f in &other.faces {
            let comps = f.comps.iter().map(|c| c.iter().map(|l| Letter { edge: map[l.edge as usize], inv: l.inv }).collect()).collect();
            out.faces.push(Face { comps, ann: f.ann });
        }
        out
    }

    /// Drops unused edge table entries and renumbers letters.
    pub fn compact(&mut self) {
        let mut used = vec![false; self.edges.len()];
        for l in self.letters() {
            used[l.edge as usize] = true;
        }
        let mut map = vec![u32::MAX; self.edges.len()];
        let mut edges = Vec::new();
        for (i, k) in self.edges.iter().enumerate() {
            if used[i] {
                map[i] = edges.len() as u32;
                edges.push(*k);
            }
        }
        for f in &mut self.faces {
            for c in &mut f.comps {
                for l in c.iter_mut() {
                    l.edge = map[l.edge as usize];
                }
            }
        }
        self.edges = edges;
    }

    fn drop_empty_comps(&mut self, fi: usize) {
        self.faces[fi].comps.retain(|c| !c.is_empty());
    }

    /// Which rewrite removes `e`.
    pub fn case_for(&self, e: EdgeId) -> Result<RewriteCase, CellError> {
        let occ = self.occurrences(e);
        match occ.len() {
            1 => Ok(RewriteCase::BoundaryDummy),
            2 => {
                let (a, b) = (occ[0], occ[1]);
                if a.face != b.face {
                    return Ok(RewriteCase::MergeFaces);
                }
                if a.comp != b.comp {
                    return Ok(if a.inv == b.inv { RewriteCase::Crosshandle } else { RewriteCase::Handle });
                }
                if a.inv == b.inv {
                    return Ok(RewriteCase::Crosscap);
                }
                let n = self.faces[a.face].comps[a.comp].len();
                let adjacent = b.pos == a.pos + 1 || (a.pos == 0 && b.pos == n - 1);
                Ok(if adjacent { RewriteCase::CancelAdjacent } else { RewriteCase::SplitComponents })
            }
            k => Err(CellError::BadMultiplicity(e, k)),
        }
    }

    fn two(&self, e: EdgeId, want: RewriteCase, msg: &'static str) -> Result<(Occurrence, Occurrence), CellError> {
        if self.case_for(e)? != want {
            return Err(CellError::Precondition(msg));
        }
        let o = self.occurrences(e);
        Ok((o[0], o[1]))
    }

    /// `(X a) + (a^-1 Y) -> (X Y)` across two faces, inverting the second face if needed.
    pub fn merge_faces_at_edge(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::MergeFaces, "edge must occur in two different faces")?;
        let mut out = self.clone();
        let mut f2 = out.faces[b.face].clone();
        let mut bpos = b.pos;
        if a.inv == b.inv {
            f2.invert();
            bpos = f2.comps[b.comp].len() - 1 - b.pos;
        }
        let f1 = &out.faces[a.face];
        let x = rotate_to_end(&f1.comps[a.comp], a.pos);
        let y = rotate_to_end(&f2.comps[b.comp], bpos);
        let mut merged = x[..x.len() - 1].to_vec();
        merged.extend_from_slice(&y[..y.len() - 1]);
        let mut comps: Vec<Word> = f1.comps.iter().enumerate().filter(|(i, _)| *i != a.comp).map(|(_, c)| c.clone()).collect();
        comps.extend(f2.comps.iter().enumerate().filter(|(i, _)| *i != b.comp).map(|(_, c)| c.clone()));
        comps.push(merged);
        let ann = f1.ann.merge(f2.ann);
        out.faces[a.face] = Face { comps, ann };
        out.faces.remove(b.face);
        out.drop_empty_comps(a.face);
        Ok(out)
    }

    /// `(X a Y a^-1) -> (X)(Y)` for non-adjacent occurrences.
    pub fn split_boundary_components(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::SplitComponents, "edge must occur twice non-adjacently with opposite signs in one word")?;
        let mut out = self.clone();
        let w = out.faces[a.face].comps[a.comp].clone();
        let x: Word = w[b.pos + 1..].iter().chain(w[..a.pos].iter()).copied().collect();
        let y: Word = w[a.pos + 1..b.pos].to_vec();
        let comps = &mut out.faces[a.face].comps;
        comps[a.comp] = x;
        comps.push(y);
        out.drop_empty_comps(a.face);
        Ok(out)
    }

    /// `(X a Y a) -> (Y^-1 X)`.
    pub fn absorb_crosscap(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::Crosscap, "edge must occur twice with equal signs in one word")?;
        let mut out = self.clone();
        let w = out.faces[a.face].comps[a.comp].clone();
        let x: Vec<Letter> = w[b.pos + 1..].iter().chain(w[..a.pos].iter()).copied().collect();
        let mut r = invert_word(&w[a.pos + 1..b.pos]);
        r.extend(x);
        let f = &mut out.faces[a.face];
        f.comps[a.comp] = r;
        f.ann = f.ann.with_crosscap();
        out.drop_empty_comps(a.face);
        Ok(out)
    }

    fn two_comps(&self, a: Occurrence, b: Occurrence) -> (Word, Word) {
        let f = &self.faces[a.face];
        let x = rotate_to_end(&f.comps[a.comp], a.pos);
        let y = rotate_to_end(&f.comps[b.comp], b.pos);
        (x[..x.len() - 1].to_vec(), y[..y.len() - 1].to_vec())
    }

    fn replace_two_comps(&mut self, a: Occurrence, b: Occurrence, w: Word) {
        let f = &mut self.faces[a.face];
        let (lo, hi) = if a.comp < b.comp { (a.comp, b.comp) } else { (b.comp, a.comp) };
        f.comps.remove(hi);
        f.comps[lo] = w;
        self.drop_empty_comps(a.face);
    }

    /// `(X a)(Y a^-1) -> (Y X)`.
    pub fn absorb_handle(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::Handle, "edge must occur with opposite signs in two words of one face")?;
        let mut out = self.clone();
        let (x, y) = out.two_comps(a, b);
        let mut w = y;
        w.extend(x);
        out.replace_two_comps(a, b, w);
        let f = &mut out.faces[a.face];
        f.ann = f.ann.with_handle();
        Ok(out)
    }

    /// `(X a)(Y a) -> (X Y^-1)`.
    pub fn absorb_crosshandle(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::Crosshandle, "edge must occur with equal signs in two words of one face")?;
        let mut out = self.clone();
        let (x, y) = out.two_comps(a, b);
        let mut w = x;
        w.extend(invert_word(&y));
        out.replace_two_comps(a, b, w);
        let f = &mut out.faces[a.face];
        f.ann = f.ann.with_crosshandle();
        Ok(out)
    }

    /// Cancels `a a^-1` without any bookkeeping for orphaned endpoints.
    pub fn cancel_adjacent_plain(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let (a, b) = self.two(e, RewriteCase::CancelAdjacent, "edge must occur as adjacent inverse letters")?;
        let mut out = self.clone();
        let c = &mut out.faces[a.face].comps[a.comp];
        c.remove(b.pos);
        c.remove(a.pos);
        out.drop_empty_comps(a.face);
        Ok(out)
    }

    /// Cancels `a a^-1`; each endpoint left without any edge gets an interior dummy component.
    pub fn cancel_adjacent_inverse(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let face = self.occurrences(e).first().map(|o| o.face);
        let mut out = self.cancel_adjacent_plain(e)?;
        let face = face.unwrap();
        let mut ends = vec![self.tail_fwd(e), self.head_fwd(e)];
        ends.dedup();
        for x in ends.into_iter().flatten() {
            if !out.vertex_is_used(x) {
                let d = out.push_edge(EdgeKind::InteriorDummy { anchor: x });
                out.faces[face].comps.push(vec![Letter::fwd(d), Letter { edge: d, inv: true }]);
            }
        }
        Ok(out)
    }

    /// Replaces the single occurrence of a boundary edge by a dummy with the same endpoints.
    pub fn replace_with_boundary_dummy(&self, e: EdgeId) -> Result<CellComplex, CellError> {
        let occ = self.occurrences(e);
        if occ.len() != 1 {
            return Err(CellError::Precondition("edge must occur exactly once"));
        }
        let o = occ[0];
        let l = self.faces[o.face].comps[o.comp][o.pos];
        let (tail, head) = (self.tail(l).unwrap(), self.head(l).unwrap());
        let mut out = self.clone();
        let d = out.push_edge(EdgeKind::BoundaryDummy { tail, head });
        out.faces[o.face].comps[o.comp][o.pos] = Letter::fwd(d);
        Ok(out)
    }

    /// Removes every occurrence of `e` by the applicable rewrite. Absent edges are a no-op.
    pub fn remove_edge(&self, e: EdgeId, in_boundary: bool) -> Result<CellComplex, CellError> {
        let n = self.occurrences(e).len();
        if n == 0 {
            return Ok(self.clone());
        }
        match self.case_for(e)? {
            RewriteCase::MergeFaces => self.merge_faces_at_edge(e),
            RewriteCase::SplitComponents => self.split_boundary_components(e),
            RewriteCase::Crosscap => self.absorb_crosscap(e),
            RewriteCase::Handle => self.absorb_handle(e),
            RewriteCase::Crosshandle => self.absorb_crosshandle(e),
            RewriteCase::CancelAdjacent => self.cancel_adjacent_inverse(e),
            RewriteCase::BoundaryDummy if in_boundary => self.replace_with_boundary_dummy(e),
            RewriteCase::BoundaryDummy => Err(CellError::NotBoundary(e)),
        }
    }

    /// Removes the real edge `{a, b}` if present.
    pub fn remove_real_edge(&self, a: Vertex, b: Vertex, in_boundary: bool) -> Result<CellComplex, CellError> {
        match self.find_real(a, b) {
            Some(e) => self.remove_edge(e, in_boundary),
            None => Ok(self.clone()),
        }
    }

    /// Removes a vertex whose only remaining edges are dummies.
    pub fn remove_vertex(&self, x: Vertex, in_boundary: bool) -> Result<CellComplex, CellError> {
        let mut at: Vec<(usize, usize, usize)> = Vec::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for (ci, c) in f.comps.iter().enumerate() {
                for (pi, &l) in c.iter().enumerate() {
                    if self.touches(l, x) {
                        if matches!(self.edges[l.edge as usize], EdgeKind::Real { .. }) {
                            return Err(CellError::VertexRemoval(x, "a real edge is still attached"));
                        }
                        at.push((fi, ci, pi));
                    }
                }
            }
        }
        if at.is_empty() {
            return Ok(self.clone());
        }
        let mut out = self.clone();
        if !in_boundary {
            let (fi, ci, _) = at[0];
            let c = &self.faces[fi].comps[ci];
            let ok = at.len() == 2
                && c.len() == 2
                && at.iter().all(|&(f, k, _)| f == fi && k == ci)
                && matches!(self.edges[c[0].edge as usize], EdgeKind::InteriorDummy { anchor } if anchor == x);
            if !ok {
                return Err(CellError::VertexRemoval(x, "interior vertex is not a lone dummy component"));
            }
            out.faces[fi].comps.remove(ci);
            return Ok(out);
        }
        for &(fi, ci, _) in &at {
            let c = &self.faces[fi].comps[ci];
            if c.len() == 1 {
                let l = c[0];
                if self.tail(l) == Some(x) && self.head(l) == Some(x) {
                    let f = &mut out.faces[fi];
                    f.comps.remove(ci);
                    f.ann = f.ann.with_boundary();
                    return Ok(out);
                }
            }
        }
        for &(fi, ci, pi) in &at {
            let c = &self.faces[fi].comps[ci];
            let n = c.len();
            let (p, q) = (c[pi], c[(pi + 1) % n]);
            let both_dummies = [p, q].iter().all(|l| matches!(self.edges[l.edge as usize], EdgeKind::BoundaryDummy { .. }));
            if n >= 2 && p.edge != q.edge && both_dummies && self.head(p) == Some(x) && self.tail(q) == Some(x) {
                let d = out.push_edge(EdgeKind::BoundaryDummy { tail: self.tail(p).unwrap(), head: self.head(q).unwrap() });
                let w = &mut out.faces[fi].comps[ci];
                let nw: Word = (0..n)
                    .filter_map(|i| {
                        if i == pi {
                            Some(Letter::fwd(d))
                        } else if i == (pi + 1) % n {
                            None
                        } else {
                            Some(w[i])
                        }
                    })
                    .collect();
                *w = nw;
                return Ok(out);
            }
        }
        Err(CellError::VertexRemoval(x, "boundary vertex does not join two boundary dummies"))
    }

    /// Sets every annotation to the null annotation.
    pub fn strip_annotations(&mut self) {
        for f in &mut self.faces {
            f.ann = Annotation::default();
        }
    }

    fn symbol(&self, l: Letter) -> [u32; 3] {
        match self.edges[l.edge as usize] {
            EdgeKind::Real { .. } => [0, self.tail(l).unwrap(), self.head(l).unwrap()],
            EdgeKind::BoundaryDummy { tail, head } if tail == head => [1, tail, head],
            EdgeKind::BoundaryDummy { .. } => [1, self.tail(l).unwrap(), self.head(l).unwrap()],
            EdgeKind::InteriorDummy { anchor } => [2, anchor, l.inv as u32],
        }
    }

    fn canon_word(&self, w: &[Letter]) -> Vec<[u32; 3]> {
        let s: Vec<[u32; 3]> = w.iter().map(|&l| self.symbol(l)).collect();
        let n = s.len();
        (0..n).map(|r| s[r..].iter().chain(s[..r].iter()).copied().collect::<Vec<_>>()).min().unwrap_or_default()
    }

    fn canon_face(&self, f: &Face, with_ann: bool) -> (Annotation, Vec<Vec<[u32; 3]>>) {
        let mut fwd: Vec<Vec<[u32; 3]>> = f.comps.iter().map(|c| self.canon_word(c)).collect();
        let mut bwd: Vec<Vec<[u32; 3]>> = f.comps.iter().map(|c| self.canon_word(&invert_word(c))).collect();
        fwd.sort();
        bwd.sort();
        let ann = if with_ann { f.ann } else { Annotation::default() };
        (ann, fwd.min(bwd))
    }

    /// Byte string identifying the complex up to face reordering, word rotation,
    /// face reversal and relabelling of dummy edges.
    pub fn canonical_key(&self, with_annotations: bool) -> CanonicalKey {
        let mut faces: Vec<(Annotation, Vec<Vec<[u32; 3]>>)> = self.faces.iter().map(|f| self.canon_face(f, with_annotations)).collect();
        faces.sort();
        let mut out: Vec<u8> = Vec::new();
        let put = |x: u32, out: &mut Vec<u8>| out.extend_from_slice(&x.to_be_bytes());
        put(faces.len() as u32, &mut out);
        for (ann, comps) in faces {
            put(ann.orientable as u32, &mut out);
            put(ann.genus, &mut out);
            put(ann.boundaries, &mut out);
            put(comps.len() as u32, &mut out);
            for c in comps {
                put(c.len() as u32, &mut out);
                for s in c {
                    for x in s {
                        put(x, &mut out);
                    }
                }
            }
        }
        CanonicalKey(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(pub Vec<u8>);

/// Fully reduces a single face with plain rewrites and returns the resulting annotation.
pub fn classify_word(cc: &CellComplex, face: usize) -> Result<Annotation, CellError> {
    let mut one = CellComplex { edges: cc.edges.clone(), faces: vec![cc.faces[face].clone()] };
    loop {
        let twice = {
            let mut count = vec![0usize; one.edges.len()];
            for l in one.letters() {
                count[l.edge as usize] += 1;
            }
            if let Some((e, &k)) = count.iter().enumerate().find(|(_, &k)| k > 2) {
                return Err(CellError::BadMultiplicity(e as EdgeId, k));
            }
            count.iter().position(|&k| k == 2)
        };
        let Some(e) = twice else { break };
        let e = e as EdgeId;
        one = match one.case_for(e)? {
            RewriteCase::SplitComponents => one.split_boundary_components(e)?,
            RewriteCase::Crosscap => one.absorb_crosscap(e)?,
            RewriteCase::Handle => one.absorb_handle(e)?,
            RewriteCase::Crosshandle => one.absorb_crosshandle(e)?,
            RewriteCase::CancelAdjacent => one.cancel_adjacent_plain(e)?,
            _ => unreachable!("a single face has no cross-face edges"),
        };
    }
    let f = &one.faces[0];
    Ok(Annotation { boundaries: f.ann.boundaries + f.comps.len() as u32, ..f.ann })
}

impl fmt::Display for CellComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, face) in self.faces.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            for c in &face.comps {
                write!(f, "(")?;
                for (j, l) in c.iter().enumerate() {
                    if j > 0 {
                        write!(f, " ")?;
                    }
                    let sign = if l.inv { '-' } else { '+' };
                    match self.edges[l.edge as usize] {
                        EdgeKind::Real { u, v } => write!(f, "{sign}r{u}.{v}")?,
                        EdgeKind::BoundaryDummy { tail, head } => write!(f, "{sign}b{tail}>{head}")?,
                        EdgeKind::InteriorDummy { anchor } => write!(f, "{sign}i{anchor}")?,
                    }
                }
                write!(f, ")")?;
            }
            write!(f, "{}", face.ann)?;
        }
        Ok(())
    }
}

/// Builds a one-face complex from abstract signed labels such as `[1, 2, -1, -2]`.
/// Each label becomes a real edge with private endpoints; only the word structure matters.
pub fn face_from_labels(comps: &[&[i32]], ann: Annotation) -> CellComplex {
    let mut cc = CellComplex::new();
    let mut ids = std::collections::BTreeMap::new();
    let mut words = Vec::new();
    for c in comps {
        let mut w = Vec::new();
        for &x in c.iter() {
            assert_ne!(x, 0);
            let k = x.unsigned_abs();
            let id = *ids.entry(k).or_insert_with(|| cc.push_edge(EdgeKind::Real { u: 2 * k, v: 2 * k + 1 }));
            w.push(Letter { edge: id, inv: x < 0 });
        }
        words.push(w);
    }
    cc.faces.push(Face { comps: words, ann });
    cc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(comps: &[&[i32]]) -> Annotation {
        classify_word(&face_from_labels(comps, Annotation::default()), 0).unwrap()
    }

    #[test]
    fn canonical_words() {
        assert_eq!(cw(&[&[1, -1]]), Annotation::new(true, 0, 0));
        assert_eq!(cw(&[&[1, 2, -1, -2]]), Annotation::new(true, 1, 0));
        assert_eq!(cw(&[&[1, 1]]), Annotation::new(false, 1, 0));
        assert_eq!(cw(&[&[1, 1, 2, 2]]), Annotation::new(false, 2, 0));
        assert_eq!(cw(&[&[1, 2, -1, 2]]), Annotation::new(false, 2, 0));
        assert_eq!(cw(&[&[1, 2, 3]]), Annotation::new(true, 0, 1));
        assert_eq!(cw(&[&[1, 2, -1, 3]]), Annotation::new(true, 0, 2));
        assert_eq!(cw(&[&[1, 2, -1, -2, 3, 4, -3, -4]]), Annotation::new(true, 2, 0));
        assert_eq!(cw(&[&[1, 2, -1, -2, 3, 3]]), Annotation::new(false, 3, 0));
        assert_eq!(cw(&[&[1], &[2]]), Annotation::new(true, 0, 2));
    }

    #[test]
    fn annotation_merge_rules() {
        let t = Annotation::new(true, 1, 1);
        let p = Annotation::new(false, 1, 0);
        assert_eq!(t.merge(t), Annotation::new(true, 2, 2));
        assert_eq!(t.merge(p), Annotation::new(false, 3, 1));
        assert_eq!(p.merge(t), Annotation::new(false, 3, 1));
        assert_eq!(p.merge(p), Annotation::new(false, 2, 0));
        assert_eq!(Annotation::default().with_crosshandle(), Annotation::new(false, 2, 0));
        assert_eq!(p.with_handle(), Annotation::new(false, 3, 0));
    }

    #[test]
    fn two_triangles_merge_into_a_square() {
        let a = CellComplex::from_triangle(0, 1, 2);
        let b = CellComplex::from_triangle(0, 2, 3);
        let u = a.disjoint_union(&b);
        assert_eq!(u.edges.len(), 5);
        let e = u.find_real(0, 2).unwrap();
        assert_eq!(u.case_for(e).unwrap(), RewriteCase::MergeFaces);
        let m = u.remove_edge(e, false).unwrap();
        assert_eq!(m.faces.len(), 1);
        assert_eq!(m.faces[0].comps[0].len(), 4);
    }

    #[test]
    fn tetrahedron_reduces_to_sphere() {
        let mut cc = CellComplex::new();
        for t in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            cc = cc.disjoint_union(&CellComplex::from_triangle(t[0], t[1], t[2]));
        }
        for (a, b) in [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] {
            cc = cc.remove_real_edge(a, b, false).unwrap();
        }
        for v in 0..4 {
            cc = cc.remove_vertex(v, false).unwrap();
        }
        assert_eq!(cc.faces.len(), 1);
        assert!(cc.faces[0].is_empty_face());
        assert_eq!(cc.faces[0].ann, Annotation::new(true, 0, 0));
    }

    #[test]
    fn single_triangle_with_boundary() {
        let mut cc = CellComplex::from_triangle(0, 1, 2);
        for (a, b) in [(0, 1), (1, 2), (0, 2)] {
            assert!(cc.remove_real_edge(a, b, false).is_err());
            cc = cc.remove_real_edge(a, b, true).unwrap();
        }
        for v in 0..3 {
            cc = cc.remove_vertex(v, true).unwrap();
        }
        assert_eq!(cc.faces[0].ann, Annotation::new(true, 0, 1));
        assert!(cc.faces[0].is_empty_face());
    }

    #[test]
    fn canonical_key_ignores_rotation_and_reversal() {
        let a = CellComplex::from_triangle(0, 1, 2);
        let mut b = a.clone();
        b.faces[0].comps[0].rotate_left(1);
        assert_eq!(a.canonical_key(true), b.canonical_key(true));
        b.faces[0].invert();
        assert_eq!(a.canonical_key(true), b.canonical_key(true));
        let c = CellComplex::from_triangle(0, 1, 3);
        assert_ne!(a.canonical_key(true), c.canonical_key(true));
        let mut d = a.clone();
        d.faces[0].ann = Annotation::new(true, 1, 0);
        assert_ne!(a.canonical_key(true), d.canonical_key(true));
        assert_eq!(a.canonical_key(false), d.canonical_key(false));
    }

    #[test]
    fn cancel_inserts_interior_dummy() {
        let mut cc = CellComplex::new();
        let e = cc.real_edge(0, 1);
        let f = cc.real_edge(1, 2);
        let g = cc.real_edge(0, 3);
        cc.faces.push(Face {
            comps: vec![vec![
                Letter::fwd(e),
                Letter::fwd(f),
                Letter { edge: f, inv: true },
                Letter { edge: e, inv: true },
                Letter::fwd(g),
                Letter { edge: g, inv: true },
            ]],
            ann: Annotation::default(),
        });
        let r = cc.remove_edge(f, false).unwrap();
        assert_eq!(r.faces[0].comps.len(), 2);
        assert!(r.to_string().contains("+i2 -i2"));
    }
}
