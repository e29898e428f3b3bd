//! Tree decompositions of Hasse diagrams: min-fill heuristic, closure, and nice closed form.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::HasseGraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("node {0} is in no bag")]
    NodeUncovered(usize),
    #[error("edge ({0}, {1}) is in no bag")]
    EdgeUncovered(usize, usize),
    #[error("bags containing node {0} are not connected")]
    Disconnected(usize),
    #[error("decomposition tree is not a tree")]
    NotATree,
    #[error("bag {bag} references node {node} outside the graph")]
    OutOfRange { bag: usize, node: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Bags are sorted node ids; `edges` are tree edges between bag indices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one; -1 for a decomposition with only empty bags.
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.len() as isize).max().unwrap_or(0) - 1
    }

    fn tree_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

/// Min-fill elimination. Ties go to the lowest node id unless `seed` is nonzero,
/// in which case ties are broken by a seeded hash of the node id.
pub fn heuristic_td(adj: &[Vec<usize>], seed: u64) -> TreeDecomposition {
    let n = adj.len();
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], edges: Vec::new() };
    }
    let mut nb: Vec<HashSet<usize>> = adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let fill_of = |nb: &Vec<HashSet<usize>>, v: usize| -> usize {
        let ns: Vec<usize> = nb[v].iter().copied().collect();
        let mut f = 0;
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                if !nb[ns[i]].contains(&ns[j]) {
                    f += 1;
                }
            }
        }
        f
    };
    let tie = |v: usize| -> u64 {
        if seed == 0 {
            v as u64
        } else {
            splitmix(seed ^ (v as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        }
    };
    let mut fill: Vec<usize> = (0..n).map(|v| fill_of(&nb, v)).collect();
    let mut order = Vec::with_capacity(n);
    let mut elim_bag: Vec<Vec<usize>> = vec![Vec::new(); n];
    for _ in 0..n {
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (fill[v], tie(v), v)).unwrap();
        let ns: Vec<usize> = {
            let mut s: Vec<usize> = nb[v].iter().copied().collect();
            s.sort_unstable();
            s
        };
        let mut bag = ns.clone();
        bag.push(v);
        bag.sort_unstable();
        elim_bag[v] = bag;
        order.push(v);
        alive[v] = false;
        for i in 0..ns.len() {
            for j in i + 1..ns.len() {
                nb[ns[i]].insert(ns[j]);
                nb[ns[j]].insert(ns[i]);
            }
        }
        for &u in &ns {
            nb[u].remove(&v);
        }
        nb[v].clear();
        let mut dirty: BTreeSet<usize> = ns.iter().copied().collect();
        for &u in &ns {
            dirty.extend(nb[u].iter().copied());
        }
        for u in dirty {
            fill[u] = fill_of(&nb, u);
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for &v in &order {
        let parent = elim_bag[v].iter().copied().filter(|&u| u != v).min_by_key(|&u| pos[u]);
        match parent {
            Some(p) => edges.push((pos[v], pos[p])),
            None => roots.push(pos[v]),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    let bags = order.iter().map(|&v| elim_bag[v].clone()).collect();
    TreeDecomposition { bags, edges }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Checks the three decomposition axioms and that the bag graph is a tree.
pub fn validate_td(adj: &[Vec<usize>], td: &TreeDecomposition) -> Result<(), DecompError> {
    let n = adj.len();
    let m = td.bags.len();
    if m == 0 || td.edges.len() + 1 != m {
        return Err(DecompError::NotATree);
    }
    let tadj = td.tree_adj();
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &tadj[x] {
            if y >= m {
                return Err(DecompError::NotATree);
            }
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(DecompError::NotATree);
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (bi, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                return Err(DecompError::OutOfRange { bag: bi, node: v });
            }
            holders[v].push(bi);
        }
    }
    for (v, h) in holders.iter().enumerate() {
        if h.is_empty() {
            return Err(DecompError::NodeUncovered(v));
        }
    }
    let bagsets: Vec<HashSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    for (u, a) in adj.iter().enumerate() {
        for &w in a {
            if u < w && !holders[u].iter().any(|&b| bagsets[b].contains(&w)) {
                return Err(DecompError::EdgeUncovered(u, w));
            }
        }
    }
    for (v, h) in holders.iter().enumerate() {
        let set: HashSet<usize> = h.iter().copied().collect();
        let mut seen = HashSet::new();
        let mut stack = vec![h[0]];
        seen.insert(h[0]);
        while let Some(x) = stack.pop() {
            for &y in &tadj[x] {
                if set.contains(&y) && seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        if seen.len() != set.len() {
            return Err(DecompError::Disconnected(v));
        }
    }
    Ok(())
}

/// Replaces every bag by its face closure.
pub fn close_td(h: &HasseGraph, td: &TreeDecomposition) -> TreeDecomposition {
    let bags = td
        .bags
        .iter()
        .map(|bag| {
            let mut s = BTreeSet::new();
            for &x in bag {
                for f in h.simplices[x].faces() {
                    s.insert(h.id(&f).expect("face missing from Hasse diagram"));
                }
            }
            s.into_iter().collect()
        })
        .collect();
    TreeDecomposition { bags, edges: td.edges.clone() }
}

pub fn is_closed_bag(h: &HasseGraph, bag: &[usize]) -> bool {
    let set: HashSet<usize> = bag.iter().copied().collect();
    bag.iter().all(|&x| h.simplices[x].faces().iter().all(|f| set.contains(&h.id(f).unwrap())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// A rooted nice decomposition. Children always precede parents; the root is the last node
/// and has an empty bag, as does every leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTd {
    pub nodes: Vec<NiceNode>,
}

impl NiceTd {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> isize {
        self.nodes.iter().map(|n| n.bag.len() as isize).max().unwrap_or(0) - 1
    }

    pub fn to_td(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let mut edges = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                edges.push((c, i));
            }
        }
        TreeDecomposition { bags, edges }
    }
}

fn contract_subsets(td: &TreeDecomposition) -> TreeDecomposition {
    let m = td.bags.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for &(a, b) in &td.edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let sets: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let mut alive = vec![true; m];
    let mut changed = true;
    while changed {
        changed = false;
        for x in 0..m {
            if !alive[x] {
                continue;
            }
            let target = adj[x].iter().copied().find(|&y| sets[x].is_subset(&sets[y]));
            if let Some(y) = target {
                let others: Vec<usize> = adj[x].iter().copied().filter(|&z| z != y).collect();
                for z in others {
                    adj[z].remove(&x);
                    adj[z].insert(y);
                    adj[y].insert(z);
                }
                adj[y].remove(&x);
                adj[x].clear();
                alive[x] = false;
                changed = true;
            }
        }
    }
    let remap: Vec<Option<usize>> = {
        let mut next = 0;
        (0..m)
            .map(|x| {
                alive[x].then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let bags = (0..m).filter(|&x| alive[x]).map(|x| td.bags[x].clone()).collect();
    let mut edges = Vec::new();
    for x in 0..m {
        for &y in &adj[x] {
            if x < y {
                edges.push((remap[x].unwrap(), remap[y].unwrap()));
            }
        }
    }
    TreeDecomposition { bags, edges }
}

/// Converts a closed decomposition into a nice one whose bags are all closed.
/// When `contract` is set, bags contained in a neighbouring bag are merged away first.
pub fn make_nice_closed(h: &HasseGraph, td: &TreeDecomposition, contract: bool) -> NiceTd {
    let td = if contract { contract_subsets(td) } else { td.clone() };
    let tadj = td.tree_adj();
    let m = td.bags.len();
    let root_child = (0..m).find(|&x| tadj[x].len() <= 1).unwrap_or(0);
    let mut parent = vec![usize::MAX; m];
    let mut order = vec![root_child];
    parent[root_child] = root_child;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        for &y in &tadj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                order.push(y);
            }
        }
        i += 1;
    }
    let mut children = vec![Vec::new(); m];
    for &x in &order[1..] {
        children[parent[x]].push(x);
    }
    let mut b = Builder { h, nodes: Vec::new() };
    let mut top = vec![usize::MAX; m];
    for &x in order.iter().rev() {
        let bag = &td.bags[x];
        let subs: Vec<usize> = if children[x].is_empty() {
            let leaf = b.push(NiceKind::Leaf, Vec::new(), Vec::new());
            vec![b.transition(leaf, bag)]
        } else {
            children[x].iter().map(|&c| b.transition(top[c], bag)).collect()
        };
        let mut acc = subs[0];
        for &s in &subs[1..] {
            acc = b.push(NiceKind::Join, bag.clone(), vec![acc, s]);
        }
        top[x] = acc;
    }
    b.transition(top[root_child], &[]);
    NiceTd { nodes: b.nodes }
}

struct Builder<'a> {
    h: &'a HasseGraph,
    nodes: Vec<NiceNode>,
}

impl Builder<'_> {
    fn push(&mut self, kind: NiceKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forgets `from \ to` from highest dimension down, then introduces `to \ from` upward.
    fn transition(&mut self, from: usize, to: &[usize]) -> usize {
        let cur: BTreeSet<usize> = self.nodes[from].bag.iter().copied().collect();
        let target: BTreeSet<usize> = to.iter().copied().collect();
        let dim = |x: &usize| self.h.simplices[*x].dim();
        let mut forget: Vec<usize> = cur.difference(&target).copied().collect();
        forget.sort_by_key(|x| (std::cmp::Reverse(dim(x)), *x));
        let mut intro: Vec<usize> = target.difference(&cur).copied().collect();
        intro.sort_by_key(|x| (dim(x), *x));
        let mut node = from;
        let mut bag = cur;
        for x in forget {
            bag.remove(&x);
            node = self.push(NiceKind::Forget(x), bag.iter().copied().collect(), vec![node]);
        }
        for x in intro {
            bag.insert(x);
            node = self.push(NiceKind::Introduce(x), bag.iter().copied().collect(), vec![node]);
        }
        node
    }
}

/// Constant `C` in the node-count bound `|nodes| <= C * (width + 1) * |V(H)|`.
pub const NICE_NODE_FACTOR: usize = 6;

/// Precomputed data for membership queries in the subcomplexes `K_t`.
pub struct RootedMembership {
    forget_node: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
    bags: Vec<HashSet<usize>>,
    is_triangle: Vec<bool>,
}

impl RootedMembership {
    pub fn new(h: &HasseGraph, nice: &NiceTd) -> Self {
        let n = h.node_count();
        let mut forget_node = vec![usize::MAX; n];
        for (i, node) in nice.nodes.iter().enumerate() {
            if let NiceKind::Forget(x) = node.kind {
                forget_node[x] = i;
            }
        }
        let m = nice.nodes.len();
        let (mut tin, mut tout) = (vec![0; m], vec![0; m]);
        let mut clock = 0;
        let mut stack = vec![(nice.root(), false)];
        while let Some((x, done)) = stack.pop() {
            if done {
                tout[x] = clock;
                continue;
            }
            tin[x] = clock;
            clock += 1;
            stack.push((x, true));
            for &c in nice.nodes[x].children.iter().rev() {
                stack.push((c, false));
            }
        }
        RootedMembership {
            forget_node,
            tin,
            tout,
            bags: nice.nodes.iter().map(|n| n.bag.iter().copied().collect()).collect(),
            is_triangle: h.simplices.iter().map(|s| s.dim() == 2).collect(),
        }
    }

    /// Whether simplex `s` (a Hasse id) lies in `K_t`: the bag simplices other than triangles,
    /// together with everything forgotten in the subtree of `t`.
    pub fn member(&self, t: usize, s: usize) -> bool {
        if self.bags[t].contains(&s) {
            return !self.is_triangle[s];
        }
        let f = self.forget_node[s];
        f != usize::MAX && self.tin[t] <= self.tin[f] && self.tout[f] <= self.tout[t]
    }
}

pub fn rooted_subcomplex_member(h: &HasseGraph, nice: &NiceTd, t: usize, s: usize) -> bool {
    RootedMembership::new(h, nice).member(t, s)
}

/// PACE `.td` text; node and bag ids are written 1-based.
pub fn write_pace_td(td: &TreeDecomposition, node_count: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "s td {} {} {}", td.bags.len(), td.width() + 1, node_count);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for &x in bag {
            let _ = write!(out, " {}", x + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

pub fn parse_pace_td(text: &str) -> Result<TreeDecomposition, DecompError> {
    let perr = |line: usize, msg: &str| DecompError::Parse { line, msg: msg.to_string() };
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    let mut header = false;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let num = |t: &str| t.parse::<usize>().map_err(|_| perr(ln, &format!("bad number {t:?}")));
        if toks[0] == "s" {
            if toks.len() != 5 || toks[1] != "td" || header {
                return Err(perr(ln, "bad header"));
            }
            bags = vec![None; num(toks[2])?];
            header = true;
        } else if !header {
            return Err(perr(ln, "missing header"));
        } else if toks[0] == "b" {
            let id = num(toks.get(1).ok_or_else(|| perr(ln, "missing bag id"))?)?;
            if id == 0 || id > bags.len() {
                return Err(perr(ln, "bag id out of range"));
            }
            let mut bag = Vec::new();
            for t in &toks[2..] {
                let x = num(t)?;
                if x == 0 {
                    return Err(perr(ln, "node ids are 1-based"));
                }
                bag.push(x - 1);
            }
            bag.sort_unstable();
            bag.dedup();
            bags[id - 1] = Some(bag);
        } else {
            if toks.len() != 2 {
                return Err(perr(ln, "expected a tree edge"));
            }
            let (a, b) = (num(toks[0])?, num(toks[1])?);
            if a == 0 || b == 0 || a > bags.len() || b > bags.len() {
                return Err(perr(ln, "tree edge out of range"));
            }
            edges.push((a - 1, b - 1));
        }
    }
    if !header {
        return Err(perr(0, "missing header"));
    }
    let bags = bags.into_iter().map(|b| b.unwrap_or_default()).collect();
    Ok(TreeDecomposition { bags, edges })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{hasse_diagram, SimplicialComplex};

    fn tetra() -> SimplicialComplex {
        SimplicialComplex::from_triangles(&[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]])
    }

    #[test]
    fn min_fill_on_path_has_width_one() {
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let td = heuristic_td(&adj, 0);
        assert_eq!(td.width(), 1);
        validate_td(&adj, &td).unwrap();
    }

    #[test]
    fn empty_graph_gives_one_empty_bag() {
        let td = heuristic_td(&[], 0);
        assert_eq!(td.bags, vec![Vec::<usize>::new()]);
        validate_td(&[], &td).unwrap();
    }

    #[test]
    fn forests_are_chained() {
        let adj = vec![vec![1], vec![0], vec![], vec![]];
        let td = heuristic_td(&adj, 0);
        validate_td(&adj, &td).unwrap();
    }

    #[test]
    fn validate_rejects_broken() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let td = TreeDecomposition { bags: vec![vec![0, 1], vec![2]], edges: vec![(0, 1)] };
        assert_eq!(validate_td(&adj, &td), Err(DecompError::EdgeUncovered(1, 2)));
        let td = TreeDecomposition { bags: vec![vec![0, 1], vec![2], vec![1, 2]], edges: vec![(0, 1), (1, 2)] };
        assert_eq!(validate_td(&adj, &td), Err(DecompError::Disconnected(1)));
    }

    #[test]
    fn closed_nice_on_tetrahedron() {
        let h = hasse_diagram(&tetra());
        let td = heuristic_td(&h.adj, 0);
        validate_td(&h.adj, &td).unwrap();
        let c = close_td(&h, &td);
        validate_td(&h.adj, &c).unwrap();
        assert!(c.width() <= 7 * td.width() + 6);
        for contract in [false, true] {
            let nice = make_nice_closed(&h, &c, contract);
            validate_td(&h.adj, &nice.to_td()).unwrap();
            assert!(nice.nodes.iter().all(|n| is_closed_bag(&h, &n.bag)));
            assert!(nice.nodes[nice.root()].bag.is_empty());
            let forgets = nice.nodes.iter().filter(|n| matches!(n.kind, NiceKind::Forget(_))).count();
            assert_eq!(forgets, h.node_count());
        }
    }

    #[test]
    fn root_subcomplex_is_everything() {
        let h = hasse_diagram(&tetra());
        let nice = make_nice_closed(&h, &close_td(&h, &heuristic_td(&h.adj, 0)), true);
        let rm = RootedMembership::new(&h, &nice);
        assert!((0..h.node_count()).all(|s| rm.member(nice.root(), s)));
        for (i, n) in nice.nodes.iter().enumerate() {
            if n.kind == NiceKind::Leaf {
                assert!((0..h.node_count()).all(|s| !rm.member(i, s)));
            }
        }
    }

    #[test]
    fn pace_roundtrip() {
        let adj = vec![vec![1], vec![0, 2], vec![1]];
        let td = heuristic_td(&adj, 0);
        let text = write_pace_td(&td, 3);
        assert!(text.starts_with("s td 3 2 3\n"));
        let back = parse_pace_td(&text).unwrap();
        assert_eq!(back, td);
        assert!(parse_pace_td("b 1 1\n").is_err());
    }

    #[test]
    fn seeded_tie_break_is_valid() {
        let h = hasse_diagram(&tetra());
        for seed in 1..5 {
            validate_td(&h.adj, &heuristic_td(&h.adj, seed)).unwrap();
        }
    }
}
