//! Multigraphs with ordered, oriented edges and the subgraph algebra on top of them.
//!
//! Subgraphs are edge sets (`EdgeSet`, a 64-bit mask); vertices are implied by the
//! edges they touch. All functions here are pure.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Hard limit on edges and vertices; subgraphs are stored as `u64` masks.
pub const MAX_EDGES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edge {edge} references undeclared vertex {vertex}")]
    UndeclaredVertex { edge: usize, vertex: String },
    #[error("dimension must be positive, got {0}")]
    BadDim(i64),
    #[error("graph has {0} edges or vertices, more than the supported {MAX_EDGES}")]
    TooLarge(usize),
    #[error("subgraph {small} is not contained in {big}")]
    NotSubset { small: EdgeSet, big: EdgeSet },
    #[error("no adapted spanning tree: {witness} is not spanned")]
    NoAdaptedTree { witness: EdgeSet },
}

/// A set of edge indices.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(into = "Vec<usize>")]
pub struct EdgeSet(pub u64);

impl From<EdgeSet> for Vec<usize> {
    fn from(s: EdgeSet) -> Self {
        s.iter().collect()
    }
}

impl EdgeSet {
    pub const EMPTY: EdgeSet = EdgeSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            EdgeSet(u64::MAX)
        } else {
            EdgeSet((1u64 << n) - 1)
        }
    }
    pub fn single(i: usize) -> Self {
        EdgeSet(1 << i)
    }
    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        EdgeSet(it.into_iter().fold(0, |m, i| m | (1 << i)))
    }
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
    pub fn union(self, o: Self) -> Self {
        EdgeSet(self.0 | o.0)
    }
    pub fn inter(self, o: Self) -> Self {
        EdgeSet(self.0 & o.0)
    }
    pub fn minus(self, o: Self) -> Self {
        EdgeSet(self.0 & !o.0)
    }
    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }
    /// Strict inclusion.
    pub fn is_proper_subset(self, o: Self) -> bool {
        self.is_subset(o) && self != o
    }
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        })
    }
    /// All subsets of `self`, including empty and `self`, in increasing mask order.
    pub fn subsets(self) -> impl Iterator<Item = EdgeSet> {
        let full = self.0;
        let mut cur: Option<u64> = Some(0);
        std::iter::from_fn(move || {
            let c = cur?;
            cur = if c == full { None } else { Some((c.wrapping_sub(full)) & full) };
            Some(EdgeSet(c))
        })
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Small union-find over vertex indices.
#[derive(Clone, Debug)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }
    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    /// Returns false if already joined. The smaller root wins.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    base: usize,
    dim: u32,
}

/// Result of contracting or restricting: the new graph and, per new edge, its index in the parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derived {
    pub graph: Graph,
    pub edge_map: Vec<usize>,
}

impl Derived {
    /// Edge set in the derived graph of the parent edges `s` that survived.
    pub fn pull(&self, s: EdgeSet) -> EdgeSet {
        EdgeSet::from_indices(
            self.edge_map.iter().enumerate().filter(|(_, &o)| s.contains(o)).map(|(n, _)| n),
        )
    }
    /// Parent edge set of a derived edge set.
    pub fn push(&self, s: EdgeSet) -> EdgeSet {
        EdgeSet::from_indices(s.iter().map(|i| self.edge_map[i]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceReport {
    pub omega: i64,
    pub divergent: bool,
    pub at_most_logarithmic: bool,
    pub primitive: bool,
    pub h1: i64,
    pub a_dim: i64,
}

impl Graph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize)>, dim: u32) -> Result<Self, GraphError> {
        if dim == 0 {
            return Err(GraphError::BadDim(0));
        }
        if edges.len() > MAX_EDGES || vertices.len() > MAX_EDGES {
            return Err(GraphError::TooLarge(edges.len().max(vertices.len())));
        }
        for (i, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= vertices.len() {
                    return Err(GraphError::UndeclaredVertex { edge: i, vertex: v.to_string() });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(i));
            }
        }
        Ok(Graph { vertices, edges, base: 0, dim })
    }

    /// Convenience constructor with vertices labelled `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], dim: u32) -> Result<Self, GraphError> {
        Graph::new((0..n).map(|i| i.to_string()).collect(), edges.to_vec(), dim)
    }

    pub fn with_base(mut self, base: usize) -> Self {
        assert!(base < self.vertices.len());
        self.base = base;
        self
    }

    pub fn with_dim(mut self, dim: u32) -> Self {
        assert!(dim > 0);
        self.dim = dim;
        self
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }
    pub fn base(&self) -> usize {
        self.base
    }
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }
    pub fn all(&self) -> EdgeSet {
        EdgeSet::full(self.edges.len())
    }

    /// Vertex mask of the vertices touched by `g`.
    pub fn touched(&self, g: EdgeSet) -> u64 {
        g.iter().fold(0, |m, e| {
            let (a, b) = self.edges[e];
            m | 1 << a | 1 << b
        })
    }

    /// Connected components of `g` as vertex masks, ordered by smallest vertex.
    pub fn components(&self, g: EdgeSet) -> Vec<u64> {
        let mut dsu = Dsu::new(self.n_vertices());
        for e in g.iter() {
            let (a, b) = self.edges[e];
            dsu.union(a, b);
        }
        let mut by_root: BTreeMap<usize, u64> = BTreeMap::new();
        let t = self.touched(g);
        for v in 0..self.n_vertices() {
            if t >> v & 1 == 1 {
                *by_root.entry(dsu.find(v)).or_default() |= 1 << v;
            }
        }
        by_root.into_values().collect()
    }

    /// Edge sets of the connected components of `g`.
    pub fn component_edges(&self, g: EdgeSet) -> Vec<EdgeSet> {
        self.components(g)
            .into_iter()
            .map(|vm| {
                EdgeSet::from_indices(g.iter().filter(|&e| vm >> self.edges[e].0 & 1 == 1))
            })
            .collect()
    }

    pub fn n_components(&self, g: EdgeSet) -> usize {
        self.components(g).len()
    }

    pub fn is_connected(&self) -> bool {
        let comps = self.components(self.all());
        let touched = self.touched(self.all()).count_ones() as usize;
        match self.n_vertices() {
            0 | 1 => true,
            n => comps.len() == 1 && touched == n,
        }
    }

    pub fn first_betti(&self, g: EdgeSet) -> i64 {
        g.len() as i64 - self.touched(g).count_ones() as i64 + self.n_components(g) as i64
    }

    pub fn omega(&self, g: EdgeSet) -> i64 {
        self.dim as i64 * self.first_betti(g) - 2 * g.len() as i64
    }

    pub fn is_divergent(&self, g: EdgeSet) -> bool {
        self.omega(g) >= 0
    }

    /// Dimension of the subspace `A_g`: d times the rank of the cycle-free part of `g`.
    pub fn a_dim(&self, g: EdgeSet) -> i64 {
        self.dim as i64 * (self.touched(g).count_ones() as i64 - self.n_components(g) as i64)
    }

    /// ω ≤ 0 for every subgraph of `g`, by scanning all 2^|g| subsets.
    pub fn at_most_log_full(&self, g: EdgeSet) -> Result<(), EdgeSet> {
        match g.subsets().find(|&h| self.omega(h) > 0) {
            Some(h) => Err(h),
            None => Ok(()),
        }
    }

    /// Same answer as [`Graph::at_most_log_full`], scanning vertex sets instead of edge sets.
    ///
    /// ω is additive over components, so only connected subgraphs matter; on a fixed vertex set
    /// adding an edge changes ω by d-2 ≥ 0, so the induced subgraph is the worst case.
    pub fn at_most_log(&self, g: EdgeSet) -> Result<(), EdgeSet> {
        if self.dim < 2 {
            return self.at_most_log_full(g);
        }
        let verts: Vec<usize> = (0..self.n_vertices()).filter(|&v| self.touched(g) >> v & 1 == 1).collect();
        let nv = verts.len();
        if nv > 24 {
            return self.at_most_log_full(g);
        }
        for mask in 1u64..(1 << nv) {
            if mask.count_ones() < 2 {
                continue;
            }
            let vm = verts.iter().enumerate().fold(0u64, |m, (k, &v)| if mask >> k & 1 == 1 { m | 1 << v } else { m });
            let induced = EdgeSet::from_indices(g.iter().filter(|&e| {
                let (a, b) = self.edges[e];
                vm >> a & 1 == 1 && vm >> b & 1 == 1
            }));
            for comp in self.component_edges(induced) {
                if self.omega(comp) > 0 {
                    return Err(comp);
                }
            }
        }
        Ok(())
    }

    /// Divergent and no proper nonempty divergent subgraph.
    pub fn is_primitive(&self, g: EdgeSet) -> bool {
        self.is_divergent(g)
            && !g.is_empty()
            && g.subsets().all(|h| h.is_empty() || h == g || !self.is_divergent(h))
    }

    pub fn classify(&self, g: EdgeSet) -> DivergenceReport {
        let omega = self.omega(g);
        DivergenceReport {
            omega,
            divergent: omega >= 0,
            at_most_logarithmic: self.at_most_log(g).is_ok(),
            primitive: self.is_primitive(g),
            h1: self.first_betti(g),
            a_dim: self.a_dim(g),
        }
    }

    /// Saturation by the component criterion: no edge outside `g` closes inside a component of `g`.
    pub fn is_saturated(&self, g: EdgeSet) -> bool {
        let comps = self.components(g);
        self.all().minus(g).iter().all(|e| {
            let (a, b) = self.edges[e];
            !comps.iter().any(|&c| c >> a & 1 == 1 && c >> b & 1 == 1)
        })
    }

    /// Saturation straight from the spanning-tree definition. Exponential; for cross-checks.
    pub fn is_saturated_literal(&self, g: EdgeSet) -> bool {
        for comp in self.component_edges(g) {
            let need = self.touched(comp).count_ones() as usize - 1;
            for t in comp.subsets().filter(|t| t.len() == need) {
                if !self.is_spanning_forest(t, comp) {
                    continue;
                }
                for e in self.all().minus(g).iter() {
                    if self.is_spanning_forest(t, comp.union(EdgeSet::single(e)))
                        && self.n_components(comp.union(EdgeSet::single(e))) == 1
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn is_acyclic(&self, t: EdgeSet) -> bool {
        self.first_betti(t) == 0
    }

    /// `t ⊆ g`, `t` has no cycle, and every vertex of `g` is touched by `t` with the same components.
    pub fn is_spanning_forest(&self, t: EdgeSet, g: EdgeSet) -> bool {
        t.is_subset(g)
            && self.is_acyclic(t)
            && self.touched(t) == self.touched(g)
            && self.n_components(t) == self.n_components(g)
    }

    /// Spanning tree of the whole graph (all vertices, one component).
    pub fn is_spanning_tree(&self, t: EdgeSet) -> bool {
        self.is_acyclic(t) && t.len() + 1 == self.n_vertices() && (self.n_vertices() == 1 || self.n_components(t) == 1)
    }

    /// Checks the adapted-tree definition; returns the first member that `t` fails to span.
    pub fn check_adapted(&self, t: EdgeSet, family: &[EdgeSet]) -> Result<(), EdgeSet> {
        if !self.is_spanning_tree(t) {
            return Err(self.all());
        }
        for &g in family {
            if !self.is_spanning_forest(t.inter(g), g) {
                return Err(g);
            }
        }
        Ok(())
    }

    /// Kruskal over `candidates` in increasing index order on top of an existing union-find.
    fn kruskal(&self, dsu: &mut Dsu, candidates: EdgeSet) -> EdgeSet {
        let mut chosen = EdgeSet::EMPTY;
        for e in candidates.iter() {
            let (a, b) = self.edges[e];
            if dsu.union(a, b) {
                chosen = chosen.union(EdgeSet::single(e));
            }
        }
        chosen
    }

    /// Adapted spanning tree by iterated contraction of minimal members.
    ///
    /// Members are peeled off in layers (minimal images first, then contracted); trees are then
    /// chosen top-down, each layer on the graph with all lower layers contracted. Ties go to the
    /// lowest edge index. The result is verified against the definition.
    pub fn adapted_spanning_tree(&self, family: &[EdgeSet]) -> Result<SpanningTree, GraphError> {
        let mut members: Vec<EdgeSet> = family.iter().copied().filter(|g| !g.is_empty()).collect();
        members.sort();
        members.dedup();
        let mut contracted = EdgeSet::EMPTY;
        let mut layers: Vec<(EdgeSet, Vec<EdgeSet>)> = Vec::new();
        loop {
            let images: Vec<EdgeSet> = members.iter().map(|g| g.minus(contracted)).filter(|i| !i.is_empty()).collect();
            if images.is_empty() {
                break;
            }
            let mut layer: Vec<EdgeSet> = images
                .iter()
                .copied()
                .filter(|&i| !images.iter().any(|&j| j.is_proper_subset(i)))
                .collect();
            layer.sort();
            layer.dedup();
            layers.push((contracted, layer.clone()));
            contracted = layer.iter().fold(contracted, |c, &i| c.union(i));
        }
        // Top: the graph with every member contracted.
        let mut dsu = Dsu::new(self.n_vertices());
        for e in contracted.iter() {
            let (a, b) = self.edges[e];
            dsu.union(a, b);
        }
        let mut tree = self.kruskal(&mut dsu, self.all().minus(contracted));
        for (below, layer) in layers.iter().rev() {
            let mut dsu = Dsu::new(self.n_vertices());
            for e in below.iter() {
                let (a, b) = self.edges[e];
                dsu.union(a, b);
            }
            for &img in layer {
                tree = tree.union(self.kruskal(&mut dsu, img));
            }
        }
        self.check_adapted(tree, &members)
            .map_err(|witness| GraphError::NoAdaptedTree { witness })?;
        Ok(SpanningTree { edges: tree, adapted_for: Some(members) })
    }

    /// Tree adapted to a nested set: each member gets a forest of itself with all smaller members
    /// contracted, then the rest of the graph with every member contracted.
    pub fn nested_adapted_tree(&self, nested: &[EdgeSet]) -> Result<SpanningTree, GraphError> {
        let mut tree = EdgeSet::EMPTY;
        let all_members = nested.iter().fold(EdgeSet::EMPTY, |a, &g| a.union(g));
        let mut order: Vec<EdgeSet> = nested.to_vec();
        order.sort_by_key(|g| std::cmp::Reverse(g.len()));
        for &g in &order {
            let below = nested.iter().filter(|h| h.is_proper_subset(g)).fold(EdgeSet::EMPTY, |a, &h| a.union(h));
            let mut dsu = Dsu::new(self.n_vertices());
            for e in below.iter() {
                let (a, b) = self.edges[e];
                dsu.union(a, b);
            }
            tree = tree.union(self.kruskal(&mut dsu, g.minus(below)));
        }
        let mut dsu = Dsu::new(self.n_vertices());
        for e in all_members.iter() {
            let (a, b) = self.edges[e];
            dsu.union(a, b);
        }
        tree = tree.union(self.kruskal(&mut dsu, self.all().minus(all_members)));
        self.check_adapted(tree, nested)
            .map_err(|witness| GraphError::NoAdaptedTree { witness })?;
        Ok(SpanningTree { edges: tree, adapted_for: Some(nested.to_vec()) })
    }

    /// Path in the tree `t` from `from` to `to`: (edge, +1 if walked tail→head else -1).
    pub fn tree_path(&self, t: EdgeSet, from: usize, to: usize) -> Option<Vec<(usize, i8)>> {
        // DFS from `from`, recording the edge used to reach each vertex.
        let n = self.n_vertices();
        let mut prev: Vec<Option<(usize, usize, i8)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            for e in t.iter() {
                let (a, b) = self.edges[e];
                let (w, s) = if a == v { (b, 1) } else if b == v { (a, -1) } else { continue };
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = Some((v, e, s));
                    stack.push(w);
                }
            }
        }
        if !seen[to] {
            return None;
        }
        let mut path = Vec::new();
        let mut v = to;
        while v != from {
            let (p, e, s) = prev[v].expect("reached vertex has a predecessor");
            path.push((e, s));
            v = p;
        }
        path.reverse();
        Some(path)
    }

    /// The subgraph `g` as a graph of its own: touched vertices only, edge order kept.
    pub fn restrict(&self, g: EdgeSet) -> Derived {
        let touched = self.touched(g);
        let keep: Vec<usize> = (0..self.n_vertices()).filter(|&v| touched >> v & 1 == 1).collect();
        let idx = |v: usize| keep.iter().position(|&k| k == v).expect("touched vertex");
        let edges: Vec<(usize, usize)> = g.iter().map(|e| (idx(self.edges[e].0), idx(self.edges[e].1))).collect();
        let base = keep.iter().position(|&k| k == self.base).unwrap_or(0);
        let graph = Graph {
            vertices: keep.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges,
            base,
            dim: self.dim,
        };
        Derived { graph, edge_map: g.iter().collect() }
    }

    /// `h/g`: drop the edges of `g` and identify their endpoints.
    ///
    /// Merged vertices take the label of the lowest-index member; edge order follows `h`.
    /// The vertex set is that of `h` (all vertices if `h` is the whole graph).
    pub fn contract(&self, h: EdgeSet, g: EdgeSet) -> Result<Derived, GraphError> {
        if !g.is_subset(h) {
            return Err(GraphError::NotSubset { small: g, big: h });
        }
        let vmask = if h == self.all() { EdgeSet::full(self.n_vertices()).0 } else { self.touched(h) };
        let mut dsu = Dsu::new(self.n_vertices());
        for e in g.iter() {
            let (a, b) = self.edges[e];
            dsu.union(a, b);
        }
        let mut reps: Vec<usize> = (0..self.n_vertices()).filter(|&v| vmask >> v & 1 == 1).map(|v| dsu.find(v)).collect();
        reps.sort();
        reps.dedup();
        let idx = |dsu: &mut Dsu, v: usize| {
            let r = dsu.find(v);
            reps.iter().position(|&k| k == r).expect("representative present")
        };
        let kept: Vec<usize> = h.minus(g).iter().collect();
        let mut edges = Vec::with_capacity(kept.len());
        for &e in &kept {
            let (a, b) = self.edges[e];
            edges.push((idx(&mut dsu, a), idx(&mut dsu, b)));
        }
        let base = if vmask >> self.base & 1 == 1 { idx(&mut dsu, self.base) } else { 0 };
        let graph = Graph {
            vertices: reps.iter().map(|&v| self.vertices[v].clone()).collect(),
            edges,
            base,
            dim: self.dim,
        };
        Ok(Derived { graph, edge_map: kept })
    }

    /// `g//P`, the contraction relative to a family.
    pub fn contract_relative(&self, g: EdgeSet, family: &[EdgeSet]) -> Derived {
        let shrink = if family.contains(&g) {
            family.iter().filter(|c| c.is_proper_subset(g)).fold(EdgeSet::EMPTY, |a, &c| a.union(c))
        } else {
            let u = family.iter().filter(|c| c.inter(g).is_proper_subset(g)).fold(EdgeSet::EMPTY, |a, &c| a.union(c));
            g.inter(u)
        };
        self.contract(g, shrink).expect("shrink set lies inside g")
    }

    /// Edge set of `g//P` expressed in parent edge indices.
    pub fn contract_relative_edges(&self, g: EdgeSet, family: &[EdgeSet]) -> EdgeSet {
        let d = self.contract_relative(g, family);
        d.push(EdgeSet::full(d.graph.n_edges()))
    }

    /// Serialize in the line-oriented graph file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("d {}\nv", self.dim);
        for v in &self.vertices {
            s.push(' ');
            s.push_str(v);
        }
        s.push('\n');
        for &(a, b) in &self.edges {
            s.push_str(&format!("e {} {}\n", self.vertices[a], self.vertices[b]));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningTree {
    pub edges: EdgeSet,
    pub adapted_for: Option<Vec<EdgeSet>>,
}

/// Parse the graph file format: `#` comments, one `d <int>`, optional `v <label>...`, `e <tail> <head>`.
///
/// Without a `v` line, vertices are declared in order of first appearance.
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut dim: Option<(i64, usize)> = None;
    let mut declared: Option<Vec<String>> = None;
    let mut implicit: Vec<String> = Vec::new();
    let mut raw_edges: Vec<(String, String, usize)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let ln = k + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap_or("");
        let rest: Vec<&str> = toks.collect();
        let perr = |msg: String| GraphError::Parse { line: ln, msg };
        match head {
            "d" => {
                if dim.is_some() {
                    return Err(perr("dimension declared twice".into()));
                }
                if rest.len() != 1 {
                    return Err(perr("expected `d <int>`".into()));
                }
                let v: i64 = rest[0].parse().map_err(|_| perr(format!("bad dimension `{}`", rest[0])))?;
                if v <= 0 {
                    return Err(perr(format!("dimension must be positive, got {v}")));
                }
                dim = Some((v, ln));
            }
            "v" => {
                let list = declared.get_or_insert_with(Vec::new);
                for r in rest {
                    if list.iter().any(|x| x == r) {
                        return Err(perr(format!("vertex `{r}` declared twice")));
                    }
                    list.push(r.to_string());
                }
            }
            "e" => {
                if rest.len() != 2 {
                    return Err(perr("expected `e <tail> <head>`".into()));
                }
                if rest[0] == rest[1] {
                    return Err(perr(format!("self-loop at vertex `{}`", rest[0])));
                }
                for r in &rest {
                    if !implicit.iter().any(|x| x == r) {
                        implicit.push(r.to_string());
                    }
                }
                raw_edges.push((rest[0].to_string(), rest[1].to_string(), ln));
            }
            other => return Err(perr(format!("unknown directive `{other}`"))),
        }
    }
    let (dim, _) = dim.ok_or(GraphError::Parse { line: text.lines().count().max(1), msg: "missing `d <int>` line".into() })?;
    let vertices = declared.unwrap_or(implicit);
    if vertices.is_empty() {
        return Err(GraphError::Parse { line: 1, msg: "graph has no vertices".into() });
    }
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (a, b, ln) in raw_edges {
        let find = |x: &str| {
            vertices.iter().position(|v| v == x).ok_or_else(|| GraphError::Parse { line: ln, msg: format!("undeclared vertex `{x}`") })
        };
        edges.push((find(&a)?, find(&b)?));
    }
    Graph::new(vertices, edges, dim as u32).map_err(|e| GraphError::Parse { line: 0, msg: e.to_string() })
}
