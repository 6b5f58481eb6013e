//! Local charts of the blow-up: adapted bases, markings, the blow-down map and the pulled-back
//! propagator product.
//!
//! Coordinates are indexed by (position of the tree edge in increasing edge order) · d + component.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeSet, Graph, GraphError};
use crate::lattice::{sort_canonical, BuildingSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{0} is not a spanning tree of the graph")]
    NotSpanning(EdgeSet),
    #[error("tree is not adapted to nested member {0}")]
    NotAdapted(EdgeSet),
    #[error("marking for {member} uses edge {edge}, which is not an exclusive tree edge of it")]
    BadMarking { member: EdgeSet, edge: usize },
    #[error("marking needs one entry per nested member")]
    MarkingLength,
    #[error("component {0} out of range")]
    BadComponent(usize),
    #[error("propagator argument of edge {edge} vanishes")]
    Domain { edge: usize },
    #[error("point has {got} coordinates, chart has {want}")]
    Dimension { got: usize, want: usize },
}

/// Tree-path expansion of every edge difference in terms of tree-edge differences.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdaptedBasis {
    pub tree: EdgeSet,
    pub dim: u32,
    /// Tree edges in increasing order; position k carries coordinates k·d .. k·d + d.
    pub tree_edges: Vec<usize>,
    /// For each graph edge: (tree position, sign) along the tree path from tail to head.
    pub expansion: Vec<Vec<(usize, i8)>>,
}

impl AdaptedBasis {
    pub fn new(g: &Graph, tree: EdgeSet) -> Result<Self, ChartError> {
        if !g.is_spanning_tree(tree) {
            return Err(ChartError::NotSpanning(tree));
        }
        let tree_edges: Vec<usize> = tree.iter().collect();
        let pos = |e: usize| tree_edges.iter().position(|&t| t == e).expect("tree edge");
        let expansion = g
            .edges()
            .iter()
            .map(|&(a, b)| {
                g.tree_path(tree, a, b).expect("spanning tree connects all vertices").into_iter().map(|(e, s)| (pos(e), s)).collect()
            })
            .collect();
        Ok(AdaptedBasis { tree, dim: g.dim(), tree_edges, expansion })
    }

    pub fn n_coords(&self) -> usize {
        self.dim as usize * self.tree_edges.len()
    }

    /// Coordinate list as (edge index, component).
    pub fn coordinates(&self) -> Vec<(usize, usize)> {
        self.tree_edges.iter().flat_map(|&e| (0..self.dim as usize).map(move |i| (e, i))).collect()
    }

    /// Edge differences y_e from tree-edge coordinates.
    pub fn edge_vector(&self, e: usize, y: &[f64]) -> Vec<f64> {
        let d = self.dim as usize;
        let mut out = vec![0.0; d];
        for &(k, s) in &self.expansion[e] {
            for i in 0..d {
                out[i] += s as f64 * y[k * d + i];
            }
        }
        out
    }
}

/// Δ(y)^s = |y|^{(2-d)s}, taking |y|² as input.
fn propagator_pow(norm2: f64, d: u32, s: f64) -> f64 {
    let ex = 0.5 * (2.0 - d as f64) * s;
    if ex == -1.0 {
        1.0 / norm2
    } else {
        norm2.powf(ex)
    }
}

/// Position-space integrand v^s(y) = ∏_e Δ(y_e)^s in tree-edge coordinates.
pub fn v_eval(basis: &AdaptedBasis, y: &[f64], s: f64) -> Result<f64, ChartError> {
    let d = basis.dim as usize;
    let mut acc = vec![0.0; d];
    let mut prod = 1.0;
    for (e, terms) in basis.expansion.iter().enumerate() {
        acc.iter_mut().for_each(|a| *a = 0.0);
        for &(k, sg) in terms {
            for (i, a) in acc.iter_mut().enumerate() {
                *a += sg as f64 * y[k * d + i];
            }
        }
        let n2: f64 = acc.iter().map(|c| c * c).sum();
        if n2 == 0.0 {
            return Err(ChartError::Domain { edge: e });
        }
        prod *= propagator_pow(n2, basis.dim, s);
    }
    Ok(prod)
}

/// Exponent `constant + s_coefficient · s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AffineExponent {
    pub constant: i64,
    pub s_coefficient: i64,
}

impl AffineExponent {
    pub fn at(&self, s: f64) -> f64 {
        self.constant as f64 + self.s_coefficient as f64 * s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Chart {
    #[serde(skip)]
    graph: Graph,
    pub nested: Vec<EdgeSet>,
    pub basis: AdaptedBasis,
    /// Per nested member: (marked tree edge, component).
    pub marking: Vec<(usize, usize)>,
    /// Per tree position: indices of the nested members containing that tree edge.
    #[serde(skip)]
    scales: Vec<Vec<usize>>,
    /// Per nested member: its marked coordinate index.
    #[serde(skip)]
    marked: Vec<usize>,
    #[serde(skip)]
    is_marked: Vec<bool>,
    /// Per edge: (tree position, sign, marked coordinates scaling that position relative to the edge).
    #[serde(skip)]
    edge_terms: Vec<Vec<(usize, f64, Vec<usize>)>>,
}

impl Chart {
    /// Validates that `tree` spans, is adapted to `nested`, and that every marking sits on an
    /// exclusive tree edge of its member.
    pub fn new(graph: &Graph, nested: &[EdgeSet], tree: EdgeSet, marking: &[(usize, usize)]) -> Result<Self, ChartError> {
        let basis = AdaptedBasis::new(graph, tree)?;
        if let Err(w) = graph.check_adapted(tree, nested) {
            return Err(ChartError::NotAdapted(w));
        }
        if marking.len() != nested.len() {
            return Err(ChartError::MarkingLength);
        }
        let d = graph.dim() as usize;
        let mut marked = Vec::with_capacity(nested.len());
        for (k, &g) in nested.iter().enumerate() {
            let (e, i) = marking[k];
            if i >= d {
                return Err(ChartError::BadComponent(i));
            }
            if !exclusive_tree_edges(nested, tree, g).contains(e) {
                return Err(ChartError::BadMarking { member: g, edge: e });
            }
            let pos = basis.tree_edges.iter().position(|&t| t == e).expect("tree edge");
            marked.push(pos * d + i);
        }
        let scales: Vec<Vec<usize>> = basis
            .tree_edges
            .iter()
            .map(|&e| (0..nested.len()).filter(|&k| nested[k].contains(e)).collect())
            .collect();
        let mut is_marked = vec![false; basis.n_coords()];
        for &m in &marked {
            is_marked[m] = true;
        }
        let edge_terms = (0..graph.n_edges())
            .map(|e| {
                basis.expansion[e]
                    .iter()
                    .map(|&(p, sgn)| {
                        // Members containing tree edge p but not e.
                        let by: Vec<usize> =
                            scales[p].iter().filter(|&&k| !nested[k].contains(e)).map(|&k| marked[k]).collect();
                        (p, sgn as f64, by)
                    })
                    .collect()
            })
            .collect();
        Ok(Chart {
            graph: graph.clone(),
            nested: nested.to_vec(),
            basis,
            marking: marking.to_vec(),
            scales,
            marked,
            is_marked,
            edge_terms,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn dim(&self) -> usize {
        self.graph.dim() as usize
    }
    pub fn n_coords(&self) -> usize {
        self.basis.n_coords()
    }
    pub fn marked_coord(&self, k: usize) -> usize {
        self.marked[k]
    }
    pub fn marked_coords(&self) -> &[usize] {
        &self.marked
    }
    pub fn is_marked(&self, c: usize) -> bool {
        self.is_marked.get(c).copied().unwrap_or(false)
    }

    /// d_g = dim A_g for each nested member.
    pub fn member_dims(&self) -> Vec<i64> {
        self.nested.iter().map(|&g| self.graph.a_dim(g)).collect()
    }

    /// Coordinates of exclusive tree edges of member k, marked one excluded.
    pub fn exclusive_coords(&self, k: usize) -> Vec<usize> {
        let d = self.dim();
        let ex = exclusive_tree_edges(&self.nested, self.basis.tree, self.nested[k]);
        self.basis
            .tree_edges
            .iter()
            .enumerate()
            .filter(|(_, e)| ex.contains(**e))
            .flat_map(|(p, _)| (0..d).map(move |i| p * d + i))
            .filter(|&c| c != self.marked[k])
            .collect()
    }

    fn check_len(&self, x: &[f64]) -> Result<(), ChartError> {
        if x.len() != self.n_coords() {
            return Err(ChartError::Dimension { got: x.len(), want: self.n_coords() });
        }
        Ok(())
    }

    /// Blow-down map: each coordinate times the marked values of every member containing its edge;
    /// a marked coordinate itself is replaced by 1 before scaling.
    pub fn rho(&self, x: &[f64]) -> Result<Vec<f64>, ChartError> {
        self.check_len(x)?;
        let d = self.dim();
        let mut out = vec![0.0; x.len()];
        for (c, o) in out.iter_mut().enumerate() {
            let base = if self.is_marked[c] { 1.0 } else { x[c] };
            *o = self.scales[c / d].iter().fold(base, |acc, &k| acc * x[self.marked[k]]);
        }
        Ok(out)
    }

    /// |det Dρ| = ∏_g |x_g|^{d_g − 1}.
    pub fn jacobian(&self, x: &[f64]) -> f64 {
        self.member_dims().iter().zip(&self.marked).map(|(&dg, &m)| x[m].abs().powi(dg as i32 - 1)).product()
    }

    /// Exponents of |x_g| in the pulled-back density: −1 + d_g + s(2−d)|E(g)|.
    pub fn pullback_exponents(&self) -> Vec<AffineExponent> {
        let d = self.dim() as i64;
        self.nested
            .iter()
            .map(|&g| AffineExponent { constant: self.graph.a_dim(g) - 1, s_coefficient: (2 - d) * g.len() as i64 })
            .collect()
    }

    /// u^s = ∏_g |x_g|^{−1 + d_g + s(2−d)|E(g)|}.
    pub fn u_factor(&self, x: &[f64], s: f64) -> f64 {
        self.pullback_exponents().iter().zip(&self.marked).map(|(a, &m)| x[m].abs().powf(a.at(s))).product()
    }

    /// Regular factor f^s: the propagator product with every common marked scale pulled out.
    /// Marked coordinates only enter as scales, so f^s stays finite as they go to zero.
    pub fn f_eval(&self, x: &[f64], s: f64) -> Result<f64, ChartError> {
        self.check_len(x)?;
        let d = self.dim();
        let mut prod = 1.0;
        let mut acc = vec![0.0; d];
        for (e, terms) in self.edge_terms.iter().enumerate() {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for (p, sgn, by) in terms {
                let scale = by.iter().fold(*sgn, |a, &m| a * x[m]);
                for (i, a) in acc.iter_mut().enumerate() {
                    let c = p * d + i;
                    let xh = if self.is_marked[c] { 1.0 } else { x[c] };
                    *a += scale * xh;
                }
            }
            let n2: f64 = acc.iter().map(|a| a * a).sum();
            if n2 == 0.0 {
                return Err(ChartError::Domain { edge: e });
            }
            prod *= propagator_pow(n2, self.graph.dim(), s);
        }
        Ok(prod)
    }

    /// ∏_g |x_g|^{s(2−d)|E(g)|}, the factor pulled out of v^s∘ρ.
    pub fn marked_propagator_factor(&self, x: &[f64], s: f64) -> f64 {
        let d = self.dim() as f64;
        self.nested.iter().zip(&self.marked).map(|(g, &m)| x[m].abs().powf(s * (2.0 - d) * g.len() as f64)).product()
    }

    /// δ_K: zero the marked coordinates of the members with indices in `k`.
    pub fn delta(&self, x: &mut [f64], k: &[usize]) {
        for &i in k {
            x[self.marked[i]] = 0.0;
        }
    }

    pub fn member_index(&self, g: EdgeSet) -> Option<usize> {
        self.nested.iter().position(|&n| n == g)
    }
}

/// Tree edges of `g` lying in no smaller nested member.
pub fn exclusive_tree_edges(nested: &[EdgeSet], tree: EdgeSet, g: EdgeSet) -> EdgeSet {
    let below = nested.iter().filter(|h| h.is_proper_subset(g)).fold(EdgeSet::EMPTY, |a, &h| a.union(h));
    tree.inter(g).minus(below)
}

/// Every chart of a building set: each nested set with every marking, on the tree adapted to
/// the whole lattice.
pub fn enumerate_charts(b: &BuildingSet) -> Result<Vec<Chart>, ChartError> {
    let g = b.graph();
    let tree = g.adapted_spanning_tree(&b.lattice.nonempty())?.edges;
    let d = g.dim() as usize;
    let mut charts = Vec::new();
    for nested in b.nested_sets() {
        let mut nested = nested;
        sort_canonical(&mut nested);
        let options: Vec<Vec<(usize, usize)>> = nested
            .iter()
            .map(|&m| exclusive_tree_edges(&nested, tree, m).iter().flat_map(|e| (0..d).map(move |i| (e, i))).collect())
            .collect();
        let mut idx = vec![0usize; nested.len()];
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        loop {
            let marking: Vec<(usize, usize)> = idx.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            charts.push(Chart::new(g, &nested, tree, &marking)?);
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Ok(charts)
}

/// Chart with nested set `nested`, the tree adapted to it, and each member marked on its
/// lowest exclusive tree edge in component 0.
pub fn default_chart(g: &Graph, nested: &[EdgeSet]) -> Result<Chart, ChartError> {
    let mut nested = nested.to_vec();
    sort_canonical(&mut nested);
    let tree = g.nested_adapted_tree(&nested)?.edges;
    let marking: Vec<(usize, usize)> = nested
        .iter()
        .map(|&m| (exclusive_tree_edges(&nested, tree, m).iter().next().expect("member has an exclusive tree edge"), 0))
        .collect();
    Chart::new(g, &nested, tree, &marking)
}
