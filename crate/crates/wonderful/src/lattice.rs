//! Posets of subgraphs, building sets and nested sets.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{EdgeSet, Graph};

/// Largest edge count for which subgraph posets are built by scanning every edge subset.
pub const MAX_SCAN_EDGES: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is not at most logarithmic: subgraph {0} has positive degree of divergence")]
    NotAtMostLog(EdgeSet),
    #[error("graph has {0} edges; subgraph enumeration supports at most {MAX_SCAN_EDGES}")]
    TooLarge(usize),
    #[error("{0} is not an element of the poset")]
    NotAnElement(EdgeSet),
    #[error("building set member {0} is not a nonempty poset element")]
    BadMember(EdgeSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PosetKind {
    DivergentLattice,
    SaturatedPoset,
    Generic,
}

/// Canonical element order: by size, then by sorted edge-index list.
fn canonical_key(s: &EdgeSet) -> (usize, Vec<usize>) {
    (s.len(), s.iter().collect())
}

pub fn sort_canonical(v: &mut Vec<EdgeSet>) {
    v.sort_by_key(canonical_key);
    v.dedup();
}

/// A finite family of subgraphs ordered by inclusion. Elements are kept in canonical order,
/// which is a linear extension of inclusion, so `o` comes first.
#[derive(Clone, Debug, Serialize)]
pub struct SubgraphPoset {
    #[serde(skip)]
    graph: Graph,
    elements: Vec<EdgeSet>,
    kind: PosetKind,
}

impl SubgraphPoset {
    /// Divergent subgraphs of a connected, at most logarithmic graph, plus `o`.
    pub fn divergent_lattice(g: &Graph) -> Result<Self, LatticeError> {
        if !g.is_connected() {
            return Err(LatticeError::Disconnected);
        }
        Self::divergent_unchecked(g)
    }

    /// Divergent poset without the connectivity requirement (used for disjoint unions).
    pub fn divergent_unchecked(g: &Graph) -> Result<Self, LatticeError> {
        if g.n_edges() > MAX_SCAN_EDGES {
            return Err(LatticeError::TooLarge(g.n_edges()));
        }
        g.at_most_log(g.all()).map_err(LatticeError::NotAtMostLog)?;
        let elements = g.all().subsets().filter(|&h| h.is_empty() || g.is_divergent(h)).collect();
        Ok(Self::from_parts(g.clone(), elements, PosetKind::DivergentLattice))
    }

    /// All saturated subgraphs, `o` included.
    pub fn saturated_poset(g: &Graph) -> Result<Self, LatticeError> {
        if g.n_edges() > MAX_SCAN_EDGES {
            return Err(LatticeError::TooLarge(g.n_edges()));
        }
        let elements = g.all().subsets().filter(|&h| g.is_saturated(h)).collect();
        Ok(Self::from_parts(g.clone(), elements, PosetKind::SaturatedPoset))
    }

    /// Arbitrary family ordered by inclusion; `o` is added if missing.
    pub fn generic(g: &Graph, mut elements: Vec<EdgeSet>) -> Self {
        elements.push(EdgeSet::EMPTY);
        Self::from_parts(g.clone(), elements, PosetKind::Generic)
    }

    fn from_parts(graph: Graph, mut elements: Vec<EdgeSet>, kind: PosetKind) -> Self {
        sort_canonical(&mut elements);
        SubgraphPoset { graph, elements, kind }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
    pub fn elements(&self) -> &[EdgeSet] {
        &self.elements
    }
    pub fn kind(&self) -> PosetKind {
        self.kind
    }
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
    pub fn contains(&self, s: EdgeSet) -> bool {
        self.index(s).is_some()
    }
    pub fn index(&self, s: EdgeSet) -> Option<usize> {
        self.elements.iter().position(|&e| e == s)
    }
    pub fn nonempty(&self) -> Vec<EdgeSet> {
        self.elements.iter().copied().filter(|e| !e.is_empty()).collect()
    }
    pub fn top(&self) -> EdgeSet {
        *self.elements.last().expect("poset contains o")
    }

    /// τ(g) = dim A_g / d.
    pub fn grade(&self, s: EdgeSet) -> i64 {
        self.graph.a_dim(s) / self.graph.dim() as i64
    }

    /// Rank used for the gradedness check. On the saturated poset this is τ; elsewhere τ can
    /// jump across a cover (o ⋖ K4 in the divergent lattice of K4 has τ going 0 → 3), so the
    /// rank is the length of the longest chain from `o`.
    pub fn rank(&self, s: EdgeSet) -> i64 {
        if self.kind == PosetKind::SaturatedPoset {
            return self.grade(s);
        }
        let below: Vec<EdgeSet> = self.below(s);
        let mut len = vec![0i64; below.len()];
        // `below` is in canonical order, a linear extension.
        for i in 0..below.len() {
            for j in 0..i {
                if below[j].is_proper_subset(below[i]) {
                    len[i] = len[i].max(len[j] + 1);
                }
            }
        }
        len.last().copied().unwrap_or(0)
    }

    pub fn a_dim(&self, s: EdgeSet) -> i64 {
        self.graph.a_dim(s)
    }

    /// Elements covering `o`.
    pub fn atoms(&self) -> Vec<EdgeSet> {
        self.covers().into_iter().filter(|(a, _)| a.is_empty()).map(|(_, b)| b).collect()
    }

    /// Hasse diagram edges (lower, upper) in canonical order.
    pub fn covers(&self) -> Vec<(EdgeSet, EdgeSet)> {
        let mut out = Vec::new();
        for &b in &self.elements {
            for &a in &self.elements {
                if a.is_proper_subset(b)
                    && !self.elements.iter().any(|&c| a.is_proper_subset(c) && c.is_proper_subset(b))
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn below(&self, p: EdgeSet) -> Vec<EdgeSet> {
        self.elements.iter().copied().filter(|e| e.is_subset(p)).collect()
    }

    /// Least upper bound in this poset, if one exists.
    pub fn join(&self, a: EdgeSet, b: EdgeSet) -> Option<EdgeSet> {
        let ub: Vec<EdgeSet> = self.elements.iter().copied().filter(|e| a.is_subset(*e) && b.is_subset(*e)).collect();
        ub.iter().copied().find(|&u| ub.iter().all(|&v| u.is_subset(v)))
    }

    pub fn join_all(&self, items: &[EdgeSet]) -> Option<EdgeSet> {
        let ub: Vec<EdgeSet> =
            self.elements.iter().copied().filter(|e| items.iter().all(|i| i.is_subset(*e))).collect();
        ub.iter().copied().find(|&u| ub.iter().all(|&v| u.is_subset(v)))
    }

    /// Greatest lower bound in this poset, if one exists.
    pub fn meet(&self, a: EdgeSet, b: EdgeSet) -> Option<EdgeSet> {
        let lb: Vec<EdgeSet> = self.elements.iter().copied().filter(|e| e.is_subset(a) && e.is_subset(b)).collect();
        lb.iter().copied().find(|&l| lb.iter().all(|&v| v.is_subset(l)))
    }

    pub fn is_lattice(&self) -> bool {
        self.elements.iter().all(|&a| {
            self.elements.iter().all(|&b| self.join(a, b).is_some() && self.meet(a, b).is_some())
        })
    }

    /// Join, meet, grading and distributivity checks, each with its first counterexample.
    pub fn check_lattice_properties(&self) -> LatticeCheck {
        let el = &self.elements;
        let mut rep = LatticeCheck::default();
        for &a in el {
            for &b in el {
                if rep.join_is_union.is_none() && self.join(a, b) != Some(a.union(b)) {
                    rep.join_is_union = Some(vec![a, b]);
                }
                if rep.meet_is_intersection.is_none() && self.meet(a, b) != Some(a.inter(b)) {
                    rep.meet_is_intersection = Some(vec![a, b]);
                }
                if rep.submodular.is_none() {
                    if let (Some(j), Some(m)) = (self.join(a, b), self.meet(a, b)) {
                        if self.grade(a) + self.grade(b) < self.grade(j) + self.grade(m) {
                            rep.submodular = Some(vec![a, b]);
                        }
                    }
                }
            }
        }
        for (a, b) in self.covers() {
            if rep.graded.is_none() && self.rank(b) != self.rank(a) + 1 {
                rep.graded = Some(vec![a, b]);
            }
        }
        'outer: for &x in el {
            for &y in el {
                for &z in el {
                    let lhs = self.join(y, z).and_then(|j| self.meet(x, j));
                    let rhs = match (self.meet(x, y), self.meet(x, z)) {
                        (Some(p), Some(q)) => self.join(p, q),
                        _ => None,
                    };
                    let lhs2 = self.meet(y, z).and_then(|m| self.join(x, m));
                    let rhs2 = match (self.join(x, y), self.join(x, z)) {
                        (Some(p), Some(q)) => self.meet(p, q),
                        _ => None,
                    };
                    if lhs.is_none() || lhs != rhs || lhs2.is_none() || lhs2 != rhs2 {
                        rep.distributive = Some(vec![x, y, z]);
                        break 'outer;
                    }
                }
            }
        }
        rep
    }

    /// Irreducible elements, bottom-up: `g` is reducible when the maximal irreducibles strictly
    /// below it number at least two and their dimensions add up to dim A_g.
    pub fn irreducibles(&self) -> Vec<EdgeSet> {
        let mut order: Vec<EdgeSet> = self.nonempty();
        order.sort_by_key(|&e| (self.grade(e), canonical_key(&e)));
        let mut irr: Vec<EdgeSet> = Vec::new();
        for g in order {
            let qs = maximal(irr.iter().copied().filter(|q| q.is_proper_subset(g)));
            let reducible = qs.len() >= 2 && qs.iter().map(|&q| self.a_dim(q)).sum::<i64>() == self.a_dim(g);
            if !reducible {
                irr.push(g);
            }
        }
        sort_canonical(&mut irr);
        irr
    }

    /// Irreducibles from the definition: `g` is reducible iff `[o,g] ≅ [o,a] × [o,b]` via join
    /// for some `a, b` strictly between `o` and `g`. Exponential; for cross-checks.
    pub fn irreducibles_brute_force(&self) -> Vec<EdgeSet> {
        let mut out = Vec::new();
        for g in self.nonempty() {
            let inner: Vec<EdgeSet> = self.below(g).into_iter().filter(|e| !e.is_empty() && *e != g).collect();
            let reducible = inner.iter().any(|&a| inner.iter().any(|&b| self.join_map_is_iso(g, &[a, b])));
            if !reducible {
                out.push(g);
            }
        }
        out
    }

    /// Whether `(x_1..x_k) ↦ x_1 ∨ … ∨ x_k` is an order isomorphism `∏[o,q_i] → [o,p]`.
    pub fn join_map_is_iso(&self, p: EdgeSet, qs: &[EdgeSet]) -> bool {
        let target = self.below(p);
        let factors: Vec<Vec<EdgeSet>> = qs.iter().map(|&q| self.below(q)).collect();
        let total: usize = factors.iter().map(|f| f.len()).product();
        if total != target.len() {
            return false;
        }
        let mut tuples: Vec<(Vec<EdgeSet>, EdgeSet)> = Vec::with_capacity(total);
        let mut idx = vec![0usize; factors.len()];
        loop {
            let tuple: Vec<EdgeSet> = idx.iter().zip(&factors).map(|(&i, f)| f[i]).collect();
            let Some(j) = self.join_all(&tuple) else { return false };
            if !j.is_subset(p) {
                return false;
            }
            tuples.push((tuple, j));
            let mut k = 0;
            loop {
                if k == factors.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < factors[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == factors.len() {
                break;
            }
        }
        let images: BTreeSet<EdgeSet> = tuples.iter().map(|t| t.1).collect();
        if images.len() != total {
            return false;
        }
        for (x, jx) in &tuples {
            for (y, jy) in &tuples {
                let prod_le = x.iter().zip(y).all(|(a, b)| a.is_subset(*b));
                if prod_le != jx.is_subset(*jy) {
                    return false;
                }
            }
        }
        true
    }

    /// Combinatorial and geometric building-set conditions; returns the first failing element.
    pub fn validate_building_set(&self, members: &[EdgeSet]) -> Result<(), EdgeSet> {
        for &m in members {
            if m.is_empty() || !self.contains(m) {
                return Err(m);
            }
        }
        for p in self.nonempty() {
            let qs = maximal(members.iter().copied().filter(|q| q.is_subset(p)));
            if qs.is_empty() {
                return Err(p);
            }
            if qs.iter().map(|&q| self.a_dim(q)).sum::<i64>() != self.a_dim(p) {
                return Err(p);
            }
            if !self.join_map_is_iso(p, &qs) {
                return Err(p);
            }
        }
        Ok(())
    }

    pub fn maximal_building_set(&self) -> BuildingSet {
        BuildingSet { lattice: self.clone(), members: self.nonempty(), minimal: false }
    }

    pub fn minimal_building_set(&self) -> BuildingSet {
        BuildingSet { lattice: self.clone(), members: self.irreducibles(), minimal: true }
    }

    pub fn building_set(&self, members: Vec<EdgeSet>) -> Result<BuildingSet, LatticeError> {
        self.validate_building_set(&members).map_err(LatticeError::BadMember)?;
        let mut members = members;
        sort_canonical(&mut members);
        let minimal = members == self.irreducibles();
        Ok(BuildingSet { lattice: self.clone(), members, minimal })
    }
}

/// Inclusion-maximal elements of a family, canonical order.
pub fn maximal<I: IntoIterator<Item = EdgeSet>>(it: I) -> Vec<EdgeSet> {
    let v: Vec<EdgeSet> = it.into_iter().collect();
    let mut out: Vec<EdgeSet> = v.iter().copied().filter(|&a| !v.iter().any(|&b| a.is_proper_subset(b))).collect();
    sort_canonical(&mut out);
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LatticeCheck {
    pub join_is_union: Option<Vec<EdgeSet>>,
    pub meet_is_intersection: Option<Vec<EdgeSet>>,
    pub graded: Option<Vec<EdgeSet>>,
    pub submodular: Option<Vec<EdgeSet>>,
    pub distributive: Option<Vec<EdgeSet>>,
}

impl LatticeCheck {
    pub fn passed(&self) -> bool {
        *self == LatticeCheck::default()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildingSet {
    #[serde(skip)]
    pub lattice: SubgraphPoset,
    pub members: Vec<EdgeSet>,
    pub minimal: bool,
}

impl BuildingSet {
    pub fn graph(&self) -> &Graph {
        self.lattice.graph()
    }

    /// Nested-set test straight from the definition.
    pub fn is_nested(&self, set: &[EdgeSet]) -> bool {
        if !set.iter().all(|s| self.members.contains(s)) {
            return false;
        }
        let k = set.len();
        for mask in 1u64..(1 << k) {
            if mask.count_ones() < 2 {
                continue;
            }
            let anti: Vec<EdgeSet> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| set[i]).collect();
            if !is_antichain(&anti) {
                continue;
            }
            match self.lattice.join_all(&anti) {
                Some(j) if !self.members.contains(&j) => {}
                _ => return false,
            }
        }
        true
    }

    /// All nonempty nested sets, each in canonical order, listed by size then canonically.
    pub fn nested_sets(&self) -> Vec<Vec<EdgeSet>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        self.extend_nested(0, &mut cur, &mut out);
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| {
            let ka: Vec<_> = a.iter().map(canonical_key).collect();
            let kb: Vec<_> = b.iter().map(canonical_key).collect();
            ka.cmp(&kb)
        }));
        out
    }

    // Nestedness is hereditary, so only antichains through the new element need checking.
    fn extend_nested(&self, start: usize, cur: &mut Vec<EdgeSet>, out: &mut Vec<Vec<EdgeSet>>) {
        for i in start..self.members.len() {
            let b = self.members[i];
            if self.compatible(cur, b) {
                cur.push(b);
                out.push(cur.clone());
                self.extend_nested(i + 1, cur, out);
                cur.pop();
            }
        }
    }

    fn compatible(&self, cur: &[EdgeSet], b: EdgeSet) -> bool {
        let inc: Vec<EdgeSet> = cur.iter().copied().filter(|&c| !c.is_subset(b) && !b.is_subset(c)).collect();
        let k = inc.len();
        for mask in 1u64..(1 << k) {
            let mut anti: Vec<EdgeSet> = (0..k).filter(|&i| mask >> i & 1 == 1).map(|i| inc[i]).collect();
            if !is_antichain(&anti) {
                continue;
            }
            anti.push(b);
            match self.lattice.join_all(&anti) {
                Some(j) if !self.members.contains(&j) => {}
                _ => return false,
            }
        }
        true
    }

    pub fn max_nested_cardinality(&self) -> usize {
        self.nested_sets().iter().map(|n| n.len()).max().unwrap_or(0)
    }

    /// Sizes of the inclusion-maximal nested sets.
    pub fn maximal_nested_sizes(&self) -> BTreeSet<usize> {
        self.maximal_nested_sets().iter().map(|n| n.len()).collect()
    }

    pub fn maximal_nested_sets(&self) -> Vec<Vec<EdgeSet>> {
        let all = self.nested_sets();
        all.iter()
            .filter(|n| !self.members.iter().any(|m| !n.contains(m) && self.compatible(n, *m)))
            .cloned()
            .collect()
    }
}

pub fn is_antichain(items: &[EdgeSet]) -> bool {
    items.iter().enumerate().all(|(i, &a)| items[i + 1..].iter().all(|&b| !a.is_subset(b) && !b.is_subset(a)))
}

/// `N//J`: elements `g//J` for `g ∈ N`, ordered by cutting every Hasse line that rises out of a
/// member of `J` and hanging the orphans on `o`.
#[derive(Clone, Debug, Serialize)]
pub struct ContractedNested {
    /// Original member.
    pub members: Vec<EdgeSet>,
    /// Edge set of `g//J`, in parent edge indices.
    pub contracted: Vec<EdgeSet>,
    /// Hasse lines (lower, upper) between member indices; `None` is `o`.
    pub covers: Vec<(Option<usize>, usize)>,
    /// Strict order `lt[i][j]`: member i ⊏ member j.
    pub lt: Vec<Vec<bool>>,
}

impl ContractedNested {
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.members.len()).filter(|&i| !(0..self.members.len()).any(|j| self.lt[i][j])).collect()
    }
    pub fn index(&self, g: EdgeSet) -> Option<usize> {
        self.members.iter().position(|&m| m == g)
    }
    pub fn is_below(&self, a: EdgeSet, b: EdgeSet) -> bool {
        match (self.index(a), self.index(b)) {
            (Some(i), Some(j)) => self.lt[i][j],
            _ => false,
        }
    }
}

pub fn contract_nested_poset(g: &Graph, nested: &[EdgeSet], j: &[EdgeSet]) -> ContractedNested {
    let mut members = nested.to_vec();
    sort_canonical(&mut members);
    let n = members.len();
    let mut covers: Vec<(Option<usize>, usize)> = Vec::new();
    for b in 0..n {
        let mut has_lower = false;
        for a in 0..n {
            let (ea, eb) = (members[a], members[b]);
            let is_cover = ea.is_proper_subset(eb)
                && !members.iter().any(|&c| ea.is_proper_subset(c) && c.is_proper_subset(eb));
            if is_cover && !j.contains(&ea) {
                covers.push((Some(a), b));
                has_lower = true;
            }
        }
        if !has_lower {
            covers.push((None, b));
        }
    }
    let mut lt = vec![vec![false; n]; n];
    for &(a, b) in &covers {
        if let Some(a) = a {
            lt[a][b] = true;
        }
    }
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                if lt[a][k] && lt[k][b] {
                    lt[a][b] = true;
                }
            }
        }
    }
    let contracted = members.iter().map(|&m| g.contract_relative_edges(m, j)).collect();
    ContractedNested { members, contracted, covers, lt }
}
