//! Periods of primitive graphs, the leading Laurent coefficient and the pole structure.

use std::collections::BTreeMap;

use serde::Serialize;

use super::mc::{integrate, product, sum, McEstimate, McParams, McRun};
use super::RenormError;
use crate::charts::{default_chart, Chart};
use crate::graph::{EdgeSet, Graph};
use crate::lattice::{BuildingSet, SubgraphPoset};

/// −(2/d_G)·∫ f over the exceptional divisor, for a chart whose only nested member is the
/// whole (primitive) graph. The marked coordinate is a pure scale there, so it is fixed to 1.
pub fn period_in_chart(chart: &Chart, mc: &McParams, tag: u32) -> Result<McRun, RenormError> {
    let g = chart.graph();
    if chart.nested != [g.all()] || !g.is_primitive(g.all()) {
        return Err(RenormError::NotPrimitive(g.all()));
    }
    let m = chart.marked_coord(0);
    let n = chart.n_coords();
    let mut run = integrate(n - 1, mc, tag, |xs| {
        let mut x = Vec::with_capacity(n);
        x.extend_from_slice(&xs[..m]);
        x.push(1.0);
        x.extend_from_slice(&xs[m..]);
        chart.f_eval(&x, 1.0).unwrap_or(0.0)
    });
    let c = -2.0 / g.a_dim(g.all()) as f64;
    run.estimate = run.estimate.scale(c);
    for t in &mut run.trace {
        t.mean *= c;
        t.stderr *= c.abs();
    }
    Ok(run)
}

pub fn period(g: &Graph, mc: &McParams) -> Result<McRun, RenormError> {
    period_tagged(g, mc, 0)
}

fn period_tagged(g: &Graph, mc: &McParams, tag: u32) -> Result<McRun, RenormError> {
    if !g.is_primitive(g.all()) {
        return Err(RenormError::NotPrimitive(g.all()));
    }
    period_in_chart(&default_chart(g, &[g.all()])?, mc, tag)
}

/// One maximal nested set M and the periods of its contracted members γ//M.
#[derive(Clone, Debug, Serialize)]
pub struct NestedProduct {
    pub nested: Vec<EdgeSet>,
    pub factors: Vec<McEstimate>,
    pub product: McEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeadingCoefficient {
    pub estimate: McEstimate,
    pub terms: Vec<NestedProduct>,
}

/// Σ over I(D)-nested sets M of maximal cardinality of ∏_{γ∈M} P(γ//M).
pub fn leading_coefficient(g: &Graph, mc: &McParams) -> Result<LeadingCoefficient, RenormError> {
    let b = SubgraphPoset::divergent_lattice(g)?.minimal_building_set();
    if !b.members.contains(&g.all()) {
        return Err(RenormError::NotIrreducible(g.all()));
    }
    let top = b.max_nested_cardinality();
    let mut tag = 0u32;
    let mut terms = Vec::new();
    for m in b.nested_sets().into_iter().filter(|m| m.len() == top) {
        let mut factors = Vec::with_capacity(m.len());
        for &gamma in &m {
            let contracted = g.contract_relative(gamma, &m).graph;
            if !contracted.is_primitive(contracted.all()) {
                return Err(RenormError::NotPrimitive(gamma));
            }
            factors.push(period_tagged(&contracted, mc, tag)?.estimate);
            tag += 1;
        }
        terms.push(NestedProduct { product: product(&factors), nested: m, factors });
    }
    let estimate = sum(&terms.iter().map(|t| t.product).collect::<Vec<_>>());
    Ok(LeadingCoefficient { estimate, terms })
}

#[derive(Clone, Debug, Serialize)]
pub struct LaurentProfile {
    pub pole_order: usize,
    /// k ∈ −N..−1 → nested sets of cardinality −k.
    pub support: BTreeMap<i64, Vec<Vec<EdgeSet>>>,
    pub leading_coefficient: Option<McEstimate>,
}

pub fn pole_profile(b: &BuildingSet) -> LaurentProfile {
    let pole_order = b.max_nested_cardinality();
    let mut support: BTreeMap<i64, Vec<Vec<EdgeSet>>> = (1..=pole_order).map(|k| (-(k as i64), Vec::new())).collect();
    for n in b.nested_sets() {
        if !n.is_empty() {
            support.entry(-(n.len() as i64)).or_default().push(n);
        }
    }
    LaurentProfile { pole_order, support, leading_coefficient: None }
}
