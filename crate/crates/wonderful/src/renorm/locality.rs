//! Locality for two disjoint divergent subgraphs: the building set and nested sets of g ∪ h split,
//! and the renormalized pairing factorizes into the renormalizations of g and h paired against
//! the regular remainder.

use serde::Serialize;

use super::fixed::{mask_product, pullback, renormalize_centered, sampling_center, Counterterms, Scheme, SubChart};
use super::mc::{integrate_centered, McEstimate, McParams};
use super::rg::SIGMA_BOUND;
use super::{BumpSpec, RenormError};
use crate::charts::{default_chart, Chart};
use crate::graph::{EdgeSet, Graph};
use crate::lattice::{sort_canonical, BuildingSet, SubgraphPoset};

#[derive(Clone, Debug, Serialize)]
pub struct LocalityReport {
    pub g: EdgeSet,
    pub h: EdgeSet,
    pub irreducibles_g: Vec<EdgeSet>,
    pub irreducibles_h: Vec<EdgeSet>,
    pub irreducibles_union: Vec<EdgeSet>,
    /// I(D(g∪h)) = I(D(g)) ∪ I(D(h)).
    pub union_splits: bool,
    pub nested_sets: usize,
    /// Every I(D(g∪h))-nested set is N_g ∪ N_h with N_g, N_h nested for g and h.
    pub nested_split: bool,
    pub pass: bool,
}

fn check_pair(g: &Graph, a: EdgeSet, b: EdgeSet) -> Result<(), RenormError> {
    for s in [a, b] {
        if s.is_empty() || g.n_components(s) != 1 || !g.is_divergent(s) {
            return Err(RenormError::NotDivergent(s));
        }
    }
    if g.touched(a) & g.touched(b) != 0 || !a.inter(b).is_empty() {
        return Err(RenormError::NotDisjoint(a, b));
    }
    Ok(())
}

/// Minimal building set of the divergent lattice of a (possibly disconnected) subgraph, with
/// members in parent edge indices.
fn building_set_of(g: &Graph, s: EdgeSet) -> Result<(BuildingSet, crate::graph::Derived), RenormError> {
    let r = g.restrict(s);
    let lattice = SubgraphPoset::divergent_unchecked(&r.graph)?;
    Ok((lattice.minimal_building_set(), r))
}

pub fn locality_check(graph: &Graph, g: EdgeSet, h: EdgeSet) -> Result<LocalityReport, RenormError> {
    check_pair(graph, g, h)?;
    let (bg, rg) = building_set_of(graph, g)?;
    let (bh, rh) = building_set_of(graph, h)?;
    let (bu, ru) = building_set_of(graph, g.union(h))?;
    let push = |b: &BuildingSet, r: &crate::graph::Derived| {
        let mut v: Vec<EdgeSet> = b.members.iter().map(|&m| r.push(m)).collect();
        sort_canonical(&mut v);
        v
    };
    let (ig, ih, iu) = (push(&bg, &rg), push(&bh, &rh), push(&bu, &ru));
    let mut joined: Vec<EdgeSet> = ig.iter().chain(&ih).copied().collect();
    sort_canonical(&mut joined);
    let union_splits = joined == iu;

    let nested = bu.nested_sets();
    let nested_split = nested.iter().all(|n| {
        let parent: Vec<EdgeSet> = n.iter().map(|&m| ru.push(m)).collect();
        if !parent.iter().all(|m| m.is_subset(g) || m.is_subset(h)) {
            return false;
        }
        let part = |side: EdgeSet, b: &BuildingSet, r: &crate::graph::Derived| {
            let local: Vec<EdgeSet> = parent.iter().filter(|m| m.is_subset(side)).map(|&m| r.pull(m)).collect();
            local.is_empty() || b.is_nested(&local)
        };
        part(g, &bg, &rg) && part(h, &bh, &rh)
    });
    Ok(LocalityReport {
        g,
        h,
        irreducibles_g: ig,
        irreducibles_h: ih,
        irreducibles_union: iu,
        union_splits,
        nested_sets: nested.len(),
        nested_split,
        pass: union_splits && nested_split,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NumericLocality {
    /// ⟨R_ν[w̃_G]|ψ⟩ on the chart with N = {g, h}.
    pub lhs: McEstimate,
    /// ⟨R_ν[w̃_g] ⊗ R_ν[w̃_h] | ⟨w̃_{G⁻}|ψ⟩⟩ from the separate charts of g and h.
    pub rhs: McEstimate,
    pub sigmas: f64,
    pub pass: bool,
}

/// Numerical factorization on the chart with nested set {g, h}. ψ must vanish near the
/// singular locus of the remaining edges G ∖ (g ∪ h).
pub fn locality_numeric(
    graph: &Graph,
    g: EdgeSet,
    h: EdgeSet,
    radii: [f64; 2],
    psi: &BumpSpec,
    mc: &McParams,
) -> Result<NumericLocality, RenormError> {
    check_pair(graph, g, h)?;
    psi.validate()?;
    let chart = default_chart(graph, &[g, h])?;
    let idx = |s: EdgeSet| chart.member_index(s).expect("member");
    let mut r = vec![0.0; 2];
    r[idx(g)] = radii[0];
    r[idx(h)] = radii[1];
    let center = sampling_center(&chart, psi);
    let lhs = renormalize_centered(&chart, &Scheme::Fixed(r), &pullback(&chart, psi), 1.0, mc, 0, &center)?.estimate;
    let rhs = factorized(&chart, g, h, radii, psi, mc)?;
    let sigmas = lhs.sigmas_from(&rhs);
    Ok(NumericLocality { lhs, rhs, sigmas, pass: sigmas <= SIGMA_BOUND })
}

fn factorized(chart: &Chart, g: EdgeSet, h: EdgeSet, radii: [f64; 2], psi: &BumpSpec, mc: &McParams) -> Result<McEstimate, RenormError> {
    let sg = SubChart::new(chart, g, &[], &[chart.member_index(g).expect("member")])?;
    let sh = SubChart::new(chart, h, &[], &[chart.member_index(h).expect("member")])?;
    let (cg, chh) = (Counterterms::new(&sg.chart, 1.0)?, Counterterms::new(&sh.chart, 1.0)?);
    let (schg, schh) = (Scheme::Fixed(vec![radii[0]]), Scheme::Fixed(vec![radii[1]]));
    let n = chart.n_coords();
    let minus: Vec<usize> = (0..n).filter(|c| !sg.coord_map.contains(c) && !sh.coord_map.contains(c)).collect();
    let minus_edges: Vec<usize> = chart.graph().all().minus(g.union(h)).iter().collect();
    let d = chart.dim() as f64;
    let side = |sub: &SubChart, ct: &Counterterms, x: &[f64], mask: u32| -> Option<(f64, Vec<f64>)> {
        let mut xs: Vec<f64> = sub.coord_map.iter().map(|&c| x[c]).collect();
        sub.chart.delta(&mut xs, &(0..sub.chart.nested.len()).filter(|k| mask >> k & 1 == 1).collect::<Vec<_>>());
        let f = sub.chart.f_eval(&xs, ct.s).ok()?;
        Some((f, sub.chart.rho(&xs).expect("dimension")))
    };
    Ok(integrate_centered(&sampling_center(chart, psi), mc, 1, |x| {
        let xg: Vec<f64> = sg.coord_map.iter().map(|&c| x[c]).collect();
        let xh: Vec<f64> = sh.coord_map.iter().map(|&c| x[c]).collect();
        let (wg, wh) = (cg.cuts(&schg, &xg), chh.cuts(&schh, &xh));
        let mut total = 0.0;
        for mg in 0..1u32 << sg.chart.nested.len() {
            for mh in 0..1u32 << sh.chart.nested.len() {
                let w = mask_product(&wg, mg) * mask_product(&wh, mh);
                if w == 0.0 {
                    continue;
                }
                let (Some((fg, yg)), Some((fh, yh))) = (side(&sg, &cg, x, mg), side(&sh, &chh, x, mh)) else { continue };
                let mut y = vec![0.0; n];
                for (i, &c) in sg.coord_map.iter().enumerate() {
                    y[c] = yg[i];
                }
                for (i, &c) in sh.coord_map.iter().enumerate() {
                    y[c] = yh[i];
                }
                for &c in &minus {
                    y[c] = x[c];
                }
                let p = psi.eval(&y);
                if p == 0.0 {
                    continue;
                }
                let v_minus: f64 = minus_edges
                    .iter()
                    .map(|&e| {
                        let n2: f64 = chart.basis.edge_vector(e, &y).iter().map(|c| c * c).sum();
                        n2.powf(0.5 * (2.0 - d))
                    })
                    .product();
                let sign = if (mg.count_ones() + mh.count_ones()) % 2 == 1 { -1.0 } else { 1.0 };
                total += sign * w * fg * fh * v_minus * p;
            }
        }
        if total == 0.0 {
            return 0.0;
        }
        total * cg.chart.u_factor(&xg, 1.0) * chh.chart.u_factor(&xh, 1.0)
    })
    .estimate)
}

/// Bump of the given radius centred at distance `offset` along the first coordinate of the
/// first tree edge outside g ∪ h, in the coordinates of the chart used by `locality_numeric`.
/// Its support stays away from the singular locus of G ∖ (g ∪ h) when offset > radius.
pub fn remainder_bump(graph: &Graph, g: EdgeSet, h: EdgeSet, radius: f64, offset: f64) -> Result<BumpSpec, RenormError> {
    check_pair(graph, g, h)?;
    let chart = default_chart(graph, &[g, h])?;
    let gh = g.union(h);
    let pos = chart.basis.tree_edges.iter().position(|&e| !gh.contains(e)).ok_or(RenormError::NotDisjoint(g, h))?;
    let mut center = vec![0.0; chart.n_coords()];
    center[pos * chart.dim()] = offset;
    Ok(BumpSpec::test_at(radius, center))
}
