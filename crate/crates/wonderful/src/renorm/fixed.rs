//! Local renormalization in one chart: subtraction at fixed conditions (smooth ν) and minimal
//! subtraction (sharp cutoff in the marked coordinates).
//!
//! Both are Σ_{K⊆N} (−1)^{|K|} ∫ dx u_N w_K(x) δ_K[f·φ](x), with every counterterm evaluated at
//! the same sample point.

use serde::Serialize;

use super::mc::{integrate_centered, McParams, McRun};
use super::{check_s, BumpSpec, RenormError};
use crate::charts::Chart;
use crate::graph::EdgeSet;
use crate::lattice::sort_canonical;

/// Test function in chart coordinates.
pub type TestFn<'a> = dyn Fn(&[f64]) -> f64 + Sync + 'a;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Subtraction radius per nested member, in chart order.
    Fixed(Vec<f64>),
    /// Sharp cutoff θ(c0 − |x_g|) in every marked coordinate.
    Ms(f64),
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Fixed(_) => "fixed",
            Scheme::Ms(_) => "ms",
        }
    }

    pub(crate) fn validate(&self, n_members: usize) -> Result<(), RenormError> {
        match self {
            Scheme::Fixed(r) => {
                if r.len() != n_members {
                    return Err(RenormError::RadiusCount { got: r.len(), want: n_members });
                }
                match r.iter().find(|&&v| !(v > 0.0 && v.is_finite())) {
                    Some(&v) => Err(RenormError::BadRadius(v)),
                    None => Ok(()),
                }
            }
            Scheme::Ms(c) if *c > 0.0 && c.is_finite() => Ok(()),
            Scheme::Ms(c) => Err(RenormError::BadCutoff(*c)),
        }
    }
}

/// Per-chart data for evaluating the counterterm sum.
pub struct Counterterms<'a> {
    pub chart: &'a Chart,
    pub s: f64,
    exclusive: Vec<Vec<usize>>,
}

impl<'a> Counterterms<'a> {
    pub fn new(chart: &'a Chart, s: f64) -> Result<Self, RenormError> {
        check_s(s, chart.member_dims().into_iter().max().unwrap_or(1))?;
        let exclusive = (0..chart.nested.len()).map(|k| chart.exclusive_coords(k)).collect();
        Ok(Counterterms { chart, s, exclusive })
    }

    /// ν_k(x) with radius r.
    pub fn nu(&self, k: usize, r: f64, x: &[f64]) -> f64 {
        let hat: f64 = self.exclusive[k].iter().map(|&c| x[c] * x[c]).sum();
        BumpSpec::nu(r).nu_value(x[self.chart.marked_coord(k)], hat)
    }

    /// θ(c − |x_k|).
    pub fn sharp(&self, k: usize, c: f64, x: &[f64]) -> f64 {
        if x[self.chart.marked_coord(k)].abs() < c {
            1.0
        } else {
            0.0
        }
    }

    /// Per-member cut value under a scheme.
    pub fn cuts(&self, scheme: &Scheme, x: &[f64]) -> Vec<f64> {
        (0..self.chart.nested.len())
            .map(|k| match scheme {
                Scheme::Fixed(r) => self.nu(k, r[k], x),
                Scheme::Ms(c) => self.sharp(k, *c, x),
            })
            .collect()
    }

    /// u_N(x) Σ_K (−1)^{|K|} weight(K) δ_K[f·test](x), K given as a bit mask over members.
    /// Points where a propagator argument vanishes are a null set and contribute 0.
    pub fn sum(&self, x: &[f64], test: &TestFn, weight: impl Fn(u32) -> f64) -> f64 {
        let n = self.chart.nested.len();
        let mut y = x.to_vec();
        let mut total = 0.0;
        for mask in 0..1u32 << n {
            let w = weight(mask);
            if w == 0.0 {
                continue;
            }
            y.copy_from_slice(x);
            for k in 0..n {
                if mask >> k & 1 == 1 {
                    y[self.chart.marked_coord(k)] = 0.0;
                }
            }
            let t = test(&y);
            if t == 0.0 {
                continue;
            }
            let Ok(f) = self.chart.f_eval(&y, self.s) else { continue };
            let sign = if mask.count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            total += sign * w * f * t;
        }
        if total == 0.0 {
            return 0.0;
        }
        self.chart.u_factor(x, self.s) * total
    }
}

/// ∏_{k∈mask} cuts[k].
pub fn mask_product(cuts: &[f64], mask: u32) -> f64 {
    cuts.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, c)| c).product()
}

/// φ = ψ∘ρ in chart coordinates.
pub fn pullback<'a>(chart: &'a Chart, psi: &'a BumpSpec) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |x: &[f64]| psi.eval(&chart.rho(x).expect("point has chart dimension"))
}

/// ⟨R[w̃]|test⟩ for an arbitrary test function on the chart.
pub fn renormalize_with(
    chart: &Chart,
    scheme: &Scheme,
    test: &TestFn,
    s: f64,
    mc: &McParams,
    tag: u32,
) -> Result<McRun, RenormError> {
    renormalize_centered(chart, scheme, test, s, mc, tag, &vec![0.0; chart.n_coords()])
}

/// `renormalize_with` sampling around `center` in chart coordinates.
pub fn renormalize_centered(
    chart: &Chart,
    scheme: &Scheme,
    test: &TestFn,
    s: f64,
    mc: &McParams,
    tag: u32,
    center: &[f64],
) -> Result<McRun, RenormError> {
    scheme.validate(chart.nested.len())?;
    let ct = Counterterms::new(chart, s)?;
    Ok(integrate_centered(center, mc, tag, |x| {
        let cuts = ct.cuts(scheme, x);
        ct.sum(x, test, |m| mask_product(&cuts, m))
    }))
}

/// Chart point where ρ meets the centre of ψ along the coordinates no nested member scales, and 0
/// elsewhere. Used to centre sampling on test functions supported away from the origin.
pub fn sampling_center(chart: &Chart, psi: &BumpSpec) -> Vec<f64> {
    let d = chart.dim();
    (0..chart.n_coords())
        .map(|c| {
            let e = chart.basis.tree_edges[c / d];
            if chart.nested.iter().any(|m| m.contains(e)) {
                0.0
            } else {
                psi.center.get(c).copied().unwrap_or(0.0)
            }
        })
        .collect()
}

/// Subtraction at fixed conditions with one ν radius per nested member.
pub fn renormalize_fixed(chart: &Chart, radii: &[f64], psi: &BumpSpec, s: f64, mc: &McParams) -> Result<McRun, RenormError> {
    psi.validate()?;
    renormalize_with(chart, &Scheme::Fixed(radii.to_vec()), &pullback(chart, psi), s, mc, 0)
}

/// Minimal subtraction with cutoff c0 (c0 = 1 is R_1).
pub fn renormalize_ms(chart: &Chart, c0: f64, psi: &BumpSpec, s: f64, mc: &McParams) -> Result<McRun, RenormError> {
    psi.validate()?;
    renormalize_with(chart, &Scheme::Ms(c0), &pullback(chart, psi), s, mc, 0)
}

/// A chart on a contracted (or restricted) graph `target//contracted`, carrying over the parent's
/// tree, markings and coordinates.
pub struct SubChart {
    pub chart: Chart,
    /// Parent coordinate of each sub-chart coordinate.
    pub coord_map: Vec<usize>,
    /// Parent member index of each sub-chart member.
    pub member_map: Vec<usize>,
}

impl SubChart {
    pub fn new(parent: &Chart, target: EdgeSet, contracted: &[EdgeSet], members: &[usize]) -> Result<Self, RenormError> {
        let g = parent.graph();
        let derived = g.contract_relative(target, contracted);
        let mut pulled: Vec<(EdgeSet, usize)> = members
            .iter()
            .map(|&m| (derived.pull(g.contract_relative_edges(parent.nested[m], contracted)), m))
            .collect();
        let mut order: Vec<EdgeSet> = pulled.iter().map(|p| p.0).collect();
        sort_canonical(&mut order);
        pulled.sort_by_key(|p| order.iter().position(|&o| o == p.0));
        let local = |e: usize| derived.edge_map.iter().position(|&o| o == e).expect("marked edge survives contraction");
        let nested: Vec<EdgeSet> = pulled.iter().map(|p| p.0).collect();
        let marking: Vec<(usize, usize)> = pulled
            .iter()
            .map(|&(_, m)| {
                let (e, i) = parent.marking[m];
                (local(e), i)
            })
            .collect();
        let chart = Chart::new(&derived.graph, &nested, derived.pull(parent.basis.tree), &marking)?;
        let d = chart.dim();
        let coord_map = chart
            .basis
            .tree_edges
            .iter()
            .flat_map(|&e| {
                let p = parent.basis.tree_edges.iter().position(|&t| t == derived.edge_map[e]).expect("tree edge");
                (0..d).map(move |i| p * d + i)
            })
            .collect();
        Ok(SubChart { chart, coord_map, member_map: pulled.iter().map(|p| p.1).collect() })
    }

    /// Parent point with the sub-chart coordinates filled in and zeros elsewhere.
    pub fn embed(&self, x: &[f64], parent_len: usize) -> Vec<f64> {
        let mut out = vec![0.0; parent_len];
        for (i, &c) in self.coord_map.iter().enumerate() {
            out[c] = x[i];
        }
        out
    }

    /// Parent radii restricted to the sub-chart members.
    pub fn radii(&self, parent: &[f64]) -> Vec<f64> {
        self.member_map.iter().map(|&m| parent[m]).collect()
    }
}
