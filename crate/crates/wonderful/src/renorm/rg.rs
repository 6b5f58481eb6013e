//! Change of renormalization point: R_ν' − R_ν as a sum over nonempty K ⊆ N of renormalized
//! contracted-graph pairings, and the analogous cutoff change for minimal subtraction.

use serde::Serialize;

use super::fixed::{mask_product, pullback, renormalize_with, Counterterms, Scheme, SubChart};
use super::mc::{integrate, product, sum, McEstimate, McParams};
use super::{BumpSpec, RenormError};
use crate::charts::Chart;
use crate::graph::EdgeSet;
use crate::lattice::contract_nested_poset;

/// Combined-sigma threshold for every stochastic comparison.
pub const SIGMA_BOUND: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct RgTerm {
    pub k: Vec<EdgeSet>,
    pub sign: f64,
    /// ⟨R_ν[w̃_{γ//K}]|ν'_γ⟩ for γ ∈ K, in K order.
    pub coefficients: Vec<McEstimate>,
    /// ⟨R_ν[w̃_{G//K}]|δ_K φ⟩, or ψ(0) when G ∈ K.
    pub pairing: McEstimate,
    pub value: McEstimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct RgReport {
    pub nu: Vec<f64>,
    pub nu_prime: Vec<f64>,
    pub lhs: McEstimate,
    pub rhs: McEstimate,
    pub terms: Vec<RgTerm>,
    pub sigmas: f64,
    pub pass: bool,
}

fn members_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&k| mask >> k & 1 == 1).collect()
}

/// Evaluates both sides of the renormalization-group formula at s = 1 in one chart.
pub fn rg_check(chart: &Chart, nu: &[f64], nu_prime: &[f64], psi: &BumpSpec, mc: &McParams) -> Result<RgReport, RenormError> {
    psi.validate()?;
    let n = chart.nested.len();
    let fixed = Scheme::Fixed(nu.to_vec());
    let fixed_prime = Scheme::Fixed(nu_prime.to_vec());
    fixed.validate(n)?;
    fixed_prime.validate(n)?;
    let phi = pullback(chart, psi);
    let ct = Counterterms::new(chart, 1.0)?;
    let lhs = integrate(chart.n_coords(), mc, 0, |x| {
        let (a, b) = (ct.cuts(&fixed_prime, x), ct.cuts(&fixed, x));
        ct.sum(x, &phi, |m| mask_product(&a, m) - mask_product(&b, m))
    })
    .estimate;

    let g = chart.graph();
    let psi0 = psi.eval(&vec![0.0; chart.n_coords()]);
    let mut tag = 1u32;
    let mut next_tag = || {
        tag += 1;
        tag - 1
    };
    let mut terms = Vec::new();
    for mask in 1..1u32 << n {
        let kix = members_of(mask, n);
        let ks: Vec<EdgeSet> = kix.iter().map(|&k| chart.nested[k]).collect();
        let cn = contract_nested_poset(g, &chart.nested, &ks);
        let below = |h: usize, gamma: usize| {
            cn.lt[cn.index(chart.nested[h]).expect("member")][cn.index(chart.nested[gamma]).expect("member")]
        };
        let mut coefficients = Vec::with_capacity(kix.len());
        let mut h_all = Vec::new();
        for &gamma in &kix {
            let h_gamma: Vec<usize> = (0..n).filter(|&h| below(h, gamma)).collect();
            h_all.extend(&h_gamma);
            if nu_prime[gamma] == nu[gamma] {
                // The factor pairs against μ_γ = ν'_γ − ν_γ = 0.
                coefficients.push(McEstimate::exact(0.0));
                continue;
            }
            let mut idx = h_gamma;
            idx.push(gamma);
            let sub = SubChart::new(chart, chart.nested[gamma], &ks, &idx)?;
            let local = sub.member_map.iter().position(|&m| m == gamma).expect("γ is a sub-chart member");
            let sct = Counterterms::new(&sub.chart, 1.0)?;
            let r = nu_prime[gamma];
            let test = |x: &[f64]| sct.nu(local, r, x);
            let run = renormalize_with(&sub.chart, &Scheme::Fixed(sub.radii(nu)), &test, 1.0, mc, next_tag())?;
            coefficients.push(run.estimate);
        }
        let pairing = if ks.contains(&g.all()) {
            McEstimate::exact(psi0)
        } else {
            let rest: Vec<usize> = (0..n).filter(|k| !kix.contains(k) && !h_all.contains(k)).collect();
            let sub = SubChart::new(chart, g.all(), &ks, &rest)?;
            let len = chart.n_coords();
            let test = |xs: &[f64]| {
                let mut x = sub.embed(xs, len);
                chart.delta(&mut x, &kix);
                phi(&x)
            };
            renormalize_with(&sub.chart, &Scheme::Fixed(sub.radii(nu)), &test, 1.0, mc, next_tag())?.estimate
        };
        let sign = if kix.len() % 2 == 1 { -1.0 } else { 1.0 };
        let mut factors = coefficients.clone();
        factors.push(pairing);
        let value = product(&factors).scale(sign);
        terms.push(RgTerm { k: ks, sign, coefficients, pairing, value });
    }
    let rhs = sum(&terms.iter().map(|t| t.value).collect::<Vec<_>>());
    let sigmas = lhs.sigmas_from(&rhs);
    let exact_zero = [lhs, rhs].iter().all(|e| e.value == 0.0 && e.stderr == 0.0);
    let pass = exact_zero || sigmas <= SIGMA_BOUND;
    Ok(RgReport { nu: nu.to_vec(), nu_prime: nu_prime.to_vec(), lhs, rhs, terms, sigmas, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutoffChange {
    pub c: f64,
    pub c_prime: f64,
    /// R_{c'} − R_c from one correlated run.
    pub lhs: McEstimate,
    /// Σ_K (−1)^{|K|} Σ_{∅≠J⊆K} ∫ u ϑ_J θ_{K∖J} δ_K[f φ], on an independent stream.
    pub rhs: McEstimate,
    pub sigmas: f64,
    pub pass: bool,
}

/// Minimal subtraction at cutoff c' against cutoff c.
pub fn ms_cutoff_change(chart: &Chart, c: f64, c_prime: f64, psi: &BumpSpec, mc: &McParams) -> Result<CutoffChange, RenormError> {
    psi.validate()?;
    for v in [c, c_prime] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(RenormError::BadCutoff(v));
        }
    }
    let phi = pullback(chart, psi);
    let ct = Counterterms::new(chart, 1.0)?;
    let (lo, hi) = (Scheme::Ms(c), Scheme::Ms(c_prime));
    let dim = chart.n_coords();
    let lhs = integrate(dim, mc, 0, |x| {
        let (a, b) = (ct.cuts(&hi, x), ct.cuts(&lo, x));
        ct.sum(x, &phi, |m| mask_product(&a, m) - mask_product(&b, m))
    })
    .estimate;
    let rhs = integrate(dim, mc, 1, |x| {
        let theta = ct.cuts(&lo, x);
        let shell: Vec<f64> = ct.cuts(&hi, x).iter().zip(&theta).map(|(a, b)| a - b).collect();
        ct.sum(x, &phi, |k| {
            if k == 0 {
                return 0.0;
            }
            // Nonempty J ⊆ K.
            let mut total = 0.0;
            let mut j = k;
            while j != 0 {
                total += mask_product(&shell, j) * mask_product(&theta, k & !j);
                j = (j - 1) & k;
            }
            total
        })
    })
    .estimate;
    let sigmas = lhs.sigmas_from(&rhs);
    Ok(CutoffChange { c, c_prime, lhs, rhs, sigmas, pass: sigmas <= SIGMA_BOUND })
}
