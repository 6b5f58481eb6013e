mod common;

use std::f64::consts::PI;

use common::*;
use proptest::prelude::*;
use wonderful::charts::{default_chart, enumerate_charts, Chart};
use wonderful::fixtures::*;
use wonderful::lattice::SubgraphPoset;
use wonderful::renorm::fixed::{mask_product, pullback, renormalize_with, Counterterms, Scheme, SubChart};
use wonderful::renorm::mc::{integrate, product, sum};
use wonderful::renorm::*;
use wonderful::{EdgeSet, Graph};

const SIGMAS: f64 = 3.0;
const QUAD_ABS: f64 = 1e-8;

fn es(ix: &[usize]) -> EdgeSet {
    EdgeSet::from_indices(ix.iter().copied())
}

fn fish_chart(marking: (usize, usize)) -> Chart {
    let f = fish();
    Chart::new(&f, &[f.all()], es(&[0]), &[marking]).unwrap()
}

fn dunce_chart() -> Chart {
    let d = dunce();
    default_chart(&d, &[dunce_fish(), d.all()]).unwrap()
}

fn std_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

// ---------- smooth cutoff ----------

proptest! {
    #[test]
    fn beta_is_a_monotone_step(a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(beta(lo) >= beta(hi));
        prop_assert!((0.0..=1.0).contains(&beta(a)));
        if a <= 0.5 { prop_assert_eq!(beta(a), 1.0); }
        if a >= 1.0 { prop_assert_eq!(beta(a), 0.0); }
        prop_assert!((beta(a) - beta_oracle(a)).abs() < 1e-15);
    }
}

#[test]
fn nu_is_one_on_the_marked_slice() {
    let c = dunce_chart();
    let ct = Counterterms::new(&c, 1.0).unwrap();
    let mut x = vec![0.3, 5.0, -7.0, 2.0, 0.4, 9.0, 1.0, 1.0];
    for k in 0..2 {
        x[c.marked_coord(k)] = 0.0;
        assert_eq!(ct.nu(k, 0.7, &x), 1.0);
    }
    x[c.marked_coord(1)] = 0.5;
    assert_eq!(ct.nu(1, 0.7, &x), 0.0);
}

// ---------- Monte Carlo core ----------

#[test]
fn gaussian_integral_and_determinism() {
    let mc = McParams::new(400_000, 3);
    let f = |x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>()).exp();
    let a = integrate(3, &mc, 0, f);
    let b = integrate(3, &mc, 0, f);
    assert_eq!(a, b);
    assert!(a.estimate.sigmas_from_value(PI.powf(1.5)) < SIGMAS, "{:?}", a.estimate);
    assert_eq!(a.trace.len(), 64);
    assert_eq!(a.trace.last().unwrap().mean, a.estimate.value);
    assert_eq!(a.estimate.samples, 400_000);
    let other_tag = integrate(3, &mc, 1, f);
    assert_ne!(a.estimate.value, other_tag.estimate.value);
    // stderr and batch stderr estimate the same quantity.
    let ratio = a.estimate.batch_stderr / a.estimate.stderr;
    assert!((0.6..1.6).contains(&ratio), "{ratio}");
}

#[test]
fn uneven_batches_count_every_sample() {
    let mc = McParams { samples: 1001, batches: 7, seed: 9 };
    let r = integrate(1, &mc, 0, |_| 0.0);
    assert_eq!(r.estimate.samples, 1001);
    assert_eq!(r.estimate.value, 0.0);
}

#[test]
fn error_propagation() {
    let a = McEstimate { value: 2.0, stderr: 0.1, batch_stderr: 0.1, samples: 10, seed: 1, batches: 1 };
    let b = McEstimate { value: -3.0, stderr: 0.2, batch_stderr: 0.2, samples: 10, seed: 1, batches: 1 };
    let p = product(&[a, b]);
    assert_eq!(p.value, -6.0);
    assert!((p.stderr - (0.3f64.powi(2) + 0.4f64.powi(2)).sqrt()).abs() < 1e-15);
    let s = sum(&[a, b]);
    assert_eq!(s.value, -1.0);
    assert!((s.stderr - 0.05f64.sqrt()).abs() < 1e-15);
}

// ---------- toy model ----------

#[test]
fn toy_ms_matches_simpson_oracle() {
    let phi = TestFn1d { f: &std_bump, support: 1.0 };
    let got = toy_renormalize(ToyScheme::Ms, 4, phi, 1.0).unwrap();
    let p0 = std_bump(0.0);
    let want = simpson(&|x| if x == 0.0 { 0.0 } else { 2.0 * (std_bump(x) - p0) / x }, 0.0, 1.0, 1e-13);
    assert!((got - want).abs() < QUAD_ABS, "{got} vs {want}");
}

#[test]
fn toy_fixed_matches_simpson_oracle() {
    let phi = TestFn1d { f: &std_bump, support: 1.0 };
    let p0 = std_bump(0.0);
    for r in [0.3, 1.0, 2.5] {
        let got = toy_renormalize(ToyScheme::Fixed { radius: r }, 4, phi, 1.0).unwrap();
        let f = |x: f64| if x == 0.0 { 0.0 } else { 2.0 * (std_bump(x) - p0 * beta_oracle(x / r)) / x };
        let want = simpson_pieces(&f, &[0.0, 0.5 * r.min(1.0), r.min(1.0), r.max(1.0)], 1e-13);
        assert!((got - want).abs() < QUAD_ABS, "r={r}: {got} vs {want}");
    }
}

#[test]
fn toy_without_subtraction_is_the_plain_integral() {
    let shifted = |x: f64| std_bump(2.0 * x.abs() - 3.0);
    let phi = TestFn1d { f: &shifted, support: 2.0 };
    let got = toy_renormalize(ToyScheme::Ms, 4, phi, 1.0).unwrap();
    let want = 2.0 * simpson(&|x| shifted(x) / x, 1.0, 2.0, 1e-13);
    assert!((got - want).abs() < QUAD_ABS);
}

#[test]
fn toy_pole_split() {
    let phi = TestFn1d { f: &std_bump, support: 1.0 };
    let p0 = std_bump(0.0);
    // u = |x|^{-s} is d_g = 1: the pole reads 2φ(0)/(1−s).
    assert!((toy_pole_coefficient(1, p0) / (0.9 - 1.0) - 2.0 * p0 / (1.0 - 0.9)).abs() < 1e-15);
    for (d_g, s) in [(4, 0.95), (4, 0.99), (1, 0.9)] {
        let raw = toy_raw(d_g, phi, s).unwrap();
        let reg = toy_renormalize(ToyScheme::Ms, d_g, phi, s).unwrap();
        let pole = toy_pole_coefficient(d_g, p0);
        assert!((raw - (reg + pole / (s - 1.0))).abs() < 1e-7, "d_g={d_g} s={s}");
    }
}

#[test]
fn toy_rejects_bad_input() {
    let wide = |x: f64| (-x * x).exp();
    let phi = TestFn1d { f: &wide, support: 1.0 };
    assert!(matches!(toy_renormalize(ToyScheme::Ms, 4, phi, 1.0), Err(RenormError::NotCompact(_))));
    let phi = TestFn1d { f: &std_bump, support: 1.0 };
    assert!(matches!(toy_renormalize(ToyScheme::Ms, 4, phi, 1.3), Err(RenormError::OutsideStrip { .. })));
    assert!(toy_raw(4, phi, 1.0).is_err());
}

// ---------- periods and the pole structure ----------

#[test]
fn fish_period_and_marking_independence() {
    let mc = McParams::new(1_000_000, 1);
    let p = period(&fish(), &mc).unwrap().estimate;
    assert!(p.sigmas_from_value(-PI * PI / 2.0) < SIGMAS, "{p:?}");
    let runs: Vec<McEstimate> = (0..4).map(|i| period_in_chart(&fish_chart((0, i)), &mc, i as u32).unwrap().estimate).collect();
    for a in &runs {
        for b in &runs {
            assert!(a.sigmas_from(b) < SIGMAS || a == b);
        }
    }
}

#[test]
fn fish_period_radial_oracle() {
    // −(1/2)·4π ∫ r² (1+r²)^{-2} dr with r = tan θ.
    let radial = simpson(&|t: f64| t.sin().powi(2), 0.0, PI / 2.0, 1e-14);
    assert!((-2.0 * PI * radial + PI * PI / 2.0).abs() < 1e-12);
}

#[test]
fn period_rejects_non_primitive() {
    let err = period(&dunce(), &McParams::new(10, 1)).unwrap_err();
    assert!(err.to_string().contains("not primitive"));
}

#[test]
fn k4_period_seed_agreement() {
    let a = period(&k4(), &McParams::new(200_000, 1)).unwrap().estimate;
    let b = period(&k4(), &McParams::new(200_000, 2)).unwrap().estimate;
    assert!(a.value < 0.0 && a.sigmas_from(&b) < SIGMAS, "{a:?} {b:?}");
}

#[test]
fn leading_coefficients() {
    let mc = McParams::new(1_000_000, 5);
    let lc = leading_coefficient(&dunce(), &mc).unwrap();
    assert_eq!(lc.terms.len(), 1);
    assert_eq!(lc.terms[0].factors.len(), 2);
    assert!(lc.estimate.sigmas_from_value(PI.powi(4) / 4.0) < SIGMAS, "{:?}", lc.estimate);
    let f = leading_coefficient(&fish(), &mc).unwrap().estimate;
    assert_eq!(f, period(&fish(), &mc).unwrap().estimate);

    let nm = nm_bubble(1, 1);
    let a = leading_coefficient(&nm, &McParams::new(200_000, 1)).unwrap();
    let b = leading_coefficient(&nm, &McParams::new(200_000, 2)).unwrap();
    assert!(a.estimate.sigmas_from(&b.estimate) < SIGMAS);
    assert_eq!(a.terms.len(), 1);
    assert_eq!(a.terms[0].factors.len(), 3);

    // Two fishes glued at a vertex: G is a product, not irreducible.
    let glued = Graph::from_edges(3, &[(0, 1), (0, 1), (1, 2), (1, 2)], 4).unwrap();
    assert!(matches!(leading_coefficient(&glued, &mc), Err(RenormError::NotIrreducible(_))));
}

#[test]
fn pole_profiles() {
    let b = |g: &Graph| SubgraphPoset::divergent_lattice(g).unwrap().minimal_building_set();
    let d = dunce();
    let p = pole_profile(&b(&d));
    assert_eq!(p.pole_order, 2);
    assert_eq!(p.support[&-1], vec![vec![dunce_fish()], vec![d.all()]]);
    assert_eq!(p.support[&-2], vec![vec![dunce_fish(), d.all()]]);
    assert_eq!(pole_profile(&b(&fish())).pole_order, 1);
    let p = pole_profile(&b(&insertion(3)));
    assert_eq!(p.pole_order, 3);
    assert_eq!(p.support[&-3].len(), 1);
}

// ---------- renormalization on one chart ----------

#[test]
fn fish_fixed_matches_radial_oracle() {
    let c = fish_chart((0, 0));
    let mc = McParams::new(1_000_000, 2);
    for (nu, psi) in [(1.0, 1.0), (0.6, 1.5)] {
        let got = renormalize_fixed(&c, &[nu], &BumpSpec::test(psi), 1.0, &mc).unwrap().estimate;
        let want = fish_fixed_oracle(nu, psi);
        assert!(got.sigmas_from_value(want) < SIGMAS, "ν={nu} ψ={psi}: {got:?} vs {want}");
    }
}

#[test]
fn fish_ms_matches_radial_oracle() {
    let c = fish_chart((0, 2));
    let got = renormalize_ms(&c, 1.0, &BumpSpec::test(1.0), 1.0, &McParams::new(1_000_000, 4)).unwrap().estimate;
    let want = fish_ms_oracle(1.0, 1.0);
    assert!(got.sigmas_from_value(want) < SIGMAS, "{got:?} vs {want}");
}

#[test]
fn zero_test_function_gives_zero() {
    let c = dunce_chart();
    let mc = McParams::new(2000, 1);
    let zero = |_: &[f64]| 0.0;
    for s in [Scheme::Fixed(vec![1.0, 1.0]), Scheme::Ms(1.0)] {
        let r = renormalize_with(&c, &s, &zero, 1.0, &mc, 0).unwrap().estimate;
        assert_eq!((r.value, r.stderr), (0.0, 0.0));
    }
}

#[test]
fn far_test_function_needs_no_subtraction() {
    // ψ sits at distance 2 from the origin and ν_G vanishes beyond |ρ| = 1, so every counterterm
    // is zero and the result is the plain integral of v·ψ.
    let c = fish_chart((0, 0));
    let psi = BumpSpec::test_at(0.5, vec![2.0, 0.0, 0.0, 0.0]);
    let mc = McParams::new(400_000, 8);
    let got = renormalize_fixed(&c, &[1.0], &psi, 1.0, &mc).unwrap().estimate;
    let plain = integrate(4, &mc, 99, |y| {
        let n2: f64 = y.iter().map(|v| v * v).sum();
        psi.eval(y) / (n2 * n2)
    })
    .estimate;
    assert!(got.sigmas_from(&plain) < SIGMAS, "{got:?} vs {plain:?}");
}

#[test]
fn scheme_errors() {
    let c = fish_chart((0, 0));
    let mc = McParams::new(10, 1);
    let psi = BumpSpec::test(1.0);
    assert!(matches!(renormalize_ms(&c, 0.0, &psi, 1.0, &mc), Err(RenormError::BadCutoff(_))));
    assert!(matches!(renormalize_ms(&c, -1.0, &psi, 1.0, &mc), Err(RenormError::BadCutoff(_))));
    assert!(matches!(renormalize_fixed(&c, &[1.0], &psi, 2.0, &mc), Err(RenormError::OutsideStrip { .. })));
    assert!(matches!(renormalize_fixed(&c, &[1.0, 1.0], &psi, 1.0, &mc), Err(RenormError::RadiusCount { .. })));
    assert!(matches!(renormalize_fixed(&c, &[0.0], &psi, 1.0, &mc), Err(RenormError::BadRadius(_))));
}

#[test]
fn ms_and_mollified_fixed_agree_on_the_fish() {
    // ν_ε = smooth step in |x_G| alone, equal to θ(1 − |x_G|) outside [1−ε, 1]. The difference to
    // minimal subtraction is ψ(0)·π²·2∫_{1−ε}^1 (θ − ν_ε)/t dt ≤ 2π² ε/(1−ε).
    let eps = 0.01;
    let budget = 2.0 * PI * PI * eps / (1.0 - eps);
    let c = fish_chart((0, 0));
    let psi = BumpSpec::test(1.0);
    let phi = pullback(&c, &psi);
    let ct = Counterterms::new(&c, 1.0).unwrap();
    let m = c.marked_coord(0);
    let mc = McParams::new(1_000_000, 6);
    let moll = integrate(4, &mc, 0, |x| {
        let t = x[m].abs();
        let nu = if t <= 1.0 - eps { 1.0 } else { beta(0.5 + (t - (1.0 - eps)) / (2.0 * eps)) };
        ct.sum(x, &phi, |k| if k == 0 { 1.0 } else { nu })
    })
    .estimate;
    let ms = renormalize_ms(&c, 1.0, &psi, 1.0, &mc).unwrap().estimate;
    let gap = (moll.value - ms.value).abs();
    assert!(gap <= budget + SIGMAS * moll.stderr.hypot(ms.stderr), "{gap} > {budget}");
}

#[test]
fn ms_cutoff_change_on_the_fish() {
    let c = fish_chart((0, 0));
    let psi = BumpSpec::test(1.0);
    let r = ms_cutoff_change(&c, 0.5, 2.0, &psi, &McParams::new(1_000_000, 3)).unwrap();
    assert!(r.pass, "{r:?}");
    let analytic = -2.0 * PI * PI * (2.0f64 / 0.5).ln();
    assert!(r.lhs.sigmas_from_value(analytic) < SIGMAS, "{:?} vs {analytic}", r.lhs);
    assert!((fish_ms_oracle(2.0, 1.0) - fish_ms_oracle(0.5, 1.0) - analytic).abs() < 1e-8);
}

#[test]
fn subtracted_integrand_has_finite_variance() {
    // One chart per nested set of every fixture; the marking only permutes coordinates.
    let mut charts: Vec<Chart> = Vec::new();
    for (_, g) in all_named() {
        let Ok(l) = SubgraphPoset::divergent_lattice(&g) else { continue };
        if l.len() > 1 {
            for c in enumerate_charts(&l.minimal_building_set()).unwrap() {
                if charts.last().is_none_or(|p| p.nested != c.nested) {
                    charts.push(c);
                }
            }
        }
    }
    let psi = BumpSpec::test(1.0);
    for c in &charts {
        let r = renormalize_fixed(c, &vec![1.0; c.nested.len()], &psi, 1.0, &McParams::new(10_000, 1)).unwrap().estimate;
        assert!(r.value.is_finite() && r.stderr.is_finite(), "{:?}", c.nested);
        // Heavy tails would show up as batch means scattering far beyond the sample stderr.
        assert!(r.batch_stderr < 10.0 * r.stderr + 1e-300, "{:?}: {r:?}", c.nested);
    }
}

#[test]
fn integrand_grows_at_most_logarithmically_near_strata() {
    let c = dunce_chart();
    let ct = Counterterms::new(&c, 1.0).unwrap();
    let psi = BumpSpec::test(1.0);
    let phi = pullback(&c, &psi);
    let base = [0.3, 0.1, -0.2, 0.05, 0.4, 0.2, 0.1, -0.3];
    let at = |k: usize, t: f64| {
        let mut x = base.to_vec();
        x[c.marked_coord(k)] = t;
        let cuts = ct.cuts(&Scheme::Fixed(vec![1.0, 1.0]), &x);
        ct.sum(&x, &phi, |m| mask_product(&cuts, m)).abs()
    };
    for k in 0..2 {
        let ratio: Vec<f64> = [1e-3, 1e-5, 1e-7].iter().map(|&t| at(k, t) / (1.0 + (t as f64).ln().abs()).powi(2)).collect();
        assert!(ratio.iter().all(|r| r.is_finite()));
        assert!(ratio[2] <= 2.0 * ratio[0] + 1e-12, "member {k}: {ratio:?}");
    }
}

// ---------- sub-charts and the renormalization group ----------

#[test]
fn dunce_sub_charts() {
    let c = dunce_chart();
    let d = dunce();
    let g = dunce_fish();
    let gi = c.member_index(g).unwrap();
    let gg = c.member_index(d.all()).unwrap();
    // G//{g} = G/g is a fish on the e1 block.
    let s = SubChart::new(&c, d.all(), &[g], &[gg]).unwrap();
    assert_eq!(s.chart.graph().n_edges(), 2);
    assert_eq!(s.chart.n_coords(), 4);
    assert!(s.chart.graph().is_primitive(s.chart.graph().all()));
    assert_eq!(s.coord_map, (0..4).map(|i| c.basis.tree_edges.iter().position(|&e| e == 0).unwrap() * 4 + i).collect::<Vec<_>>());
    // g//{g} = g.
    let s = SubChart::new(&c, g, &[g], &[gi]).unwrap();
    assert_eq!(s.chart.graph().n_edges(), 2);
    assert_eq!(s.member_map, vec![gi]);
    // G//{G} = G with both members.
    let s = SubChart::new(&c, d.all(), &[d.all()], &[gi, gg]).unwrap();
    assert_eq!(s.chart.n_coords(), 8);
    assert_eq!(s.chart.nested, c.nested);
}

#[test]
fn rg_fish_single_term() {
    let c = fish_chart((0, 0));
    let psi = BumpSpec::test(1.0);
    let r = rg_check(&c, &[0.8], &[1.2], &psi, &McParams::new(1_000_000, 1)).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.terms.len(), 1);
    let t = &r.terms[0];
    assert_eq!((t.sign, t.pairing.value), (-1.0, 1.0));
    let c_g = 2.0 * PI * PI * (1.2f64 / 0.8).ln();
    assert!(t.coefficients[0].sigmas_from_value(c_g) < SIGMAS, "{:?} vs {c_g}", t.coefficients[0]);
    let lhs_oracle = fish_fixed_oracle(1.2, 1.0) - fish_fixed_oracle(0.8, 1.0);
    assert!(r.lhs.sigmas_from_value(lhs_oracle) < SIGMAS);
}

#[test]
fn rg_identical_points_vanish() {
    for c in [fish_chart((0, 1)), dunce_chart()] {
        let nu = vec![0.9; c.nested.len()];
        let r = rg_check(&c, &nu, &nu, &BumpSpec::test(1.0), &McParams::new(20_000, 1)).unwrap();
        assert_eq!((r.lhs.value, r.rhs.value), (0.0, 0.0));
        assert!(r.pass);
    }
}

#[test]
fn rg_dunce_three_terms() {
    let c = dunce_chart();
    let r = rg_check(&c, &[0.8, 0.8], &[1.2, 1.2], &BumpSpec::test(1.0), &McParams::new(1_000_000, 2)).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.terms.len(), 3);
    let g = dunce_fish();
    let big = dunce().all();
    let signs: Vec<(Vec<EdgeSet>, f64)> = r.terms.iter().map(|t| (t.k.clone(), t.sign)).collect();
    assert!(signs.contains(&(vec![g], -1.0)));
    assert!(signs.contains(&(vec![big], -1.0)));
    assert!(signs.iter().any(|(k, s)| k.len() == 2 && *s == 1.0));
    // Both c_g factors are fish coefficients: 2π² log(r'/r).
    let c_g = 2.0 * PI * PI * 1.5f64.ln();
    for t in &r.terms {
        for (gamma, coef) in t.k.iter().zip(&t.coefficients) {
            if *gamma == g || t.k.len() == 2 {
                assert!(coef.sigmas_from_value(c_g) < SIGMAS, "{:?}", t.k);
            }
        }
    }
}

// ---------- locality ----------

#[test]
fn locality_splits() {
    let g11 = nm_bubble(1, 1);
    let r = locality_check(&g11, nm_left(1), nm_right(1, 1)).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.irreducibles_union, vec![nm_left(1), nm_right(1, 1)]);
    assert_eq!(r.nested_sets, 3);
    let g21 = nm_bubble(2, 1);
    let r = locality_check(&g21, nm_left(1), nm_right(2, 1)).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn locality_preconditions() {
    let g11 = nm_bubble(1, 1);
    assert!(matches!(locality_check(&g11, nm_left(1), nm_left(1)), Err(RenormError::NotDisjoint(..))));
    assert!(matches!(locality_check(&g11, es(&[0]), nm_right(1, 1)), Err(RenormError::NotDivergent(_))));
}

#[test]
fn locality_numeric_factorization() {
    let g11 = nm_bubble(1, 1);
    let psi = remainder_bump(&g11, nm_left(1), nm_right(1, 1), 0.9, 3.0).unwrap();
    assert_eq!(psi.center.iter().filter(|&&c| c == 3.0).count(), 1);
    let r = locality_numeric(&g11, nm_left(1), nm_right(1, 1), [1.0, 0.7], &psi, &McParams::new(1_000_000, 1)).unwrap();
    assert!(r.pass, "{r:?}");
}
