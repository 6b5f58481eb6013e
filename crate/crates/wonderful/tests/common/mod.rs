#![allow(dead_code)]

use wonderful::Graph;

/// Every multigraph on `nv` labelled vertices with at most `max_e` edges, up to edge order:
/// edges are multisets of vertex pairs, listed in nondecreasing pair order.
pub fn small_multigraphs(nv: usize, max_e: usize, dim: u32) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (a + 1..nv).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(pairs: &[(usize, usize)], start: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for i in start..pairs.len() {
            cur.push(pairs[i]);
            rec(pairs, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut lists = Vec::new();
    rec(&pairs, 0, max_e, &mut cur, &mut lists);
    for l in lists {
        out.push(Graph::from_edges(nv, &l, dim).unwrap());
    }
    out
}

/// Connected graphs among `small_multigraphs` (all vertices touched).
pub fn small_connected(nv: usize, max_e: usize, dim: u32) -> Vec<Graph> {
    small_multigraphs(nv, max_e, dim).into_iter().filter(|g| g.is_connected()).collect()
}

/// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50)
}

/// Simpson over consecutive breakpoints.
pub fn simpson_pieces(f: &dyn Fn(f64) -> f64, pts: &[f64], tol: f64) -> f64 {
    pts.windows(2).map(|w| simpson(f, w[0], w[1], tol / pts.len() as f64)).sum()
}

/// Smooth step: 1 on [0, 1/2], 0 from 1 on.
pub fn beta_oracle(t: f64) -> f64 {
    let h = |z: f64| if z > 0.0 { (-1.0 / z).exp() } else { 0.0 };
    let a = h(1.0 - t);
    if a == 0.0 {
        0.0
    } else {
        a / (a + h(t - 0.5))
    }
}

/// Radial profile of the unit-height ball bump of radius `r`.
pub fn bump_profile(t: f64, r: f64) -> f64 {
    if t >= r {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t / (r * r))).exp()
    }
}

/// Fish in d = 4: ⟨R_ν|ψ⟩ = 2π² ∫_0^∞ (Ψ(t) − β(t/r)Ψ(0))/t dt for a bump ψ of radius `psi_r` at 0.
pub fn fish_fixed_oracle(nu_r: f64, psi_r: f64) -> f64 {
    let top = nu_r.max(psi_r);
    let f = |t: f64| if t == 0.0 { 0.0 } else { (bump_profile(t, psi_r) - beta_oracle(t / nu_r)) / t };
    let mut pts = vec![0.0, 0.5 * nu_r, nu_r, psi_r, top];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    2.0 * std::f64::consts::PI.powi(2) * simpson_pieces(&f, &pts, 1e-12)
}

/// Fish in d = 4 with minimal subtraction at cutoff c:
/// 2π² ∫ (Ψ(t) − θ(c−t)Ψ(0))/t dt − Ψ(0)·∫ f log(1+|x̂|²) d³x̂, the last integral being 2π² log 2 + π².
pub fn fish_ms_oracle(c: f64, psi_r: f64) -> f64 {
    let pi2 = std::f64::consts::PI.powi(2);
    let f = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let step = if t < c { 1.0 } else { 0.0 };
        (bump_profile(t, psi_r) - step) / t
    };
    let mut pts = vec![0.0, c, psi_r, c.max(psi_r)];
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    2.0 * pi2 * simpson_pieces(&f, &pts, 1e-12) - (2.0 * pi2 * 2f64.ln() + pi2)
}
