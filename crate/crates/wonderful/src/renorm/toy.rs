//! One-dimensional extension of u^s = |x|^{-1+d_g(1-s)} across the origin.

use quadrature::double_exponential;

use super::{beta, RenormError};

const QUAD_TOL: f64 = 1e-13;

/// A compactly supported test function on the line; `support` bounds |x| on its support.
#[derive(Clone, Copy)]
pub struct TestFn1d<'a> {
    pub f: &'a dyn Fn(f64) -> f64,
    pub support: f64,
}

impl TestFn1d<'_> {
    fn check(&self) -> Result<(), RenormError> {
        for k in [1.000_000_1, 1.5, 2.0, 4.0, 16.0] {
            let x = self.support * k;
            if (self.f)(x) != 0.0 || (self.f)(-x) != 0.0 {
                return Err(RenormError::NotCompact(x));
            }
        }
        Ok(())
    }
    fn even(&self, x: f64) -> f64 {
        (self.f)(x) + (self.f)(-x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ToyScheme {
    /// r_1: subtract φ(0) on |x| < 1.
    Ms,
    /// r_ν with ν(x) = β(|x|/r).
    Fixed { radius: f64 },
}

fn exponent(d_g: i64, s: f64) -> f64 {
    -1.0 + d_g as f64 * (1.0 - s)
}

/// ∫_0^top g, split at the given interior breakpoints.
fn quad(g: impl Fn(f64) -> f64, breaks: &[f64], top: f64) -> Result<f64, RenormError> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > 0.0 && b < top).collect();
    pts.push(0.0);
    pts.push(top);
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let out = double_exponential::integrate(&g, w[0], w[1], QUAD_TOL);
        if !out.error_estimate.is_finite() || out.error_estimate > 1e-9 {
            return Err(RenormError::Quadrature(out.error_estimate));
        }
        total += out.integral;
    }
    Ok(total)
}

/// ⟨r_1[u^s]|φ⟩ or ⟨r_ν[u^s]|φ⟩, valid for s < 1 + 1/d_g.
pub fn toy_renormalize(scheme: ToyScheme, d_g: i64, phi: TestFn1d, s: f64) -> Result<f64, RenormError> {
    phi.check()?;
    let bound = 1.0 + 1.0 / d_g as f64;
    if s >= bound {
        return Err(RenormError::OutsideStrip { s, bound: bound - 1.0 });
    }
    let a = exponent(d_g, s);
    let p0 = (phi.f)(0.0);
    match scheme {
        ToyScheme::Ms => {
            let top = phi.support.max(1.0);
            let g = |x: f64| {
                let sub = if x < 1.0 { 2.0 * p0 } else { 0.0 };
                x.powf(a) * (phi.even(x) - sub)
            };
            quad(g, &[1.0, phi.support], top)
        }
        ToyScheme::Fixed { radius } => {
            if radius <= 0.0 {
                return Err(RenormError::BadRadius(radius));
            }
            let top = phi.support.max(radius);
            let g = |x: f64| x.powf(a) * (phi.even(x) - 2.0 * p0 * beta(x / radius));
            quad(g, &[0.5 * radius, radius, phi.support], top)
        }
    }
}

/// Residue data of the raw pairing: ⟨u^s|φ⟩ = coefficient/(s−1) + holomorphic.
pub fn toy_pole_coefficient(d_g: i64, phi0: f64) -> f64 {
    -2.0 * phi0 / d_g as f64
}

/// The unrenormalized pairing ⟨u^s|φ⟩, defined for s < 1. The constant φ(0) is integrated in
/// closed form so the quadrature only sees an integrable remainder.
pub fn toy_raw(d_g: i64, phi: TestFn1d, s: f64) -> Result<f64, RenormError> {
    phi.check()?;
    if s >= 1.0 {
        return Err(RenormError::OutsideStrip { s, bound: 0.0 });
    }
    let a = exponent(d_g, s);
    let p0 = (phi.f)(0.0);
    let top = phi.support;
    let rest = quad(|x: f64| x.powf(a) * (phi.even(x) - 2.0 * p0), &[], top)?;
    Ok(rest + 2.0 * p0 * top.powf(a + 1.0) / (a + 1.0))
}
