//! Plain Monte Carlo over R^n with a per-coordinate compactification, seeded batch substreams
//! and a deterministic reduction.
//!
//! Each coordinate is drawn as u ∈ (−1, 1) and mapped to x = t·|t| with t = tan(πu/2). The
//! squared tangent makes the weight vanish linearly at x = 0, which keeps the variance of
//! integrands like |x|^{-1}·(bounded) finite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct McParams {
    pub samples: u64,
    pub batches: u64,
    pub seed: u64,
}

impl McParams {
    pub fn new(samples: u64, seed: u64) -> Self {
        McParams { samples, batches: 64.min(samples.max(1)), seed }
    }
    pub fn with_batches(mut self, batches: u64) -> Self {
        self.batches = batches;
        self
    }
}

/// Value and standard error of one Monte Carlo integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over sqrt(samples).
    pub stderr: f64,
    /// Standard deviation of the batch means over sqrt(batches).
    pub batch_stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub batches: u64,
}

impl McEstimate {
    /// A value with no statistical error.
    pub fn exact(value: f64) -> Self {
        McEstimate { value, stderr: 0.0, batch_stderr: 0.0, samples: 0, seed: 0, batches: 0 }
    }

    pub fn scale(mut self, c: f64) -> Self {
        self.value *= c;
        self.stderr *= c.abs();
        self.batch_stderr *= c.abs();
        self
    }

    pub fn relative_error(&self) -> f64 {
        self.stderr / self.value.abs()
    }

    /// |self − other| in units of the combined standard error.
    pub fn sigmas_from(&self, other: &McEstimate) -> f64 {
        let s = self.stderr.hypot(other.stderr);
        (self.value - other.value).abs() / s
    }

    pub fn sigmas_from_value(&self, v: f64) -> f64 {
        (self.value - v).abs() / self.stderr
    }
}

/// Running mean and standard error after each batch, in batch order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRun {
    pub estimate: McEstimate,
    pub trace: Vec<TracePoint>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    s1: f64,
    s2: f64,
}

impl Moments {
    fn merge(a: Moments, b: Moments) -> Moments {
        Moments { n: a.n + b.n, s1: a.s1 + b.s1, s2: a.s2 + b.s2 }
    }
    fn mean(&self) -> f64 {
        self.s1 / self.n as f64
    }
    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let n = self.n as f64;
        let var = ((self.s2 - self.s1 * self.s1 / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

fn pairwise(m: &[Moments]) -> Moments {
    match m.len() {
        0 => Moments::default(),
        1 => m[0],
        n => Moments::merge(pairwise(&m[..n / 2]), pairwise(&m[n / 2..])),
    }
}

/// Maps u ∈ (−1,1) to x and returns dx/du.
#[inline]
fn compactify(u: f64) -> (f64, f64) {
    let t = (FRAC_PI_2 * u).tan();
    (t * t.abs(), 2.0 * t.abs() * FRAC_PI_2 * (1.0 + t * t))
}

/// ∫_{R^dim} f(x) dx. `tag` selects an independent family of substreams for the same seed, so
/// several integrals in one computation never share random numbers.
pub fn integrate<F>(dim: usize, params: &McParams, tag: u32, f: F) -> McRun
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_centered(&vec![0.0; dim], params, tag, f)
}

/// As `integrate`, with the compactification of coordinate i centred at `center[i]` instead of 0.
/// A fixed change of variables: it moves sampling density onto an integrand supported away from
/// the origin without changing the integral.
pub fn integrate_centered<F>(center: &[f64], params: &McParams, tag: u32, f: F) -> McRun
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = center.len();
    let batches = params.batches.max(1);
    let base = params.samples / batches;
    let extra = params.samples % batches;
    let volume = 2f64.powi(dim as i32);
    let per_batch: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let n = base + u64::from(b < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream((u64::from(tag) << 32) | b);
            let mut x = vec![0.0; dim];
            let (mut s1, mut s2) = (Kahan::default(), Kahan::default());
            for _ in 0..n {
                let mut jac = volume;
                for (xi, c) in x.iter_mut().zip(center) {
                    let (v, j) = compactify(rng.random_range(-1.0..1.0));
                    *xi = c + v;
                    jac *= j;
                }
                if jac == 0.0 {
                    s1.add(0.0);
                    continue;
                }
                let w = f(&x) * jac;
                s1.add(w);
                s2.add(w * w);
            }
            Moments { n, s1: s1.sum, s2: s2.sum }
        })
        .collect();

    let mut trace = Vec::with_capacity(per_batch.len());
    let mut run = Moments::default();
    for m in &per_batch {
        run = Moments::merge(run, *m);
        trace.push(TracePoint { samples: run.n, mean: run.mean(), stderr: run.stderr() });
    }
    let total = pairwise(&per_batch);
    let means: Vec<f64> = per_batch.iter().filter(|m| m.n > 0).map(|m| m.mean()).collect();
    let batch_stderr = if means.len() > 1 {
        let k = means.len() as f64;
        let mu = means.iter().sum::<f64>() / k;
        (means.iter().map(|m| (m - mu) * (m - mu)).sum::<f64>() / (k - 1.0) / k).sqrt()
    } else {
        f64::INFINITY
    };
    McRun {
        estimate: McEstimate {
            value: total.mean(),
            stderr: total.stderr(),
            batch_stderr,
            samples: total.n,
            seed: params.seed,
            batches,
        },
        trace,
    }
}

/// First-order propagated product of independent estimates.
pub fn product(factors: &[McEstimate]) -> McEstimate {
    let value: f64 = factors.iter().map(|f| f.value).product();
    let var: f64 = (0..factors.len())
        .map(|i| {
            let others: f64 = factors.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, f)| f.value).product();
            (others * factors[i].stderr).powi(2)
        })
        .sum();
    let bvar: f64 = (0..factors.len())
        .map(|i| {
            let others: f64 = factors.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, f)| f.value).product();
            (others * factors[i].batch_stderr).powi(2)
        })
        .sum();
    McEstimate {
        value,
        stderr: var.sqrt(),
        batch_stderr: bvar.sqrt(),
        samples: factors.iter().map(|f| f.samples).sum(),
        seed: factors.first().map_or(0, |f| f.seed),
        batches: factors.iter().map(|f| f.batches).sum(),
    }
}

/// Sum of independent estimates with variances added.
pub fn sum(terms: &[McEstimate]) -> McEstimate {
    McEstimate {
        value: terms.iter().map(|t| t.value).sum(),
        stderr: terms.iter().map(|t| t.stderr * t.stderr).sum::<f64>().sqrt(),
        batch_stderr: terms.iter().map(|t| t.batch_stderr * t.batch_stderr).sum::<f64>().sqrt(),
        samples: terms.iter().map(|t| t.samples).sum(),
        seed: terms.first().map_or(0, |t| t.seed),
        batches: terms.iter().map(|t| t.batches).sum(),
    }
}
