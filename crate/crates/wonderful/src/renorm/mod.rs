//! Toy-model extensions, pole structure, periods, local renormalization at fixed conditions and
//! by minimal subtraction, and the renormalization-group and locality checks.

pub mod fixed;
pub mod locality;
pub mod mc;
pub mod period;
pub mod rg;
pub mod toy;

use serde::Serialize;
use thiserror::Error;

use crate::charts::ChartError;
use crate::graph::{EdgeSet, GraphError};
use crate::lattice::LatticeError;

pub use fixed::{renormalize_fixed, renormalize_ms, Scheme};
pub use locality::{locality_check, locality_numeric, remainder_bump, LocalityReport, NumericLocality};
pub use mc::{integrate, integrate_centered, McEstimate, McParams, McRun, TracePoint};
pub use period::{leading_coefficient, period, period_in_chart, pole_profile, LaurentProfile};
pub use rg::{ms_cutoff_change, rg_check, CutoffChange, RgReport, RgTerm};
pub use toy::{toy_pole_coefficient, toy_raw, toy_renormalize, TestFn1d, ToyScheme};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenormError {
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("{0} is not primitive")]
    NotPrimitive(EdgeSet),
    #[error("{0} is not an irreducible element of the divergent lattice")]
    NotIrreducible(EdgeSet),
    #[error("s = {s} is outside the accepted neighbourhood |s - 1| < {bound} of s = 1")]
    OutsideStrip { s: f64, bound: f64 },
    #[error("cutoff must be positive, got {0}")]
    BadCutoff(f64),
    #[error("radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("expected {want} subtraction radii, got {got}")]
    RadiusCount { got: usize, want: usize },
    #[error("test function does not vanish at {0} outside its declared support")]
    NotCompact(f64),
    #[error("subgraphs {0} and {1} share an edge or vertex")]
    NotDisjoint(EdgeSet, EdgeSet),
    #[error("{0} is not a connected divergent subgraph")]
    NotDivergent(EdgeSet),
    #[error("quadrature did not converge (error estimate {0})")]
    Quadrature(f64),
}

/// h(z) = e^{-1/z} for z > 0, else 0.
fn smooth_step_h(z: f64) -> f64 {
    if z > 0.0 {
        (-1.0 / z).exp()
    } else {
        0.0
    }
}

/// Smooth cutoff profile: 1 on [0, ½], 0 from 1 on.
pub fn beta(t: f64) -> f64 {
    let a = smooth_step_h(1.0 - t);
    if a == 0.0 {
        return 0.0;
    }
    a / (a + smooth_step_h(t - 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpKind {
    TestFunction,
    SubtractionNu,
}

/// A test function ψ(y) = exp(1 − 1/(1 − |y−c|²/r²)) on the base (so ψ(c) = 1), or the radius
/// of a subtraction function ν_g(x) = β(|x_g|·(1+|x̂_g|²)^{1/2}/r).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BumpSpec {
    pub radius: f64,
    pub kind: BumpKind,
    /// Empty means the origin.
    pub center: Vec<f64>,
}

impl BumpSpec {
    pub fn test(radius: f64) -> Self {
        BumpSpec { radius, kind: BumpKind::TestFunction, center: Vec::new() }
    }
    pub fn test_at(radius: f64, center: Vec<f64>) -> Self {
        BumpSpec { radius, kind: BumpKind::TestFunction, center }
    }
    pub fn nu(radius: f64) -> Self {
        BumpSpec { radius, kind: BumpKind::SubtractionNu, center: Vec::new() }
    }

    pub fn validate(&self) -> Result<(), RenormError> {
        if self.radius > 0.0 && self.radius.is_finite() {
            Ok(())
        } else {
            Err(RenormError::BadRadius(self.radius))
        }
    }

    /// Value of the ball bump at y.
    pub fn eval(&self, y: &[f64]) -> f64 {
        let q: f64 = y
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = v - self.center.get(i).copied().unwrap_or(0.0);
                d * d
            })
            .sum::<f64>()
            / (self.radius * self.radius);
        if q >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - q)).exp()
        }
    }

    /// ν evaluated from the marked value and the squared norm of the exclusive coordinates.
    pub fn nu_value(&self, marked: f64, hat_norm2: f64) -> f64 {
        beta(marked.abs() * (1.0 + hat_norm2).sqrt() / self.radius)
    }
}

/// Accepted distance of s from 1 for a chart whose largest member has dim A_g = `max_dim`.
pub(crate) fn check_s(s: f64, max_dim: i64) -> Result<(), RenormError> {
    let bound = 0.5 / max_dim.max(1) as f64;
    if (s - 1.0).abs() < bound {
        Ok(())
    } else {
        Err(RenormError::OutsideStrip { s, bound })
    }
}
