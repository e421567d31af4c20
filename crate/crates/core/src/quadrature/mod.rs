//! Numerical integration on the half-line, the unit sphere and radial regions.

mod gauss;
mod halfline;
mod region;
mod sphere;

use serde::Serialize;

pub use gauss::gauss_legendre;

pub use halfline::{integrate_halfline, RadialIntegrand};
pub use region::{integrate_radial_density, integrate_region, integrate_region_with, Region};
pub use sphere::{integrate_sphere, sphere_rule, SphereRule};

/// Requested accuracy: a result is accepted when its error estimate is at
/// most `max(abs, rel·|value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    pub fn abs(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn rel(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    pub fn threshold(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Tolerance { abs: self.abs * factor, rel: self.rel * factor }
    }
}

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Tolerance::abs(abs)
    }
}

/// Value of a quadrature together with its error accounting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Bound on the mass outside the integrated panels.
    pub tail_bound: f64,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn exact(value: f64) -> Self {
        QuadratureResult { value, abs_error_estimate: 0.0, tail_bound: 0.0, converged: true }
    }

    pub fn total_error(&self) -> f64 {
        self.abs_error_estimate + self.tail_bound
    }
}
