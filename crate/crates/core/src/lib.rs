//! Rough Hausdorff operators on weighted Herz, Morrey and Morrey-Herz spaces.
//!
//! The crate evaluates the operator
//! `H f(x) = ∫_0^∞ ∫_{S^{n-1}} Φ(t)/t · Ω(y') f(|x| y'/t) dσ(y') dt`,
//! its commutator with a Lipschitz symbol, the weighted norms it acts on,
//! and the integral constants that control its operator norm. The
//! [`harness`] module turns these into reproducible verification reports.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod extremals;
pub mod functions;
pub mod harness;
pub mod operators;
pub mod quadrature;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
pub use functions::{AngularFn, AngularProfile, LipschitzSymbol, RadialKernel, RadialProfile, Sign, TestFunction};
pub use operators::{CommutatorOperator, HausdorffOperator};
pub use quadrature::{QuadratureResult, RadialIntegrand, Region, Tolerance};
pub use spaces::{DyadicWindow, NormConfig, NormResult, SpaceKind, SpaceSpec};
pub use weights::{DyadicGeometry, Weight};

/// Ambient dimension. Only `n ∈ {1, 2, 3}` is supported.
pub fn check_dim(n: usize) -> Result<usize> {
    if (1..=3).contains(&n) {
        Ok(n)
    } else {
        Err(Error::Parameter(format!("dimension must be 1, 2 or 3, got {n}")))
    }
}

/// Surface measure `|S^{n-1}| = 2π^{n/2}/Γ(n/2)` for `n ≤ 3`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => f64::NAN,
    }
}

/// Hölder conjugate exponent, `p' = p/(p-1)`, with `1' = ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}
