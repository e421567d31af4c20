//! Integrals over balls, dyadic annuli and shells by polar factorisation.

use crate::error::Result;

use super::gauss::adaptive;
use super::halfline::{integrate_halfline, RadialIntegrand};
use super::sphere::integrate_sphere;
use super::{QuadratureResult, Tolerance};

/// Region of integration in `R^n`, all centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// `{|x| ≤ R}`
    Ball(f64),
    /// `C_k = {2^{k-1} < |x| ≤ 2^k}`
    Annulus(i32),
    /// `{a < |x| ≤ b}`; `b` may be infinite.
    Shell(f64, f64),
    All,
}

impl Region {
    /// Radial extent `(a, b)`.
    pub fn radii(&self) -> (f64, f64) {
        match *self {
            Region::Ball(r) => (0.0, r),
            Region::Annulus(k) => (2f64.powi(k - 1), 2f64.powi(k)),
            Region::Shell(a, b) => (a, b),
            Region::All => (0.0, f64::INFINITY),
        }
    }
}

/// Integrates `density(r)` over the radial extent of `region`, where
/// `density` already carries the `r^{n-1}` Jacobian and the angular integral.
/// `exponents` are those of `density` at zero and infinity.
pub fn integrate_radial_density(
    density: &dyn Fn(f64) -> f64,
    exponents: (f64, f64),
    breakpoints: &[f64],
    region: Region,
    tol: Tolerance,
) -> Result<QuadratureResult> {
    let (a, b) = region.radii();
    if !(b > a) {
        return Ok(QuadratureResult::exact(0.0));
    }
    if a > 0.0 && b.is_finite() {
        let g = |u: f64| {
            let r = u.exp();
            density(r) * r
        };
        let mut knots = vec![a.ln(), b.ln()];
        knots.extend(breakpoints.iter().filter(|x| **x > a && **x < b).map(|x| x.ln()));
        knots.sort_by(f64::total_cmp);
        let mut out = QuadratureResult::exact(0.0);
        let pieces = (knots.len() - 1) as f64;
        for w in knots.windows(2) {
            let r = adaptive(&g, w[0], w[1], Tolerance::new(tol.abs / pieces, tol.rel), 400)?;
            out.value += r.value;
            out.abs_error_estimate += r.error;
            out.converged &= r.converged;
        }
        return Ok(out);
    }
    let f = RadialIntegrand::new(density, exponents.0, exponents.1)
        .with_breakpoints(breakpoints.iter().copied())
        .with_support(a, b);
    integrate_halfline(&f, tol)
}

/// `∫_{region} f(x) dx` for a general function on `R^n`. `envelope` gives
/// the power-law exponents of `f` at the origin and at infinity
/// (`(0, −∞)` for bounded, rapidly decaying `f`).
pub fn integrate_region_with(
    n: usize,
    f: &dyn Fn(&[f64]) -> f64,
    region: Region,
    envelope: (f64, f64),
    breakpoints: &[f64],
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult> {
    crate::check_dim(n)?;
    let tol = tol.into();
    let inner = Tolerance::new(tol.abs / 3.0, (tol.rel / 3.0).max(1e-13));
    let err = std::cell::Cell::new(None);
    let density = |r: f64| {
        let g = |y: &[f64]| {
            let mut x = [0.0; 3];
            for i in 0..n {
                x[i] = r * y[i];
            }
            f(&x[..n])
        };
        match integrate_sphere(n, &g, inner) {
            Ok(q) => q.value * r.powi(n as i32 - 1),
            Err(e) => {
                err.set(Some(e));
                f64::NAN
            }
        }
    };
    let nm1 = (n - 1) as f64;
    let res = integrate_radial_density(&density, (envelope.0 + nm1, envelope.1 + nm1), breakpoints, region, tol);
    if let Some(e) = err.take() {
        return Err(e);
    }
    res
}

/// `∫_{region} f(x) dx` assuming `f` is bounded near the origin and decays
/// rapidly at infinity.
pub fn integrate_region(n: usize, f: &dyn Fn(&[f64]) -> f64, region: Region, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
    integrate_region_with(n, f, region, (0.0, f64::NEG_INFINITY), &[], tol)
}
