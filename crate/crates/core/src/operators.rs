//! Pointwise evaluation of the rough Hausdorff operator
//! `H f(x) = ∫_0^∞ ∫_{S^{n-1}} Φ(t)/t · Ω(y') f(|x| y'/t) dσ(y') dt`,
//! its commutator with a Lipschitz symbol, and direct Hardy-operator oracles.

use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::functions::{norm, AngularFn, AngularProfile, LipschitzSymbol, RadialKernel, RadialProfile, ScalarFn, TestFunction};
use crate::quadrature::{integrate_halfline, integrate_region_with, integrate_sphere, RadialIntegrand, Region, Tolerance};

/// Exponent of a product/composition, treating `∞ − ∞` as a caller error.
fn finite_or_inf(e: f64) -> Result<f64> {
    if e.is_nan() {
        Err(Error::Parameter("indeterminate endpoint exponent (∞ − ∞)".into()))
    } else {
        Ok(e)
    }
}

/// Nudges coinciding exponents apart to allow for the logarithmic factor
/// that appears when two power laws of the same order are convolved.
fn merge_min(a: f64, b: f64) -> f64 {
    if a == b && a.is_finite() {
        a - 1e-2
    } else {
        a.min(b)
    }
}

fn merge_max(a: f64, b: f64) -> f64 {
    if a == b && a.is_finite() {
        a + 1e-2
    } else {
        a.max(b)
    }
}

/// The rough Hausdorff operator `H_{Φ,Ω}` on `R^n`.
#[derive(Clone, Debug)]
pub struct HausdorffOperator {
    pub phi: RadialKernel,
    pub omega: AngularProfile,
    pub dim: usize,
}

impl HausdorffOperator {
    pub fn new(phi: RadialKernel, omega: AngularProfile) -> Self {
        let dim = omega.dim;
        HausdorffOperator { phi, omega, dim }
    }

    /// The Hardy operator `|x|^{-n} ∫_{|y|≤|x|} f`.
    pub fn hardy(n: usize) -> Self {
        HausdorffOperator::new(RadialKernel::hardy(n), AngularProfile::ones(n))
    }

    /// The adjoint Hardy operator `∫_{|y|>|x|} f(y)/|y|^n dy`.
    pub fn adjoint_hardy(n: usize) -> Self {
        HausdorffOperator::new(RadialKernel::adjoint_hardy(), AngularProfile::ones(n))
    }

    fn check_point(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Domain(format!("point has dimension {}, operator acts on R^{}", x.len(), self.dim)));
        }
        let r = norm(x);
        if r == 0.0 {
            return Err(Error::Domain("the operator is not evaluated at the origin".into()));
        }
        Ok(r)
    }

    /// `∫_{S^{n-1}} Ω h dσ`.
    pub fn sphere_factor(&self, h: &AngularFn, tol: f64) -> Result<f64> {
        match (self.omega.func.as_constant(), h.as_constant()) {
            (Some(a), Some(b)) => Ok(a * b * crate::sphere_area(self.dim)),
            _ => Ok(integrate_sphere(self.dim, &|y| self.omega.eval(y) * h.eval(y), Tolerance::new(1e-300, tol))?.value),
        }
    }

    /// `∫_0^∞ Φ(t)/t · g(ρ/t) · m(t) dt` for a radial profile `g`, where the
    /// optional multiplier `m` grows at most like `t^{−mg}` as `t → 0` and
    /// stays bounded as `t → ∞`.
    fn radial_integral(&self, g: &RadialProfile, rho: f64, mult: Option<(&dyn Fn(f64) -> f64, f64)>, tol: f64) -> Result<f64> {
        let phi = &self.phi;
        let (glo, ghi) = g.support;
        let (plo, phi_hi) = phi.support;
        let lo = plo.max(if ghi.is_finite() { rho / ghi } else { 0.0 });
        let hi = phi_hi.min(if glo > 0.0 { rho / glo } else { f64::INFINITY });
        if !(hi > lo) {
            return Ok(0.0);
        }
        let mg = mult.map_or(0.0, |m| m.1);
        let e0 = finite_or_inf(phi.exponent_at_zero - 1.0 - g.exponent_at_infinity - mg)?;
        let einf = finite_or_inf(phi.exponent_at_infinity - 1.0 - g.exponent_at_zero)?;
        let mut bps = phi.breakpoints.clone();
        bps.extend(g.breakpoints.iter().filter(|b| **b > 0.0).map(|b| rho / b));
        let integrand = |t: f64| {
            let p = phi.eval(t);
            if p == 0.0 {
                return 0.0;
            }
            let v = g.eval(rho / t);
            if v == 0.0 {
                return 0.0;
            }
            let m = mult.map_or(1.0, |m| (m.0)(t));
            p / t * v * m
        };
        let f = RadialIntegrand::new(integrand, e0, einf).with_breakpoints(bps).with_support(lo, hi);
        Ok(integrate_halfline(&f, Tolerance::rel(tol))?.value)
    }

    /// `∫_0^∞ Φ(t)/t · S(t) dt` with `S(t) = ∫ Ω(y) F(t, y) dσ(y)`.
    fn nested(&self, f: &TestFunction, rho: f64, bracket: Option<&dyn Fn(&[f64]) -> f64>, growth: f64, tol: f64) -> Result<f64> {
        let n = self.dim;
        let (e0f, einf) = f.envelope();
        let (slo, shi) = f.support();
        let lo = self.phi.support.0.max(if shi.is_finite() { rho / shi } else { 0.0 });
        let hi = self.phi.support.1.min(if slo > 0.0 { rho / slo } else { f64::INFINITY });
        if !(hi > lo) {
            return Ok(0.0);
        }
        let e0 = finite_or_inf(self.phi.exponent_at_zero - 1.0 - einf - growth)?;
        let e_inf = finite_or_inf(self.phi.exponent_at_infinity - 1.0 - e0f)?;
        let mut bps = self.phi.breakpoints.clone();
        bps.extend(f.breakpoints().iter().filter(|b| **b > 0.0).map(|b| rho / b));
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        let inner_tol = tol / 3.0;
        let integrand = |t: f64| {
            let p = self.phi.eval(t);
            if p == 0.0 {
                return 0.0;
            }
            let s = rho / t;
            let h = |y: &[f64]| {
                let mut z = [0.0; 3];
                for i in 0..n {
                    z[i] = s * y[i];
                }
                let v = f.eval(&z[..n]);
                if v == 0.0 {
                    return 0.0;
                }
                let b = bracket.map_or(1.0, |b| b(&z[..n]));
                self.omega.eval(y) * v * b
            };
            match integrate_sphere(n, &h, Tolerance::new(1e-300, inner_tol)) {
                Ok(q) => p / t * q.value,
                Err(e) => {
                    *failure.lock().unwrap() = Some(e);
                    f64::NAN
                }
            }
        };
        let ri = RadialIntegrand::new(integrand, e0, e_inf).with_breakpoints(bps).with_support(lo, hi);
        let res = integrate_halfline(&ri, Tolerance::rel(tol / 3.0));
        if let Some(e) = failure.lock().unwrap().take() {
            return Err(e);
        }
        Ok(res?.value)
    }

    /// `H f(x)`. Separable `f` uses the factorised form
    /// `(∫ Ω h dσ) · ∫ Φ(t)/t g(|x|/t) dt`; other functions use nested
    /// quadrature. `tol` is relative.
    pub fn apply(&self, f: &TestFunction, x: &[f64], tol: f64) -> Result<f64> {
        let rho = self.check_point(x)?;
        self.apply_radius(f, rho, tol)
    }

    fn apply_radius(&self, f: &TestFunction, rho: f64, tol: f64) -> Result<f64> {
        if f.is_zero() {
            return Ok(0.0);
        }
        match f {
            TestFunction::Separable { radial, angular } => {
                let a = self.sphere_factor(angular, tol / 3.0)?;
                if a == 0.0 {
                    return Ok(0.0);
                }
                Ok(a * self.radial_integral(radial, rho, None, tol / 3.0)?)
            }
            TestFunction::General { .. } => self.nested(f, rho, None, 0.0, tol),
        }
    }

    /// `H f(x)` by nested quadrature regardless of the form of `f`.
    pub fn apply_nested(&self, f: &TestFunction, x: &[f64], tol: f64) -> Result<f64> {
        let rho = self.check_point(x)?;
        if f.is_zero() {
            return Ok(0.0);
        }
        self.nested(f, rho, None, 0.0, tol)
    }

    /// Power-law exponents of `H f` at zero and infinity.
    pub fn image_exponents(&self, f: &TestFunction) -> (f64, f64) {
        let (g0, ginf) = f.envelope();
        (merge_min(g0, self.phi.exponent_at_zero), merge_max(ginf, self.phi.exponent_at_infinity))
    }

    /// Radial support `[lo, hi]` of `H f`.
    pub fn image_support(&self, f: &TestFunction) -> (f64, f64) {
        let (a, b) = f.support();
        let (c, d) = self.phi.support;
        let lo = if a == 0.0 || c == 0.0 { 0.0 } else { a * c };
        let hi = if b.is_infinite() || d.is_infinite() { f64::INFINITY } else { b * d };
        (lo, hi)
    }

    fn image_breakpoints(&self, f: &TestFunction) -> Vec<f64> {
        let mut out = Vec::new();
        for b in f.breakpoints() {
            for c in &self.phi.breakpoints {
                out.push(b * c);
            }
        }
        out
    }

    /// `H f` as a radial function of `|x|` (the image of any `f` is radial).
    /// Evaluation failures surface as NaN, which the integrators reject.
    pub fn image(&self, f: &TestFunction, tol: f64) -> TestFunction {
        let op = self.clone();
        let g = f.clone();
        let (e0, einf) = self.image_exponents(f);
        let (lo, hi) = self.image_support(f);
        let eval = move |r: f64| op.apply_radius(&g, r, tol).unwrap_or(f64::NAN);
        let mut profile = RadialProfile::new(format!("H[{}]", f.label()), eval, e0, einf)
            .with_breakpoints(self.image_breakpoints(f))
            .with_support(lo, hi);
        profile.exponent_at_zero = if lo > 0.0 { f64::INFINITY } else { e0 };
        profile.exponent_at_infinity = if hi.is_finite() { f64::NEG_INFINITY } else { einf };
        TestFunction::radial(profile)
    }
}

/// `|x|^{-n} ∫_{|y|≤|x|} f(y) dy` by direct integration over the ball.
pub fn hardy_apply(f: &TestFunction, x: &[f64], n: usize, tol: f64) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Domain("the operator is not evaluated at the origin".into()));
    }
    let v = integrate_region_with(n, &|y| f.eval(y), Region::Ball(r), f.envelope(), &f.breakpoints(), Tolerance::rel(tol))?;
    Ok(v.value / r.powi(n as i32))
}

/// `∫_{|y|>|x|} f(y)/|y|^n dy` by direct integration over the exterior.
pub fn adjoint_hardy_apply(f: &TestFunction, x: &[f64], n: usize, tol: f64) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Domain("the operator is not evaluated at the origin".into()));
    }
    let (e0, einf) = f.envelope();
    let nn = n as i32;
    let g = |y: &[f64]| {
        let v = f.eval(y);
        if v == 0.0 {
            0.0
        } else {
            v / norm(y).powi(nn)
        }
    };
    let v = integrate_region_with(n, &g, Region::Shell(r, f64::INFINITY), (e0 - n as f64, einf - n as f64), &f.breakpoints(), Tolerance::rel(tol))?;
    Ok(v.value)
}

/// The commutator `H^b f = b·Hf − H(bf)`.
#[derive(Clone, Debug)]
pub struct CommutatorOperator {
    pub base: HausdorffOperator,
    pub symbol: LipschitzSymbol,
}

impl CommutatorOperator {
    pub fn new(base: HausdorffOperator, symbol: LipschitzSymbol) -> Self {
        CommutatorOperator { base, symbol }
    }

    /// `b·f`, kept separable when `b` is radial.
    pub fn symbol_times(&self, f: &TestFunction) -> TestFunction {
        let (bg0, bginf) = self.symbol.growth;
        match (f, self.symbol.radial()) {
            (TestFunction::Separable { radial, angular }, Some(b)) => {
                TestFunction::separable(radial.times(b, bg0, bginf, "b"), angular.clone())
            }
            _ => {
                let (e0, einf) = f.envelope();
                let (g, b) = (f.clone(), self.symbol.clone());
                TestFunction::general(
                    format!("b*{}", f.label()),
                    move |x| {
                        let v = g.eval(x);
                        if v == 0.0 {
                            0.0
                        } else {
                            v * b.eval(x)
                        }
                    },
                    (e0 + bg0, einf + bginf),
                    f.breakpoints(),
                    f.support(),
                )
            }
        }
    }

    /// `∫∫ Φ(t)/t Ω(y') f(|x|y'/t) [b(x) − b(|x|y'/t)] dσ dt`.
    pub fn apply(&self, f: &TestFunction, x: &[f64], tol: f64) -> Result<f64> {
        let rho = self.base.check_point(x)?;
        if f.is_zero() {
            return Ok(0.0);
        }
        let bx = self.symbol.eval(x);
        let growth = self.symbol.growth.1.max(0.0);
        match (f, self.symbol.radial()) {
            (TestFunction::Separable { radial, angular }, Some(b)) => {
                let a = self.base.sphere_factor(angular, tol / 3.0)?;
                if a == 0.0 {
                    return Ok(0.0);
                }
                let bracket = move |t: f64| bx - b(rho / t);
                Ok(a * self.base.radial_integral(radial, rho, Some((&bracket, growth)), tol / 3.0)?)
            }
            _ => {
                let bracket = |z: &[f64]| bx - self.symbol.eval(z);
                self.base.nested(f, rho, Some(&bracket), growth, tol)
            }
        }
    }

    /// `b(x)·Hf(x) − H(bf)(x)`.
    pub fn apply_expanded(&self, f: &TestFunction, x: &[f64], tol: f64) -> Result<f64> {
        let hf = self.base.apply(f, x, tol)?;
        let hbf = self.base.apply(&self.symbol_times(f), x, tol)?;
        Ok(self.symbol.eval(x) * hf - hbf)
    }

    /// `H^b f` as a function on `R^n`: radial when `b` is radial.
    pub fn image(&self, f: &TestFunction, tol: f64) -> TestFunction {
        let (hf0, hfinf) = self.base.image_exponents(f);
        let bf = self.symbol_times(f);
        let (hbf0, hbfinf) = self.base.image_exponents(&bf);
        let (bg0, bginf) = self.symbol.growth;
        let e0 = (hf0 + bg0).min(hbf0);
        let einf = (hfinf + bginf).max(hbfinf);
        let (lo, hi) = self.base.image_support(f);
        let mut bps = self.base.image_breakpoints(f);
        bps.sort_by(f64::total_cmp);
        let op = self.clone();
        let g = f.clone();
        let n = self.base.dim;
        if self.symbol.radial().is_some() {
            let eval = move |r: f64| {
                let mut x = vec![0.0; n];
                x[0] = r;
                op.apply(&g, &x, tol).unwrap_or(f64::NAN)
            };
            let mut p = RadialProfile::new(format!("H^b[{}]", f.label()), eval, e0, einf).with_breakpoints(bps).with_support(lo, hi);
            p.exponent_at_zero = if lo > 0.0 { f64::INFINITY } else { e0 };
            p.exponent_at_infinity = if hi.is_finite() { f64::NEG_INFINITY } else { einf };
            return TestFunction::radial(p);
        }
        let eval = move |x: &[f64]| op.apply(&g, x, tol).unwrap_or(f64::NAN);
        TestFunction::general(format!("H^b[{}]", f.label()), eval, (e0, einf), bps, (lo, hi))
    }
}

/// `‖b‖_{Lip^β} |x|^β (1 + 1/t)^β`, checked against `|b(x) − b(|x|y'/t)|`.
pub fn lipschitz_pointwise_bound(b: &LipschitzSymbol, x: &[f64], t: f64, y: &[f64]) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Domain("x must be nonzero".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    let z: Vec<f64> = y.iter().map(|v| r * v / t).collect();
    let (bx, bz) = (b.eval(x), b.eval(&z));
    let lhs = (bx - bz).abs();
    let bound = b.lip_norm * r.powf(b.beta) * (1.0 + 1.0 / t).powf(b.beta);
    let rounding = 8.0 * f64::EPSILON * bx.abs().max(bz.abs());
    if lhs > bound * (1.0 + 1e-12) + rounding {
        return Err(Error::LipschitzViolation { lhs, rhs: bound });
    }
    Ok(bound)
}

/// A radial multiplier `|x|^a` as a shareable scalar function.
pub fn radial_power(a: f64) -> ScalarFn {
    Arc::new(move |r: f64| r.powf(a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi_ball(r: f64) -> TestFunction {
        TestFunction::radial(RadialProfile::indicator(0.0, r))
    }

    #[test]
    fn hardy_examples() {
        let h = HausdorffOperator::hardy(1);
        let f = chi_ball(1.0);
        assert!((h.apply(&f, &[2.0], 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!((h.apply(&f, &[0.5], 1e-12).unwrap() - 2.0).abs() < 1e-11);
        assert_eq!(h.apply(&TestFunction::zero(), &[0.5], 1e-12).unwrap(), 0.0);
        assert!((hardy_apply(&f, &[2.0], 1, 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert!(h.apply(&f, &[0.0], 1e-12).is_err());
    }

    #[test]
    fn adjoint_example() {
        let f = chi_ball(2.0);
        let v = adjoint_hardy_apply(&f, &[1.0], 1, 1e-12).unwrap();
        assert!((v - 2.0 * 2f64.ln()).abs() < 1e-11);
        let a = HausdorffOperator::adjoint_hardy(1);
        assert!((a.apply(&f, &[1.0], 1e-12).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-11);
    }

    #[test]
    fn commutator_examples() {
        let f = chi_ball(1.0);
        let b = LipschitzSymbol::power(1.0).unwrap();
        let c = CommutatorOperator::new(HausdorffOperator::hardy(1), b);
        assert!((c.apply(&f, &[2.0], 1e-12).unwrap() - 1.5).abs() < 1e-10);
        assert!((c.apply_expanded(&f, &[2.0], 1e-12).unwrap() - 1.5).abs() < 1e-10);
        let k = CommutatorOperator::new(HausdorffOperator::hardy(1), LipschitzSymbol::constant(3.0, 1.0).unwrap());
        assert_eq!(k.apply(&f, &[2.0], 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn pointwise_bound_examples() {
        let b = LipschitzSymbol::power(1.0).unwrap();
        assert_eq!(lipschitz_pointwise_bound(&b, &[1.0, 0.0], 1.0, &[0.0, 1.0]).unwrap(), 2.0);
        let b = LipschitzSymbol::power(0.5).unwrap();
        let v = lipschitz_pointwise_bound(&b, &[4.0, 0.0], 0.5, &[0.6, 0.8]).unwrap();
        assert!((v - 2.0 * 3f64.sqrt()).abs() < 1e-14);
        let bad = b.with_lip_norm(0.1);
        assert!(lipschitz_pointwise_bound(&bad, &[4.0, 0.0], 0.5, &[-1.0, 0.0]).is_err());
    }
}
