//! The one-dimensional integral constants `C1`–`C5` controlling the operator
//! norms, and the angular lower-bound factor. Divergence is a value.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functions::{omega_norm, AngularProfile, RadialKernel};
use crate::quadrature::{integrate_halfline, RadialIntegrand, Tolerance};
use crate::weights::Weight;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstantId {
    C1,
    C1_1,
    C2,
    C2_proof_alpha,
    C3,
    C4,
    C5_herz,
    C5_mherz,
}

impl ConstantId {
    pub fn name(self) -> &'static str {
        match self {
            ConstantId::C1 => "C1",
            ConstantId::C1_1 => "C1_1",
            ConstantId::C2 => "C2",
            ConstantId::C2_proof_alpha => "C2_proof_alpha",
            ConstantId::C3 => "C3",
            ConstantId::C4 => "C4",
            ConstantId::C5_herz => "C5_herz",
            ConstantId::C5_mherz => "C5_mherz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstantValue {
    Finite(f64),
    Divergent,
}

impl Serialize for ConstantValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ConstantValue::Finite(v) => s.serialize_f64(*v),
            ConstantValue::Divergent => s.serialize_str("divergent"),
        }
    }
}

/// Parameters a constant was evaluated with; unused ones stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: usize,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundConstant {
    pub id: ConstantId,
    pub value: ConstantValue,
    pub params: BoundParams,
    pub abs_error: f64,
    /// Kernel the constant was computed for.
    pub kernel: String,
}

impl BoundConstant {
    pub fn finite(&self) -> Option<f64> {
        match self.value {
            ConstantValue::Finite(v) => Some(v),
            ConstantValue::Divergent => None,
        }
    }

    pub fn is_divergent(&self) -> bool {
        self.value == ConstantValue::Divergent
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("constant serialises")
    }
}

/// How `Φ` enters the integrand.
#[derive(Clone, Copy)]
enum Argument {
    /// `Φ(t)`
    Direct,
    /// `Φ(1/t)`
    Reciprocal,
}

/// `∫_0^∞ s(Φ(·)) t^a (1 + 1/t)^b dt`, with `s = |·|` or the identity.
fn kernel_integral(phi: &RadialKernel, arg: Argument, a: f64, b: f64, absolute: bool, tol: f64) -> Result<(ConstantValue, f64)> {
    let (e0, einf, support, bps) = match arg {
        Argument::Direct => (phi.exponent_at_zero, phi.exponent_at_infinity, phi.support, phi.breakpoints.clone()),
        Argument::Reciprocal => {
            let (lo, hi) = phi.support;
            let s = (if hi.is_finite() { 1.0 / hi } else { 0.0 }, if lo > 0.0 { 1.0 / lo } else { f64::INFINITY });
            (-phi.exponent_at_infinity, -phi.exponent_at_zero, s, phi.breakpoints.iter().filter(|c| **c > 0.0).map(|c| 1.0 / c).collect())
        }
    };
    if !(support.1 > support.0) {
        return Ok((ConstantValue::Finite(0.0), 0.0));
    }
    let e0 = e0 + a - b.max(0.0);
    let einf = einf + a;
    if e0.is_nan() || einf.is_nan() {
        return Err(Error::Parameter("indeterminate endpoint exponent".into()));
    }
    let integrand = |t: f64| {
        let v = match arg {
            Argument::Direct => phi.eval(t),
            Argument::Reciprocal => phi.eval(1.0 / t),
        };
        if v == 0.0 {
            return 0.0;
        }
        let v = if absolute { v.abs() } else { v };
        let m = if b == 0.0 { 1.0 } else { (1.0 + 1.0 / t).powf(b) };
        let direct = v * t.powf(a) * m;
        if direct.is_finite() {
            return direct;
        }
        // Far in a tail the power factor alone can overflow while the product is finite.
        let log = v.abs().ln() + a * t.ln() + if b == 0.0 { 0.0 } else { b * (1.0 / t).ln_1p() };
        v.signum() * log.exp()
    };
    let f = RadialIntegrand::new(integrand, e0, einf).with_breakpoints(bps).with_support(support.0, support.1);
    match integrate_halfline(&f, Tolerance::new(1e-300, tol)) {
        Ok(r) => Ok((ConstantValue::Finite(r.value), r.total_error())),
        Err(e) if e.is_divergent() => Ok((ConstantValue::Divergent, f64::INFINITY)),
        Err(e) => Err(e),
    }
}

/// `∫_0^∞ Φ(t) t^a dt`, signed unless `absolute`.
pub fn power_moment(phi: &RadialKernel, a: f64, absolute: bool, tol: f64) -> Result<ConstantValue> {
    Ok(kernel_integral(phi, Argument::Direct, a, 0.0, absolute, tol)?.0)
}

fn check_gamma(n: usize, gamma: f64) -> Result<()> {
    crate::check_dim(n)?;
    if !(gamma > -(n as f64)) {
        return Err(Error::NonIntegrableWeight { gamma, dim: n });
    }
    Ok(())
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("q must lie in [1, ∞), got {q}")));
    }
    Ok(())
}

fn build(id: ConstantId, phi: &RadialKernel, params: BoundParams, r: (ConstantValue, f64)) -> BoundConstant {
    BoundConstant { id, value: r.0, params, abs_error: r.1, kernel: phi.label.clone() }
}

/// `C1 = ∫ |Φ(t)| t^{−1−(n+γ)λ} dt`.
pub fn c1(phi: &RadialKernel, n: usize, gamma: f64, lambda: f64, tol: f64) -> Result<BoundConstant> {
    check_gamma(n, gamma)?;
    let a = -1.0 - (n as f64 + gamma) * lambda;
    let params = BoundParams { n, gamma, lambda: Some(lambda), ..Default::default() };
    Ok(build(ConstantId::C1, phi, params, kernel_integral(phi, Argument::Direct, a, 0.0, true, tol)?))
}

/// `C1.1 = ∫ Φ(t) t^{−1−(n+γ)λ} dt` (signed; equals `C1` for nonnegative `Φ`).
pub fn c1_1(phi: &RadialKernel, n: usize, gamma: f64, lambda: f64, tol: f64) -> Result<BoundConstant> {
    check_gamma(n, gamma)?;
    let a = -1.0 - (n as f64 + gamma) * lambda;
    let params = BoundParams { n, gamma, lambda: Some(lambda), ..Default::default() };
    Ok(build(ConstantId::C1_1, phi, params, kernel_integral(phi, Argument::Direct, a, 0.0, false, tol)?))
}

/// `C2 = ∫ |Φ(1/t)| t^{1−2n−γ/q−n/q} dt`; with `alpha` the proof's variant
/// carrying an extra `t^{−α}`.
pub fn c2(phi: &RadialKernel, n: usize, gamma: f64, q: f64, alpha: Option<f64>, tol: f64) -> Result<BoundConstant> {
    check_gamma(n, gamma)?;
    check_q(q)?;
    let nf = n as f64;
    let a = 1.0 - 2.0 * nf - (gamma + nf) / q - alpha.unwrap_or(0.0);
    let id = if alpha.is_some() { ConstantId::C2_proof_alpha } else { ConstantId::C2 };
    let params = BoundParams { n, gamma, q: Some(q), alpha, ..Default::default() };
    Ok(build(id, phi, params, kernel_integral(phi, Argument::Reciprocal, a, 0.0, true, tol)?))
}

/// `∫_{t ≥ lo} |Φ(1/t)| t^{1−2n−γ/q−n/q−s} dt`: the `C2` integral restricted
/// to a set `[lo, ∞)` with an extra exponent `s`.
pub fn c2_truncated(phi: &RadialKernel, n: usize, gamma: f64, q: f64, s: f64, lo: f64, tol: f64) -> Result<ConstantValue> {
    check_gamma(n, gamma)?;
    check_q(q)?;
    let nf = n as f64;
    let a = 1.0 - 2.0 * nf - (gamma + nf) / q - s;
    if !(lo > 0.0) {
        return Ok(kernel_integral(phi, Argument::Reciprocal, a, 0.0, true, tol)?.0);
    }
    // t ≥ lo  ⇔  1/t ≤ 1/lo: cut the kernel at 1/lo.
    let cut = 1.0 / lo;
    let (plo, phi_hi) = phi.support;
    let inner = phi.clone();
    let mut bps = phi.breakpoints.clone();
    bps.push(cut);
    let k = RadialKernel::new(phi.label.clone(), move |t| if t <= cut { inner.eval(t) } else { 0.0 }, phi.exponent_at_zero, f64::NEG_INFINITY, bps)
        .with_support(plo, phi_hi.min(cut));
    Ok(kernel_integral(&k, Argument::Reciprocal, a, 0.0, true, tol)?.0)
}

/// `C3 = ∫ |Φ(t)| t^{−(1−γ/q−n/q+λ−α)} dt`.
pub fn c3(phi: &RadialKernel, n: usize, gamma: f64, q: f64, lambda: f64, alpha: f64, tol: f64) -> Result<BoundConstant> {
    crate::check_dim(n)?;
    check_q(q)?;
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("λ must be positive, got {lambda}")));
    }
    let nf = n as f64;
    let a = -(1.0 - gamma / q - nf / q + lambda - alpha);
    let params = BoundParams { n, gamma, q: Some(q), alpha: Some(alpha), lambda: Some(lambda), ..Default::default() };
    Ok(build(ConstantId::C3, phi, params, kernel_integral(phi, Argument::Direct, a, 0.0, true, tol)?))
}

/// `λ1 = λ − βp/(n+γ)`.
pub fn lambda1(n: usize, gamma: f64, p: f64, lambda: f64, beta: f64) -> f64 {
    lambda - beta * p / (n as f64 + gamma)
}

/// `α1 = α2 + nβ/(n+γ)`.
pub fn alpha1(n: usize, gamma: f64, alpha2: f64, beta: f64) -> f64 {
    alpha2 + n as f64 * beta / (n as f64 + gamma)
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Parameter(format!("β must lie in (0, 1], got {beta}")));
    }
    Ok(())
}

/// `C4 = ∫ |Φ(t)| t^{−1−(γ+n)(λ1−1)/p} (1+1/t)^β dt`. When `lambda` is
/// supplied, `λ1` is recomputed from it and must agree.
pub fn c4(phi: &RadialKernel, n: usize, gamma: f64, p: f64, lambda1_: f64, beta: f64, lambda: Option<f64>, tol: f64) -> Result<BoundConstant> {
    check_gamma(n, gamma)?;
    check_beta(beta)?;
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p must lie in [1, ∞), got {p}")));
    }
    if let Some(l) = lambda {
        let expected = lambda1(n, gamma, p, l, beta);
        if (expected - lambda1_).abs() > 1e-12 * (1.0 + expected.abs()) {
            return Err(Error::Parameter(format!("λ1 = {lambda1_} disagrees with λ − βp/(n+γ) = {expected}")));
        }
    }
    if !(lambda1_ > 0.0) {
        return Err(Error::Parameter(format!("λ1 must be positive, got {lambda1_}")));
    }
    let a = -1.0 - (gamma + n as f64) * (lambda1_ - 1.0) / p;
    let params = BoundParams { n, gamma, p: Some(p), beta: Some(beta), lambda: lambda, lambda1: Some(lambda1_), ..Default::default() };
    Ok(build(ConstantId::C4, phi, params, kernel_integral(phi, Argument::Direct, a, beta, true, tol)?))
}

/// Which exponent `C5` uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum C5Variant {
    Herz,
    MorreyHerz { lambda: f64 },
}

/// `C5 = ∫ |Φ(t)| t^{−(1−γ/q−n/q−α1(1+γ/n))} (1+1/t)^β dt`, or with
/// `+(λ−α1)(1+γ/n)` in place of `−α1(1+γ/n)` for the Morrey-Herz variant.
/// When `alpha2` is supplied, `α1` is recomputed from it and must agree.
#[allow(clippy::too_many_arguments)]
pub fn c5(
    phi: &RadialKernel,
    n: usize,
    gamma: f64,
    q: f64,
    alpha1_: f64,
    beta: f64,
    alpha2: Option<f64>,
    variant: C5Variant,
    tol: f64,
) -> Result<BoundConstant> {
    check_gamma(n, gamma)?;
    check_q(q)?;
    check_beta(beta)?;
    if let Some(a2) = alpha2 {
        let expected = alpha1(n, gamma, a2, beta);
        if (expected - alpha1_).abs() > 1e-12 * (1.0 + expected.abs()) {
            return Err(Error::Parameter(format!("α1 = {alpha1_} disagrees with α2 + nβ/(n+γ) = {expected}")));
        }
    }
    let nf = n as f64;
    let scale = 1.0 + gamma / nf;
    let base = 1.0 - gamma / q - nf / q;
    let (id, a, lambda) = match variant {
        C5Variant::Herz => (ConstantId::C5_herz, -(base - alpha1_ * scale), None),
        C5Variant::MorreyHerz { lambda } => {
            if !(lambda > 0.0) {
                return Err(Error::Parameter(format!("λ must be positive, got {lambda}")));
            }
            (ConstantId::C5_mherz, -(base + (lambda - alpha1_) * scale), Some(lambda))
        }
    };
    let params = BoundParams { n, gamma, q: Some(q), alpha: Some(alpha1_), lambda, beta: Some(beta), ..Default::default() };
    Ok(build(id, phi, params, kernel_integral(phi, Argument::Direct, a, beta, true, tol)?))
}

/// `‖Ω‖^r_{L^r} / ‖Ω‖^{r/p}_{L^r(ω dσ)}` with `r = p'`.
pub fn lower_bound_factor(omega: &AngularProfile, r: f64, w: &Weight, tol: f64) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::Parameter(format!("r = p' must exceed 1, got {r}")));
    }
    if !omega.nonvanishing {
        return Err(Error::Domain("Ω must be nonvanishing".into()));
    }
    if r.is_infinite() {
        // p = 1: the quotient tends to ‖Ω‖_∞ / c^0 only when the angular weight is constant.
        return match w.angular_constant() {
            Some(_) => omega_norm(omega, r, None, tol),
            None => Err(Error::Parameter("r = ∞ is only supported for constant angular weights".into())),
        };
    }
    let p = r / (r - 1.0);
    let plain = omega_norm(omega, r, None, tol)?;
    let weighted = omega_norm(omega, r, Some(w), tol)?;
    if weighted == 0.0 {
        return Err(Error::Domain("weighted Ω norm vanishes".into()));
    }
    Ok(plain.powf(r) / weighted.powf(r / p))
}
