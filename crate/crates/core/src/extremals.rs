//! The extremal functions behind the lower bounds, with closed-form norms,
//! per-annulus chunks and operator images.

use serde::Serialize;

use crate::bounds::{c2_truncated, power_moment, ConstantValue};
use crate::error::{Error, Result};
use crate::functions::{omega_norm, AngularProfile, RadialKernel, RadialProfile, TestFunction};
use crate::weights::Weight;

/// Largest `m` accepted for the Herz family; beyond it `2^{−m}` is lost
/// against `α` in double precision.
pub const MAX_HERZ_M: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExtremalKind {
    Morrey,
    Herz { m: u32 },
    MorreyHerz,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ExtremalParams {
    pub n: usize,
    pub gamma: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub m: u32,
}

#[derive(Debug, Clone)]
pub struct ExtremalFamily {
    pub kind: ExtremalKind,
    pub params: ExtremalParams,
    pub function: TestFunction,
    /// Norm in the family's own space (Herz: the full series).
    pub closed_form_norm: Option<f64>,
    /// `e` such that `H f = const · |x|^e` (Morrey and Morrey-Herz).
    pub closed_form_image_exponent: Option<f64>,
    /// `‖Ω‖_{r}^{r}` (unweighted) and `‖Ω‖_{r,ω}^{r}` with `r` the conjugate exponent.
    omega_power: f64,
    omega_weighted_power: f64,
    /// Conjugate exponent `r` of the space's integrability index.
    r: f64,
}

fn check_omega(omega: &AngularProfile, w: &Weight) -> Result<()> {
    if !omega.nonvanishing {
        return Err(Error::Domain("the extremal needs a nonvanishing Ω".into()));
    }
    if omega.dim != w.dim {
        return Err(Error::Parameter(format!("Ω lives on S^{}, the weight on R^{}", omega.dim - 1, w.dim)));
    }
    Ok(())
}

fn check_exponent(name: &str, p: f64) -> Result<f64> {
    if p == 1.0 {
        return Err(Error::Parameter(format!("{name} = 1 has no finite conjugate exponent")));
    }
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("{name} must lie in (1, ∞), got {name} = {p}")));
    }
    Ok(crate::conjugate(p))
}

fn omega_powers(omega: &AngularProfile, r: f64, w: &Weight, tol: f64) -> Result<(f64, f64)> {
    Ok((omega_norm(omega, r, None, tol)?.powf(r), omega_norm(omega, r, Some(w), tol)?.powf(r)))
}

impl ExtremalFamily {
    /// `‖Ω‖^{r}_{L^r}`.
    pub fn omega_power(&self) -> f64 {
        self.omega_power
    }

    /// `‖Ω‖^{r/s}_{L^r(ω dσ)}`, the angular factor of the extremal's norm
    /// (`s` the space's integrability index).
    pub fn weighted_angular_factor(&self) -> f64 {
        let s = match self.kind {
            ExtremalKind::Morrey => self.params.p,
            _ => self.params.q,
        };
        self.omega_weighted_power.powf(1.0 / s)
    }

    /// `‖Ω‖^{r}_{r} / ‖Ω‖^{r/s}_{r,ω}`.
    pub fn lower_bound_factor(&self) -> f64 {
        self.omega_power / self.weighted_angular_factor()
    }

    pub fn conjugate_exponent(&self) -> f64 {
        self.r
    }

    /// Amplitude `c` in `H f = c·|x|^e`: `‖Ω‖^{r}_{r} ∫ Φ(t) t^{−1−e} dt`.
    pub fn image_amplitude(&self, phi: &RadialKernel, tol: f64) -> Result<ConstantValue> {
        let e = self
            .closed_form_image_exponent
            .ok_or_else(|| Error::Parameter("the Herz family has no pure-power image".into()))?;
        Ok(match power_moment(phi, -1.0 - e, false, tol)? {
            ConstantValue::Finite(v) => ConstantValue::Finite(self.omega_power * v),
            ConstantValue::Divergent => ConstantValue::Divergent,
        })
    }

    /// Herz family: `‖f_m χ_k‖_{L^q(ω)}`, zero for `k ≤ 0` (no support below `|x| = 1`).
    pub fn herz_chunk(&self, k: i32) -> Option<f64> {
        match self.kind {
            ExtremalKind::Herz { .. } if k <= 0 => Some(0.0),
            ExtremalKind::Herz { m } => Some(herz_chunk_formula(self.params.q, self.params.alpha, m, k, self.weighted_angular_factor())),
            _ => None,
        }
    }

    /// Herz family: `‖f_m χ_{B(0, 2^{k_max})}‖_{K̇^{α,p}_q(ω)}`, or the full
    /// series when `k_max` is `None`.
    pub fn herz_norm(&self, p: f64, k_max: Option<i32>) -> Option<f64> {
        let ExtremalKind::Herz { m } = self.kind else { return None };
        let s = self.params.alpha + 2f64.powi(-(m as i32));
        let q = self.params.q;
        let a = ((2f64.powf(q * s) - 1.0) / (q * s)).abs().powf(1.0 / q) * self.weighted_angular_factor();
        // Σ_{k ≥ 1} 2^{kαp} chunk_k^p = a^p Σ ρ^k with ρ = 2^{−p/2^m}
        let rho = 2f64.powf(-p * 2f64.powi(-(m as i32)));
        let sum = match k_max {
            None => rho / (1.0 - rho),
            Some(k) if k < 1 => 0.0,
            Some(k) => rho * (1.0 - rho.powi(k)) / (1.0 - rho),
        };
        Some(a * sum.powf(1.0 / p))
    }

    /// Morrey-Herz family: `‖f χ_k‖_{L^q(ω)}`.
    pub fn morrey_herz_chunk(&self, k: i32) -> Option<f64> {
        if self.kind != ExtremalKind::MorreyHerz {
            return None;
        }
        let ExtremalParams { q, alpha, lambda, .. } = self.params;
        Some(morrey_herz_chunk_formula(q, alpha, lambda, k, self.weighted_angular_factor()))
    }
}

/// `2^{−ks} |(2^{qs} − 1)/(qs)|^{1/q} · a` with `s = α + 2^{−m}`: the `L^q(ω)`
/// mass of `r^{−α−(n+γ)/q−2^{−m}}·(angular)` on the annulus `C_k`, where `a`
/// is the angular factor.
pub fn herz_chunk_formula(q: f64, alpha: f64, m: u32, k: i32, angular: f64) -> f64 {
    let s = alpha + 2f64.powi(-(m as i32));
    2f64.powf(-(k as f64) * s) * ((2f64.powf(q * s) - 1.0) / (q * s)).abs().powf(1.0 / q) * angular
}

/// `2^{k(λ−α)} |(1 − 2^{−q(λ−α)})/(q(λ−α))|^{1/q} · a`, or `(ln 2)^{1/q}·a` when `λ = α`.
pub fn morrey_herz_chunk_formula(q: f64, alpha: f64, lambda: f64, k: i32, angular: f64) -> f64 {
    let d = lambda - alpha;
    if d == 0.0 {
        return std::f64::consts::LN_2.powf(1.0 / q) * angular;
    }
    2f64.powf(k as f64 * d) * ((1.0 - 2f64.powf(-q * d)) / (q * d)).abs().powf(1.0 / q) * angular
}

/// `f(x) = |x|^{(n+γ)λ} |Ω(x')|^{p'−2} Ω(x')`.
pub fn morrey_extremal(omega: &AngularProfile, w: &Weight, lambda: f64, p: f64, tol: f64) -> Result<ExtremalFamily> {
    check_omega(omega, w)?;
    let r = check_exponent("p", p)?;
    if !(1.0 + lambda * p > 0.0) {
        return Err(Error::Parameter(format!("need 1 + λp > 0, got λ = {lambda}, p = {p}")));
    }
    let (n, gamma) = (w.dim, w.gamma);
    let ng = n as f64 + gamma;
    if !(ng > 0.0) {
        return Err(Error::NonIntegrableWeight { gamma, dim: n });
    }
    let e = ng * lambda;
    let radial = if lambda == 0.0 { RadialProfile::constant(1.0) } else { RadialProfile::power(e) };
    let function = TestFunction::separable(radial, omega.func.signed_power(r - 1.0));
    let (op, owp) = omega_powers(omega, r, w, tol)?;
    let s = w.sphere_mass();
    let norm = (ng / s).powf(lambda) * (1.0 + lambda * p).powf(-1.0 / p) * s.powf(-1.0 / p) * owp.powf(1.0 / p);
    Ok(ExtremalFamily {
        kind: ExtremalKind::Morrey,
        params: ExtremalParams { n, gamma, p, q: p, alpha: 0.0, lambda, m: 0 },
        function,
        closed_form_norm: Some(norm),
        closed_form_image_exponent: Some(e),
        omega_power: op,
        omega_weighted_power: owp,
        r,
    })
}

/// `f_m(x) = |x|^{−α−(γ+n)/q−2^{−m}} |Ω(x')|^{q'−2} Ω(x')` for `|x| ≥ 1`, zero inside.
/// The closed-form norm is the Herz norm with `p = q`.
pub fn herz_extremal(omega: &AngularProfile, w: &Weight, q: f64, alpha: f64, m: u32, tol: f64) -> Result<ExtremalFamily> {
    check_omega(omega, w)?;
    let r = check_exponent("q", q)?;
    if !(1..=MAX_HERZ_M).contains(&m) {
        return Err(Error::Parameter(format!("m must lie in [1, {MAX_HERZ_M}], got {m}")));
    }
    let s = alpha + 2f64.powi(-(m as i32));
    if s == 0.0 {
        return Err(Error::Parameter("α + 2^{−m} must be nonzero".into()));
    }
    let (n, gamma) = (w.dim, w.gamma);
    let e = -alpha - (gamma + n as f64) / q - 2f64.powi(-(m as i32));
    let radial = RadialProfile::power_on(e, 1.0, f64::INFINITY);
    let function = TestFunction::separable(radial, omega.func.signed_power(r - 1.0));
    let (op, owp) = omega_powers(omega, r, w, tol)?;
    let mut fam = ExtremalFamily {
        kind: ExtremalKind::Herz { m },
        params: ExtremalParams { n, gamma, p: q, q, alpha, lambda: 0.0, m },
        function,
        closed_form_norm: None,
        closed_form_image_exponent: None,
        omega_power: op,
        omega_weighted_power: owp,
        r,
    };
    fam.closed_form_norm = fam.herz_norm(q, None);
    Ok(fam)
}

/// `S_m = [2^{−(m−1)}, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncationSet {
    pub m: u32,
    pub lower: f64,
}

impl TruncationSet {
    pub fn contains(&self, u: f64) -> bool {
        u >= self.lower
    }

    pub fn is_subset_of(&self, other: &TruncationSet) -> bool {
        self.lower >= other.lower
    }

    pub fn describe(&self) -> String {
        format!("S_{} = [2^-{}, inf) = [{}, inf)", self.m, self.m - 1, self.lower)
    }
}

pub fn herz_truncation_set(m: u32) -> Result<TruncationSet> {
    if m < 1 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    Ok(TruncationSet { m, lower: 2f64.powi(-(m as i32 - 1)) })
}

/// `∫_{S_m} |Φ(1/u)| u^{1−2n−γ/q−n/q−2^{−m}} du`.
pub fn herz_lower_integral(phi: &RadialKernel, n: usize, gamma: f64, q: f64, m: u32, tol: f64) -> Result<ConstantValue> {
    let set = herz_truncation_set(m)?;
    c2_truncated(phi, n, gamma, q, 2f64.powi(-(m as i32)), set.lower, tol)
}

/// `f(x) = |x|^{−α−n/q−γ/q+λ} |Ω(x')|^{q'−2} Ω(x')`. The closed-form norm is
/// the Morrey-Herz norm with exponent `p`.
pub fn morrey_herz_extremal(omega: &AngularProfile, w: &Weight, p: f64, q: f64, alpha: f64, lambda: f64, tol: f64) -> Result<ExtremalFamily> {
    check_omega(omega, w)?;
    let r = check_exponent("q", q)?;
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("λ must be positive, got {lambda}")));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p must lie in (0, ∞), got {p}")));
    }
    let (n, gamma) = (w.dim, w.gamma);
    let e = -alpha - (n as f64 + gamma) / q + lambda;
    let radial = if e == 0.0 { RadialProfile::constant(1.0) } else { RadialProfile::power(e) };
    let function = TestFunction::separable(radial, omega.func.signed_power(r - 1.0));
    let (op, owp) = omega_powers(omega, r, w, tol)?;
    let mut fam = ExtremalFamily {
        kind: ExtremalKind::MorreyHerz,
        params: ExtremalParams { n, gamma, p, q, alpha, lambda, m: 0 },
        function,
        closed_form_norm: None,
        closed_form_image_exponent: Some(e),
        omega_power: op,
        omega_weighted_power: owp,
        r,
    };
    // sup_{k0} 2^{−k0λ} (Σ_{k≤k0} 2^{kαp} chunk_k^p)^{1/p} = chunk_0 (1 − 2^{−λp})^{−1/p}
    let c0 = morrey_herz_chunk_formula(q, alpha, lambda, 0, fam.weighted_angular_factor());
    fam.closed_form_norm = Some(c0 * (1.0 - 2f64.powf(-lambda * p)).powf(-1.0 / p));
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Region;
    use crate::spaces::{central_morrey_norm, herz_norm, lq_norm, morrey_herz_norm, NormConfig};

    #[test]
    fn morrey_closed_form_matches_norm() {
        let w = Weight::power(0.0, 1).unwrap();
        let f = morrey_extremal(&AngularProfile::ones(1), &w, -0.1, 2.0, 1e-12).unwrap();
        let cf = f.closed_form_norm.unwrap();
        assert!((cf - 1.1983).abs() < 1e-4, "{cf}");
        let nr = central_morrey_norm(&f.function, 2.0, -0.1, &w, &NormConfig::default()).unwrap();
        assert!((nr.value - cf).abs() / cf < 1e-4);
        assert_eq!(f.closed_form_image_exponent, Some(-0.1));
        let z = morrey_extremal(&AngularProfile::ones(1), &w, 0.0, 2.0, 1e-12).unwrap();
        assert_eq!(z.function.envelope(), (0.0, 0.0));
        assert!(morrey_extremal(&AngularProfile::ones(1), &w, 0.1, 1.0, 1e-12).is_err());
    }

    #[test]
    fn herz_chunks() {
        let w = Weight::power(0.0, 1).unwrap();
        let f = herz_extremal(&AngularProfile::ones(1), &w, 2.0, 0.5, 10, 1e-12).unwrap();
        assert_eq!(f.herz_chunk(-3), Some(0.0));
        let cfg = NormConfig::default();
        for k in 1..4 {
            let num = lq_norm(&f.function, 2.0, &w, Region::Annulus(k), &cfg).unwrap();
            let cf = f.herz_chunk(k).unwrap();
            assert!((num - cf).abs() < 1e-8 * cf.max(1.0), "k={k}: {num} vs {cf}");
        }
        // raw formula over-estimates the k = 0 annulus where f_m is partly absent
        let k0 = herz_chunk_formula(2.0, 0.5, 10, 0, f.weighted_angular_factor());
        assert!(k0 > lq_norm(&f.function, 2.0, &w, Region::Annulus(0), &cfg).unwrap());
        assert!(herz_extremal(&AngularProfile::ones(1), &w, 2.0, -0.25, 2, 1e-12).is_err());
    }

    #[test]
    fn herz_partial_sums_converge() {
        let w = Weight::power(0.0, 1).unwrap();
        let f = herz_extremal(&AngularProfile::ones(1), &w, 2.0, 0.25, 3, 1e-12).unwrap();
        let full = f.herz_norm(2.0, None).unwrap();
        let mut prev = 0.0;
        for k in [4, 8, 16, 32, 64] {
            let v = f.herz_norm(2.0, Some(k)).unwrap();
            assert!(v > prev && v < full);
            prev = v;
        }
        assert!((prev - full).abs() / full < 1e-5);
        let trunc = TestFunction::radial(RadialProfile::power_on(-0.25 - 0.5 - 0.125, 1.0, 2f64.powi(10)));
        let num = herz_norm(&trunc, 0.25, 2.0, 2.0, &w, &NormConfig::default()).unwrap();
        assert!((num.value - f.herz_norm(2.0, Some(10)).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn truncation_sets() {
        assert_eq!(herz_truncation_set(1).unwrap().lower, 1.0);
        assert_eq!(herz_truncation_set(3).unwrap().lower, 0.25);
        let (a, b) = (herz_truncation_set(4).unwrap(), herz_truncation_set(5).unwrap());
        assert!(a.is_subset_of(&b) && !b.is_subset_of(&a));
        assert!(herz_truncation_set(0).is_err());
        let h = RadialKernel::hardy(1);
        let vals: Vec<f64> = [6, 8, 10]
            .iter()
            .map(|m| match herz_lower_integral(&h, 1, 0.0, 2.0, *m, 1e-12).unwrap() {
                ConstantValue::Finite(v) => v,
                ConstantValue::Divergent => panic!(),
            })
            .collect();
        assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
    }

    #[test]
    fn morrey_herz_family() {
        let w = Weight::power(0.0, 1).unwrap();
        let f = morrey_herz_extremal(&AngularProfile::ones(1), &w, 2.0, 2.0, 0.0, 0.5, 1e-12).unwrap();
        assert_eq!(f.closed_form_image_exponent, Some(0.0));
        let cfg = NormConfig::default();
        for k in [-2, 0, 3] {
            let num = lq_norm(&f.function, 2.0, &w, Region::Annulus(k), &cfg).unwrap();
            let cf = f.morrey_herz_chunk(k).unwrap();
            assert!((num - cf).abs() < 1e-8 * cf, "{num} vs {cf}");
        }
        let nr = morrey_herz_norm(&f.function, 0.0, 0.5, 2.0, 2.0, &w, &cfg).unwrap();
        let cf = f.closed_form_norm.unwrap();
        assert!((nr.value - cf).abs() / cf < 1e-6, "{} vs {cf}", nr.value);
        let g = morrey_herz_extremal(&AngularProfile::ones(1), &w, 2.0, 2.0, 0.5, 0.5, 1e-12).unwrap();
        assert!((g.morrey_herz_chunk(-5).unwrap() - g.morrey_herz_chunk(7).unwrap()).abs() < 1e-15);
        let q1 = morrey_herz_extremal(&AngularProfile::ones(1), &w, 2.0, 1.5, 0.0, 0.5, 1e-12).unwrap();
        assert!(q1.closed_form_image_exponent.unwrap() < 0.0);
    }

    #[test]
    fn morrey_image_is_pure_power() {
        let w = Weight::power(0.3, 1).unwrap();
        let f = morrey_extremal(&AngularProfile::ones(1), &w, -0.1, 2.0, 1e-12).unwrap();
        let h = crate::operators::HausdorffOperator::hardy(1);
        let amp = match f.image_amplitude(&h.phi, 1e-12).unwrap() {
            ConstantValue::Finite(v) => v,
            _ => panic!(),
        };
        let e = f.closed_form_image_exponent.unwrap();
        for x in [0.01, 1.0, 37.0] {
            let v = h.apply(&f.function, &[x], 1e-12).unwrap();
            assert!((v / (amp * x.powf(e)) - 1.0).abs() < 1e-9);
        }
    }
}
