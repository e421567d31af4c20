//! Weighted `L^q`, central Morrey, Herz and Morrey-Herz norms, one- and
//! two-weight.
//!
//! Sums over dyadic annuli are truncated to a window `[k_min, k_max]` and
//! carry a geometric tail bound; suprema over radii use the quarter-dyadic
//! grid `R = 2^{j/4}` refined by golden-section search around the maximum.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::quadrature::{integrate_radial_density, integrate_sphere, Region, Tolerance};
use crate::weights::Weight;

/// Inclusive range of dyadic indices used for truncated sums and sups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicWindow {
    pub k_min: i32,
    pub k_max: i32,
}

impl Default for DyadicWindow {
    fn default() -> Self {
        DyadicWindow { k_min: -24, k_max: 24 }
    }
}

impl DyadicWindow {
    pub fn symmetric(w: i32) -> Self {
        DyadicWindow { k_min: -w, k_max: w }
    }
}

/// Numerical settings shared by all norm evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormConfig {
    pub window: DyadicWindow,
    /// Relative tolerance of the underlying radial integrals.
    pub tol: f64,
    /// Report non-decaying tails as `Divergent`; otherwise return the
    /// truncated value with an infinite tail bound.
    pub strict: bool,
    /// Refine Morrey suprema between grid points.
    pub refine: bool,
}

impl Default for NormConfig {
    fn default() -> Self {
        NormConfig { window: DyadicWindow::default(), tol: 1e-10, strict: true, refine: true }
    }
}

impl NormConfig {
    pub fn with_window(mut self, window: DyadicWindow) -> Self {
        self.window = window;
        self
    }

    pub fn lenient(mut self) -> Self {
        self.strict = false;
        self
    }
}

/// A computed norm with its truncation record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub k_min: i32,
    pub k_max: i32,
    /// Bound on the increase of `value` if the truncation were removed.
    pub tail_bound: f64,
    /// Maximising `k₀` (Morrey-Herz) or `R` (Morrey).
    pub attained_at: Option<f64>,
    #[serde(skip)]
    pub saturated: bool,
}

impl NormResult {
    fn zero(w: DyadicWindow) -> Self {
        NormResult { value: 0.0, k_min: w.k_min, k_max: w.k_max, tail_bound: 0.0, attained_at: None, saturated: true }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "value": self.value,
            "k_min": self.k_min,
            "k_max": self.k_max,
            "tail_bound": if self.tail_bound.is_finite() { serde_json::json!(self.tail_bound) } else { serde_json::json!("infinite") },
            "attained_at": self.attained_at,
        })
    }
}

/// The radial mass density `ρ(r) = r^{n-1+γ} ∫_{S^{n-1}} |f(r y)|^q ω(y) dσ(y)`
/// of `|f|^q ω`, with the machinery to integrate it over radial ranges.
pub struct MassDensity<'a> {
    f: &'a TestFunction,
    q: f64,
    w: &'a Weight,
    /// `∫ |h|^q ω dσ` for separable `f = g·h`.
    angular_factor: Option<f64>,
    tol: f64,
    error: RefCell<Option<Error>>,
}

impl<'a> MassDensity<'a> {
    pub fn new(f: &'a TestFunction, q: f64, w: &'a Weight, tol: f64) -> Result<Self> {
        let angular_factor = match f {
            TestFunction::Separable { angular, .. } => {
                let a = match angular.as_constant() {
                    Some(c) => c.abs().powf(q) * w.sphere_mass(),
                    None => w.angular_integral(&|y| angular.eval(y).abs().powf(q), (tol * 1e-2).max(1e-14))?,
                };
                Some(a)
            }
            TestFunction::General { .. } => None,
        };
        Ok(MassDensity { f, q, w, angular_factor, tol, error: RefCell::new(None) })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.w.dim;
        let jac = r.powf(n as f64 - 1.0 + self.w.gamma);
        match (self.f, self.angular_factor) {
            (TestFunction::Separable { radial, .. }, Some(a)) => {
                let g = radial.eval(r);
                if g == 0.0 {
                    0.0
                } else {
                    jac * g.abs().powf(self.q) * a
                }
            }
            _ => {
                let h = |y: &[f64]| {
                    let mut x = [0.0; 3];
                    for i in 0..n {
                        x[i] = r * y[i];
                    }
                    let v = self.f.eval(&x[..n]);
                    if v == 0.0 {
                        0.0
                    } else {
                        v.abs().powf(self.q) * self.w.angular.eval(y)
                    }
                };
                match integrate_sphere(n, &h, Tolerance::rel(self.tol / 3.0)) {
                    Ok(s) => jac * s.value,
                    Err(e) => {
                        *self.error.borrow_mut() = Some(e);
                        f64::NAN
                    }
                }
            }
        }
    }

    fn exponents(&self) -> (f64, f64) {
        let base = self.w.dim as f64 - 1.0 + self.w.gamma;
        let (e0, einf) = self.f.envelope();
        (base + self.q * e0, base + self.q * einf)
    }

    fn integrate(&self, a: f64, b: f64) -> Result<crate::quadrature::QuadratureResult> {
        let (lo, hi) = self.f.support();
        let (a, b) = (a.max(lo), b.min(hi));
        if !(b > a) {
            return Ok(crate::quadrature::QuadratureResult::exact(0.0));
        }
        let region = if a == 0.0 && b.is_infinite() {
            Region::All
        } else if a == 0.0 {
            Region::Ball(b)
        } else {
            Region::Shell(a, b)
        };
        let res = integrate_radial_density(&|r| self.eval(r), self.exponents(), &self.f.breakpoints(), region, Tolerance::rel(self.tol));
        if let Some(e) = self.error.borrow_mut().take() {
            return Err(e);
        }
        res
    }

    /// `∫_{a<|x|≤b} |f|^q ω`.
    pub fn shell(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.integrate(a, b)?.value)
    }

    /// `∫_{C_k} |f|^q ω`.
    pub fn annulus(&self, k: i32) -> Result<f64> {
        self.shell(2f64.powi(k - 1), 2f64.powi(k))
    }

    /// `∫_{B(0,R)} |f|^q ω`.
    pub fn ball(&self, radius: f64) -> Result<f64> {
        Ok(self.integrate(0.0, radius)?.value)
    }

    /// `∫_{R^n} |f|^q ω`.
    pub fn total(&self) -> Result<f64> {
        Ok(self.integrate(0.0, f64::INFINITY)?.value)
    }
}

fn check_q(q: f64) -> Result<()> {
    if q >= 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("q must satisfy 1 ≤ q < ∞, got {q}")))
    }
}

fn check_p_positive(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("p must satisfy 0 < p < ∞, got {p}")))
    }
}

fn check_same_dim(f: &TestFunction, w: &Weight) -> Result<()> {
    let _ = f;
    crate::check_dim(w.dim).map(|_| ())
}

/// `‖f‖_{L^q_ω(region)}`.
pub fn lq_norm(f: &TestFunction, q: f64, w: &Weight, region: Region, cfg: &NormConfig) -> Result<f64> {
    check_q(q)?;
    check_same_dim(f, w)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let d = MassDensity::new(f, q, w, cfg.tol)?;
    let (a, b) = region.radii();
    let m = d.shell(a, b)?;
    Ok(m.max(0.0).powf(1.0 / q))
}

/// Geometric tail estimate beyond the last two terms `prev, last` of a
/// sequence. `None` means the terms do not decay.
fn geometric_tail(prev: f64, last: f64, total: f64) -> Option<f64> {
    if last == 0.0 {
        return Some(0.0);
    }
    if prev > 0.0 && last < prev {
        let r = last / prev;
        return Some(last * r / (1.0 - r));
    }
    if last <= 1e-14 * total {
        return Some(last);
    }
    None
}

/// Terms `T_k = coef(k)·‖fχ_k‖^p_{q,w}` over the window.
fn herz_terms(f: &TestFunction, p: f64, q: f64, w: &Weight, coef: &dyn Fn(i32) -> Result<f64>, cfg: &NormConfig) -> Result<Vec<f64>> {
    let d = MassDensity::new(f, q, w, cfg.tol)?;
    let mut out = Vec::new();
    for k in cfg.window.k_min..=cfg.window.k_max {
        let m = d.annulus(k)?.max(0.0);
        out.push(if m == 0.0 { 0.0 } else { coef(k)? * m.powf(p / q) });
    }
    Ok(out)
}

fn sum_norm(terms: &[f64], p: f64, cfg: &NormConfig) -> Result<NormResult> {
    let w = cfg.window;
    let s: f64 = terms.iter().sum();
    let n = terms.len();
    let mut tail = 0.0;
    let mut saturated = true;
    if n >= 2 {
        for (prev, last, side) in [(terms[n - 2], terms[n - 1], "right"), (terms[1], terms[0], "left")] {
            match geometric_tail(prev, last, s) {
                Some(t) => tail += t,
                None => {
                    if cfg.strict {
                        return Err(Error::Divergent(format!(
                            "dyadic terms do not decay at the {side} end of [{}, {}]",
                            w.k_min, w.k_max
                        )));
                    }
                    saturated = false;
                    tail = f64::INFINITY;
                }
            }
        }
    }
    let value = s.powf(1.0 / p);
    let tail_bound = if tail.is_finite() { (s + tail).powf(1.0 / p) - value } else { f64::INFINITY };
    Ok(NormResult { value, k_min: w.k_min, k_max: w.k_max, tail_bound, attained_at: None, saturated })
}

/// `‖f‖_{K̇^{α,p}_q(ω)} = (Σ_k 2^{kαp} ‖fχ_k‖^p_{q,ω})^{1/p}`.
pub fn herz_norm(f: &TestFunction, alpha: f64, p: f64, q: f64, w: &Weight, cfg: &NormConfig) -> Result<NormResult> {
    check_p_positive(p)?;
    check_q(q)?;
    if f.is_zero() {
        return Ok(NormResult::zero(cfg.window));
    }
    let terms = herz_terms(f, p, q, w, &|k| Ok(2f64.powf(k as f64 * alpha * p)), cfg)?;
    sum_norm(&terms, p, cfg)
}

/// `(Σ_k ω₁(B_k)^{αp/n} ‖fχ_k‖^p_{L^q(ω₂)})^{1/p}`.
pub fn two_weight_herz_norm(
    f: &TestFunction,
    alpha: f64,
    p: f64,
    q: f64,
    w1: &Weight,
    w2: &Weight,
    cfg: &NormConfig,
) -> Result<NormResult> {
    check_p_positive(p)?;
    check_q(q)?;
    if f.is_zero() {
        return Ok(NormResult::zero(cfg.window));
    }
    let n = w1.dim as f64;
    let terms = herz_terms(f, p, q, w2, &|k| Ok(w1.ball_mass(2f64.powi(k))?.powf(alpha * p / n)), cfg)?;
    sum_norm(&terms, p, cfg)
}

/// Checks the edge of a grid supremum: if the maximum sits at an edge and
/// the supremand still increases towards it, extrapolates the increments
/// geometrically; `None` if they do not decay.
fn edge_tail(values: &[f64], at_start: bool) -> Option<f64> {
    let n = values.len();
    if n < 3 {
        return Some(0.0);
    }
    let (s0, s1, s2) = if at_start { (values[2], values[1], values[0]) } else { (values[n - 3], values[n - 2], values[n - 1]) };
    let d1 = s2 - s1;
    if d1 <= 1e-13 * s2.abs() {
        return Some(0.0);
    }
    let d0 = s1 - s0;
    if d0 > 0.0 && d1 < d0 {
        let r = d1 / d0;
        return Some(d1 * r / (1.0 - r));
    }
    None
}

fn sup_norm(values: &[f64], args: &[f64], cfg: &NormConfig, what: &str) -> Result<(usize, f64, bool)> {
    let (imax, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if *v > acc.1 { (i, *v) } else { acc });
    let mut tail = 0.0;
    let mut saturated = true;
    let last = values.len() - 1;
    for (edge, at_start) in [(0, true), (last, false)] {
        if imax != edge {
            continue;
        }
        match edge_tail(values, at_start) {
            Some(t) => tail += t,
            None => {
                if cfg.strict {
                    return Err(Error::Divergent(format!(
                        "{what} supremum keeps growing at {} = {}",
                        if at_start { "lower edge" } else { "upper edge" },
                        args[edge]
                    )));
                }
                saturated = false;
                tail = f64::INFINITY;
            }
        }
    }
    Ok((imax, tail, saturated))
}

/// Morrey-type supremum `sup_R (N(R) ∫_{B(0,R)} |f|^p ω₁)^{1/p}` over the
/// quarter-dyadic grid, with `N(R)` the normaliser.
fn morrey_sup(f: &TestFunction, p: f64, w1: &Weight, normaliser: &dyn Fn(f64) -> Result<f64>, cfg: &NormConfig) -> Result<NormResult> {
    let win = cfg.window;
    if f.is_zero() {
        return Ok(NormResult::zero(win));
    }
    let d = MassDensity::new(f, p, w1, cfg.tol)?;
    let js: Vec<i32> = (4 * win.k_min..=4 * win.k_max).collect();
    let radii: Vec<f64> = js.iter().map(|j| 2f64.powf(*j as f64 / 4.0)).collect();
    let mut cumulative = Vec::with_capacity(radii.len());
    let mut m = d.ball(radii[0])?;
    cumulative.push(m);
    for w in radii.windows(2) {
        m += d.shell(w[0], w[1])?;
        cumulative.push(m);
    }
    let mut values = Vec::with_capacity(radii.len());
    for (r, m) in radii.iter().zip(&cumulative) {
        values.push((normaliser(*r)? * m.max(0.0)).powf(1.0 / p));
    }
    let (imax, tail, saturated) = sup_norm(&values, &radii, cfg, "Morrey")?;
    let mut best = values[imax];
    let mut at = radii[imax];
    if cfg.refine && imax > 0 && imax + 1 < radii.len() && best > 0.0 {
        let base = cumulative[imax - 1];
        let r0 = radii[imax - 1];
        let s = |u: f64| -> Result<f64> {
            let r = u.exp();
            Ok((normaliser(r)? * (base + d.shell(r0, r)?).max(0.0)).powf(1.0 / p))
        };
        let (mut a, mut b) = (radii[imax - 1].ln(), radii[imax + 1].ln());
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut e = a + g * (b - a);
        let (mut fc, mut fe) = (s(c)?, s(e)?);
        for _ in 0..48 {
            if fc > fe {
                b = e;
                e = c;
                fe = fc;
                c = b - g * (b - a);
                fc = s(c)?;
            } else {
                a = c;
                c = e;
                fc = fe;
                e = a + g * (b - a);
                fe = s(e)?;
            }
        }
        for (u, v) in [(c, fc), (e, fe)] {
            if v > best {
                best = v;
                at = u.exp();
            }
        }
    }
    Ok(NormResult { value: best, k_min: win.k_min, k_max: win.k_max, tail_bound: tail, attained_at: Some(at), saturated })
}

/// `sup_R (ω(B(0,R))^{−(1+λp)} ∫_{B(0,R)} |f|^p ω)^{1/p}`.
pub fn central_morrey_norm(f: &TestFunction, p: f64, lambda: f64, w: &Weight, cfg: &NormConfig) -> Result<NormResult> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("central Morrey needs 1 ≤ p < ∞, got {p}")));
    }
    if !(1.0 + lambda * p > 0.0) {
        return Err(Error::Parameter(format!("central Morrey needs 1 + λp > 0, got λ = {lambda}, p = {p}")));
    }
    let e = -(1.0 + lambda * p);
    morrey_sup(f, p, w, &|r| Ok(w.ball_mass(r)?.powf(e)), cfg)
}

/// `sup_R (ω₂(B(0,R))^{−λ} ∫_{B(0,R)} |f|^p ω₁)^{1/p}`.
pub fn two_weight_morrey_norm(f: &TestFunction, p: f64, lambda: f64, w1: &Weight, w2: &Weight, cfg: &NormConfig) -> Result<NormResult> {
    check_p_positive(p)?;
    if !(lambda > 0.0) {
        return Err(Error::Parameter(format!("two-weight Morrey needs λ > 0, got {lambda}")));
    }
    morrey_sup(f, p, w1, &|r| Ok(w2.ball_mass(r)?.powf(-lambda)), cfg)
}

fn morrey_herz_from_terms(terms: &[f64], p: f64, damping: &dyn Fn(i32) -> Result<f64>, cfg: &NormConfig) -> Result<NormResult> {
    let win = cfg.window;
    let total: f64 = terms.iter().sum();
    let left = if terms.len() >= 2 {
        match geometric_tail(terms[1], terms[0], total) {
            Some(t) => t,
            None => {
                if cfg.strict {
                    return Err(Error::Divergent(format!("dyadic terms do not decay at the left end of [{}, {}]", win.k_min, win.k_max)));
                }
                f64::INFINITY
            }
        }
    } else {
        0.0
    };
    let mut partial = 0.0;
    let mut values = Vec::with_capacity(terms.len());
    let mut with_left = Vec::with_capacity(terms.len());
    let ks: Vec<f64> = (win.k_min..=win.k_max).map(|k| k as f64).collect();
    for (i, t) in terms.iter().enumerate() {
        partial += t;
        let dmp = damping(win.k_min + i as i32)?;
        values.push(dmp * partial.powf(1.0 / p));
        with_left.push(dmp * (partial + left).powf(1.0 / p));
    }
    let (imax, edge, mut saturated) = sup_norm(&values, &ks, cfg, "Morrey-Herz")?;
    let best = values[imax];
    let widened = with_left.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut tail_bound = edge + (widened - best).max(0.0);
    if !left.is_finite() {
        saturated = false;
        tail_bound = f64::INFINITY;
    }
    Ok(NormResult { value: best, k_min: win.k_min, k_max: win.k_max, tail_bound, attained_at: Some(ks[imax]), saturated })
}

/// `sup_{k₀} 2^{−k₀λ} (Σ_{k≤k₀} 2^{kαp} ‖fχ_k‖^p_{q,ω})^{1/p}`.
pub fn morrey_herz_norm(f: &TestFunction, alpha: f64, lambda: f64, p: f64, q: f64, w: &Weight, cfg: &NormConfig) -> Result<NormResult> {
    check_p_positive(p)?;
    check_q(q)?;
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("Morrey-Herz needs λ ≥ 0, got {lambda}")));
    }
    if f.is_zero() {
        return Ok(NormResult::zero(cfg.window));
    }
    let terms = herz_terms(f, p, q, w, &|k| Ok(2f64.powf(k as f64 * alpha * p)), cfg)?;
    morrey_herz_from_terms(&terms, p, &|k| Ok(2f64.powf(-(k as f64) * lambda)), cfg)
}

/// `sup_{k₀} ω₁(B_{k₀})^{−λ/n} (Σ_{k≤k₀} ω₁(B_k)^{αp/n} ‖fχ_k‖^p_{q,ω₂})^{1/p}`.
#[allow(clippy::too_many_arguments)]
pub fn two_weight_morrey_herz_norm(
    f: &TestFunction,
    alpha: f64,
    lambda: f64,
    p: f64,
    q: f64,
    w1: &Weight,
    w2: &Weight,
    cfg: &NormConfig,
) -> Result<NormResult> {
    check_p_positive(p)?;
    check_q(q)?;
    if !(lambda >= 0.0) {
        return Err(Error::Parameter(format!("Morrey-Herz needs λ ≥ 0, got {lambda}")));
    }
    if f.is_zero() {
        return Ok(NormResult::zero(cfg.window));
    }
    let n = w1.dim as f64;
    let terms = herz_terms(f, p, q, w2, &|k| Ok(w1.ball_mass(2f64.powi(k))?.powf(alpha * p / n)), cfg)?;
    morrey_herz_from_terms(&terms, p, &|k| Ok(w1.ball_mass(2f64.powi(k))?.powf(-lambda / n)), cfg)
}

/// The kinds of space handled by [`SpaceSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Lq,
    CentralMorrey,
    Herz,
    MorreyHerz,
    TwoWeightMorrey,
    TwoWeightHerz,
    TwoWeightMorreyHerz,
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "lq" => SpaceKind::Lq,
            "centralmorrey" | "morrey" => SpaceKind::CentralMorrey,
            "herz" => SpaceKind::Herz,
            "morreyherz" => SpaceKind::MorreyHerz,
            "twoweightmorrey" => SpaceKind::TwoWeightMorrey,
            "twoweightherz" => SpaceKind::TwoWeightHerz,
            "twoweightmorreyherz" => SpaceKind::TwoWeightMorreyHerz,
            _ => return Err(Error::Parameter(format!("unknown space kind '{s}'"))),
        })
    }
}

/// A fully specified function space.
#[derive(Debug, Clone)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub w1: Weight,
    pub w2: Option<Weight>,
}

impl SpaceSpec {
    /// Builds a spec from optional parameters, rejecting missing, extraneous
    /// and out-of-range ones for the given kind.
    pub fn build(
        kind: SpaceKind,
        p: Option<f64>,
        q: Option<f64>,
        alpha: Option<f64>,
        lambda: Option<f64>,
        w1: Weight,
        w2: Option<Weight>,
    ) -> Result<Self> {
        use SpaceKind::*;
        let (needs_p, needs_q, needs_alpha, needs_lambda, needs_w2) = match kind {
            Lq => (false, true, false, false, false),
            CentralMorrey => (true, false, false, true, false),
            Herz => (true, true, true, false, false),
            MorreyHerz => (true, true, true, true, false),
            TwoWeightMorrey => (true, false, false, true, true),
            TwoWeightHerz => (true, true, true, false, true),
            TwoWeightMorreyHerz => (true, true, true, true, true),
        };
        let pick = |name: &str, v: Option<f64>, needed: bool| -> Result<f64> {
            match (v, needed) {
                (Some(x), true) => Ok(x),
                (None, true) => Err(Error::Parameter(format!("{kind:?} requires parameter {name}"))),
                (Some(_), false) => Err(Error::Parameter(format!("{kind:?} does not take parameter {name}"))),
                (None, false) => Ok(f64::NAN),
            }
        };
        let p = pick("p", p, needs_p)?;
        let q = pick("q", q, needs_q)?;
        let alpha = pick("alpha", alpha, needs_alpha)?;
        let lambda = pick("lambda", lambda, needs_lambda)?;
        if needs_w2 != w2.is_some() {
            return Err(Error::Parameter(if needs_w2 {
                format!("{kind:?} requires a second weight")
            } else {
                format!("{kind:?} takes a single weight")
            }));
        }
        if let Some(w2) = &w2 {
            if w2.dim != w1.dim {
                return Err(Error::Parameter("weights must share a dimension".into()));
            }
        }
        match kind {
            Lq => check_q(q)?,
            CentralMorrey => {
                if !(p >= 1.0) || !(1.0 + lambda * p > 0.0) {
                    return Err(Error::Parameter(format!("central Morrey needs p ≥ 1 and 1 + λp > 0 (p = {p}, λ = {lambda})")));
                }
            }
            Herz | TwoWeightHerz => {
                check_p_positive(p)?;
                check_q(q)?;
            }
            MorreyHerz | TwoWeightMorreyHerz => {
                check_p_positive(p)?;
                check_q(q)?;
                if !(lambda >= 0.0) {
                    return Err(Error::Parameter(format!("Morrey-Herz needs λ ≥ 0, got {lambda}")));
                }
            }
            TwoWeightMorrey => {
                check_p_positive(p)?;
                if !(lambda > 0.0) {
                    return Err(Error::Parameter(format!("two-weight Morrey needs λ > 0, got {lambda}")));
                }
            }
        }
        Ok(SpaceSpec { kind, p, q, alpha, lambda, w1, w2 })
    }

    pub fn dim(&self) -> usize {
        self.w1.dim
    }

    /// Evaluates the norm of `f` in this space.
    pub fn norm(&self, f: &TestFunction, cfg: &NormConfig) -> Result<NormResult> {
        use SpaceKind::*;
        let w2 = || self.w2.as_ref().expect("validated at construction");
        match self.kind {
            Lq => {
                let v = lq_norm(f, self.q, &self.w1, Region::All, cfg)?;
                Ok(NormResult { value: v, k_min: 0, k_max: 0, tail_bound: 0.0, attained_at: None, saturated: true })
            }
            CentralMorrey => central_morrey_norm(f, self.p, self.lambda, &self.w1, cfg),
            Herz => herz_norm(f, self.alpha, self.p, self.q, &self.w1, cfg),
            MorreyHerz => morrey_herz_norm(f, self.alpha, self.lambda, self.p, self.q, &self.w1, cfg),
            TwoWeightMorrey => two_weight_morrey_norm(f, self.p, self.lambda, &self.w1, w2(), cfg),
            TwoWeightHerz => two_weight_herz_norm(f, self.alpha, self.p, self.q, &self.w1, w2(), cfg),
            TwoWeightMorreyHerz => two_weight_morrey_herz_norm(f, self.alpha, self.lambda, self.p, self.q, &self.w1, w2(), cfg),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::RadialProfile;

    fn chi(lo: f64, hi: f64) -> TestFunction {
        TestFunction::radial(RadialProfile::indicator(lo, hi))
    }

    #[test]
    fn lq_examples() {
        let cfg = NormConfig::default();
        let w0 = Weight::power(0.0, 1).unwrap();
        assert!((lq_norm(&chi(0.5, 1.0), 2.0, &w0, Region::All, &cfg).unwrap() - 1.0).abs() < 1e-12);
        let w02 = Weight::power(0.0, 2).unwrap();
        let f = TestFunction::radial(RadialProfile::power_on(1.0, 0.0, 1.0));
        let v = lq_norm(&f, 1.0, &w02, Region::All, &cfg).unwrap();
        assert!((v - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-10);
        let w12 = Weight::power(1.0, 2).unwrap();
        let v = lq_norm(&chi(0.0, 1.0), 2.0, &w12, Region::All, &cfg).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI / 3.0).sqrt()).abs() < 1e-10);
        assert!(lq_norm(&chi(0.0, 1.0), 0.5, &w12, Region::All, &cfg).is_err());
    }

    #[test]
    fn lq_detects_missing_decay() {
        let cfg = NormConfig::default();
        let w = Weight::power(0.0, 1).unwrap();
        let f = TestFunction::radial(RadialProfile::new("slow", |r: f64| (1.0 + r).powf(-0.5), 0.0, -0.9));
        assert!(lq_norm(&f, 2.0, &w, Region::All, &cfg).unwrap_err().is_divergent());
    }

    #[test]
    fn morrey_closed_form_example() {
        let cfg = NormConfig::default();
        let w = Weight::power(0.0, 1).unwrap();
        let f = TestFunction::radial(RadialProfile::power(-0.1));
        let r = central_morrey_norm(&f, 2.0, -0.1, &w, &cfg).unwrap();
        let expected = 2f64.powf(0.1) * 0.8f64.powf(-0.5);
        assert!((r.value / expected - 1.0).abs() < 1e-8, "{r:?}");
        assert_eq!(central_morrey_norm(&TestFunction::zero(), 2.0, -0.1, &w, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn herz_examples() {
        let cfg = NormConfig::default();
        let w = Weight::power(0.0, 1).unwrap();
        let f = chi(0.5, 1.0);
        assert!((herz_norm(&f, 0.0, 2.0, 2.0, &w, &cfg).unwrap().value - 1.0).abs() < 1e-12);
        assert!((herz_norm(&f, 3.0, 2.0, 2.0, &w, &cfg).unwrap().value - 1.0).abs() < 1e-12);
        let g = chi(0.25, 4.0);
        let h = herz_norm(&g, 0.0, 2.0, 2.0, &w, &cfg).unwrap().value;
        let l = lq_norm(&g, 2.0, &w, Region::All, &cfg).unwrap();
        assert!((h - l).abs() < 1e-10);
    }

    #[test]
    fn morrey_herz_examples() {
        let cfg = NormConfig::default();
        let w = Weight::power(0.0, 1).unwrap();
        let f = chi(0.5, 1.0);
        for a in [-1.0, 0.0, 0.7] {
            let mk = morrey_herz_norm(&f, a, 0.0, 2.0, 2.0, &w, &cfg).unwrap().value;
            let h = herz_norm(&f, a, 2.0, 2.0, &w, &cfg).unwrap().value;
            assert!((mk - h).abs() < 1e-10);
        }
        let tw = two_weight_morrey_herz_norm(&f, 0.0, 0.5, 1.0, 1.0, &w, &w, &cfg).unwrap();
        assert!((tw.value - 2f64.powf(-0.5)).abs() < 1e-12);
        assert_eq!(tw.attained_at, Some(0.0));
    }

    #[test]
    fn two_weight_examples() {
        let cfg = NormConfig::default();
        let w = Weight::power(0.0, 1).unwrap();
        let f = chi(0.5, 1.0);
        let a = two_weight_herz_norm(&f, 1.0, 2.0, 2.0, &w, &w, &cfg).unwrap().value;
        let b = herz_norm(&f, 1.0, 2.0, 2.0, &w, &cfg).unwrap().value;
        assert!((a / b - 2.0).abs() < 1e-10);
        let ball = chi(0.0, 1.0);
        let m = two_weight_morrey_norm(&ball, 2.0, 1.0 + -0.2 * 2.0, &w, &w, &cfg).unwrap().value;
        let c = central_morrey_norm(&ball, 2.0, -0.2, &w, &cfg).unwrap().value;
        assert!((m - c).abs() < 1e-10);
        let m = two_weight_morrey_norm(&ball, 1.0, 1.0, &w, &w, &cfg).unwrap().value;
        assert!((m - 1.0).abs() < 1e-10);
    }

    #[test]
    fn spec_builder_rejects_extraneous_parameters() {
        let w = Weight::power(0.0, 1).unwrap();
        assert!(SpaceSpec::build(SpaceKind::CentralMorrey, Some(2.0), None, None, Some(0.1), w.clone(), None).is_ok());
        assert!(SpaceSpec::build(SpaceKind::CentralMorrey, Some(2.0), Some(2.0), None, Some(0.1), w.clone(), None).is_err());
        assert!(SpaceSpec::build(SpaceKind::MorreyHerz, Some(2.0), Some(2.0), Some(0.0), Some(-0.1), w.clone(), None).is_err());
        assert!(SpaceSpec::build(SpaceKind::TwoWeightHerz, Some(2.0), Some(2.0), Some(0.0), None, w, None).is_err());
    }
}
