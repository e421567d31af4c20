//! The objects the operator acts on and is built from: the rough symbol
//! `Ω`, the radial kernel `Φ`, test functions `f` and Lipschitz symbols `b`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::{integrate_sphere, sphere_rule, Tolerance};
use crate::weights::Weight;

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Variables available to angular expressions. `theta` is the angle from
/// the first axis (so `cos(theta) = x1` in every dimension) and `phi` the
/// azimuth about it in three dimensions.
pub const ANGULAR_VARS: [&str; 5] = ["theta", "phi", "x1", "x2", "x3"];

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Quadrature nodes used for sampled validation of angular functions.
pub(crate) fn validation_nodes(n: usize) -> Vec<Vec<f64>> {
    let level = match n {
        1 => 0,
        2 => 3,
        _ => 1,
    };
    sphere_rule(n, level).points.iter().map(|p| p[..n].to_vec()).collect()
}

/// A real function on the unit sphere `S^{n-1}`.
#[derive(Clone)]
pub struct AngularFn {
    eval: PointFn,
    constant: Option<f64>,
    label: String,
}

impl fmt::Debug for AngularFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AngularFn({})", self.label)
    }
}

impl AngularFn {
    pub fn constant(c: f64) -> Self {
        AngularFn { eval: Arc::new(move |_| c), constant: Some(c), label: format!("{c}") }
    }

    pub fn new(label: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        AngularFn { eval: Arc::new(f), constant: None, label: label.into() }
    }

    /// Parses an expression in `theta`, `phi`, `x1`, `x2`, `x3`.
    pub fn from_expr(source: &str) -> Result<Self> {
        let e = Expr::parse(source, &ANGULAR_VARS)?;
        if let Some(c) = e.constant() {
            return Ok(AngularFn { label: source.to_string(), ..AngularFn::constant(c) });
        }
        Ok(AngularFn::new(source, move |y: &[f64]| {
            let mut v = [0.0; 5];
            v[0] = match y.len() {
                1 => {
                    if y[0] > 0.0 {
                        0.0
                    } else {
                        std::f64::consts::PI
                    }
                }
                2 => y[1].atan2(y[0]),
                _ => y[0].clamp(-1.0, 1.0).acos(),
            };
            if y.len() == 3 {
                v[1] = y[2].atan2(y[1]);
            }
            for (i, c) in y.iter().enumerate() {
                v[2 + i] = *c;
            }
            e.eval(&v)
        }))
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        (self.eval)(y)
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Some(k) = self.constant {
            return AngularFn::constant(k * c);
        }
        let f = self.eval.clone();
        AngularFn::new(format!("{c}*({})", self.label), move |y| c * f(y))
    }

    /// `|h|^{e-1}·h`, the sign-preserving power used by the extremals.
    pub fn signed_power(&self, e: f64) -> Self {
        let sp = move |v: f64| if v == 0.0 { 0.0 } else { v.abs().powf(e - 1.0) * v };
        if let Some(k) = self.constant {
            return AngularFn::constant(sp(k));
        }
        let f = self.eval.clone();
        AngularFn::new(format!("|{0}|^{1}·sgn({0})", self.label, e), move |y| sp(f(y)))
    }

    pub fn product(&self, other: &AngularFn) -> Self {
        match (self.constant, other.constant) {
            (Some(a), Some(b)) => AngularFn::constant(a * b),
            _ => {
                let (f, g) = (self.eval.clone(), other.eval.clone());
                AngularFn::new(format!("({})*({})", self.label, other.label), move |y| f(y) * g(y))
            }
        }
    }

    /// `∫_{S^{n-1}} h dσ`.
    pub fn integral(&self, n: usize, tol: impl Into<Tolerance>) -> Result<f64> {
        if let Some(c) = self.constant {
            return Ok(c * crate::sphere_area(n));
        }
        Ok(integrate_sphere(n, &|y| self.eval(y), tol)?.value)
    }
}

/// The rough symbol `Ω` on `S^{n-1}`.
#[derive(Clone, Debug)]
pub struct AngularProfile {
    pub func: AngularFn,
    pub dim: usize,
    pub nonvanishing: bool,
}

impl AngularProfile {
    /// Builds `Ω`; a `nonvanishing` claim is checked at the validation nodes.
    pub fn new(func: AngularFn, dim: usize, nonvanishing: bool) -> Result<Self> {
        crate::check_dim(dim)?;
        for y in validation_nodes(dim) {
            let v = func.eval(&y);
            if !v.is_finite() {
                return Err(Error::Validation(format!("Ω is not finite at {y:?}")));
            }
            if nonvanishing && v == 0.0 {
                return Err(Error::Validation(format!("Ω vanishes at {y:?} but was declared nonvanishing")));
            }
        }
        Ok(AngularProfile { func, dim, nonvanishing })
    }

    pub fn ones(dim: usize) -> Self {
        AngularProfile { func: AngularFn::constant(1.0), dim, nonvanishing: true }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        self.func.eval(y)
    }

    pub fn scale(&self, c: f64) -> Self {
        AngularProfile { func: self.func.scale(c), dim: self.dim, nonvanishing: self.nonvanishing && c != 0.0 }
    }
}

/// `‖Ω‖_{L^r(S^{n-1}, ω(x')dσ)}`, or the unweighted norm when `w` is `None`.
/// `r = ∞` takes the maximum over quadrature nodes.
pub fn omega_norm(omega: &AngularProfile, r: f64, w: Option<&Weight>, tol: impl Into<Tolerance>) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::Parameter(format!("norm exponent must be at least 1, got {r}")));
    }
    let n = omega.dim;
    if r.is_infinite() {
        let level = if n == 1 { 0 } else { 4 };
        let m = sphere_rule(n, level)
            .points
            .iter()
            .map(|p| omega.eval(&p[..n]).abs())
            .fold(0.0, f64::max);
        return Ok(m);
    }
    let tol = tol.into();
    if let (Some(c), None) = (omega.func.as_constant(), w) {
        return Ok(c.abs() * crate::sphere_area(n).powf(1.0 / r));
    }
    let g = |y: &[f64]| {
        let base = omega.eval(y).abs().powf(r);
        match w {
            Some(w) => base * w.angular.eval(y),
            None => base,
        }
    };
    let v = integrate_sphere(n, &g, tol)?.value;
    Ok(v.powf(1.0 / r))
}

/// Sign of a kernel on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Nonnegative,
    Nonpositive,
    Mixed,
}

fn log_samples(count: usize) -> impl Iterator<Item = f64> {
    (0..count).map(move |i| 10f64.powf(-6.0 + 12.0 * (i as f64 + 0.37) / count as f64))
}

/// The radial kernel `Φ(t)`, `t > 0`, with its power-law exponents at both
/// ends (`+∞` at zero / `−∞` at infinity mean "vanishes there").
#[derive(Clone)]
pub struct RadialKernel {
    eval: ScalarFn,
    pub exponent_at_zero: f64,
    pub exponent_at_infinity: f64,
    pub sign: Sign,
    pub breakpoints: Vec<f64>,
    /// Closed support `[lo, hi]` in `t`.
    pub support: (f64, f64),
    pub label: String,
}

impl fmt::Debug for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKernel")
            .field("label", &self.label)
            .field("exponent_at_zero", &self.exponent_at_zero)
            .field("exponent_at_infinity", &self.exponent_at_infinity)
            .field("sign", &self.sign)
            .finish()
    }
}

impl RadialKernel {
    /// A kernel whose sign is determined by sampling.
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        exponent_at_zero: f64,
        exponent_at_infinity: f64,
        breakpoints: Vec<f64>,
    ) -> Self {
        let eval: ScalarFn = Arc::new(f);
        let sign = sampled_sign(&eval, &breakpoints);
        RadialKernel {
            eval,
            exponent_at_zero,
            exponent_at_infinity,
            sign,
            breakpoints,
            support: (0.0, f64::INFINITY),
            label: label.into(),
        }
    }

    /// Checks a declared sign against samples.
    pub fn with_sign(mut self, sign: Sign) -> Result<Self> {
        let sampled = sampled_sign(&self.eval, &self.breakpoints);
        let consistent = match sign {
            Sign::Mixed => true,
            s => sampled == s || (sampled != Sign::Mixed && self.is_sampled_zero()),
        };
        if !consistent {
            return Err(Error::Validation(format!("kernel {} declared {sign:?} but samples are {sampled:?}", self.label)));
        }
        self.sign = sign;
        Ok(self)
    }

    fn is_sampled_zero(&self) -> bool {
        log_samples(400).all(|t| self.eval(t) == 0.0)
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (lo, hi);
        self
    }

    /// `Φ(t) = t^{−n} χ_{(1,∞)}(t)`.
    pub fn hardy(n: usize) -> Self {
        let nn = n as i32;
        RadialKernel {
            eval: Arc::new(move |t| if t > 1.0 { t.powi(-nn) } else { 0.0 }),
            exponent_at_zero: f64::INFINITY,
            exponent_at_infinity: -(n as f64),
            sign: Sign::Nonnegative,
            breakpoints: vec![1.0],
            support: (1.0, f64::INFINITY),
            label: format!("hardy:{n}"),
        }
    }

    /// `Φ(t) = χ_{(0,1)}(t)`.
    pub fn adjoint_hardy() -> Self {
        RadialKernel {
            eval: Arc::new(|t| if t < 1.0 { 1.0 } else { 0.0 }),
            exponent_at_zero: 0.0,
            exponent_at_infinity: f64::NEG_INFINITY,
            sign: Sign::Nonnegative,
            breakpoints: vec![1.0],
            support: (0.0, 1.0),
            label: "adjoint_hardy".into(),
        }
    }

    /// `Φ(t) = t^a` on `lo < t < hi`, zero elsewhere.
    pub fn power(a: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::Parameter(format!("power kernel needs 0 ≤ lo < hi, got ({lo}, {hi})")));
        }
        let mut breakpoints = Vec::new();
        if lo > 0.0 {
            breakpoints.push(lo);
        }
        if hi.is_finite() {
            breakpoints.push(hi);
        }
        Ok(RadialKernel {
            eval: Arc::new(move |t| if t > lo && t < hi { t.powf(a) } else { 0.0 }),
            exponent_at_zero: if lo > 0.0 { f64::INFINITY } else { a },
            exponent_at_infinity: if hi.is_finite() { f64::NEG_INFINITY } else { a },
            sign: Sign::Nonnegative,
            breakpoints,
            support: (lo, hi),
            label: format!("power:{a}:{lo}:{hi}"),
        })
    }

    /// `Φ(t) = e^{−t²}`.
    pub fn gaussian() -> Self {
        RadialKernel {
            eval: Arc::new(|t| (-t * t).exp()),
            exponent_at_zero: 0.0,
            exponent_at_infinity: f64::NEG_INFINITY,
            sign: Sign::Nonnegative,
            breakpoints: vec![],
            support: (0.0, f64::INFINITY),
            label: "gaussian".into(),
        }
    }

    /// `Φ(t) = e^{−t−1/t}`, negligible at both ends.
    pub fn double_exponential() -> Self {
        RadialKernel {
            eval: Arc::new(|t| (-t - 1.0 / t).exp()),
            exponent_at_zero: f64::INFINITY,
            exponent_at_infinity: f64::NEG_INFINITY,
            sign: Sign::Nonnegative,
            breakpoints: vec![],
            support: (0.0, f64::INFINITY),
            label: "double_exponential".into(),
        }
    }

    pub fn zero() -> Self {
        RadialKernel {
            eval: Arc::new(|_| 0.0),
            exponent_at_zero: f64::INFINITY,
            exponent_at_infinity: f64::NEG_INFINITY,
            sign: Sign::Nonnegative,
            breakpoints: vec![],
            support: (0.0, f64::INFINITY),
            label: "zero".into(),
        }
    }

    /// Parses a preset name: `hardy:<n>`, `adjoint_hardy`, `gaussian`,
    /// `double_exponential`, `zero` or `power:<a>:<lo>:<hi>`.
    pub fn preset(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let num = |s: &str| -> Result<f64> {
            match s {
                "inf" => Ok(f64::INFINITY),
                _ => s.parse::<f64>().map_err(|_| Error::Parameter(format!("bad number '{s}' in kernel '{name}'"))),
            }
        };
        match parts.as_slice() {
            ["hardy", n] => {
                let n: usize = n.parse().map_err(|_| Error::Parameter(format!("bad dimension in '{name}'")))?;
                crate::check_dim(n)?;
                Ok(RadialKernel::hardy(n))
            }
            ["adjoint_hardy"] => Ok(RadialKernel::adjoint_hardy()),
            ["gaussian"] => Ok(RadialKernel::gaussian()),
            ["double_exponential"] => Ok(RadialKernel::double_exponential()),
            ["zero"] => Ok(RadialKernel::zero()),
            ["power", a, lo, hi] => RadialKernel::power(num(a)?, num(lo)?, num(hi)?),
            _ => Err(Error::Parameter(format!("unknown kernel preset '{name}'"))),
        }
    }

    /// A kernel from an expression in `t` with declared exponents.
    pub fn from_expr(source: &str, exponent_at_zero: f64, exponent_at_infinity: f64) -> Result<Self> {
        let e = Expr::parse(source, &["t"])?;
        let bps = e.breakpoints();
        Ok(RadialKernel::new(source, move |t| e.eval(&[t]), exponent_at_zero, exponent_at_infinity, bps))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn scale(&self, c: f64) -> Self {
        let f = self.eval.clone();
        let sign = match (self.sign, c.partial_cmp(&0.0)) {
            (s, Some(std::cmp::Ordering::Greater)) => s,
            (_, Some(std::cmp::Ordering::Equal)) => Sign::Nonnegative,
            (Sign::Nonnegative, _) => Sign::Nonpositive,
            (Sign::Nonpositive, _) => Sign::Nonnegative,
            (Sign::Mixed, _) => Sign::Mixed,
        };
        RadialKernel { eval: Arc::new(move |t| c * f(t)), sign, label: format!("{c}*{}", self.label), ..self.clone() }
    }

    pub fn has_constant_sign(&self) -> bool {
        self.sign != Sign::Mixed
    }
}

fn sampled_sign(f: &ScalarFn, breakpoints: &[f64]) -> Sign {
    let (mut pos, mut neg) = (false, false);
    let extra = breakpoints.iter().flat_map(|b| [b * (1.0 - 1e-9), b * (1.0 + 1e-9)]);
    for t in log_samples(400).chain(extra) {
        let v = f(t);
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    match (pos, neg) {
        (_, false) => Sign::Nonnegative,
        (false, true) => Sign::Nonpositive,
        _ => Sign::Mixed,
    }
}

/// A function of `r = |x| > 0` with its power-law behaviour at both ends.
#[derive(Clone)]
pub struct RadialProfile {
    eval: ScalarFn,
    /// `|g(r)| ≲ r^{e}` as `r → 0` (`+∞`: vanishes near 0).
    pub exponent_at_zero: f64,
    /// `|g(r)| ≲ r^{e}` as `r → ∞` (`−∞`: vanishes near ∞).
    pub exponent_at_infinity: f64,
    pub breakpoints: Vec<f64>,
    /// Closed support `[lo, hi]`.
    pub support: (f64, f64),
    pub label: String,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialProfile({})", self.label)
    }
}

impl RadialProfile {
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        exponent_at_zero: f64,
        exponent_at_infinity: f64,
    ) -> Self {
        RadialProfile {
            eval: Arc::new(f),
            exponent_at_zero,
            exponent_at_infinity,
            breakpoints: vec![],
            support: (0.0, f64::INFINITY),
            label: label.into(),
        }
    }

    pub fn with_breakpoints(mut self, b: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(b);
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (lo, hi);
        if lo > 0.0 {
            self.exponent_at_zero = f64::INFINITY;
        }
        if hi.is_finite() {
            self.exponent_at_infinity = f64::NEG_INFINITY;
        }
        self
    }

    pub fn constant(c: f64) -> Self {
        if c == 0.0 {
            return RadialProfile::zero();
        }
        RadialProfile::new(format!("{c}"), move |_| c, 0.0, 0.0)
    }

    pub fn zero() -> Self {
        RadialProfile::new("0", |_| 0.0, f64::INFINITY, f64::NEG_INFINITY).with_support(1.0, 1.0)
    }

    /// `r^a` on all of `(0, ∞)`.
    pub fn power(a: f64) -> Self {
        RadialProfile::new(format!("r^{a}"), move |r| r.powf(a), a, a)
    }

    /// `r^a χ_{(lo, hi]}(r)`; `lo = 0` or `hi = ∞` leave that side open.
    pub fn power_on(a: f64, lo: f64, hi: f64) -> Self {
        let mut bps = vec![];
        if lo > 0.0 {
            bps.push(lo);
        }
        if hi.is_finite() {
            bps.push(hi);
        }
        RadialProfile::new(format!("r^{a}·χ({lo},{hi}]"), move |r| if r > lo && r <= hi { r.powf(a) } else { 0.0 }, a, a)
            .with_breakpoints(bps)
            .with_support(lo, hi)
    }

    /// `χ_{(lo, hi]}(r)`.
    pub fn indicator(lo: f64, hi: f64) -> Self {
        let p = RadialProfile::power_on(0.0, lo, hi);
        RadialProfile { label: format!("χ({lo},{hi}]"), ..p }
    }

    /// `e^{−rate·r} χ_{(lo, hi]}(r)`.
    pub fn exp_on(rate: f64, lo: f64, hi: f64) -> Self {
        let mut bps = vec![];
        if lo > 0.0 {
            bps.push(lo);
        }
        if hi.is_finite() {
            bps.push(hi);
        }
        let e_inf = if rate > 0.0 { f64::NEG_INFINITY } else { 0.0 };
        RadialProfile::new(
            format!("exp(-{rate}r)·χ({lo},{hi}]"),
            move |r| if r > lo && r <= hi { (-rate * r).exp() } else { 0.0 },
            0.0,
            e_inf,
        )
        .with_breakpoints(bps)
        .with_support(lo, hi)
    }

    /// Parses an expression in `r` with declared exponents.
    pub fn from_expr(source: &str, exponent_at_zero: f64, exponent_at_infinity: f64) -> Result<Self> {
        let e = Expr::parse(source, &["r"])?;
        let bps = e.breakpoints();
        Ok(RadialProfile::new(source, move |r| e.eval(&[r]), exponent_at_zero, exponent_at_infinity).with_breakpoints(bps))
    }

    pub fn eval(&self, r: f64) -> f64 {
        (self.eval)(r)
    }

    pub fn function(&self) -> ScalarFn {
        self.eval.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.support.0 >= self.support.1
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return RadialProfile::zero();
        }
        let f = self.eval.clone();
        RadialProfile { eval: Arc::new(move |r| c * f(r)), label: format!("{c}*{}", self.label), ..self.clone() }
    }

    /// Pointwise product with another radial function `h` that grows like
    /// `r^{e0}` near zero and `r^{e∞}` near infinity.
    pub fn times(&self, h: ScalarFn, e0: f64, einf: f64, label: &str) -> Self {
        let f = self.eval.clone();
        RadialProfile {
            eval: Arc::new(move |r| {
                let v = f(r);
                if v == 0.0 {
                    0.0
                } else {
                    v * h(r)
                }
            }),
            exponent_at_zero: self.exponent_at_zero + e0,
            exponent_at_infinity: self.exponent_at_infinity + einf,
            label: format!("({})*{label}", self.label),
            ..self.clone()
        }
    }
}

/// A function on `R^n`, preferably in separable form `g(|x|)·h(x/|x|)`.
#[derive(Clone)]
pub enum TestFunction {
    Separable { radial: RadialProfile, angular: AngularFn },
    General {
        eval: PointFn,
        /// Exponents `(e0, e∞)` of a power-law envelope of `|f|`.
        envelope: (f64, f64),
        breakpoints: Vec<f64>,
        /// Radial support hint `[r_min, r_max]`.
        support: (f64, f64),
        label: String,
    },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.label())
    }
}

impl TestFunction {
    pub fn separable(radial: RadialProfile, angular: AngularFn) -> Self {
        TestFunction::Separable { radial, angular }
    }

    pub fn radial(radial: RadialProfile) -> Self {
        TestFunction::Separable { radial, angular: AngularFn::constant(1.0) }
    }

    pub fn zero() -> Self {
        TestFunction::radial(RadialProfile::zero())
    }

    pub fn general(
        label: impl Into<String>,
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        envelope: (f64, f64),
        breakpoints: Vec<f64>,
        support: (f64, f64),
    ) -> Self {
        TestFunction::General { eval: Arc::new(f), envelope, breakpoints, support, label: label.into() }
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::Separable { radial, angular } => format!("{}·[{}]", radial.label, angular.label()),
            TestFunction::General { label, .. } => label.clone(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Separable { radial, angular } => {
                let r = norm(x);
                if r == 0.0 {
                    let mut e = vec![0.0; x.len()];
                    e[0] = 1.0;
                    return radial.eval(0.0) * angular.eval(&e);
                }
                let g = radial.eval(r);
                if g == 0.0 {
                    return 0.0;
                }
                let y: Vec<f64> = x.iter().map(|v| v / r).collect();
                g * angular.eval(&y)
            }
            TestFunction::General { eval, .. } => eval(x),
        }
    }

    /// Power-law exponents `(e0, e∞)` of `|f|` at the origin and infinity.
    pub fn envelope(&self) -> (f64, f64) {
        match self {
            TestFunction::Separable { radial, .. } => (radial.exponent_at_zero, radial.exponent_at_infinity),
            TestFunction::General { envelope, .. } => *envelope,
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            TestFunction::Separable { radial, .. } => radial.breakpoints.clone(),
            TestFunction::General { breakpoints, .. } => breakpoints.clone(),
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            TestFunction::Separable { radial, .. } => radial.support,
            TestFunction::General { support, .. } => *support,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TestFunction::Separable { radial, angular } => radial.is_zero() || angular.as_constant() == Some(0.0),
            TestFunction::General { support, .. } => support.0 >= support.1,
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        match self {
            TestFunction::Separable { radial, angular } => TestFunction::Separable { radial: radial.scale(c), angular: angular.clone() },
            TestFunction::General { eval, envelope, breakpoints, support, label } => {
                let f = eval.clone();
                TestFunction::General {
                    eval: Arc::new(move |x| c * f(x)),
                    envelope: *envelope,
                    breakpoints: breakpoints.clone(),
                    support: *support,
                    label: format!("{c}*{label}"),
                }
            }
        }
    }

    /// `a·f + b·g` as a general function.
    pub fn combine(a: f64, f: &TestFunction, b: f64, g: &TestFunction) -> TestFunction {
        let (ef, eg) = (f.envelope(), g.envelope());
        let (sf, sg) = (f.support(), g.support());
        let mut bps = f.breakpoints();
        bps.extend(g.breakpoints());
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let (f2, g2) = (f.clone(), g.clone());
        TestFunction::General {
            eval: Arc::new(move |x| a * f2.eval(x) + b * g2.eval(x)),
            envelope: (ef.0.min(eg.0), ef.1.max(eg.1)),
            breakpoints: bps,
            support: (sf.0.min(sg.0), sf.1.max(sg.1)),
            label: format!("{a}*({})+{b}*({})", f.label(), g.label()),
        }
    }

    /// Forgets the separable structure; used to exercise the nested paths.
    pub fn into_general(&self) -> TestFunction {
        let f = self.clone();
        TestFunction::General {
            eval: Arc::new(move |x| f.eval(x)),
            envelope: self.envelope(),
            breakpoints: self.breakpoints(),
            support: self.support(),
            label: self.label(),
        }
    }
}

/// Family of a Lipschitz symbol, used for radial fast paths.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `b(x) = |x|^β`
    Power,
    /// `b(x) = ⟨x, e⟩`
    Linear(Vec<f64>),
    /// `b(x) = c`
    Constant(f64),
    Custom,
}

/// A symbol `b ∈ Lip^β(R^n)` with declared `‖b‖_{Lip^β}`.
#[derive(Clone)]
pub struct LipschitzSymbol {
    eval: PointFn,
    pub beta: f64,
    pub lip_norm: f64,
    pub kind: SymbolKind,
    /// Exponents `(g0, g∞)` with `|b(x)| ≲ |x|^{g}` near 0 and ∞.
    pub growth: (f64, f64),
}

impl fmt::Debug for LipschitzSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LipschitzSymbol({:?}, beta={}, lip_norm={})", self.kind, self.beta, self.lip_norm)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta <= 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("Lipschitz exponent must lie in (0, 1], got {beta}")))
    }
}

impl LipschitzSymbol {
    /// `b(x) = |x|^β` with `‖b‖_{Lip^β} = 1`.
    pub fn power(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(LipschitzSymbol {
            eval: Arc::new(move |x| norm(x).powf(beta)),
            beta,
            lip_norm: 1.0,
            kind: SymbolKind::Power,
            growth: (beta, beta),
        })
    }

    /// `b(x) = ⟨x, e⟩` for a unit vector `e`, `β = 1`, `‖b‖ = 1`.
    pub fn linear(e: &[f64]) -> Result<Self> {
        let len = norm(e);
        if !(len > 0.0) {
            return Err(Error::Parameter("direction must be nonzero".into()));
        }
        let e: Vec<f64> = e.iter().map(|v| v / len).collect();
        let e2 = e.clone();
        Ok(LipschitzSymbol {
            eval: Arc::new(move |x| x.iter().zip(&e2).map(|(a, b)| a * b).sum()),
            beta: 1.0,
            lip_norm: 1.0,
            kind: SymbolKind::Linear(e),
            growth: (1.0, 1.0),
        })
    }

    /// A constant symbol; its Lipschitz seminorm is zero for every `β`.
    pub fn constant(c: f64, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(LipschitzSymbol {
            eval: Arc::new(move |_| c),
            beta,
            lip_norm: 0.0,
            kind: SymbolKind::Constant(c),
            growth: (0.0, 0.0),
        })
    }

    pub fn custom(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        beta: f64,
        lip_norm: f64,
        growth: (f64, f64),
    ) -> Result<Self> {
        check_beta(beta)?;
        if !(lip_norm >= 0.0) {
            return Err(Error::Parameter("lip_norm must be nonnegative".into()));
        }
        Ok(LipschitzSymbol { eval: Arc::new(f), beta, lip_norm, kind: SymbolKind::Custom, growth })
    }

    /// Same symbol with a different declared seminorm (for negative controls).
    pub fn with_lip_norm(&self, lip_norm: f64) -> Self {
        LipschitzSymbol { lip_norm, ..self.clone() }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    /// `b` as a function of `|x|` when it is radial.
    pub fn radial(&self) -> Option<ScalarFn> {
        match self.kind {
            SymbolKind::Power => {
                let beta = self.beta;
                Some(Arc::new(move |r: f64| r.powf(beta)))
            }
            SymbolKind::Constant(c) => Some(Arc::new(move |_| c)),
            _ => None,
        }
    }

    /// Samples difference quotients `|b(x)−b(y)|/|x−y|^β` over random pairs
    /// (near the origin, near the diagonal and at large scale) and returns
    /// the largest; fails if it exceeds the declared seminorm.
    pub fn check_sampled(&self, n: usize, pairs: usize, seed: u64) -> Result<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..pairs {
            let scale = 10f64.powf(rng.gen_range(-4.0..4.0));
            for v in x.iter_mut() {
                *v = rng.gen_range(-1.0..1.0) * scale;
            }
            match i % 3 {
                0 => {
                    for v in y.iter_mut() {
                        *v = rng.gen_range(-1.0..1.0) * scale;
                    }
                }
                1 => {
                    let eps = scale * 10f64.powf(rng.gen_range(-8.0..-1.0));
                    for (yi, xi) in y.iter_mut().zip(&x) {
                        *yi = xi + rng.gen_range(-1.0..1.0) * eps;
                    }
                }
                _ => {
                    let t: f64 = rng.gen_range(0.0..1.0);
                    for (yi, xi) in y.iter_mut().zip(&x) {
                        *yi = xi * t;
                    }
                }
            }
            let d = norm(&x.iter().zip(&y).map(|(a, b)| a - b).collect::<Vec<_>>());
            if d == 0.0 {
                continue;
            }
            let lhs = (self.eval(&x) - self.eval(&y)).abs();
            let rhs = d.powf(self.beta);
            let rounding = 4.0 * f64::EPSILON * self.eval(&x).abs().max(self.eval(&y).abs());
            worst = worst.max((lhs - rounding).max(0.0) / rhs);
            if lhs > self.lip_norm * rhs * (1.0 + 1e-10) + rounding {
                return Err(Error::LipschitzViolation { lhs, rhs: self.lip_norm * rhs });
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_norm_examples() {
        let one2 = AngularProfile::ones(2);
        assert!((omega_norm(&one2, 2.0, None, 1e-12).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-12);
        let w = Weight::power(0.0, 1).unwrap();
        let v = omega_norm(&AngularProfile::ones(1), 2.0, Some(&w), 1e-12).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-14);
        let om = AngularProfile::new(AngularFn::from_expr("2 + cos(theta)").unwrap(), 2, true).unwrap();
        let v = omega_norm(&om, 2.0, None, 1e-13).unwrap();
        assert!((v - (9.0 * PI).sqrt()).abs() < 1e-11);
        assert!((omega_norm(&om, f64::INFINITY, None, 1e-12).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn angular_expression_coordinates() {
        let h = AngularFn::from_expr("cos(theta) - x1").unwrap();
        for y in [[0.6, 0.8, 0.0], [0.0, 0.6, 0.8], [-1.0, 0.0, 0.0]] {
            assert!(h.eval(&y).abs() < 1e-15);
            assert!(h.eval(&y[..2]).abs() < 1e-15 || norm(&y[..2]) != 1.0);
        }
        assert_eq!(h.eval(&[-1.0]), 0.0);
        assert!(AngularProfile::new(AngularFn::from_expr("x1").unwrap(), 1, true).is_ok());
        assert!(AngularProfile::new(AngularFn::from_expr("max(x1, 0)").unwrap(), 2, true).is_err());
    }

    #[test]
    fn kernel_presets() {
        let h = RadialKernel::hardy(2);
        assert_eq!(h.eval(2.0), 0.25);
        assert_eq!(h.eval(0.5), 0.0);
        let a = RadialKernel::adjoint_hardy();
        assert_eq!((a.eval(0.5), a.eval(2.0)), (1.0, 0.0));
        let p = RadialKernel::power(-2.5, 1.0, f64::INFINITY).unwrap();
        assert_eq!(p.eval(4.0), 4f64.powf(-2.5));
        assert_eq!(RadialKernel::preset("hardy:3").unwrap().exponent_at_infinity, -3.0);
        assert!(RadialKernel::preset("hardy:7").is_err());
    }

    #[test]
    fn kernel_sign_is_sampled() {
        let k = RadialKernel::from_expr("sin(t)", 1.0, 0.0).unwrap();
        assert_eq!(k.sign, Sign::Mixed);
        assert!(k.clone().with_sign(Sign::Nonnegative).is_err());
        let k = RadialKernel::from_expr("-exp(-t)", 0.0, f64::NEG_INFINITY).unwrap();
        assert_eq!(k.sign, Sign::Nonpositive);
    }

    #[test]
    fn lipschitz_presets() {
        let b = LipschitzSymbol::power(1.0).unwrap();
        assert_eq!((b.eval(&[3.0, 4.0]) - b.eval(&[0.0, 0.0])).abs(), 5.0);
        assert!(b.check_sampled(2, 20_000, 1).unwrap() <= 1.0 + 1e-12);
        let b = LipschitzSymbol::power(0.5).unwrap();
        assert!(b.check_sampled(3, 20_000, 2).unwrap() <= 1.0 + 1e-12);
        let b = LipschitzSymbol::linear(&[1.0, 0.0]).unwrap();
        assert!(b.check_sampled(2, 20_000, 3).unwrap() <= 1.0 + 1e-12);
        assert!(LipschitzSymbol::power(1.5).is_err());
        assert!(LipschitzSymbol::power(0.0).is_err());
        let bad = LipschitzSymbol::power(0.5).unwrap().with_lip_norm(0.5);
        assert!(matches!(bad.check_sampled(2, 20_000, 4), Err(Error::LipschitzViolation { .. })));
    }

    #[test]
    fn separable_evaluation() {
        let f = TestFunction::separable(RadialProfile::power_on(1.5, 0.5, 3.0), AngularFn::from_expr("2 + x1").unwrap());
        let x = [1.2, -0.5];
        let r = norm(&x);
        assert_eq!(f.eval(&x), r.powf(1.5) * (2.0 + x[0] / r));
        assert_eq!(f.eval(&[4.0, 0.0]), 0.0);
    }
}
